#include "junctionflow/hj_scheme.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

#include <boost/math/tools/minima.hpp>

#include "junctionflow/csv.hpp"
#include "junctionflow/errors.hpp"

namespace jf {

std::vector<std::string> HJProblem::check_initial_data(const Grid1D& grid, double tol) const {
  std::vector<std::string> issues;
  const Box& b = box();
  // Slopes are probed on a grid four times finer than the computational one,
  // plus the frozen ghost slopes at both ends.
  const double h = grid.dx / 4.0;
  const int n = 4 * (grid.j_max - grid.j_min + 2);
  const double x_start = grid.x(grid.j_min) - grid.dx;
  for (int i = 0; i < n; ++i) {
    const double x1 = x_start + i * h;
    const double x2 = x1 + h;
    const double s = (u0(x2) - u0(x1)) / h;
    const ConvexFlux& H = x2 <= 0.0 ? b.left() : (x1 >= 0.0 ? b.right() : b.left());
    if (x1 < 0.0 && x2 > 0.0) continue;
    if (!H.in_domain(s, tol)) {
      std::ostringstream os;
      os.precision(17);
      os << "initial slope " << s << " on [" << x1 << ", " << x2 << "] outside ["
         << H.a() << ", " << H.c() << "]";
      issues.push_back(os.str());
      if (issues.size() > 10) break;
    }
  }
  return issues;
}

CflReport check_cfl_hj(const Grid1D& grid, const HJProblem& problem) {
  return make_cfl_report(grid, problem.coupling, /*require_gamma=*/false);
}

HJState hj_initial_state(const HJProblem& problem, const Grid1D& grid) {
  HJState s;
  s.n = 0;
  s.u.resize(grid.node_count());
  s.u_lo.assign(grid.node_count(), 0.0);
  for (int k = 0; k < grid.node_count(); ++k) s.u[k] = problem.u0(grid.x(grid.j_min + k));
  const double xl = grid.x(grid.j_min), xr = grid.x(grid.j_max);
  s.ghost.left = (problem.u0(xl) - problem.u0(xl - grid.dx)) / grid.dx;
  s.ghost.right = (problem.u0(xr + grid.dx) - problem.u0(xr)) / grid.dx;
  return s;
}

HJState hj_step(const HJState& state, const HJProblem& problem, const Grid1D& grid) {
  const int nodes = grid.node_count();
  if (static_cast<int>(state.u.size()) != nodes) throw DomainError("hj_step: state size mismatch");
  std::vector<double> p(nodes - 1);
  for (int k = 0; k + 1 < nodes; ++k) p[k] = state.slope(k, grid.dx);
  std::vector<double> F;
  node_fluxes(problem.coupling, grid, p, state.ghost, F);
  HJState next;
  next.n = state.n + 1;
  next.ghost = state.ghost;
  next.u.resize(nodes);
  next.u_lo.resize(nodes);
  for (int k = 0; k < nodes; ++k) {
    next.u[k] = state.u[k];
    next.u_lo[k] = state.u_lo[k];
    compensated_add(next.u[k], next.u_lo[k], -grid.dt * F[k]);
    if (!std::isfinite(next.u[k])) {
      std::ostringstream os;
      os << "hj_step: non-finite value at node j=" << grid.j_min + k << " step " << next.n;
      throw InvariantError(os.str());
    }
  }
  return next;
}

HJTrajectory hj_solve(const HJProblem& problem, const Grid1D& grid, int stride) {
  grid.validate();
  if (stride < 1) throw DomainError("hj_solve: stride must be >= 1");
  const CflReport cfl = check_cfl_hj(grid, problem);
  if (!cfl.pass) throw CflError("hj_solve: " + cfl.message);
  const auto issues = problem.check_initial_data(grid);
  if (!issues.empty()) throw DomainError("hj_solve: initial datum not admissible: " + issues.front());

  HJTrajectory traj;
  traj.grid = grid;
  traj.stride = stride;
  HJState cur = hj_initial_state(problem, grid);
  const int k0 = -grid.j_min;
  traj.junction_values.push_back(cur.value(k0));
  traj.states.push_back(cur);
  for (int n = 0; n < grid.n_steps; ++n) {
    cur = hj_step(cur, problem, grid);
    traj.junction_values.push_back(cur.value(k0));
    if (cur.n % stride == 0 || cur.n == grid.n_steps) traj.states.push_back(cur);
  }
  return traj;
}

double sample_u(const HJTrajectory& traj, double t, double x) {
  const Grid1D& g = traj.grid;
  const int n = static_cast<int>(std::floor(t / g.dt + 1e-9));
  if (t < 0.0 || n > g.n_steps) throw DomainError("sample_u: time outside the computed window");
  const HJState* st = nullptr;
  for (const auto& s : traj.states)
    if (s.n == n) st = &s;
  if (n == g.n_steps + 1) st = nullptr;
  if (!st) throw DomainError("sample_u: requested time level was not stored (stride)");
  const double xl = g.x(g.j_min);
  const double xr = g.x(g.j_max);
  if (x < xl - 1e-12 || x > xr + 1e-12) throw DomainError("sample_u: position outside the window");
  int k = static_cast<int>(std::floor((x - xl) / g.dx));
  k = std::clamp(k, 0, g.node_count() - 2);
  const double xk = g.x(g.j_min + k);
  const double slope = st->slope(k, g.dx);
  if (x == xk) return st->value(k);
  return st->value(k) + (x - xk) * slope;
}

void write_hj_csv(std::ostream& os, const HJTrajectory& traj) {
  CsvWriter w(os, {"t", "x", "u"});
  for (const auto& s : traj.states)
    for (int k = 0; k < traj.grid.node_count(); ++k)
      w.row({traj.grid.t(s.n), traj.grid.x(traj.grid.j_min + k), s.value(k)});
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Min1 {
  double arg = 0.0;
  double value = kInf;
};

// Grid search on [lo, hi] with `n` points, then a finer grid (ten times the
// resolution) around the incumbent, then Brent on the last bracket.
template <class F>
Min1 grid_refine_min(F&& f, double lo, double hi, int n, double* coarse_value = nullptr) {
  Min1 best;
  if (hi <= lo) {
    best.arg = lo;
    best.value = f(lo);
    if (coarse_value) *coarse_value = best.value;
    return best;
  }
  const double h = (hi - lo) / (n - 1);
  for (int i = 0; i < n; ++i) {
    const double y = i == n - 1 ? hi : lo + i * h;
    const double v = f(y);
    if (v < best.value) best = {y, v};
  }
  if (coarse_value) *coarse_value = best.value;
  const double flo = std::max(lo, best.arg - h), fhi = std::min(hi, best.arg + h);
  const int nf = 21;
  const double hf = (fhi - flo) / (nf - 1);
  for (int i = 0; i < nf; ++i) {
    const double y = i == nf - 1 ? fhi : flo + i * hf;
    const double v = f(y);
    if (v < best.value) best = {y, v};
  }
  const double blo = std::max(lo, best.arg - hf), bhi = std::min(hi, best.arg + hf);
  if (bhi > blo) {
    std::uintmax_t it = 60;
    auto r = boost::math::tools::brent_find_minima(f, blo, bhi, 40, it);
    if (r.second < best.value) best = {r.first, r.second};
  }
  return best;
}

}  // namespace

OracleResult lax_oleinik_oracle(const Box& box, double A, const std::function<double(double)>& u0,
                                double t0, double x0, double T, double accuracy) {
  if (!(A >= box.H0() - 1e-14 && A <= 1e-14))
    throw DomainError("lax_oleinik_oracle: limiter outside [H0, 0]");
  const double s = T - t0;
  if (s < 0.0) throw DomainError("lax_oleinik_oracle: t0 must not exceed T");
  OracleResult res;
  if (s == 0.0) {
    res.value = u0(x0);
    return res;
  }
  // Home branch contains x0; x0 = 0 is treated as the left branch with the
  // approach time allowed to vanish.
  const bool home_right = x0 > 0.0;
  const ConvexFlux& Hh = home_right ? box.right() : box.left();
  const ConvexFlux& Ho = home_right ? box.left() : box.right();
  const double sh = home_right ? 1.0 : -1.0;  // sign of positions on the home branch
  const double LH = std::max(box.left().lipschitz(), box.right().lipschitz());
  const double reach = LH * s + 1.0;
  constexpr int Ny = 400;
  constexpr int Ntau = 200;
  double coarse_total = kInf;

  // Straight path staying on the home branch.
  auto straight = [&](double y) { return s * legendre(Hh, (y - x0) / s) + u0(y); };
  double lo = x0 - reach, hi = x0 + reach;
  if (home_right) lo = std::max(lo, 0.0);
  else hi = std::min(hi, 0.0);
  double c1 = kInf;
  const Min1 f1 = grid_refine_min(straight, lo, hi, Ny, &c1);
  coarse_total = c1;

  // Best cost of leaving the junction for the given branch during time sigma.
  auto leave = [&](const ConvexFlux& H, double sgn, double sigma, double* coarse) {
    if (sigma <= 0.0) {
      if (coarse) *coarse = u0(0.0);
      return u0(0.0);
    }
    auto f = [&](double y) { return sigma * legendre(H, y / sigma) + u0(y); };
    const double r = LH * sigma + 1.0;
    const double a = sgn > 0 ? 0.0 : -r;
    const double b = sgn > 0 ? r : 0.0;
    return grid_refine_min(f, a, b, Ny, coarse).value;
  };
  auto approach = [&](double sigma) {
    if (sigma <= 0.0) return x0 == 0.0 ? 0.0 : kInf;
    return sigma * legendre(Hh, -x0 / sigma);
  };

  // Two-stage search over (sigma1, sigma3) with sigma1 + sigma3 <= s; the
  // wait in between costs -A per unit time.
  const double h = s / (Ntau - 1);
  std::vector<double> av(Ntau), bo(Ntau), bh(Ntau), bo_c(Ntau), bh_c(Ntau);
  for (int i = 0; i < Ntau; ++i) {
    const double sig = i == Ntau - 1 ? s : i * h;
    av[i] = approach(sig) + A * sig;
    bo[i] = leave(Ho, -sh, sig, &bo_c[i]) + A * sig;
    bh[i] = leave(Hh, sh, sig, &bh_c[i]) + A * sig;
    bo_c[i] += A * sig;
    bh_c[i] += A * sig;
  }
  double best = f1.value;
  int bi = 0, bk = 0;
  bool via_other = true;
  double coarse_junction = kInf;
  for (int i = 0; i < Ntau; ++i) {
    if (!std::isfinite(av[i])) continue;
    for (int k = 0; i + k < Ntau; ++k) {
      const double vo = av[i] + bo[k] - A * s;
      const double vh = av[i] + bh[k] - A * s;
      coarse_junction = std::min({coarse_junction, av[i] + bo_c[k] - A * s, av[i] + bh_c[k] - A * s});
      if (vo < best) {
        best = vo;
        bi = i;
        bk = k;
        via_other = true;
      }
      if (vh < best) {
        best = vh;
        bi = i;
        bk = k;
        via_other = false;
      }
    }
  }
  coarse_total = std::min(coarse_total, coarse_junction);

  // Local refinement of the junction paths around the incumbent.
  if (best < f1.value) {
    const ConvexFlux& Hl = via_other ? Ho : Hh;
    const double sl = via_other ? -sh : sh;
    const double s1c = bi * h, s3c = bk * h;
    const double hf = h / 10.0;
    std::array<double, 21> b3{};
    for (int k = -10; k <= 10; ++k) {
      const double s3 = s3c + k * hf;
      b3[k + 10] = s3 < 0.0 ? kInf : leave(Hl, sl, s3, nullptr) + A * s3;
    }
    for (int i = -10; i <= 10; ++i) {
      const double s1 = s1c + i * hf;
      if (s1 < 0.0 || s1 > s) continue;
      const double a1 = approach(s1) + A * s1;
      if (!std::isfinite(a1)) continue;
      for (int k = -10; k <= 10; ++k) {
        const double s3 = s3c + k * hf;
        if (s3 < 0.0 || s1 + s3 > s * (1 + 1e-15)) continue;
        best = std::min(best, a1 + b3[k + 10] - A * s);
      }
    }
  }
  res.value = best;
  res.refinement_change = std::abs(coarse_total - best);
  res.converged = res.refinement_change <= accuracy;
  return res;
}

}  // namespace jf
