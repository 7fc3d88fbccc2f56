#include "junctionflow/scl_scheme.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <ostream>
#include <sstream>

#include <boost/math/quadrature/gauss.hpp>

#include "junctionflow/csv.hpp"
#include "junctionflow/errors.hpp"

namespace jf {

CflReport check_cfl_scl(const Grid1D& grid, const SCLProblem& problem) {
  return make_cfl_report(grid, problem.coupling, /*require_gamma=*/true);
}

SCLState scl_initial_state(const SCLProblem& problem, const Grid1D& grid) {
  using boost::math::quadrature::gauss;
  // Five-point Gauss-Legendre average; a cell where every node sees the same
  // value is returned as that value, so piecewise-constant data stay exact.
  const auto& xs = gauss<double, 5>::abscissa();
  const auto& ws = gauss<double, 5>::weights();
  auto avg = [&](double x0, double x1) {
    const double mid = 0.5 * (x0 + x1), half = 0.5 * (x1 - x0);
    std::array<double, 5> v;
    v[0] = problem.rho0(mid);
    for (std::size_t i = 1; i < xs.size(); ++i) {
      v[2 * i - 1] = problem.rho0(mid - half * xs[i]);
      v[2 * i] = problem.rho0(mid + half * xs[i]);
    }
    if (std::all_of(v.begin(), v.end(), [&](double y) { return y == v[0]; })) return v[0];
    double sum = ws[0] * v[0];
    for (std::size_t i = 1; i < xs.size(); ++i) sum += ws[i] * (v[2 * i - 1] + v[2 * i]);
    return 0.5 * sum;
  };
  SCLState s;
  s.p.resize(grid.interface_count());
  for (int k = 0; k < grid.interface_count(); ++k) {
    const int j = grid.j_min + k;
    s.p[k] = avg(grid.x(j), grid.x(j + 1));
  }
  s.ghost.left = avg(grid.x(grid.j_min) - grid.dx, grid.x(grid.j_min));
  s.ghost.right = avg(grid.x(grid.j_max), grid.x(grid.j_max) + grid.dx);
  return s;
}

void check_stability_box(const SCLState& s, const Box& box, const Grid1D& grid, double tol) {
  for (int k = 0; k < grid.interface_count(); ++k) {
    const int j = grid.j_min + k;
    const ConvexFlux& H = j <= -1 ? box.left() : box.right();
    if (!H.in_domain(s.p[k], tol) || !std::isfinite(s.p[k])) {
      std::ostringstream os;
      os.precision(17);
      os << "stability box violated at interface j+1/2 with j=" << j << ", step " << s.n
         << ": p=" << s.p[k] << " not in [" << H.a() << ", " << H.c() << "]";
      throw InvariantError(os.str());
    }
  }
}

namespace {

SCLState advance(const SCLState& state, const std::vector<double>& F, const SCLProblem& problem,
                 const Grid1D& grid) {
  const double r = grid.dt / grid.dx;
  SCLState next;
  next.n = state.n + 1;
  next.ghost = state.ghost;
  next.p = state.p;
  next.p_lo = state.p_lo;
  next.p_lo.resize(next.p.size(), 0.0);
  for (std::size_t k = 0; k < state.p.size(); ++k) compensated_add(next.p[k], next.p_lo[k], -r * (F[k + 1] - F[k]));
  check_stability_box(next, problem.box(), grid);
  return next;
}

// Slopes fed to the numerical fluxes: p + p_lo rounded to double.
const std::vector<double>& flux_input(const SCLState& s, std::vector<double>& buf) {
  if (s.p_lo.empty()) return s.p;
  buf.resize(s.p.size());
  for (std::size_t k = 0; k < s.p.size(); ++k) buf[k] = s.p[k] + s.p_lo[k];
  return buf;
}

}  // namespace

SCLState scl_step(const SCLState& state, const SCLProblem& problem, const Grid1D& grid) {
  if (static_cast<int>(state.p.size()) != grid.interface_count())
    throw DomainError("scl_step: state size mismatch");
  std::vector<double> F, buf;
  node_fluxes(problem.coupling, grid, flux_input(state, buf), state.ghost, F);
  return advance(state, F, problem, grid);
}

SCLTrajectory scl_run(const SCLProblem& problem, const Grid1D& grid, SCLState init, int stride) {
  grid.validate();
  if (stride < 1) throw DomainError("scl_solve: stride must be >= 1");
  const CflReport cfl = check_cfl_scl(grid, problem);
  if (!cfl.pass) throw CflError("scl_solve: " + cfl.message);
  if (static_cast<int>(init.p.size()) != grid.interface_count())
    throw DomainError("scl_solve: initial state size mismatch");
  try {
    check_stability_box(init, problem.box(), grid, 1e-12);
  } catch (const InvariantError& e) {
    throw DomainError(std::string("scl_solve: initial data outside the branch intervals: ") + e.what());
  }

  SCLTrajectory traj{grid, problem.coupling, stride, {}, 0.0};
  auto mass = [&](const SCLState& s) {
    double m = 0.0;
    for (double v : s.p) m += v;
    for (double v : s.p_lo) m += v;
    return m * grid.dx;
  };
  const double m0 = mass(init);
  double outflow = 0.0;
  SCLState cur = std::move(init);
  traj.states.push_back(cur);
  std::vector<double> F, buf;
  for (int n = 0; n < grid.n_steps; ++n) {
    node_fluxes(problem.coupling, grid, flux_input(cur, buf), cur.ghost, F);
    outflow += grid.dt * (F.back() - F.front());
    cur = advance(cur, F, problem, grid);
    traj.mass_residual = std::max(traj.mass_residual, std::abs(mass(cur) - m0 + outflow));
    if (cur.n % stride == 0 || cur.n == grid.n_steps) traj.states.push_back(cur);
  }
  return traj;
}

SCLTrajectory scl_solve(const SCLProblem& problem, const Grid1D& grid, int stride) {
  return scl_run(problem, grid, scl_initial_state(problem, grid), stride);
}

void write_scl_csv(std::ostream& os, const SCLTrajectory& traj) {
  CsvWriter w(os, {"t", "x_mid", "p"});
  for (const auto& s : traj.states)
    for (int k = 0; k < traj.grid.interface_count(); ++k)
      w.row({traj.grid.t(s.n), traj.grid.x_mid(traj.grid.j_min + k), s.p[k]});
}

}  // namespace jf
