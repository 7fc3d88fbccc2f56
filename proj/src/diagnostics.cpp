#include "junctionflow/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "junctionflow/csv.hpp"
#include "junctionflow/errors.hpp"

namespace jf {

namespace {

void require_full_stride(const SCLTrajectory& traj, const char* who) {
  if (traj.stride != 1) throw DomainError(std::string(who) + ": trajectory must be stored at full stride");
}

// Phi at every node for the constants k (k_L left of the junction, k_R right).
void entropy_node_fluxes(const SCLTrajectory& traj, const SCLState& s, GermPoint k,
                         std::vector<double>& out) {
  const Grid1D& g = traj.grid;
  const int nodes = g.node_count();
  out.resize(nodes);
  for (int m = 0; m < nodes; ++m) {
    const int j = g.j_min + m;
    const double pl = m == 0 ? s.ghost.left : s.p[m - 1];
    const double pr = m == nodes - 1 ? s.ghost.right : s.p[m];
    // Constants seen by the left and right interface of node j.
    const double kl = j <= 0 ? k.kL : k.kR;
    const double kr = j >= 0 ? k.kR : k.kL;
    out[m] = node_flux(traj.coupling, j, std::max(pl, kl), std::max(pr, kr)) -
             node_flux(traj.coupling, j, std::min(pl, kl), std::min(pr, kr));
  }
}

double branch_delta(const SCLTrajectory& traj, BranchSide side) {
  return side == BranchSide::left ? traj.coupling.box().left().delta()
                                  : traj.coupling.box().right().delta();
}

std::vector<double> gradients(const std::vector<double>& q, double dx) {
  // w[j] for j >= 1; w[0] unused.
  std::vector<double> w(q.size(), 0.0);
  for (std::size_t j = 1; j < q.size(); ++j) w[j] = (q[j] - q[j - 1]) / dx;
  return w;
}

}  // namespace

EntropyAudit entropy_residual(const SCLTrajectory& traj, GermPoint k, double flag_tol) {
  require_full_stride(traj, "entropy_residual");
  const Box& box = traj.coupling.box();
  const Grid1D& g = traj.grid;
  EntropyAudit audit;
  audit.k = k;
  const double F0k = traj.coupling(k.kL, k.kR);
  audit.R_L = std::abs(box.left()(k.kL) - F0k);
  audit.R_R = std::abs(box.right()(k.kR) - F0k);
  audit.junction_remainder = audit.R_L + audit.R_R;

  std::vector<double> phi;
  for (std::size_t i = 0; i + 1 < traj.states.size(); ++i) {
    const SCLState& a = traj.states[i];
    const SCLState& b = traj.states[i + 1];
    if (b.n != a.n + 1) continue;
    entropy_node_fluxes(traj, a, k, phi);
    for (int m = 0; m < g.interface_count(); ++m) {
      const int j = g.j_min + m;
      const double kj = j <= -1 ? k.kL : k.kR;
      const double lhs = (std::abs(b.p[m] - kj) - std::abs(a.p[m] - kj)) / g.dt +
                         (phi[m + 1] - phi[m]) / g.dx;
      double rhs = 0.0;
      if (j == -1) rhs = audit.R_L / g.dx;
      if (j == 0) rhs = audit.R_R / g.dx;
      const double v = lhs - rhs;
      if (v > audit.worst_violation) {
        audit.worst_violation = v;
        audit.worst_n = a.n;
        audit.worst_j = j;
      }
      if (v > flag_tol && audit.flagged.size() < 1000) audit.flagged.emplace_back(a.n, j);
    }
  }
  return audit;
}

std::vector<double> branch_sequence(const SCLState& s, const Grid1D& g, BranchSide side,
                                    Reflection refl) {
  std::vector<double> q;
  if (side == BranchSide::right) {
    q.assign(s.p.begin() + (-g.j_min), s.p.end());
    return q;
  }
  const int count = -g.j_min;
  q.resize(count);
  for (int j = 0; j < count; ++j) {
    const double v = s.p[(-j - 1) - g.j_min];
    q[j] = refl == Reflection::negated ? -v : v;
  }
  return q;
}

double discrete_gradient_ode_check(const SCLTrajectory& traj, BranchSide side, Reflection refl) {
  require_full_stride(traj, "discrete_gradient_ode_check");
  const Grid1D& g = traj.grid;
  const double delta = branch_delta(traj, side);
  double worst = 0.0;
  for (std::size_t i = 0; i + 1 < traj.states.size(); ++i) {
    const SCLState& a = traj.states[i];
    const SCLState& b = traj.states[i + 1];
    if (b.n != a.n + 1) continue;
    const auto wa = gradients(branch_sequence(a, g, side, refl), g.dx);
    const auto wb = gradients(branch_sequence(b, g, side, refl), g.dx);
    const int count = static_cast<int>(wa.size());
    for (int j = 2; j <= count - 2; ++j) {
      const double what = std::max({0.0, wa[j - 1], wa[j], wa[j + 1]});
      const double v = (std::max(0.0, wb[j]) - what) / g.dt + delta / 8.0 * what * what;
      worst = std::max(worst, v);
    }
  }
  return worst;
}

double oleinik_check(const SCLTrajectory& traj, int J1, int J2, BranchSide side, Reflection refl) {
  require_full_stride(traj, "oleinik_check");
  const Grid1D& g = traj.grid;
  const int count = side == BranchSide::right ? g.j_max : -g.j_min;
  if (!(J1 >= 2 && J2 > J1 && J2 <= count - 1))
    throw DomainError("oleinik_check: window must satisfy 2 <= J1 < J2 <= last gradient index");
  const double delta = branch_delta(traj, side);
  double worst = 0.0;
  for (const auto& s : traj.states) {
    const int n = s.n;
    if (2 * n > J2 - J1) break;
    const auto w = gradients(branch_sequence(s, g, side, refl), g.dx);
    double sup = -std::numeric_limits<double>::infinity();
    for (int j = J1 + n; j <= J2 - n; ++j) sup = std::max(sup, w[j]);
    worst = std::max(worst, delta / 8.0 * sup - 1.0 / ((n + 1) * g.dt));
  }
  return worst;
}

double max_discrete_gradient(const SCLState& s, const Grid1D& g, int J1, int J2, BranchSide side,
                             Reflection refl) {
  const auto w = gradients(branch_sequence(s, g, side, refl), g.dx);
  if (!(J1 >= 1 && J2 > J1 && J2 <= static_cast<int>(w.size())))
    throw DomainError("max_discrete_gradient: window outside the branch");
  double m = -std::numeric_limits<double>::infinity();
  for (int j = J1; j <= J2 - 1; ++j) m = std::max(m, w[j]);
  return m;
}

TvReport tv_check(const SCLTrajectory& traj, std::size_t index, int J1, int J2, double B,
                  BranchSide side, Reflection refl) {
  const Grid1D& g = traj.grid;
  if (index >= traj.states.size()) throw DomainError("tv_check: level index out of range");
  const auto q = branch_sequence(traj.states[index], g, side, refl);
  const int count = static_cast<int>(q.size());
  if (!(J1 >= 2 && J2 >= J1 && J2 <= count - 1))
    throw DomainError("tv_check: window must satisfy 2 <= J1 <= J2 <= last interface index");
  const ConvexFlux& H = side == BranchSide::left ? traj.coupling.box().left() : traj.coupling.box().right();
  TvReport r;
  for (int j = J1; j <= J2 - 1; ++j) {
    const double d = q[j] - q[j - 1];
    r.tv += std::abs(d);
    if (d / g.dx > B * (1 + 1e-12) + 1e-12) r.one_sided_ok = false;
  }
  const double M = traj.coupling.box().M();
  r.tv_bound = 2.0 * M + 2.0 * B * (J2 - J1) * g.dx;
  r.time_bound = 2.0 * H.lipschitz() * g.dt / g.dx * r.tv;
  r.pass = r.tv <= r.tv_bound * (1 + 1e-12) + 1e-12;
  if (index + 1 < traj.states.size() && traj.states[index + 1].n == traj.states[index].n + 1) {
    r.has_next = true;
    const auto qn = branch_sequence(traj.states[index + 1], g, side, refl);
    for (int j = J1 + 1; j <= J2 - 1; ++j) r.time_variation += std::abs(qn[j - 1] - q[j - 1]);
    r.pass = r.pass && r.time_variation <= r.time_bound * (1 + 1e-12) + 1e-12;
  }
  return r;
}

GermPoint extract_traces(const SCLTrajectory& traj, double t0, double t1) {
  const Grid1D& g = traj.grid;
  GermPoint sum{0.0, 0.0};
  int count = 0;
  for (const auto& s : traj.states) {
    const double t = g.t(s.n);
    if (t < t0 - 1e-12 || t > t1 + 1e-12) continue;
    sum.kL += s.p[-1 - g.j_min];
    sum.kR += s.p[-g.j_min];
    ++count;
  }
  if (count == 0) throw DomainError("extract_traces: no stored level inside the time window");
  return {sum.kL / count, sum.kR / count};
}

GermPoint extract_traces(const SCLTrajectory& traj) {
  const double T = traj.grid.t(traj.final_state().n);
  return extract_traces(traj, 0.75 * T, T);
}

void write_trace_log(std::ostream& os, const SCLTrajectory& traj, double A) {
  const Box& box = traj.coupling.box();
  const Grid1D& g = traj.grid;
  CsvWriter w(os, {"t", "gammaL", "gammaR", "HL_of_gammaL", "HR_of_gammaR", "germ_distance"});
  for (const auto& s : traj.states) {
    const double gl = s.p[-1 - g.j_min];
    const double gr = s.p[-g.j_min];
    w.row({g.t(s.n), gl, gr, box.left()(gl), box.right()(gr), germ_distance(A, {gl, gr}, box)});
  }
}

}  // namespace jf
