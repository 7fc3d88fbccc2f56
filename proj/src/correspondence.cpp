#include "junctionflow/correspondence.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <ostream>

#include <boost/math/quadrature/gauss.hpp>

#include "junctionflow/csv.hpp"
#include "junctionflow/errors.hpp"

namespace jf {

std::function<double(double)> riemann_potential(double kL, double kR) {
  return [kL, kR](double x) { return x < 0.0 ? kL * x : kR * x; };
}

std::function<double(double)> riemann_density(double kL, double kR) {
  return [kL, kR](double x) { return x < 0.0 ? kL : kR; };
}

PairReport run_pair(const std::function<double(double)>& u0, const CouplingCondition& coupling,
                    const Grid1D& grid) {
  const double W = grid.j_max * grid.dx;
  HJProblem hp{coupling, u0, W};
  SCLProblem sp{coupling, {}, W};
  PairReport rep;
  rep.cfl = check_cfl_scl(grid, sp);
  if (!rep.cfl.pass) throw CflError("run_pair: " + rep.cfl.message);

  const HJTrajectory hj = hj_solve(hp, grid, 1);
  const HJState& u_init = hj.states.front();
  SCLState p_init;
  p_init.ghost = u_init.ghost;
  p_init.p.resize(grid.interface_count());
  for (int k = 0; k < grid.interface_count(); ++k)
    p_init.p[k] = u_init.slope(k, grid.dx);
  const SCLTrajectory scl = scl_run(sp, grid, p_init, 1);

  double pmax = 0.0;
  for (std::size_t i = 0; i < hj.states.size(); ++i) {
    const HJState& u = hj.states[i];
    const auto& p = scl.states[i].p;
    for (std::size_t k = 0; k < p.size(); ++k) {
      const double slope = u.slope(static_cast<int>(k), grid.dx);
      rep.max_identity_gap = std::max(rep.max_identity_gap, std::abs(p[k] - slope));
      pmax = std::max(pmax, std::abs(p[k]));
    }
  }
  rep.relative_identity_gap = rep.max_identity_gap / std::max(1.0, pmax);
  rep.limiter = flux_limiter(coupling);
  rep.traces = extract_traces(scl);
  rep.germ_distance = germ_distance(rep.limiter, rep.traces, coupling.box());
  rep.steps = grid.n_steps;
  rep.mass_residual = scl.mass_residual;
  return rep;
}

namespace {

double level_error(const CouplingCondition& coupling, const RiemannSolution& sol, const Grid1D& grid,
                   double half_width, double inner, double outer) {
  SCLProblem sp{coupling, riemann_density(sol.kL, sol.kR), half_width};
  const SCLTrajectory traj = scl_solve(sp, grid, grid.n_steps > 0 ? grid.n_steps : 1);
  const SCLState& s = traj.final_state();
  const double t = grid.t(s.n);
  const Box& box = coupling.box();
  double err = 0.0;
  for (int k = 0; k < grid.interface_count(); ++k) {
    const int j = grid.j_min + k;
    const double x0 = grid.x(j), x1 = grid.x(j + 1);
    const double lo = std::min(std::abs(x0), std::abs(x1));
    const double hi = std::max(std::abs(x0), std::abs(x1));
    if (x0 < 0.0 && x1 > 0.0) continue;
    if (lo < inner - 1e-12 || hi > outer + 1e-12) continue;
    double exact;
    if (t > 0.0) {
      auto f = [&](double x) { return riemann_evaluate(sol, box, t, x); };
      exact = boost::math::quadrature::gauss<double, 5>::integrate(f, x0, x1) / grid.dx;
    } else {
      exact = x1 <= 0.0 ? sol.kL : sol.kR;
    }
    err += std::abs(s.p[k] - exact) * grid.dx;
  }
  return err;
}

}  // namespace

ConvergenceTable convergence_study(const CouplingCondition& coupling, double kL, double kR, double T,
                                   const RefinementSpec& spec) {
  if (spec.levels < 1) throw DomainError("convergence_study: need at least one level");
  ConvergenceTable table;
  table.limiter = flux_limiter(coupling);
  const RiemannSolution sol = riemann_solve(coupling.box(), table.limiter, kL, kR);
  const double LH = coupling_lipschitz(coupling);
  table.window_inner = 2.0 * spec.dx0;
  table.window_outer = std::floor((spec.half_width - LH * T) / spec.dx0 + 1e-9) * spec.dx0;
  if (!(table.window_outer > table.window_inner))
    throw DomainError("convergence_study: domain too small for the boundary cones at this final time");

  // Gate every level before starting any of them.
  std::vector<Grid1D> grids;
  for (int l = 0; l < spec.levels; ++l) {
    const double dx = spec.dx0 / std::ldexp(1.0, l);
    Grid1D g = Grid1D::make(dx, spec.dt_over_dx * dx, spec.half_width, T);
    SCLProblem sp{coupling, riemann_density(kL, kR), spec.half_width};
    const CflReport r = check_cfl_scl(g, sp);
    if (!r.pass) throw CflError("convergence_study: level " + std::to_string(l) + ": " + r.message);
    grids.push_back(g);
  }
  std::vector<std::future<double>> futs;
  for (const auto& g : grids)
    futs.push_back(std::async(std::launch::async, [&, g] {
      return level_error(coupling, sol, g, spec.half_width, table.window_inner, table.window_outer);
    }));
  for (int l = 0; l < spec.levels; ++l) {
    ConvergenceRow row;
    row.level = l;
    row.dx = grids[l].dx;
    row.dt = grids[l].dt;
    row.l1_error = futs[l].get();
    row.observed_order = std::numeric_limits<double>::quiet_NaN();
    if (l > 0) row.observed_order = std::log2(table.rows.back().l1_error / row.l1_error);
    table.rows.push_back(row);
  }
  return table;
}

void write_convergence_csv(std::ostream& os, const ConvergenceTable& table) {
  CsvWriter w(os, {"level", "dx", "dt", "l1_error", "observed_order"});
  for (const auto& r : table.rows)
    w.row({r.level, r.dx, r.dt, r.l1_error,
           std::isnan(r.observed_order) ? CsvCell::empty() : CsvCell(r.observed_order)});
}

double control_limiter(double A_F0, double H0) { return A_F0 < 0.0 ? 0.5 * A_F0 : 0.5 * H0; }

LimiterRow effective_limiter_run(const CouplingCondition& coupling, double kL, double kR,
                                 const Grid1D& grid, double A_F0, double A_control,
                                 double half_width) {
  SCLProblem sp{coupling, riemann_density(kL, kR), half_width};
  const SCLTrajectory traj = scl_solve(sp, grid, 1);
  LimiterRow row;
  row.dx = grid.dx;
  row.traces = extract_traces(traj);
  const Box& box = coupling.box();
  row.dist_to_AF0 = germ_distance(A_F0, row.traces, box);
  row.dist_to_control = germ_distance(A_control, row.traces, box);
  row.rh_mismatch = std::abs(box.left()(row.traces.kL) - box.right()(row.traces.kR));
  return row;
}

LimiterReport effective_limiter_experiment(const CouplingCondition& coupling, double kL, double kR,
                                           double T, const RefinementSpec& spec) {
  const auto rep_valid = validate_coupling(coupling, 2000);
  if (!rep_valid.pass)
    throw DomainError("effective_limiter_experiment: coupling fails validation: " +
                      (rep_valid.messages.empty() ? std::string("?") : rep_valid.messages.front()));
  LimiterReport rep;
  rep.A_F0 = flux_limiter(coupling);
  rep.A_control = control_limiter(rep.A_F0, coupling.box().H0());
  std::vector<Grid1D> grids;
  for (int l = 0; l < spec.levels; ++l) {
    const double dx = spec.dx0 / std::ldexp(1.0, l);
    Grid1D g = Grid1D::make(dx, spec.dt_over_dx * dx, spec.half_width, T);
    SCLProblem sp{coupling, riemann_density(kL, kR), spec.half_width};
    const CflReport r = check_cfl_scl(g, sp);
    if (!r.pass) throw CflError("effective_limiter_experiment: " + r.message);
    grids.push_back(g);
  }
  std::vector<std::future<LimiterRow>> futs;
  for (const auto& g : grids)
    futs.push_back(std::async(std::launch::async, [&, g] {
      return effective_limiter_run(coupling, kL, kR, g, rep.A_F0, rep.A_control, spec.half_width);
    }));
  for (auto& f : futs) rep.rows.push_back(f.get());
  return rep;
}

void write_limiter_csv(std::ostream& os, const LimiterReport& report) {
  CsvWriter w(os, {"dx", "dist_to_AF0", "dist_to_control", "rh_mismatch"});
  for (const auto& r : report.rows) w.row({r.dx, r.dist_to_AF0, r.dist_to_control, r.rh_mismatch});
}

}  // namespace jf
