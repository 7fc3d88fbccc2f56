#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "junctionflow/grid.hpp"

namespace jf {

struct HJProblem {
  CouplingCondition coupling;
  std::function<double(double)> u0;
  double half_width = 1.0;

  const Box& box() const { return coupling.box(); }
  // Sampled slopes of u0 outside the branch intervals (empty when admissible).
  std::vector<std::string> check_initial_data(const Grid1D& grid, double tol = 1e-8) const;
};

struct HJState {
  std::vector<double> u;  // u[j - j_min]
  // Rounding error carried by u: the node value is u[k] + u_lo[k]. The update
  // u - dt*F is accumulated with an error-free sum so that long runs do not
  // drift away from the exact recurrence.
  std::vector<double> u_lo;
  int n = 0;
  BoundarySlopes ghost;

  double value(int k) const { return u[k] + u_lo[k]; }
  // (u_{k+1} - u_k)/dx with both parts of the node values.
  double slope(int k, double dx) const { return ((u[k + 1] - u[k]) + (u_lo[k + 1] - u_lo[k])) / dx; }
};

struct HJTrajectory {
  Grid1D grid;
  int stride = 1;
  std::vector<HJState> states;          // every stride-th level plus the final one
  std::vector<double> junction_values;  // u^n_0 for every n
  const HJState& final_state() const { return states.back(); }
};

CflReport check_cfl_hj(const Grid1D& grid, const HJProblem& problem);

HJState hj_initial_state(const HJProblem& problem, const Grid1D& grid);
HJState hj_step(const HJState& state, const HJProblem& problem, const Grid1D& grid);
HJTrajectory hj_solve(const HJProblem& problem, const Grid1D& grid, int stride = 1);

// Piecewise interpolant: constant in time on [t_n, t_{n+1}), linear in x
// between nodes.
double sample_u(const HJTrajectory& traj, double t, double x);

// CSV `t,x,u`, t-major.
void write_hj_csv(std::ostream& os, const HJTrajectory& traj);

struct OracleResult {
  double value = 0.0;
  bool converged = true;
  double refinement_change = 0.0;
};

// Optimal-control value of the flux-limited problem at forward time T - t0
// (reversed-time convention: the value returned is u(T - t0, x0)).
OracleResult lax_oleinik_oracle(const Box& box, double A, const std::function<double(double)>& u0,
                                double t0, double x0, double T, double accuracy = 1e-3);

}  // namespace jf
