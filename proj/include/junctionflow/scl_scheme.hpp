#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "junctionflow/grid.hpp"

namespace jf {

struct SCLProblem {
  CouplingCondition coupling;
  std::function<double(double)> rho0;
  double half_width = 1.0;

  const Box& box() const { return coupling.box(); }
  double M() const { return box().M(); }
};

struct SCLState {
  std::vector<double> p;  // p[j - j_min] is the value on the interface j + 1/2
  // Rounding error carried by p (same scheme as HJState::u_lo). May be left
  // empty in hand-built states, which means zero.
  std::vector<double> p_lo;
  int n = 0;
  BoundarySlopes ghost;
};

struct SCLTrajectory {
  Grid1D grid;
  CouplingCondition coupling;
  int stride = 1;
  std::vector<SCLState> states;  // every stride-th level plus the final one
  // Largest |change of sum p dx + accumulated boundary outflow| seen; zero up
  // to rounding because the junction node flux is shared by both cells.
  double mass_residual = 0.0;
  const SCLState& final_state() const { return states.back(); }
  double t(const SCLState& s) const { return grid.t(s.n); }
};

CflReport check_cfl_scl(const Grid1D& grid, const SCLProblem& problem);

// Cell averages of rho0 by 5-point Gauss-Legendre, ghosts included.
SCLState scl_initial_state(const SCLProblem& problem, const Grid1D& grid);

// Stability box check: throws InvariantError naming the first interface
// outside [a_L, c_L] (left) or [a_R, c_R] (right).
void check_stability_box(const SCLState& s, const Box& box, const Grid1D& grid, double tol = 1e-12);

SCLState scl_step(const SCLState& state, const SCLProblem& problem, const Grid1D& grid);

// Gates both CFL conditions, then marches from `init`.
SCLTrajectory scl_run(const SCLProblem& problem, const Grid1D& grid, SCLState init, int stride = 1);
SCLTrajectory scl_solve(const SCLProblem& problem, const Grid1D& grid, int stride = 1);

// CSV `t,x_mid,p`, t-major.
void write_scl_csv(std::ostream& os, const SCLTrajectory& traj);

}  // namespace jf
