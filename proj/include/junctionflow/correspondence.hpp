#pragma once

#include <functional>
#include <iosfwd>
#include <vector>

#include "junctionflow/diagnostics.hpp"
#include "junctionflow/hj_scheme.hpp"
#include "junctionflow/riemann.hpp"
#include "junctionflow/scl_scheme.hpp"

namespace jf {

struct PairReport {
  // max over n, j of |p^n_{j+1/2} - (u^n_{j+1} - u^n_j)/dx|
  double max_identity_gap = 0.0;
  // the same divided by max(1, max |p|)
  double relative_identity_gap = 0.0;
  GermPoint traces;
  double germ_distance = 0.0;
  double limiter = 0.0;  // A_{F0} of the coupling used
  int steps = 0;
  double mass_residual = 0.0;
  CflReport cfl;
};

// HJ and SCL runs from consistent data: p^0 is the discrete slope of u^0 and
// both use the same frozen boundary slopes.
PairReport run_pair(const std::function<double(double)>& u0, const CouplingCondition& coupling,
                    const Grid1D& grid);

struct ConvergenceRow {
  int level = 0;
  double dx = 0.0;
  double dt = 0.0;
  double l1_error = 0.0;
  double observed_order = 0.0;  // NaN on the first row
};

struct ConvergenceTable {
  std::vector<ConvergenceRow> rows;
  double window_inner = 0.0;  // probe cells satisfy window_inner <= |x| <= window_outer
  double window_outer = 0.0;
  double limiter = 0.0;
};

struct RefinementSpec {
  double dx0 = 1.0 / 50.0;
  double dt_over_dx = 0.2;
  double half_width = 2.0;
  int levels = 4;
};

// L1 error at the final time against the Riemann oracle for the limiter
// A_{F0} of `coupling`, with dx_l = dx0 / 2^l. Levels run concurrently.
ConvergenceTable convergence_study(const CouplingCondition& coupling, double kL, double kR, double T,
                                   const RefinementSpec& spec);

// CSV `level,dx,dt,l1_error,observed_order`.
void write_convergence_csv(std::ostream& os, const ConvergenceTable& table);

struct LimiterRow {
  double dx = 0.0;
  double dist_to_AF0 = 0.0;
  double dist_to_control = 0.0;
  double rh_mismatch = 0.0;
  GermPoint traces;
};

struct LimiterReport {
  double A_F0 = 0.0;
  double A_control = 0.0;
  std::vector<LimiterRow> rows;
};

// A' = A_{F0}/2 when A_{F0} < 0, else H0/2.
double control_limiter(double A_F0, double H0);

// Runs the scheme with the desired coupling on one grid and compares the
// traces with the germs of A_{F0} and of the control limiter.
LimiterRow effective_limiter_run(const CouplingCondition& coupling, double kL, double kR,
                                 const Grid1D& grid, double A_F0, double A_control,
                                 double half_width);

LimiterReport effective_limiter_experiment(const CouplingCondition& coupling, double kL, double kR,
                                           double T, const RefinementSpec& spec);

// CSV `dx,dist_to_AF0,dist_to_control,rh_mismatch`.
void write_limiter_csv(std::ostream& os, const LimiterReport& report);

// Initial data of a Riemann problem: u0(x) = kL x (x < 0), kR x (x >= 0).
std::function<double(double)> riemann_potential(double kL, double kR);
std::function<double(double)> riemann_density(double kL, double kR);

}  // namespace jf
