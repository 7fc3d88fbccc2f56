#pragma once

#include <iosfwd>
#include <utility>
#include <vector>

#include "junctionflow/scl_scheme.hpp"

namespace jf {

// Audits return max(0, violation): zero means the inequality holds.

struct EntropyAudit {
  GermPoint k;
  double worst_violation = 0.0;
  double R_L = 0.0;
  double R_R = 0.0;
  double junction_remainder = 0.0;  // R_L + R_R
  int worst_n = -1;
  int worst_j = 0;
  // (n, j) of every cell whose violation exceeds `flag_tol` (capped).
  std::vector<std::pair<int, int>> flagged;
};

// Cell entropy inequality for the Kruzhkov constants (k_L on j <= -1, k_R on
// j >= 0) at every stored pair of consecutive levels. Requires stride 1.
EntropyAudit entropy_residual(const SCLTrajectory& traj, GermPoint k, double flag_tol = 1e-12);

enum class BranchSide { left, right };

// How the left branch is mapped onto a one-sided sequence q_{j+1/2}, j >= 0.
// `negated` uses q = -p_{-j-1/2}, which solves the one-branch scheme with the
// convex flux p -> H_L(-p). `verbatim` uses q = p_{-j-1/2}.
enum class Reflection { negated, verbatim };

// Branch-local sequence q_{j+1/2}, j = 0 .. count-1.
std::vector<double> branch_sequence(const SCLState& s, const Grid1D& g, BranchSide side,
                                    Reflection refl = Reflection::negated);

// max over n and 2 <= j <= count-2 of
//   (max(0, w^{n+1}_j) - what^n_j)/dt + (delta/8) what^2.
double discrete_gradient_ode_check(const SCLTrajectory& traj, BranchSide side,
                                   Reflection refl = Reflection::negated);

// max over 0 <= n <= (J2-J1)/2 of (delta/8) sup_{J1+n <= j <= J2-n} w^n_j - 1/((n+1) dt).
double oleinik_check(const SCLTrajectory& traj, int J1, int J2, BranchSide side,
                     Reflection refl = Reflection::negated);

struct TvReport {
  double tv = 0.0;            // sum_{J1 <= j <= J2-1} |q_{j+1/2} - q_{j-1/2}|
  double tv_bound = 0.0;      // 2M + 2B (J2 - J1) dx
  double time_variation = 0.0;  // sum_{J1+1 <= j <= J2-1} |q^{n+1}_{j-1/2} - q^n_{j-1/2}|
  double time_bound = 0.0;      // 2 L (dt/dx) tv
  bool has_next = false;
  bool one_sided_ok = true;     // w <= B on [J1, J2-1]
  bool pass = true;
};

// Stored level `index` (and `index + 1` for the time bound, when present).
TvReport tv_check(const SCLTrajectory& traj, std::size_t index, int J1, int J2, double B,
                  BranchSide side, Reflection refl = Reflection::negated);

// Largest one-sided bound max w over the window at a stored level.
double max_discrete_gradient(const SCLState& s, const Grid1D& g, int J1, int J2, BranchSide side,
                             Reflection refl = Reflection::negated);

// Time averages of p_{-1/2} and p_{+1/2} over stored levels with t in [t0, t1].
GermPoint extract_traces(const SCLTrajectory& traj, double t0, double t1);
// Window = last quarter of the run.
GermPoint extract_traces(const SCLTrajectory& traj);

// CSV `t,gammaL,gammaR,HL_of_gammaL,HR_of_gammaR,germ_distance`.
void write_trace_log(std::ostream& os, const SCLTrajectory& traj, double A);

}  // namespace jf
