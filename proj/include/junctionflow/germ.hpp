#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "junctionflow/flux.hpp"

namespace jf {

// Single tolerance, in flux values, shared by every membership predicate.
inline constexpr double kGermTol = 1e-10;

// The flux rule applied at the junction node.
//
// Limited(A) realises max(A, H_L+(pL), H_R-(pR)); General wraps an arbitrary
// monotone Lipschitz F0 together with user-declared partial Lipschitz
// bounds, which the CFL gate needs because a closure cannot expose them.
class CouplingCondition {
 public:
  using F0 = std::function<double(double, double)>;

  static CouplingCondition limited(Box box, double A);
  static CouplingCondition general(Box box, F0 f, std::pair<double, double> lipschitz_bounds,
                                   std::string name);

  bool is_limited() const { return limited_; }
  // Only meaningful for Limited couplings.
  double A() const { return A_; }
  const Box& box() const { return box_; }
  const std::string& name() const { return name_; }
  std::pair<double, double> lipschitz_bounds() const { return lip_; }

  double operator()(double pL, double pR) const;

 private:
  CouplingCondition(Box box) : box_(std::move(box)) {}
  Box box_;
  bool limited_ = false;
  double A_ = 0.0;
  F0 f_;
  std::pair<double, double> lip_{0.0, 0.0};
  std::string name_;
};

double eval_coupling(const CouplingCondition& F, double pL, double pR);

// F0 = max(H_L+(pL), H_R-(pR)). Its limiter is H0.
CouplingCondition godunov_coupling(const Box& box);
// max(A, H_L+, H_R-) presented as a General coupling.
CouplingCondition limited_as_general(const Box& box, double A);
// F0 = beta [(pL - a_L)/(c_L - a_L) - (pR - a_R)/(c_R - a_R)].
CouplingCondition linear_coupling(const Box& box, double beta);

struct ValidationReport {
  bool pass = true;
  // First monotonicity violation found: (pL, pR) and (pL', pR') with the
  // ordering that F0 should respect but does not.
  std::optional<std::array<double, 4>> witness;
  double residual_low = 0.0;   // |F0(a_L, a_R)|
  double residual_high = 0.0;  // |F0(c_L, c_R)|
  double lipschitz_L = 0.0;    // sampled estimate of the partial Lipschitz constants
  double lipschitz_R = 0.0;
  std::vector<std::string> messages;
};

ValidationReport validate_coupling(const CouplingCondition& F, int samples,
                                   std::uint64_t seed = 20240601);

// The flux limiter A_{F0} of a coupling (works for both variants).
double flux_limiter(const CouplingCondition& F);

struct GermPoint {
  double kL = 0.0;
  double kR = 0.0;
};

bool germ_contains(double A, GermPoint k, const Box& box);

// (a_L, a_R), (c_L, c_R) and (pbar_L^A, pbar_R^A).
std::array<GermPoint, 3> generating_set(double A, const Box& box);

// sgn(kL - khatL)(H_L(kL) - H_L(khatL)) - sgn(kR - khatR)(H_R(kR) - H_R(khatR)),
// with differences below 1e-13 treated as ties.
double dissipation_gap(GermPoint k, GermPoint khat, const Box& box);

bool germ_from_generators(double A, GermPoint k, const Box& box);

// A germ point that pairs with k (which satisfies Rankine-Hugoniot but is not
// in the germ) with a strictly negative dissipation gap.
GermPoint maximality_witness(double A, GermPoint k, const Box& box);

bool halfline_germ_contains(double A, double kR, const ConvexFlux& H_R);

// Euclidean distance from a trace pair to the germ of level A.
double germ_distance(double A, GermPoint traces, const Box& box);

// Point of the germ at flux level lambda on the requested monotone pieces.
GermPoint germ_point_at_level(double lambda, Branch left_side, Branch right_side, const Box& box);

}  // namespace jf
