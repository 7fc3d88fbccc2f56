#pragma once

#include "junctionflow/flux.hpp"
#include "junctionflow/germ.hpp"

namespace jf {

struct Wave {
  enum class Kind { none, shock, rarefaction } kind = Kind::none;
  double speed = 0.0;    // shock speed
  double s_lo = 0.0;     // fan bounds for a rarefaction
  double s_hi = 0.0;
};

// Self-similar solution of the junction Riemann problem for the effective
// condition max(A, H_L+, H_R-): the common trace flux is
// lambda* = max(A, H_L+(kL), H_R-(kR)); the left trace sits on the
// decreasing piece of H_L (or equals kL), the right trace on the increasing
// piece of H_R (or equals kR), so every left wave moves left and every right
// wave moves right.
struct RiemannSolution {
  double kL = 0.0, kR = 0.0, A = 0.0;
  double lambda_star = 0.0;
  GermPoint traces;
  Wave left, right;
};

RiemannSolution riemann_solve(const Box& box, double A, double kL, double kR);

// Value at (t, x), t > 0. x < 0 reads the left branch; x >= 0 the right.
double riemann_evaluate(const RiemannSolution& sol, const Box& box, double t, double x);

double riemann_oracle(const Box& box, double A, double kL, double kR, double t, double x);

}  // namespace jf
