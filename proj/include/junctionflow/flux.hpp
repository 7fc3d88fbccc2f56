#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace jf {

enum class Side { plus, minus };
enum class Branch { decreasing, increasing };

// Absolute tolerance (in the argument) used by every branch inversion.
inline constexpr double kInverseTol = 1e-13;

// A C^2 strongly convex flux on [a, c] vanishing at both endpoints.
//
// Outside [a, c] the flux is continued by the quadratic
//   H(e) + H'(e)(p - e) + (delta/2)(p - e)^2,   e the nearer endpoint,
// which keeps strong convexity and superlinear growth. Schemes that respect
// the CFL gates never evaluate there; the Legendre transform does.
class ConvexFlux {
 public:
  using Fn = std::function<double(double)>;

  // `df` may be empty, in which case a central difference with step
  // 1e-7 (c - a) is used.
  ConvexFlux(std::string family, double a, double c, double b, double delta,
             double lipschitz, Fn f, Fn df = {});

  double operator()(double p) const { return eval(p); }
  double eval(double p) const;
  double deriv(double p) const;

  double a() const { return a_; }
  double b() const { return b_; }
  double c() const { return c_; }
  double delta() const { return delta_; }
  double lipschitz() const { return lipschitz_; }
  double min_value() const { return min_value_; }
  const std::string& family() const { return family_; }

  bool in_domain(double p, double tol = 0.0) const {
    return p >= a_ - tol && p <= c_ + tol;
  }

  // True when the continuation outside [a, c] coincides with one global
  // quadratic, so that the Legendre transform has a closed form.
  bool globally_quadratic() const { return quad_kappa_ > 0.0; }
  double quadratic_kappa() const { return quad_kappa_; }

  // Sampling check of the structural invariants. Returns human readable
  // descriptions of every failure (empty when the flux is admissible).
  std::vector<std::string> check_invariants(int samples = 2001) const;

 private:
  friend ConvexFlux make_quadratic_flux(double, double, double);

  double raw_deriv(double p) const;

  std::string family_;
  double a_, c_, b_, delta_, lipschitz_;
  Fn f_, df_;
  double min_value_;
  double quad_kappa_ = 0.0;
};

// H(p) = kappa (p - a)(p - c).
ConvexFlux make_quadratic_flux(double a, double c, double kappa);

// H(p) = exp(s p) minus the chord of exp(s .) between a and c.
ConvexFlux make_exponential_flux(double a, double c, double s);

// The pair of branch fluxes of a two-branch junction and the level
// H0 = max(min H_L, min H_R).
class Box {
 public:
  Box(ConvexFlux left, ConvexFlux right);

  const ConvexFlux& left() const { return left_; }
  const ConvexFlux& right() const { return right_; }
  double H0() const { return H0_; }
  // max(|a_L|, |c_L|, |a_R|, |c_R|)
  double M() const;
  bool contains(double kL, double kR, double tol = 1e-12) const {
    return left_.in_domain(kL, tol) && right_.in_domain(kR, tol);
  }

 private:
  ConvexFlux left_, right_;
  double H0_;
};

double envelope(const ConvexFlux& H, double p, Side side);

// g(p1, p2) = max(H+(p1), H-(p2)), equal to the min of H over [p1, p2] when
// p1 <= p2 and to its max over [p2, p1] otherwise.
double godunov_flux(const ConvexFlux& H, double p_minus, double p_plus);

struct GodunovGradient {
  double d1 = 0.0;
  double d2 = 0.0;
  // True when (p, q) lies on the kink set {H+(p) = H-(q) > min H}; the
  // components are then only one element of the subdifferential.
  bool on_kink = false;
};

GodunovGradient godunov_gradient(const ConvexFlux& H, double p, double q);

// sign(q - k) (H(q) - H(k)) with sign(0) = 0.
double entropy_flux(const ConvexFlux& H, double q, double k);

// The unique p on the requested monotone piece with H(p) = lambda.
// Throws DomainError when lambda lies outside [min H, 0].
double inverse_branch(const ConvexFlux& H, double lambda, Branch branch);

// (H')^{-1}(v) on the extended line.
double derivative_inverse(const ConvexFlux& H, double v);

// sup_p (-q p - H(p)) over the extended flux.
double legendre(const ConvexFlux& H, double velocity);

}  // namespace jf
