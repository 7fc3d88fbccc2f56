#include "junctionflow/riemann.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "junctionflow/errors.hpp"

namespace jf {

namespace {

constexpr double kTraceTol = 1e-12;

// Two-state entropy solution for a convex flux between `ul` (upstream) and
// `ur` (downstream).
Wave classify(const ConvexFlux& H, double ul, double ur) {
  Wave w;
  if (ul == ur) return w;
  if (ul < ur) {
    w.kind = Wave::Kind::rarefaction;
    w.s_lo = H.deriv(ul);
    w.s_hi = H.deriv(ur);
  } else {
    w.kind = Wave::Kind::shock;
    w.speed = (H(ul) - H(ur)) / (ul - ur);
  }
  return w;
}

double wave_value(const ConvexFlux& H, const Wave& w, double ul, double ur, double xi) {
  switch (w.kind) {
    case Wave::Kind::none:
      return ul;
    case Wave::Kind::shock:
      return xi < w.speed ? ul : ur;
    case Wave::Kind::rarefaction:
      if (xi <= w.s_lo) return ul;
      if (xi >= w.s_hi) return ur;
      return derivative_inverse(H, xi);
  }
  return ul;
}

}  // namespace

RiemannSolution riemann_solve(const Box& box, double A, double kL, double kR) {
  if (!box.contains(kL, kR)) throw DomainError("riemann_solve: data outside the box");
  if (!(A >= box.H0() - 1e-14 && A <= 1e-14)) throw DomainError("riemann_solve: limiter outside [H0, 0]");
  const ConvexFlux& HL = box.left();
  const ConvexFlux& HR = box.right();
  RiemannSolution sol;
  sol.kL = kL;
  sol.kR = kR;
  sol.A = A;
  sol.lambda_star = std::max({A, envelope(HL, kL, Side::plus), envelope(HR, kR, Side::minus)});
  const double lam = sol.lambda_star;
  sol.traces.kL = std::abs(HL(kL) - lam) <= kTraceTol ? kL : inverse_branch(HL, lam, Branch::decreasing);
  sol.traces.kR = std::abs(HR(kR) - lam) <= kTraceTol ? kR : inverse_branch(HR, lam, Branch::increasing);

  sol.left = classify(HL, kL, sol.traces.kL);
  sol.right = classify(HR, sol.traces.kR, kR);
  const double tol = 1e-12;
  const bool left_ok = sol.left.kind == Wave::Kind::none ||
                       (sol.left.kind == Wave::Kind::shock && sol.left.speed <= tol) ||
                       (sol.left.kind == Wave::Kind::rarefaction && sol.left.s_hi <= tol);
  const bool right_ok = sol.right.kind == Wave::Kind::none ||
                        (sol.right.kind == Wave::Kind::shock && sol.right.speed >= -tol) ||
                        (sol.right.kind == Wave::Kind::rarefaction && sol.right.s_lo >= -tol);
  if (!left_ok || !right_ok) {
    std::ostringstream os;
    os.precision(17);
    os << "riemann_solve: wave with the wrong direction for data (" << kL << ", " << kR << "), A=" << A;
    throw InvariantError(os.str());
  }
  return sol;
}

double riemann_evaluate(const RiemannSolution& sol, const Box& box, double t, double x) {
  if (!(t > 0.0)) throw DomainError("riemann_evaluate: need t > 0");
  const double xi = x / t;
  if (x < 0.0) return wave_value(box.left(), sol.left, sol.kL, sol.traces.kL, xi);
  return wave_value(box.right(), sol.right, sol.traces.kR, sol.kR, xi);
}

double riemann_oracle(const Box& box, double A, double kL, double kR, double t, double x) {
  return riemann_evaluate(riemann_solve(box, A, kL, kR), box, t, x);
}

}  // namespace jf
