#include "junctionflow/flux.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>

#include <boost/math/tools/roots.hpp>

#include "junctionflow/errors.hpp"

namespace jf {

namespace {

// Bisection on a monotone function down to adjacent doubles. Returns the
// end of the final bracket whose residual is smaller.
template <class F>
double bisect_root(F&& f, double lo, double hi) {
  double flo = f(lo);
  double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  auto tol = boost::math::tools::eps_tolerance<double>(53);
  std::uintmax_t max_iter = 200;
  auto r = boost::math::tools::bisect(f, lo, hi, tol, max_iter);
  return std::abs(f(r.first)) <= std::abs(f(r.second)) ? r.first : r.second;
}

}  // namespace

ConvexFlux::ConvexFlux(std::string family, double a, double c, double b,
                       double delta, double lipschitz, Fn f, Fn df)
    : family_(std::move(family)),
      a_(a),
      c_(c),
      b_(b),
      delta_(delta),
      lipschitz_(lipschitz),
      f_(std::move(f)),
      df_(std::move(df)) {
  if (!(a_ < c_)) throw DomainError("flux: need a < c");
  if (!(a_ < b_ && b_ < c_)) throw DomainError("flux: minimiser b must lie strictly inside (a, c)");
  if (!(delta_ > 0.0)) throw DomainError("flux: convexity bound delta must be positive");
  if (!(lipschitz_ > 0.0)) throw DomainError("flux: Lipschitz constant must be positive");
  if (!f_) throw DomainError("flux: missing evaluation function");
  min_value_ = f_(b_);
}

double ConvexFlux::raw_deriv(double p) const {
  if (df_) return df_(p);
  const double h = 1e-7 * (c_ - a_);
  return (f_(p + h) - f_(p - h)) / (2.0 * h);
}

double ConvexFlux::eval(double p) const {
  if (globally_quadratic() || (p >= a_ && p <= c_)) return f_(p);
  const double e = p < a_ ? a_ : c_;
  const double d = p - e;
  return f_(e) + raw_deriv(e) * d + 0.5 * delta_ * d * d;
}

double ConvexFlux::deriv(double p) const {
  if (globally_quadratic() || (p >= a_ && p <= c_)) return raw_deriv(p);
  const double e = p < a_ ? a_ : c_;
  return raw_deriv(e) + delta_ * (p - e);
}

std::vector<std::string> ConvexFlux::check_invariants(int samples) const {
  std::vector<std::string> issues;
  auto report = [&](const std::string& what, double p) {
    std::ostringstream os;
    os.precision(17);
    os << what << " at p=" << p;
    issues.push_back(os.str());
  };
  const double scale = std::max(1.0, std::abs(min_value_));
  if (std::abs(f_(a_)) > 1e-12 * scale) report("H(a) != 0", a_);
  if (std::abs(f_(c_)) > 1e-12 * scale) report("H(c) != 0", c_);
  if (!(min_value_ < 0.0)) report("H(b) must be negative", b_);

  const double w = c_ - a_;
  const double h = 1e-4 * w;
  double prev = f_(a_);
  double prev_p = a_;
  for (int i = 1; i < samples; ++i) {
    const double p = a_ + w * i / (samples - 1);
    const double v = f_(p);
    if (p <= b_ && v > prev + 1e-14 * scale) report("H not nonincreasing on [a,b]", p);
    if (prev_p >= b_ && v < prev - 1e-14 * scale) report("H not nondecreasing on [b,c]", p);
    if (std::abs(v - prev) > lipschitz_ * (p - prev_p) * (1 + 1e-9) + 1e-14)
      report("Lipschitz bound exceeded", p);
    if (p - h >= a_ && p + h <= c_) {
      const double d2 = (f_(p + h) - 2.0 * v + f_(p - h)) / (h * h);
      if (d2 < delta_ * (1 - 1e-6)) report("second difference below delta", p);
    }
    prev = v;
    prev_p = p;
  }
  return issues;
}

ConvexFlux make_quadratic_flux(double a, double c, double kappa) {
  if (!(a < c)) throw DomainError("quadratic flux: need a < c");
  if (!(kappa > 0.0)) throw DomainError("quadratic flux: need kappa > 0");
  ConvexFlux H(
      "quadratic", a, c, 0.5 * (a + c), 2.0 * kappa, kappa * (c - a),
      [a, c, kappa](double p) { return kappa * (p - a) * (p - c); },
      [a, c, kappa](double p) { return kappa * (2.0 * p - a - c); });
  H.quad_kappa_ = kappa;
  return H;
}

ConvexFlux make_exponential_flux(double a, double c, double s) {
  if (!(a < c)) throw DomainError("exponential flux: need a < c");
  if (s == 0.0 || !std::isfinite(s)) throw DomainError("exponential flux: need s != 0");
  const double ea = std::exp(s * a);
  const double ec = std::exp(s * c);
  const double m = (ec - ea) / (c - a);
  auto f = [=](double p) { return std::exp(s * p) - (ea + m * (p - a)); };
  auto df = [=](double p) { return s * std::exp(s * p) - m; };
  const double b = std::log(m / s) / s;
  const double delta = s * s * std::min(ea, ec);
  const double lip = std::max(std::abs(df(a)), std::abs(df(c)));
  return ConvexFlux("exponential", a, c, b, delta, lip, f, df);
}

Box::Box(ConvexFlux left, ConvexFlux right)
    : left_(std::move(left)), right_(std::move(right)) {
  H0_ = std::max(left_.min_value(), right_.min_value());
  if (!(H0_ < 0.0)) throw DomainError("box: H0 must be negative");
}

double Box::M() const {
  return std::max({std::abs(left_.a()), std::abs(left_.c()), std::abs(right_.a()),
                   std::abs(right_.c())});
}

double envelope(const ConvexFlux& H, double p, Side side) {
  if (side == Side::plus) return p <= H.b() ? H.min_value() : H(p);
  return p <= H.b() ? H(p) : H.min_value();
}

double godunov_flux(const ConvexFlux& H, double p_minus, double p_plus) {
  return std::max(envelope(H, p_minus, Side::plus), envelope(H, p_plus, Side::minus));
}

GodunovGradient godunov_gradient(const ConvexFlux& H, double p, double q) {
  GodunovGradient g;
  const double hp = H(p);
  const double hq = H(q);
  const double dp = H.deriv(p);
  const double dq = H.deriv(q);
  const double plus_p = envelope(H, p, Side::plus);
  const double minus_q = envelope(H, q, Side::minus);
  if (envelope(H, q, Side::minus) < hp && dp > 0.0) g.d1 = dp;
  if (hq > plus_p && dq < 0.0) g.d2 = dq;
  g.on_kink = std::abs(plus_p - minus_q) <= 1e-12 && plus_p > H.min_value() + 1e-12;
  return g;
}

double entropy_flux(const ConvexFlux& H, double q, double k) {
  if (q == k) return 0.0;
  const double diff = H(q) - H(k);
  return q > k ? diff : -diff;
}

double inverse_branch(const ConvexFlux& H, double lambda, Branch branch) {
  const double lo_level = H.min_value();
  const double slack = 1e-14 * std::max(1.0, std::abs(lo_level));
  if (!(lambda >= lo_level - slack && lambda <= slack)) {
    std::ostringstream os;
    os.precision(17);
    os << "inverse_branch: level " << lambda << " outside [" << lo_level << ", 0]";
    throw DomainError(os.str());
  }
  if (lambda <= lo_level) return H.b();
  if (lambda >= 0.0) return branch == Branch::decreasing ? H.a() : H.c();
  auto f = [&](double p) { return H(p) - lambda; };
  if (branch == Branch::decreasing) return bisect_root(f, H.a(), H.b());
  return bisect_root(f, H.b(), H.c());
}

double derivative_inverse(const ConvexFlux& H, double v) {
  const double reach = std::abs(v) / H.delta() + 1e-9 * (H.c() - H.a()) + 1e-12;
  auto f = [&](double p) { return H.deriv(p) - v; };
  return bisect_root(f, H.b() - reach, H.b() + reach);
}

double legendre(const ConvexFlux& H, double velocity) {
  if (H.globally_quadratic()) {
    const double k = H.quadratic_kappa();
    const double t = k * (H.a() + H.c()) - velocity;
    return t * t / (4.0 * k) - k * H.a() * H.c();
  }
  // The maximiser of -q p - H(p) is the stationary point H'(p) = -q.
  const double p = derivative_inverse(H, -velocity);
  return -velocity * p - H(p);
}

}  // namespace jf
