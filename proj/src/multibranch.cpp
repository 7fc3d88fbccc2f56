#include "junctionflow/multibranch.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>

#include <boost/math/tools/roots.hpp>

#include "junctionflow/errors.hpp"
#include "junctionflow/germ.hpp"

namespace jf {

namespace {

template <class F>
double root_between(F&& f, double lo, double hi) {
  const double flo = f(lo), fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  auto tol = boost::math::tools::eps_tolerance<double>(53);
  std::uintmax_t it = 200;
  auto r = boost::math::tools::bisect(f, lo, hi, tol, it);
  return std::abs(f(r.first)) <= std::abs(f(r.second)) ? r.first : r.second;
}

double sgn(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

}  // namespace

ConcaveFlux::ConcaveFlux(double a, double c, double m, Fn f) : a_(a), c_(c), m_(m), f_(std::move(f)) {
  if (!(a_ < m_ && m_ < c_)) throw DomainError("concave flux: need a < argmax < c");
  if (!f_) throw DomainError("concave flux: missing evaluation function");
  max_ = f_(m_);
  if (!(max_ > 0.0)) throw DomainError("concave flux: maximum must be positive");
  if (std::abs(f_(a_)) > 1e-12 || std::abs(f_(c_)) > 1e-12)
    throw DomainError("concave flux: must vanish at both endpoints");
}

double ConcaveFlux::q_plus(double lambda) const {
  if (!(lambda >= -1e-14 && lambda <= max_ + 1e-14))
    throw DomainError("concave flux: level outside [0, max f]");
  if (lambda <= 0.0) return a_;
  if (lambda >= max_) return m_;
  return root_between([&](double q) { return f_(q) - lambda; }, a_, m_);
}

double ConcaveFlux::q_minus(double lambda) const {
  if (!(lambda >= -1e-14 && lambda <= max_ + 1e-14))
    throw DomainError("concave flux: level outside [0, max f]");
  if (lambda <= 0.0) return c_;
  if (lambda >= max_) return m_;
  return root_between([&](double q) { return f_(q) - lambda; }, m_, c_);
}

ConcaveFlux make_concave_quadratic(double a, double c, double kappa) {
  if (!(a < c) || !(kappa > 0.0)) throw DomainError("concave quadratic: need a < c and kappa > 0");
  return ConcaveFlux(a, c, 0.5 * (a + c), [=](double p) { return kappa * (p - a) * (c - p); });
}

MultiBranchJunction::MultiBranchJunction(std::vector<WeightedBranch> incoming,
                                         std::vector<WeightedBranch> outgoing)
    : in_(std::move(incoming)), out_(std::move(outgoing)) {
  if (in_.empty() || out_.empty())
    throw DomainError("junction: need at least one incoming and one outgoing branch");
  auto check = [](const std::vector<WeightedBranch>& side, const char* name) {
    double s = 0.0;
    for (const auto& b : side) {
      if (!(b.theta > 0.0 && b.theta <= 1.0))
        throw DomainError(std::string("junction: weight outside (0, 1] on ") + name + " side");
      s += b.theta;
    }
    if (std::abs(s - 1.0) > 1e-12)
      throw DomainError(std::string("junction: weights of the ") + name + " side must sum to 1");
  };
  check(in_, "incoming");
  check(out_, "outgoing");
  A0_ = std::numeric_limits<double>::infinity();
  for (const auto& b : in_) A0_ = std::min(A0_, b.flux.max_value());
  for (const auto& b : out_) A0_ = std::min(A0_, b.flux.max_value());
}

bool multibranch_germ_contains(const MultiBranchJunction& J, double A, const std::vector<double>& p) {
  if (p.size() != J.size()) throw DomainError("multibranch germ: wrong number of slopes");
  if (!(A > 0.0 && A <= J.A0() + 1e-14)) throw DomainError("multibranch germ: need A in (0, A0]");
  double lambda = A;
  for (std::size_t k = 0; k < J.size(); ++k) {
    const auto& br = J.branch(k);
    if (p[k] < br.flux.a() - 1e-12 || p[k] > br.flux.c() + 1e-12)
      throw DomainError("multibranch germ: slope outside its branch interval");
    const double env = J.is_incoming(k) ? br.flux.env_plus(p[k]) : br.flux.env_minus(p[k]);
    lambda = std::min(lambda, env / br.theta);
  }
  for (std::size_t k = 0; k < J.size(); ++k) {
    const auto& br = J.branch(k);
    if (std::abs(br.flux(p[k]) / br.theta - lambda) > kGermTol) return false;
  }
  return true;
}

double multibranch_dissipation_gap(const MultiBranchJunction& J, const std::vector<double>& pPrime,
                                   const std::vector<double>& p) {
  if (pPrime.size() != J.size() || p.size() != J.size())
    throw DomainError("multibranch gap: wrong number of slopes");
  double in = 0.0, out = 0.0;
  for (std::size_t k = 0; k < J.size(); ++k) {
    const auto& f = J.branch(k).flux;
    const double term = sgn(pPrime[k] - p[k]) * (f(pPrime[k]) - f(p[k]));
    (J.is_incoming(k) ? in : out) += term;
  }
  return in - out;
}

Counterexample dissipation_counterexample(const MultiBranchJunction& J, double A, double lambda,
                                          std::size_t alpha0) {
  if (J.size() < 3)
    throw DomainError("dissipation_counterexample: two-branch germs are dissipative; need >= 3 branches");
  if (!(A > 0.0 && A <= J.A0() + 1e-14))
    throw DomainError("dissipation_counterexample: need A in (0, A0]");
  if (!(lambda > 0.0 && lambda < A))
    throw DomainError("dissipation_counterexample: need lambda in (0, A)");
  if (alpha0 >= J.size()) throw DomainError("dissipation_counterexample: alpha0 out of range");

  // The gap equals 2 (theta_alpha0 - 1)(A - lambda): a weight-one branch gives
  // nothing, so move to the other side, which then has at least two branches.
  if (J.branch(alpha0).theta >= 1.0 - 1e-12)
    alpha0 = J.is_incoming(alpha0) ? J.incoming().size() : 0;

  Counterexample ce;
  ce.alpha0 = alpha0;
  ce.pPrime.resize(J.size());
  ce.p.resize(J.size());
  for (std::size_t k = 0; k < J.size(); ++k) {
    const auto& br = J.branch(k);
    const bool in = J.is_incoming(k);
    ce.pPrime[k] = in ? br.flux.q_plus(br.theta * A) : br.flux.q_minus(br.theta * A);
    const double lv = br.theta * lambda;
    if (k == alpha0) {
      ce.p[k] = in ? br.flux.q_plus(lv) : br.flux.q_minus(lv);
    } else {
      // Opposite monotone side to p'_k, so that sgn(p'_k - p_k) flips.
      ce.p[k] = in ? br.flux.q_minus(lv) : br.flux.q_plus(lv);
    }
  }
  if (!multibranch_germ_contains(J, A, ce.pPrime) || !multibranch_germ_contains(J, A, ce.p))
    throw InvariantError("dissipation_counterexample: constructed states left the germ");
  ce.gap = multibranch_dissipation_gap(J, ce.pPrime, ce.p);
  return ce;
}

}  // namespace jf
