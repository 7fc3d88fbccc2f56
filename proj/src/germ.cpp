#include "junctionflow/germ.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

#include "junctionflow/errors.hpp"

namespace jf {

namespace {

double sgn_tol(double x, double tol) {
  if (std::abs(x) <= tol) return 0.0;
  return x > 0.0 ? 1.0 : -1.0;
}

std::string fmt_interval(double lo, double hi) {
  std::ostringstream os;
  os.precision(17);
  os << "[" << lo << ", " << hi << "]";
  return os.str();
}

void require_level(double A, double lo, const char* who) {
  if (!(A >= lo - 1e-14 && A <= 1e-14)) {
    std::ostringstream os;
    os.precision(17);
    os << who << ": limiter A=" << A << " outside the admissible interval " << fmt_interval(lo, 0.0);
    throw DomainError(os.str());
  }
}

}  // namespace

CouplingCondition CouplingCondition::limited(Box box, double A) {
  require_level(A, box.H0(), "limited coupling");
  CouplingCondition c(std::move(box));
  c.limited_ = true;
  c.A_ = std::clamp(A, c.box_.H0(), 0.0);
  c.lip_ = {c.box_.left().lipschitz(), c.box_.right().lipschitz()};
  std::ostringstream os;
  os.precision(17);
  os << "limited(A=" << c.A_ << ")";
  c.name_ = os.str();
  return c;
}

CouplingCondition CouplingCondition::general(Box box, F0 f,
                                             std::pair<double, double> lipschitz_bounds,
                                             std::string name) {
  if (!f) throw DomainError("general coupling: missing F0");
  if (!(lipschitz_bounds.first >= 0.0 && lipschitz_bounds.second >= 0.0))
    throw DomainError("general coupling: Lipschitz bounds must be nonnegative");
  CouplingCondition c(std::move(box));
  c.f_ = std::move(f);
  c.lip_ = lipschitz_bounds;
  c.name_ = std::move(name);
  return c;
}

double CouplingCondition::operator()(double pL, double pR) const {
  if (!limited_) return f_(pL, pR);
  return std::max({A_, envelope(box_.left(), pL, Side::plus),
                   envelope(box_.right(), pR, Side::minus)});
}

double eval_coupling(const CouplingCondition& F, double pL, double pR) { return F(pL, pR); }

CouplingCondition godunov_coupling(const Box& box) {
  auto f = [box](double pL, double pR) {
    return std::max(envelope(box.left(), pL, Side::plus), envelope(box.right(), pR, Side::minus));
  };
  return CouplingCondition::general(box, f, {box.left().lipschitz(), box.right().lipschitz()},
                                    "godunov");
}

CouplingCondition limited_as_general(const Box& box, double A) {
  require_level(A, box.H0(), "limited coupling");
  auto f = [box, A](double pL, double pR) {
    return std::max({A, envelope(box.left(), pL, Side::plus),
                     envelope(box.right(), pR, Side::minus)});
  };
  std::ostringstream os;
  os.precision(17);
  os << "limited-wrapper(A=" << A << ")";
  return CouplingCondition::general(box, f, {box.left().lipschitz(), box.right().lipschitz()},
                                    os.str());
}

CouplingCondition linear_coupling(const Box& box, double beta) {
  if (!(beta > 0.0)) throw DomainError("linear coupling: beta must be positive");
  const double aL = box.left().a(), wL = box.left().c() - aL;
  const double aR = box.right().a(), wR = box.right().c() - aR;
  auto f = [=](double pL, double pR) { return beta * ((pL - aL) / wL - (pR - aR) / wR); };
  std::ostringstream os;
  os.precision(17);
  os << "linear(beta=" << beta << ")";
  return CouplingCondition::general(box, f, {beta / wL, beta / wR}, os.str());
}

ValidationReport validate_coupling(const CouplingCondition& F, int samples, std::uint64_t seed) {
  ValidationReport rep;
  const Box& box = F.box();
  const double aL = box.left().a(), cL = box.left().c();
  const double aR = box.right().a(), cR = box.right().c();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);

  rep.residual_low = std::abs(F(aL, aR));
  rep.residual_high = std::abs(F(cL, cR));
  if (rep.residual_low > 1e-12) {
    rep.pass = false;
    rep.messages.push_back("F0(a_L, a_R) != 0 (bounded-solution identity)");
  }
  if (rep.residual_high > 1e-12) {
    rep.pass = false;
    rep.messages.push_back("F0(c_L, c_R) != 0 (bounded-solution identity)");
  }

  for (int i = 0; i < samples; ++i) {
    const double pL = aL + (cL - aL) * U(rng);
    const double pR = aR + (cR - aR) * U(rng);
    // Mix of large and tiny increments so that both monotonicity and the
    // local slope are probed.
    const double scale = std::pow(10.0, -6.0 * U(rng));
    const double hL = (cL - pL) * scale * U(rng);
    const double hR = (cR - pR) * scale * U(rng);
    const double base = F(pL, pR);
    if (hL > 0.0) {
      const double up = F(pL + hL, pR);
      if (up < base - 1e-14 && !rep.witness) {
        rep.pass = false;
        rep.witness = std::array<double, 4>{pL, pR, pL + hL, pR};
        rep.messages.push_back("F0 decreases in its first argument");
      }
      rep.lipschitz_L = std::max(rep.lipschitz_L, std::abs(up - base) / hL);
    }
    if (hR > 0.0) {
      const double up = F(pL, pR + hR);
      if (up > base + 1e-14 && !rep.witness) {
        rep.pass = false;
        rep.witness = std::array<double, 4>{pL, pR, pL, pR + hR};
        rep.messages.push_back("F0 increases in its second argument");
      }
      rep.lipschitz_R = std::max(rep.lipschitz_R, std::abs(up - base) / hR);
    }
  }
  const auto [dL, dR] = F.lipschitz_bounds();
  if (rep.lipschitz_L > dL * (1 + 1e-6) + 1e-9 || rep.lipschitz_R > dR * (1 + 1e-6) + 1e-9) {
    rep.pass = false;
    rep.messages.push_back("sampled partial Lipschitz constants exceed the declared bounds");
  }
  return rep;
}

double flux_limiter(const CouplingCondition& F) {
  const Box& box = F.box();
  const double H0 = box.H0();
  const double bbarL = inverse_branch(box.left(), H0, Branch::decreasing);
  const double bbarR = inverse_branch(box.right(), H0, Branch::increasing);
  if (F(bbarL, bbarR) < H0) return H0;

  auto K = [&](double lam) {
    return F(inverse_branch(box.left(), lam, Branch::decreasing),
             inverse_branch(box.right(), lam, Branch::increasing)) -
           lam;
  };
  const double k_lo = K(H0);
  const double k_hi = K(0.0);
  if (k_lo == 0.0) return H0;
  if (k_hi == 0.0) return 0.0;
  if (k_lo < 0.0 || k_hi > 1e-12) {
    std::ostringstream os;
    os.precision(17);
    os << "flux_limiter: no sign change of K on [H0, 0] (K(H0)=" << k_lo << ", K(0)=" << k_hi
       << "); F0 violates the coupling assumptions";
    throw DomainError(os.str());
  }
  if (k_hi > 0.0) return 0.0;
  auto tol = [](double lo, double hi) { return hi - lo <= 1e-12; };
  std::uintmax_t iters = 200;
  auto r = boost::math::tools::bisect(K, H0, 0.0, tol, iters);
  return 0.5 * (r.first + r.second);
}

bool germ_contains(double A, GermPoint k, const Box& box) {
  if (!box.contains(k.kL, k.kR)) {
    std::ostringstream os;
    os.precision(17);
    os << "germ_contains: point (" << k.kL << ", " << k.kR << ") outside the box";
    throw DomainError(os.str());
  }
  const double hl = box.left()(k.kL);
  const double hr = box.right()(k.kR);
  if (std::abs(hl - hr) > kGermTol) return false;
  if (hr < A - kGermTol) return false;
  return std::abs(hr - A) <= kGermTol ||
         std::abs(hr - envelope(box.right(), k.kR, Side::minus)) <= kGermTol ||
         std::abs(hl - envelope(box.left(), k.kL, Side::plus)) <= kGermTol;
}

std::array<GermPoint, 3> generating_set(double A, const Box& box) {
  require_level(A, box.H0(), "generating_set");
  return {GermPoint{box.left().a(), box.right().a()}, GermPoint{box.left().c(), box.right().c()},
          germ_point_at_level(A, Branch::decreasing, Branch::increasing, box)};
}

GermPoint germ_point_at_level(double lambda, Branch left_side, Branch right_side,
                              const Box& box) {
  return {inverse_branch(box.left(), lambda, left_side),
          inverse_branch(box.right(), lambda, right_side)};
}

double dissipation_gap(GermPoint k, GermPoint khat, const Box& box) {
  constexpr double tie = 1e-13;
  const double qL = sgn_tol(k.kL - khat.kL, tie) * (box.left()(k.kL) - box.left()(khat.kL));
  const double qR = sgn_tol(k.kR - khat.kR, tie) * (box.right()(k.kR) - box.right()(khat.kR));
  return qL - qR;
}

bool germ_from_generators(double A, GermPoint k, const Box& box) {
  for (const auto& g : generating_set(A, box)) {
    const double v = entropy_flux(box.left(), k.kL, g.kL) - entropy_flux(box.right(), k.kR, g.kR);
    if (v < -kGermTol) return false;
  }
  return true;
}

GermPoint maximality_witness(double A, GermPoint k, const Box& box) {
  const double hl = box.left()(k.kL);
  const double hr = box.right()(k.kR);
  if (std::abs(hl - hr) > kGermTol)
    throw DomainError("maximality_witness: point violates Rankine-Hugoniot");
  if (germ_contains(A, k, box)) throw DomainError("maximality_witness: point is already in the germ");
  if (hr < A) return germ_point_at_level(A, Branch::decreasing, Branch::increasing, box);
  return germ_point_at_level(A, Branch::increasing, Branch::decreasing, box);
}

bool halfline_germ_contains(double A, double kR, const ConvexFlux& H_R) {
  require_level(A, H_R.min_value(), "halfline_germ_contains");
  const double h = H_R(kR);
  return std::abs(h - std::max(A, envelope(H_R, kR, Side::minus))) <= kGermTol;
}

double germ_distance(double A, GermPoint traces, const Box& box) {
  require_level(A, box.H0(), "germ_distance");
  A = std::clamp(A, box.H0(), 0.0);
  auto dist = [&](GermPoint g) { return std::hypot(g.kL - traces.kL, g.kR - traces.kR); };

  double best = dist(germ_point_at_level(A, Branch::decreasing, Branch::increasing, box));
  if (A >= 0.0) {
    for (auto sl : {Branch::decreasing, Branch::increasing})
      for (auto sr : {Branch::decreasing, Branch::increasing})
        best = std::min(best, dist(germ_point_at_level(0.0, sl, sr, box)));
    return best;
  }

  constexpr int N = 1000;
  const std::array<std::pair<Branch, Branch>, 3> combos{{{Branch::increasing, Branch::increasing},
                                                         {Branch::increasing, Branch::decreasing},
                                                         {Branch::decreasing, Branch::decreasing}}};
  for (const auto& [sl, sr] : combos) {
    auto d = [&](double lam) { return dist(germ_point_at_level(lam, sl, sr, box)); };
    int ibest = 0;
    double dbest = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= N; ++i) {
      const double lam = i == N ? 0.0 : A + (0.0 - A) * i / N;
      const double v = d(lam);
      if (v < dbest) {
        dbest = v;
        ibest = i;
      }
    }
    const double lo = A + (0.0 - A) * std::max(0, ibest - 1) / N;
    const double hi = ibest + 1 >= N ? 0.0 : A + (0.0 - A) * (ibest + 1) / N;
    std::uintmax_t iters = 100;
    auto r = boost::math::tools::brent_find_minima(d, lo, hi, 40, iters);
    best = std::min({best, dbest, r.second});
    // The distance has a kink at zero, where Brent only resolves the level to
    // about sqrt(eps); the levels of the trace components hit it exactly.
    for (double lam : {box.left()(traces.kL), box.right()(traces.kR)})
      if (lam >= A && lam <= 0.0) best = std::min(best, d(lam));
  }
  return best;
}

}  // namespace jf
