#include <doctest.h>

#include <cmath>
#include <random>

#include "junctionflow/errors.hpp"
#include "junctionflow/multibranch.hpp"

using namespace jf;

namespace {

// f(p) = p(1 - p) on [0, 1] everywhere; one incoming branch with weight 1 and
// two outgoing branches with weight 1/2.
MultiBranchJunction one_in_two_out() {
  const ConcaveFlux f = make_concave_quadratic(0.0, 1.0, 1.0);
  return MultiBranchJunction({{f, 1.0}}, {{f, 0.5}, {f, 0.5}});
}

MultiBranchJunction one_in_one_out(const ConcaveFlux& fi, const ConcaveFlux& fo) {
  return MultiBranchJunction({{fi, 1.0}}, {{fo, 1.0}});
}

}  // namespace

TEST_CASE("concave flux helpers") {
  const ConcaveFlux f = make_concave_quadratic(0.0, 1.0, 1.0);
  CHECK(f.argmax() == 0.5);
  CHECK(f.max_value() == 0.25);
  CHECK(f.env_plus(0.2) == doctest::Approx(0.16));
  CHECK(f.env_plus(0.8) == 0.25);
  CHECK(f.env_minus(0.2) == 0.25);
  CHECK(f.env_minus(0.8) == doctest::Approx(0.16));
  CHECK(f.q_plus(0.125) == doctest::Approx(0.5 - std::sqrt(0.125)).epsilon(1e-12));
  CHECK(f.q_minus(0.125) == doctest::Approx(0.5 + std::sqrt(0.125)).epsilon(1e-12));
  CHECK_THROWS_AS(f.q_plus(0.3), DomainError);
}

TEST_CASE("junction weights are validated") {
  const ConcaveFlux f = make_concave_quadratic(0.0, 1.0, 1.0);
  CHECK_THROWS_AS(MultiBranchJunction({{f, 1.0}}, {{f, 0.5}, {f, 0.4}}), DomainError);
  CHECK_THROWS_AS(MultiBranchJunction({}, {{f, 1.0}}), DomainError);
  CHECK(one_in_two_out().A0() == doctest::Approx(0.25));
}

TEST_CASE("multi-branch germ membership") {
  const auto J = one_in_two_out();
  const double hi = 0.5 + std::sqrt(0.125);  // outgoing slope with f = 1/8 on the decreasing side
  CHECK(multibranch_germ_contains(J, 0.25, {0.5, hi, hi}));
  CHECK(multibranch_germ_contains(J, 0.25, {0.0, 0.0, 0.0}));
  CHECK_FALSE(multibranch_germ_contains(J, 0.25, {0.5, 0.5, 0.5}));
  CHECK_FALSE(multibranch_germ_contains(J, 0.25, {0.5, 0.9, 0.9}));
  CHECK_THROWS_AS(multibranch_germ_contains(J, 0.25, {0.5, 0.5}), DomainError);
}

TEST_CASE("multi-branch dissipation gap") {
  const auto J = one_in_two_out();
  const std::vector<double> p{0.3, 0.6, 0.7};
  CHECK(multibranch_dissipation_gap(J, p, p) == 0.0);
}

TEST_CASE("counterexample on one incoming and two outgoing branches") {
  const auto J = one_in_two_out();
  const double A = 0.25, lambda = 0.125;
  SUBCASE("alpha0 = first outgoing") {
    const Counterexample ce = dissipation_counterexample(J, A, lambda, 1);
    CHECK(ce.alpha0 == 1);
    CHECK(ce.gap < -1e-3);
    CHECK(ce.gap == doctest::Approx(2.0 * (0.5 - 1.0) * (A - lambda)).epsilon(1e-10));
    CHECK(multibranch_germ_contains(J, A, ce.pPrime));
    CHECK(multibranch_germ_contains(J, A, ce.p));
  }
  SUBCASE("alpha0 = the incoming branch") {
    const Counterexample ce = dissipation_counterexample(J, A, lambda, 0);
    CHECK(ce.alpha0 != 0);
    CHECK(ce.gap < -1e-3);
  }
  SUBCASE("default level A/2 with other weights") {
    const ConcaveFlux f = make_concave_quadratic(0.0, 1.0, 1.0);
    const MultiBranchJunction K({{f, 0.3}, {f, 0.7}}, {{f, 1.0}});
    for (std::size_t a = 0; a < K.size(); ++a)
      CHECK(dissipation_counterexample(K, 0.5 * K.A0(), 0.25 * K.A0(), a).gap < 0.0);
  }
  SUBCASE("two branches are rejected") {
    const ConcaveFlux f = make_concave_quadratic(0.0, 1.0, 1.0);
    CHECK_THROWS_AS(dissipation_counterexample(one_in_one_out(f, f), 0.2, 0.1, 0), DomainError);
  }
  SUBCASE("level checks") {
    CHECK_THROWS_AS(dissipation_counterexample(J, 0.3, 0.1, 1), DomainError);
    CHECK_THROWS_AS(dissipation_counterexample(J, 0.25, 0.25, 1), DomainError);
  }
}

TEST_CASE("two-branch germ pairs are dissipative") {
  std::mt19937_64 rng(20240601);
  const ConcaveFlux fi = make_concave_quadratic(0.0, 1.0, 1.0);
  const ConcaveFlux fo = make_concave_quadratic(-0.5, 1.5, 0.5);
  const auto J = one_in_one_out(fi, fo);
  const double A = 0.6 * J.A0();
  // Two-branch germ: common value lambda <= A, with each branch on a side
  // allowed by the envelope conditions.
  auto sample = [&]() {
    std::uniform_real_distribution<double> L(0.0, A);
    std::uniform_int_distribution<int> C(0, 3);
    const int c = C(rng);
    if (c == 3) return std::vector<double>{fi.q_minus(A), fo.q_plus(A)};
    const double lam = L(rng);
    const double pi = c == 2 ? fi.q_minus(lam) : fi.q_plus(lam);
    const double po = c == 1 ? fo.q_plus(lam) : fo.q_minus(lam);
    return std::vector<double>{pi, po};
  };
  double worst = 0.0;
  int outside = 0;
  for (int i = 0; i < 10000; ++i) {
    const auto p1 = sample(), p2 = sample();
    if (!multibranch_germ_contains(J, A, p1) || !multibranch_germ_contains(J, A, p2)) ++outside;
    worst = std::min(worst, multibranch_dissipation_gap(J, p1, p2));
  }
  CHECK(outside == 0);
  CHECK(worst >= -1e-12);
}
