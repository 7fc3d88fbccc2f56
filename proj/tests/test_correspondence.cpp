#include <doctest.h>

#include <cmath>
#include <sstream>

#include "junctionflow/correspondence.hpp"
#include "junctionflow/errors.hpp"

using namespace jf;

namespace {

const double kS = std::sqrt(0.5);

Box quad_box() { return Box(make_quadratic_flux(-1.0, 1.0, 1.0), make_quadratic_flux(-1.0, 1.0, 1.0)); }

Box mixed_box() { return Box(make_quadratic_flux(-1.0, 1.0, 1.0), make_exponential_flux(-1.0, 1.0, 1.5)); }

// Continuous piecewise-affine potential with value 0.1 at the origin and
// kinks at -0.8, -0.2, 0.3, 0.9.
double kinked(double x) {
  static const double bp[] = {-0.8, -0.2, 0.3, 0.9};
  static const double sl[] = {0.5, -0.9, 0.2, 0.8, -0.4};
  auto slope_integral = [](double y) {  // integral of the slope from 0 to y
    double acc = 0.0, lo = 0.0;
    if (y >= 0.0) {
      for (int i = 2; i < 5; ++i) {
        const double hi = i < 4 ? bp[i] : y;
        const double top = std::min(hi, y);
        if (top > lo) acc += sl[i] * (top - lo);
        lo = hi;
        if (hi >= y) break;
      }
      return acc;
    }
    double hi = 0.0;
    for (int i = 2; i >= 0; --i) {
      const double l = i > 0 ? bp[i - 1] : y;
      const double bot = std::max(l, y);
      if (bot < hi) acc -= sl[i] * (hi - bot);
      hi = l;
      if (l <= y) break;
    }
    return acc;
  };
  return 0.1 + slope_integral(x);
}

}  // namespace

TEST_CASE("paired runs keep the discrete identity") {
  const Box box = quad_box();
  SUBCASE("germ steady data") {
    const Grid1D g = Grid1D::make(0.02, 0.004, 2.0, 4.0);
    const PairReport r = run_pair(riemann_potential(-kS, kS), CouplingCondition::limited(box, -0.5), g);
    CHECK(r.steps == 1000);
    CHECK(r.max_identity_gap <= 1e-13);
  }
  SUBCASE("Riemann-integrated data") {
    const Grid1D g = Grid1D::make(0.02, 0.004, 2.0, 4.0);
    const PairReport r = run_pair(riemann_potential(-1.0, 1.0), CouplingCondition::limited(box, -0.5), g);
    CHECK(r.relative_identity_gap <= 1e-12);
    CHECK(r.limiter == -0.5);
  }
  SUBCASE("piecewise-affine data") {
    const Grid1D g = Grid1D::make(0.01, 0.002, 2.0, 2.0);
    const PairReport r = run_pair(kinked, CouplingCondition::limited(box, -0.3), g);
    CHECK(r.steps == 1000);
    CHECK(r.relative_identity_gap <= 1e-12);
  }
  SUBCASE("Godunov coupling on a mixed box") {
    const Box mb = mixed_box();
    const Grid1D g = Grid1D::make(0.02, 0.002, 2.0, 2.0);
    const PairReport r = run_pair(riemann_potential(-1.0, 0.6), godunov_coupling(mb), g);
    CHECK(r.steps == 1000);
    CHECK(r.relative_identity_gap <= 1e-12);
    CHECK(r.limiter == doctest::Approx(mb.H0()).epsilon(1e-8));
  }
  SUBCASE("CFL gate") {
    CHECK_THROWS_AS(run_pair(riemann_potential(-1.0, 1.0), CouplingCondition::limited(box, -0.5),
                             Grid1D::make(0.02, 0.02, 1.0, 0.5)),
                    CflError);
  }
}

TEST_CASE("convergence to the Riemann oracle") {
  const Box box = quad_box();
  const auto F = CouplingCondition::limited(box, -0.5);
  SUBCASE("rarefaction data, four levels") {
    const ConvergenceTable t = convergence_study(F, -1.0, 1.0, 0.5, RefinementSpec{});
    REQUIRE(t.rows.size() == 4);
    CHECK(std::isnan(t.rows[0].observed_order));
    for (std::size_t i = 1; i < t.rows.size(); ++i) CHECK(t.rows[i].l1_error < t.rows[i - 1].l1_error);
    CHECK(t.rows[3].observed_order >= 0.5);
    CHECK(t.rows[3].dx == doctest::Approx(0.0025));
  }
  SUBCASE("in-germ data") {
    const ConvergenceTable t = convergence_study(F, -kS, kS, 0.5, RefinementSpec{0.02, 0.2, 2.0, 3});
    for (const auto& r : t.rows) CHECK(r.l1_error <= 1e-12);
  }
  SUBCASE("single level") {
    const ConvergenceTable t = convergence_study(F, -1.0, 1.0, 0.5, RefinementSpec{0.02, 0.2, 2.0, 1});
    REQUIRE(t.rows.size() == 1);
    std::ostringstream os;
    write_convergence_csv(os, t);
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    CHECK(line == "level,dx,dt,l1_error,observed_order");
    std::getline(is, line);
    CHECK(line.back() == ',');
  }
}

TEST_CASE("control limiter") {
  CHECK(control_limiter(-0.5, -1.0) == -0.25);
  CHECK(control_limiter(0.0, -1.0) == -0.5);
}

TEST_CASE("effective limiter of the Godunov coupling") {
  const Box box = quad_box();
  const LimiterReport rep = effective_limiter_experiment(godunov_coupling(box), -1.0, 1.0, 0.5, RefinementSpec{});
  CHECK(rep.A_F0 == doctest::Approx(-1.0).epsilon(1e-8));
  CHECK(rep.A_control == doctest::Approx(-0.5).epsilon(1e-8));
  REQUIRE(rep.rows.size() == 4);
  const LimiterRow& fine = rep.rows.back();
  CHECK(fine.dx == doctest::Approx(1.0 / 400.0));
  CHECK(fine.dist_to_AF0 <= 0.05);
  CHECK(fine.dist_to_AF0 < fine.dist_to_control);
  CHECK(fine.dist_to_control >= 0.2);
}

TEST_CASE("effective limiter of a wrapped limited coupling") {
  const Box box = quad_box();
  const LimiterReport rep =
      effective_limiter_experiment(limited_as_general(box, -0.5), -1.0, 1.0, 0.5, RefinementSpec{0.02, 0.2, 2.0, 3});
  CHECK(rep.A_F0 == doctest::Approx(-0.5).epsilon(1e-10));
  const LimiterRow& fine = rep.rows.back();
  CHECK(std::abs(fine.traces.kL + kS) <= 0.05);
  CHECK(std::abs(fine.traces.kR - kS) <= 0.05);
}

TEST_CASE("effective limiter on in-germ data") {
  const Box box = quad_box();
  const LimiterReport rep =
      effective_limiter_experiment(CouplingCondition::limited(box, -0.5), -kS, kS, 0.5, RefinementSpec{0.02, 0.2, 2.0, 2});
  for (const auto& r : rep.rows) {
    CHECK(r.dist_to_AF0 <= 1e-12);
    CHECK(r.rh_mismatch <= 1e-12);
  }
}

TEST_CASE("Rankine-Hugoniot mismatch of the traces shrinks under refinement") {
  const Box mb = mixed_box();
  const LimiterReport rep = effective_limiter_experiment(godunov_coupling(mb), -1.0, 0.6, 0.5, RefinementSpec{0.02, 0.1, 2.0, 4});
  for (std::size_t i = 1; i < rep.rows.size(); ++i) CHECK(rep.rows[i].rh_mismatch < rep.rows[i - 1].rh_mismatch);
  std::ostringstream os;
  write_limiter_csv(os, rep);
  CHECK(os.str().rfind("dx,dist_to_AF0,dist_to_control,rh_mismatch\n", 0) == 0);
}
