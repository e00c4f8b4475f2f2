#include <doctest.h>

#include <cmath>

#include "oracles/oracles.hpp"
#include "trunclap/errors.hpp"
#include "trunclap/radial.hpp"

using namespace trunclap;

namespace {

const ScalarFn minus_one = [](double) { return -1.0; };

DriftCoefficient affine(double c0, double c1, double R, int k = 1) {
  return DriftCoefficient::make_callable([c0, c1](double r) { return c0 + c1 * r; }, [c1](double) { return c1; }, R, k);
}

}  // namespace

TEST_CASE("constant drift closed form") {
  const auto p = profile_const_b(0.5, 1.0, 1);
  CHECK(p.value(1.0) == 0.0);
  CHECK(std::abs(p.value(0.0) - (4.0 * std::log(2.0) - 2.0)) <= 1e-10);
  CHECK(radial_residual(p, DriftCoefficient::make_constant(0.5, 1.0, 1), minus_one, Side::plus) <= 1e-8);
  CHECK(p.first(0.0) == doctest::Approx(0.0).scale(1.0));
  for (double r : {0.1, 0.5, 0.9}) CHECK(p.first(r) < 0.0);
}

TEST_CASE("constant drift reduces to the quadratic as b -> 0") {
  for (int k : {1, 2, 3}) {
    const auto q = profile_const_b(0.0, 1.0, k);
    CHECK(q.value(0.3) == doctest::Approx((1.0 - 0.09) / (2.0 * k)).epsilon(1e-15));
    for (double b : {1e-9, 1e-6, 1e-3}) {
      const auto p = profile_const_b(b, 1.0, k);
      CHECK(std::abs(p.value(0.3) - q.value(0.3)) <= 2.0 * b);
    }
  }
}

TEST_CASE("constant drift at the threshold is rejected") {
  CHECK_THROWS_AS(profile_const_b(1.2, 1.0, 1), NonexistenceThreshold);
  try {
    profile_const_b(1.0, 1.0, 1);
    FAIL("expected NonexistenceThreshold");
  } catch (const NonexistenceThreshold& e) {
    CHECK(e.tag() == "bR>=k");
  }
  CHECK_THROWS_AS(profile_const_b(-0.1, 1.0, 1), std::invalid_argument);
}

TEST_CASE("minus-sign drift") {
  const auto p = profile_minus_b(1.0, 1.0, 1);
  CHECK(std::abs(p.value(0.0) - std::exp(-1.0)) <= 1e-10);
  CHECK(p.value(1.0) == doctest::Approx(0.0).scale(1.0));
  CHECK(radial_residual(p, DriftCoefficient::make_constant(1.0, 1.0, 1), minus_one, Side::minus) <= 1e-8);
  for (double b : {0.3, 2.0, 7.0})
    CHECK(radial_residual(profile_minus_b(b, 1.5, 2), DriftCoefficient::make_constant(b, 1.5, 2, 3), minus_one,
                          Side::minus) <= 1e-8);
}

TEST_CASE("critical eigen family") {
  const auto p = critical_eigen_profile(1.0, 1.0, 1.0, 1);
  CHECK(p.value(0.5) == doctest::Approx(0.5 * std::exp(0.5)).epsilon(1e-14));
  CHECK(p.value(1.0) == doctest::Approx(0.0).scale(1.0));
  CHECK_THROWS_AS(critical_eigen_profile(1.1, 1.0, 1.0, 1), RangeError);
  const auto c = DriftCoefficient::make_constant(1.0, 1.0, 1);
  const ScalarFn rhs = [&p](double r) { return -p.value(r); };
  CHECK(radial_residual(p, c, rhs, Side::plus) <= 1e-8);
}

TEST_CASE("weighted drift b(r) = r on R = 0.8") {
  const auto c = affine(0.0, 1.0, 0.8);
  const double exact = -0.5 * std::log(1.0 - 0.64);
  const auto t = integral_test(c);
  CHECK(t.finite);
  CHECK(t.value == doctest::Approx(exact).epsilon(1e-10));
  const double gl = oracle::gauss_integral([](double s) { return s / (1.0 - s * s); }, 0.0, 0.8);
  CHECK(gl == doctest::Approx(exact).epsilon(1e-12));
  const auto p = profile_weighted(c);
  CHECK(std::abs(p.value(0.0) - exact) <= 1e-8);
  CHECK(radial_residual(p, c, minus_one, Side::plus) <= 1e-6);
}

TEST_CASE("weighted drift b(r) = r - 1 glues two regimes") {
  const auto c = affine(-1.0, 1.0, 1.0);
  const auto p = profile_weighted(c);
  CHECK(p.regime == Regime::weighted_glued);
  REQUIRE(p.glue_radii.size() == 1);
  const double rb = p.glue_radii.front();
  CHECK(rb > 0.5);
  CHECK(rb < 1.0);
  const double e = 1e-9;
  CHECK(std::abs(p.value(rb - e) - p.value(rb + e)) <= 1e-8);
  CHECK(std::abs(p.first(rb - e) - p.first(rb + e)) <= 1e-8);
  CHECK(radial_residual(p, c, minus_one, Side::plus) <= 1e-6);
  CHECK(p.value(1.0) == doctest::Approx(0.0).scale(1.0));
}

TEST_CASE("divergent integral means nonexistence on the inner ball") {
  const auto c = affine(0.0, 1.0, 2.0);
  const auto t = integral_test(c);
  CHECK_FALSE(t.finite);
  CHECK(t.r0_threshold == doctest::Approx(1.0).epsilon(1e-9));
  try {
    profile_weighted(c);
    FAIL("expected NonexistenceThreshold");
  } catch (const NonexistenceThreshold& e) {
    CHECK(e.radius() == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("threshold radius") {
  CHECK(r0_threshold(affine(0.0, 1.0, 2.0)) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(r0_threshold(affine(0.0, 1.0, 0.8)) == doctest::Approx(0.8));
  CHECK(r0_threshold(DriftCoefficient::make_constant(2.0, 1.0, 1)) == doctest::Approx(0.5).epsilon(1e-10));
}

TEST_CASE("weighted profile with constant drift matches the closed form") {
  const auto c = affine(0.4, 0.0, 1.0, 2);
  const auto closed = profile_const_b(0.4, 1.0, 2);
  const auto p = profile_weighted(c);
  for (double r : {0.0, 0.25, 0.5, 0.75})
    CHECK(p.value(r) == doctest::Approx(closed.value(r)).epsilon(1e-7));
}

TEST_CASE("input validation") {
  CHECK_THROWS(profile_const_b(0.5, 0.0, 1));
  CHECK_THROWS(profile_const_b(0.5, 1.0, 0));
  CHECK_THROWS(profile_minus_b(0.0, 1.0, 1));
  CHECK_THROWS(DriftCoefficient::make_callable(ScalarFn(), ScalarFn(), 1.0, 1));
}
