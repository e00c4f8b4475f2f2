#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles/oracles.hpp"
#include "trunclap/eigen.hpp"

using namespace trunclap;

TEST_CASE("analytic lower bound") {
  CHECK(mu_lower_bound(1, 0.0, 1.0) == 2.0);
  CHECK(mu_lower_bound(2, 0.5, 2.0) == doctest::Approx(0.5));
  CHECK(mu_lower_bound(1, 1.0, 1.0) == 0.0);
  CHECK_THROWS(mu_lower_bound(1, 1.5, 1.0));
}

TEST_CASE("shooting oracle reproduces the cosine profile") {
  // max(phi'', phi'/r) = phi'' for phi = cos(sqrt(mu) r) since tan x >= x
  CHECK(oracle::shoot_mu_k1(1.0) == doctest::Approx(std::numbers::pi * std::numbers::pi / 4.0).epsilon(1e-8));
  CHECK(oracle::shoot_mu_k1(2.0) == doctest::Approx(std::numbers::pi * std::numbers::pi / 16.0).epsilon(1e-8));
}

TEST_CASE("bounded iteration dichotomy on a coarse disk grid") {
  const auto disk = ConvexBody::ball(Vec::Zero(2), 1.0);
  SchemeConfig cfg;
  auto grid = std::make_shared<const Grid>(disk, 1.0 / 16, cfg.width, cfg.k);
  const auto low = bounded_iteration(grid, 1.0, cfg);
  CHECK(low.outcome == IterationOutcome::bounded);
  CHECK(low.monotone_violation <= 1e-9);
  for (std::size_t i = 1; i < low.sup_norms.size(); ++i) CHECK(low.sup_norms[i] >= low.sup_norms[i - 1] - 1e-9);
  CHECK(bounded_iteration(grid, 5.0, cfg).outcome == IterationOutcome::unbounded);
  CHECK_THROWS(bounded_iteration(grid, -1.0, cfg));
}

TEST_CASE("eigenvalue estimate on a coarse disk grid") {
  const auto disk = ConvexBody::ball(Vec::Zero(2), 1.0);
  SchemeConfig cfg;
  const auto e = estimate_mu1(disk, 1.0 / 16, cfg, 2e-2);
  const double want = oracle::shoot_mu_k1(1.0);
  CHECK(e.mu_lo < e.mu_hi);
  CHECK(std::abs(e.mu() - want) / want <= 0.08);
  CHECK(e.mu() >= mu_lower_bound(1, 0.0, 1.0));
  CHECK(e.eigenfunction.maxCoeff() == doctest::Approx(1.0));
  CHECK(e.eigenfunction.minCoeff() > 0.0);
}

TEST_CASE("estimate rejects flat domains and k > 1") {
  SchemeConfig cfg;
  CHECK_THROWS(estimate_mu1(ConvexBody::box(-Vec::Ones(2), Vec::Ones(2)), 0.125, cfg));
  cfg.k = 2;
  CHECK_THROWS(estimate_mu1(ConvexBody::ball(Vec::Zero(2), 1.0), 0.125, cfg));
}

TEST_CASE("critical drift certificate") {
  for (auto [R, k] : {std::pair{1.0, 1}, std::pair{2.0, 2}, std::pair{0.5, 1}}) {
    const auto c = critical_drift_gap_check(R, k);
    CHECK(c.mu == doctest::Approx(k / (R * R)));
    CHECK(c.max_residual <= 1e-8);
    CHECK(c.perturbed_failure_detected);
    CHECK(c.failure_radius > 0.0);
    CHECK(c.failure_radius < R);
  }
}

TEST_CASE("enclosing radius") {
  CHECK(enclosing_radius(ConvexBody::ball(Vec::Zero(2), 1.5)) == doctest::Approx(1.5).epsilon(1e-9));
  CHECK(enclosing_radius(ConvexBody::box(-Vec::Ones(2), Vec::Ones(2))) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-9));
}
