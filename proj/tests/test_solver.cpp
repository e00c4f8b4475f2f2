#include <doctest.h>

#include <cmath>
#include <random>

#include "trunclap/errors.hpp"
#include "trunclap/radial.hpp"
#include "trunclap/solver.hpp"

using namespace trunclap;

namespace {

const PointFn minus_one = [](const Vec&) { return -1.0; };

double max_error(const SolveReport& rep, const RadialProfile& p, double scale = 1.0) {
  double err = 0.0;
  for (int i = 0; i < rep.grid->size(); ++i)
    err = std::max(err, std::abs(rep.field[i] - scale * p.value(rep.grid->position(i).norm())));
  return err;
}

}  // namespace

TEST_CASE("pure second-order problem on the disk is solved exactly") {
  const auto disk = ConvexBody::ball(Vec::Zero(2), 1.0);
  for (int k : {1, 2}) {
    SchemeConfig cfg;
    cfg.k = k;
    const auto rep = solve_dirichlet(disk, minus_one, 1.0 / 16, cfg);
    CHECK(rep.outcome == Outcome::converged);
    CHECK(max_error(rep, profile_const_b(0.0, 1.0, k)) <= 1e-10);
  }
}

TEST_CASE("constant drift error shrinks under refinement") {
  const auto disk = ConvexBody::ball(Vec::Zero(2), 1.0);
  SchemeConfig cfg;
  cfg.drift = Drift::make_constant(0.5);
  const auto p = profile_const_b(0.5, 1.0, 1);
  const double e16 = max_error(solve_dirichlet(disk, minus_one, 1.0 / 16, cfg), p);
  const double e32 = max_error(solve_dirichlet(disk, minus_one, 1.0 / 32, cfg), p);
  CHECK(e16 < 0.08);
  CHECK(e32 < e16);
}

TEST_CASE("explicit iteration agrees with policy iteration") {
  const auto disk = ConvexBody::ball(Vec::Zero(2), 1.0);
  SchemeConfig a;
  a.drift = Drift::make_constant(0.5);
  SchemeConfig b = a;
  b.method = SolveMethod::explicit_jacobi;
  b.tolerance = 1e-9;
  const auto ra = solve_dirichlet(disk, minus_one, 1.0 / 8, a);
  const auto rb = solve_dirichlet(disk, minus_one, 1.0 / 8, b);
  REQUIRE(rb.outcome == Outcome::converged);
  CHECK((ra.field - rb.field).cwiseAbs().maxCoeff() <= 1e-6);
}

TEST_CASE("minus-sign drift matches its profile") {
  const auto disk = ConvexBody::ball(Vec::Zero(2), 1.0);
  SchemeConfig cfg;
  cfg.drift = Drift::make_constant(1.0, Side::minus);
  const auto rep = solve_dirichlet(disk, minus_one, 1.0 / 32, cfg);
  CHECK(rep.outcome == Outcome::converged);
  CHECK(max_error(rep, profile_minus_b(1.0, 1.0, 1)) <= 5e-2);
}

TEST_CASE("homogeneity and comparison") {
  const auto square = ConvexBody::box(-Vec::Ones(2), Vec::Ones(2));
  SchemeConfig cfg;
  cfg.drift = Drift::make_constant(0.3);
  const auto r1 = solve_dirichlet(square, minus_one, 1.0 / 16, cfg);
  const auto r2 = solve_dirichlet(square, [](const Vec&) { return -2.0; }, 1.0 / 16, cfg);
  const auto r3 = solve_dirichlet(square, [](const Vec& x) { return -1.0 - x.squaredNorm(); }, 1.0 / 16, cfg);
  CHECK((r2.field - 2.0 * r1.field).cwiseAbs().maxCoeff() <= 1e-6);
  CHECK((r1.field - r3.field).maxCoeff() <= 1e-9);  // more negative f, larger u
  CHECK(r1.field.minCoeff() > 0.0);
}

TEST_CASE("scheme update is monotone in the neighbours") {
  const auto disk = ConvexBody::ball(Vec::Zero(2), 1.0);
  const Grid g(disk, 1.0 / 16, 3, 1);
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> val(-1.0, 1.0);
  std::uniform_int_distribution<int> node(0, g.size() - 1);
  for (int s = 0; s < 200; ++s) {
    Eigen::VectorXd u(g.size());
    for (int i = 0; i < g.size(); ++i) u[i] = val(rng);
    const int i = node(rng);
    for (double c : {0.0, 0.8, -0.8}) {
      const double base = explicit_update(g, u, i, c, -1.0, 0.4, 1, 0.8);
      for (int d = 0; d < static_cast<int>(g.directions().size()); ++d)
        for (int side = 0; side < 2; ++side) {
          const int nb = g.arm(i, d, side).neighbor;
          if (nb < 0) continue;
          Eigen::VectorXd w = u;
          w[nb] += 0.05;
          CHECK(explicit_update(g, w, i, c, -1.0, 0.4, 1, 0.8) >= base - 1e-14);
        }
    }
  }
}

TEST_CASE("ladder flags the supercritical constant drift") {
  const auto disk = ConvexBody::ball(Vec::Zero(2), 1.0);
  SchemeConfig cfg;
  cfg.drift = Drift::make_constant(1.2);
  const auto nr = detect_nonexistence(disk, minus_one, cfg);
  CHECK(nr.blow_up);
  CHECK(nr.tag == "bR>=k");
  REQUIRE(nr.certificate.lower_bounds.size() == 1);
  CHECK(nr.certificate.lower_bounds[0].exceeded);
  for (double r : nr.certificate.ratios) CHECK(r >= 0.9);
}

TEST_CASE("ladder does not flag a subcritical drift") {
  const auto disk = ConvexBody::ball(Vec::Zero(2), 1.0);
  SchemeConfig cfg;
  cfg.drift = Drift::make_constant(0.5);
  CHECK_FALSE(detect_nonexistence(disk, minus_one, cfg).blow_up);
}

TEST_CASE("g_eps lower bound") {
  const auto lb = ball_lower_bound(1.2, 1, 0.2, 0.0);
  CHECK(lb.radius == doctest::Approx(2.0 / 3.0));
  CHECK(lb.reference == doctest::Approx(profile_const_b(1.2, 2.0 / 3.0, 1).value(0.0)));
  CHECK_FALSE(lb.exceeded);
}

TEST_CASE("iteration cap gives max_iterations") {
  const auto disk = ConvexBody::ball(Vec::Zero(2), 1.0);
  SchemeConfig cfg;
  cfg.method = SolveMethod::explicit_jacobi;
  cfg.max_iterations = 5;
  CHECK(solve_dirichlet(disk, minus_one, 1.0 / 16, cfg).outcome == Outcome::max_iterations);
}

TEST_CASE("boundary probe on the disk decays") {
  const auto disk = ConvexBody::ball(Vec::Zero(2), 1.0);
  SchemeConfig cfg;
  const auto rep = solve_dirichlet(disk, minus_one, 1.0 / 32, cfg);
  Vec probe(2);
  probe << 0.0, -1.0;
  const auto v = boundary_loss_diagnostic(rep, disk, probe, {1.0 / 32, 2.0 / 32, 4.0 / 32});
  CHECK(v[0] < v[1]);
  CHECK(v[1] < v[2]);
  CHECK(v[0] < 0.05);
}
