#include "trunclap/verify.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "trunclap/eigen.hpp"
#include "trunclap/errors.hpp"
#include "trunclap/geometry.hpp"
#include "trunclap/radial.hpp"
#include "trunclap/random_matrices.hpp"
#include "trunclap/solver.hpp"

namespace trunclap {

namespace {

class Recorder {
 public:
  Recorder(std::string suite, double scale) : suite_(std::move(suite)), scale_(scale) {}

  void le(const std::string& name, double value, double threshold, std::string detail = {}) {
    const double t = threshold * scale_;
    out_.push_back({suite_, name, std::isfinite(value) && value <= t, value, t, std::move(detail)});
  }
  void truth(const std::string& name, bool ok, std::string detail = {}) {
    out_.push_back({suite_, name, ok, ok ? 1.0 : 0.0, 1.0, std::move(detail)});
  }
  std::vector<CheckResult> take() { return std::move(out_); }

 private:
  std::string suite_;
  double scale_;
  std::vector<CheckResult> out_;
};

Vec v2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

ConvexBody bicylinder() {
  const Vec axes = v2(1.0, 0.6);
  Mat swap_xz(3, 3);
  swap_xz << 0, 0, 1, 0, 1, 0, 1, 0, 0;
  return ConvexBody::intersection(
      {ConvexBody::cylinder(Mat::Identity(3, 3), ConvexBody::ellipsoid_axes(Vec::Zero(2), axes), 3),
       ConvexBody::cylinder(swap_xz, ConvexBody::ellipsoid_axes(Vec::Zero(2), axes), 3)});
}

void operators_suite(Recorder& rec, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> dim_dist(2, 5);
  std::uniform_real_distribution<double> t_dist(0.0, 10.0);
  const int n = 2000;
  double ell = 0, orth = 0, dual = 0, hom = 0, sub = 0, frame = 0;
  for (int s = 0; s < n; ++s) {
    const int N = dim_dist(rng);
    const int k = std::uniform_int_distribution<int>(1, N)(rng);
    const SymMatrix M = random_symmetric(N, rng);
    const SymMatrix P = random_psd(N, rng);
    const double scale = 1.0 + M.frobenius_norm() + P.frobenius_norm();
    ell = std::max(ell, (pk_plus(M, k) - pk_plus(M + P, k)) / scale);
    const auto Q = random_orthogonal(N, rng);
    orth = std::max(orth, std::abs(pk_plus(M.congruence(Q), k) - pk_plus(M, k)) / scale);
    dual = std::max(dual, std::abs(pk_minus(M, k) + pk_plus(-M, k)) / scale);
    const double t = t_dist(rng);
    hom = std::max(hom, std::abs(pk_plus(M * t, k) - t * pk_plus(M, k)) / (1.0 + t * scale));
    sub = std::max(sub, (pk_plus(M + P, k) - pk_plus(M, k) - pk_plus(P, k)) / scale);
    frame = std::max(frame, (frame_sum(M, random_frame(N, k, rng)) - pk_plus(M, k)) / scale);
  }
  rec.le("degenerate_ellipticity", ell, 1e-12);
  rec.le("orthogonal_invariance", orth, 1e-12);
  rec.le("duality", dual, 1e-12);
  rec.le("homogeneity", hom, 1e-12);
  rec.le("subadditivity", sub, 1e-12);
  rec.le("frame_sum_bound", frame, 1e-12);
  const double d[3] = {3.0, -1.0, 2.0};
  const SymMatrix D = SymMatrix::diagonal(d);
  rec.le("diagonal_pk_plus_k2", std::abs(pk_plus(D, 2) - 5.0), 1e-14);
  rec.le("diagonal_pk_minus_k1", std::abs(pk_minus(D, 1) + 1.0), 1e-14);
}

void geometry_suite(Recorder& rec, std::uint64_t seed) {
  const auto disk = ConvexBody::ball(Vec::Zero(2), 1.0);
  const auto square = ConvexBody::box(-Vec::Ones(2), Vec::Ones(2));
  const auto cube = ConvexBody::box(-Vec::Ones(3), Vec::Ones(3));
  const auto ball3 = ConvexBody::ball(Vec::Zero(3), 1.0);
  const auto bicyl = bicylinder();
  struct Row {
    const char* name;
    const ConvexBody* body;
    int d;
  };
  const Row rows[] = {{"disk", &disk, 0}, {"square", &square, 1}, {"cube", &cube, 2}, {"bicylinder", &bicyl, 1},
                      {"ball3", &ball3, 0}};
  for (const auto& r : rows) {
    const Classification c = classify(*r.body);
    rec.truth(std::string("classify_") + r.name, c.d == r.d && c.cj_max == r.body->dim() - r.d,
              "d=" + std::to_string(c.d) + " cj_max=" + std::to_string(c.cj_max));
    bool agree = true;
    for (int j = 1; j < r.body->dim(); ++j) agree = agree && gj_probe(*r.body, j, 2000, seed) == c.gj[j];
    rec.truth(std::string("gj_probe_agrees_") + r.name, agree);
  }
  const auto ellipse = ConvexBody::ellipsoid_axes(Vec::Zero(2), v2(2.0, 1.0));
  rec.le("support_ellipse_axis", std::abs(ellipse.support(v2(1.0, 0.0)) - 2.0), 1e-14);
  rec.le("psi_disk_center", std::abs(psi_value(disk, Vec::Zero(2)) - 0.5), 1e-9);
  rec.le("psi_disk_boundary", std::abs(psi_value(disk, v2(0.6, 0.8))), 1e-2 * 4.0);
  rec.le("psi_ellipse_center", std::abs(psi_value(ellipse, Vec::Zero(2)) - 2.0), 1e-9);
  rec.le("interior_ball_delta", std::abs(interior_ball_delta(1.0, 0.5, 1.0) - (0.5 - std::sqrt(3.0) / 4.0)), 1e-15);
  const std::vector<Vec> pts = {Vec::Zero(3), Vec::Unit(3, 0), 2.0 * Vec::Unit(3, 0), Vec::Unit(3, 1)};
  rec.truth("span_basis_rank2", span_basis(pts).size() == 2);
  const auto hull = strictly_convex_hull({Vec::Zero(2), v2(0.5, -0.5), v2(-0.5, -0.5)}, {1, 2, 4, 8, 16, 32, 64, 128});
  bool mono = true;
  for (std::size_t i = 1; i < hull.rhos().size(); ++i) mono = mono && hull.rhos()[i] >= hull.rhos()[i - 1];
  rec.truth("hull_rho_nondecreasing", mono);
  rec.truth("hull_contains_points", hull.contains(v2(0.5, -0.5), 1e-9) && hull.contains(v2(-0.5, -0.5), 1e-9) &&
                                        hull.contains(Vec::Zero(2), 1e-9));
}

void radial_suite(Recorder& rec) {
  const auto p = profile_const_b(0.5, 1.0, 1);
  rec.le("const_b_center", std::abs(p.value(0.0) - (4.0 * std::log(2.0) - 2.0)), 1e-10);
  rec.truth("const_b_boundary_zero", p.value(1.0) == 0.0);
  const auto c05 = DriftCoefficient::make_constant(0.5, 1.0, 1);
  const ScalarFn minus_one = [](double) { return -1.0; };
  rec.le("const_b_residual", radial_residual(p, c05, minus_one, Side::plus), 1e-8);
  const auto m = profile_minus_b(1.0, 1.0, 1);
  rec.le("minus_b_center", std::abs(m.value(0.0) - std::exp(-1.0)), 1e-10);

  const auto wr = DriftCoefficient::make_callable([](double r) { return r; }, [](double) { return 1.0; }, 0.8, 1);
  const auto pw = profile_weighted(wr);
  rec.le("weighted_center", std::abs(pw.value(0.0) + 0.5 * std::log(1.0 - 0.64)), 1e-8);

  const auto wg = DriftCoefficient::make_callable([](double r) { return r - 1.0; }, [](double) { return 1.0; }, 1.0, 1);
  const auto pg = profile_weighted(wg);
  const double rbar = pg.glue_radii.empty() ? -1.0 : pg.glue_radii.front();
  rec.truth("glue_radius_in_range", rbar > 0.5 && rbar < 1.0, "rbar=" + std::to_string(rbar));
  if (rbar > 0.0) {
    const double e = 1e-7;
    rec.le("glue_c1_match", std::abs(pg.first(rbar - e) - pg.first(rbar + e)), 1e-6);
  }
  rec.le("glue_residual", radial_residual(pg, wg, minus_one, Side::plus), 1e-6);

  const auto w2 = DriftCoefficient::make_callable([](double r) { return r; }, [](double) { return 1.0; }, 2.0, 1);
  rec.truth("integral_test_infinite", !integral_test(w2).finite);
  bool threw = false;
  try {
    profile_weighted(w2);
  } catch (const NonexistenceThreshold&) {
    threw = true;
  }
  rec.truth("nonexistence_threshold_raised", threw);
}

void solver_suite(Recorder& rec, std::mt19937_64& rng) {
  const auto disk = ConvexBody::ball(Vec::Zero(2), 1.0);
  const PointFn minus_one = [](const Vec&) { return -1.0; };
  const double h = 1.0 / 16;
  for (double b : {0.0, 0.5}) {
    SchemeConfig cfg;
    cfg.drift = Drift::make_constant(b);
    const auto rep = solve_dirichlet(disk, minus_one, h, cfg);
    const auto prof = profile_const_b(b, 1.0, 1);
    double err = 0.0;
    for (int i = 0; i < rep.grid->size(); ++i)
      err = std::max(err, std::abs(rep.field[i] - prof.value(rep.grid->position(i).norm())));
    rec.truth(b == 0.0 ? "disk_b0_converged" : "disk_b05_converged", rep.outcome == Outcome::converged);
    rec.le(b == 0.0 ? "disk_b0_error" : "disk_b05_error", err, b == 0.0 ? 1e-10 : 0.1);
  }

  SchemeConfig cfg;
  cfg.drift = Drift::make_constant(0.7);
  const Grid g(disk, h, cfg.width, cfg.k);
  std::uniform_int_distribution<int> node_dist(0, g.size() - 1);
  std::uniform_real_distribution<double> val(-1.0, 1.0);
  double worst = 0.0;
  for (int s = 0; s < 300; ++s) {
    Eigen::VectorXd u(g.size());
    for (int i = 0; i < g.size(); ++i) u[i] = val(rng);
    const int i = node_dist(rng);
    const double base = explicit_update(g, u, i, 0.7, -1.0, cfg.theta, 1, 0.7);
    for (int d = 0; d < static_cast<int>(g.directions().size()); ++d)
      for (int side = 0; side < 2; ++side) {
        const int nb = g.arm(i, d, side).neighbor;
        if (nb < 0) continue;
        Eigen::VectorXd w = u;
        w[nb] += 0.1;
        worst = std::max(worst, base - explicit_update(g, w, i, 0.7, -1.0, cfg.theta, 1, 0.7));
      }
  }
  rec.le("scheme_monotonicity", worst, 1e-14);

  SchemeConfig plain;
  const auto r1 = solve_dirichlet(disk, minus_one, h, plain);
  const auto r2 = solve_dirichlet(disk, [](const Vec&) { return -2.0; }, h, plain);
  rec.le("homogeneity", (r2.field - 2.0 * r1.field).cwiseAbs().maxCoeff(), 1e-6);
  rec.le("comparison", (r1.field - r2.field).maxCoeff(), 1e-6);

  Eigen::VectorXd quad(g.size());
  for (int i = 0; i < g.size(); ++i) quad[i] = -0.5 * g.position(i).squaredNorm() + 0.5;
  double pk_err = 0.0;
  for (int i = 0; i < g.size(); ++i) pk_err = std::max(pk_err, std::abs(discrete_pk_plus(g, quad, i) + 1.0));
  rec.le("discrete_pk_on_quadratic", pk_err, 1e-9);
}

void eigen_suite(Recorder& rec) {
  rec.le("mu_lower_bound_k1", std::abs(mu_lower_bound(1, 0.0, 1.0) - 2.0), 1e-15);
  rec.le("mu_lower_bound_k2", std::abs(mu_lower_bound(2, 0.0, 2.0) - 1.0), 1e-15);
  rec.le("mu_lower_bound_critical", std::abs(mu_lower_bound(1, 1.0, 1.0)), 1e-15);
  const auto cr = critical_drift_gap_check(1.0, 1);
  rec.le("critical_drift_residual", cr.max_residual, 1e-8);
  rec.truth("critical_drift_perturbed_failure", cr.perturbed_failure_detected);
  const auto disk = ConvexBody::ball(Vec::Zero(2), 1.0);
  SchemeConfig cfg;
  auto grid = std::make_shared<const Grid>(disk, 1.0 / 16, cfg.width, cfg.k);
  const auto low = bounded_iteration(grid, 1.0, cfg);
  const auto high = bounded_iteration(grid, 10.0, cfg);
  rec.truth("iteration_bounded_mu1", low.outcome == IterationOutcome::bounded);
  rec.truth("iteration_unbounded_mu10", high.outcome == IterationOutcome::unbounded);
  rec.le("iterates_nondecreasing", low.monotone_violation, 1e-9);
}

}  // namespace

const std::vector<std::string>& verify_suite_names() {
  static const std::vector<std::string> names = {"operators", "geometry", "radial", "solver", "eigen"};
  return names;
}

std::vector<CheckResult> run_verify_suite(const std::string& suite, const VerifyOptions& opts) {
  if (suite == "all") {
    std::vector<CheckResult> all;
    for (const auto& s : verify_suite_names()) {
      auto part = run_verify_suite(s, opts);
      all.insert(all.end(), part.begin(), part.end());
    }
    return all;
  }
  Recorder rec(suite, opts.tolerance_scale);
  std::mt19937_64 rng(opts.seed);
  if (suite == "operators")
    operators_suite(rec, rng);
  else if (suite == "geometry")
    geometry_suite(rec, opts.seed);
  else if (suite == "radial")
    radial_suite(rec);
  else if (suite == "solver")
    solver_suite(rec, rng);
  else if (suite == "eigen")
    eigen_suite(rec);
  else
    throw std::invalid_argument("unknown suite '" + suite + "'");
  return rec.take();
}

nlohmann::json verify_summary_json(const std::vector<CheckResult>& results) {
  using nlohmann::json;
  json suites = json::array();
  int total = 0, failures = 0;
  for (const auto& name : verify_suite_names()) {
    json cases = json::array();
    int n = 0, f = 0;
    for (const auto& r : results) {
      if (r.suite != name) continue;
      ++n;
      if (!r.passed) ++f;
      json c = {{"name", r.name}, {"status", r.passed ? "passed" : "failed"}, {"value", r.value},
                {"threshold", r.threshold}};
      if (!r.detail.empty()) c["detail"] = r.detail;
      cases.push_back(std::move(c));
    }
    if (n == 0) continue;
    suites.push_back({{"name", name}, {"tests", n}, {"failures", f}, {"testcases", std::move(cases)}});
    total += n;
    failures += f;
  }
  return {{"tests", total}, {"failures", failures}, {"testsuites", std::move(suites)}};
}

}  // namespace trunclap
