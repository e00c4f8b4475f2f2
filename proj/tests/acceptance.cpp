// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.
//
//   acceptance <path to trunclap CLI> <domains dir>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles/oracles.hpp"
#include "trunclap/eigen.hpp"
#include "trunclap/errors.hpp"
#include "trunclap/geometry.hpp"
#include "trunclap/radial.hpp"
#include "trunclap/random_matrices.hpp"
#include "trunclap/solver.hpp"

using namespace trunclap;

namespace {

std::string g_cli;
std::string g_domains;

struct Verdict {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

Vec v2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

const PointFn minus_one = [](const Vec&) { return -1.0; };
const ScalarFn minus_one_r = [](double) { return -1.0; };

ConvexBody disk() { return ConvexBody::ball(Vec::Zero(2), 1.0); }

double max_error(const SolveReport& rep, const ScalarFn& g) {
  double err = 0.0;
  for (int i = 0; i < rep.grid->size(); ++i) err = std::max(err, std::abs(rep.field[i] - g(rep.grid->position(i).norm())));
  return err;
}

int run_cli(const std::string& args) {
  const std::string cmd = g_cli + " " + args + " > /dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

void c1(Verdict& v) {
  const auto t0 = Clock::now();
  const auto p = profile_const_b(0.5, 1.0, 1);
  const double e0 = std::abs(p.value(0.0) - (4.0 * std::log(2.0) - 2.0));
  const double res = radial_residual(p, DriftCoefficient::make_constant(0.5, 1.0, 1), minus_one_r, Side::plus);
  const double em = std::abs(profile_minus_b(1.0, 1.0, 1).value(0.0) - std::exp(-1.0));
  const double t = seconds_since(t0);
  v.detail << "g(R)=" << p.value(1.0) << " |g(0)-(4ln2-2)|=" << e0 << " residual=" << res << " |gminus(0)-1/e|=" << em
           << " t=" << t << "s";
  v.require(p.value(1.0) == 0.0, "g(R) == 0");
  v.require(e0 <= 1e-10, "g(0)");
  v.require(res <= 1e-8, "residual");
  v.require(em <= 1e-10, "minus-sign g(0)");
  v.require(t < 1.0, "runtime");
}

void c2(Verdict& v) {
  SchemeConfig cfg;
  const auto p = profile_const_b(0.0, 1.0, 1);
  const ScalarFn g = [&p](double r) { return p.value(r); };
  const double e32 = max_error(solve_dirichlet(disk(), minus_one, 1.0 / 32, cfg), g);
  const auto t0 = Clock::now();
  const double e64 = max_error(solve_dirichlet(disk(), minus_one, 1.0 / 64, cfg), g);
  const double t = seconds_since(t0);
  v.detail << "err(1/32)=" << e32 << " err(1/64)=" << e64 << " ratio=" << e64 / e32 << " t=" << t << "s";
  v.require(e64 <= 5e-2, "error at h=1/64");
  v.require(e64 <= 0.8 * e32, "err(1/64) <= 0.8 err(1/32)");
  v.require(t < 60.0, "runtime");
}

void c3(Verdict& v) {
  SchemeConfig cfg;
  cfg.drift = Drift::make_constant(0.5);
  const auto p = profile_const_b(0.5, 1.0, 1);
  const auto t0 = Clock::now();
  const auto rep = solve_dirichlet(disk(), minus_one, 1.0 / 64, cfg);
  const double t = seconds_since(t0);
  const double e = max_error(rep, [&p](double r) { return p.value(r); });
  v.detail << "err(1/64)=" << e << " outcome=" << outcome_name(rep.outcome) << " t=" << t << "s";
  v.require(rep.outcome == Outcome::converged, "converged");
  v.require(e <= 5e-2, "error");
  v.require(t < 60.0, "runtime");
}

void c4(Verdict& v) {
  SchemeConfig cfg;
  cfg.drift = Drift::make_constant(1.2);
  const auto nr = detect_nonexistence(disk(), minus_one, cfg);
  const auto& c = nr.certificate;
  v.detail << "blow_up=" << nr.blow_up << " tag=" << nr.tag << " sup=";
  for (double s : c.sup_norms) v.detail << s << ",";
  v.detail << " ratios=";
  for (double r : c.ratios) v.detail << r << ",";
  bool exceeded = false;
  for (const auto& lb : c.lower_bounds) {
    v.detail << " u(0)=" << lb.value << " > g_" << lb.epsilon << "(0)=" << lb.reference;
    exceeded = exceeded || (lb.epsilon == 0.2 && lb.exceeded);
  }
  const int rc = run_cli("solve --domain " + g_domains + "/disk.json --k 1 --b 1.2 --f -1 --out acceptance_c4");
  v.detail << " cap_reached=" << c.cap_reached << " exit=" << rc;
  v.require(nr.blow_up, "blow-up outcome");
  v.require(nr.tag == "bR>=k" && nr.citation == kBallThresholdCitation, "citation");
  v.require(exceeded, "origin value exceeds g_0.2(0)");
  v.require(!c.cap_reached, "exceeded before the cap");
  v.require(rc == 2, "exit code 2");
}

// Probe values at s in {h, 2h, 4h} along the inward normal at `probe`.
std::vector<double> probes(const ConvexBody& body, const SchemeConfig& cfg, double h, const Vec& probe) {
  const auto rep = solve_dirichlet(body, minus_one, h, cfg);
  return boundary_loss_diagnostic(rep, body, probe, {h, 2 * h, 4 * h});
}

double min_of(const std::vector<double>& x) { return *std::min_element(x.begin(), x.end()); }

void c5(Verdict& v) {
  const auto square = ConvexBody::box(-Vec::Ones(2), Vec::Ones(2));
  SchemeConfig cfg;
  const Vec probe = v2(0.0, -1.0);
  const double hs[3] = {1.0 / 32, 1.0 / 64, 1.0 / 128};
  std::vector<double> mins;
  for (double h : hs) {
    const auto p = probes(square, cfg, h, probe);
    mins.push_back(min_of(p));
    v.detail << "square h=1/" << static_cast<int>(std::round(1 / h)) << ":" << p[0] << "," << p[1] << "," << p[2] << " ";
  }
  const double c0 = 0.75 * mins[0];  // calibrated at h = 1/32
  v.detail << "c0=" << c0;
  for (int i = 1; i < 3; ++i) {
    v.require(mins[i] >= c0, "square probe >= c0");
    v.require(std::abs(mins[i] - mins[0]) <= 0.25 * mins[0], "square probe within 25%");
  }
  v.require(c0 > 0.0, "c0 > 0");
  double prev_first = INFINITY;
  for (double h : hs) {
    const auto p = probes(disk(), cfg, h, probe);
    v.detail << " disk:" << p[0] << "," << p[1] << "," << p[2];
    v.require(p[0] < p[1] && p[1] < p[2], "disk probe increases with s");
    v.require(p[0] < prev_first, "disk probe decreases under refinement");
    prev_first = p[0];
  }
  v.require(prev_first < 0.25 * c0, "disk probe tends to 0");
}

void c6(Verdict& v) {
  const auto quartic = ConvexBody::intersection(
      {ConvexBody::power_epigraph(2, 1.0, 0.0, 1.0, 4.0), ConvexBody::power_epigraph(2, -1.0, 2.0, 1.0, 2.0)});
  SchemeConfig cfg;
  cfg.drift = Drift::make_constant(1.0);
  const Vec probe = v2(0.0, 0.0);
  std::vector<double> mins;
  for (double h : {1.0 / 32, 1.0 / 64, 1.0 / 128}) {
    const auto p = probes(quartic, cfg, h, probe);
    mins.push_back(min_of(p));
    v.detail << "h=1/" << static_cast<int>(std::round(1 / h)) << ":" << p[0] << "," << p[1] << "," << p[2] << " ";
  }
  const double c0 = 0.75 * mins[0];
  v.detail << "c0=" << c0;
  v.require(c0 > 0.0, "c0 > 0");
  v.require(mins[1] >= c0 && mins[2] >= c0, "probe >= c0 across two refinements");
}

void c7(Verdict& v) {
  SchemeConfig cfg;
  const auto t0 = Clock::now();
  const auto e = estimate_mu1(disk(), 1.0 / 32, cfg);
  const double t = seconds_since(t0);
  const double shoot = oracle::shoot_mu_k1(1.0);
  const double rel = std::abs(e.mu() - shoot) / shoot;
  v.detail << "bracket=[" << e.mu_lo << "," << e.mu_hi << "] mu=" << e.mu() << " mu_shoot=" << shoot << " rel=" << rel
           << " monotone_violation=" << e.monotone_violation << " t=" << t << "s";
  v.require(e.mu() >= 2.0 * (1.0 - 1e-2), "lower bound");
  v.require(rel <= 0.05, "5% of the shooting oracle");
  v.require(e.monotone_violation <= 1e-9, "nondecreasing iterates");
  v.require(t < 600.0, "runtime");
}

void c8(Verdict& v) {
  for (auto [R, k] : {std::pair{1.0, 1}, std::pair{2.0, 2}}) {
    const auto c = critical_drift_gap_check(R, k);
    v.detail << "R=" << R << ",k=" << k << ": residual=" << c.max_residual << " failure at r=" << c.failure_radius
             << " for mu=" << c.perturbed_mu << "; ";
    v.require(c.max_residual <= 1e-8, "residual");
    v.require(c.perturbed_failure_detected, "perturbed failure");
  }
}

void c9(Verdict& v) {
  auto affine = [](double c0, double c1, double R) {
    return DriftCoefficient::make_callable([c0, c1](double r) { return c0 + c1 * r; }, [c1](double) { return c1; }, R, 1);
  };
  const auto w = affine(0.0, 1.0, 0.8);
  const auto p = profile_weighted(w);
  const double exact = -0.5 * std::log(1.0 - 0.64);
  const double e0 = std::abs(p.value(0.0) - exact);
  v.detail << "g(0)=" << p.value(0.0) << " |g(0)-closed form|=" << e0 << " (vs 7-digit 0.5108256: "
           << std::abs(p.value(0.0) - 0.5108256) << ")";
  v.require(e0 <= 1e-8, "g(0)");

  SchemeConfig cfg;
  cfg.drift = Drift::make_radial([](double r) { return r; });
  const auto rep = solve_dirichlet(ConvexBody::ball(Vec::Zero(2), 0.8), minus_one, 1.0 / 64, cfg);
  const double es = max_error(rep, [&p](double r) { return p.value(r); });
  v.detail << " solver err=" << es;
  v.require(rep.outcome == Outcome::converged && es <= 5e-2, "solver agreement");

  const auto wg = affine(-1.0, 1.0, 1.0);
  const auto pg = profile_weighted(wg);
  const double rb = pg.glue_radii.empty() ? -1.0 : pg.glue_radii.front();
  const double e = 1e-9;
  const double c1gap = rb > 0 ? std::abs(pg.first(rb - e) - pg.first(rb + e)) : INFINITY;
  const double res = radial_residual(pg, wg, minus_one_r, Side::plus);
  v.detail << " rbar=" << rb << " C1 gap=" << c1gap << " residual=" << res;
  v.require(rb > 0.5 && rb < 1.0, "rbar in (0.5, 1)");
  v.require(c1gap <= 1e-8, "C1 match");
  v.require(res <= 1e-6, "glued residual");

  const auto w2 = affine(0.0, 1.0, 2.0);
  const bool infinite = !integral_test(w2).finite;
  double radius = -1.0;
  try {
    profile_weighted(w2);
  } catch (const NonexistenceThreshold& ex) {
    radius = ex.radius();
  }
  v.detail << " R=2: infinite=" << infinite << " threshold radius=" << radius;
  v.require(infinite, "integral test infinite");
  v.require(std::abs(radius - 1.0) <= 1e-9, "NonexistenceThreshold on B_1");
}

void c10(Verdict& v) {
  Mat swap(3, 3);
  swap << 0, 0, 1, 0, 1, 0, 1, 0, 0;
  const auto base = ConvexBody::ellipsoid_axes(Vec::Zero(2), v2(1.0, 0.6));
  struct Row {
    const char* name;
    ConvexBody body;
    int d;
  };
  const Row rows[] = {
      {"disk", disk(), 0},
      {"square", ConvexBody::box(-Vec::Ones(2), Vec::Ones(2)), 1},
      {"cube", ConvexBody::box(-Vec::Ones(3), Vec::Ones(3)), 2},
      {"ellipse-cylinders", ConvexBody::intersection({ConvexBody::cylinder(Mat::Identity(3, 3), base, 3),
                                                      ConvexBody::cylinder(swap, base, 3)}),
       1},
      {"ball3", ConvexBody::ball(Vec::Zero(3), 1.0), 0},
  };
  for (const auto& r : rows) {
    const auto c = classify(r.body);
    v.detail << r.name << ":d=" << c.d << "/C" << c.cj_max << " ";
    v.require(c.d == r.d && c.cj_max == r.body.dim() - r.d, std::string("classification of ") + r.name);
    for (int j = 1; j < r.body.dim(); ++j)
      v.require(gj_probe(r.body, j, 10000, 20240607) == c.gj[j], std::string("gj_probe on ") + r.name);
  }

  const auto ellipse = ConvexBody::ellipsoid_axes(Vec::Zero(2), v2(2.0, 1.0));
  const double D = ellipse.diameter();
  double worst_boundary = 0.0;
  for (const auto& x : ellipse.boundary_samples(64)) worst_boundary = std::max(worst_boundary, psi_value(ellipse, x));
  v.detail << "psi boundary max=" << worst_boundary << " (<= " << 1e-2 * D * D << ")";
  v.require(worst_boundary <= 1e-2 * D * D, "psi boundary values");

  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(-1, 1);
  auto sample = [&]() {
    for (;;) {
      const Vec x = v2(2 * u(rng), u(rng));
      if (ellipse.contains(x)) return x;
    }
  };
  int violations = 0;
  for (int s = 0; s < 10000; ++s) {
    const Vec x = sample(), y = sample();
    if (psi_value(ellipse, 0.5 * (x + y)) < 0.5 * (psi_value(ellipse, x) + psi_value(ellipse, y)) - 1e-6) ++violations;
  }
  v.detail << " concavity violations=" << violations;
  v.require(violations == 0, "psi concavity");

  const Grid g(ellipse, 1.0 / 8, 3, 1);
  Eigen::VectorXd psi(g.size());
  for (int i = 0; i < g.size(); ++i) psi[i] = psi_value(ellipse, g.position(i));
  double worst = -INFINITY;
  int interior = 0;
  for (int i = 0; i < g.size(); ++i) {
    bool full = true;
    for (int d = 0; d < static_cast<int>(g.directions().size()); ++d)
      full = full && g.arm(i, d, 0).neighbor >= 0 && g.arm(i, d, 1).neighbor >= 0;
    if (!full) continue;
    worst = std::max(worst, discrete_pk_plus(g, psi, i));
    ++interior;
  }
  v.detail << " max discrete P1+(D2 psi)=" << worst << " over " << interior << " nodes";
  v.require(interior > 0 && worst <= -1.0 + 5e-2, "discrete P1+ of psi");
}

void c11(Verdict& v) {
  std::mt19937_64 rng(11);
  const int bad = oracle::ball_containment_violations(interior_ball_delta, rng, 100000);
  v.detail << "delta containment violations=" << bad << "/100000";
  v.require(bad == 0, "interior ball containment");

  auto vec = [](std::initializer_list<double> xs) {
    Vec x(xs.size());
    int i = 0;
    for (double a : xs) x[i++] = a;
    return x;
  };
  const std::vector<std::vector<Vec>> fixtures = {
      {vec({0, 0}), vec({0.5, -0.5}), vec({-0.5, -0.5})},
      {vec({0, 0}), vec({1, -0.1}), vec({-0.3, -2}), vec({2, -3})},
      {vec({0, 0, 0}), vec({0.5, 0, -0.5}), vec({0, 0.5, -0.5}), vec({-0.4, -0.4, -1})},
  };
  std::vector<double> radii;
  for (int i = 0; i <= 40; ++i) radii.push_back(4.0 * std::pow(10.0, 0.075 * i));
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  for (std::size_t f = 0; f < fixtures.size(); ++f) {
    const auto& pts = fixtures[f];
    const int m = static_cast<int>(pts.front().size());
    const auto hull = strictly_convex_hull(pts, radii);
    bool contains = true;
    for (int s = 0; s < 2000; ++s) {
      // random convex combination
      std::vector<double> w(pts.size());
      double sum = 0.0;
      for (auto& x : w) sum += (x = -std::log(u01(rng)));
      Vec x = Vec::Zero(m);
      for (std::size_t i = 0; i < pts.size(); ++i) x += w[i] / sum * pts[i];
      contains = contains && hull.contains(x, 1e-9);
    }
    for (const auto& p : pts) contains = contains && hull.contains(p, 1e-9);
    bool confined = true;
    for (int s = 0; s < 2000; ++s) {
      Vec x = Vec::Zero(m);
      for (int i = 0; i + 1 < m; ++i) x[i] = 4.0 * (u01(rng) - 0.5);
      x[m - 1] = s % 2 ? 0.0 : 1e-3 * u01(rng);
      if (x.norm() < 1e-12) continue;
      confined = confined && !hull.contains(x, 0.0);
    }
    confined = confined && hull.contains(Vec::Zero(m), 0.0);
    bool mono = true;
    for (std::size_t i = 1; i < radii.size(); ++i) mono = mono && hull.rho(i) >= hull.rho(i - 1);
    const double R = radii.back();
    const double gap = R * R - hull.rho(radii.size() - 1) * hull.rho(radii.size() - 1);
    v.detail << " fixture" << f << ": K-containment=" << contains << " confined=" << confined << " monotone=" << mono
             << " R^2-rho^2=" << gap;
    v.require(contains && confined && mono && gap < 1e-2, "hull fixture " + std::to_string(f));
  }
}

void c12(Verdict& v) {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(42);
  std::uniform_int_distribution<int> dim_dist(2, 6);
  std::uniform_real_distribution<double> t_dist(0.0, 10.0);
  const int n = 10000;
  int fails[6] = {0, 0, 0, 0, 0, 0};
  double worst_oracle = 0.0;
  for (int s = 0; s < n; ++s) {
    const int N = dim_dist(rng);
    const int k = std::uniform_int_distribution<int>(1, N)(rng);
    const SymMatrix M = random_symmetric(N, rng);
    const SymMatrix P = random_psd(N, rng);
    const double tol = 1e-12 * (1.0 + M.frobenius_norm() + P.frobenius_norm());
    const double pm = pk_plus(M, k);
    if (pk_plus(M + P, k) < pm - tol) ++fails[0];
    if (std::abs(pk_plus(M.congruence(random_orthogonal(N, rng)), k) - pm) > tol) ++fails[1];
    if (std::abs(pk_minus(M, k) + pk_plus(-M, k)) > tol) ++fails[2];
    const double t = t_dist(rng);
    if (std::abs(pk_plus(M * t, k) - t * pm) > tol * (1.0 + t)) ++fails[3];
    if (pk_plus(M + P, k) > pm + pk_plus(P, k) + tol) ++fails[4];
    if (frame_sum(M, random_frame(N, k, rng)) > pm + tol) ++fails[5];
    if (s % 100 == 0) {
      oracle::Mat a(N, N);
      for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) a(i, j) = M(i, j);
      worst_oracle = std::max(worst_oracle, std::abs(oracle::pk_plus(a, k) - pm));
    }
  }
  const double t = seconds_since(t0);
  const char* names[6] = {"ellipticity", "invariance", "duality", "homogeneity", "subadditivity", "frame_sum"};
  for (int i = 0; i < 6; ++i) {
    v.detail << names[i] << "=" << fails[i] << "/" << n << " ";
    v.require(fails[i] == 0, names[i]);
  }
  v.detail << "oracle gap=" << worst_oracle << " t=" << t << "s";
  v.require(worst_oracle <= 1e-10, "inertia oracle agreement");
  v.require(t < 30.0, "runtime");
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 3) {
    std::fprintf(stderr, "usage: acceptance <trunclap cli> <domains dir> [criterion...]\n");
    return 1;
  }
  g_cli = argv[1];
  g_domains = argv[2];
  const std::vector<std::pair<const char*, std::function<void(Verdict&)>>> criteria = {
      {"radial closed forms", c1},
      {"disk b=0 vs quadratic solution", c2},
      {"disk b=0.5 vs constant-drift profile", c3},
      {"nonexistence for bR >= k", c4},
      {"flat-boundary loss on the square", c5},
      {"gradient-term obstruction on the quartic domain", c6},
      {"principal eigenvalue on the disk", c7},
      {"critical drift bR = k", c8},
      {"weighted drift profiles", c9},
      {"geometry suite", c10},
      {"interior balls and strictly convex hulls", c11},
      {"operator core", c12},
  };
  std::vector<bool> selected(criteria.size(), argc == 3);
  for (int a = 3; a < argc; ++a) {
    const int i = std::atoi(argv[a]);
    if (i >= 1 && i <= static_cast<int>(criteria.size())) selected[i - 1] = true;
  }
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (!selected[i]) continue;
    Verdict v;
    v.detail.precision(6);
    const auto t0 = Clock::now();
    try {
      criteria[i].second(v);
    } catch (const std::exception& e) {
      v.pass = false;
      v.detail << " [exception: " << e.what() << "]";
    }
    if (!v.pass) ++failed;
    std::printf("%s %2zu %s (%.1fs): %s\n", v.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, seconds_since(t0),
                v.detail.str().c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
