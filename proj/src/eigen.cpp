#include "trunclap/eigen.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "trunclap/errors.hpp"
#include "trunclap/radial.hpp"

namespace trunclap {

double mu_lower_bound(int k, double b, double R) {
  if (k < 1) throw std::invalid_argument("mu_lower_bound: k must be positive");
  if (!(R > 0.0)) throw std::invalid_argument("mu_lower_bound: R must be positive");
  if (b < 0.0) throw std::invalid_argument("mu_lower_bound: b must be nonnegative");
  if (b * R > k) throw std::invalid_argument("mu_lower_bound: bR > k makes the bound vacuous");
  return 2.0 * (k - b * R) / (R * R);
}

std::string iteration_outcome_name(IterationOutcome o) {
  return o == IterationOutcome::bounded ? "bounded" : "unbounded";
}

IterationResult bounded_iteration(std::shared_ptr<const Grid> grid, double mu, const SchemeConfig& cfg,
                                  const IterationOptions& opts) {
  if (!(mu > 0.0)) throw std::invalid_argument("bounded_iteration: mu must be positive");
  if (cfg.k != 1) throw std::invalid_argument("bounded_iteration: only k = 1 is supported");
  const Grid& g = *grid;
  const int n = g.size();
  const double diam = g.body().diameter();
  const double cap = opts.cap_factor * diam * diam / (2.0 * cfg.k);

  IterationResult out;
  out.mu = mu;
  Eigen::VectorXd w = Eigen::VectorXd::Zero(n);
  int growth_run = 0;
  for (int step = 1; step <= opts.n_max; ++step) {
    const Eigen::VectorXd f = Eigen::VectorXd::Constant(n, -1.0) - mu * w;
    SolveReport rep = solve_on_grid(grid, f, cfg, &w);
    if (rep.outcome != Outcome::converged)
      throw std::runtime_error("bounded_iteration: inner solve " + outcome_name(rep.outcome) + " at step " +
                               std::to_string(step));
    const Eigen::VectorXd& next = rep.field;
    out.monotone_violation = std::max(out.monotone_violation, (w - next).maxCoeff());
    const double inc = (next - w).cwiseAbs().maxCoeff();
    const double sup = next.cwiseAbs().maxCoeff();
    const double prev_sup = out.sup_norms.empty() ? 0.0 : out.sup_norms.back();
    if (!out.increments.empty() && out.increments.back() > 0.0) out.contraction = inc / out.increments.back();
    out.increments.push_back(inc);
    out.sup_norms.push_back(sup);
    w = next;
    out.steps = step;
    growth_run = (prev_sup > 0.0 && sup >= prev_sup * (1.0 + opts.growth)) ? growth_run + 1 : 0;
    if (inc < opts.step_tol * std::max(1.0, sup)) {
      out.outcome = IterationOutcome::bounded;
      out.limit = w;
      return out;
    }
    if (sup > cap && growth_run >= opts.growth_steps) {
      out.outcome = IterationOutcome::unbounded;
      out.limit = w;
      return out;
    }
  }
  out.decided_by_extrapolation = true;
  out.outcome = out.contraction < 1.0 ? IterationOutcome::bounded : IterationOutcome::unbounded;
  out.limit = w;
  return out;
}

double enclosing_radius(const ConvexBody& body) {
  if (body.kind() == BodyKind::ball) return body.impl().radius;
  const auto [lo, hi] = body.bounding_box();
  const Vec c = 0.5 * (lo + hi);
  double r = 0.0;
  for (const auto& p : body.boundary_samples(body.dim() == 2 ? 720 : 2000)) r = std::max(r, (p - c).norm());
  return r;
}

EigenEstimate estimate_mu1(const ConvexBody& body, double h, const SchemeConfig& cfg, double bisection_tol,
                           const IterationOptions& opts) {
  if (body.dim() != 2) throw std::invalid_argument("estimate_mu1: two-dimensional domains only");
  if (cfg.k != 1) throw std::invalid_argument("estimate_mu1: k must be 1");
  if (!(bisection_tol > 0.0)) throw std::invalid_argument("estimate_mu1: bisection_tol must be positive");
  if (classify(body).d != 0) throw std::invalid_argument("estimate_mu1: domain must be strictly convex");

  EigenEstimate est;
  est.grid = std::make_shared<const Grid>(body, h, cfg.width, cfg.k);
  std::vector<IterationResult> runs;
  auto test = [&](double mu) {
    IterationResult r = bounded_iteration(est.grid, mu, cfg, opts);
    est.log.push_back({mu, r.outcome, r.steps, r.sup_norms.empty() ? 0.0 : r.sup_norms.back(),
                       r.decided_by_extrapolation});
    est.monotone_violation = std::max(est.monotone_violation, r.monotone_violation);
    runs.push_back(std::move(r));
    return runs.back().outcome == IterationOutcome::bounded;
  };
  auto dump_log = [&]() {
    std::ostringstream os;
    for (const auto& e : est.log) os << e.mu << " " << iteration_outcome_name(e.outcome) << " " << e.steps << "\n";
    return os.str();
  };

  const double R = enclosing_radius(body);
  double lo = mu_lower_bound(1, 0.0, R);
  if (!test(lo)) throw BracketFailure("estimate_mu1: unbounded at the analytic lower bound", dump_log());
  Eigen::VectorXd best_field = runs.back().limit;
  double hi = 2.0 * lo;
  int doublings = 0;
  while (test(hi)) {
    lo = hi;
    best_field = runs.back().limit;
    hi *= 2.0;
    if (++doublings > 30) throw BracketFailure("estimate_mu1: no unbounded mu found", dump_log());
  }
  while ((hi - lo) > bisection_tol * lo) {
    const double mid = 0.5 * (lo + hi);
    if (test(mid)) {
      lo = mid;
      best_field = runs.back().limit;
    } else {
      hi = mid;
    }
  }
  // dichotomy monotonicity across the log
  for (const auto& a : est.log)
    for (const auto& b : est.log)
      if (a.outcome == IterationOutcome::bounded && b.outcome == IterationOutcome::unbounded && b.mu < a.mu)
        throw BracketFailure("estimate_mu1: bounded above an unbounded mu", dump_log());

  est.mu_lo = lo;
  est.mu_hi = hi;
  const double sup = best_field.cwiseAbs().maxCoeff();
  est.eigenfunction = sup > 0.0 ? Eigen::VectorXd(best_field / sup) : best_field;
  return est;
}

CriticalDriftReport critical_drift_gap_check(double R, int k, int samples) {
  if (!(R > 0.0) || k < 1) throw std::invalid_argument("critical_drift_gap_check: need R > 0, k >= 1");
  CriticalDriftReport rep;
  rep.R = R;
  rep.k = k;
  rep.mu = k / (R * R);
  const DriftCoefficient drift = DriftCoefficient::make_constant(k / R, R, k);
  rep.a_values = {0.5, 1.0, 2.0};
  for (double a : rep.a_values) {
    const RadialProfile p = critical_eigen_profile(rep.mu, a, R, k);
    const double mu = rep.mu;
    const ScalarFn rhs = [&p, mu](double r) { return -mu * p.value(r); };
    const double res = radial_residual(p, drift, rhs, Side::plus, samples);
    rep.residuals.push_back(res);
    rep.max_residual = std::max(rep.max_residual, res);
  }
  rep.perturbed_mu = rep.mu + 0.1;
  const RadialProfile q = critical_eigen_formula(rep.perturbed_mu, 1.0, R, k);
  for (int i = 1; i < samples; ++i) {
    const double r = R * i / samples;
    const double gap = q.second(r) - q.first(r) / r;
    if (gap > 1e-12 * (std::abs(q.second(r)) + std::abs(q.first(r) / r))) {
      rep.perturbed_failure_detected = true;
      rep.failure_radius = r;
      break;
    }
  }
  rep.note =
      "u_{mu,a} with mu = k/R^2 is positive in the ball and vanishes on the boundary, so it certifies "
      "mu_k^+ >= k/R^2. The variant requiring test functions positive on the closed ball admits no such "
      "certificate (its value is 0 at bR = k); this is recorded, not computed.";
  return rep;
}

}  // namespace trunclap
