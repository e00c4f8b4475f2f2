#include "trunclap/solver.hpp"

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

#include "trunclap/errors.hpp"
#include "trunclap/radial.hpp"

namespace trunclap {

namespace {

using Clock = std::chrono::steady_clock;

struct Problem {
  const Grid& g;
  const Eigen::VectorXd& f;
  Eigen::VectorXd c;
  double drift_sup = 0.0;
  double tol = 0.0;
  double cap = 0.0;
};

void validate(const Grid& g, const Eigen::VectorXd& f, const SchemeConfig& cfg) {
  if (cfg.k < 1 || cfg.k > g.dim()) throw std::invalid_argument("scheme: need 1 <= k <= N");
  if (static_cast<int>(g.frames().front().size()) != cfg.k)
    throw std::invalid_argument("scheme: grid frame catalog built for a different k");
  if (!(cfg.theta > 0.0 && cfg.theta <= 1.0)) throw std::invalid_argument("scheme: theta must lie in (0, 1]");
  if (!(cfg.tolerance > 0.0)) throw std::invalid_argument("scheme: tolerance must be positive");
  if (cfg.width < 1) throw std::invalid_argument("scheme: width must be >= 1");
  if (cfg.max_iterations < 0) throw std::invalid_argument("scheme: max_iterations must be >= 0");
  if (f.size() != g.size()) throw std::invalid_argument("scheme: right-hand side size mismatch");
  for (int i = 0; i < f.size(); ++i)
    if (!std::isfinite(f[i])) throw std::invalid_argument("scheme: non-finite f sample");
}

double boundary_trace(const Grid& g, const Eigen::VectorXd& u) {
  double m = 0.0;
  for (int i = 0; i < g.size(); ++i)
    if (g.kind(i) == NodeKind::boundary_adjacent) m = std::max(m, std::abs(u[i]));
  return m;
}

double local_dt(const Grid& g, int i, double theta, int k, double drift_sup) {
  const double l = g.min_arm(i);
  return theta * l * l / (2.0 * (k + drift_sup * g.h()));
}

void run_explicit(const Problem& P, const SchemeConfig& cfg, Eigen::VectorXd& u, SolveReport& rep, int start_iter) {
  const Grid& g = P.g;
  const int n = g.size();
  const int max_it = cfg.max_iterations > 0 ? cfg.max_iterations : 200000;
  Eigen::VectorXd dt(n), r(n);
  for (int i = 0; i < n; ++i) dt[i] = local_dt(g, i, cfg.theta, cfg.k, P.drift_sup);
  double prev_sup = u.cwiseAbs().maxCoeff();
  int streak = 0;
  rep.method = rep.method.empty() ? "explicit_jacobi" : rep.method + "+explicit_jacobi";
  for (int it = start_iter;; ++it) {
    double res = 0.0;
    for (int i = 0; i < n; ++i) {
      r[i] = node_residual(g, u, i, P.c[i], P.f[i]);
      res = std::max(res, std::abs(r[i]));
    }
    rep.residual = res;
    rep.iterations = it;
    if (it % 100 == 0 || res <= P.tol) rep.residual_history.push_back(res);
    if (res <= P.tol) {
      rep.outcome = Outcome::converged;
      return;
    }
    const double sup = u.cwiseAbs().maxCoeff();
    streak = sup > prev_sup ? streak + 1 : 0;
    if (sup > P.cap && streak >= cfg.growth_window) {
      rep.outcome = Outcome::blow_up;
      rep.certificate.rule = "sup_norm_growth";
      rep.certificate.cap = P.cap;
      rep.certificate.cap_reached = true;
      rep.certificate.spacings = {g.h()};
      rep.certificate.sup_norms = {prev_sup, sup};
      return;
    }
    prev_sup = sup;
    if (it >= max_it) {
      rep.outcome = Outcome::max_iterations;
      return;
    }
    u.array() += dt.array() * r.array();
  }
}

// Howard policy iteration; semismooth Newton when negative drift adds min-structure.
void run_policy(const Problem& P, const SchemeConfig& cfg, Eigen::VectorXd& u, SolveReport& rep) {
  const Grid& g = P.g;
  const int n = g.size();
  const int max_it = cfg.max_iterations > 0 ? cfg.max_iterations : 500;
  const auto& frames = g.frames();
  const int nd = static_cast<int>(g.directions().size());
  bool min_structure = false;
  for (int i = 0; i < n; ++i) min_structure = min_structure || P.c[i] < 0.0;

  std::vector<int> frame(n, -1), drift(n, -1);
  std::vector<int> new_frame(n), new_drift(n);
  double best_res = std::numeric_limits<double>::infinity();
  int stalled = 0;
  rep.method = min_structure ? "semismooth_newton" : "policy_iteration";

  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
  std::vector<Eigen::Triplet<double>> trips;

  for (int it = 0;; ++it) {
    // policy improvement + residual
    double res = 0.0;
    bool changed = false;
    for (int i = 0; i < n; ++i) {
      double best = -std::numeric_limits<double>::infinity();
      int arg = 0;
      for (std::size_t fr = 0; fr < frames.size(); ++fr) {
        double s = 0.0;
        for (int d : frames[fr]) s += second_difference(g, u, i, d);
        if (s > best) {
          best = s;
          arg = static_cast<int>(fr);
        }
      }
      if (frame[i] >= 0 && frame[i] != arg) {
        double s = 0.0;
        for (int d : frames[frame[i]]) s += second_difference(g, u, i, d);
        if (s >= best - 1e-13 * (1.0 + std::abs(best))) arg = frame[i];
      }
      new_frame[i] = arg;
      double val = best - P.f[i];
      int darg = -1;
      if (P.c[i] != 0.0) {
        const Side side = P.c[i] > 0.0 ? Side::plus : Side::minus;
        const double gn = upwind_grad_norm(g, u, i, side, &darg);
        val += std::abs(P.c[i]) * gn;
        if (drift[i] != darg) {
          double keep;
          if (drift[i] < 0) {
            keep = 0.0;
          } else {
            const Arm& a = g.arm(i, drift[i] / 2, drift[i] % 2);
            keep = ((a.neighbor >= 0 ? u[a.neighbor] : 0.0) - u[i]) / a.length;
          }
          if (std::abs(keep - gn) <= 1e-13 * (1.0 + std::abs(gn))) darg = drift[i];
        }
      }
      new_drift[i] = darg;
      changed = changed || new_frame[i] != frame[i] || new_drift[i] != drift[i];
      res = std::max(res, std::abs(val));
    }
    rep.residual = res;
    rep.iterations = it;
    rep.residual_history.push_back(res);
    if (res <= P.tol) {
      rep.outcome = Outcome::converged;
      return;
    }
    if (u.size() > 0 && u.cwiseAbs().maxCoeff() > P.cap) {
      rep.outcome = Outcome::blow_up;
      rep.certificate.rule = "sup_norm_growth";
      rep.certificate.cap = P.cap;
      rep.certificate.cap_reached = true;
      rep.certificate.spacings = {g.h()};
      rep.certificate.sup_norms = {u.cwiseAbs().maxCoeff()};
      return;
    }
    if (!changed && it > 0) {
      rep.outcome = Outcome::max_iterations;
      return;
    }
    if (it >= max_it) {
      rep.outcome = Outcome::max_iterations;
      return;
    }
    if (min_structure) {
      if (res < best_res * (1.0 - 1e-3)) {
        best_res = res;
        stalled = 0;
      } else if (++stalled >= 30) {
        run_explicit(P, cfg, u, rep, it);
        return;
      }
    }
    frame = new_frame;
    drift = new_drift;

    // policy evaluation
    trips.clear();
    trips.reserve(static_cast<std::size_t>(n) * (2 * cfg.k + 3));
    Eigen::VectorXd rhs = P.f;
    for (int i = 0; i < n; ++i) {
      double diag = 0.0;
      for (int d : frames[frame[i]]) {
        const Arm& p = g.arm(i, d, 0);
        const Arm& m = g.arm(i, d, 1);
        const double ap = 2.0 / (p.length * (p.length + m.length));
        const double am = 2.0 / (m.length * (p.length + m.length));
        diag -= ap + am;
        if (p.neighbor >= 0) trips.emplace_back(i, p.neighbor, ap);
        if (m.neighbor >= 0) trips.emplace_back(i, m.neighbor, am);
      }
      if (drift[i] >= 0) {
        const Arm& a = g.arm(i, drift[i] / 2, drift[i] % 2);
        const double w = std::abs(P.c[i]) / a.length;
        diag -= w;
        if (a.neighbor >= 0) trips.emplace_back(i, a.neighbor, w);
      }
      trips.emplace_back(i, i, diag);
    }
    Eigen::SparseMatrix<double> A(n, n);
    A.setFromTriplets(trips.begin(), trips.end());
    A.makeCompressed();
    lu.analyzePattern(A);
    lu.factorize(A);
    if (lu.info() != Eigen::Success) throw std::runtime_error("policy iteration: singular policy matrix");
    Eigen::VectorXd next = lu.solve(rhs);
    // one step of iterative refinement against roundoff from short arms
    next += lu.solve(rhs - A * next);
    if (!next.allFinite()) throw std::runtime_error("policy iteration: non-finite iterate");
    u = next;
    (void)nd;
  }
}

}  // namespace

std::string outcome_name(Outcome o) {
  switch (o) {
    case Outcome::converged: return "converged";
    case Outcome::blow_up: return "blow_up";
    case Outcome::max_iterations: return "max_iterations";
  }
  return "unknown";
}

double explicit_update(const Grid& g, const Eigen::VectorXd& u, int node, double c, double f, double theta, int k,
                       double drift_sup) {
  return u[node] + local_dt(g, node, theta, k, drift_sup) * node_residual(g, u, node, c, f);
}

SolveReport solve_on_grid(std::shared_ptr<const Grid> grid, const Eigen::VectorXd& f, const SchemeConfig& cfg,
                          const Eigen::VectorXd* initial) {
  const auto t0 = Clock::now();
  const Grid& g = *grid;
  validate(g, f, cfg);
  Problem P{g, f, drift_coefficients(g, cfg.drift)};
  for (int i = 0; i < P.c.size(); ++i)
    if (!std::isfinite(P.c[i])) throw std::invalid_argument("scheme: non-finite drift sample");
  P.drift_sup = P.c.size() ? P.c.cwiseAbs().maxCoeff() : 0.0;
  const double fsup = f.size() ? f.cwiseAbs().maxCoeff() : 0.0;
  P.tol = cfg.tolerance * std::max(1.0, fsup);
  const double diam = g.body().diameter();
  P.cap = cfg.blowup_cap > 0.0 ? cfg.blowup_cap : 1e4 * diam * diam * (fsup + 1.0);

  SolveReport rep;
  rep.grid = grid;
  rep.tolerance = P.tol;
  Eigen::VectorXd u = initial ? *initial : Eigen::VectorXd::Zero(g.size());
  if (u.size() != g.size()) throw std::invalid_argument("scheme: initial field size mismatch");
  if (g.size() == 0) {
    rep.outcome = Outcome::converged;
  } else if (cfg.method == SolveMethod::explicit_jacobi) {
    run_explicit(P, cfg, u, rep, 0);
  } else {
    run_policy(P, cfg, u, rep);
  }
  rep.field = u;
  rep.boundary_trace_max = boundary_trace(g, u);
  rep.wall_clock = std::chrono::duration<double>(Clock::now() - t0).count();
  return rep;
}

SolveReport solve_dirichlet(const ConvexBody& body, const PointFn& f, double h, const SchemeConfig& cfg) {
  auto grid = std::make_shared<const Grid>(body, h, cfg.width, cfg.k);
  return solve_on_grid(grid, sample_nodes(*grid, f), cfg);
}

LowerBoundCheck ball_lower_bound(double b, int k, double eps, double value) {
  if (!(b > 0.0) || !(eps > 0.0) || !(eps < k)) throw std::invalid_argument("ball_lower_bound: need b > 0, 0 < eps < k");
  LowerBoundCheck c;
  c.epsilon = eps;
  c.radius = (k - eps) / b;
  c.reference = profile_const_b(b, c.radius, k).value(0.0);
  c.value = value;
  c.exceeded = value > c.reference;
  return c;
}

NonexistenceReport detect_nonexistence(const ConvexBody& body, const PointFn& f, const SchemeConfig& cfg,
                                       const LadderConfig& ladder) {
  if (ladder.spacings.size() < 3) throw std::invalid_argument("ladder: need at least three spacings");
  NonexistenceReport out;
  auto& cert = out.certificate;
  cert.rule = "refinement_ladder";
  const Vec probe = body.interior_point();
  for (double h : ladder.spacings) {
    auto rep = solve_dirichlet(body, f, h, cfg);
    cert.spacings.push_back(h);
    cert.sup_norms.push_back(rep.field.size() ? rep.field.cwiseAbs().maxCoeff() : 0.0);
    cert.origin_values.push_back(rep.grid->interpolate(rep.field, probe));
    cert.cap = rep.certificate.cap > 0.0 ? rep.certificate.cap : cert.cap;
    const bool capped = rep.outcome == Outcome::blow_up;
    out.levels.push_back(std::move(rep));
    if (capped) {
      cert.cap_reached = true;
      out.blow_up = true;
      break;
    }
  }
  if (!out.blow_up) {
    bool growing = true;
    for (std::size_t i = 1; i < cert.sup_norms.size(); ++i) {
      const double inc = cert.sup_norms[i] - cert.sup_norms[i - 1];
      cert.increments.push_back(inc);
      growing = growing && inc > ladder.resolution_floor * std::max(1.0, cert.sup_norms[i]);
    }
    for (std::size_t i = 1; i < cert.increments.size(); ++i) {
      const double r = cert.increments[i] / cert.increments[i - 1];
      cert.ratios.push_back(r);
      growing = growing && r >= ladder.ratio_threshold;
    }
    out.blow_up = growing;
  }
  const bool ball_case = body.kind() == BodyKind::ball && cfg.drift.kind == Drift::Kind::constant &&
                         cfg.drift.sign == Side::plus && cfg.drift.constant > 0.0;
  if (ball_case)
    for (double eps : ladder.epsilons)
      if (eps > 0.0 && eps < cfg.k)
        cert.lower_bounds.push_back(ball_lower_bound(cfg.drift.constant, cfg.k, eps, cert.origin_values.back()));
  if (out.blow_up) {
    const bool threshold = ball_case && cfg.drift.constant * body.impl().radius >= cfg.k;
    out.tag = threshold ? "bR>=k" : "sup_norm_growth";
    out.citation = threshold ? kBallThresholdCitation : "discrete solutions grow without bound under refinement";
  }
  return out;
}

std::vector<double> boundary_loss_diagnostic(const SolveReport& report, const ConvexBody& body, const Vec& probe,
                                             const std::vector<double>& radii) {
  if (report.outcome == Outcome::blow_up) throw std::invalid_argument("boundary_loss: report must not be a blow-up");
  if (!report.grid) throw std::invalid_argument("boundary_loss: report has no grid");
  const double scale = std::max(1.0, body.diameter());
  if (std::abs(body.signed_distance_estimate(probe)) > 1e-9 * scale)
    throw std::invalid_argument("boundary_loss: probe is not on the boundary");
  const Vec inward = -body.outward_normal(probe);
  std::vector<double> out;
  for (double s : radii) out.push_back(report.grid->interpolate(report.field, probe + s * inward));
  return out;
}

}  // namespace trunclap
