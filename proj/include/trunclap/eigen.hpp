#pragma once

#include <memory>
#include <string>
#include <vector>

#include "trunclap/solver.hpp"

namespace trunclap {

// 2(k - bR)/R^2; invalid_argument when bR > k.
double mu_lower_bound(int k, double b, double R);

enum class IterationOutcome { bounded, unbounded };

struct IterationOptions {
  int n_max = 4000;
  double step_tol = 1e-9;      // relative to max(1, ||w||_inf)
  double cap_factor = 1e3;     // divergence cap = cap_factor * diam^2 / (2k)
  double growth = 1e-3;        // sustained growth ratio 1 + growth ...
  int growth_steps = 5;        // ... over this many steps
  double monotone_tol = 1e-9;
};

struct IterationResult {
  IterationOutcome outcome = IterationOutcome::bounded;
  double mu = 0.0;
  int steps = 0;
  bool decided_by_extrapolation = false;  // n_max reached; decided from the increment ratio
  double contraction = 0.0;               // last ||w_{n+1}-w_n|| / ||w_n-w_{n-1}||
  double monotone_violation = 0.0;        // max over steps of (w_n - w_{n+1})_+
  std::vector<double> sup_norms;
  std::vector<double> increments;
  Eigen::VectorXd limit;  // last iterate
};

std::string iteration_outcome_name(IterationOutcome o);

// w_1 = 0, P_1^+(D^2 w_{n+1}) = -1 - mu w_n with zero boundary values.
IterationResult bounded_iteration(std::shared_ptr<const Grid> grid, double mu, const SchemeConfig& cfg,
                                  const IterationOptions& opts = {});

struct EigenLogEntry {
  double mu = 0.0;
  IterationOutcome outcome = IterationOutcome::bounded;
  int steps = 0;
  double sup_norm = 0.0;
  bool extrapolated = false;
};

struct EigenEstimate {
  double mu_lo = 0.0;
  double mu_hi = 0.0;
  double mu() const { return 0.5 * (mu_lo + mu_hi); }
  std::shared_ptr<const Grid> grid;
  Eigen::VectorXd eigenfunction;  // sup-norm 1
  std::vector<EigenLogEntry> log;
  double monotone_violation = 0.0;
};

// Circumscribed radius about the bounding-box centre (used for the lower bound).
double enclosing_radius(const ConvexBody& body);

EigenEstimate estimate_mu1(const ConvexBody& body, double h, const SchemeConfig& cfg, double bisection_tol = 1e-2,
                           const IterationOptions& opts = {});

struct CriticalDriftReport {
  double R = 1.0;
  int k = 1;
  double mu = 0.0;                     // k / R^2
  std::vector<double> a_values;
  std::vector<double> residuals;       // one per a
  double max_residual = 0.0;
  double perturbed_mu = 0.0;           // k/R^2 + 0.1
  bool perturbed_failure_detected = false;
  double failure_radius = 0.0;         // first r with phi'' > phi'/r
  std::string note;
};

CriticalDriftReport critical_drift_gap_check(double R, int k, int samples = 2000);

}  // namespace trunclap
