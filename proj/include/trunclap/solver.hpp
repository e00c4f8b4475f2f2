#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "trunclap/grid.hpp"

namespace trunclap {

enum class Outcome { converged, blow_up, max_iterations };

std::string outcome_name(Outcome o);

struct LowerBoundCheck {
  double epsilon = 0.0;
  double radius = 0.0;     // R = (k - eps) / b
  double reference = 0.0;  // g_eps(0)
  double value = 0.0;      // computed value at the probe point
  bool exceeded = false;
};

struct GrowthCertificate {
  std::string rule;  // "sup_norm_growth" (fixed grid) or "refinement_ladder"
  std::vector<double> spacings;
  std::vector<double> sup_norms;
  std::vector<double> origin_values;
  std::vector<double> increments;
  std::vector<double> ratios;
  double cap = 0.0;
  bool cap_reached = false;
  std::vector<LowerBoundCheck> lower_bounds;
};

struct SolveReport {
  Outcome outcome = Outcome::max_iterations;
  std::shared_ptr<const Grid> grid;
  Eigen::VectorXd field;
  std::vector<double> residual_history;
  double residual = 0.0;
  double tolerance = 0.0;
  int iterations = 0;
  double boundary_trace_max = 0.0;
  double wall_clock = 0.0;
  std::string method;
  GrowthCertificate certificate;  // filled on blow_up
};

// P_k^+(D^2u) + sign b(x)|Du| = f in the body, u = 0 on the boundary.
SolveReport solve_dirichlet(const ConvexBody& body, const PointFn& f, double h, const SchemeConfig& cfg);
// Same on a prebuilt grid with nodal right-hand side and optional initial field.
SolveReport solve_on_grid(std::shared_ptr<const Grid> grid, const Eigen::VectorXd& f, const SchemeConfig& cfg,
                          const Eigen::VectorXd* initial = nullptr);

// One explicit pseudo-time update u_i + dt_i * residual_i (exposed for the monotonicity test).
double explicit_update(const Grid& g, const Eigen::VectorXd& u, int node, double c, double f, double theta, int k,
                       double drift_sup);

// Refinement ladder for drift strengths where the discrete problem stays solvable
// on every fixed grid but the limit does not exist.
struct LadderConfig {
  std::vector<double> spacings{1.0 / 16, 1.0 / 32, 1.0 / 64};
  double ratio_threshold = 0.9;     // increments must not contract below this ratio
  double resolution_floor = 1e-3;   // increments below this count as converged
  std::vector<double> epsilons{0.2};
};

struct NonexistenceReport {
  bool blow_up = false;
  std::vector<SolveReport> levels;
  GrowthCertificate certificate;
  std::string tag;
  std::string citation;
};

NonexistenceReport detect_nonexistence(const ConvexBody& body, const PointFn& f, const SchemeConfig& cfg,
                                       const LadderConfig& ladder = {});

// g_eps(0) of the constant-drift family on B_R with R = (k - eps)/b.
LowerBoundCheck ball_lower_bound(double b, int k, double eps, double value);

// Field values at probe + s * (inward normal) for s in radii.
std::vector<double> boundary_loss_diagnostic(const SolveReport& report, const ConvexBody& body, const Vec& probe,
                                             const std::vector<double>& radii);

}  // namespace trunclap
