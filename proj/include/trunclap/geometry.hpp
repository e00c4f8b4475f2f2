#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace trunclap {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

enum class BodyKind { ball, ellipsoid, hpolytope, cylinder, power_epigraph, intersection };

std::string body_kind_name(BodyKind k);

struct Facet {
  Vec normal;  // unit, outward
  double offset = 0.0;  // body lies in normal . x < offset
};

// Immutable convex body in R^2 or R^3 (cylinder bases may also be 1D..3D).
class ConvexBody {
 public:
  struct Impl;

  static ConvexBody ball(const Vec& center, double radius);
  // Interior is (x-c)^T A (x-c) < 1 with A positive definite.
  static ConvexBody ellipsoid(const Vec& center, const Mat& shape);
  // Semi-axes along the columns of `rotation` (identity when empty).
  static ConvexBody ellipsoid_axes(const Vec& center, const Vec& semiaxes, const Mat& rotation = Mat());
  static ConvexBody hpolytope(std::vector<Facet> facets);
  static ConvexBody box(const Vec& lo, const Vec& hi);
  // O (base x R^{dim-j}); the first j coordinates of O^T x feed the base.
  static ConvexBody cylinder(const Mat& rotation, const ConvexBody& base, int dim);
  // { x : sign (x_N - offset) > coefficient |x'|^exponent }, unbounded on its own.
  static ConvexBody power_epigraph(int dim, double sign, double offset, double coefficient,
                                   double exponent);
  static ConvexBody intersection(std::vector<ConvexBody> members);

  int dim() const;
  BodyKind kind() const;
  const Impl& impl() const { return *impl_; }

  // Negative inside, zero on the boundary, positive outside.
  double level(const Vec& x) const;
  Vec level_gradient(const Vec& x) const;
  // First-order distance estimate |level| / |grad level| with the sign of level.
  double signed_distance_estimate(const Vec& x) const;

  bool contains(const Vec& x) const { return level(x) < 0.0; }
  bool contains_closure(const Vec& x, double tol = 1e-9) const;
  // +infinity when unbounded in that direction.
  double support(const Vec& direction) const;
  Vec outward_normal(const Vec& x) const;

  bool bounded() const;
  Vec interior_point() const;
  double diameter() const;
  // Axis-aligned bounds [lo, hi] of the closure.
  std::pair<Vec, Vec> bounding_box() const;

  // Boundary point hit by the ray from interior_point() along `direction`.
  Vec boundary_point(const Vec& direction) const;
  // Boundary crossing of the segment from an interior point `inside` toward
  // `outside`, located by bisection to relative precision `tol`.
  double crossing_fraction(const Vec& inside, const Vec& outside, double tol = 1e-12) const;

  // Deterministic boundary samples: equally spaced angles in 2D, a Fibonacci
  // lattice in 3D.
  std::vector<Vec> boundary_samples(int count) const;

  // Members for intersections, the body itself otherwise.
  std::vector<ConvexBody> members() const;
  // Base body of a cylinder; throws for other kinds.
  ConvexBody cylinder_base() const;

 private:
  explicit ConvexBody(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<const Impl> impl_;
};

struct ConvexBody::Impl {
  BodyKind kind = BodyKind::ball;
  int dim = 2;
  // ball / ellipsoid
  Vec center;
  double radius = 0.0;
  Mat shape;      // ellipsoid A
  Mat shape_inv;  // A^{-1}
  Mat shape_chol;  // L with L L^T = A^{-1}
  // hpolytope
  std::vector<Facet> facets;
  std::vector<Vec> vertices;
  // cylinder
  Mat rotation;
  std::shared_ptr<const Impl> base;
  int base_dim = 0;
  // power epigraph
  double sign = 1.0;
  double offset = 0.0;
  double coefficient = 1.0;
  double exponent = 2.0;
  // intersection
  std::vector<ConvexBody> members;
  // cached
  bool is_bounded = true;
  Vec interior;
  double diam = 0.0;
};

// Flatness dimension d(Omega) and derived C_j / G_j membership.
struct Classification {
  int dim = 2;
  int d = 0;
  int cj_max = 2;
  std::vector<bool> gj;  // gj[j] for j = 1..dim-1 (index 0 unused)
};

// Upper bound from the members: 0 for strictly convex pieces, N-1 for
// half-spaces, the axis dimension for cylinders.
int flatness_upper_bound(const ConvexBody& body);
// Largest flat boundary dimension found by line probes at `points` boundary samples.
int flatness_probe(const ConvexBody& body, int points, std::uint64_t seed);
int flatness_dimension(const ConvexBody& body);
Classification classify(const ConvexBody& body);

// Randomized falsification of the G_j line-intersection condition.
bool gj_probe(const ConvexBody& body, int j, int samples, std::uint64_t seed = 12345);

struct SearchConfig {
  double center_cap = 50.0;        // search box half-width in units of diam(omega)
  double boundary_tol_factor = 1e-2;  // boundary tolerance in units of diam(omega)^2
  double tol = 1e-13;              // optimality gap in units of diam(omega)^2
  int max_iterations = 4000;
};

struct CapFunction {
  Vec center;
  double radius = 0.0;
  double operator()(const Vec& x) const { return 0.5 * (radius * radius - (x - center).squaredNorm()); }
};

// Farthest point of the closure of omega from x0.
Vec farthest_point(const ConvexBody& omega, const Vec& x0);

struct PsiResult {
  double value = 0.0;
  CapFunction cap;  // minimizing cap
};

PsiResult psi_evaluate(const ConvexBody& omega, const Vec& x, const SearchConfig& search = {});
double psi_value(const ConvexBody& omega, const Vec& x, const SearchConfig& search = {});

// min over a finite cylinder cover of psi_base((O^T x)_{1..j}); validated once.
class LiftedSupersolution {
 public:
  LiftedSupersolution(ConvexBody domain, std::vector<ConvexBody> cover, SearchConfig search = {});
  double operator()(const Vec& x) const;
  const std::vector<ConvexBody>& cover() const { return cover_; }

 private:
  ConvexBody domain_;
  std::vector<ConvexBody> cover_;
  SearchConfig search_;
};

double lifted_supersolution(const ConvexBody& domain, const std::vector<ConvexBody>& cover,
                            const Vec& x, const SearchConfig& search = {});
// Cylinder members of an intersection (balls and ellipsoids count as j = N cylinders).
std::vector<ConvexBody> cover_from_intersection(const ConvexBody& domain);

// max over sampled boundary points of G(|x - z_b|), G(r) = r^{-alpha} - 1,
// z_b = x_b + nu(x_b), alpha = max(k-1, 1).
class BoundarySubsolution {
 public:
  BoundarySubsolution(const ConvexBody& domain, int k, int boundary_samples);
  double operator()(const Vec& x) const;

 private:
  std::vector<Vec> centers_;
  double alpha_;
};

double subsolution_phi(const ConvexBody& domain, const Vec& x, int k, int boundary_samples);

// Membership oracle for the intersection of closed balls B_R(-rho(R) e_m).
class ConvexHullOracle {
 public:
  ConvexHullOracle(std::vector<Vec> points, std::vector<double> radii);
  bool contains(const Vec& x, double tol = 1e-12) const;
  double rho(std::size_t i) const { return rho_[i]; }
  const std::vector<double>& radii() const { return radii_; }
  const std::vector<double>& rhos() const { return rho_; }
  // max of R^2 - rho(R)^2 over the last tenth of the radius grid
  double tail_gap() const;

 private:
  int m_ = 2;
  std::vector<double> radii_;
  std::vector<double> rho_;
};

ConvexHullOracle strictly_convex_hull(const std::vector<Vec>& points, const std::vector<double>& radii);

double interior_ball_delta(double R, double t, double dist);

std::vector<Vec> span_basis(const std::vector<Vec>& points);

}  // namespace trunclap
