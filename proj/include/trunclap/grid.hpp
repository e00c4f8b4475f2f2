#pragma once

#include <Eigen/Dense>
#include <array>
#include <functional>
#include <memory>
#include <unordered_map>
#include <vector>

#include "trunclap/geometry.hpp"
#include "trunclap/matrix.hpp"
#include "trunclap/quadrature.hpp"

namespace trunclap {

using PointFn = std::function<double(const Vec&)>;

// b(x) entering the equation as sign * b(x) |Du|.
struct Drift {
  enum class Kind { constant, radial, callable };
  Kind kind = Kind::constant;
  Side sign = Side::plus;
  double constant = 0.0;
  ScalarFn radial;  // b(|x - center|)
  Vec center;
  PointFn field;

  static Drift none() { return {}; }
  static Drift make_constant(double b, Side sign = Side::plus);
  static Drift make_radial(ScalarFn b, Side sign = Side::plus, Vec center = Vec());
  static Drift make_callable(PointFn b, Side sign = Side::plus);

  double magnitude(const Vec& x) const;
  // sign * b(x)
  double coefficient(const Vec& x) const;
};

enum class SolveMethod { policy_iteration, explicit_jacobi };

struct SchemeConfig {
  int k = 1;
  Drift drift;
  int width = 3;          // max |entry| of lattice directions
  double theta = 0.4;     // pseudo-time safety factor
  double tolerance = 1e-6;  // residual tolerance, relative to max(1, ||f||_inf)
  int max_iterations = 0;   // 0: method default
  double blowup_cap = 0.0;  // 0: 1e4 diam^2 (||f||_inf + 1)
  int growth_window = 100;
  SolveMethod method = SolveMethod::policy_iteration;
};

enum class NodeKind : unsigned char { exterior, interior, boundary_adjacent };

struct Arm {
  int neighbor = -1;    // unknown index, -1 when the arm ends on the boundary
  double length = 0.0;  // physical arm length
};

using LatticeDir = std::array<int, 3>;

// Coprime integer directions with max |entry| <= width, one per axis (v ~ -v).
std::vector<LatticeDir> lattice_directions(int dim, int width);
// k-tuples of mutually orthogonal directions (indices into dirs).
std::vector<std::vector<int>> frame_catalog(int dim, int k, const std::vector<LatticeDir>& dirs);

// Lattice x = h * i anchored at the origin, restricted to a convex body.
class Grid {
 public:
  Grid(const ConvexBody& body, double h, int width, int k);

  int dim() const { return dim_; }
  double h() const { return h_; }
  const ConvexBody& body() const { return body_; }
  int size() const { return static_cast<int>(nodes_.size()); }
  const Vec& position(int i) const { return pos_[i]; }
  const std::array<int, 3>& index(int i) const { return nodes_[i]; }
  NodeKind kind(int i) const { return kind_[i]; }
  // Unknown index of a lattice point, -1 when not an interior node.
  int lookup(const std::array<int, 3>& idx) const;
  int nearest_node(const Vec& x) const;

  const std::vector<LatticeDir>& directions() const { return dirs_; }
  const std::vector<std::vector<int>>& frames() const { return frames_; }
  // Arm of node i along +dirs[d] (side 0) or -dirs[d] (side 1).
  const Arm& arm(int i, int d, int side) const { return arms_[(static_cast<std::size_t>(i) * dirs_.size() + d) * 2 + side]; }
  double min_arm(int i) const { return min_arm_[i]; }

  // Multilinear interpolation of a nodal field; exterior lattice points count as 0.
  double interpolate(const Eigen::VectorXd& u, const Vec& x) const;

 private:
  long long key(const std::array<int, 3>& idx) const;

  ConvexBody body_;
  int dim_;
  double h_;
  std::array<int, 3> lo_{0, 0, 0}, hi_{0, 0, 0};
  std::vector<std::array<int, 3>> nodes_;
  std::vector<Vec> pos_;
  std::vector<NodeKind> kind_;
  std::vector<int> index_map_;  // dense over the bounding lattice box
  std::vector<LatticeDir> dirs_;
  std::vector<std::vector<int>> frames_;
  std::vector<Arm> arms_;
  std::vector<double> min_arm_;
};

// Nonuniform three-point second difference along direction d (Dirichlet 0 at cut arms).
double second_difference(const Grid& g, const Eigen::VectorXd& u, int node, int d);

// max over frames of the sum of second differences.
double discrete_pk_plus(const Grid& g, const Eigen::VectorXd& u, int node, int* frame = nullptr);

// plus: max(0, max one-sided differences); minus: min(0, min one-sided differences).
// `arm` receives the index 2*d+side of the active arm, or -1.
double upwind_grad_norm(const Grid& g, const Eigen::VectorXd& u, int node, Side sign, int* arm = nullptr);

// P_k^+ + c(x)|Du| - f at one node, c = drift coefficient.
double node_residual(const Grid& g, const Eigen::VectorXd& u, int node, double c, double f);

double residual_norm(const Grid& g, const Eigen::VectorXd& u, const Eigen::VectorXd& f, const SchemeConfig& cfg);

Eigen::VectorXd sample_nodes(const Grid& g, const PointFn& fn);
Eigen::VectorXd drift_coefficients(const Grid& g, const Drift& d);

}  // namespace trunclap
