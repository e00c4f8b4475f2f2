#pragma once

#include <array>
#include <span>
#include <vector>

namespace trunclap {

inline constexpr int kMaxMatrixDim = 8;

enum class Side { plus, minus };

// Dense symmetric matrix of dimension 1..8. Storage is full row-major; the
// lower triangle wins when building from raw entries.
class SymMatrix {
 public:
  explicit SymMatrix(int dim);

  static SymMatrix from_row_major(int dim, std::span<const double> entries);
  static SymMatrix identity(int dim);
  static SymMatrix diagonal(std::span<const double> diag);
  // sum_i w_i v_i v_i^T
  static SymMatrix outer(std::span<const double> v, double weight = 1.0);

  int dim() const { return dim_; }
  double operator()(int i, int j) const { return a_[i * kMaxMatrixDim + j]; }
  void set(int i, int j, double v);

  double trace() const;
  double frobenius_norm() const;
  // <M x, x>
  double quadratic_form(std::span<const double> x) const;

  SymMatrix operator+(const SymMatrix& o) const;
  SymMatrix operator-(const SymMatrix& o) const;
  SymMatrix operator-() const;
  SymMatrix operator*(double t) const;

  // Q M Q^T for a square (dim x dim, row-major) matrix Q.
  SymMatrix congruence(std::span<const double> q) const;

 private:
  int dim_;
  std::array<double, kMaxMatrixDim * kMaxMatrixDim> a_{};
};

struct EigenDecomposition {
  std::vector<double> values;                // ascending
  std::vector<std::vector<double>> vectors;  // vectors[i] pairs with values[i]
};

EigenDecomposition eigen_decompose(const SymMatrix& m);
std::vector<double> eigenvalues_sorted(const SymMatrix& m);

double pk_plus(const SymMatrix& m, int k);
double pk_minus(const SymMatrix& m, int k);
double pk(const SymMatrix& m, int k, Side side);

// Sum of <M xi, xi> over an orthonormal family of k vectors.
double frame_sum(const SymMatrix& m, const std::vector<std::vector<double>>& frame);

struct RadialHessian {
  double gp = 0.0;   // g'(r)
  double gpp = 0.0;  // g''(r)
  double r = 1.0;
  int dim = 2;
};

// Truncated Laplacian of x -> g(|x|): eigenvalues are g'' once and g'/r (dim-1) times.
double pk_radial(const RadialHessian& h, int k, Side side);

}  // namespace trunclap
