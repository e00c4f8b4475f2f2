#include "trunclap/random_matrices.hpp"

#include <Eigen/Dense>

namespace trunclap {

namespace {

Eigen::MatrixXd gaussian(int rows, int cols, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  Eigen::MatrixXd g(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) g(i, j) = nd(rng);
  return g;
}

Eigen::MatrixXd haar(int dim, std::mt19937_64& rng) {
  const Eigen::MatrixXd g = gaussian(dim, dim, rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ();
  const Eigen::MatrixXd r = qr.matrixQR();
  for (int j = 0; j < dim; ++j)
    if (r(j, j) < 0.0) q.col(j) *= -1.0;
  return q;
}

SymMatrix from_eigen(const Eigen::MatrixXd& m) {
  SymMatrix s(static_cast<int>(m.rows()));
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j <= i; ++j) s.set(i, j, 0.5 * (m(i, j) + m(j, i)));
  return s;
}

}  // namespace

SymMatrix random_symmetric(int dim, std::mt19937_64& rng, double scale) {
  return from_eigen(scale * gaussian(dim, dim, rng));
}

SymMatrix random_psd(int dim, std::mt19937_64& rng, double scale) {
  const Eigen::MatrixXd g = gaussian(dim, dim, rng);
  return from_eigen(scale * g * g.transpose());
}

std::vector<double> random_orthogonal(int dim, std::mt19937_64& rng) {
  const Eigen::MatrixXd q = haar(dim, rng);
  std::vector<double> out(static_cast<std::size_t>(dim) * dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) out[static_cast<std::size_t>(i) * dim + j] = q(i, j);
  return out;
}

std::vector<std::vector<double>> random_frame(int dim, int k, std::mt19937_64& rng) {
  const Eigen::MatrixXd q = haar(dim, rng);
  std::vector<std::vector<double>> out(k, std::vector<double>(dim));
  for (int c = 0; c < k; ++c)
    for (int i = 0; i < dim; ++i) out[c][i] = q(i, c);
  return out;
}

}  // namespace trunclap
