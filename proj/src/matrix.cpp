#include "trunclap/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace trunclap {

namespace {

constexpr int S = kMaxMatrixDim;

void check_dim(int dim) {
  if (dim < 1 || dim > kMaxMatrixDim)
    throw std::invalid_argument("matrix dimension must be in 1..8, got " + std::to_string(dim));
}

void check_k(int k, int dim) {
  if (k < 1 || k > dim)
    throw std::invalid_argument("k must be in 1.." + std::to_string(dim) + ", got " +
                                std::to_string(k));
}

}  // namespace

SymMatrix::SymMatrix(int dim) : dim_(dim) { check_dim(dim); }

SymMatrix SymMatrix::from_row_major(int dim, std::span<const double> entries) {
  if (entries.size() != static_cast<std::size_t>(dim) * dim)
    throw std::invalid_argument("expected dim*dim entries");
  SymMatrix m(dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j <= i; ++j) m.set(i, j, entries[i * dim + j]);
  return m;
}

SymMatrix SymMatrix::identity(int dim) {
  SymMatrix m(dim);
  for (int i = 0; i < dim; ++i) m.set(i, i, 1.0);
  return m;
}

SymMatrix SymMatrix::diagonal(std::span<const double> diag) {
  SymMatrix m(static_cast<int>(diag.size()));
  for (int i = 0; i < m.dim(); ++i) m.set(i, i, diag[i]);
  return m;
}

SymMatrix SymMatrix::outer(std::span<const double> v, double weight) {
  SymMatrix m(static_cast<int>(v.size()));
  for (int i = 0; i < m.dim(); ++i)
    for (int j = 0; j <= i; ++j) m.set(i, j, weight * v[i] * v[j]);
  return m;
}

void SymMatrix::set(int i, int j, double v) {
  a_[i * S + j] = v;
  a_[j * S + i] = v;
}

double SymMatrix::trace() const {
  double t = 0.0;
  for (int i = 0; i < dim_; ++i) t += (*this)(i, i);
  return t;
}

double SymMatrix::frobenius_norm() const {
  double s = 0.0;
  for (int i = 0; i < dim_; ++i)
    for (int j = 0; j < dim_; ++j) s += (*this)(i, j) * (*this)(i, j);
  return std::sqrt(s);
}

double SymMatrix::quadratic_form(std::span<const double> x) const {
  double s = 0.0;
  for (int i = 0; i < dim_; ++i)
    for (int j = 0; j < dim_; ++j) s += (*this)(i, j) * x[i] * x[j];
  return s;
}

SymMatrix SymMatrix::operator+(const SymMatrix& o) const {
  if (o.dim_ != dim_) throw std::invalid_argument("dimension mismatch");
  SymMatrix r(dim_);
  for (int i = 0; i < dim_; ++i)
    for (int j = 0; j <= i; ++j) r.set(i, j, (*this)(i, j) + o(i, j));
  return r;
}

SymMatrix SymMatrix::operator-(const SymMatrix& o) const { return *this + (-o); }

SymMatrix SymMatrix::operator-() const { return *this * -1.0; }

SymMatrix SymMatrix::operator*(double t) const {
  SymMatrix r(dim_);
  for (int i = 0; i < dim_; ++i)
    for (int j = 0; j <= i; ++j) r.set(i, j, t * (*this)(i, j));
  return r;
}

SymMatrix SymMatrix::congruence(std::span<const double> q) const {
  const int n = dim_;
  if (q.size() != static_cast<std::size_t>(n) * n) throw std::invalid_argument("Q must be dim x dim");
  SymMatrix r(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j) {
      double s = 0.0;
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) s += q[i * n + a] * (*this)(a, b) * q[j * n + b];
      r.set(i, j, s);
    }
  return r;
}

// Cyclic Jacobi rotations, stopping once the off-diagonal mass is below
// 1e-14 of the Frobenius norm.
EigenDecomposition eigen_decompose(const SymMatrix& m) {
  const int n = m.dim();
  std::array<double, S * S> a{};
  std::array<double, S * S> v{};
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) a[i * S + j] = m(i, j);
    v[i * S + i] = 1.0;
  }
  const double norm = m.frobenius_norm();
  auto off = [&] {
    double s = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (i != j) s += a[i * S + j] * a[i * S + j];
    return std::sqrt(s);
  };

  for (int sweep = 0; sweep < 100 && norm > 0.0 && off() >= 1e-14 * norm; ++sweep) {
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const double apq = a[p * S + q];
        if (apq == 0.0) continue;
        const double theta = (a[q * S + q] - a[p * S + p]) / (2.0 * apq);
        const double t = std::copysign(1.0, theta) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int r = 0; r < n; ++r) {
          const double arp = a[r * S + p];
          const double arq = a[r * S + q];
          a[r * S + p] = c * arp - s * arq;
          a[r * S + q] = s * arp + c * arq;
        }
        for (int r = 0; r < n; ++r) {
          const double apr = a[p * S + r];
          const double aqr = a[q * S + r];
          a[p * S + r] = c * apr - s * aqr;
          a[q * S + r] = s * apr + c * aqr;
        }
        for (int r = 0; r < n; ++r) {
          const double vrp = v[r * S + p];
          const double vrq = v[r * S + q];
          v[r * S + p] = c * vrp - s * vrq;
          v[r * S + q] = s * vrp + c * vrq;
        }
      }
    }
  }

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int i, int j) { return a[i * S + i] < a[j * S + j]; });
  EigenDecomposition out;
  for (int idx : order) {
    out.values.push_back(a[idx * S + idx]);
    std::vector<double> col(n);
    for (int r = 0; r < n; ++r) col[r] = v[r * S + idx];
    out.vectors.push_back(std::move(col));
  }
  return out;
}

std::vector<double> eigenvalues_sorted(const SymMatrix& m) { return eigen_decompose(m).values; }

double pk_plus(const SymMatrix& m, int k) {
  check_k(k, m.dim());
  const auto ev = eigenvalues_sorted(m);
  return std::accumulate(ev.end() - k, ev.end(), 0.0);
}

double pk_minus(const SymMatrix& m, int k) {
  check_k(k, m.dim());
  const auto ev = eigenvalues_sorted(m);
  return std::accumulate(ev.begin(), ev.begin() + k, 0.0);
}

double pk(const SymMatrix& m, int k, Side side) {
  return side == Side::plus ? pk_plus(m, k) : pk_minus(m, k);
}

double frame_sum(const SymMatrix& m, const std::vector<std::vector<double>>& frame) {
  const int n = m.dim();
  for (std::size_t i = 0; i < frame.size(); ++i) {
    if (frame[i].size() != static_cast<std::size_t>(n))
      throw std::invalid_argument("frame vector has wrong dimension");
    for (std::size_t j = 0; j <= i; ++j) {
      double dot = 0.0;
      for (int r = 0; r < n; ++r) dot += frame[i][r] * frame[j][r];
      if (std::abs(dot - (i == j ? 1.0 : 0.0)) > 1e-10)
        throw std::invalid_argument("frame is not orthonormal");
    }
  }
  double s = 0.0;
  for (const auto& xi : frame) s += m.quadratic_form(xi);
  return s;
}

double pk_radial(const RadialHessian& h, int k, Side side) {
  if (!(h.r > 0.0)) throw std::invalid_argument("radial Hessian needs r > 0");
  check_k(k, h.dim);
  std::vector<double> ev(h.dim, h.gp / h.r);
  ev[0] = h.gpp;
  std::stable_sort(ev.begin(), ev.end());
  if (side == Side::plus) return std::accumulate(ev.end() - k, ev.end(), 0.0);
  return std::accumulate(ev.begin(), ev.begin() + k, 0.0);
}

}  // namespace trunclap
