#include <doctest.h>

#include <random>

#include "oracles/oracles.hpp"
#include "trunclap/matrix.hpp"
#include "trunclap/random_matrices.hpp"

using namespace trunclap;

namespace {

oracle::Mat dense(const SymMatrix& m) {
  oracle::Mat a(m.dim(), m.dim());
  for (int i = 0; i < m.dim(); ++i)
    for (int j = 0; j < m.dim(); ++j) a(i, j) = m(i, j);
  return a;
}

}  // namespace

TEST_CASE("eigenvalues agree with inertia bisection") {
  std::mt19937_64 rng(7);
  for (int n = 1; n <= kMaxMatrixDim; ++n)
    for (int s = 0; s < 20; ++s) {
      const SymMatrix m = random_symmetric(n, rng, 3.0);
      const auto got = eigenvalues_sorted(m);
      const auto want = oracle::eigenvalues(dense(m));
      for (int i = 0; i < n; ++i) CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-12).scale(10.0));
    }
}

TEST_CASE("eigenvectors reconstruct the matrix") {
  std::mt19937_64 rng(8);
  const SymMatrix m = random_symmetric(5, rng);
  const auto ed = eigen_decompose(m);
  for (int i = 0; i < 5; ++i) {
    const double q = m.quadratic_form(ed.vectors[i]);
    CHECK(q == doctest::Approx(ed.values[i]).epsilon(1e-12).scale(1.0));
  }
}

TEST_CASE("truncated sums match the oracle for every k") {
  std::mt19937_64 rng(9);
  for (int n = 2; n <= 6; ++n) {
    const SymMatrix m = random_symmetric(n, rng);
    for (int k = 1; k <= n; ++k) {
      CHECK(pk_plus(m, k) == doctest::Approx(oracle::pk_plus(dense(m), k)).scale(1.0).epsilon(1e-12));
      CHECK(pk_minus(m, k) == doctest::Approx(oracle::pk_minus(dense(m), k)).scale(1.0).epsilon(1e-12));
    }
    CHECK(pk_plus(m, n) == doctest::Approx(m.trace()).scale(1.0).epsilon(1e-12));
  }
}

TEST_CASE("diagonal examples") {
  const double d[3] = {3.0, -1.0, 2.0};
  const SymMatrix m = SymMatrix::diagonal(d);
  CHECK(pk_plus(m, 1) == 3.0);
  CHECK(pk_plus(m, 2) == 5.0);
  CHECK(pk_minus(m, 1) == -1.0);
  CHECK(pk_minus(m, 2) == 1.0);
  CHECK(pk(m, 2, Side::minus) == 1.0);
  CHECK(pk_plus(SymMatrix(4), 2) == 0.0);
}

TEST_CASE("operator properties on random samples") {
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> t_dist(0.0, 10.0);
  for (int s = 0; s < 1000; ++s) {
    const int n = 2 + s % 4;
    const int k = 1 + s % n;
    const SymMatrix m = random_symmetric(n, rng);
    const SymMatrix p = random_psd(n, rng);
    const double tol = 1e-12 * (1.0 + m.frobenius_norm() + p.frobenius_norm());
    CHECK(pk_plus(m + p, k) >= pk_plus(m, k) - tol);
    CHECK(pk_minus(m, k) == doctest::Approx(-pk_plus(-m, k)).scale(1.0).epsilon(1e-12));
    const double t = t_dist(rng);
    CHECK(pk_plus(m * t, k) == doctest::Approx(t * pk_plus(m, k)).scale(1.0).epsilon(1e-12));
    CHECK(pk_plus(m + p, k) <= pk_plus(m, k) + pk_plus(p, k) + tol);
    CHECK(pk_minus(m + p, k) >= pk_minus(m, k) + pk_minus(p, k) - tol);
    const auto q = random_orthogonal(n, rng);
    CHECK(pk_plus(m.congruence(q), k) == doctest::Approx(pk_plus(m, k)).scale(1.0).epsilon(1e-12));
    CHECK(frame_sum(m, random_frame(n, k, rng)) <= pk_plus(m, k) + tol);
  }
}

TEST_CASE("frame sum over top eigenvectors attains pk_plus") {
  std::mt19937_64 rng(11);
  const SymMatrix m = random_symmetric(4, rng);
  const auto ed = eigen_decompose(m);
  std::vector<std::vector<double>> frame = {ed.vectors[3], ed.vectors[2]};
  CHECK(frame_sum(m, frame) == doctest::Approx(pk_plus(m, 2)).epsilon(1e-12));
}

TEST_CASE("radial Hessian shortcut equals the matrix form") {
  // g(r) = r^3 - 2 r: g' = 3r^2 - 2, g'' = 6r
  for (int dim = 2; dim <= 4; ++dim)
    for (double r : {0.3, 0.9, 1.4}) {
      RadialHessian h{3 * r * r - 2, 6 * r, r, dim};
      std::vector<double> diag(dim, h.gp / r);
      diag[0] = h.gpp;
      const SymMatrix m = SymMatrix::diagonal(diag);
      for (int k = 1; k <= dim; ++k) {
        CHECK(pk_radial(h, k, Side::plus) == doctest::Approx(pk_plus(m, k)));
        CHECK(pk_radial(h, k, Side::minus) == doctest::Approx(pk_minus(m, k)));
      }
    }
}

TEST_CASE("input validation") {
  CHECK_THROWS(SymMatrix(0));
  CHECK_THROWS(SymMatrix(kMaxMatrixDim + 1));
  const SymMatrix m = SymMatrix::identity(3);
  CHECK_THROWS(pk_plus(m, 0));
  CHECK_THROWS(pk_plus(m, 4));
  CHECK_THROWS(frame_sum(m, {{1.0, 0.0, 0.0}, {1.0, 0.0, 0.0}}));
}
