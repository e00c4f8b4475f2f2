#pragma once

#include <random>
#include <vector>

#include "trunclap/matrix.hpp"

namespace trunclap {

// Entries N(0, scale^2), symmetrized.
SymMatrix random_symmetric(int dim, std::mt19937_64& rng, double scale = 1.0);
// G G^T with Gaussian G.
SymMatrix random_psd(int dim, std::mt19937_64& rng, double scale = 1.0);
// Haar-distributed orthogonal matrix, row-major.
std::vector<double> random_orthogonal(int dim, std::mt19937_64& rng);
// k orthonormal vectors of length dim.
std::vector<std::vector<double>> random_frame(int dim, int k, std::mt19937_64& rng);

}  // namespace trunclap
