#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "trunclap/geometry.hpp"

namespace trunclap::detail {

// Direction on the unit circle/sphere maximizing f: dense sampling followed by
// local refinement of the best few samples.
std::pair<double, Vec> maximize_over_sphere(int dim, const std::function<double(const Vec&)>& f,
                                            int samples = 0);

std::vector<Vec> sphere_lattice(int dim, int count);

// Orthonormal basis of the complement of a unit vector (columns).
Mat orthonormal_complement(const Vec& nu);

struct EllipsoidResult {
  Vec x;
  double value = 0.0;
  int iterations = 0;
};

// Central-cut ellipsoid method for a convex function given value and subgradient,
// restricted to the box [lo, hi]. Stops when the certified gap is below tol.
EllipsoidResult ellipsoid_minimize(const std::function<double(const Vec&, Vec&)>& f, const Vec& start,
                                   double radius, const Vec& lo, const Vec& hi, double tol,
                                   int max_iterations);

}  // namespace trunclap::detail
