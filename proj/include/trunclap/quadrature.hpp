#pragma once

#include <functional>
#include <vector>

namespace trunclap {

using ScalarFn = std::function<double(double)>;

// Adaptive Simpson with an absolute tolerance; recursion stops at max_depth.
double adaptive_simpson(const ScalarFn& f, double a, double b, double tol = 1e-12,
                        int max_depth = 40);

// x -> integral of f over [a, x], backed by per-cell prefix sums so that an
// evaluation costs one partial-cell quadrature.
class CumulativeIntegral {
 public:
  CumulativeIntegral() = default;
  CumulativeIntegral(ScalarFn f, double a, double b, int cells = 64, double tol = 1e-13);

  double operator()(double x) const;
  double total() const { return prefix_.empty() ? 0.0 : prefix_.back(); }
  double lower() const { return a_; }
  double upper() const { return b_; }

 private:
  ScalarFn f_;
  double a_ = 0.0;
  double b_ = 0.0;
  double tol_ = 1e-13;
  std::vector<double> nodes_;
  std::vector<double> prefix_;
};

// Smallest x in (lo, hi] with f(x) >= 0, assuming f < 0 just right of lo:
// uniform scan of `cells` cells, then bisection to `xtol`. NaN if none found.
double first_nonnegative(const ScalarFn& f, double lo, double hi, int cells = 1000,
                         double xtol = 1e-12);

double bisect_root(const ScalarFn& f, double lo, double hi, double xtol = 1e-12);

}  // namespace trunclap
