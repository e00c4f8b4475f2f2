#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "trunclap/matrix.hpp"
#include "trunclap/quadrature.hpp"

namespace trunclap {

// Radial drift b(r) on [0, R] for the operator P_k^+ + b(r)|Du| in dimension N.
struct DriftCoefficient {
  bool is_constant = true;
  double constant = 0.0;
  ScalarFn b;
  ScalarFn db;  // optional; central differences when empty
  double R = 1.0;
  int k = 1;
  int N = 2;

  static DriftCoefficient make_constant(double b, double R, int k, int N = 0);
  static DriftCoefficient make_callable(ScalarFn b, ScalarFn db, double R, int k, int N = 0);

  double value(double r) const;
  double derivative(double r) const;
  // (r b(r))'
  double rb_prime(double r) const { return value(r) + r * derivative(r); }
};

enum class Regime {
  const_b,
  minus_b,
  critical_eigen,
  weighted_glued,
  weighted_first_order,
  weighted_second_order,
  weighted_reversed,
  weighted_eigen,
};

std::string regime_name(Regime r);

class RadialProfile {
 public:
  Regime regime = Regime::const_b;
  double R = 1.0;
  double mu = 0.0;  // eigen regimes
  double a = 0.0;   // eigen regimes: value at the origin
  std::vector<double> glue_radii;
  bool boundary_vanishing = false;  // weighted eigen: divergent integral certifies phi(R) = 0

  ScalarFn g;
  ScalarFn dg;
  ScalarFn d2g;
  // true where the profile solves the first-order relation k g'/r + ... (g'' <= g'/r)
  std::function<bool(double)> first_order_at;

  double value(double r) const { return g(r); }
  double first(double r) const { return dg(r); }
  double second(double r) const { return d2g(r); }
  std::string segment_name(double r) const;
};

// Eq. (g): g(r) = (r-R)/b + k/b^2 log((k-br)/(k-bR)); b = 0 gives (R^2-r^2)/(2k).
RadialProfile profile_const_b(double b, double R, int k);

// Drift entering with the minus sign: g'' + (k-1)g'/r + b g' = -1, g(R) = 0.
RadialProfile profile_minus_b(double b, double R, int k);

// Auxiliary a(r) >= 0 of the minus-sign construction, scaled by r^-k.
double minus_b_auxiliary(double b, double r, int k);

// Smallest r < R with r b(r) = k, or R when r b(r) < k throughout.
double r0_threshold(const DriftCoefficient& c);

struct IntegralTestResult {
  bool finite = true;
  double value = 0.0;        // integral of r/(k - r b(r)) over [0, R0] when finite
  double r0_threshold = 0.0;  // R0
  double monotonicity_radius = 0.0;  // r0 of the monotonicity hypothesis
  std::vector<double> shell_increments;
};

// Locates r0 with (r - r0)(r b)' >= 0 (or <= 0 when reversed) on (0, R).
// Throws HypothesisViolation when no such r0 exists.
double monotonicity_radius(const DriftCoefficient& c, bool reversed = false);

IntegralTestResult integral_test(const DriftCoefficient& c);

// Solution of P_k^+(D^2u) + b(|x|)|Du| = -1 in B_R under (r - r0)(r b)' >= 0.
RadialProfile profile_weighted(const DriftCoefficient& c);

// Same equation under the reversed hypothesis (r - r0)(r b)' <= 0.
RadialProfile profile_weighted_reversed(const DriftCoefficient& c);

// phi_{mu,a}(r) = a (1 - r/R)^{mu R^2/k} exp(mu R r / k), valid for 0 < mu <= k/R^2.
RadialProfile critical_eigen_profile(double mu, double a, double R, int k);
// Same formula without the range check, for detecting where it stops being a solution.
RadialProfile critical_eigen_formula(double mu, double a, double R, int k);

// phi(r) = phi0 exp(-mu * integral_0^r s/(k - s b(s)) ds) when R b(R) = k.
RadialProfile weighted_eigen_profile(const DriftCoefficient& c, double mu, double phi0 = 1.0);

// max over sampled radii of |P_k^+(radial Hessian) + sign b(r)|g'| - rhs(r)|.
double radial_residual(const RadialProfile& p, const DriftCoefficient& c, const ScalarFn& rhs,
                       Side sign_b, int samples = 1000);

}  // namespace trunclap
