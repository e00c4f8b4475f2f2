#include "trunclap/radial.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <stdexcept>

#include "trunclap/errors.hpp"

namespace trunclap {

namespace {

constexpr double kQuadTol = 1e-12;

void check_basic(double R, int k) {
  if (!(R > 0.0)) throw std::invalid_argument("radius must be positive");
  if (k < 1) throw std::invalid_argument("k must be at least 1");
}

// B(r) = integral_0^r b, analytic for constant drift.
ScalarFn antiderivative(const DriftCoefficient& c) {
  if (c.is_constant) {
    const double b = c.constant;
    return [b](double r) { return b * r; };
  }
  auto table = std::make_shared<CumulativeIntegral>(
      [c](double s) { return c.value(s); }, 0.0, c.R, 64, 1e-14);
  return [table](double r) { return (*table)(r); };
}

// -r * integral_0^1 exp(B(r) - B(rt)) t^{k-1} dt, i.e. the h1 of the second-order
// regime written without the 0/0 at the origin.
double h1_scaled(const ScalarFn& B, double r, int k) {
  if (r == 0.0) return 0.0;
  const double Br = B(r);
  const auto inner = [&](double t) { return std::exp(Br - B(r * t)) * std::pow(t, k - 1); };
  return -r * adaptive_simpson(inner, 0.0, 1.0, kQuadTol);
}

// a(r) / r^k = (k - r b(r)) integral_0^1 e^{-B(rt)} t^{k-1} dt - e^{-B(r)}
double weighted_auxiliary(const DriftCoefficient& c, const ScalarFn& B, double r) {
  const int k = c.k;
  const auto inner = [&](double t) { return std::exp(-B(r * t)) * std::pow(t, k - 1); };
  return (k - r * c.value(r)) * adaptive_simpson(inner, 0.0, 1.0, kQuadTol) - std::exp(-B(r));
}

struct TailResult {
  bool finite = true;
  double value = 0.0;
  std::vector<double> increments;
};

// Integral of f over [end - eps, end) toward a possibly singular endpoint using
// dyadic shells; divergent when increments fail to contract below 0.9 over
// ten successive shells.
TailResult singular_tail(const ScalarFn& f, double end, double eps) {
  TailResult out;
  int stalled = 0;
  double prev = 0.0;
  for (int n = 1; n <= 40; ++n) {
    const double lo = end - eps * std::ldexp(1.0, -(n - 1));
    const double hi = end - eps * std::ldexp(1.0, -n);
    const double d = adaptive_simpson(f, lo, hi, kQuadTol);
    out.increments.push_back(d);
    out.value += d;
    if (n > 1) {
      const double ratio = prev != 0.0 ? d / prev : 0.0;
      stalled = ratio >= 0.9 ? stalled + 1 : 0;
      if (stalled >= 10) {
        out.finite = false;
        out.value = std::numeric_limits<double>::infinity();
        return out;
      }
      if (std::abs(d) < 1e-15) return out;
      if (n == 40 && ratio < 0.9) out.value += d * ratio / (1.0 - ratio);
    }
    prev = d;
  }
  return out;
}

double first_order_integrand(const DriftCoefficient& c, double s) {
  return s / (c.k - s * c.value(s));
}

double first_order_second_derivative(const DriftCoefficient& c, double r) {
  const double q = c.k - r * c.value(r);
  return -1.0 / q - r * c.rb_prime(r) / (q * q);
}

}  // namespace

DriftCoefficient DriftCoefficient::make_constant(double b, double R, int k, int N) {
  check_basic(R, k);
  DriftCoefficient c;
  c.is_constant = true;
  c.constant = b;
  c.R = R;
  c.k = k;
  c.N = N > 0 ? N : k + 1;
  return c;
}

DriftCoefficient DriftCoefficient::make_callable(ScalarFn b, ScalarFn db, double R, int k, int N) {
  check_basic(R, k);
  if (!b) throw std::invalid_argument("drift callable is empty");
  DriftCoefficient c;
  c.is_constant = false;
  c.b = std::move(b);
  c.db = std::move(db);
  c.R = R;
  c.k = k;
  c.N = N > 0 ? N : k + 1;
  return c;
}

double DriftCoefficient::value(double r) const { return is_constant ? constant : b(r); }

double DriftCoefficient::derivative(double r) const {
  if (is_constant) return 0.0;
  if (db) return db(r);
  const double step = 1e-6 * std::max(R, 1e-3);
  const double lo = std::max(0.0, r - step);
  const double hi = std::min(R, r + step);
  return (b(hi) - b(lo)) / (hi - lo);
}

std::string regime_name(Regime r) {
  switch (r) {
    case Regime::const_b: return "const_b";
    case Regime::minus_b: return "minus_b";
    case Regime::critical_eigen: return "critical_eigen";
    case Regime::weighted_glued: return "weighted_glued";
    case Regime::weighted_first_order: return "weighted_first_order";
    case Regime::weighted_second_order: return "weighted_second_order";
    case Regime::weighted_reversed: return "weighted_reversed";
    case Regime::weighted_eigen: return "weighted_eigen";
  }
  return "unknown";
}

std::string RadialProfile::segment_name(double r) const {
  const std::string base = regime_name(regime);
  if (!first_order_at) return base;
  return base + (first_order_at(r) ? ":first_order" : ":second_order");
}

RadialProfile profile_const_b(double b, double R, int k) {
  check_basic(R, k);
  if (b < 0.0) throw std::invalid_argument("profile_const_b expects b >= 0");
  if (b * R >= k) throw NonexistenceThreshold("bR>=k", kBallThresholdCitation, R);

  RadialProfile p;
  p.regime = Regime::const_b;
  p.R = R;
  const double kk = k;
  if (b * R / kk < 0.1) {
    // integral_r^R s/(k - b s) ds expanded in powers of b/k
    p.g = [b, R, kk](double r) {
      double sum = 0.0;
      double coeff = 1.0 / kk;
      double Rp = R * R;
      double rp = r * r;
      for (int n = 0; n < 60; ++n) {
        const double term = coeff * (Rp - rp) / (n + 2);
        sum += term;
        if (std::abs(term) < 1e-18 * std::abs(sum)) break;
        coeff *= b / kk;
        Rp *= R;
        rp *= r;
      }
      return sum;
    };
  } else {
    p.g = [b, R, kk](double r) {
      return (r - R) / b + kk / (b * b) * (std::log1p(-b * r / kk) - std::log1p(-b * R / kk));
    };
  }
  p.dg = [b, kk](double r) { return -r / (kk - b * r); };
  p.d2g = [b, kk](double r) { return -kk / ((kk - b * r) * (kk - b * r)); };
  p.first_order_at = [](double) { return true; };
  return p;
}

double minus_b_auxiliary(double b, double r, int k) {
  const auto inner = [&](double t) { return std::exp(-b * r * (1.0 - t)) * std::pow(t, k - 1); };
  // a(r) e^{-br} / r^k = (k + br) integral_0^1 e^{-br(1-t)} t^{k-1} dt - 1
  return (k + b * r) * adaptive_simpson(inner, 0.0, 1.0, kQuadTol) - 1.0;
}

RadialProfile profile_minus_b(double b, double R, int k) {
  check_basic(R, k);
  if (!(b > 0.0)) throw std::invalid_argument("profile_minus_b expects b > 0");
  const ScalarFn B = [b](double r) { return -b * r; };
  const ScalarFn h = [B, k](double r) { return h1_scaled(B, r, k); };
  auto minus_h = std::make_shared<CumulativeIntegral>([h](double s) { return -h(s); }, 0.0, R, 64);

  RadialProfile p;
  p.regime = Regime::minus_b;
  p.R = R;
  p.g = [minus_h](double r) { return minus_h->total() - (*minus_h)(r); };
  p.dg = h;
  p.d2g = [h, b, k, R](double r) {
    if (r < 1e-6 * R) return -1.0 / k;
    const double hr = h(r);
    return -1.0 - (k - 1) * hr / r - b * hr;
  };
  p.first_order_at = [](double) { return false; };
  return p;
}

double r0_threshold(const DriftCoefficient& c) {
  if (c.is_constant) return c.constant > 0.0 ? std::min(c.k / c.constant, c.R) : c.R;
  const ScalarFn f = [&c](double r) { return r * c.value(r) - c.k; };
  // roots at r = R itself do not count
  const double r = first_nonnegative(f, 0.0, c.R, 1000, 1e-12);
  if (std::isnan(r) || r >= c.R) return c.R;
  return r;
}

double monotonicity_radius(const DriftCoefficient& c, bool reversed) {
  constexpr int n = 1000;
  constexpr double tol = 1e-10;
  const double sgn = reversed ? -1.0 : 1.0;
  const auto p = [&](double r) { return sgn * c.rb_prime(r); };
  std::vector<double> rs(n - 1), ps(n - 1);
  int last_negative = -1;
  for (int i = 1; i < n; ++i) {
    rs[i - 1] = c.R * i / n;
    ps[i - 1] = p(rs[i - 1]);
    if (ps[i - 1] < -tol) last_negative = i - 1;
  }
  if (last_negative < 0) return 0.0;
  for (int i = 0; i < last_negative; ++i)
    if (ps[i] > tol)
      throw HypothesisViolation("(r b(r))' changes sign more than once; no admissible r0");
  if (last_negative == n - 2) return c.R;
  return bisect_root(p, rs[last_negative], rs[last_negative + 1], 1e-12);
}

IntegralTestResult integral_test(const DriftCoefficient& c) {
  IntegralTestResult out;
  out.monotonicity_radius = monotonicity_radius(c, false);
  const double R0 = r0_threshold(c);
  out.r0_threshold = R0;
  const ScalarFn f = [&c](double s) { return first_order_integrand(c, s); };
  const bool singular = R0 < c.R || c.k - R0 * c.value(R0) <= 1e-9 * c.k;
  if (!singular) {
    out.value = adaptive_simpson(f, 0.0, R0, kQuadTol);
    return out;
  }
  const double eps = 0.5 * R0;
  const TailResult tail = singular_tail(f, R0, eps);
  out.shell_increments = tail.increments;
  out.finite = tail.finite;
  out.value = tail.finite ? adaptive_simpson(f, 0.0, R0 - eps, kQuadTol) + tail.value
                          : std::numeric_limits<double>::infinity();
  return out;
}

RadialProfile profile_weighted(const DriftCoefficient& c) {
  const IntegralTestResult test = integral_test(c);
  if (!test.finite)
    throw NonexistenceThreshold("int r/(k-rb)=inf", kDivergentIntegralCitation, test.r0_threshold);
  if (test.r0_threshold < c.R)
    throw NonexistenceThreshold("R0<R", "r b(r) reaches k inside the ball", test.r0_threshold);

  const int k = c.k;
  const double R = c.R;
  const ScalarFn B = antiderivative(c);
  const auto aux = [&c, B](double r) { return weighted_auxiliary(c, B, r); };

  // sign scan of a(r) over 1e3 cells
  constexpr int cells = 1000;
  std::vector<double> av(cells + 1);
  bool any_negative = false;
  int last_nonneg = 0;
  for (int i = 1; i <= cells; ++i) {
    av[i] = aux(R * i / cells);
    if (av[i] < -1e-14)
      any_negative = true;
    else
      last_nonneg = i;
  }

  RadialProfile p;
  p.R = R;
  auto g2_table = std::make_shared<CumulativeIntegral>(
      [c](double s) { return first_order_integrand(c, s); }, 0.0, R, 64);
  const ScalarFn g2 = [g2_table](double r) { return g2_table->total() - (*g2_table)(r); };
  const ScalarFn g2p = [c](double r) { return -r / (c.k - r * c.value(r)); };
  const ScalarFn g2pp = [c](double r) { return first_order_second_derivative(c, r); };
  const ScalarFn h1 = [B, k](double r) { return h1_scaled(B, r, k); };
  const ScalarFn h1p = [h1, c](double r) {
    if (r < 1e-6 * c.R) return -1.0 / c.k;
    const double h = h1(r);
    return -1.0 - (c.k - 1) * h / r + c.value(r) * h;
  };

  if (!any_negative) {
    auto H = std::make_shared<CumulativeIntegral>(h1, 0.0, R, 64);
    p.regime = Regime::weighted_second_order;
    p.g = [H](double r) { return (*H)(r) - H->total(); };
    p.dg = h1;
    p.d2g = h1p;
    p.first_order_at = [](double) { return false; };
    return p;
  }
  if (last_nonneg == 0) {
    p.regime = Regime::weighted_first_order;
    p.g = g2;
    p.dg = g2p;
    p.d2g = g2pp;
    p.first_order_at = [](double) { return true; };
    return p;
  }

  const double rbar = last_nonneg == cells
                          ? R
                          : bisect_root(aux, R * last_nonneg / cells, R * (last_nonneg + 1) / cells, 1e-12);
  for (int i = 1; i <= 100; ++i) {
    const double r = rbar + (R - rbar) * i / 101.0;
    if (aux(r) >= 1e-14) throw HypothesisViolation("a(r) does not stay negative right of the glue radius");
  }
  auto H = std::make_shared<CumulativeIntegral>(h1, 0.0, rbar, 64);
  const double shift = g2(rbar);
  p.regime = Regime::weighted_glued;
  p.glue_radii = {rbar};
  p.g = [=](double r) { return r > rbar ? g2(r) : (*H)(r) - H->total() + shift; };
  p.dg = [=](double r) { return r > rbar ? g2p(r) : h1(r); };
  p.d2g = [=](double r) { return r > rbar ? g2pp(r) : h1p(r); };
  p.first_order_at = [rbar](double r) { return r > rbar; };
  return p;
}

RadialProfile profile_weighted_reversed(const DriftCoefficient& c) {
  const double r0 = monotonicity_radius(c, true);
  const int k = c.k;
  const double R = c.R;
  for (int i = 0; i <= 1000; ++i) {
    const double r = r0 * i / 1000.0;
    if (k - r * c.value(r) <= 0.0) throw HypothesisViolation("k - r b(r) must stay positive on [0, r0]");
  }
  const ScalarFn B = antiderivative(c);

  RadialProfile p;
  p.regime = Regime::weighted_reversed;
  p.R = R;
  const ScalarFn g1p = [c](double r) { return -r / (c.k - r * c.value(r)); };
  const ScalarFn g1pp = [c](double r) { return first_order_second_derivative(c, r); };

  if (r0 >= R) {
    auto F = std::make_shared<CumulativeIntegral>(
        [c](double s) { return first_order_integrand(c, s); }, 0.0, R, 64);
    p.g = [F](double r) { return F->total() - (*F)(r); };
    p.dg = g1p;
    p.d2g = g1pp;
    p.first_order_at = [](double) { return true; };
    return p;
  }

  const double c2 =
      r0 > 0.0 ? std::pow(r0, k) * std::exp(-B(r0)) / (k - r0 * c.value(r0)) : 0.0;
  auto K = std::make_shared<CumulativeIntegral>(
      [B, k](double t) { return std::exp(-B(t)) * std::pow(t, k - 1); }, r0, R, 64);
  // q(s) = -g2'(s) = e^{B(s)} s^{1-k} (K(s) + c2)
  const ScalarFn q = [B, K, c2, k, r0](double s) {
    if (s <= 0.0) return 0.0;
    if (r0 == 0.0) return -h1_scaled(B, s, k);
    return std::exp(B(s)) * std::pow(s, 1 - k) * ((*K)(s) + c2);
  };
  auto Q = std::make_shared<CumulativeIntegral>(q, r0, R, 64);
  const ScalarFn g2 = [Q](double r) { return Q->total() - (*Q)(r); };
  const ScalarFn g2p = [q](double r) { return -q(r); };
  const ScalarFn g2pp = [q, c](double r) {
    if (r < 1e-6 * c.R) return -1.0 / c.k;
    const double gp = -q(r);
    return -1.0 - (c.k - 1) * gp / r + c.value(r) * gp;
  };

  if (r0 <= 0.0) {
    p.g = g2;
    p.dg = g2p;
    p.d2g = g2pp;
    p.first_order_at = [](double) { return false; };
    return p;
  }

  auto F = std::make_shared<CumulativeIntegral>(
      [c](double s) { return first_order_integrand(c, s); }, 0.0, r0, 64);
  const double c1 = F->total() + g2(r0);
  p.glue_radii = {r0};
  p.g = [=](double r) { return r <= r0 ? c1 - (*F)(r) : g2(r); };
  p.dg = [=](double r) { return r <= r0 ? g1p(r) : g2p(r); };
  p.d2g = [=](double r) { return r <= r0 ? g1pp(r) : g2pp(r); };
  p.first_order_at = [r0](double r) { return r <= r0; };
  return p;
}

RadialProfile critical_eigen_formula(double mu, double a, double R, int k) {
  check_basic(R, k);
  RadialProfile p;
  p.regime = Regime::critical_eigen;
  p.R = R;
  p.mu = mu;
  p.a = a;
  const double e = mu * R * R / k;
  const double s = mu * R / k;
  p.g = [=](double r) { return r >= R ? 0.0 : a * std::pow(1.0 - r / R, e) * std::exp(s * r); };
  p.dg = [=](double r) {
    if (r >= R) return 0.0;
    return -s * r / (R - r) * a * std::pow(1.0 - r / R, e) * std::exp(s * r);
  };
  p.d2g = [=](double r) {
    if (r >= R) return 0.0;
    const double phi = a * std::pow(1.0 - r / R, e) * std::exp(s * r);
    const double dphi = -s * r / (R - r) * phi;
    return -s * (R / ((R - r) * (R - r)) * phi + r / (R - r) * dphi);
  };
  p.first_order_at = [](double) { return true; };
  return p;
}

RadialProfile critical_eigen_profile(double mu, double a, double R, int k) {
  check_basic(R, k);
  if (!(mu > 0.0)) throw std::invalid_argument("mu must be positive");
  if (!(a > 0.0)) throw std::invalid_argument("a must be positive");
  if (mu > k / (R * R) * (1.0 + 1e-12))
    throw RangeError("mu > k/R^2: phi'' <= phi'/r fails near the boundary");
  return critical_eigen_formula(mu, a, R, k);
}

RadialProfile weighted_eigen_profile(const DriftCoefficient& c, double mu, double phi0) {
  const int k = c.k;
  const double R = c.R;
  double l = std::numeric_limits<double>::infinity();
  for (int i = 1; i < 1000; ++i) {
    const double r = R * i / 1000.0;
    l = std::min(l, c.rb_prime(r) / r);
  }
  if (!(l > 0.0)) throw HypothesisViolation("inf (r b)'/r must be positive");
  if (std::abs(R * c.value(R) - k) > 1e-9) throw HypothesisViolation("R b(R) must equal k");
  if (mu < 0.0 || mu > l * (1.0 + 1e-9)) throw HypothesisViolation("mu must lie in [0, l]");

  const ScalarFn f = [c](double s) { return first_order_integrand(c, s); };
  const double cut = 0.5 * R;
  const TailResult tail = singular_tail(f, R, R - cut);
  auto I = std::make_shared<CumulativeIntegral>(f, 0.0, cut, 64);
  const double Icut = I->total();
  const ScalarFn integral = [=](double r) {
    if (r <= cut) return (*I)(r);
    return Icut + adaptive_simpson(f, cut, r, kQuadTol);
  };

  RadialProfile p;
  p.regime = Regime::weighted_eigen;
  p.R = R;
  p.mu = mu;
  p.a = phi0;
  p.boundary_vanishing = !tail.finite;
  const double phiR = tail.finite ? phi0 * std::exp(-mu * (Icut + tail.value)) : 0.0;
  p.g = [=](double r) { return r >= R ? phiR : phi0 * std::exp(-mu * integral(r)); };
  p.dg = [=](double r) {
    if (r >= R) return 0.0;
    return -mu * first_order_integrand(c, r) * phi0 * std::exp(-mu * integral(r));
  };
  p.d2g = [=](double r) {
    if (r >= R) return 0.0;
    const double phi = phi0 * std::exp(-mu * integral(r));
    const double w = first_order_integrand(c, r);
    // w' = -first_order_second_derivative
    return mu * first_order_second_derivative(c, r) * phi + mu * mu * w * w * phi;
  };
  p.first_order_at = [](double) { return true; };
  return p;
}

double radial_residual(const RadialProfile& p, const DriftCoefficient& c, const ScalarFn& rhs,
                       Side sign_b, int samples) {
  const double R = p.R;
  const double lo = 1e-3 * R;
  const double hi = R - 1e-3 * R;
  const double sgn = sign_b == Side::plus ? 1.0 : -1.0;
  double worst = 0.0;
  for (int i = 0; i < samples; ++i) {
    const double r = samples == 1 ? lo : lo + (hi - lo) * i / (samples - 1);
    bool skip = false;
    for (double rg : p.glue_radii)
      if (std::abs(r - rg) < 1e-3 * R) skip = true;
    if (skip) continue;
    const double gp = p.dg(r);
    const RadialHessian hess{gp, p.d2g(r), r, c.N};
    const double val = pk_radial(hess, c.k, Side::plus) + sgn * c.value(r) * std::abs(gp) - rhs(r);
    worst = std::max(worst, std::abs(val));
  }
  return worst;
}

}  // namespace trunclap
