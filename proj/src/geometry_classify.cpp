#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "geometry_detail.hpp"
#include "trunclap/geometry.hpp"

namespace trunclap {

namespace {

Vec random_unit(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  Vec v(n);
  do {
    for (int i = 0; i < n; ++i) v[i] = nd(rng);
  } while (v.norm() < 1e-12);
  return v.normalized();
}

// Flat-piece dimension bound of a single (possibly unbounded) member.
int member_flatness(const ConvexBody& b) {
  const auto& im = b.impl();
  switch (b.kind()) {
    case BodyKind::ball:
    case BodyKind::ellipsoid:
      return 0;
    case BodyKind::hpolytope:
      return b.dim() - 1;
    case BodyKind::cylinder:
      return im.dim - im.base_dim;
    case BodyKind::power_epigraph:
      return im.exponent > 1.0 ? 0 : b.dim() - 1;
    case BodyKind::intersection: {
      int m = 0;
      for (const auto& c : im.members) m = std::max(m, member_flatness(c));
      return m;
    }
  }
  return b.dim() - 1;
}

// Golden-section minimum of f on [a, b].
std::pair<double, double> golden_min(const std::function<double(double)>& f, double a, double b, double xtol) {
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
  double f1 = f(x1), f2 = f(x2);
  while (b - a > xtol) {
    if (f1 > f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + gr * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - gr * (b - a);
      f1 = f(x1);
    }
  }
  const double t = 0.5 * (a + b);
  return {t, f(t)};
}

int flat_dimension_at(const ConvexBody& body, const Vec& x, double eps, double tol) {
  const int n = body.dim();
  const Vec nu = body.outward_normal(x);
  const Mat t = detail::orthonormal_complement(nu);
  auto dev = [&](const Vec& w) {
    return std::max(std::abs(body.signed_distance_estimate(x + eps * w)),
                    std::abs(body.signed_distance_estimate(x - eps * w)));
  };
  if (n == 2) return dev(t.col(0)) <= tol ? 1 : 0;
  auto dir = [&](double th) { return Vec(std::cos(th) * t.col(0) + std::sin(th) * t.col(1)); };
  const int samples = 360;
  double best = std::numeric_limits<double>::infinity();
  double best_th = 0.0;
  for (int i = 0; i < samples; ++i) {
    const double th = std::numbers::pi * i / samples;
    const double v = dev(dir(th));
    if (v < best) {
      best = v;
      best_th = th;
    }
  }
  const double step = std::numbers::pi / samples;
  auto [th, v] = golden_min([&](double a) { return dev(dir(a)); }, best_th - step, best_th + step, 1e-12);
  if (v > tol && best > tol) return 0;
  if (best <= tol && v > best) th = best_th;
  for (double off : {0.5 * std::numbers::pi, std::numbers::pi / 3.0, 2.0 * std::numbers::pi / 3.0})
    if (dev(dir(th + off)) <= tol) return 2;
  return 1;
}

}  // namespace

int flatness_upper_bound(const ConvexBody& body) { return std::min(member_flatness(body), body.dim() - 1); }

int flatness_probe(const ConvexBody& body, int points, std::uint64_t seed) {
  if (!body.bounded()) throw std::invalid_argument("flatness_probe: body must be bounded");
  std::mt19937_64 rng(seed);
  const double diam = body.diameter();
  const double tol = 1e-8 * diam;
  const int cap = body.dim() - 1;
  int found = 0;
  for (int p = 0; p < points && found < cap; ++p) {
    const Vec x = body.boundary_point(random_unit(body.dim(), rng));
    for (double e : {1e-3, 1e-2}) found = std::max(found, flat_dimension_at(body, x, e * diam, tol));
  }
  return found;
}

int flatness_dimension(const ConvexBody& body) {
  if (!body.bounded()) throw std::invalid_argument("flatness_dimension: body must be bounded");
  switch (body.kind()) {
    case BodyKind::ball:
    case BodyKind::ellipsoid:
      return 0;
    case BodyKind::hpolytope:
      return body.dim() - 1;
    case BodyKind::cylinder:
      return body.impl().dim - body.impl().base_dim;
    default:
      break;
  }
  const int ub = flatness_upper_bound(body);
  if (ub == 0) return 0;
  return std::min(ub, flatness_probe(body, 1000, 20240607));
}

Classification classify(const ConvexBody& body) {
  Classification c;
  c.dim = body.dim();
  c.d = flatness_dimension(body);
  c.cj_max = c.dim - c.d;
  c.gj.assign(c.dim, false);
  for (int j = 1; j < c.dim; ++j) c.gj[j] = c.d <= j - 1;
  return c;
}

bool gj_probe(const ConvexBody& body, int j, int samples, std::uint64_t seed) {
  const int n = body.dim();
  if (samples <= 0) throw std::invalid_argument("gj_probe: samples must be positive");
  if (j < 1 || j > n - 1) throw std::invalid_argument("gj_probe: need 1 <= j <= N-1");
  if (!body.bounded()) throw std::invalid_argument("gj_probe: body must be bounded");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  const double D = body.diameter();
  const double reach = 2.0 * D;

  for (int s = 0; s < samples; ++s) {
    const Vec y = body.boundary_point(random_unit(n, rng));
    const Vec nu = body.outward_normal(y);
    const double r = D * (0.02 + 0.28 * uni(rng));
    const double delta = 0.01 * r * r / D * (0.1 + 0.9 * uni(rng));
    const Vec x = y - delta * nu;
    if (!body.contains(x)) continue;

    // Orthonormal basis of S (columns).
    Mat S(n, j);
    if (s % 2 == 0) {
      for (int c = 0; c < j; ++c) S.col(c) = random_unit(n, rng);
    } else {
      const Mat t = detail::orthonormal_complement(nu);
      const double alpha = uni(rng) < 0.25 ? 0.0 : std::pow(10.0, -6.0 + 5.0 * uni(rng));
      for (int c = 0; c < j; ++c) {
        Vec w = t * random_unit(n - 1, rng);
        w += alpha * random_unit(n, rng);
        S.col(c) = w;
      }
    }
    Eigen::HouseholderQR<Mat> qr(S);
    const Mat Q = qr.householderQ() * Mat::Identity(n, j);
    if (Eigen::FullPivLU<Mat>(S).rank() < j) continue;

    auto nearest_exit = [&](const Vec& v) {
      const double sp = body.crossing_fraction(x, x + reach * v);
      const double sm = body.crossing_fraction(x, x - reach * v);
      return std::min((x + sp * reach * v - y).norm(), (x - sm * reach * v - y).norm());
    };

    double min_dist;
    if (j == 1) {
      min_dist = nearest_exit(Q.col(0));
    } else {
      auto along = [&](double th) { return nearest_exit(Vec(std::cos(th) * Q.col(0) + std::sin(th) * Q.col(1))); };
      const int m = 64;
      double best = std::numeric_limits<double>::infinity(), best_th = 0.0;
      for (int i = 0; i < m; ++i) {
        const double th = std::numbers::pi * i / m;
        const double v = along(th);
        if (v < best) {
          best = v;
          best_th = th;
        }
      }
      const double step = std::numbers::pi / m;
      min_dist = std::min(best, golden_min(along, best_th - step, best_th + step, 1e-10).second);
    }
    if (min_dist >= r) return false;
  }
  return true;
}

}  // namespace trunclap
