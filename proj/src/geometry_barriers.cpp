#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "geometry_detail.hpp"
#include "trunclap/geometry.hpp"

namespace trunclap {

namespace {

// Point of the closure maximizing u . y (u need not be normalized).
Vec support_point(const ConvexBody& omega, const Vec& u) {
  const auto& im = omega.impl();
  if (omega.kind() == BodyKind::ball) return im.center + im.radius * u.normalized();
  if (omega.kind() == BodyKind::ellipsoid) {
    const Vec w = im.shape_inv * u;
    return im.center + w / std::sqrt(u.dot(w));
  }
  if (omega.kind() == BodyKind::hpolytope) {
    Vec best = im.vertices.front();
    for (const auto& v : im.vertices)
      if (v.dot(u) > best.dot(u)) best = v;
    return best;
  }
  auto f = [&](const Vec& w) { return omega.boundary_point(w).dot(u); };
  return omega.boundary_point(detail::maximize_over_sphere(omega.dim(), f).second);
}

}  // namespace

Vec farthest_point(const ConvexBody& omega, const Vec& x0) {
  if (!omega.bounded()) throw std::invalid_argument("farthest_point: body must be bounded");
  // max_y |y - x0| = max over unit u of h(u) - u . x0
  auto f = [&](const Vec& u) { return omega.support(u) - u.dot(x0); };
  const auto best = detail::maximize_over_sphere(omega.dim(), f);
  return support_point(omega, best.second);
}

PsiResult psi_evaluate(const ConvexBody& omega, const Vec& x, const SearchConfig& search) {
  const int n = omega.dim();
  if (x.size() != n) throw std::invalid_argument("psi: point dimension mismatch");
  if (!omega.bounded()) throw std::invalid_argument("psi: body must be bounded");
  if (!omega.contains_closure(x)) throw std::invalid_argument("psi: point outside the closure");
  const double D = omega.diameter();
  const double L = search.center_cap * D;

  auto F = [&](const Vec& x0, Vec& g) {
    const Vec y = farthest_point(omega, x0);
    g = x - y;
    const double R2 = (y - x0).squaredNorm();
    return 0.5 * (R2 - (x - x0).squaredNorm());
  };

  // coarse grid over the search box
  const int per_axis = 9;
  Vec best_x0 = x;
  double best = std::numeric_limits<double>::infinity();
  Vec g(n);
  std::vector<int> idx(n, 0);
  while (true) {
    Vec x0(n);
    for (int i = 0; i < n; ++i) x0[i] = x[i] - L + 2.0 * L * idx[i] / (per_axis - 1);
    const double v = F(x0, g);
    if (v < best) {
      best = v;
      best_x0 = x0;
    }
    int a = 0;
    while (a < n && ++idx[a] == per_axis) idx[a++] = 0;
    if (a == n) break;
  }
  const Vec lo = x - Vec::Constant(n, L);
  const Vec hi = x + Vec::Constant(n, L);
  const auto res = detail::ellipsoid_minimize(F, best_x0, 2.0 * L * std::sqrt(double(n)), lo, hi,
                                              search.tol * D * D, search.max_iterations);
  if (res.value < best) {
    best = res.value;
    best_x0 = res.x;
  }
  PsiResult out;
  out.value = best;
  out.cap.center = best_x0;
  out.cap.radius = (farthest_point(omega, best_x0) - best_x0).norm();
  return out;
}

double psi_value(const ConvexBody& omega, const Vec& x, const SearchConfig& search) {
  return psi_evaluate(omega, x, search).value;
}

std::vector<ConvexBody> cover_from_intersection(const ConvexBody& domain) {
  std::vector<ConvexBody> cover;
  for (const auto& m : domain.members()) {
    switch (m.kind()) {
      case BodyKind::ball:
      case BodyKind::ellipsoid:
      case BodyKind::cylinder:
        cover.push_back(m);
        break;
      default:
        break;
    }
  }
  return cover;
}

LiftedSupersolution::LiftedSupersolution(ConvexBody domain, std::vector<ConvexBody> cover, SearchConfig search)
    : domain_(std::move(domain)), cover_(std::move(cover)), search_(search) {
  if (cover_.empty()) throw std::invalid_argument("lifted supersolution: empty cover");
  if (!domain_.bounded()) throw std::invalid_argument("lifted supersolution: domain must be bounded");
  for (const auto& c : cover_) {
    if (c.dim() != domain_.dim()) throw std::invalid_argument("lifted supersolution: cover dimension mismatch");
    if (c.kind() != BodyKind::ball && c.kind() != BodyKind::ellipsoid && c.kind() != BodyKind::cylinder)
      throw std::invalid_argument("lifted supersolution: cover members must be cylinders");
  }
  const double scale = std::max(1.0, domain_.diameter());
  const auto samples = domain_.boundary_samples(1000);
  for (const auto& p : samples) {
    double nearest = std::numeric_limits<double>::infinity();
    for (const auto& c : cover_) {
      const double s = c.signed_distance_estimate(p);
      if (s > 1e-9 * scale) throw std::invalid_argument("lifted supersolution: cover member does not contain the domain");
      nearest = std::min(nearest, std::abs(s));
    }
    if (nearest > 1e-6 * scale)
      throw std::invalid_argument("lifted supersolution: boundary not covered by cylinder boundaries");
  }
}

double LiftedSupersolution::operator()(const Vec& x) const {
  if (!domain_.contains_closure(x)) throw std::invalid_argument("lifted supersolution: point outside the closure");
  double best = std::numeric_limits<double>::infinity();
  for (const auto& c : cover_) {
    double v;
    if (c.kind() == BodyKind::cylinder) {
      const auto& im = c.impl();
      const Vec z = (im.rotation.transpose() * x).head(im.base_dim);
      v = psi_value(c.cylinder_base(), z, search_);
    } else {
      v = psi_value(c, x, search_);
    }
    best = std::min(best, v);
  }
  return best;
}

double lifted_supersolution(const ConvexBody& domain, const std::vector<ConvexBody>& cover, const Vec& x,
                            const SearchConfig& search) {
  return LiftedSupersolution(domain, cover, search)(x);
}

BoundarySubsolution::BoundarySubsolution(const ConvexBody& domain, int k, int boundary_samples)
    : alpha_(std::max(k - 1, 1)) {
  if (boundary_samples <= 0) throw std::invalid_argument("subsolution: boundary_samples must be positive");
  if (k < 1) throw std::invalid_argument("subsolution: k must be positive");
  for (const auto& xb : domain.boundary_samples(boundary_samples)) centers_.push_back(xb + domain.outward_normal(xb));
}

double BoundarySubsolution::operator()(const Vec& x) const {
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& z : centers_) best = std::max(best, std::pow((x - z).norm(), -alpha_) - 1.0);
  return best;
}

double subsolution_phi(const ConvexBody& domain, const Vec& x, int k, int boundary_samples) {
  return BoundarySubsolution(domain, k, boundary_samples)(x);
}

ConvexHullOracle::ConvexHullOracle(std::vector<Vec> points, std::vector<double> radii) : radii_(std::move(radii)) {
  if (points.empty() || radii_.empty()) throw std::invalid_argument("hull: empty input");
  m_ = static_cast<int>(points.front().size());
  bool has_origin = false;
  for (const auto& p : points) {
    if (p.size() != m_) throw std::invalid_argument("hull: point dimension mismatch");
    if (p.norm() == 0.0) {
      has_origin = true;
      continue;
    }
    if (!(p[m_ - 1] < 0.0)) throw std::invalid_argument("hull: points other than 0 need a negative last coordinate");
  }
  if (!has_origin) throw std::invalid_argument("hull: point set must contain the origin");
  for (double R : radii_) {
    if (!(R > 0.0)) throw std::invalid_argument("hull: radii must be positive");
    double rho = std::numeric_limits<double>::infinity();
    for (const auto& p : points) {
      const double xm = p[m_ - 1];
      const double tangential = p.squaredNorm() - xm * xm;
      if (R * R < tangential) throw std::invalid_argument("hull: radius smaller than a point's lateral offset");
      rho = std::min(rho, -xm + std::sqrt(R * R - tangential));
    }
    rho_.push_back(rho);
  }
}

bool ConvexHullOracle::contains(const Vec& x, double tol) const {
  if (x.size() != m_) throw std::invalid_argument("hull: point dimension mismatch");
  for (std::size_t i = 0; i < radii_.size(); ++i) {
    Vec c = x;
    c[m_ - 1] += rho_[i];
    if (c.norm() > radii_[i] + tol) return false;
  }
  return true;
}

double ConvexHullOracle::tail_gap() const {
  const std::size_t n = radii_.size();
  const std::size_t start = n - std::max<std::size_t>(1, n / 10);
  double gap = 0.0;
  for (std::size_t i = start; i < n; ++i) gap = std::max(gap, radii_[i] * radii_[i] - rho_[i] * rho_[i]);
  return gap;
}

ConvexHullOracle strictly_convex_hull(const std::vector<Vec>& points, const std::vector<double>& radii) {
  return ConvexHullOracle(points, radii);
}

double interior_ball_delta(double R, double t, double dist) {
  if (!(R > 0.0)) throw std::invalid_argument("interior_ball_delta: R must be positive");
  if (!(t > 0.0 && t < 1.0)) throw std::invalid_argument("interior_ball_delta: t must lie in (0,1)");
  if (!(dist >= 0.0)) throw std::invalid_argument("interior_ball_delta: dist must be nonnegative");
  const double q = t * (1.0 - t) * dist * dist;
  if (q > R * R) throw std::invalid_argument("interior_ball_delta: t(1-t)|x-y|^2 exceeds R^2");
  // R - sqrt(R^2 - q) without cancellation
  return 0.5 * q / (R + std::sqrt(R * R - q));
}

std::vector<Vec> span_basis(const std::vector<Vec>& points) {
  std::vector<Vec> basis;
  std::vector<Vec> ortho;
  for (const auto& p : points) {
    Vec r = p;
    for (const auto& q : ortho) r -= r.dot(q) * q;
    for (const auto& q : ortho) r -= r.dot(q) * q;
    if (r.norm() > 1e-10 * std::max(1.0, p.norm())) {
      basis.push_back(p);
      ortho.push_back(r.normalized());
    }
  }
  return basis;
}

}  // namespace trunclap
