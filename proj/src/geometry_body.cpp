#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "geometry_detail.hpp"
#include "trunclap/geometry.hpp"

namespace trunclap {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

using Impl = ConvexBody::Impl;

double raw_level(const Impl& b, const Vec& x);
Vec raw_gradient(const Impl& b, const Vec& x);

double ellipsoid_q(const Impl& b, const Vec& x) {
  const Vec d = x - b.center;
  return d.dot(b.shape * d);
}

double sde(const Impl& b, const Vec& x) {
  switch (b.kind) {
    case BodyKind::ball:
      return (x - b.center).norm() - b.radius;
    case BodyKind::hpolytope:
      return raw_level(b, x);
    case BodyKind::intersection: {
      double best = -kInf;
      for (const auto& m : b.members) best = std::max(best, sde(m.impl(), x));
      return best;
    }
    case BodyKind::cylinder: {
      const Vec z = (b.rotation.transpose() * x).head(b.base_dim);
      return sde(*b.base, z);
    }
    case BodyKind::ellipsoid:
      if (ellipsoid_q(b, x) < 1e-28) return -b.radius;
      [[fallthrough]];
    default: {
      const double l = raw_level(b, x);
      const double g = raw_gradient(b, x).norm();
      return g > 0.0 ? l / g : l;
    }
  }
}

std::size_t active_member(const Impl& b, const Vec& x) {
  std::size_t arg = 0;
  double best = -kInf;
  for (std::size_t i = 0; i < b.members.size(); ++i) {
    const double v = sde(b.members[i].impl(), x);
    if (v > best) {
      best = v;
      arg = i;
    }
  }
  return arg;
}

std::size_t active_facet(const Impl& b, const Vec& x) {
  std::size_t arg = 0;
  double best = -kInf;
  for (std::size_t i = 0; i < b.facets.size(); ++i) {
    const double v = b.facets[i].normal.dot(x) - b.facets[i].offset;
    if (v > best) {
      best = v;
      arg = i;
    }
  }
  return arg;
}

double raw_level(const Impl& b, const Vec& x) {
  switch (b.kind) {
    case BodyKind::ball:
      return (x - b.center).norm() - b.radius;
    case BodyKind::ellipsoid:
      return std::sqrt(std::max(0.0, ellipsoid_q(b, x))) - 1.0;
    case BodyKind::hpolytope: {
      const auto& f = b.facets[active_facet(b, x)];
      return f.normal.dot(x) - f.offset;
    }
    case BodyKind::cylinder:
      return raw_level(*b.base, (b.rotation.transpose() * x).head(b.base_dim));
    case BodyKind::power_epigraph: {
      const int n = b.dim;
      const double rho = x.head(n - 1).norm();
      return b.coefficient * std::pow(rho, b.exponent) - b.sign * (x[n - 1] - b.offset);
    }
    case BodyKind::intersection:
      return sde(b, x);
  }
  return 0.0;
}

Vec raw_gradient(const Impl& b, const Vec& x) {
  const int n = b.dim;
  switch (b.kind) {
    case BodyKind::ball: {
      const Vec d = x - b.center;
      const double r = d.norm();
      return r > 0.0 ? Vec(d / r) : Vec(Vec::Zero(n));
    }
    case BodyKind::ellipsoid: {
      const double q = ellipsoid_q(b, x);
      if (q <= 0.0) return Vec::Zero(n);
      return b.shape * (x - b.center) / std::sqrt(q);
    }
    case BodyKind::hpolytope:
      return b.facets[active_facet(b, x)].normal;
    case BodyKind::cylinder: {
      Vec g = Vec::Zero(n);
      g.head(b.base_dim) = raw_gradient(*b.base, (b.rotation.transpose() * x).head(b.base_dim));
      return b.rotation * g;
    }
    case BodyKind::power_epigraph: {
      Vec g(n);
      const double rho = x.head(n - 1).norm();
      if (rho > 0.0)
        g.head(n - 1) = b.coefficient * b.exponent * std::pow(rho, b.exponent - 2.0) * x.head(n - 1);
      else
        g.head(n - 1).setZero();
      g[n - 1] = -b.sign;
      return g;
    }
    case BodyKind::intersection: {
      const auto& m = b.members[active_member(b, x)].impl();
      const Vec g = raw_gradient(m, x);
      const double norm = g.norm();
      return norm > 0.0 ? Vec(g / norm) : g;
    }
  }
  return Vec::Zero(n);
}

// Positive root of a q(s) = 1 type quadratic |f + s d|_M^2 = rr, f inside.
double quadratic_exit(double A, double B, double C) {
  if (A <= 0.0) return kInf;
  const double disc = std::max(0.0, B * B - 4.0 * A * C);
  const double sq = std::sqrt(disc);
  if (B >= 0.0) {
    const double q = -0.5 * (B + sq);
    return q != 0.0 ? C / q : 0.0;
  }
  return -0.5 * (B - sq) / A;
}

// First s >= 0 with a + s d on the boundary (infinity when the ray stays inside).
double exit_parameter(const Impl& b, const Vec& a, const Vec& d, double tol) {
  switch (b.kind) {
    case BodyKind::ball: {
      const Vec f = a - b.center;
      return quadratic_exit(d.squaredNorm(), 2.0 * f.dot(d), f.squaredNorm() - b.radius * b.radius);
    }
    case BodyKind::ellipsoid: {
      const Vec f = a - b.center;
      const Vec Ad = b.shape * d;
      return quadratic_exit(d.dot(Ad), 2.0 * f.dot(Ad), f.dot(b.shape * f) - 1.0);
    }
    case BodyKind::hpolytope: {
      double s = kInf;
      for (const auto& f : b.facets) {
        const double nd = f.normal.dot(d);
        if (nd > 0.0) s = std::min(s, std::max(0.0, (f.offset - f.normal.dot(a)) / nd));
      }
      return s;
    }
    case BodyKind::cylinder: {
      const Vec za = (b.rotation.transpose() * a).head(b.base_dim);
      const Vec zd = (b.rotation.transpose() * d).head(b.base_dim);
      return exit_parameter(*b.base, za, zd, tol);
    }
    case BodyKind::intersection: {
      double s = kInf;
      for (const auto& m : b.members) s = std::min(s, exit_parameter(m.impl(), a, d, tol));
      return s;
    }
    case BodyKind::power_epigraph: {
      double hi = 1.0;
      int grow = 0;
      while (raw_level(b, a + hi * d) < 0.0) {
        hi *= 2.0;
        if (++grow > 60) return kInf;
      }
      double lo = 0.0;
      while (hi - lo > tol * hi) {
        const double mid = 0.5 * (lo + hi);
        if (raw_level(b, a + mid * d) < 0.0)
          lo = mid;
        else
          hi = mid;
      }
      return 0.5 * (lo + hi);
    }
  }
  return kInf;
}

double support_impl(const Impl& b, const Vec& u);

Vec ray_boundary(const Impl& b, const Vec& dir) {
  const double s = exit_parameter(b, b.interior, dir, 1e-14);
  if (!std::isfinite(s)) return Vec::Constant(b.dim, kInf);
  return b.interior + s * dir;
}

double support_impl(const Impl& b, const Vec& u) {
  switch (b.kind) {
    case BodyKind::ball:
      return b.center.dot(u) + b.radius * u.norm();
    case BodyKind::ellipsoid:
      return b.center.dot(u) + std::sqrt(std::max(0.0, u.dot(b.shape_inv * u)));
    case BodyKind::hpolytope: {
      double best = -kInf;
      for (const auto& v : b.vertices) best = std::max(best, v.dot(u));
      return best;
    }
    case BodyKind::cylinder: {
      const Vec v = b.rotation.transpose() * u;
      if (b.base_dim < b.dim && v.tail(b.dim - b.base_dim).norm() > 1e-12 * std::max(1.0, u.norm()))
        return kInf;
      return support_impl(*b.base, v.head(b.base_dim));
    }
    case BodyKind::power_epigraph: {
      const int n = b.dim;
      const double un = u[n - 1] * b.sign;  // component along the opening direction
      const double ut = u.head(n - 1).norm();
      if (un > 0.0) return kInf;
      if (un == 0.0) return ut > 0.0 ? kInf : 0.0;
      const double a = -un;  // maximize ut rho - a c rho^p, plus u_N offset
      double rho = 0.0;
      if (b.exponent > 1.0) {
        rho = std::pow(ut / (a * b.coefficient * b.exponent), 1.0 / (b.exponent - 1.0));
      } else if (ut > a * b.coefficient) {
        return kInf;
      }
      return ut * rho - a * b.coefficient * std::pow(rho, b.exponent) + u[n - 1] * b.offset;
    }
    case BodyKind::intersection: {
      if (!b.is_bounded) {
        double ub = kInf;
        for (const auto& m : b.members) ub = std::min(ub, support_impl(m.impl(), u));
        if (std::isinf(ub)) return kInf;
      }
      auto f = [&](const Vec& w) {
        const Vec p = ray_boundary(b, w);
        if (!std::isfinite(p[0])) return w.dot(u) > 0.0 ? kInf : -kInf;
        return p.dot(u);
      };
      return detail::maximize_over_sphere(b.dim, f).first;
    }
  }
  return kInf;
}

std::shared_ptr<Impl> make_impl(BodyKind kind, int dim) {
  if (dim < 1 || dim > 3) throw std::invalid_argument("ConvexBody: dimension must be 1, 2 or 3");
  auto impl = std::make_shared<Impl>();
  impl->kind = kind;
  impl->dim = dim;
  return impl;
}

void check_point(const Impl& b, const Vec& x) {
  if (x.size() != b.dim) throw std::invalid_argument("ConvexBody: point dimension mismatch");
}

std::vector<Vec> enumerate_vertices(const std::vector<Facet>& facets, int n) {
  std::vector<Vec> out;
  const int m = static_cast<int>(facets.size());
  auto feasible = [&](const Vec& x) {
    for (const auto& f : facets)
      if (f.normal.dot(x) > f.offset + 1e-9 * (1.0 + std::abs(f.offset))) return false;
    return true;
  };
  auto push = [&](const Vec& x) {
    for (const auto& v : out)
      if ((v - x).norm() < 1e-9 * (1.0 + x.norm())) return;
    out.push_back(x);
  };
  std::vector<int> idx(n);
  std::function<void(int, int)> rec = [&](int start, int depth) {
    if (depth == n) {
      Mat A(n, n);
      Vec rhs(n);
      for (int i = 0; i < n; ++i) {
        A.row(i) = facets[idx[i]].normal.transpose();
        rhs[i] = facets[idx[i]].offset;
      }
      Eigen::FullPivLU<Mat> lu(A);
      if (lu.rank() < n) return;
      const Vec x = lu.solve(rhs);
      if (feasible(x)) push(x);
      return;
    }
    for (int i = start; i < m; ++i) {
      idx[depth] = i;
      rec(i + 1, depth + 1);
    }
  };
  rec(0, 0);
  return out;
}

bool polytope_bounded(const std::vector<Facet>& facets, int n) {
  if (static_cast<int>(facets.size()) < n + 1) return false;
  std::vector<Vec> candidates;
  for (const auto& f : facets) {
    const Mat t = detail::orthonormal_complement(f.normal);
    for (int c = 0; c < t.cols(); ++c) {
      candidates.push_back(t.col(c));
      candidates.push_back(-t.col(c));
    }
  }
  if (n == 3)
    for (std::size_t i = 0; i < facets.size(); ++i)
      for (std::size_t j = i + 1; j < facets.size(); ++j) {
        Eigen::Vector3d a = facets[i].normal, b = facets[j].normal;
        const Eigen::Vector3d c = a.cross(b);
        if (c.norm() > 1e-12) {
          candidates.push_back(c.normalized());
          candidates.push_back(-c.normalized());
        }
      }
  for (const auto& u : candidates) {
    bool recession = true;
    for (const auto& f : facets)
      if (f.normal.dot(u) > 1e-12) {
        recession = false;
        break;
      }
    if (recession) return false;
  }
  return true;
}

double diameter_from_samples(const std::vector<Vec>& pts) {
  double d = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) d = std::max(d, (pts[i] - pts[j]).norm());
  return d;
}

}  // namespace

std::string body_kind_name(BodyKind k) {
  switch (k) {
    case BodyKind::ball: return "ball";
    case BodyKind::ellipsoid: return "ellipsoid";
    case BodyKind::hpolytope: return "hpolytope";
    case BodyKind::cylinder: return "cylinder";
    case BodyKind::power_epigraph: return "power_epigraph";
    case BodyKind::intersection: return "intersection";
  }
  return "unknown";
}

ConvexBody ConvexBody::ball(const Vec& center, double radius) {
  if (!(radius > 0.0) || !std::isfinite(radius)) throw std::invalid_argument("ball: radius must be positive");
  auto impl = make_impl(BodyKind::ball, static_cast<int>(center.size()));
  impl->center = center;
  impl->radius = radius;
  impl->interior = center;
  impl->diam = 2.0 * radius;
  return ConvexBody(impl);
}

ConvexBody ConvexBody::ellipsoid(const Vec& center, const Mat& shape) {
  const int n = static_cast<int>(center.size());
  if (shape.rows() != n || shape.cols() != n) throw std::invalid_argument("ellipsoid: shape must be N x N");
  if ((shape - shape.transpose()).norm() > 1e-12 * std::max(1.0, shape.norm()))
    throw std::invalid_argument("ellipsoid: shape must be symmetric");
  Eigen::SelfAdjointEigenSolver<Mat> es(shape);
  if (!(es.eigenvalues().minCoeff() > 0.0)) throw std::invalid_argument("ellipsoid: shape must be positive definite");
  auto impl = make_impl(BodyKind::ellipsoid, n);
  impl->center = center;
  impl->shape = 0.5 * (shape + shape.transpose());
  impl->shape_inv = impl->shape.inverse();
  impl->shape_inv = 0.5 * (impl->shape_inv + impl->shape_inv.transpose());
  impl->shape_chol = Eigen::LLT<Mat>(impl->shape_inv).matrixL();
  impl->radius = 1.0 / std::sqrt(es.eigenvalues().maxCoeff());
  impl->interior = center;
  impl->diam = 2.0 / std::sqrt(es.eigenvalues().minCoeff());
  return ConvexBody(impl);
}

ConvexBody ConvexBody::ellipsoid_axes(const Vec& center, const Vec& semiaxes, const Mat& rotation) {
  const int n = static_cast<int>(center.size());
  if (semiaxes.size() != n) throw std::invalid_argument("ellipsoid: semiaxes dimension mismatch");
  for (int i = 0; i < n; ++i)
    if (!(semiaxes[i] > 0.0)) throw std::invalid_argument("ellipsoid: semiaxes must be positive");
  const Mat Q = rotation.size() == 0 ? Mat(Mat::Identity(n, n)) : rotation;
  if (Q.rows() != n || Q.cols() != n || (Q.transpose() * Q - Mat::Identity(n, n)).norm() > 1e-10)
    throw std::invalid_argument("ellipsoid: rotation must be orthogonal");
  Vec inv(n);
  for (int i = 0; i < n; ++i) inv[i] = 1.0 / (semiaxes[i] * semiaxes[i]);
  return ellipsoid(center, Q * inv.asDiagonal() * Q.transpose());
}

ConvexBody ConvexBody::hpolytope(std::vector<Facet> facets) {
  if (facets.empty()) throw std::invalid_argument("hpolytope: no facets");
  const int n = static_cast<int>(facets.front().normal.size());
  auto impl = make_impl(BodyKind::hpolytope, n);
  for (auto& f : facets) {
    if (f.normal.size() != n) throw std::invalid_argument("hpolytope: facet dimension mismatch");
    const double norm = f.normal.norm();
    if (!(norm > 0.0)) throw std::invalid_argument("hpolytope: zero facet normal");
    f.normal /= norm;
    f.offset /= norm;
  }
  if (!polytope_bounded(facets, n)) throw std::invalid_argument("hpolytope: unbounded");
  impl->facets = std::move(facets);
  impl->vertices = enumerate_vertices(impl->facets, n);
  if (static_cast<int>(impl->vertices.size()) < n + 1) throw std::invalid_argument("hpolytope: empty interior");
  Vec c = Vec::Zero(n);
  for (const auto& v : impl->vertices) c += v;
  c /= static_cast<double>(impl->vertices.size());
  if (!(raw_level(*impl, c) < -1e-12)) throw std::invalid_argument("hpolytope: empty interior");
  impl->interior = c;
  impl->diam = diameter_from_samples(impl->vertices);
  return ConvexBody(impl);
}

ConvexBody ConvexBody::box(const Vec& lo, const Vec& hi) {
  const int n = static_cast<int>(lo.size());
  if (hi.size() != n) throw std::invalid_argument("box: dimension mismatch");
  std::vector<Facet> f;
  for (int i = 0; i < n; ++i) {
    if (!(hi[i] > lo[i])) throw std::invalid_argument("box: empty interior");
    f.push_back({Vec::Unit(n, i), hi[i]});
    f.push_back({-Vec::Unit(n, i), -lo[i]});
  }
  return hpolytope(std::move(f));
}

ConvexBody ConvexBody::cylinder(const Mat& rotation, const ConvexBody& base, int dim) {
  const int j = base.dim();
  if (dim < 2 || dim > 3 || j < 1 || j > dim) throw std::invalid_argument("cylinder: bad dimensions");
  if (base.kind() != BodyKind::ball && base.kind() != BodyKind::ellipsoid)
    throw std::invalid_argument("cylinder: base must be a ball or an ellipsoid");
  const Mat O = rotation.size() == 0 ? Mat(Mat::Identity(dim, dim)) : rotation;
  if (O.rows() != dim || O.cols() != dim || (O.transpose() * O - Mat::Identity(dim, dim)).norm() > 1e-10)
    throw std::invalid_argument("cylinder: rotation must be orthogonal");
  auto impl = make_impl(BodyKind::cylinder, dim);
  impl->rotation = O;
  impl->base = base.impl_;
  impl->base_dim = j;
  Vec z = Vec::Zero(dim);
  z.head(j) = base.interior_point();
  impl->interior = O * z;
  impl->is_bounded = j == dim;
  impl->diam = impl->is_bounded ? base.diameter() : kInf;
  return ConvexBody(impl);
}

ConvexBody ConvexBody::power_epigraph(int dim, double sign, double offset, double coefficient, double exponent) {
  if (dim < 2 || dim > 3) throw std::invalid_argument("power_epigraph: dimension must be 2 or 3");
  if (sign != 1.0 && sign != -1.0) throw std::invalid_argument("power_epigraph: sign must be +1 or -1");
  if (!(coefficient > 0.0) || !(exponent >= 1.0))
    throw std::invalid_argument("power_epigraph: need coefficient > 0 and exponent >= 1");
  auto impl = make_impl(BodyKind::power_epigraph, dim);
  impl->sign = sign;
  impl->offset = offset;
  impl->coefficient = coefficient;
  impl->exponent = exponent;
  impl->interior = Vec::Zero(dim);
  impl->interior[dim - 1] = offset + sign;
  impl->is_bounded = false;
  impl->diam = kInf;
  return ConvexBody(impl);
}

ConvexBody ConvexBody::intersection(std::vector<ConvexBody> members) {
  if (members.empty()) throw std::invalid_argument("intersection: no members");
  const int n = members.front().dim();
  for (const auto& m : members)
    if (m.dim() != n) throw std::invalid_argument("intersection: member dimension mismatch");
  auto impl = make_impl(BodyKind::intersection, n);
  impl->members = members;

  // Interior point: minimize the convex function max_i level_i.
  Vec c = Vec::Zero(n);
  for (const auto& m : members) c += m.interior_point();
  c /= static_cast<double>(members.size());
  double spread = 1.0;
  for (const auto& m : members) spread = std::max(spread, (m.interior_point() - c).norm());
  for (const auto& m : members)
    if (m.bounded()) spread = std::max(spread, m.diameter());
  auto f = [&](const Vec& x, Vec& g) {
    double best = -kInf;
    for (const auto& m : members) {
      const double v = raw_level(m.impl(), x);
      if (v > best) {
        best = v;
        g = raw_gradient(m.impl(), x);
      }
    }
    return best;
  };
  const Vec lo = c - Vec::Constant(n, 4.0 * spread);
  const Vec hi = c + Vec::Constant(n, 4.0 * spread);
  const auto res = detail::ellipsoid_minimize(f, c, 4.0 * spread * std::sqrt(double(n)), lo, hi, 1e-10, 2000);
  Vec g;
  if (!(f(res.x, g) < 0.0)) throw std::invalid_argument("intersection: empty interior");
  impl->interior = res.x;

  bool any_bounded = false;
  for (const auto& m : members) any_bounded = any_bounded || m.bounded();
  const int probes = n == 2 ? 256 : 800;
  const auto dirs = detail::sphere_lattice(n, probes);
  std::vector<Vec> boundary;
  boundary.reserve(dirs.size());
  bool bounded = true;
  for (const auto& u : dirs) {
    const Vec p = ray_boundary(*impl, u);
    if (!std::isfinite(p[0]) || (p - impl->interior).norm() > 1e6) {
      bounded = false;
      break;
    }
    boundary.push_back(p);
  }
  impl->is_bounded = any_bounded || bounded;
  impl->diam = impl->is_bounded ? diameter_from_samples(boundary) : kInf;
  return ConvexBody(impl);
}

int ConvexBody::dim() const { return impl_->dim; }
BodyKind ConvexBody::kind() const { return impl_->kind; }

double ConvexBody::level(const Vec& x) const {
  check_point(*impl_, x);
  return impl_->kind == BodyKind::intersection ? sde(*impl_, x) : raw_level(*impl_, x);
}

Vec ConvexBody::level_gradient(const Vec& x) const {
  check_point(*impl_, x);
  return raw_gradient(*impl_, x);
}

double ConvexBody::signed_distance_estimate(const Vec& x) const {
  check_point(*impl_, x);
  return sde(*impl_, x);
}

bool ConvexBody::contains_closure(const Vec& x, double tol) const {
  return signed_distance_estimate(x) <= tol * std::max(1.0, std::isfinite(impl_->diam) ? impl_->diam : 1.0);
}

double ConvexBody::support(const Vec& direction) const {
  if (direction.size() != impl_->dim) throw std::invalid_argument("support: direction dimension mismatch");
  return support_impl(*impl_, direction);
}

Vec ConvexBody::outward_normal(const Vec& x) const {
  const Vec g = level_gradient(x);
  const double n = g.norm();
  if (!(n > 0.0)) throw std::invalid_argument("outward_normal: degenerate gradient");
  return g / n;
}

bool ConvexBody::bounded() const { return impl_->is_bounded; }
Vec ConvexBody::interior_point() const { return impl_->interior; }
double ConvexBody::diameter() const { return impl_->diam; }

std::pair<Vec, Vec> ConvexBody::bounding_box() const {
  const int n = impl_->dim;
  Vec lo(n), hi(n);
  for (int i = 0; i < n; ++i) {
    hi[i] = support(Vec::Unit(n, i));
    lo[i] = -support(-Vec::Unit(n, i));
  }
  return {lo, hi};
}

Vec ConvexBody::boundary_point(const Vec& direction) const {
  if (direction.size() != impl_->dim) throw std::invalid_argument("boundary_point: dimension mismatch");
  const double n = direction.norm();
  if (!(n > 0.0)) throw std::invalid_argument("boundary_point: zero direction");
  return ray_boundary(*impl_, direction / n);
}

double ConvexBody::crossing_fraction(const Vec& inside, const Vec& outside, double tol) const {
  const double s = exit_parameter(*impl_, inside, outside - inside, tol);
  return std::clamp(s, 0.0, 1.0);
}

std::vector<Vec> ConvexBody::boundary_samples(int count) const {
  std::vector<Vec> out;
  for (const auto& u : detail::sphere_lattice(impl_->dim, count)) out.push_back(ray_boundary(*impl_, u));
  return out;
}

std::vector<ConvexBody> ConvexBody::members() const {
  if (impl_->kind == BodyKind::intersection) return impl_->members;
  return {*this};
}

ConvexBody ConvexBody::cylinder_base() const {
  if (impl_->kind != BodyKind::cylinder) throw std::invalid_argument("cylinder_base: not a cylinder");
  return ConvexBody(impl_->base);
}

}  // namespace trunclap
