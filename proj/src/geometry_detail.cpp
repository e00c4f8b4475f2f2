#include "geometry_detail.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace trunclap::detail {

std::vector<Vec> sphere_lattice(int dim, int count) {
  std::vector<Vec> out;
  out.reserve(count);
  if (dim == 1) {
    out.push_back(Vec::Constant(1, 1.0));
    out.push_back(Vec::Constant(1, -1.0));
    return out;
  }
  if (dim == 2) {
    for (int i = 0; i < count; ++i) {
      const double t = 2.0 * std::numbers::pi * i / count;
      Vec u(2);
      u << std::cos(t), std::sin(t);
      out.push_back(u);
    }
    return out;
  }
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < count; ++i) {
    const double z = 1.0 - 2.0 * (i + 0.5) / count;
    const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = golden * i;
    Vec u(3);
    u << rho * std::cos(phi), rho * std::sin(phi), z;
    out.push_back(u);
  }
  return out;
}

Mat orthonormal_complement(const Vec& nu) {
  const int n = static_cast<int>(nu.size());
  Mat basis(n, n - 1);
  int filled = 0;
  for (int e = 0; e < n && filled < n - 1; ++e) {
    Vec v = Vec::Unit(n, e);
    v -= v.dot(nu) * nu;
    for (int j = 0; j < filled; ++j) v -= v.dot(basis.col(j)) * basis.col(j);
    const double norm = v.norm();
    if (norm > 1e-6) basis.col(filled++) = v / norm;
  }
  return basis;
}

namespace {

Vec circle_point(double t) {
  Vec u(2);
  u << std::cos(t), std::sin(t);
  return u;
}

}  // namespace

std::pair<double, Vec> maximize_over_sphere(int dim, const std::function<double(const Vec&)>& f,
                                            int samples) {
  if (dim == 1) {
    Vec p(1), m(1);
    p << 1.0;
    m << -1.0;
    const double fp = f(p);
    const double fm = f(m);
    return fp >= fm ? std::make_pair(fp, p) : std::make_pair(fm, m);
  }
  if (dim == 2) {
    const int n = samples > 0 ? samples : 48;
    std::vector<double> vals(n);
    for (int i = 0; i < n; ++i) vals[i] = f(circle_point(2.0 * std::numbers::pi * i / n));
    std::vector<int> idx(n);
    for (int i = 0; i < n; ++i) idx[i] = i;
    std::partial_sort(idx.begin(), idx.begin() + 2, idx.end(), [&](int a, int b) { return vals[a] > vals[b]; });
    double best = vals[idx[0]];
    Vec best_u = circle_point(2.0 * std::numbers::pi * idx[0] / n);
    const double step = 2.0 * std::numbers::pi / n;
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    for (int c = 0; c < 2; ++c) {
      const double centre = 2.0 * std::numbers::pi * idx[c] / n;
      double a = centre - step;
      double b = centre + step;
      double x1 = b - gr * (b - a);
      double x2 = a + gr * (b - a);
      double f1 = f(circle_point(x1));
      double f2 = f(circle_point(x2));
      while (b - a > 1e-11) {
        if (f1 < f2) {
          a = x1;
          x1 = x2;
          f1 = f2;
          x2 = a + gr * (b - a);
          f2 = f(circle_point(x2));
        } else {
          b = x2;
          x2 = x1;
          f2 = f1;
          x1 = b - gr * (b - a);
          f1 = f(circle_point(x1));
        }
      }
      const double t = 0.5 * (a + b);
      const double ft = f(circle_point(t));
      if (ft > best) {
        best = ft;
        best_u = circle_point(t);
      }
    }
    return {best, best_u};
  }

  const int n = samples > 0 ? samples : 600;
  const auto pts = sphere_lattice(3, n);
  std::vector<double> vals(n);
  for (int i = 0; i < n; ++i) vals[i] = f(pts[i]);
  std::vector<int> idx(n);
  for (int i = 0; i < n; ++i) idx[i] = i;
  std::partial_sort(idx.begin(), idx.begin() + 3, idx.end(), [&](int a, int b) { return vals[a] > vals[b]; });
  double best = vals[idx[0]];
  Vec best_u = pts[idx[0]];
  for (int c = 0; c < 3; ++c) {
    Vec u = pts[idx[c]];
    double fu = vals[idx[c]];
    double step = 2.0 * std::sqrt(4.0 * std::numbers::pi / n);
    while (step > 1e-10) {
      const Mat t = orthonormal_complement(u);
      bool improved = false;
      for (int j = 0; j < 2 && !improved; ++j)
        for (double s : {step, -step}) {
          Vec cand = (u + s * t.col(j)).normalized();
          const double fc = f(cand);
          if (fc > fu) {
            u = cand;
            fu = fc;
            improved = true;
            break;
          }
        }
      if (!improved) step *= 0.5;
    }
    if (fu > best) {
      best = fu;
      best_u = u;
    }
  }
  return {best, best_u};
}

EllipsoidResult ellipsoid_minimize(const std::function<double(const Vec&, Vec&)>& f, const Vec& start,
                                   double radius, const Vec& lo, const Vec& hi, double tol,
                                   int max_iterations) {
  const int n = static_cast<int>(start.size());
  Vec c = start;
  Mat P = Mat::Identity(n, n) * radius * radius;
  EllipsoidResult best;
  best.x = start;
  best.value = std::numeric_limits<double>::infinity();
  Vec g(n);
  const double nn = static_cast<double>(n);
  for (int it = 0; it < max_iterations; ++it) {
    best.iterations = it + 1;
    int violated = -1;
    for (int i = 0; i < n; ++i)
      if (c[i] < lo[i] || c[i] > hi[i]) violated = i;
    bool objective_cut = violated < 0;
    if (!objective_cut) {
      g = Vec::Zero(n);
      g[violated] = c[violated] > hi[violated] ? 1.0 : -1.0;
    } else {
      const double val = f(c, g);
      if (val < best.value) {
        best.value = val;
        best.x = c;
      }
    }
    const double gpg = g.dot(P * g);
    if (gpg <= 0.0) break;
    const double width = std::sqrt(gpg);
    if (objective_cut && width < tol) break;
    const Vec gt = g / width;
    const Vec pg = P * gt;
    if (n == 1) {
      c -= 0.5 * pg;
      P *= 0.25;
    } else {
      c -= pg / (nn + 1.0);
      P = (nn * nn / (nn * nn - 1.0)) * (P - (2.0 / (nn + 1.0)) * pg * pg.transpose());
      P = 0.5 * (P + P.transpose());
    }
  }
  return best;
}

}  // namespace trunclap::detail
