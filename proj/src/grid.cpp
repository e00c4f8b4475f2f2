#include "trunclap/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace trunclap {

Drift Drift::make_constant(double b, Side sign) {
  Drift d;
  d.kind = Kind::constant;
  d.constant = b;
  d.sign = sign;
  return d;
}

Drift Drift::make_radial(ScalarFn b, Side sign, Vec center) {
  Drift d;
  d.kind = Kind::radial;
  d.radial = std::move(b);
  d.sign = sign;
  d.center = std::move(center);
  return d;
}

Drift Drift::make_callable(PointFn b, Side sign) {
  Drift d;
  d.kind = Kind::callable;
  d.field = std::move(b);
  d.sign = sign;
  return d;
}

double Drift::magnitude(const Vec& x) const {
  switch (kind) {
    case Kind::constant:
      return constant;
    case Kind::radial:
      return radial(center.size() == 0 ? x.norm() : (x - center).norm());
    case Kind::callable:
      return field(x);
  }
  return 0.0;
}

double Drift::coefficient(const Vec& x) const {
  const double m = magnitude(x);
  return sign == Side::plus ? m : -m;
}

std::vector<LatticeDir> lattice_directions(int dim, int width) {
  if (dim < 2 || dim > 3) throw std::invalid_argument("lattice_directions: dimension must be 2 or 3");
  if (width < 1) throw std::invalid_argument("lattice_directions: width must be >= 1");
  std::vector<LatticeDir> out;
  const int zr = dim == 3 ? width : 0;
  for (int a = -width; a <= width; ++a)
    for (int b = -width; b <= width; ++b)
      for (int c = -zr; c <= zr; ++c) {
        if (a == 0 && b == 0 && c == 0) continue;
        if (std::gcd(std::gcd(std::abs(a), std::abs(b)), std::abs(c)) != 1) continue;
        // canonical representative: first nonzero entry positive
        const int first = a != 0 ? a : (b != 0 ? b : c);
        if (first < 0) continue;
        out.push_back({a, b, c});
      }
  // axes first, then by length
  std::stable_sort(out.begin(), out.end(), [](const LatticeDir& x, const LatticeDir& y) {
    return x[0] * x[0] + x[1] * x[1] + x[2] * x[2] < y[0] * y[0] + y[1] * y[1] + y[2] * y[2];
  });
  return out;
}

std::vector<std::vector<int>> frame_catalog(int dim, int k, const std::vector<LatticeDir>& dirs) {
  if (k < 1 || k > dim) throw std::invalid_argument("frame_catalog: need 1 <= k <= N");
  std::vector<std::vector<int>> out;
  const int n = static_cast<int>(dirs.size());
  if (k == 1) {
    for (int d = 0; d < n; ++d) out.push_back({d});
    return out;
  }
  auto dot = [&](int i, int j) {
    return dirs[i][0] * dirs[j][0] + dirs[i][1] * dirs[j][1] + dirs[i][2] * dirs[j][2];
  };
  if (k == dim) {
    std::vector<int> axes;
    for (int d = 0; d < n; ++d)
      if (std::abs(dirs[d][0]) + std::abs(dirs[d][1]) + std::abs(dirs[d][2]) == 1) axes.push_back(d);
    out.push_back(axes);
    return out;
  }
  std::vector<int> cur;
  std::function<void(int)> rec = [&](int start) {
    if (static_cast<int>(cur.size()) == k) {
      out.push_back(cur);
      return;
    }
    for (int d = start; d < n; ++d) {
      bool ok = true;
      for (int c : cur) ok = ok && dot(c, d) == 0;
      if (!ok) continue;
      cur.push_back(d);
      rec(d + 1);
      cur.pop_back();
    }
  };
  rec(0);
  if (out.empty()) throw std::invalid_argument("frame_catalog: empty");
  return out;
}

Grid::Grid(const ConvexBody& body, double h, int width, int k) : body_(body), dim_(body.dim()), h_(h) {
  if (!(h > 0.0)) throw std::invalid_argument("Grid: spacing must be positive");
  if (dim_ < 2 || dim_ > 3) throw std::invalid_argument("Grid: dimension must be 2 or 3");
  if (!body.bounded()) throw std::invalid_argument("Grid: body must be bounded");
  if (k < 1 || k > dim_) throw std::invalid_argument("Grid: need 1 <= k <= N");
  dirs_ = lattice_directions(dim_, width);
  frames_ = frame_catalog(dim_, k, dirs_);

  const auto [blo, bhi] = body.bounding_box();
  for (int a = 0; a < dim_; ++a) {
    lo_[a] = static_cast<int>(std::floor(blo[a] / h)) - 1;
    hi_[a] = static_cast<int>(std::ceil(bhi[a] / h)) + 1;
  }
  std::size_t total = 1;
  for (int a = 0; a < dim_; ++a) total *= static_cast<std::size_t>(hi_[a] - lo_[a] + 1);
  index_map_.assign(total, -1);

  std::array<int, 3> idx{0, 0, 0};
  for (idx[2] = dim_ == 3 ? lo_[2] : 0; idx[2] <= (dim_ == 3 ? hi_[2] : 0); ++idx[2])
    for (idx[1] = lo_[1]; idx[1] <= hi_[1]; ++idx[1])
      for (idx[0] = lo_[0]; idx[0] <= hi_[0]; ++idx[0]) {
        Vec x(dim_);
        for (int a = 0; a < dim_; ++a) x[a] = h * idx[a];
        if (!body.contains(x)) continue;
        index_map_[key(idx)] = static_cast<int>(nodes_.size());
        nodes_.push_back(idx);
        pos_.push_back(x);
      }

  kind_.assign(nodes_.size(), NodeKind::interior);
  for (std::size_t i = 0; i < nodes_.size(); ++i)
    for (int a = 0; a < dim_ && kind_[i] == NodeKind::interior; ++a)
      for (int s : {-1, 1}) {
        auto nb = nodes_[i];
        nb[a] += s;
        if (lookup(nb) < 0) kind_[i] = NodeKind::boundary_adjacent;
      }

  const std::size_t nd = dirs_.size();
  arms_.resize(nodes_.size() * nd * 2);
  min_arm_.assign(nodes_.size(), h);
  for (std::size_t i = 0; i < nodes_.size(); ++i)
    for (std::size_t d = 0; d < nd; ++d) {
      Vec v(dim_);
      for (int a = 0; a < dim_; ++a) v[a] = dirs_[d][a];
      const double full = h * v.norm();
      for (int side = 0; side < 2; ++side) {
        const int s = side == 0 ? 1 : -1;
        auto nb = nodes_[i];
        for (int a = 0; a < dim_; ++a) nb[a] += s * dirs_[d][a];
        Arm arm;
        arm.neighbor = lookup(nb);
        if (arm.neighbor >= 0) {
          arm.length = full;
        } else {
          const Vec out = pos_[i] + (s * h) * v;
          const double frac = body.crossing_fraction(pos_[i], out, 1e-12);
          arm.length = std::max(frac, 1e-12) * full;
        }
        arms_[(i * nd + d) * 2 + side] = arm;
        min_arm_[i] = std::min(min_arm_[i], arm.length);
      }
    }
}

long long Grid::key(const std::array<int, 3>& idx) const {
  long long k = 0;
  for (int a = dim_ - 1; a >= 0; --a) k = k * (hi_[a] - lo_[a] + 1) + (idx[a] - lo_[a]);
  return k;
}

int Grid::lookup(const std::array<int, 3>& idx) const {
  for (int a = 0; a < dim_; ++a)
    if (idx[a] < lo_[a] || idx[a] > hi_[a]) return -1;
  return index_map_[key(idx)];
}

int Grid::nearest_node(const Vec& x) const {
  std::array<int, 3> idx{0, 0, 0};
  for (int a = 0; a < dim_; ++a) idx[a] = static_cast<int>(std::lround(x[a] / h_));
  return lookup(idx);
}

double Grid::interpolate(const Eigen::VectorXd& u, const Vec& x) const {
  std::array<int, 3> base{0, 0, 0};
  std::array<double, 3> t{0.0, 0.0, 0.0};
  for (int a = 0; a < dim_; ++a) {
    const double s = x[a] / h_;
    base[a] = static_cast<int>(std::floor(s));
    t[a] = s - base[a];
  }
  double val = 0.0;
  for (int corner = 0; corner < (1 << dim_); ++corner) {
    double w = 1.0;
    auto idx = base;
    for (int a = 0; a < dim_; ++a) {
      const int bit = (corner >> a) & 1;
      idx[a] += bit;
      w *= bit ? t[a] : 1.0 - t[a];
    }
    if (w == 0.0) continue;
    const int n = lookup(idx);
    if (n >= 0) val += w * u[n];
  }
  return val;
}

double second_difference(const Grid& g, const Eigen::VectorXd& u, int node, int d) {
  const Arm& p = g.arm(node, d, 0);
  const Arm& m = g.arm(node, d, 1);
  const double up = p.neighbor >= 0 ? u[p.neighbor] : 0.0;
  const double um = m.neighbor >= 0 ? u[m.neighbor] : 0.0;
  const double c = u[node];
  return 2.0 / (p.length + m.length) * ((up - c) / p.length + (um - c) / m.length);
}

double discrete_pk_plus(const Grid& g, const Eigen::VectorXd& u, int node, int* frame) {
  double best = -std::numeric_limits<double>::infinity();
  int arg = 0;
  const auto& frames = g.frames();
  for (std::size_t f = 0; f < frames.size(); ++f) {
    double s = 0.0;
    for (int d : frames[f]) s += second_difference(g, u, node, d);
    if (s > best) {
      best = s;
      arg = static_cast<int>(f);
    }
  }
  if (frame) *frame = arg;
  return best;
}

double upwind_grad_norm(const Grid& g, const Eigen::VectorXd& u, int node, Side sign, int* arm) {
  const int nd = static_cast<int>(g.directions().size());
  double best = 0.0;
  int arg = -1;
  const double c = u[node];
  for (int d = 0; d < nd; ++d)
    for (int side = 0; side < 2; ++side) {
      const Arm& a = g.arm(node, d, side);
      const double v = ((a.neighbor >= 0 ? u[a.neighbor] : 0.0) - c) / a.length;
      if (sign == Side::plus ? v > best : v < best) {
        best = v;
        arg = 2 * d + side;
      }
    }
  if (arm) *arm = arg;
  return best;
}

double node_residual(const Grid& g, const Eigen::VectorXd& u, int node, double c, double f) {
  double r = discrete_pk_plus(g, u, node) - f;
  if (c > 0.0)
    r += c * upwind_grad_norm(g, u, node, Side::plus);
  else if (c < 0.0)
    r += -c * upwind_grad_norm(g, u, node, Side::minus);
  return r;
}

Eigen::VectorXd sample_nodes(const Grid& g, const PointFn& fn) {
  Eigen::VectorXd out(g.size());
  for (int i = 0; i < g.size(); ++i) out[i] = fn(g.position(i));
  return out;
}

Eigen::VectorXd drift_coefficients(const Grid& g, const Drift& d) {
  Eigen::VectorXd out(g.size());
  for (int i = 0; i < g.size(); ++i) out[i] = d.coefficient(g.position(i));
  return out;
}

double residual_norm(const Grid& g, const Eigen::VectorXd& u, const Eigen::VectorXd& f, const SchemeConfig& cfg) {
  const Eigen::VectorXd c = drift_coefficients(g, cfg.drift);
  double r = 0.0;
  for (int i = 0; i < g.size(); ++i) r = std::max(r, std::abs(node_residual(g, u, i, c[i], f[i])));
  return r;
}

}  // namespace trunclap
