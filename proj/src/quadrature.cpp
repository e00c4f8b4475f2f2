#include "trunclap/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace trunclap {

namespace {

double simpson_step(const ScalarFn& f, double a, double fa, double m, double fm, double b,
                    double fb, double whole, double tol, int depth) {
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return simpson_step(f, a, fa, lm, flm, m, fm, left, 0.5 * tol, depth - 1) +
         simpson_step(f, m, fm, rm, frm, b, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

double adaptive_simpson(const ScalarFn& f, double a, double b, double tol, int max_depth) {
  if (a == b) return 0.0;
  const double m = 0.5 * (a + b);
  const double fa = f(a);
  const double fm = f(m);
  const double fb = f(b);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson_step(f, a, fa, m, fm, b, fb, whole, tol, max_depth);
}

CumulativeIntegral::CumulativeIntegral(ScalarFn f, double a, double b, int cells, double tol)
    : f_(std::move(f)), a_(a), b_(b), tol_(tol) {
  if (!(b >= a) || cells < 1) throw std::invalid_argument("bad cumulative integral range");
  nodes_.resize(cells + 1);
  prefix_.assign(cells + 1, 0.0);
  for (int i = 0; i <= cells; ++i) nodes_[i] = a + (b - a) * i / cells;
  nodes_[cells] = b;
  for (int i = 0; i < cells; ++i)
    prefix_[i + 1] = prefix_[i] + adaptive_simpson(f_, nodes_[i], nodes_[i + 1], tol_);
}

double CumulativeIntegral::operator()(double x) const {
  if (x <= a_) return 0.0;
  if (x >= b_) return total();
  const auto cells = static_cast<double>(nodes_.size() - 1);
  auto i = static_cast<std::size_t>((x - a_) / (b_ - a_) * cells);
  i = std::min(i, nodes_.size() - 2);
  if (x == nodes_[i]) return prefix_[i];
  return prefix_[i] + adaptive_simpson(f_, nodes_[i], x, tol_);
}

double bisect_root(const ScalarFn& f, double lo, double hi, double xtol) {
  double flo = f(lo);
  for (int it = 0; it < 200 && hi - lo > xtol; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double first_nonnegative(const ScalarFn& f, double lo, double hi, int cells, double xtol) {
  double prev = lo;
  for (int i = 1; i <= cells; ++i) {
    const double x = lo + (hi - lo) * i / cells;
    if (f(x) >= 0.0) {
      // f(prev) < 0 for i > 1; for i == 1 shrink toward lo using the sign at x.
      double a = prev;
      double b = x;
      for (int it = 0; it < 200 && b - a > xtol; ++it) {
        const double m = 0.5 * (a + b);
        if (f(m) >= 0.0)
          b = m;
        else
          a = m;
      }
      return b;
    }
    prev = x;
  }
  return std::numeric_limits<double>::quiet_NaN();
}

}  // namespace trunclap
