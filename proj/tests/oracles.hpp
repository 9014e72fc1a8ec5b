#pragma once

// Independent reference computations used by unit and acceptance tests. None
// of these call into the library's solvers.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <utility>
#include <vector>

namespace oracle {

/// Sub-intervals of [-h, h] on which a + t b lies within w/2 of period * Z.
inline std::vector<std::pair<double, double>> strip_hits(double a, double b, double h, double w,
                                                         double period) {
  std::vector<std::pair<double, double>> out;
  if (std::abs(b) < 1e-14) {
    const double r = a - period * std::round(a / period);
    if (std::abs(r) <= 0.5 * w) out.emplace_back(-h, h);
    return out;
  }
  const double lo = std::min(a - h * b, a + h * b), hi = std::max(a - h * b, a + h * b);
  const auto k0 = static_cast<long>(std::floor((lo - 0.5 * w) / period));
  const auto k1 = static_cast<long>(std::ceil((hi + 0.5 * w) / period));
  for (long k = k0; k <= k1; ++k) {
    double t0 = (k * period - 0.5 * w - a) / b, t1 = (k * period + 0.5 * w - a) / b;
    if (t0 > t1) std::swap(t0, t1);
    t0 = std::max(t0, -h);
    t1 = std::min(t1, h);
    if (t1 > t0) out.emplace_back(t0, t1);
  }
  return out;
}

inline double union_length(std::vector<std::pair<double, double>> iv) {
  std::sort(iv.begin(), iv.end());
  double total = 0.0, cur_lo = 0.0, cur_hi = -std::numeric_limits<double>::infinity();
  for (auto [a, b] : iv) {
    if (a > cur_hi) {
      if (cur_hi > cur_lo) total += cur_hi - cur_lo;
      cur_lo = a;
      cur_hi = b;
    } else {
      cur_hi = std::max(cur_hi, b);
    }
  }
  if (cur_hi > cur_lo) total += cur_hi - cur_lo;
  return total;
}

/// Fraction of the segment {c + t u : |t| <= ell/2} lying in the union of
/// vertical and horizontal strips of the given width and period, computed by
/// exact interval intersection.
inline double grid_pattern_segment(double cx, double cy, double angle, double ell, double width,
                                   double period) {
  const double h = 0.5 * ell;
  auto iv = strip_hits(cx, std::cos(angle), h, width, period);
  auto iy = strip_hits(cy, std::sin(angle), h, width, period);
  iv.insert(iv.end(), iy.begin(), iy.end());
  return union_length(std::move(iv)) / ell;
}

/// Brute-force minimum of grid_pattern_segment over a centers x angles grid.
/// The pattern is period-periodic, so centers range over one unit cell.
inline double grid_pattern_gcc(double ell, double width, double period, int centers, int angles) {
  double best = 1.0;
  for (int i = 0; i < centers; ++i)
    for (int j = 0; j < centers; ++j)
      for (int k = 0; k < angles; ++k) {
        const double cx = period * (i + 0.5) / centers, cy = period * (j + 0.5) / centers;
        const double th = std::numbers::pi * k / angles;
        best = std::min(best, grid_pattern_segment(cx, cy, th, ell, width, period));
      }
  return best;
}

/// Half the minimal width of a planar point set by brute force over lines
/// through point pairs (the optimal slab has a side through two points).
inline double half_width_pairs(const std::vector<std::array<double, 3>>& p) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = i + 1; j < p.size(); ++j) {
      const double dx = p[j][0] - p[i][0], dy = p[j][1] - p[i][1];
      const double n = std::hypot(dx, dy);
      if (n == 0.0) continue;
      double lo = std::numeric_limits<double>::infinity(), hi = -lo;
      for (const auto& q : p) {
        const double t = (-(q[0] - p[i][0]) * dy + (q[1] - p[i][1]) * dx) / n;
        lo = std::min(lo, t);
        hi = std::max(hi, t);
      }
      best = std::min(best, hi - lo);
    }
  return 0.5 * best;
}

/// Off-diagonal Gram entry magnitude for frequencies m and m + e_1 observed on
/// the half torus [0, L/2) x T^{d-1}: |N^{-1} sum_{j < N/2} e^{-2 pi i j / N}|.
inline double half_torus_offdiag(int n) {
  std::complex<double> acc = 0.0;
  for (int j = 0; j < n / 2; ++j) acc += std::polar(1.0, -2.0 * std::numbers::pi * j / n);
  return std::abs(acc) / n;
}

/// Smallest eigenvalue of [[1/2, b], [b, 1/2]].
inline double two_by_two_min(double b) { return 0.5 - b; }

/// Exact solution of u'' + c u' + w^2 u = 0 with u(0) = u0, u'(0) = v0 for
/// the underdamped case w > c / 2. Returns (u, u').
inline std::pair<double, double> damped_mode(double c, double w, double u0, double v0, double t) {
  const double nu = std::sqrt(w * w - 0.25 * c * c);
  const double a = u0, b = (v0 + 0.5 * c * u0) / nu;
  const double e = std::exp(-0.5 * c * t);
  const double cs = std::cos(nu * t), sn = std::sin(nu * t);
  const double u = e * (a * cs + b * sn);
  const double du = e * (-0.5 * c * (a * cs + b * sn) + nu * (-a * sn + b * cs));
  return {u, du};
}

/// Half-width of the thinnest slab containing an annular arc of radii
/// [r_in, r_out] and opening angle theta (theta <= pi): the slab normal to
/// the bisector spans from the inner chord ends to the outer apex.
inline double annular_arc_half_width(double r_in, double r_out, double theta) {
  return 0.5 * (r_out - r_in * std::cos(0.5 * theta));
}

}  // namespace oracle
