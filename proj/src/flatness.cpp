#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "plslab/error.hpp"
#include "plslab/geometry.hpp"

namespace plslab {
namespace {

constexpr int kSphereDirections = 20000;
constexpr double kSlackFraction = 0.02;

struct Sphere {
  Point c{};
  double r2 = 0.0;

  bool contains(const Point& p) const {
    double d2 = 0.0;
    for (int a = 0; a < 3; ++a) d2 += (p[a] - c[a]) * (p[a] - c[a]);
    return d2 <= r2 * (1.0 + 1e-12) + 1e-24;
  }
};

Point sub(const Point& a, const Point& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
double dot3(const Point& a, const Point& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
Point cross3(const Point& a, const Point& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

Sphere sphere_of(const Point& p) { return {p, 0.0}; }

Sphere sphere_of(const Point& p, const Point& q) {
  Sphere s;
  for (int a = 0; a < 3; ++a) s.c[a] = 0.5 * (p[a] + q[a]);
  const Point d = sub(p, q);
  s.r2 = 0.25 * dot3(d, d);
  return s;
}

// Smallest sphere with p, q, r on its boundary (circumcircle in their plane).
Sphere sphere_of(const Point& p, const Point& q, const Point& r) {
  const Point a = sub(q, p), b = sub(r, p);
  const Point axb = cross3(a, b);
  const double denom = 2.0 * dot3(axb, axb);
  const double scale = std::max({dot3(a, a), dot3(b, b), 1e-300});
  if (denom <= 1e-14 * scale * scale) {
    // Collinear: the farthest pair spans the ball.
    Sphere best = sphere_of(p, q);
    for (const Sphere& s : {sphere_of(p, r), sphere_of(q, r)})
      if (s.r2 > best.r2) best = s;
    return best;
  }
  const Point t1 = cross3(axb, a), t2 = cross3(b, axb);
  Point off{};
  for (int i = 0; i < 3; ++i) off[i] = (dot3(b, b) * t1[i] + dot3(a, a) * t2[i]) / denom;
  return {{p[0] + off[0], p[1] + off[1], p[2] + off[2]}, dot3(off, off)};
}

Sphere sphere_of(const Point& p, const Point& q, const Point& r, const Point& s) {
  const Point a = sub(q, p), b = sub(r, p), c = sub(s, p);
  const double det = dot3(a, cross3(b, c));
  const double scale = std::max({dot3(a, a), dot3(b, b), dot3(c, c), 1e-300});
  if (std::abs(det) <= 1e-12 * std::pow(scale, 1.5)) {
    // Coplanar: the smallest triangle circumsphere containing all four.
    Sphere best{{}, std::numeric_limits<double>::infinity()};
    const Point pts[4] = {p, q, r, s};
    for (int skip = 0; skip < 4; ++skip) {
      Point t[3];
      int n = 0;
      for (int i = 0; i < 4; ++i)
        if (i != skip) t[n++] = pts[i];
      const Sphere cand = sphere_of(t[0], t[1], t[2]);
      if (cand.contains(pts[skip]) && cand.r2 < best.r2) best = cand;
    }
    return best;
  }
  // Solve 2 [a b c]^T x = (|a|^2, |b|^2, |c|^2) by Cramer's rule.
  const double ra = dot3(a, a), rb = dot3(b, b), rc = dot3(c, c);
  const Point bc = cross3(b, c), ca = cross3(c, a), ab = cross3(a, b);
  Point off{};
  for (int i = 0; i < 3; ++i) off[i] = (ra * bc[i] + rb * ca[i] + rc * ab[i]) / (2.0 * det);
  return {{p[0] + off[0], p[1] + off[1], p[2] + off[2]}, dot3(off, off)};
}

// Move-to-front Welzl, unrolled to the boundary depth of dimension <= 3.
Sphere min_sphere(std::vector<Point> pts, int dim) {
  std::mt19937_64 rng(0x5eed);
  std::shuffle(pts.begin(), pts.end(), rng);
  const std::size_t n = pts.size();
  Sphere s = sphere_of(pts[0]);
  for (std::size_t i = 1; i < n; ++i) {
    if (s.contains(pts[i])) continue;
    s = sphere_of(pts[i]);
    for (std::size_t j = 0; j < i; ++j) {
      if (s.contains(pts[j])) continue;
      s = sphere_of(pts[i], pts[j]);
      if (dim < 2) continue;
      for (std::size_t l = 0; l < j; ++l) {
        if (s.contains(pts[l])) continue;
        s = sphere_of(pts[i], pts[j], pts[l]);
        if (dim < 3) continue;
        for (std::size_t m = 0; m < l; ++m) {
          if (s.contains(pts[m])) continue;
          s = sphere_of(pts[i], pts[j], pts[l], pts[m]);
        }
      }
    }
  }
  return s;
}

double cross2(const Point& o, const Point& a, const Point& b) {
  return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
}

std::vector<Point> convex_hull_2d(std::vector<Point> pts) {
  std::sort(pts.begin(), pts.end(), [](const Point& a, const Point& b) {
    return a[0] < b[0] || (a[0] == b[0] && a[1] < b[1]);
  });
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](const Point& a, const Point& b) { return a[0] == b[0] && a[1] == b[1]; }),
            pts.end());
  if (pts.size() < 3) return pts;
  std::vector<Point> hull(2 * pts.size());
  std::size_t k = 0;
  for (const auto& p : pts) {
    while (k >= 2 && cross2(hull[k - 2], hull[k - 1], p) <= 0.0) --k;
    hull[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross2(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

double bounding_diagonal(std::span<const Point> pts, int dim) {
  Point lo = pts[0], hi = pts[0];
  for (const auto& p : pts)
    for (int a = 0; a < dim; ++a) {
      lo[a] = std::min(lo[a], p[a]);
      hi[a] = std::max(hi[a], p[a]);
    }
  double s = 0.0;
  for (int a = 0; a < dim; ++a) s += (hi[a] - lo[a]) * (hi[a] - lo[a]);
  return std::sqrt(s);
}

Point direction(double theta, double phi) {
  return {std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta)};
}

// Objective for 3D sampling modes: half-width along a normal (plane_dim 2) or
// enclosing radius of the projection along a line direction (plane_dim 1).
double directional_objective(std::span<const Point> pts, const Point& u, int plane_dim) {
  if (plane_dim == 2) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto& p : pts) {
      const double t = dot3(p, u);
      lo = std::min(lo, t);
      hi = std::max(hi, t);
    }
    return 0.5 * (hi - lo);
  }
  Point e1 = std::abs(u[0]) < 0.9 ? Point{1.0, 0.0, 0.0} : Point{0.0, 1.0, 0.0};
  const double pr = dot3(e1, u);
  for (int a = 0; a < 3; ++a) e1[a] -= pr * u[a];
  const double n1 = std::sqrt(dot3(e1, e1));
  for (auto& x : e1) x /= n1;
  const Point e2 = cross3(u, e1);
  std::vector<Point> proj;
  proj.reserve(pts.size());
  for (const auto& p : pts) proj.push_back({dot3(p, e1), dot3(p, e2), 0.0});
  return std::sqrt(min_sphere(std::move(proj), 2).r2);
}

FlatnessResult sampled_flatness(std::span<const Point> pts, int plane_dim) {
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  double best = std::numeric_limits<double>::infinity();
  double best_theta = 0.0, best_phi = 0.0;
  for (int i = 0; i < kSphereDirections; ++i) {
    const double z = (i + 0.5) / kSphereDirections;
    const double theta = std::acos(z);
    const double phi = std::fmod(golden * i, 2.0 * std::numbers::pi);
    const double f = directional_objective(pts, direction(theta, phi), plane_dim);
    if (f < best) {
      best = f;
      best_theta = theta;
      best_phi = phi;
    }
  }
  double step = std::sqrt(2.0 * std::numbers::pi / kSphereDirections);
  for (int sweep = 0; sweep < 40; ++sweep) {
    bool improved = false;
    for (auto [dt, dp] : {std::pair{1.0, 0.0}, {-1.0, 0.0}, {0.0, 1.0}, {0.0, -1.0}}) {
      const double theta = best_theta + dt * step, phi = best_phi + dp * step;
      const double f = directional_objective(pts, direction(theta, phi), plane_dim);
      if (f < best) {
        best = f;
        best_theta = theta;
        best_phi = phi;
        improved = true;
      }
    }
    if (!improved) step *= 0.5;
  }
  return {best, false, kSlackFraction * bounding_diagonal(pts, 3)};
}

}  // namespace

double min_enclosing_radius(std::span<const Point> points, int dim) {
  if (points.empty()) throw Error(ErrorKind::Domain, "flatness of an empty point set");
  if (dim == 1) {
    const auto [lo, hi] = std::minmax_element(points.begin(), points.end(),
                                              [](const Point& a, const Point& b) { return a[0] < b[0]; });
    return 0.5 * ((*hi)[0] - (*lo)[0]);
  }
  std::vector<Point> pts(points.begin(), points.end());
  for (auto& p : pts)
    for (int a = dim; a < 3; ++a) p[a] = 0.0;
  return std::sqrt(min_sphere(std::move(pts), dim).r2);
}

double min_half_width_2d(std::span<const Point> points) {
  if (points.empty()) throw Error(ErrorKind::Domain, "flatness of an empty point set");
  const auto h = convex_hull_2d({points.begin(), points.end()});
  const std::size_t m = h.size();
  if (m < 3) return 0.0;
  double best = std::numeric_limits<double>::infinity();
  std::size_t j = 1;
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t ni = (i + 1) % m;
    while (cross2(h[i], h[ni], h[(j + 1) % m]) > cross2(h[i], h[ni], h[j])) j = (j + 1) % m;
    const double edge = std::hypot(h[ni][0] - h[i][0], h[ni][1] - h[i][1]);
    best = std::min(best, cross2(h[i], h[ni], h[j]) / edge);
  }
  return 0.5 * best;
}

FlatnessResult flatness(std::span<const Point> points, int dim, int plane_dim) {
  if (points.empty()) throw Error(ErrorKind::Domain, "flatness of an empty point set");
  if (dim < 1 || dim > 3) throw Error(ErrorKind::Domain, "flatness supports d <= 3");
  if (plane_dim < 0) throw Error(ErrorKind::Domain, "plane dimension must be non-negative");
  if (plane_dim > dim) throw Error(ErrorKind::Domain, "plane dimension exceeds ambient dimension");
  if (plane_dim == dim) return {0.0, true, 0.0};
  if (plane_dim == 0) return {min_enclosing_radius(points, dim), true, 0.0};
  if (dim == 2) return {min_half_width_2d(points), true, 0.0};
  return sampled_flatness(points, plane_dim);
}

}  // namespace plslab
