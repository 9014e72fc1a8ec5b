#include "plslab/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "plslab/error.hpp"

namespace plslab {
namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// Relative slack on closed-region boundaries so lattice points lying exactly
// on |xi| = R +- beta are not lost to rounding.
constexpr double kBoundaryRel = 1e-12;

using Vec2 = std::array<double, 2>;

Vec2 catmull_rom(const Vec2& p0, const Vec2& p1, const Vec2& p2, const Vec2& p3, double t) {
  const double t2 = t * t, t3 = t2 * t;
  Vec2 out{};
  for (int a = 0; a < 2; ++a)
    out[a] = 0.5 * (2.0 * p1[a] + (-p0[a] + p2[a]) * t + (2.0 * p0[a] - 5.0 * p1[a] + 4.0 * p2[a] - p3[a]) * t2 +
                    (-p0[a] + 3.0 * p1[a] - 3.0 * p2[a] + p3[a]) * t3);
  return out;
}

// First and second derivatives of one Catmull-Rom segment.
std::pair<Vec2, Vec2> catmull_rom_derivatives(const Vec2& p0, const Vec2& p1, const Vec2& p2,
                                              const Vec2& p3, double t) {
  Vec2 d1{}, d2{};
  for (int a = 0; a < 2; ++a) {
    const double c1 = -p0[a] + p2[a];
    const double c2 = 2.0 * p0[a] - 5.0 * p1[a] + 4.0 * p2[a] - p3[a];
    const double c3 = -p0[a] + 3.0 * p1[a] - 3.0 * p2[a] + p3[a];
    d1[a] = 0.5 * (c1 + 2.0 * c2 * t + 3.0 * c3 * t * t);
    d2[a] = 0.5 * (2.0 * c2 + 6.0 * c3 * t);
  }
  return {d1, d2};
}

double segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
  const double ux = b[0] - a[0], uy = b[1] - a[1];
  const double len2 = ux * ux + uy * uy;
  double t = len2 > 0.0 ? ((p[0] - a[0]) * ux + (p[1] - a[1]) * uy) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return std::hypot(p[0] - a[0] - t * ux, p[1] - a[1] - t * uy);
}

// Upper bound on |d/dt curve_point(t)| over t in [0, 1).
double parametric_speed(const Manifold& m) {
  switch (m.kind) {
    case Manifold::Kind::Circle:
      return 2.0 * std::numbers::pi;
    case Manifold::Kind::Ellipse:
      return 2.0 * std::numbers::pi * std::max(m.a, m.b);
    case Manifold::Kind::Spline: {
      const auto& c = m.control;
      const auto n = c.size();
      double vmax = 0.0;
      constexpr int kProbe = 256;
      for (std::size_t i = 0; i < n; ++i)
        for (int j = 0; j <= kProbe; ++j) {
          const auto d1 = catmull_rom_derivatives(c[(i + n - 1) % n], c[i], c[(i + 1) % n],
                                                  c[(i + 2) % n], static_cast<double>(j) / kProbe)
                              .first;
          vmax = std::max(vmax, std::hypot(d1[0], d1[1]));
        }
      return 1.1 * static_cast<double>(n) * vmax;
    }
    case Manifold::Kind::Sphere:
      break;
  }
  throw Error(ErrorKind::Domain, "the sphere is not a curve");
}

// Polyline approximation of R Sigma whose sagitta stays below beta * slack.
std::vector<Vec2> shell_polyline(const regions::Shell& shell) {
  const double kappa = shell.manifold.curvature_bound() / shell.radius;
  const double tol = kShellSlack * shell.beta;
  // chord h deviates from an arc of curvature kappa by at most kappa h^2 / 8
  const double h = kappa > 0.0 ? std::sqrt(8.0 * tol / kappa) : shell.beta;
  // Chords are no longer than parametric speed times the parameter step.
  const auto n = static_cast<std::size_t>(std::ceil(shell.radius * parametric_speed(shell.manifold) / h)) + 8;
  std::vector<Vec2> pts(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto p = shell.manifold.curve_point(static_cast<double>(i) / static_cast<double>(n));
    pts[i] = {shell.radius * p[0], shell.radius * p[1]};
  }
  return pts;
}

double norm(const Point& x) { return std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]); }

void check_nyquist(double extent, const TorusGrid& grid, const char* what) {
  if (extent >= grid.nyquist())
    throw Error(ErrorKind::Nyquist,
                fmt::format("{} = {:.6g} must stay below the Nyquist bound (2 pi / L)(N / 2) = {:.6g}",
                            what, extent, grid.nyquist()));
}

}  // namespace

Manifold Manifold::ellipse(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) throw Error(ErrorKind::Domain, "ellipse semi-axes must be positive");
  return {Kind::Ellipse, a, b, {}};
}

Manifold Manifold::spline(std::vector<std::array<double, 2>> control) {
  if (control.size() < 3) throw Error(ErrorKind::Domain, "a closed spline needs at least 3 points");
  return {Kind::Spline, 1.0, 1.0, std::move(control)};
}

std::array<double, 2> Manifold::curve_point(double t) const {
  switch (kind) {
    case Kind::Circle:
      return {std::cos(2.0 * std::numbers::pi * t), std::sin(2.0 * std::numbers::pi * t)};
    case Kind::Ellipse:
      return {a * std::cos(2.0 * std::numbers::pi * t), b * std::sin(2.0 * std::numbers::pi * t)};
    case Kind::Spline: {
      const auto n = control.size();
      const double u = t * static_cast<double>(n);
      const auto i = static_cast<std::size_t>(std::floor(u)) % n;
      const double f = u - std::floor(u);
      return catmull_rom(control[(i + n - 1) % n], control[i], control[(i + 1) % n],
                         control[(i + 2) % n], f);
    }
    case Kind::Sphere:
      break;
  }
  throw Error(ErrorKind::Domain, "the sphere is not a curve");
}

double Manifold::extent() const {
  switch (kind) {
    case Kind::Circle:
    case Kind::Sphere:
      return 1.0;
    case Kind::Ellipse:
      return std::max(a, b);
    case Kind::Spline: {
      double r = 0.0;
      constexpr int kProbe = 64;
      for (std::size_t i = 0; i < control.size() * kProbe; ++i) {
        const auto p = curve_point(static_cast<double>(i) / static_cast<double>(control.size() * kProbe));
        r = std::max(r, std::hypot(p[0], p[1]));
      }
      // Catmull-Rom overshoot between probes is second order in the probe step.
      return 1.01 * r;
    }
  }
  return 1.0;
}

double Manifold::curvature_bound() const {
  switch (kind) {
    case Kind::Circle:
    case Kind::Sphere:
      return 1.0;
    case Kind::Ellipse:
      return std::max(a, b) / (std::min(a, b) * std::min(a, b));
    case Kind::Spline: {
      const auto n = control.size();
      double kmax = 0.0;
      constexpr int kProbe = 256;
      for (std::size_t i = 0; i < n; ++i)
        for (int j = 0; j <= kProbe; ++j) {
          const auto [d1, d2] = catmull_rom_derivatives(control[(i + n - 1) % n], control[i],
                                                        control[(i + 1) % n], control[(i + 2) % n],
                                                        static_cast<double>(j) / kProbe);
          const double speed = std::hypot(d1[0], d1[1]);
          if (speed < 1e-12) throw Error(ErrorKind::Domain, "spline has a stationary point");
          kmax = std::max(kmax, std::abs(d1[0] * d2[1] - d1[1] * d2[0]) / (speed * speed * speed));
        }
      return 1.25 * kmax;
    }
  }
  return 1.0;
}

std::optional<double> region_extent(const SpectralRegion& region) {
  return std::visit(
      overloaded{
          [](const regions::Annulus& r) -> std::optional<double> { return r.radius + r.beta; },
          [](const regions::Ball& r) -> std::optional<double> { return r.radius; },
          [](const regions::Strip&) -> std::optional<double> { return std::nullopt; },
          [](const regions::Shell& r) -> std::optional<double> {
            return r.radius * r.manifold.extent() + r.beta;
          },
      },
      region);
}

Mask region_mask(const SpectralRegion& region, const TorusGrid& grid) {
  Mask mask(grid.size(), 0);
  const int d = grid.dim();
  std::visit(
      overloaded{
          [&](const regions::Annulus& r) {
            if (!(r.radius >= 0.0) || !(r.beta >= 0.0))
              throw Error(ErrorKind::Domain, "annulus radius and width must be non-negative");
            check_nyquist(r.radius + r.beta, grid, "R + beta");
            const double eps = kBoundaryRel * (r.radius + r.beta);
            for (std::size_t i = 0; i < grid.size(); ++i) {
              const double n = norm(grid.frequency(i));
              mask[i] = n >= r.radius - r.beta - eps && n <= r.radius + r.beta + eps;
            }
          },
          [&](const regions::Ball& r) {
            if (!(r.radius >= 0.0)) throw Error(ErrorKind::Domain, "ball radius must be non-negative");
            check_nyquist(r.radius, grid, "R");
            const double eps = kBoundaryRel * r.radius;
            for (std::size_t i = 0; i < grid.size(); ++i) mask[i] = norm(grid.frequency(i)) <= r.radius + eps;
          },
          [&](const regions::Strip& r) {
            if (r.k < 1 || r.k > d) throw Error(ErrorKind::Domain, "strip k must satisfy 1 <= k <= d");
            if (!(r.beta >= 0.0)) throw Error(ErrorKind::Domain, "strip width must be non-negative");
            check_nyquist(r.beta, grid, "beta");
            const double eps = kBoundaryRel * std::max(r.beta, grid.frequency_unit());
            for (std::size_t i = 0; i < grid.size(); ++i) {
              const Point xi = grid.frequency(i);
              bool in = true;
              for (int c = 0; c < r.k && in; ++c) {
                double eta = 0.0;
                for (int a = 0; a < d; ++a) eta += r.rotation[c][a] * xi[a];
                in = std::abs(eta) <= r.beta + eps;
              }
              mask[i] = in;
            }
          },
          [&](const regions::Shell& r) {
            if (r.manifold.dim() != d)
              throw Error(ErrorKind::Domain, "shell manifold dimension does not match the grid");
            if (!(r.radius > 0.0) || !(r.beta > 0.0))
              throw Error(ErrorKind::Domain, "shell radius and width must be positive");
            check_nyquist(r.radius * r.manifold.extent() + r.beta, grid, "R * extent + beta");
            const double eps = kBoundaryRel * (r.radius + r.beta);
            if (r.exact) {
              if (!r.manifold.has_exact_distance())
                throw Error(ErrorKind::Domain, "closed-form distance exists only for circle and sphere");
              for (std::size_t i = 0; i < grid.size(); ++i)
                mask[i] = std::abs(norm(grid.frequency(i)) - r.radius) <= r.beta + eps;
              return;
            }
            const auto poly = shell_polyline(r);
            double rmin = std::numeric_limits<double>::infinity();
            for (const auto& p : poly) rmin = std::min(rmin, std::hypot(p[0], p[1]));
            const double rmax = r.radius * r.manifold.extent();
            for (std::size_t i = 0; i < grid.size(); ++i) {
              const Point xi = grid.frequency(i);
              const double n = norm(xi);
              if (n > rmax + r.beta + eps || n < rmin - r.beta - eps) continue;
              double best = std::numeric_limits<double>::infinity();
              for (std::size_t j = 0; j < poly.size() && best > r.beta; ++j)
                best = std::min(best, segment_distance({xi[0], xi[1]}, poly[j], poly[(j + 1) % poly.size()]));
              mask[i] = best <= r.beta + eps;
            }
          },
      },
      region);
  if (std::none_of(mask.begin(), mask.end(), [](std::uint8_t v) { return v != 0; }))
    throw Error(ErrorKind::Domain, "spectral region contains no lattice point");
  return mask;
}

std::size_t mask_count(const Mask& mask) {
  return static_cast<std::size_t>(std::count_if(mask.begin(), mask.end(), [](std::uint8_t v) { return v != 0; }));
}

std::vector<Point> mask_points(const Mask& mask, const TorusGrid& grid,
                               std::optional<std::pair<Point, double>> restrict_to) {
  if (mask.size() != grid.size()) throw Error(ErrorKind::Shape, "mask does not match grid");
  std::vector<Point> out;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (!mask[i]) continue;
    const Point xi = grid.frequency(i);
    if (restrict_to) {
      const auto& [c, r] = *restrict_to;
      if (std::hypot(xi[0] - c[0], xi[1] - c[1], xi[2] - c[2]) > r) continue;
    }
    out.push_back(xi);
  }
  return out;
}

FlatnessResult mask_flatness(const Mask& mask, const TorusGrid& grid, int plane_dim,
                             std::optional<std::pair<Point, double>> restrict_to) {
  const auto pts = mask_points(mask, grid, restrict_to);
  if (pts.empty()) throw Error(ErrorKind::Domain, "no mask points inside the restriction ball");
  return flatness(pts, grid.dim(), plane_dim);
}

Json to_json(const Manifold& m) {
  switch (m.kind) {
    case Manifold::Kind::Circle:
      return {{"type", "circle"}};
    case Manifold::Kind::Sphere:
      return {{"type", "sphere"}};
    case Manifold::Kind::Ellipse:
      return {{"type", "ellipse"}, {"a", m.a}, {"b", m.b}};
    case Manifold::Kind::Spline: {
      Json pts = Json::array();
      for (const auto& p : m.control) pts.push_back({p[0], p[1]});
      return {{"type", "spline"}, {"points", pts}};
    }
  }
  return {};
}

Json to_json(const SpectralRegion& region) {
  return std::visit(
      overloaded{
          [](const regions::Annulus& r) {
            return Json{{"type", "annulus"}, {"R", r.radius}, {"beta", r.beta}};
          },
          [](const regions::Ball& r) { return Json{{"type", "ball"}, {"R", r.radius}}; },
          [](const regions::Strip& r) {
            Json rot = Json::array();
            for (const auto& row : r.rotation) rot.push_back({row[0], row[1], row[2]});
            return Json{{"type", "strip"}, {"k", r.k}, {"beta", r.beta}, {"rotation", rot}};
          },
          [](const regions::Shell& r) {
            return Json{{"type", "shell"}, {"manifold", to_json(r.manifold)}, {"R", r.radius},
                        {"beta", r.beta}, {"distance", r.exact ? "exact" : "sampled"}};
          },
      },
      region);
}

Manifold manifold_from_json(ConfigNode node) {
  const std::string type = node.string("type");
  Manifold m;
  try {
    if (type == "circle") {
      m = Manifold::circle();
    } else if (type == "sphere") {
      m = Manifold::sphere();
    } else if (type == "ellipse") {
      const double a = node.number("a"), b = node.number("b");
      m = Manifold::ellipse(a, b);
    } else if (type == "spline") {
      std::vector<std::array<double, 2>> pts;
      const auto items = node.array("points");
      for (std::size_t i = 0; i < items.size(); ++i) {
        const auto& p = items[i];
        if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number())
          throw Error(ErrorKind::Config, "expected a pair of numbers",
                      node.key_path("points") + "[" + std::to_string(i) + "]");
        pts.push_back({p[0].get<double>(), p[1].get<double>()});
      }
      m = Manifold::spline(std::move(pts));
    } else {
      throw Error(ErrorKind::Config, "unknown manifold type '" + type + "'", node.key_path("type"));
    }
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::Domain) throw;
    throw Error(ErrorKind::Config, e.what(), node.path());
  }
  node.finish();
  return m;
}

SpectralRegion region_from_json(ConfigNode node, double lattice_unit) {
  const std::string type = node.string("type");
  const std::string units = node.string_or("units", "physical");
  double scale = 1.0;
  if (units == "lattice")
    scale = lattice_unit;
  else if (units != "physical")
    throw Error(ErrorKind::Config, "units must be 'physical' or 'lattice'", node.key_path("units"));

  SpectralRegion region;
  if (type == "annulus") {
    region = regions::Annulus{scale * node.number("R"), scale * node.number("beta")};
  } else if (type == "ball") {
    region = regions::Ball{scale * node.number("R")};
  } else if (type == "strip") {
    regions::Strip s{static_cast<int>(node.integer("k")), scale * node.number("beta")};
    if (node.has("rotation") && node.has("angle"))
      throw Error(ErrorKind::Config, "give either rotation or angle", node.key_path("angle"));
    if (node.has("angle")) {
      const double th = node.number("angle");
      s.rotation[0] = {std::cos(th), std::sin(th), 0.0};
      s.rotation[1] = {-std::sin(th), std::cos(th), 0.0};
    } else if (node.has("rotation")) {
      const auto rows = node.array("rotation");
      if (rows.size() != 3)
        throw Error(ErrorKind::Config, "rotation must be a 3x3 matrix", node.key_path("rotation"));
      for (std::size_t i = 0; i < 3; ++i) {
        if (!rows[i].is_array() || rows[i].size() != 3)
          throw Error(ErrorKind::Config, "rotation must be a 3x3 matrix", node.key_path("rotation"));
        for (std::size_t j = 0; j < 3; ++j) s.rotation[i][j] = rows[i][j].get<double>();
      }
    }
    region = s;
  } else if (type == "shell") {
    regions::Shell s{manifold_from_json(node.child("manifold")), scale * node.number("R"),
                     scale * node.number("beta")};
    const std::string mode = node.string_or("distance", s.manifold.has_exact_distance() ? "exact" : "sampled");
    if (mode != "exact" && mode != "sampled")
      throw Error(ErrorKind::Config, "distance must be 'exact' or 'sampled'", node.key_path("distance"));
    s.exact = mode == "exact";
    if (s.exact && !s.manifold.has_exact_distance())
      throw Error(ErrorKind::Config, "this manifold has no closed-form distance", node.key_path("distance"));
    region = s;
  } else {
    throw Error(ErrorKind::Config, "unknown region type '" + type + "'", node.key_path("type"));
  }
  node.finish();
  return region;
}

}  // namespace plslab
