#pragma once

// Frequency-space regions and their masks on the lattice xi_m = (2 pi / L) m.
// All radii and widths are in physical frequency units.

#include <array>
#include <optional>
#include <variant>
#include <vector>

#include "plslab/config.hpp"
#include "plslab/geometry.hpp"
#include "plslab/lattice.hpp"

namespace plslab {

/// Membership slack for sampled shell distances, as a fraction of beta.
inline constexpr double kShellSlack = 0.01;

/// Compact hypersurface Sigma used for shells U_beta(R Sigma).
struct Manifold {
  enum class Kind { Circle, Ellipse, Spline, Sphere };
  Kind kind = Kind::Circle;
  double a = 1.0, b = 1.0;                       // ellipse semi-axes
  std::vector<std::array<double, 2>> control;    // closed Catmull-Rom control points

  static Manifold circle() { return {}; }
  static Manifold ellipse(double a, double b);
  static Manifold spline(std::vector<std::array<double, 2>> control);
  static Manifold sphere() { return {Kind::Sphere, 1.0, 1.0, {}}; }

  int dim() const noexcept { return kind == Kind::Sphere ? 3 : 2; }
  bool has_exact_distance() const noexcept { return kind == Kind::Circle || kind == Kind::Sphere; }
  /// Largest |x| over Sigma.
  double extent() const;
  /// Upper bound on the curvature of Sigma (curves only).
  double curvature_bound() const;
  /// Point of a closed curve at parameter t in [0, 1).
  std::array<double, 2> curve_point(double t) const;
};

namespace regions {
struct Annulus { double radius, beta; };
struct Ball { double radius; };
/// [-beta, beta]^k x R^{d-k} in the rotated coordinates eta = Q xi.
struct Strip {
  int k;
  double beta;
  std::array<Point, 3> rotation{Point{1, 0, 0}, Point{0, 1, 0}, Point{0, 0, 1}};
};
struct Shell {
  Manifold manifold;
  double radius, beta;
  bool exact = true;  // closed-form distance when the manifold has one
};
}  // namespace regions

using SpectralRegion = std::variant<regions::Annulus, regions::Ball, regions::Strip, regions::Shell>;

/// Largest |xi| a lattice point can have while belonging to the region, or
/// nullopt for unbounded regions.
std::optional<double> region_extent(const SpectralRegion& region);

/// Boolean mask over the frequency lattice. Throws Error(Nyquist) when the
/// region is not representable, Error(Domain) when the mask is empty.
Mask region_mask(const SpectralRegion& region, const TorusGrid& grid);

/// Physical frequencies of the true mask entries, optionally restricted to
/// the ball B(center, radius).
std::vector<Point> mask_points(const Mask& mask, const TorusGrid& grid,
                               std::optional<std::pair<Point, double>> restrict_to = std::nullopt);

/// beta_{plane_dim} of the mask's frequency points.
FlatnessResult mask_flatness(const Mask& mask, const TorusGrid& grid, int plane_dim,
                             std::optional<std::pair<Point, double>> restrict_to = std::nullopt);

std::size_t mask_count(const Mask& mask);

Json to_json(const SpectralRegion& region);
Json to_json(const Manifold& manifold);
/// `lattice_unit` converts entries given with "units": "lattice".
SpectralRegion region_from_json(ConfigNode node, double lattice_unit = 1.0);
Manifold manifold_from_json(ConfigNode node);

}  // namespace plslab
