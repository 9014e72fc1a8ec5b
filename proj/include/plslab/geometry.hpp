#pragma once

// Spatial sets on the torus, the sampled geometric-control estimator and the
// flatness functional beta_j(S) = inf over j-planes L of sup_{x in S} dist(x, L).

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "plslab/config.hpp"
#include "plslab/lattice.hpp"

namespace plslab {

/// Threshold used to turn a profile gamma into the set {gamma >= eps}.
inline constexpr double kDefaultThreshold = 1e-3;

/// A vector whose declared length is kept for serialization; evaluation uses
/// the zero-padded 3-vector.
struct Coords {
  Point v{0.0, 0.0, 0.0};
  int n = 0;

  Coords() = default;
  explicit Coords(const std::vector<double>& values);
  std::vector<double> to_vector() const { return {v.begin(), v.begin() + n}; }
};

struct SetNode;

/// Immutable expression tree describing a set E (or a damping profile gamma)
/// on a periodic torus. Copies share structure.
class SetSpec {
 public:
  static SetSpec full();
  static SetSpec empty();
  static SetSpec box(const std::vector<double>& lo, const std::vector<double>& hi);
  static SetSpec ball(const std::vector<double>& center, double radius);
  /// Periodic family of slabs {x : dist(x.n - offset, period Z) <= width / 2}.
  static SetSpec strips(const std::vector<double>& normal, double width, double period,
                        double offset = 0.0);
  static SetSpec half_space(const std::vector<double>& normal, double offset);
  /// Union of vertical and horizontal strip families ("grid pattern"), d = 2.
  static SetSpec grid_pattern(double width, double period, double offset = 0.0);

  static SetSpec constant(double value);
  static SetSpec bump(const std::vector<double>& center, double radius, double amplitude);
  /// Strip family profile equal to amplitude on the slabs, decaying to 0 over
  /// `ramp` through a C-infinity step.
  static SetSpec smooth_strips(const std::vector<double>& normal, double width, double period,
                               double amplitude, double ramp, double offset = 0.0);

  static SetSpec unite(std::vector<SetSpec> parts);
  static SetSpec intersect(std::vector<SetSpec> parts);
  static SetSpec complement(SetSpec of);
  static SetSpec scaled(SetSpec of, double factor);
  static SetSpec translated(SetSpec of, const std::vector<double>& shift);
  /// Open delta-neighborhood U_delta(of).
  static SetSpec dilated(SetSpec of, double delta);

  const SetNode& node() const noexcept { return *node_; }

  bool operator==(const SetSpec& other) const;

 private:
  explicit SetSpec(std::shared_ptr<const SetNode> node) : node_(std::move(node)) {}
  std::shared_ptr<const SetNode> node_;
};

namespace sets {
struct Full {};
struct Empty {};
struct Box { Coords lo, hi; };
struct Ball { Coords center; double radius; };
struct Strips { Coords normal; double width, period, offset; };
struct HalfSpace { Coords normal; double offset; };
struct Constant { double value; };
struct Bump { Coords center; double radius, amplitude; };
struct SmoothStrips { Coords normal; double width, period, offset, amplitude, ramp; };
struct Union { std::vector<SetSpec> parts; };
struct Intersection { std::vector<SetSpec> parts; };
struct Complement { SetSpec of; };
struct Scale { SetSpec of; double factor; };
struct Translate { SetSpec of; Coords shift; };
struct Dilate { SetSpec of; double delta; };
}  // namespace sets

struct SetNode {
  std::variant<sets::Full, sets::Empty, sets::Box, sets::Ball, sets::Strips, sets::HalfSpace,
               sets::Constant, sets::Bump, sets::SmoothStrips, sets::Union, sets::Intersection,
               sets::Complement, sets::Scale, sets::Translate, sets::Dilate>
      value;
};

/// True when the tree is built only from profile primitives and the
/// union / intersection / scale / translate combinators.
bool is_profile(const SetSpec& set);
/// Upper bound gamma_max of a profile (error for indicator specs).
double profile_max(const SetSpec& set);

/// Membership of x (reduced modulo the torus). Profile nodes are thresholded
/// as {gamma >= threshold}.
bool indicator(const SetSpec& set, const Point& x, const Torus& torus,
               double threshold = kDefaultThreshold);
/// gamma(x); Error(Domain) when the spec is not a profile.
double profile(const SetSpec& set, const Point& x, const Torus& torus);
/// Exact Euclidean distance from x to the set on the torus when a closed form
/// exists (primitives, unions, scale/translate/dilate of those); nullopt
/// otherwise.
std::optional<double> distance(const SetSpec& set, const Point& x, const Torus& torus);

/// Indicator sampled at the grid nodes. Dilations whose operand has no exact
/// distance fall back to morphological dilation on the grid.
Mask sample_indicator(const SetSpec& set, const TorusGrid& grid,
                      double threshold = kDefaultThreshold);
std::vector<double> sample_profile(const SetSpec& set, const TorusGrid& grid);
/// Grid dilation by a Euclidean ball: node j is set when some node within
/// distance < delta (periodically) is set.
Mask dilate_on_grid(const Mask& mask, const TorusGrid& grid, double delta);
double mask_fraction(const Mask& mask);

Json to_json(const SetSpec& set);
SetSpec set_from_json(ConfigNode node);
SetSpec set_from_json(const Json& json, const std::string& path = "set");

// --- geometric control condition -------------------------------------------

/// k-dimensional cube {center + sum_i t_i axes[i] : |t_i| <= side / 2}.
struct CubeFrame {
  Point center{};
  std::array<Point, 3> axes{};
};

struct GccBudget {
  std::size_t centers = 256;       // low-discrepancy plus random centers
  std::size_t random_frames = 16;  // random orientations
  int rational_order = 3;          // max |integer entry| of rational directions
  std::size_t quadrature = 128;    // midpoint points per cube dimension (>= 64)
  int refine_steps = 24;           // coordinate-descent sweeps on the worst cube
};

struct GccEstimate {
  int k = 1;
  double side = 0.0;
  double gamma_hat = 1.0;  // min over sampled and refined cubes of H^k(Q n E) / side^k
  double sampled_min = 1.0;
  CubeFrame witness;
  std::size_t samples = 0;
  std::size_t quadrature = 0;
  double threshold = kDefaultThreshold;
};

/// Fraction of the cube covered by the set, by fixed midpoint quadrature.
double cube_fraction(const SetSpec& set, const Torus& torus, const CubeFrame& cube, int k,
                     double side, std::size_t quadrature, double threshold = kDefaultThreshold);

GccEstimate estimate_gcc(const SetSpec& set, const Torus& torus, int k, double side,
                         const GccBudget& budget, std::uint64_t seed,
                         double threshold = kDefaultThreshold);

// --- flatness ---------------------------------------------------------------

struct FlatnessResult {
  double value = 0.0;
  bool exact = true;
  double slack = 0.0;  // documented upper bound on (value - true infimum)
};

/// beta_{plane_dim}(points) for points in R^dim, dim <= 3.
///   plane_dim == 0            minimal enclosing ball radius (exact)
///   plane_dim == 1, dim == 2  half the minimal width (exact, rotating calipers)
///   plane_dim in {1,2}, dim 3 direction sampling + refinement (upper bound)
///   plane_dim >= dim          0
FlatnessResult flatness(std::span<const Point> points, int dim, int plane_dim);

double min_enclosing_radius(std::span<const Point> points, int dim);
double min_half_width_2d(std::span<const Point> points);

}  // namespace plslab
