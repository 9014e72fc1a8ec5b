#include <algorithm>
#include <cmath>
#include <limits>

#include "plslab/error.hpp"
#include "plslab/geometry.hpp"

namespace plslab {
namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

constexpr double kInf = std::numeric_limits<double>::infinity();

double reduce(double x, double side) {
  double r = std::fmod(x, side);
  if (r < 0.0) r += side;
  return r >= side ? 0.0 : r;
}

// Representative of x modulo side in [-side/2, side/2).
double wrap(double x, double side) { return reduce(x + 0.5 * side, side) - 0.5 * side; }

Point reduce_point(const Point& x, const Torus& torus) {
  Point r{0.0, 0.0, 0.0};
  for (int a = 0; a < torus.dim; ++a) r[a] = reduce(x[a], torus.side);
  return r;
}

double dot(const Point& a, const Point& b, int dim) {
  double s = 0.0;
  for (int i = 0; i < dim; ++i) s += a[i] * b[i];
  return s;
}

Coords unit(const std::vector<double>& values) {
  Coords c(values);
  const double n = std::sqrt(c.v[0] * c.v[0] + c.v[1] * c.v[1] + c.v[2] * c.v[2]);
  if (!(n > 0.0)) throw Error(ErrorKind::Domain, "normal vector must be non-zero");
  // Already-unit input is kept bit for bit so serialization round-trips.
  if (std::abs(n - 1.0) > 8.0 * std::numeric_limits<double>::epsilon())
    for (auto& x : c.v) x /= n;
  return c;
}

// Signed offset of x from the nearest strip center.
double strip_offset(const Point& x, const Point& normal, double period, double offset, int dim) {
  const double t = dot(x, normal, dim) - offset;
  return t - period * std::round(t / period);
}

// 1 for u <= 0, 0 for u >= 1, C-infinity in between.
double smooth_step_down(double u) {
  if (u <= 0.0) return 1.0;
  if (u >= 1.0) return 0.0;
  const double a = std::exp(-1.0 / (1.0 - u));
  const double b = std::exp(-1.0 / u);
  return a / (a + b);
}

double periodic_radius(const Point& x, const Point& center, const Torus& torus) {
  double s = 0.0;
  for (int a = 0; a < torus.dim; ++a) {
    const double d = wrap(x[a] - center[a], torus.side);
    s += d * d;
  }
  return std::sqrt(s);
}

double box_distance(const Point& x, const sets::Box& box, const Torus& torus) {
  double s = 0.0;
  for (int a = 0; a < torus.dim; ++a) {
    const double half = 0.5 * (box.hi.v[a] - box.lo.v[a]);
    if (half >= 0.5 * torus.side) continue;
    const double c = 0.5 * (box.hi.v[a] + box.lo.v[a]);
    const double d = std::abs(wrap(x[a] - c, torus.side)) - half;
    if (d > 0.0) s += d * d;
  }
  return std::sqrt(s);
}

Point divided(const Point& x, double factor) { return {x[0] / factor, x[1] / factor, x[2] / factor}; }

Point shifted(const Point& x, const Coords& shift) {
  return {x[0] - shift.v[0], x[1] - shift.v[1], x[2] - shift.v[2]};
}

Torus scaled_torus(const Torus& torus, double factor) { return {torus.dim, torus.side / factor}; }

bool has_exact_distance(const SetSpec& set) {
  return std::visit(
      overloaded{
          [](const sets::Full&) { return true; },
          [](const sets::Empty&) { return true; },
          [](const sets::Box&) { return true; },
          [](const sets::Ball&) { return true; },
          [](const sets::Strips&) { return true; },
          [](const sets::Union& u) {
            return std::all_of(u.parts.begin(), u.parts.end(), has_exact_distance);
          },
          [](const sets::Scale& s) { return has_exact_distance(s.of); },
          [](const sets::Translate& t) { return has_exact_distance(t.of); },
          [](const sets::Dilate& d) { return has_exact_distance(d.of); },
          [](const auto&) { return false; },
      },
      set.node().value);
}

bool needs_grid_dilation(const SetSpec& set) {
  return std::visit(
      overloaded{
          [](const sets::Union& u) {
            return std::any_of(u.parts.begin(), u.parts.end(), needs_grid_dilation);
          },
          [](const sets::Intersection& u) {
            return std::any_of(u.parts.begin(), u.parts.end(), needs_grid_dilation);
          },
          [](const sets::Complement& c) { return needs_grid_dilation(c.of); },
          [](const sets::Scale& s) { return needs_grid_dilation(s.of); },
          [](const sets::Translate& t) { return needs_grid_dilation(t.of); },
          [](const sets::Dilate& d) { return !has_exact_distance(d.of); },
          [](const auto&) { return false; },
      },
      set.node().value);
}

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v))
    throw Error(ErrorKind::Domain, std::string(what) + " must be positive");
}

}  // namespace

Coords::Coords(const std::vector<double>& values) : n(static_cast<int>(values.size())) {
  if (values.empty() || values.size() > 3)
    throw Error(ErrorKind::Domain, "coordinate vectors must have 1 to 3 entries");
  std::copy(values.begin(), values.end(), v.begin());
}

// --- construction -----------------------------------------------------------

SetSpec SetSpec::full() { return SetSpec(std::make_shared<SetNode>(SetNode{sets::Full{}})); }
SetSpec SetSpec::empty() { return SetSpec(std::make_shared<SetNode>(SetNode{sets::Empty{}})); }

SetSpec SetSpec::box(const std::vector<double>& lo, const std::vector<double>& hi) {
  if (lo.size() != hi.size()) throw Error(ErrorKind::Domain, "box corners differ in dimension");
  sets::Box b{Coords(lo), Coords(hi)};
  for (int a = 0; a < b.lo.n; ++a)
    if (b.hi.v[a] < b.lo.v[a]) throw Error(ErrorKind::Domain, "box upper corner below lower");
  return SetSpec(std::make_shared<SetNode>(SetNode{b}));
}

SetSpec SetSpec::ball(const std::vector<double>& center, double radius) {
  if (!(radius >= 0.0)) throw Error(ErrorKind::Domain, "ball radius must be non-negative");
  return SetSpec(std::make_shared<SetNode>(SetNode{sets::Ball{Coords(center), radius}}));
}

SetSpec SetSpec::strips(const std::vector<double>& normal, double width, double period,
                        double offset) {
  require_positive(period, "strip period");
  if (!(width >= 0.0)) throw Error(ErrorKind::Domain, "strip width must be non-negative");
  return SetSpec(
      std::make_shared<SetNode>(SetNode{sets::Strips{unit(normal), width, period, offset}}));
}

SetSpec SetSpec::half_space(const std::vector<double>& normal, double offset) {
  return SetSpec(std::make_shared<SetNode>(SetNode{sets::HalfSpace{unit(normal), offset}}));
}

SetSpec SetSpec::grid_pattern(double width, double period, double offset) {
  return unite({strips({1.0, 0.0}, width, period, offset), strips({0.0, 1.0}, width, period, offset)});
}

SetSpec SetSpec::constant(double value) {
  if (!std::isfinite(value)) throw Error(ErrorKind::Domain, "constant profile must be finite");
  return SetSpec(std::make_shared<SetNode>(SetNode{sets::Constant{value}}));
}

SetSpec SetSpec::bump(const std::vector<double>& center, double radius, double amplitude) {
  require_positive(radius, "bump radius");
  if (!(amplitude >= 0.0)) throw Error(ErrorKind::Domain, "bump amplitude must be non-negative");
  return SetSpec(
      std::make_shared<SetNode>(SetNode{sets::Bump{Coords(center), radius, amplitude}}));
}

SetSpec SetSpec::smooth_strips(const std::vector<double>& normal, double width, double period,
                               double amplitude, double ramp, double offset) {
  require_positive(period, "strip period");
  if (!(width >= 0.0) || !(ramp >= 0.0))
    throw Error(ErrorKind::Domain, "strip width and ramp must be non-negative");
  if (!(amplitude >= 0.0)) throw Error(ErrorKind::Domain, "strip amplitude must be non-negative");
  return SetSpec(std::make_shared<SetNode>(
      SetNode{sets::SmoothStrips{unit(normal), width, period, offset, amplitude, ramp}}));
}

SetSpec SetSpec::unite(std::vector<SetSpec> parts) {
  if (parts.empty()) throw Error(ErrorKind::Domain, "union needs at least one operand");
  return SetSpec(std::make_shared<SetNode>(SetNode{sets::Union{std::move(parts)}}));
}

SetSpec SetSpec::intersect(std::vector<SetSpec> parts) {
  if (parts.empty()) throw Error(ErrorKind::Domain, "intersection needs at least one operand");
  return SetSpec(std::make_shared<SetNode>(SetNode{sets::Intersection{std::move(parts)}}));
}

SetSpec SetSpec::complement(SetSpec of) {
  return SetSpec(std::make_shared<SetNode>(SetNode{sets::Complement{std::move(of)}}));
}

SetSpec SetSpec::scaled(SetSpec of, double factor) {
  require_positive(factor, "scale factor");
  return SetSpec(std::make_shared<SetNode>(SetNode{sets::Scale{std::move(of), factor}}));
}

SetSpec SetSpec::translated(SetSpec of, const std::vector<double>& shift) {
  return SetSpec(std::make_shared<SetNode>(SetNode{sets::Translate{std::move(of), Coords(shift)}}));
}

SetSpec SetSpec::dilated(SetSpec of, double delta) {
  if (!(delta >= 0.0)) throw Error(ErrorKind::Domain, "dilation radius must be non-negative");
  return SetSpec(std::make_shared<SetNode>(SetNode{sets::Dilate{std::move(of), delta}}));
}

bool SetSpec::operator==(const SetSpec& other) const {
  return node_ == other.node_ || to_json(*this) == to_json(other);
}

// --- evaluation -------------------------------------------------------------

bool is_profile(const SetSpec& set) {
  return std::visit(
      overloaded{
          [](const sets::Constant&) { return true; },
          [](const sets::Bump&) { return true; },
          [](const sets::SmoothStrips&) { return true; },
          [](const sets::Union& u) { return std::all_of(u.parts.begin(), u.parts.end(), is_profile); },
          [](const sets::Intersection& u) {
            return std::all_of(u.parts.begin(), u.parts.end(), is_profile);
          },
          [](const sets::Scale& s) { return is_profile(s.of); },
          [](const sets::Translate& t) { return is_profile(t.of); },
          [](const auto&) { return false; },
      },
      set.node().value);
}

double profile_max(const SetSpec& set) {
  if (!is_profile(set)) throw Error(ErrorKind::Domain, "profile_max requested on an indicator set");
  return std::visit(
      overloaded{
          [](const sets::Constant& c) { return c.value; },
          [](const sets::Bump& b) { return b.amplitude; },
          [](const sets::SmoothStrips& s) { return s.amplitude; },
          [](const sets::Union& u) {
            double m = -kInf;
            for (const auto& p : u.parts) m = std::max(m, profile_max(p));
            return m;
          },
          [](const sets::Intersection& u) {
            double m = kInf;
            for (const auto& p : u.parts) m = std::min(m, profile_max(p));
            return m;
          },
          [](const sets::Scale& s) { return profile_max(s.of); },
          [](const sets::Translate& t) { return profile_max(t.of); },
          [](const auto&) { return 0.0; },
      },
      set.node().value);
}

double profile(const SetSpec& set, const Point& x_in, const Torus& torus) {
  const Point x = reduce_point(x_in, torus);
  return std::visit(
      overloaded{
          [](const sets::Constant& c) { return c.value; },
          [&](const sets::Bump& b) {
            const double r = periodic_radius(x, b.center.v, torus) / b.radius;
            if (r >= 1.0) return 0.0;
            return b.amplitude * std::exp(1.0 - 1.0 / (1.0 - r * r));
          },
          [&](const sets::SmoothStrips& s) {
            const double r = std::abs(strip_offset(x, s.normal.v, s.period, s.offset, torus.dim));
            const double excess = r - 0.5 * s.width;
            if (excess <= 0.0) return s.amplitude;
            if (s.ramp <= 0.0) return 0.0;
            return s.amplitude * smooth_step_down(excess / s.ramp);
          },
          [&](const sets::Union& u) {
            double m = -kInf;
            for (const auto& p : u.parts) m = std::max(m, profile(p, x, torus));
            return m;
          },
          [&](const sets::Intersection& u) {
            double m = kInf;
            for (const auto& p : u.parts) m = std::min(m, profile(p, x, torus));
            return m;
          },
          [&](const sets::Scale& s) {
            return profile(s.of, divided(x, s.factor), scaled_torus(torus, s.factor));
          },
          [&](const sets::Translate& t) { return profile(t.of, shifted(x, t.shift), torus); },
          [](const auto&) -> double {
            throw Error(ErrorKind::Domain, "profile requested on an indicator set");
          },
      },
      set.node().value);
}

std::optional<double> distance(const SetSpec& set, const Point& x_in, const Torus& torus) {
  if (!has_exact_distance(set)) return std::nullopt;
  const Point x = reduce_point(x_in, torus);
  return std::visit(
      overloaded{
          [](const sets::Full&) -> std::optional<double> { return 0.0; },
          [](const sets::Empty&) -> std::optional<double> { return kInf; },
          [&](const sets::Box& b) -> std::optional<double> { return box_distance(x, b, torus); },
          [&](const sets::Ball& b) -> std::optional<double> {
            return std::max(0.0, periodic_radius(x, b.center.v, torus) - b.radius);
          },
          [&](const sets::Strips& s) -> std::optional<double> {
            const double r = std::abs(strip_offset(x, s.normal.v, s.period, s.offset, torus.dim));
            return std::max(0.0, r - 0.5 * s.width);
          },
          [&](const sets::Union& u) -> std::optional<double> {
            double m = kInf;
            for (const auto& p : u.parts) m = std::min(m, *distance(p, x, torus));
            return m;
          },
          [&](const sets::Scale& s) -> std::optional<double> {
            return s.factor * *distance(s.of, divided(x, s.factor), scaled_torus(torus, s.factor));
          },
          [&](const sets::Translate& t) -> std::optional<double> {
            return distance(t.of, shifted(x, t.shift), torus);
          },
          [&](const sets::Dilate& d) -> std::optional<double> {
            return std::max(0.0, *distance(d.of, x, torus) - d.delta);
          },
          [](const auto&) -> std::optional<double> { return std::nullopt; },
      },
      set.node().value);
}

bool indicator(const SetSpec& set, const Point& x_in, const Torus& torus, double threshold) {
  const Point x = reduce_point(x_in, torus);
  return std::visit(
      overloaded{
          [](const sets::Full&) { return true; },
          [](const sets::Empty&) { return false; },
          [&](const sets::Box& b) { return box_distance(x, b, torus) == 0.0; },
          [&](const sets::Ball& b) { return periodic_radius(x, b.center.v, torus) <= b.radius; },
          [&](const sets::Strips& s) {
            return std::abs(strip_offset(x, s.normal.v, s.period, s.offset, torus.dim)) <=
                   0.5 * s.width;
          },
          [&](const sets::HalfSpace& h) { return dot(x, h.normal.v, torus.dim) <= h.offset; },
          [&](const sets::Constant& c) { return c.value >= threshold; },
          [&](const sets::Bump&) { return profile(set, x, torus) >= threshold; },
          [&](const sets::SmoothStrips&) { return profile(set, x, torus) >= threshold; },
          [&](const sets::Union& u) {
            return std::any_of(u.parts.begin(), u.parts.end(),
                               [&](const SetSpec& p) { return indicator(p, x, torus, threshold); });
          },
          [&](const sets::Intersection& u) {
            return std::all_of(u.parts.begin(), u.parts.end(),
                               [&](const SetSpec& p) { return indicator(p, x, torus, threshold); });
          },
          [&](const sets::Complement& c) { return !indicator(c.of, x, torus, threshold); },
          [&](const sets::Scale& s) {
            return indicator(s.of, divided(x, s.factor), scaled_torus(torus, s.factor), threshold);
          },
          [&](const sets::Translate& t) {
            return indicator(t.of, shifted(x, t.shift), torus, threshold);
          },
          [&](const sets::Dilate& d) {
            const auto dist = distance(d.of, x, torus);
            if (!dist)
              throw Error(ErrorKind::Domain,
                          "dilation of this set has no closed-form distance; sample it on a grid");
            return *dist < d.delta || (d.delta == 0.0 && *dist == 0.0);
          },
      },
      set.node().value);
}

// --- grid sampling ----------------------------------------------------------

namespace {

Mask sample_pointwise(const SetSpec& set, const TorusGrid& grid, double threshold) {
  Mask out(grid.size());
  const Torus torus = grid.torus();
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = indicator(set, grid.node(i), torus, threshold) ? 1 : 0;
  return out;
}

Mask sample_structural(const SetSpec& set, const TorusGrid& grid, double threshold) {
  if (!needs_grid_dilation(set)) return sample_pointwise(set, grid, threshold);
  return std::visit(
      overloaded{
          [&](const sets::Union& u) {
            Mask acc(grid.size(), 0);
            for (const auto& p : u.parts) {
              const Mask m = sample_structural(p, grid, threshold);
              for (std::size_t i = 0; i < acc.size(); ++i) acc[i] |= m[i];
            }
            return acc;
          },
          [&](const sets::Intersection& u) {
            Mask acc(grid.size(), 1);
            for (const auto& p : u.parts) {
              const Mask m = sample_structural(p, grid, threshold);
              for (std::size_t i = 0; i < acc.size(); ++i) acc[i] &= m[i];
            }
            return acc;
          },
          [&](const sets::Complement& c) {
            Mask m = sample_structural(c.of, grid, threshold);
            for (auto& v : m) v = v ? 0 : 1;
            return m;
          },
          [&](const sets::Dilate& d) {
            return dilate_on_grid(sample_structural(d.of, grid, threshold), grid, d.delta);
          },
          [](const auto&) -> Mask {
            throw Error(ErrorKind::Domain,
                        "grid dilation below a scale or translate node is not supported");
          },
      },
      set.node().value);
}

}  // namespace

Mask sample_indicator(const SetSpec& set, const TorusGrid& grid, double threshold) {
  return sample_structural(set, grid, threshold);
}

std::vector<double> sample_profile(const SetSpec& set, const TorusGrid& grid) {
  std::vector<double> out(grid.size());
  const Torus torus = grid.torus();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = profile(set, grid.node(i), torus);
  return out;
}

Mask dilate_on_grid(const Mask& mask, const TorusGrid& grid, double delta) {
  if (mask.size() != grid.size()) throw Error(ErrorKind::Shape, "mask does not match grid");
  if (delta <= 0.0) return mask;
  const double h = grid.spacing();
  const auto reach = static_cast<std::ptrdiff_t>(std::ceil(delta / h));
  std::vector<LatticeIndex> offsets;
  const std::ptrdiff_t r1 = grid.dim() >= 2 ? reach : 0;
  const std::ptrdiff_t r2 = grid.dim() >= 3 ? reach : 0;
  for (std::ptrdiff_t a = -reach; a <= reach; ++a)
    for (std::ptrdiff_t b = -r1; b <= r1; ++b)
      for (std::ptrdiff_t c = -r2; c <= r2; ++c) {
        const double d2 = h * h * static_cast<double>(a * a + b * b + c * c);
        if (d2 < delta * delta) offsets.push_back({a, b, c});
      }

  const auto n = static_cast<std::ptrdiff_t>(grid.points());
  Mask out(mask.size(), 0);
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (!mask[i]) continue;
    LatticeIndex j{0, 0, 0};
    std::size_t rest = i;
    for (int a = grid.dim() - 1; a >= 0; --a) {
      j[a] = static_cast<std::ptrdiff_t>(rest % grid.points());
      rest /= grid.points();
    }
    for (const auto& o : offsets) {
      std::size_t flat = 0;
      for (int a = 0; a < grid.dim(); ++a) {
        std::ptrdiff_t k = (j[a] + o[a]) % n;
        if (k < 0) k += n;
        flat = flat * grid.points() + static_cast<std::size_t>(k);
      }
      out[flat] = 1;
    }
  }
  return out;
}

double mask_fraction(const Mask& mask) {
  if (mask.empty()) return 0.0;
  std::size_t count = 0;
  for (auto v : mask) count += v ? 1 : 0;
  return static_cast<double>(count) / static_cast<double>(mask.size());
}

// --- serialization ----------------------------------------------------------

Json to_json(const SetSpec& set) {
  auto list = [](const std::vector<SetSpec>& parts) {
    Json arr = Json::array();
    for (const auto& p : parts) arr.push_back(to_json(p));
    return arr;
  };
  return std::visit(
      overloaded{
          [](const sets::Full&) { return Json{{"type", "full"}}; },
          [](const sets::Empty&) { return Json{{"type", "empty"}}; },
          [](const sets::Box& b) {
            return Json{{"type", "box"}, {"lo", b.lo.to_vector()}, {"hi", b.hi.to_vector()}};
          },
          [](const sets::Ball& b) {
            return Json{{"type", "ball"}, {"center", b.center.to_vector()}, {"radius", b.radius}};
          },
          [](const sets::Strips& s) {
            return Json{{"type", "strips"}, {"normal", s.normal.to_vector()}, {"width", s.width},
                        {"period", s.period}, {"offset", s.offset}};
          },
          [](const sets::HalfSpace& h) {
            return Json{{"type", "half_space"}, {"normal", h.normal.to_vector()},
                        {"offset", h.offset}};
          },
          [](const sets::Constant& c) { return Json{{"type", "constant"}, {"value", c.value}}; },
          [](const sets::Bump& b) {
            return Json{{"type", "bump"}, {"center", b.center.to_vector()}, {"radius", b.radius},
                        {"amplitude", b.amplitude}};
          },
          [](const sets::SmoothStrips& s) {
            return Json{{"type", "smooth_strips"}, {"normal", s.normal.to_vector()},
                        {"width", s.width}, {"period", s.period}, {"offset", s.offset},
                        {"amplitude", s.amplitude}, {"ramp", s.ramp}};
          },
          [&](const sets::Union& u) { return Json{{"type", "union"}, {"of", list(u.parts)}}; },
          [&](const sets::Intersection& u) {
            return Json{{"type", "intersection"}, {"of", list(u.parts)}};
          },
          [](const sets::Complement& c) { return Json{{"type", "complement"}, {"of", to_json(c.of)}}; },
          [](const sets::Scale& s) {
            return Json{{"type", "scale"}, {"factor", s.factor}, {"of", to_json(s.of)}};
          },
          [](const sets::Translate& t) {
            return Json{{"type", "translate"}, {"shift", t.shift.to_vector()}, {"of", to_json(t.of)}};
          },
          [](const sets::Dilate& d) {
            return Json{{"type", "dilate"}, {"delta", d.delta}, {"of", to_json(d.of)}};
          },
      },
      set.node().value);
}

SetSpec set_from_json(const Json& json, const std::string& path) {
  return set_from_json(ConfigNode(json, path));
}

SetSpec set_from_json(ConfigNode node) {
  const std::string type = node.string("type");
  auto parts = [&](const char* key) {
    std::vector<SetSpec> out;
    const auto items = node.array(key);
    for (std::size_t i = 0; i < items.size(); ++i)
      out.push_back(set_from_json(items[i], node.key_path(key) + "[" + std::to_string(i) + "]"));
    return out;
  };
  auto child = [&] { return set_from_json(node.child("of")); };

  SetSpec result = SetSpec::full();
  try {
    if (type == "full") {
      result = SetSpec::full();
    } else if (type == "empty") {
      result = SetSpec::empty();
    } else if (type == "box") {
      result = SetSpec::box(node.numbers("lo"), node.numbers("hi"));
    } else if (type == "ball") {
      result = SetSpec::ball(node.numbers("center"), node.number("radius"));
    } else if (type == "strips") {
      auto normal = node.numbers("normal");
      const double width = node.number("width");
      const double period = node.number("period");
      result = SetSpec::strips(normal, width, period, node.number_or("offset", 0.0));
    } else if (type == "grid_pattern") {
      const double width = node.number("width");
      const double period = node.number("period");
      result = SetSpec::grid_pattern(width, period, node.number_or("offset", 0.0));
    } else if (type == "half_space") {
      auto normal = node.numbers("normal");
      result = SetSpec::half_space(normal, node.number("offset"));
    } else if (type == "constant") {
      result = SetSpec::constant(node.number("value"));
    } else if (type == "bump") {
      auto center = node.numbers("center");
      const double radius = node.number("radius");
      result = SetSpec::bump(center, radius, node.number("amplitude"));
    } else if (type == "smooth_strips") {
      auto normal = node.numbers("normal");
      const double width = node.number("width");
      const double period = node.number("period");
      const double amplitude = node.number("amplitude");
      const double ramp = node.number_or("ramp", 0.0);
      result = SetSpec::smooth_strips(normal, width, period, amplitude, ramp,
                                      node.number_or("offset", 0.0));
    } else if (type == "union") {
      result = SetSpec::unite(parts("of"));
    } else if (type == "intersection") {
      result = SetSpec::intersect(parts("of"));
    } else if (type == "complement") {
      result = SetSpec::complement(child());
    } else if (type == "scale") {
      const double factor = node.number("factor");
      result = SetSpec::scaled(child(), factor);
    } else if (type == "translate") {
      auto shift = node.numbers("shift");
      result = SetSpec::translated(child(), shift);
    } else if (type == "dilate") {
      const double delta = node.number("delta");
      result = SetSpec::dilated(child(), delta);
    } else {
      throw Error(ErrorKind::Config, "unknown set type '" + type + "'", node.key_path("type"));
    }
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Domain) throw Error(ErrorKind::Config, e.what(), node.path());
    throw;
  }
  node.finish();
  return result;
}

}  // namespace plslab
