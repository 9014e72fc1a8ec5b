#include "plslab/experiment.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include <fmt/format.h>

#include "plslab/error.hpp"
#include "plslab/geometry.hpp"
#include "plslab/observability.hpp"
#include "plslab/resolvent.hpp"
#include "plslab/spectra.hpp"
#include "plslab/version.hpp"
#include "plslab/waves.hpp"

namespace plslab {
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

Json point_json(const Point& p, int dim) {
  Json a = Json::array();
  for (int i = 0; i < dim; ++i) a.push_back(p[i]);
  return a;
}

Point point_from(const std::vector<double>& v, int dim, const std::string& path) {
  if (static_cast<int>(v.size()) != dim)
    throw Error(ErrorKind::Config, fmt::format("expected {} coordinates", dim), path);
  Point p{0.0, 0.0, 0.0};
  for (int i = 0; i < dim; ++i) p[i] = v[i];
  return p;
}

std::uint64_t seed_from(ConfigNode& node, std::uint64_t fallback = 1) {
  const auto s = node.integer_or("seed", static_cast<std::int64_t>(fallback));
  if (s < 0) throw Error(ErrorKind::Config, "seed must be non-negative", node.key_path("seed"));
  return static_cast<std::uint64_t>(s);
}

std::string bool_str(bool b) { return b ? "true" : "false"; }

// --- gcc -----------------------------------------------------------------------

struct GccJob {
  Torus torus;
  SetSpec set = SetSpec::full();
  int k = 1;
  double ell = 1.0;
  GccBudget budget;
  std::uint64_t seed = 1;
  double threshold = kDefaultThreshold;
  Json resolved;
};

GccJob parse_gcc(const Json& config) {
  ConfigNode root(config, "");
  GccJob job;
  auto t = root.child("torus");
  job.torus.dim = static_cast<int>(t.integer_or("d", 2));
  job.torus.side = t.number("L");
  t.finish();
  job.set = set_from_json(root.child("set"));
  job.k = static_cast<int>(root.integer("k"));
  job.ell = root.number("ell");
  if (auto b = root.optional_child("budget")) {
    auto positive = [&](std::string_view key, std::int64_t fallback) {
      const auto v = b->integer_or(key, fallback);
      if (v < 0) throw Error(ErrorKind::Config, "budget entries must be non-negative", b->key_path(key));
      return v;
    };
    job.budget.centers = static_cast<std::size_t>(positive("centers", 256));
    job.budget.random_frames = static_cast<std::size_t>(positive("random_frames", 16));
    job.budget.rational_order = static_cast<int>(positive("rational_order", 3));
    job.budget.quadrature = static_cast<std::size_t>(positive("quadrature", 128));
    job.budget.refine_steps = static_cast<int>(positive("refine_steps", 24));
    b->finish();
  }
  job.seed = seed_from(root);
  job.threshold = root.number_or("threshold", kDefaultThreshold);
  root.finish();
  job.resolved = {
      {"torus", {{"d", job.torus.dim}, {"L", job.torus.side}}},
      {"set", to_json(job.set)},
      {"k", job.k},
      {"ell", job.ell},
      {"budget",
       {{"centers", job.budget.centers},
        {"random_frames", job.budget.random_frames},
        {"rational_order", job.budget.rational_order},
        {"quadrature", job.budget.quadrature},
        {"refine_steps", job.budget.refine_steps}}},
      {"seed", job.seed},
      {"threshold", job.threshold},
  };
  return job;
}

// --- flatness ------------------------------------------------------------------

struct FlatnessJob {
  int plane_dim = 1;
  // explicit points
  int dim = 2;
  std::vector<Point> points;
  // or a spectral mask
  std::optional<TorusGrid> grid;
  std::optional<SpectralRegion> region;
  std::optional<std::pair<Point, double>> restrict_to;
  Json resolved;
};

FlatnessJob parse_flatness(const Json& config) {
  ConfigNode root(config, "");
  FlatnessJob job;
  job.plane_dim = static_cast<int>(root.integer("plane_dim"));
  job.resolved["plane_dim"] = job.plane_dim;
  if (root.has("points")) {
    job.dim = static_cast<int>(root.integer_or("dim", 2));
    const auto items = root.array("points");
    Json pts = Json::array();
    for (std::size_t i = 0; i < items.size(); ++i) {
      const std::string path = root.key_path("points") + fmt::format("[{}]", i);
      if (!items[i].is_array()) throw Error(ErrorKind::Config, "point must be an array", path);
      std::vector<double> v;
      for (const auto& x : items[i]) {
        if (!x.is_number()) throw Error(ErrorKind::Config, "point coordinates must be numbers", path);
        v.push_back(x.get<double>());
      }
      job.points.push_back(point_from(v, job.dim, path));
      pts.push_back(point_json(job.points.back(), job.dim));
    }
    job.resolved["dim"] = job.dim;
    job.resolved["points"] = pts;
  } else {
    job.grid = grid_from_json(root.child("grid"));
    job.region = region_from_json(root.child("region"), job.grid->frequency_unit());
    job.resolved["grid"] = to_json(*job.grid);
    job.resolved["region"] = to_json(*job.region);
    if (auto r = root.optional_child("restrict")) {
      const Point c = point_from(r->numbers("center"), job.grid->dim(), r->key_path("center"));
      const double radius = r->number("radius");
      r->finish();
      job.restrict_to = std::make_pair(c, radius);
      job.resolved["restrict"] = {{"center", point_json(c, job.grid->dim())}, {"radius", radius}};
    }
  }
  root.finish();
  return job;
}

// --- pls sweep -----------------------------------------------------------------

EigOptions parse_eig(std::optional<ConfigNode> node, Json& resolved) {
  EigOptions o;
  if (node) {
    o.tol = node->number_or("tol", o.tol);
    o.max_iter = static_cast<int>(node->integer_or("max_iter", o.max_iter));
    o.seed = seed_from(*node, o.seed);
    const auto method = node->string_or("method", "auto");
    if (method == "auto")
      o.method = EigMethod::Auto;
    else if (method == "dense")
      o.method = EigMethod::Dense;
    else if (method == "iterative")
      o.method = EigMethod::Iterative;
    else
      throw Error(ErrorKind::Config, "method must be auto, dense or iterative", node->key_path("method"));
    const auto cap = node->integer_or("dense_cap", static_cast<std::int64_t>(o.dense_cap));
    if (cap < 0) throw Error(ErrorKind::Config, "dense_cap must be non-negative", node->key_path("dense_cap"));
    o.dense_cap = static_cast<std::size_t>(cap);
    o.use_blocks = node->boolean_or("blocks", true);
    node->finish();
  }
  if (!(o.tol > 0.0)) throw Error(ErrorKind::Config, "tol must be positive", "eig.tol");
  if (o.max_iter < 1) throw Error(ErrorKind::Config, "max_iter must be positive", "eig.max_iter");
  const char* names[] = {"auto", "dense", "iterative"};
  resolved = {{"tol", o.tol},
              {"max_iter", o.max_iter},
              {"seed", o.seed},
              {"method", names[static_cast<int>(o.method)]},
              {"dense_cap", o.dense_cap},
              {"blocks", o.use_blocks}};
  return o;
}

struct PlsJob {
  SweepSpec spec;
  double bounded_ratio = 3.0;
  Json resolved;
};

PlsJob parse_pls(const Json& config) {
  ConfigNode root(config, "");
  PlsJob job;
  auto& spec = job.spec;
  spec.grid = grid_from_json(root.child("grid"));
  spec.set = set_from_json(root.child("set"));
  spec.delta = root.number_or("delta", 0.0);
  if (!(spec.delta >= 0.0)) throw Error(ErrorKind::Config, "delta must be non-negative", root.key_path("delta"));
  const auto family = root.string("family");
  if (family == "annulus")
    spec.family = RegionFamily::Annulus;
  else if (family == "ball")
    spec.family = RegionFamily::Ball;
  else if (family == "shell")
    spec.family = RegionFamily::Shell;
  else
    throw Error(ErrorKind::Config, "family must be annulus, ball or shell", root.key_path("family"));
  const auto units = root.string_or("units", "physical");
  double scale = 1.0;
  if (units == "lattice")
    scale = spec.grid.frequency_unit();
  else if (units != "physical")
    throw Error(ErrorKind::Config, "units must be 'physical' or 'lattice'", root.key_path("units"));
  const auto radii = root.numbers("radii");
  if (radii.empty()) throw Error(ErrorKind::Config, "radii must not be empty", root.key_path("radii"));
  for (double r : radii) spec.radii.push_back(scale * r);
  const double beta = root.number_or("beta", spec.family == RegionFamily::Ball ? 0.0 : 1.0);
  spec.beta = scale * beta;
  Json resolved = {{"grid", to_json(spec.grid)}, {"set", to_json(spec.set)}, {"delta", spec.delta},
                   {"family", family},           {"units", units},            {"radii", radii}};
  if (spec.family != RegionFamily::Ball) resolved["beta"] = beta;
  if (spec.family == RegionFamily::Shell) {
    spec.manifold = manifold_from_json(root.child("manifold"));
    const auto mode = root.string_or("distance", spec.manifold.has_exact_distance() ? "exact" : "sampled");
    if (mode != "exact" && mode != "sampled")
      throw Error(ErrorKind::Config, "distance must be 'exact' or 'sampled'", root.key_path("distance"));
    if (mode == "exact" && !spec.manifold.has_exact_distance())
      throw Error(ErrorKind::Config, "this manifold has no closed-form distance", root.key_path("distance"));
    spec.exact_distance = mode == "exact";
    resolved["manifold"] = to_json(spec.manifold);
    resolved["distance"] = mode;
  }
  Json eig;
  spec.eig = parse_eig(root.optional_child("eig"), eig);
  resolved["eig"] = eig;
  if (auto b = root.optional_child("bound")) {
    BoundInputs in;
    in.gamma = b->number_or("gamma", in.gamma);
    in.ell = b->number_or("ell", in.ell);
    in.d = spec.grid.dim();
    in.delta = spec.delta;
    const auto form = b->string_or("form", "neighborhood");
    if (form == "strip")
      spec.bound_form = BoundForm::Strip;
    else if (form == "proposition")
      spec.bound_form = BoundForm::Proposition;
    else if (form == "neighborhood")
      spec.bound_form = BoundForm::Neighborhood;
    else
      throw Error(ErrorKind::Config, "form must be strip, proposition or neighborhood", b->key_path("form"));
    spec.constants.c0 = b->number_or("c0", spec.constants.c0);
    spec.constants.c1 = b->number_or("c1", spec.constants.c1);
    spec.constants.c2 = b->number_or("c2", spec.constants.c2);
    b->finish();
    if (!(in.gamma > 0.0 && in.gamma < 1.0))
      throw Error(ErrorKind::Config, "gamma must lie in (0, 1)", "bound.gamma");
    spec.bound = in;
    resolved["bound"] = {{"form", form},
                         {"gamma", in.gamma},
                         {"ell", in.ell},
                         {"c0", spec.constants.c0},
                         {"c1", spec.constants.c1},
                         {"c2", spec.constants.c2}};
  }
  job.bounded_ratio = root.number_or("bounded_ratio", 3.0);
  resolved["bounded_ratio"] = job.bounded_ratio;
  root.finish();
  job.resolved = std::move(resolved);
  return job;
}

// --- wave ----------------------------------------------------------------------

struct WaveJob {
  TorusGrid grid{2, 1.0, 8};
  double s = 2.0;
  SetSpec damping = SetSpec::constant(0.0);
  double amplitude = 1.0;
  Point center{};
  double width = 0.0, filter = 1.0;
  double dt = 0.01, horizon = 1.0;
  std::size_t stride = 1;
  std::string model = "both";
  double t0 = -1.0;
  std::size_t snapshot_every = 0, snapshot_stride = 1;
  double conservation_tol = 1e-12;
  Json resolved;
};

WaveJob parse_wave(const Json& config) {
  ConfigNode root(config, "");
  WaveJob job;
  job.grid = grid_from_json(root.child("grid"));
  job.s = root.number("s");
  if (!(job.s > 0.0)) throw Error(ErrorKind::Config, "s must be positive", root.key_path("s"));
  Json damping_json = {{"set", to_json(job.damping)}, {"amplitude", 1.0}};
  if (auto d = root.optional_child("damping")) {
    job.damping = set_from_json(d->child("set"));
    job.amplitude = d->number_or("amplitude", 1.0);
    d->finish();
    damping_json = {{"set", to_json(job.damping)}, {"amplitude", job.amplitude}};
  }
  const double L = job.grid.side();
  for (int a = 0; a < job.grid.dim(); ++a) job.center[a] = 0.5 * L;
  job.width = std::max(L / 8.0, 8.0 * job.grid.spacing());
  if (auto in = root.optional_child("initial")) {
    if (in->has("center")) job.center = point_from(in->numbers("center"), job.grid.dim(), in->key_path("center"));
    job.width = in->number_or("width", job.width);
    job.filter = in->number_or("filter", job.filter);
    in->finish();
  }
  job.dt = root.number("dt");
  job.horizon = root.number("horizon");
  const auto stride = root.integer_or("stride", 1);
  if (stride < 1) throw Error(ErrorKind::Config, "stride must be positive", root.key_path("stride"));
  job.stride = static_cast<std::size_t>(stride);
  if (auto f = root.optional_child("fit")) {
    job.model = f->string_or("model", job.model);
    if (job.model != "both" && job.model != "polynomial" && job.model != "exponential" && job.model != "none")
      throw Error(ErrorKind::Config, "model must be polynomial, exponential, both or none", f->key_path("model"));
    job.t0 = f->number_or("t0", job.t0);
    f->finish();
  }
  if (auto sn = root.optional_child("snapshots")) {
    const auto every = sn->integer("every");
    const auto st = sn->integer_or("stride", 1);
    if (every < 1 || st < 1) throw Error(ErrorKind::Config, "snapshot settings must be positive", sn->path());
    job.snapshot_every = static_cast<std::size_t>(every);
    job.snapshot_stride = static_cast<std::size_t>(st);
    sn->finish();
  }
  job.conservation_tol = root.number_or("conservation_tol", job.conservation_tol);
  root.finish();
  job.resolved = {{"grid", to_json(job.grid)},
                  {"s", job.s},
                  {"damping", damping_json},
                  {"initial", {{"center", point_json(job.center, job.grid.dim())}, {"width", job.width}, {"filter", job.filter}}},
                  {"dt", job.dt},
                  {"horizon", job.horizon},
                  {"stride", job.stride},
                  {"fit", {{"model", job.model}, {"t0", job.t0}}},
                  {"conservation_tol", job.conservation_tol}};
  if (job.snapshot_every > 0)
    job.resolved["snapshots"] = {{"every", job.snapshot_every}, {"stride", job.snapshot_stride}};
  return job;
}

Json fit_json(const DecayFit& f) {
  return {{"model", to_string(f.model)}, {"exponent", f.exponent}, {"intercept", f.intercept},
          {"t0", f.t0},                  {"t1", f.t1},             {"residual", f.residual},
          {"samples", f.samples}};
}

// --- resolvent -----------------------------------------------------------------

struct ResolventJob {
  TorusGrid grid{2, 1.0, 8};
  double s = 2.0;
  SetSpec set = SetSpec::full();
  double delta = 0.0;
  std::vector<double> lambdas;
  ResolventOptions options;
  Json resolved;
};

ResolventJob parse_resolvent(const Json& config) {
  ConfigNode root(config, "");
  ResolventJob job;
  job.grid = grid_from_json(root.child("grid"));
  job.s = root.number("s");
  if (!(job.s > 0.0)) throw Error(ErrorKind::Config, "s must be positive", root.key_path("s"));
  job.set = set_from_json(root.child("set"));
  job.delta = root.number_or("delta", 0.0);
  if (!(job.delta >= 0.0)) throw Error(ErrorKind::Config, "delta must be non-negative", root.key_path("delta"));
  Json resolved = {{"grid", to_json(job.grid)}, {"s", job.s}, {"set", to_json(job.set)}, {"delta", job.delta}};
  if (root.has("lambdas")) {
    if (root.has("lambda_max"))
      throw Error(ErrorKind::Config, "give either lambdas or lambda_max", root.key_path("lambda_max"));
    job.lambdas = root.numbers("lambdas");
    check_lambda_grid(job.lambdas, job.s);
    resolved["lambdas"] = job.lambdas;
  } else {
    const double lmax = root.number("lambda_max");
    try {
      job.lambdas = lambda_grid(lmax, job.s);
    } catch (const Error& e) {
      throw Error(ErrorKind::Config, e.what(), root.key_path("lambda_max"));
    }
    resolved["lambda_max"] = lmax;
  }
  job.options.cutoff = root.number_or("cutoff", job.options.cutoff);
  if (!(job.options.cutoff > 1.0)) throw Error(ErrorKind::Config, "cutoff must exceed 1", root.key_path("cutoff"));
  job.options.tol = root.number_or("tol", job.options.tol);
  job.options.max_iter = static_cast<int>(root.integer_or("max_iter", job.options.max_iter));
  job.options.seed = seed_from(root);
  const auto cap = root.integer_or("dense_cap", static_cast<std::int64_t>(job.options.dense_cap));
  if (cap < 0) throw Error(ErrorKind::Config, "dense_cap must be non-negative", root.key_path("dense_cap"));
  job.options.dense_cap = static_cast<std::size_t>(cap);
  root.finish();
  resolved["cutoff"] = job.options.cutoff;
  resolved["tol"] = job.options.tol;
  resolved["max_iter"] = job.options.max_iter;
  resolved["seed"] = job.options.seed;
  resolved["dense_cap"] = job.options.dense_cap;
  job.resolved = std::move(resolved);
  return job;
}

std::string gnuplot_stub(const std::string& command) {
  std::string body;
  if (command == "pls-sweep")
    body = "set logscale y\nplot 'pls-sweep.csv' using (column(\"radius\")):(column(\"constant\")) "
           "with linespoints title 'C(R)'\n";
  else if (command == "wave")
    body = "set logscale xy\nplot 'wave.csv' using (1 + column(\"t\")):(column(\"energy\")) with lines title 'E(t)'\n";
  else if (command == "resolvent")
    body = "plot 'resolvent.csv' using (column(\"lambda\")):(column(\"lower\")) with linespoints title 'lower', \\\n"
           "     'resolvent.csv' using (column(\"lambda\")):(column(\"lambda_min\")) with lines title 'truncated'\n";
  else
    body = fmt::format("# no default plot for {}\n", command);
  return "set datafile separator ','\nset key autotitle columnhead\n" + body;
}

}  // namespace

// --- plumbing ------------------------------------------------------------------

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string config_hash(const Json& resolved) {
  return fmt::format("{:016x}", fnv1a64(resolved.dump() + "\n" + version_string()));
}

void atomic_write(const fs::path& path, std::string_view content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::Io, "cannot open " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error(ErrorKind::Io, "write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw Error(ErrorKind::Io, "cannot move " + tmp.string() + " to " + path.string() + ": " + ec.message());
}

Json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorKind::Config, fmt::format("{}: {}", path.string(), e.what()));
  }
}

std::string csv_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  return fmt::format("{}", value);
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

void CsvTable::add(std::vector<std::string> row) {
  if (row.size() != header_.size()) throw Error(ErrorKind::Shape, "CSV row width differs from the header");
  rows_.push_back(std::move(row));
}

std::string CsvTable::str() const {
  std::string out;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      const bool quote = cells[i].find_first_of(",\"\n") != std::string::npos;
      if (!quote) {
        out += cells[i];
        continue;
      }
      out += '"';
      for (char c : cells[i]) {
        if (c == '"') out += '"';
        out += c;
      }
      out += '"';
    }
    out += '\n';
  };
  line(header_);
  for (const auto& r : rows_) line(r);
  return out;
}

TorusGrid grid_from_json(ConfigNode node) {
  const auto d = node.integer_or("d", 2);
  const double L = node.number_or("L", 2.0 * std::numbers::pi);
  const auto n = node.integer("N");
  node.finish();
  if (n <= 0) throw Error(ErrorKind::Config, "N must be positive", node.key_path("N"));
  try {
    return TorusGrid(static_cast<int>(d), L, static_cast<std::size_t>(n));
  } catch (const Error& e) {
    throw Error(ErrorKind::Config, e.what(), node.path());
  }
}

Json to_json(const TorusGrid& grid) {
  return {{"d", grid.dim()}, {"L", grid.side()}, {"N", grid.points()}};
}

Json record_json(const Record& record) {
  return {{"command", record.command},
          {"version", version_string()},
          {"config_hash", config_hash(record.config)},
          {"config", record.config},
          {"result", record.result},
          {"timings", record.timings}};
}

Json resolve_config(const std::string& command, const Json& config) {
  if (command == "gcc") return parse_gcc(config).resolved;
  if (command == "flatness") return parse_flatness(config).resolved;
  if (command == "pls-sweep") return parse_pls(config).resolved;
  if (command == "wave") return parse_wave(config).resolved;
  if (command == "resolvent") return parse_resolvent(config).resolved;
  throw Error(ErrorKind::Config, "unknown command '" + command + "'");
}

Record run_gcc(const Json& config) {
  const auto start = Clock::now();
  const auto job = parse_gcc(config);
  const auto est = estimate_gcc(job.set, job.torus, job.k, job.ell, job.budget, job.seed, job.threshold);
  Record rec{"gcc", job.resolved, {}, {}, {}};
  Json axes = Json::array();
  for (int i = 0; i < job.k; ++i) axes.push_back(point_json(est.witness.axes[i], job.torus.dim));
  rec.result = {{"gamma_hat", est.gamma_hat},
                {"sampled_min", est.sampled_min},
                {"samples", est.samples},
                {"quadrature", est.quadrature},
                {"witness", {{"center", point_json(est.witness.center, job.torus.dim)}, {"axes", axes}}}};
  CsvTable t({"k", "ell", "gamma_hat", "sampled_min", "samples"});
  t.add({std::to_string(job.k), csv_number(job.ell), csv_number(est.gamma_hat), csv_number(est.sampled_min),
         std::to_string(est.samples)});
  rec.tables.push_back({"", t.str()});
  rec.timings["total_seconds"] = seconds_since(start);
  return rec;
}

Record run_flatness(const Json& config) {
  const auto start = Clock::now();
  const auto job = parse_flatness(config);
  FlatnessResult res;
  std::size_t count = 0;
  if (job.grid) {
    const Mask mask = region_mask(*job.region, *job.grid);
    res = mask_flatness(mask, *job.grid, job.plane_dim, job.restrict_to);
    count = mask_points(mask, *job.grid, job.restrict_to).size();
  } else {
    res = flatness(job.points, job.dim, job.plane_dim);
    count = job.points.size();
  }
  Record rec{"flatness", job.resolved, {}, {}, {}};
  rec.result = {{"value", res.value}, {"exact", res.exact}, {"slack", res.slack}, {"points", count}};
  CsvTable t({"plane_dim", "value", "exact", "slack", "points"});
  t.add({std::to_string(job.plane_dim), csv_number(res.value), bool_str(res.exact), csv_number(res.slack),
         std::to_string(count)});
  rec.tables.push_back({"", t.str()});
  rec.timings["total_seconds"] = seconds_since(start);
  return rec;
}

Record run_pls_sweep(const Json& config) {
  const auto start = Clock::now();
  const auto job = parse_pls(config);
  const auto rows = radius_sweep(job.spec);
  Record rec{"pls-sweep", job.resolved, {}, {}, {}};
  CsvTable t({"radius", "beta", "delta", "mask_size", "lambda_min", "constant", "floor_hit", "method", "residual",
              "iterations", "blocks", "bound_log10"});
  Json jrows = Json::array(), secs = Json::array();
  double cmin = std::numeric_limits<double>::infinity(), cmax = 0.0;
  bool floor_hit = false;
  for (const auto& r : rows) {
    const std::string bound = r.bound_log10 ? csv_number(*r.bound_log10) : "";
    t.add({csv_number(r.radius), csv_number(r.beta), csv_number(r.delta), std::to_string(r.mask_size),
           csv_number(r.lambda_min), csv_number(r.constant.value), bool_str(r.constant.floor_hit), r.method,
           csv_number(r.residual), std::to_string(r.iterations), std::to_string(r.blocks), bound});
    Json jr = {{"radius", r.radius},         {"beta", r.beta},         {"mask_size", r.mask_size},
               {"lambda_min", r.lambda_min}, {"floor_hit", r.constant.floor_hit}, {"method", r.method},
               {"residual", r.residual},     {"iterations", r.iterations}, {"blocks", r.blocks}};
    jr["constant"] = r.constant.floor_hit ? Json("inf") : Json(r.constant.value);
    if (r.bound_log10) jr["bound_log10"] = *r.bound_log10;
    jrows.push_back(jr);
    secs.push_back(r.seconds);
    floor_hit |= r.constant.floor_hit;
    cmin = std::min(cmin, r.constant.value);
    cmax = std::max(cmax, r.constant.value);
  }
  const double ratio = floor_hit ? std::numeric_limits<double>::infinity() : cmax / cmin;
  rec.result = {{"rows", jrows},
                {"ratio", floor_hit ? Json("inf") : Json(ratio)},
                {"floor_hit", floor_hit},
                {"bounded", !floor_hit && ratio <= job.bounded_ratio}};
  rec.tables.push_back({"", t.str()});
  rec.timings["row_seconds"] = secs;
  rec.timings["total_seconds"] = seconds_since(start);
  return rec;
}

Record run_wave(const Json& config, const fs::path& snapshot_dir) {
  const auto start = Clock::now();
  const auto job = parse_wave(config);
  const WaveSolver solver(job.grid, job.s, job.damping, job.amplitude);
  WaveState state = gaussian_state(job.grid, job.s, job.center, job.width, job.filter);
  std::size_t sample = 0, written = 0;
  SnapshotHook hook;
  if (job.snapshot_every > 0) {
    if (snapshot_dir.empty()) throw Error(ErrorKind::Config, "snapshots need an output directory", "snapshots");
    fs::create_directories(snapshot_dir);
    hook = [&](const WaveState& st) {
      if (sample++ % job.snapshot_every != 0) return;
      write_snapshot((snapshot_dir / fmt::format("w_{:06d}.bin", written++)).string(), st.grid, st.w, st.t,
                     job.snapshot_stride);
    };
  }
  const auto series = solver.evolve(state, job.dt, job.horizon, job.stride, hook);
  Record rec{"wave", job.resolved, {}, {}, {}};
  const double e0 = series.energy.front();
  double drift = 0.0;
  for (double e : series.energy) drift = std::max(drift, std::abs(e - e0) / e0);
  Json fits = Json::object();
  auto try_fit = [&](DecayModel m) {
    try {
      fits[to_string(m)] = fit_json(fit_decay(series.t, series.energy, m, job.t0));
    } catch (const Error& e) {
      fits[to_string(m)] = {{"error", e.what()}};
    }
  };
  if (job.model == "both" || job.model == "polynomial") try_fit(DecayModel::Polynomial);
  if (job.model == "both" || job.model == "exponential") try_fit(DecayModel::Exponential);
  rec.result = {{"steps", series.steps},
                {"samples", series.t.size()},
                {"energy_initial", e0},
                {"energy_final", series.energy.back()},
                {"max_relative_drift", drift},
                {"conserved", drift <= job.conservation_tol},
                {"max_step_increase", series.max_step_increase},
                {"monotone", series.max_step_increase <= 1e-12},
                {"initial_data", fmt::format("gaussian bump, spectral filter (1 + |xi|^2)^-{}", job.filter)},
                {"fits", fits}};
  if (job.snapshot_every > 0) rec.result["snapshots"] = written;
  CsvTable t({"t", "energy"});
  for (std::size_t i = 0; i < series.t.size(); ++i) t.add({csv_number(series.t[i]), csv_number(series.energy[i])});
  rec.tables.push_back({"", t.str()});
  rec.timings["total_seconds"] = seconds_since(start);
  return rec;
}

Record run_resolvent(const Json& config) {
  const auto start = Clock::now();
  const auto job = parse_resolvent(config);
  const ResolventProblem problem(job.grid, job.s, job.set, job.delta);
  const auto bound = uniform_lower_bound(problem, job.lambdas, job.options);
  Record rec{"resolvent", job.resolved, {}, {}, {}};
  CsvTable t({"lambda", "weight", "lambda_min", "lower", "iterations", "residual", "band_size", "blocks", "method"});
  Json secs = Json::array();
  for (const auto& r : bound.rows) {
    t.add({csv_number(r.lambda), csv_number(r.weight), csv_number(r.upper), csv_number(r.lower),
           std::to_string(r.iterations), csv_number(r.residual), std::to_string(r.band_size),
           std::to_string(r.blocks), r.method});
    secs.push_back(r.seconds);
  }
  rec.result = {{"c_star", bound.c_star},
                {"argmin", bound.argmin},
                {"c_star_upper", bound.c_star_upper},
                {"argmin_upper", bound.argmin_upper},
                {"constant", bound.c_star > 0.0 ? Json(bound.constant) : Json("inf")},
                {"points", bound.rows.size()},
                {"observed_fraction", problem.concentration().observed_fraction()}};
  rec.tables.push_back({"", t.str()});
  rec.timings["row_seconds"] = secs;
  rec.timings["total_seconds"] = seconds_since(start);
  return rec;
}

void write_record(const fs::path& out, const Record& record) {
  for (const auto& table : record.tables) {
    const std::string stem = table.name.empty() ? record.command : record.command + "_" + table.name;
    atomic_write(out / (stem + ".csv"), table.csv);
  }
  atomic_write(out / (record.command + ".gp"), gnuplot_stub(record.command));
  atomic_write(out / (record.command + ".json"), record_json(record).dump(2) + "\n");
}

std::optional<Json> cached_record(const fs::path& out, const std::string& command, const std::string& hash) {
  const fs::path path = out / (command + ".json");
  if (!fs::exists(path) || !fs::exists(out / (command + ".csv"))) return std::nullopt;
  try {
    Json rec = read_json_file(path);
    if (rec.value("config_hash", "") != hash) return std::nullopt;
    return rec;
  } catch (const Error&) {
    return std::nullopt;
  }
}

}  // namespace plslab
