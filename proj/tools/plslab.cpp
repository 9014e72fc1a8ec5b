// Command-line runner. Each subcommand reads an optional JSON config, applies
// flag overrides, and writes <out>/<command>.{json,csv,gp}. A stored record
// with the same config hash is reused unless --force is given.
//
// Exit codes: 0 success, 1 eigensolver non-convergence, 2 configuration or
// other error.

#include <cstdio>
#include <filesystem>
#include <functional>
#include <optional>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "../tests/acceptance/acceptance.hpp"
#include "plslab/error.hpp"
#include "plslab/experiment.hpp"
#include "plslab/parallel.hpp"
#include "plslab/version.hpp"

namespace fs = std::filesystem;
using namespace plslab;

namespace {

struct Common {
  std::string config;
  std::string out = "plslab-out";
  bool force = false;
  std::size_t threads = 0;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config, "JSON config file");
  cmd->add_option("--out", c.out, "output directory")->capture_default_str();
  cmd->add_flag("--force", c.force, "recompute even when a cached record matches");
  cmd->add_option("--threads", c.threads, "worker threads (default: PLSLAB_THREADS or 1)");
}

Json load(const Common& c) {
  if (c.config.empty()) return Json::object();
  Json j = read_json_file(c.config);
  if (!j.is_object()) throw Error(ErrorKind::Config, "config must be a JSON object", c.config);
  return j;
}

// Overrides collected from flags; applied in registration order.
using Override = std::function<void(Json&)>;

template <class T>
void flag(CLI::App* cmd, const std::string& name, const std::string& help, std::vector<Override>& out,
          std::function<void(Json&, const T&)> apply) {
  auto value = std::make_shared<T>();
  auto* opt = cmd->add_option(name, *value, help);
  out.push_back([value, opt, apply](Json& j) {
    if (opt->count() > 0) apply(j, *value);
  });
}

int run_command(const std::string& command, const Common& c, const std::vector<Override>& overrides,
                const std::function<Record(const Json&)>& runner) {
  if (c.threads > 0) set_thread_count(c.threads);
  Json config = load(c);
  for (const auto& o : overrides) o(config);
  const Json resolved = resolve_config(command, config);
  const std::string hash = config_hash(resolved);
  const fs::path out(c.out);
  if (!c.force) {
    if (auto cached = cached_record(out, command, hash)) {
      fmt::print(stderr, "cache hit: {} (config {}); use --force to recompute\n", (out / (command + ".json")).string(),
                 hash);
      fmt::print("{}\n", (*cached)["result"].dump(2));
      return 0;
    }
  }
  const Record rec = runner(config);
  fs::create_directories(out);
  write_record(out, rec);
  fmt::print(stderr, "wrote {} (config {})\n", (out / (command + ".json")).string(), hash);
  fmt::print("{}\n", rec.result.dump(2));
  return 0;
}

int run_suite_command(const Common& c, const acceptance::Options& options, const std::vector<int>& ids, bool strict) {
  if (c.threads > 0) set_thread_count(c.threads);
  std::size_t passed = 0;
  std::vector<acceptance::Outcome> outcomes;
  for (int id : ids.empty() ? std::vector<int>{1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11} : ids) {
    auto o = acceptance::run_criterion(id, options);
    fmt::print("[{}] {:>2} {}: {} ({:.1f} s)\n", o.passed ? "PASS" : "FAIL", o.id, o.name, o.summary, o.seconds);
    std::fflush(stdout);
    passed += o.passed ? 1 : 0;
    outcomes.push_back(std::move(o));
  }
  fmt::print("{}/{} passed\n", passed, outcomes.size());
  const fs::path out(c.out);
  fs::create_directories(out);
  for (const auto& o : outcomes) atomic_write(out / fmt::format("suite_criterion_{:02}.csv", o.id), o.csv);
  atomic_write(out / "suite.csv", acceptance::suite_csv(outcomes));
  Json summary = acceptance::suite_json(outcomes);
  summary["quick"] = options.quick;
  summary["seed"] = options.seed;
  Json timings = Json::object();
  for (const auto& o : outcomes) timings[std::to_string(o.id)] = o.seconds;
  summary["timings"] = timings;
  atomic_write(out / "suite.json", summary.dump(2) + "\n");
  return strict && passed != outcomes.size() ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"plslab: spectral concentration, observability and damped-wave experiments on the torus"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(version_string()));

  Common common;
  std::function<int()> action;

  auto* gcc = app.add_subcommand("gcc", "estimate the geometric control constant of a set");
  add_common(gcc, common);
  std::vector<Override> gcc_ov;
  flag<std::string>(gcc, "--set", "set JSON file", gcc_ov, [](Json& j, const std::string& f) { j["set"] = read_json_file(f); });
  flag<int>(gcc, "--k", "cube dimension", gcc_ov, [](Json& j, const int& v) { j["k"] = v; });
  flag<double>(gcc, "--ell", "cube side", gcc_ov, [](Json& j, const double& v) { j["ell"] = v; });
  flag<std::size_t>(gcc, "--budget", "number of cube centers", gcc_ov,
                    [](Json& j, const std::size_t& v) { j["budget"]["centers"] = v; });
  flag<std::uint64_t>(gcc, "--seed", "random seed", gcc_ov, [](Json& j, const std::uint64_t& v) { j["seed"] = v; });
  gcc->callback([&] { action = [&] { return run_command("gcc", common, gcc_ov, run_gcc); }; });

  auto* flat = app.add_subcommand("flatness", "flatness of a point set or of a spectral mask");
  add_common(flat, common);
  std::vector<Override> flat_ov;
  flat->callback([&] { action = [&] { return run_command("flatness", common, flat_ov, run_flatness); }; });

  auto* pls = app.add_subcommand("pls-sweep", "concentration constants over a family of spectral regions");
  add_common(pls, common);
  std::vector<Override> pls_ov;
  flag<std::string>(pls, "--family", "annulus, ball or shell", pls_ov,
                    [](Json& j, const std::string& v) { j["family"] = v; });
  {
    auto radii = std::make_shared<std::vector<double>>();
    auto* opt = pls->add_option("--R-list", *radii, "radii, comma separated")->delimiter(',');
    pls_ov.push_back([radii, opt](Json& j) {
      if (opt->count() > 0) j["radii"] = *radii;
    });
  }
  flag<double>(pls, "--beta", "annulus half-thickness", pls_ov, [](Json& j, const double& v) { j["beta"] = v; });
  flag<double>(pls, "--delta", "neighborhood radius of the set", pls_ov, [](Json& j, const double& v) { j["delta"] = v; });
  pls->callback([&] { action = [&] { return run_command("pls-sweep", common, pls_ov, run_pls_sweep); }; });

  auto* wave = app.add_subcommand("wave", "damped fractional wave evolution with decay fits");
  add_common(wave, common);
  std::vector<Override> wave_ov;
  flag<double>(wave, "--s", "fractional order", wave_ov, [](Json& j, const double& v) { j["s"] = v; });
  flag<std::string>(wave, "--damping", "damping set JSON file", wave_ov,
                    [](Json& j, const std::string& f) { j["damping"]["set"] = read_json_file(f); });
  flag<double>(wave, "--dt", "time step", wave_ov, [](Json& j, const double& v) { j["dt"] = v; });
  flag<double>(wave, "--horizon", "final time", wave_ov, [](Json& j, const double& v) { j["horizon"] = v; });
  flag<std::string>(wave, "--fit-model", "polynomial, exponential, both or none", wave_ov,
                    [](Json& j, const std::string& v) { j["fit"]["model"] = v; });
  wave->callback([&] {
    action = [&] {
      const fs::path snaps = fs::path(common.out) / "snapshots";
      return run_command("wave", common, wave_ov, [&](const Json& cfg) { return run_wave(cfg, snaps); });
    };
  });

  auto* res = app.add_subcommand("resolvent", "uniform lower bound of the resolvent quadratic form");
  add_common(res, common);
  std::vector<Override> res_ov;
  flag<double>(res, "--s", "fractional order", res_ov, [](Json& j, const double& v) { j["s"] = v; });
  flag<double>(res, "--lambda-max", "largest lambda of the generated grid", res_ov, [](Json& j, const double& v) {
    j.erase("lambdas");
    j["lambda_max"] = v;
  });
  flag<std::string>(res, "--set", "set JSON file", res_ov, [](Json& j, const std::string& f) { j["set"] = read_json_file(f); });
  flag<double>(res, "--delta", "neighborhood radius of the set", res_ov, [](Json& j, const double& v) { j["delta"] = v; });
  res->callback([&] { action = [&] { return run_command("resolvent", common, res_ov, run_resolvent); }; });

  auto* suite = app.add_subcommand("suite", "run the acceptance suite and write a pass/fail table");
  suite->add_option("--out", common.out, "output directory")->capture_default_str();
  suite->add_option("--threads", common.threads, "worker threads");
  acceptance::Options suite_options;
  std::vector<int> ids;
  bool strict = false;
  suite->add_flag("--quick", suite_options.quick, "reduced problem sizes");
  suite->add_option("--seed", suite_options.seed, "base seed");
  suite->add_option("--criteria", ids, "criteria to run (default: all)")
      ->check(CLI::Range(1, acceptance::kCriteria));
  suite->add_flag("--strict", strict, "exit 1 when any criterion fails");
  suite->callback([&] { action = [&] { return run_suite_command(common, suite_options, ids, strict); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }
  try {
    return action();
  } catch (const NonConvergenceError& e) {
    fmt::print(stderr, "error: {} (best estimate {}, residual {:.3e} after {} iterations)\n", e.what(),
               e.best_estimate(), e.residual(), e.iterations());
    return 1;
  } catch (const Error& e) {
    fmt::print(stderr, "error ({}): {}\n", to_string(e.kind()), e.what());
    return 2;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 2;
  }
}
