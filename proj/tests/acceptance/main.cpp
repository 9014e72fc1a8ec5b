// Prints one line per criterion. Exits 0 once every requested criterion has
// been evaluated and reported; --strict also fails on any FAIL verdict.

#include <cstdio>
#include <filesystem>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "acceptance.hpp"
#include "plslab/experiment.hpp"

int main(int argc, char** argv) {
  using namespace plslab;
  CLI::App app{"plslab acceptance suite"};
  acceptance::Options options;
  std::vector<int> ids;
  std::string out;
  bool strict = false;
  app.add_flag("--quick", options.quick, "reduced problem sizes");
  app.add_option("--seed", options.seed, "base seed");
  app.add_option("--criteria", ids, "criteria to run (default: all)")->check(CLI::Range(1, acceptance::kCriteria));
  app.add_option("--out", out, "directory for per-criterion CSV files and a JSON summary");
  app.add_flag("--strict", strict, "exit 1 when any criterion fails");
  CLI11_PARSE(app, argc, argv);

  std::vector<acceptance::Outcome> outcomes;
  if (ids.empty())
    for (int i = 1; i <= acceptance::kCriteria; ++i) ids.push_back(i);
  std::size_t passed = 0;
  for (int id : ids) {
    auto o = acceptance::run_criterion(id, options);
    fmt::print("[{}] {:>2} {}: {} ({:.1f} s)\n", o.passed ? "PASS" : "FAIL", o.id, o.name, o.summary, o.seconds);
    std::fflush(stdout);
    passed += o.passed ? 1 : 0;
    outcomes.push_back(std::move(o));
  }
  fmt::print("{}/{} passed\n", passed, outcomes.size());

  if (!out.empty()) {
    const std::filesystem::path dir(out);
    std::filesystem::create_directories(dir);
    for (const auto& o : outcomes) atomic_write(dir / fmt::format("criterion_{:02}.csv", o.id), o.csv);
    atomic_write(dir / "acceptance.csv", acceptance::suite_csv(outcomes));
    auto summary = acceptance::suite_json(outcomes);
    Json timings = Json::object();
    for (const auto& o : outcomes) timings[std::to_string(o.id)] = o.seconds;
    summary["timings"] = timings;
    atomic_write(dir / "acceptance.json", summary.dump(2) + "\n");
  }
  return strict && passed != outcomes.size() ? 1 : 0;
}
