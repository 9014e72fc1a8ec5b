#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "doctest.h"
#include "plslab/error.hpp"
#include "plslab/experiment.hpp"
#include "plslab/parallel.hpp"

using namespace plslab;
namespace fs = std::filesystem;

namespace {

const Json kWave = Json::parse(R"({
  "grid": {"N": 32},
  "s": 1.5,
  "damping": {"set": {"type": "grid_pattern", "width": 0.9, "period": 3.141592653589793}},
  "dt": 0.05,
  "horizon": 20,
  "stride": 4
})");

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("plslab_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("fnv1a64 reference values") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(fnv1a64("foobar") == 0x85944171f73967e8ULL);
}

TEST_CASE("config hash ignores key order and tracks values") {
  const Json a = Json::parse(R"({"x": 1, "y": {"b": 2, "a": 3}})");
  const Json b = Json::parse(R"({"y": {"a": 3, "b": 2}, "x": 1})");
  CHECK(config_hash(a) == config_hash(b));
  CHECK(config_hash(a).size() == 16);
  Json c = a;
  c["x"] = 2;
  CHECK(config_hash(a) != config_hash(c));
}

TEST_CASE("csv numbers round-trip") {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 1.0}) {
    const auto s = csv_number(v);
    CHECK(std::stod(s) == v);
  }
  CHECK(csv_number(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(csv_number(-std::numeric_limits<double>::infinity()) == "-inf");
  CHECK(csv_number(std::nan("")) == "nan");
  CsvTable t({"a", "b"});
  t.add({"1", "x"});
  CHECK(t.rows() == 1);
  CHECK(t.str() == "a,b\n1,x\n");
}

TEST_CASE("resolved configs are fixed points") {
  const Json configs[] = {
      kWave,
      Json::parse(R"({"torus": {"L": 8}, "set": {"type": "full"}, "k": 1, "ell": 2})"),
      Json::parse(R"({"plane_dim": 1, "points": [[0, 0], [1, 0], [0, 1], [1, 1]]})"),
      Json::parse(R"({"grid": {"N": 32}, "set": {"type": "full"}, "family": "ball", "radii": [2, 3]})"),
      Json::parse(R"({"grid": {"N": 32}, "s": 2, "set": {"type": "full"}, "lambda_max": 5})"),
  };
  const char* commands[] = {"wave", "gcc", "flatness", "pls-sweep", "resolvent"};
  for (int i = 0; i < 5; ++i) {
    CAPTURE(commands[i]);
    const Json r = resolve_config(commands[i], configs[i]);
    CHECK(resolve_config(commands[i], r) == r);
    CHECK(Json::parse(r.dump()) == r);
  }
}

TEST_CASE("unknown and missing keys name their path") {
  Json bad = kWave;
  bad["damping"]["amplitud"] = 2.0;
  try {
    resolve_config("wave", bad);
    FAIL("expected a config error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Config);
    CHECK(e.path() == "damping.amplitud");
  }
  Json missing = kWave;
  missing["grid"].erase("N");
  try {
    resolve_config("wave", missing);
    FAIL("expected a config error");
  } catch (const Error& e) {
    CHECK(e.path() == "grid.N");
  }
  CHECK_THROWS_AS(resolve_config("nope", Json::object()), Error);
}

TEST_CASE("records are deterministic across thread counts") {
  const Json cfg = Json::parse(R"({"grid": {"N": 32}, "s": 2, "set": {"type": "grid_pattern", "width": 0.9,
      "period": 6.283185307179586}, "delta": 0.1, "lambda_max": 30})");
  set_thread_count(1);
  const auto a = run_resolvent(cfg);
  set_thread_count(4);
  const auto b = run_resolvent(cfg);
  set_thread_count(1);
  REQUIRE(a.tables.size() == 1);
  CHECK(a.tables[0].csv == b.tables[0].csv);
  CHECK(a.result == b.result);
  const auto w1 = run_wave(kWave), w2 = run_wave(kWave);
  CHECK(w1.tables[0].csv == w2.tables[0].csv);
  CHECK(w1.result == w2.result);
}

TEST_CASE("write, cache and atomic replace") {
  const auto dir = scratch("cache");
  const auto rec = run_wave(kWave);
  write_record(dir, rec);
  for (const char* f : {"wave.json", "wave.csv", "wave.gp"}) CHECK(fs::exists(dir / f));
  const auto hash = config_hash(rec.config);
  const auto cached = cached_record(dir, "wave", hash);
  REQUIRE(cached.has_value());
  CHECK((*cached)["result"] == rec.result);
  CHECK((*cached)["config"] == rec.config);
  CHECK_FALSE(cached_record(dir, "wave", "0000000000000000").has_value());
  fs::remove(dir / "wave.csv");
  CHECK_FALSE(cached_record(dir, "wave", hash).has_value());

  atomic_write(dir / "f.txt", "one");
  atomic_write(dir / "f.txt", "two");
  CHECK(slurp(dir / "f.txt") == "two");
  std::size_t files = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir)) ++files;
  CHECK(files == 3);  // wave.json, wave.gp, f.txt
  fs::remove_all(dir);
}

TEST_CASE("zero damping run is conserved") {
  Json cfg = kWave;
  cfg["damping"]["set"] = {{"type", "constant"}, {"value", 0.0}};
  const auto rec = run_wave(cfg);
  CHECK(rec.result["conserved"] == true);
  CHECK(rec.result["monotone"] == true);
}

TEST_CASE("pls sweep verdict") {
  const Json cfg = Json::parse(R"({"grid": {"N": 64}, "set": {"type": "grid_pattern", "width": 0.11780972450961724,
      "period": 0.7853981633974483}, "delta": 0.09817477042468103, "family": "annulus", "units": "lattice",
      "radii": [4, 8, 16], "beta": 2})");
  const auto rec = run_pls_sweep(cfg);
  CHECK(rec.result["bounded"] == true);
  CHECK(rec.result["rows"].size() == 3);
  const auto first_line = rec.tables[0].csv.substr(0, rec.tables[0].csv.find('\n'));
  CHECK(first_line.find("second") == std::string::npos);
}
