#pragma once

// Config-driven runners behind the command line, plus the record plumbing
// they share: canonical hashing, CSV tables, atomic writes and the cache.
//
// Every runner parses its JSON config strictly (unknown keys are errors),
// fills in defaults, and returns the resolved config alongside the results.
// CSV tables never contain timing columns, so their bytes depend only on the
// resolved config, the seed and the code version.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "plslab/config.hpp"
#include "plslab/lattice.hpp"

namespace plslab {

std::uint64_t fnv1a64(std::string_view bytes);
/// 16 hex digits over the canonical dump of `resolved` and the version.
std::string config_hash(const Json& resolved);

/// Writes to a sibling temporary file and renames it into place.
void atomic_write(const std::filesystem::path& path, std::string_view content);
Json read_json_file(const std::filesystem::path& path);

/// Round-trip decimal ("inf", "-inf", "nan" for non-finite values).
std::string csv_number(double value);

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);
  void add(std::vector<std::string> row);
  std::size_t rows() const noexcept { return rows_.size(); }
  std::string str() const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

/// {"d": 2, "L": 2 pi, "N": required}.
TorusGrid grid_from_json(ConfigNode node);
Json to_json(const TorusGrid& grid);

struct Table {
  std::string name;  // file stem suffix; empty for the main table
  std::string csv;
};

struct Record {
  std::string command;
  Json config;  // resolved
  Json result;
  std::vector<Table> tables;
  Json timings = Json::object();
};

/// command, version, config_hash, config, result and timings.
Json record_json(const Record& record);

Record run_gcc(const Json& config);
Record run_flatness(const Json& config);
Record run_pls_sweep(const Json& config);
/// Snapshots (when configured) go to `snapshot_dir`.
Record run_wave(const Json& config, const std::filesystem::path& snapshot_dir = {});
Record run_resolvent(const Json& config);

/// Writes <out>/<command>.json, one CSV per table (<command>.csv or
/// <command>_<name>.csv) and a gnuplot stub <command>.gp.
void write_record(const std::filesystem::path& out, const Record& record);

/// The stored record for `command` in `out` when its config hash matches.
std::optional<Json> cached_record(const std::filesystem::path& out, const std::string& command,
                                  const std::string& hash);

/// Parses and resolves without running; used for cache lookups.
Json resolve_config(const std::string& command, const Json& config);

}  // namespace plslab
