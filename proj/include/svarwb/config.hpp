#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "svarwb/inference.hpp"

namespace svarwb {

constexpr int kSchemaVersion = 1;

struct DataSpec {
  std::filesystem::path path;
  std::vector<std::string> columns;  // empty means every column except the date column
  std::string date_column;
  // 0-based first row of each later regime, resolved from row numbers or dates.
  std::vector<int> break_rows;
  std::vector<std::string> break_dates;  // unresolved dates, resolved on load
};

struct DgpSpec {
  std::vector<ReducedFormRegime> regimes;
  std::vector<std::string> names;
  std::vector<int> break_rows;  // 0-based
  int T = 0;
  int burn_in = 0;
};

struct RunConfig {
  std::string text;  // file contents, echoed verbatim into the output directory
  std::filesystem::path base_dir;
  int schema_version = kSchemaVersion;

  int n = 0;
  int s = 1;
  int l = 1;
  TransformSpec transform;
  RestrictionSet restrictions;

  std::optional<DataSpec> data;
  std::optional<DgpSpec> dgp;

  int identification_draws = 10000;
  RoutePreference route = RoutePreference::Auto;
  GeneralSolverConfig solver;

  InferenceOptions inference;
  double alpha = 0.9;
  ProjectionMode projection = ProjectionMode::SwitchingLabel;

  std::uint64_t seed = 0;
  int threads = 1;
  std::filesystem::path output = "svarwb_out";
};

// Field errors carry a JSON pointer to the offending entry; syntax errors
// carry the byte offset reported by the parser.
RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = ".");
RunConfig load_config(const std::filesystem::path& path);

struct Dataset {
  Matrix y;
  std::vector<std::string> names;
  std::vector<std::string> dates;  // empty without a date column
  std::vector<int> break_rows;
};

Dataset load_dataset(const DataSpec& spec);

}  // namespace svarwb
