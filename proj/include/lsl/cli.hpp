#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "lsl/logsum.hpp"
#include "lsl/multiplicative.hpp"

namespace lsl::cli {

inline constexpr const char* kCodeVersion = "1.0.0";

enum class OutputFormat { Csv, Json };

// Resolution order: defaults < config file < flags < LSL_* environment.
struct Config {
  std::filesystem::path cache_dir = ".lsl-cache";
  unsigned worker_request = 1;  // 0 = auto
  std::uint64_t default_seed = 0;
  logsum::Mode float_mode = logsum::Mode::CompensatedFloat;
  std::optional<OutputFormat> output_format;  // unset: per-command default

  unsigned workers() const;
};

// Applies one key = value setting (keys: cache_dir, workers, seed,
// float_mode, output_format).
void apply_setting(Config& config, const std::string& key, const std::string& value);
void apply_config_text(Config& config, const std::string& text);
void apply_config_file(Config& config, const std::filesystem::path& path);
// Reads LSL_CACHE_DIR, LSL_WORKERS, LSL_SEED, LSL_FLOAT_MODE, LSL_OUTPUT_FORMAT.
void apply_environment(Config& config);

// "123", "1e6", "10^6"
std::uint64_t parse_count(const std::string& text);
std::vector<std::uint64_t> parse_count_list(const std::string& text);

// liouville | lambda | one | char:<d> | random:<seed>. Random specs are
// materialised on the primes <= limit.
MultiplicativeSpec parse_spec(const std::string& text, std::uint64_t limit);
// Comma list of specs; chars:<D> expands to every fundamental discriminant
// with |d| <= D.
std::vector<std::string> expand_spec_list(const std::string& text);

using Json = nlohmann::ordered_json;

// Non-finite doubles become the strings "inf", "-inf", "nan".
Json json_number(double v);

struct ExperimentRecord {
  std::string command;
  Json parameters = Json::object();
  Json outputs = Json::object();
  std::optional<std::int64_t> wall_time_ms;

  Json to_json() const;
  std::string to_json_line() const;
  // Columns: command, parameter keys, output keys (nested values as JSON).
  std::string csv_header() const;
  std::string csv_row() const;
};

std::string csv_escape(const std::string& field);
std::vector<std::string> split_csv_line(const std::string& line);

struct SeriesPoint {
  double x;
  double y;
};
struct Series {
  std::string label;
  std::vector<SeriesPoint> points;
};

// Line chart with log10 x axis; only path, line and text elements.
std::string render_svg(const std::vector<Series>& series, const std::string& title);

// Full command-line entry; returns the process exit code
// (0 ok, 1 runtime failure, 2 usage, 3 resource limit).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lsl::cli
