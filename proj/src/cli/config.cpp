#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "lsl/cli.hpp"
#include "lsl/error.hpp"
#include "lsl/extremal.hpp"
#include "lsl/parallel.hpp"
#include "lsl/random_mult.hpp"

namespace lsl::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::uint64_t parse_digits(const std::string& s, const std::string& whole) {
  if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos)
    throw ConfigError("not a non-negative integer: '" + whole + "'");
  try {
    return std::stoull(s);
  } catch (const std::out_of_range&) {
    throw ConfigError("integer out of range: '" + whole + "'");
  }
}

std::uint64_t checked_pow10(std::uint64_t mant, std::uint64_t base, std::uint64_t exp, const std::string& whole) {
  unsigned __int128 v = mant;
  for (std::uint64_t i = 0; i < exp; ++i) {
    v *= base;
    if (v >> 64) throw ConfigError("integer out of range: '" + whole + "'");
  }
  return static_cast<std::uint64_t>(v);
}

}  // namespace

unsigned Config::workers() const { return resolve_workers(worker_request); }

void apply_setting(Config& c, const std::string& key, const std::string& value) {
  if (key == "cache_dir") {
    if (value.empty()) throw ConfigError("cache_dir must not be empty");
    c.cache_dir = value;
  } else if (key == "workers") {
    if (value == "auto") {
      c.worker_request = 0;
    } else {
      const auto w = parse_count(value);
      if (w == 0 || w > 4096) throw ConfigError("workers must be 'auto' or in [1, 4096]");
      c.worker_request = static_cast<unsigned>(w);
    }
  } else if (key == "seed") {
    c.default_seed = parse_digits(value, value);
  } else if (key == "float_mode") {
    c.float_mode = logsum::parse_mode(value);
  } else if (key == "output_format") {
    if (value == "csv")
      c.output_format = OutputFormat::Csv;
    else if (value == "json")
      c.output_format = OutputFormat::Json;
    else
      throw ConfigError("output_format must be csv or json");
  } else {
    throw ConfigError("unknown config key '" + key + "'");
  }
}

void apply_config_text(Config& c, const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    apply_setting(c, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
}

void apply_config_file(Config& c, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  apply_config_text(c, ss.str());
}

void apply_environment(Config& c) {
  const std::pair<const char*, const char*> vars[] = {{"LSL_CACHE_DIR", "cache_dir"},
                                                      {"LSL_WORKERS", "workers"},
                                                      {"LSL_SEED", "seed"},
                                                      {"LSL_FLOAT_MODE", "float_mode"},
                                                      {"LSL_OUTPUT_FORMAT", "output_format"}};
  for (const auto& [env, key] : vars)
    if (const char* v = std::getenv(env); v && *v) apply_setting(c, key, v);
}

std::uint64_t parse_count(const std::string& raw) {
  const std::string text = trim(raw);
  if (const auto caret = text.find('^'); caret != std::string::npos) {
    const auto base = parse_digits(text.substr(0, caret), text);
    const auto exp = parse_digits(text.substr(caret + 1), text);
    return checked_pow10(1, base, exp, text);
  }
  if (const auto e = text.find_first_of("eE"); e != std::string::npos) {
    const auto mant = parse_digits(text.substr(0, e), text);
    const auto exp = parse_digits(text.substr(e + 1), text);
    return checked_pow10(mant, 10, exp, text);
  }
  return parse_digits(text, text);
}

std::vector<std::uint64_t> parse_count_list(const std::string& text) {
  std::vector<std::uint64_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (trim(item).empty()) continue;
    out.push_back(parse_count(item));
  }
  return out;
}

MultiplicativeSpec parse_spec(const std::string& raw, std::uint64_t limit) {
  const std::string text = trim(raw);
  if (text == "liouville" || text == "lambda") return MultiplicativeSpec::liouville();
  if (text == "one") return MultiplicativeSpec::constant_one();
  if (text.rfind("char:", 0) == 0) {
    const std::string d = text.substr(5);
    std::int64_t v = 0;
    try {
      std::size_t pos = 0;
      v = std::stoll(d, &pos);
      if (pos != d.size()) throw std::invalid_argument(d);
    } catch (const std::exception&) {
      throw ConfigError("bad discriminant in '" + text + "'");
    }
    return MultiplicativeSpec::character(v);
  }
  if (text.rfind("random:", 0) == 0) {
    const auto seed = parse_digits(text.substr(7), text);
    auto spec = MultiplicativeSpec::from_signs(randmult::sample_sign_vector({seed, limit}));
    spec.rename(text);
    return spec;
  }
  throw ConfigError("unknown function '" + text + "' (expected liouville, one, char:<d> or random:<seed>)");
}

std::vector<std::string> expand_spec_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    if (item.rfind("chars:", 0) == 0) {
      const auto bound = parse_digits(item.substr(6), item);
      for (const auto d : extremal::fundamental_discriminants(static_cast<std::int64_t>(bound)))
        out.push_back("char:" + std::to_string(d));
    } else {
      out.push_back(item);
    }
  }
  return out;
}

}  // namespace lsl::cli
