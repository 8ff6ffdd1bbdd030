#include <algorithm>
#include <cmath>
#include <sstream>

#include "lsl/cli.hpp"
#include "lsl/format.hpp"
#include "lsl/sieve_cache.hpp"

namespace lsl::cli {

Json json_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

Json ExperimentRecord::to_json() const {
  Json j;
  j["command"] = command;
  j["parameters"] = parameters;
  j["outputs"] = outputs;
  j["versions"] = {{"code", kCodeVersion}, {"cache_format", kCacheFormatVersion}};
  if (wall_time_ms) j["wall_time_ms"] = *wall_time_ms;
  return j;
}

std::string ExperimentRecord::to_json_line() const { return to_json().dump(); }

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
  std::string out = "\"";
  for (const char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(std::move(cur));
  return out;
}

namespace {

std::string cell(const Json& v) {
  if (v.is_null()) return "";
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number_unsigned()) return std::to_string(v.get<std::uint64_t>());
  if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
  if (v.is_number_float()) return format_double(v.get<double>());
  return v.dump();
}

}  // namespace

std::string ExperimentRecord::csv_header() const {
  std::string h = "command";
  for (const auto& [k, v] : parameters.items()) h += "," + csv_escape(k);
  for (const auto& [k, v] : outputs.items()) h += "," + csv_escape(k);
  if (wall_time_ms) h += ",wall_time_ms";
  return h;
}

std::string ExperimentRecord::csv_row() const {
  std::string r = csv_escape(command);
  for (const auto& [k, v] : parameters.items()) r += "," + csv_escape(cell(v));
  for (const auto& [k, v] : outputs.items()) r += "," + csv_escape(cell(v));
  if (wall_time_ms) r += "," + std::to_string(*wall_time_ms);
  return r;
}

std::string render_svg(const std::vector<Series>& series, const std::string& title) {
  constexpr double W = 800, H = 500, left = 80, right = 180, top = 40, bottom = 60;
  double xmin = INFINITY, xmax = -INFINITY, ymin = INFINITY, ymax = -INFINITY;
  bool logx = true;
  for (const auto& s : series)
    for (const auto& p : s.points) {
      if (!std::isfinite(p.x) || !std::isfinite(p.y)) continue;
      if (p.x <= 0) logx = false;
      xmin = std::min(xmin, p.x);
      xmax = std::max(xmax, p.x);
      ymin = std::min(ymin, p.y);
      ymax = std::max(ymax, p.y);
    }
  if (!std::isfinite(xmin)) xmin = 1, xmax = 10, ymin = 0, ymax = 1;
  auto tx = [&](double x) { return logx ? std::log10(x) : x; };
  double x0 = tx(xmin), x1 = tx(xmax);
  if (x1 - x0 < 1e-12) x0 -= 0.5, x1 += 0.5;
  ymin = std::min(ymin, 0.0);
  ymax = std::max(ymax, 0.0);
  if (ymax - ymin < 1e-12) ymax = ymin + 1;
  const double pad = 0.05 * (ymax - ymin);
  ymin -= pad;
  ymax += pad;
  auto px = [&](double x) { return left + (tx(x) - x0) / (x1 - x0) * (W - left - right); };
  auto py = [&](double y) { return top + (ymax - y) / (ymax - ymin) * (H - top - bottom); };
  auto num = [](double v) {
    std::ostringstream ss;
    ss.precision(6);
    ss << v;
    return ss.str();
  };
  auto esc = [](const std::string& s) {
    std::string o;
    for (const char c : s) {
      if (c == '<') o += "&lt;";
      else if (c == '>') o += "&gt;";
      else if (c == '&') o += "&amp;";
      else o += c;
    }
    return o;
  };
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W << ' '
    << H << "\">\n";
  o << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">" << esc(title)
    << "</text>\n";
  // axes
  o << "<line x1=\"" << left << "\" y1=\"" << H - bottom << "\" x2=\"" << W - right << "\" y2=\"" << H - bottom
    << "\" stroke=\"black\"/>\n";
  o << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << H - bottom << "\" stroke=\"black\"/>\n";
  o << "<line x1=\"" << left << "\" y1=\"" << num(py(0)) << "\" x2=\"" << W - right << "\" y2=\"" << num(py(0))
    << "\" stroke=\"#999\" stroke-dasharray=\"4 3\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double xv = x0 + (x1 - x0) * i / 4.0;
    const double X = left + (W - left - right) * i / 4.0;
    o << "<line x1=\"" << num(X) << "\" y1=\"" << H - bottom << "\" x2=\"" << num(X) << "\" y2=\"" << H - bottom + 5
      << "\" stroke=\"black\"/>\n";
    o << "<text x=\"" << num(X) << "\" y=\"" << H - bottom + 20 << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
      << (logx ? "1e" + num(xv) : num(xv)) << "</text>\n";
    const double yv = ymin + (ymax - ymin) * i / 4.0;
    o << "<text x=\"" << left - 6 << "\" y=\"" << num(py(yv) + 4) << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
      << num(yv) << "</text>\n";
  }
  o << "<text x=\"" << (left + W - right) / 2 << "\" y=\"" << H - 15 << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">"
    << (logx ? "x (log scale)" : "x") << "</text>\n";
  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto& s = series[i];
    const char* color = colors[i % 8];
    std::string d;
    for (const auto& p : s.points) {
      if (!std::isfinite(p.x) || !std::isfinite(p.y)) continue;
      d += (d.empty() ? "M" : " L") + num(px(p.x)) + " " + num(py(p.y));
    }
    if (!d.empty()) o << "<path d=\"" << d << "\" fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\"/>\n";
    const double ly = top + 16.0 * static_cast<double>(i);
    o << "<line x1=\"" << W - right + 10 << "\" y1=\"" << ly << "\" x2=\"" << W - right + 30 << "\" y2=\"" << ly << "\" stroke=\""
      << color << "\" stroke-width=\"2\"/>\n";
    o << "<text x=\"" << W - right + 35 << "\" y=\"" << ly + 4 << "\" font-family=\"sans-serif\" font-size=\"11\">" << esc(s.label)
      << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

}  // namespace lsl::cli
