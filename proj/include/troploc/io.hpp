#pragma once

// Point clouds as CSV (one point per row) or JSON (array of arrays).

#include <charconv>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "troploc/core.hpp"

namespace troploc::io {

/// Shortest decimal string that parses back to the same double.
inline std::string format_double(double v) {
  if (v == 0.0) return "0";  // folds -0
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc{}) throw NumericError("cannot format number");
  return std::string(buf, ptr);
}

inline double parse_double(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
    throw InputError("not a number: '" + std::string(s) + "'");
  }
  return v;
}

inline PointCloud parse_csv(std::string_view text) {
  std::vector<TorusPoint> points;
  std::size_t line_no = 0;
  std::istringstream in{std::string(text)};
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos || line[line.find_first_not_of(" \t")] == '#') continue;
    std::vector<double> row;
    std::string_view rest = line;
    while (true) {
      const auto comma = rest.find(',');
      try {
        row.push_back(parse_double(rest.substr(0, comma)));
      } catch (const InputError& e) {
        throw InputError("line " + std::to_string(line_no) + ": " + e.what());
      }
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    points.emplace_back(std::move(row));
  }
  return PointCloud(std::move(points));
}

inline std::string to_csv(const PointCloud& cloud) {
  std::string out;
  for (const auto& p : cloud) {
    for (std::size_t j = 0; j < p.dim(); ++j) {
      if (j) out += ',';
      out += format_double(p[j]);
    }
    out += '\n';
  }
  return out;
}

inline TorusPoint point_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw InputError("a point must be a JSON array of numbers");
  std::vector<double> coords;
  for (const auto& v : j) {
    if (!v.is_number()) throw InputError("a point must be a JSON array of numbers");
    coords.push_back(v.get<double>());
  }
  return TorusPoint(std::move(coords));
}

inline nlohmann::json point_to_json(const TorusPoint& p) { return nlohmann::json(p.vec()); }

inline PointCloud cloud_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw InputError("a point cloud must be a JSON array of arrays");
  std::vector<TorusPoint> points;
  for (const auto& row : j) points.push_back(point_from_json(row));
  return PointCloud(std::move(points));
}

inline nlohmann::json cloud_to_json(const PointCloud& cloud) {
  auto out = nlohmann::json::array();
  for (const auto& p : cloud) out.push_back(point_to_json(p));
  return out;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline nlohmann::json parse_json(const std::string& text, const std::string& origin) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(origin + ": " + e.what());
  }
}

/// Loads a cloud, choosing the format from the extension (.json, else CSV).
inline PointCloud load_cloud(const std::string& path) {
  const auto text = read_file(path);
  if (path.size() >= 5 && path.compare(path.size() - 5, 5, ".json") == 0) {
    return cloud_from_json(parse_json(text, path));
  }
  return parse_csv(text);
}

}  // namespace troploc::io
