#pragma once

#include <cmath>
#include <cstddef>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "conefix/errors.hpp"
#include "conefix/numeric.hpp"
#include "conefix/solver.hpp"

namespace conefix::io {

enum class TraceFormat { csv, json };

inline const char* trace_csv_header = "n,x_n,gap_vector,gap_norm,cumulative_bound";

/// Rate used for the cumulative_bound column K h^n |d_0|; absent when the
/// instance implies no rate, in which case the column is left empty (CSV)
/// or null (JSON).
struct TraceBound {
  std::optional<double> h;
  double K = 1.0;

  std::optional<double> at(std::size_t n, double d0) const {
    if (!h) return std::nullopt;
    return K * std::pow(*h, static_cast<double>(n)) * d0;
  }
};

namespace detail {

inline std::string join_coords(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ';';
    out += format_double(v[i]);
  }
  return out;
}

inline void require_rows(const IterationTrace<Point>& trace) {
  if (trace.rows() == 0) throw ConfigError("refusing to emit an empty trace");
}

}  // namespace detail

inline std::string trace_to_csv(const IterationTrace<Point>& trace, const TraceBound& bound) {
  detail::require_rows(trace);
  std::string out = trace_csv_header;
  out += '\n';
  const double d0 = trace.gap_norms.front();
  for (std::size_t n = 0; n < trace.rows(); ++n) {
    const auto b = bound.at(n, d0);
    out += std::to_string(n) + ',' + detail::join_coords(trace.x_sequence[n]) + ',' +
           detail::join_coords(trace.t_image_gaps[n].coords()) + ',' + format_double(trace.gap_norms[n]) + ',' +
           (b ? format_double(*b) : std::string()) + '\n';
  }
  return out;
}

inline nlohmann::ordered_json trace_to_json(const IterationTrace<Point>& trace, const TraceBound& bound) {
  detail::require_rows(trace);
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  const double d0 = trace.gap_norms.front();
  for (std::size_t n = 0; n < trace.rows(); ++n) {
    nlohmann::ordered_json row;
    row["n"] = n;
    row["x_n"] = trace.x_sequence[n];
    row["gap_vector"] = trace.t_image_gaps[n].coords();
    row["gap_norm"] = trace.gap_norms[n];
    const auto b = bound.at(n, d0);
    row["cumulative_bound"] = b ? nlohmann::ordered_json(*b) : nlohmann::ordered_json(nullptr);
    rows.push_back(std::move(row));
  }
  nlohmann::ordered_json j;
  j["stop_reason"] = to_string(trace.stop_reason);
  j["iterations"] = trace.iterations;
  j["rows"] = std::move(rows);
  return j;
}

inline std::string render_trace(const IterationTrace<Point>& trace, const TraceBound& bound, TraceFormat format) {
  if (format == TraceFormat::csv) return trace_to_csv(trace, bound);
  return trace_to_json(trace, bound).dump(2) + "\n";
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open output file", path);
  out << content;
  out.flush();
  if (!out) throw IoError("failed writing output file", path);
}

inline void emit_trace(const IterationTrace<Point>& trace, const TraceBound& bound, TraceFormat format,
                       const std::string& path) {
  write_file(path, render_trace(trace, bound, format));
}

/// The columns of an emitted trace, read back.
struct TraceRows {
  std::vector<Point> x_sequence;
  std::vector<std::vector<double>> gap_vectors;
  std::vector<double> gap_norms;
  std::vector<std::optional<double>> cumulative_bounds;
};

inline TraceRows parse_trace_json(const std::string& text) {
  TraceRows out;
  try {
    const auto j = nlohmann::json::parse(text);
    for (const auto& row : j.at("rows")) {
      out.x_sequence.push_back(row.at("x_n").get<Point>());
      out.gap_vectors.push_back(row.at("gap_vector").get<std::vector<double>>());
      out.gap_norms.push_back(row.at("gap_norm").get<double>());
      const auto& b = row.at("cumulative_bound");
      out.cumulative_bounds.push_back(b.is_null() ? std::nullopt : std::optional(b.get<double>()));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed trace: ") + e.what());
  }
  return out;
}

inline TraceRows parse_trace_csv(const std::string& text) {
  TraceRows out;
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != trace_csv_header) throw ConfigError("malformed trace: bad header");
  auto split = [](const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::string cur;
    for (char ch : s) {
      if (ch == sep) {
        parts.push_back(cur);
        cur.clear();
      } else {
        cur += ch;
      }
    }
    parts.push_back(cur);
    return parts;
  };
  auto coords = [&](const std::string& s) {
    std::vector<double> v;
    for (const auto& p : split(s, ';')) v.push_back(std::stod(p));
    return v;
  };
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split(line, ',');
    if (cells.size() != 5) throw ConfigError("malformed trace row: " + line);
    out.x_sequence.push_back(coords(cells[1]));
    out.gap_vectors.push_back(coords(cells[2]));
    out.gap_norms.push_back(std::stod(cells[3]));
    out.cumulative_bounds.push_back(cells[4].empty() ? std::nullopt : std::optional(std::stod(cells[4])));
  }
  return out;
}

}  // namespace conefix::io
