#pragma once

// Tabular output. A Table is written either as CSV (header row, ',' separator,
// '.' decimal point, floats at 17 significant digits, empty field for a
// missing value) or as a JSON document {"columns": [...], "rows": [{...}]}.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <system_error>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "rgglab/geometry.hpp"
#include "rgglab/harness.hpp"

namespace rgglab {

using Cell = std::variant<std::monostate, double, std::uint64_t, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add_row(std::vector<Cell> row) {
    if (row.size() != columns.size()) throw std::invalid_argument("row width does not match header");
    rows.push_back(std::move(row));
  }
};

/// Locale-independent rendering at 17 significant digits.
inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  if (res.ec != std::errc{}) throw std::runtime_error("float formatting failed");
  return std::string(buf, res.ptr);
}

inline std::string csv_field(const Cell& c) {
  struct Visitor {
    std::string operator()(std::monostate) const { return {}; }
    std::string operator()(double v) const { return format_double(v); }
    std::string operator()(std::uint64_t v) const { return std::to_string(v); }
    std::string operator()(const std::string& s) const {
      if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
      std::string out = "\"";
      for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
      }
      return out + "\"";
    }
  };
  return std::visit(Visitor{}, c);
}

inline void write_csv(std::ostream& os, const Table& t) {
  for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
  os << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << csv_field(row[i]);
    os << '\n';
  }
}

inline nlohmann::json to_json(const Table& t) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : t.rows) {
    nlohmann::json obj = nlohmann::json::object();
    for (std::size_t i = 0; i < row.size(); ++i) {
      const Cell& c = row[i];
      if (std::holds_alternative<double>(c)) {
        const double v = std::get<double>(c);
        obj[t.columns[i]] = std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(format_double(v));
      } else if (std::holds_alternative<std::uint64_t>(c)) {
        obj[t.columns[i]] = std::get<std::uint64_t>(c);
      } else if (std::holds_alternative<std::string>(c)) {
        obj[t.columns[i]] = std::get<std::string>(c);
      } else {
        obj[t.columns[i]] = nullptr;
      }
    }
    rows.push_back(std::move(obj));
  }
  return nlohmann::json{{"columns", t.columns}, {"rows", std::move(rows)}};
}

inline void write_json(std::ostream& os, const Table& t) { os << to_json(t).dump(2) << '\n'; }

// ---------------------------------------------------------------------------
// Tables for the harness results

inline Cell cell(std::size_t v) { return Cell{static_cast<std::uint64_t>(v)}; }
inline Cell cell(double v) { return Cell{v}; }
inline Cell cell(const std::optional<double>& v) { return v ? Cell{*v} : Cell{}; }

inline Table points_table(const PointSet& ps) {
  Table t{{"index", "x", "y"}, {}};
  t.rows.reserve(ps.size());
  for (std::size_t i = 0; i < ps.size(); ++i) t.add_row({cell(i), cell(ps[i].x()), cell(ps[i].y())});
  return t;
}

inline Table estimate_table(const std::vector<EstimateRow>& rows) {
  Table t{{"name", "n", "point_estimate", "ci_low", "ci_high", "trials", "seed"}, {}};
  for (const auto& r : rows) {
    t.add_row({Cell{r.name}, cell(r.n), cell(r.point_estimate), cell(r.ci_low), cell(r.ci_high), cell(r.trials),
               Cell{r.seed.master}});
  }
  return t;
}

inline Table scaling_table(const std::vector<ScalingRow>& rows) {
  Table t{{"n", "ell", "r", "trials", "seed", "p_tilde", "p_tilde_ci_low", "p_tilde_ci_high", "normalized",
           "normalized_ci_low", "normalized_ci_high", "p_prime", "p_prime_ci_low", "p_prime_ci_high"},
          {}};
  for (const auto& r : rows) {
    t.add_row({cell(r.n), cell(r.ell), cell(r.r), cell(r.trials), Cell{r.seed.master}, cell(r.p_tilde.point),
               cell(r.p_tilde.low), cell(r.p_tilde.high), cell(r.normalized.point), cell(r.normalized.low),
               cell(r.normalized.high), cell(r.p_prime.point), cell(r.p_prime.low), cell(r.p_prime.high)});
  }
  return t;
}

inline Table hitting_table(const std::vector<HittingRow>& rows) {
  Table t{{"n", "trials", "seed", "p_equal", "p_equal_ci_low", "p_equal_ci_high", "p_z_positive",
           "p_z_positive_ci_low", "p_z_positive_ci_high", "mean_z", "order_violations"},
          {}};
  for (const auto& r : rows) {
    const auto pz = [&](double Interval::*f) -> Cell { return r.p_z ? cell((*r.p_z).*f) : Cell{}; };
    t.add_row({cell(r.n), cell(r.trials), Cell{r.seed.master}, cell(r.p_equal.point), cell(r.p_equal.low),
               cell(r.p_equal.high), pz(&Interval::point), pz(&Interval::low), pz(&Interval::high),
               cell(r.mean_z), cell(r.order_violations)});
  }
  return t;
}

/// Two-column table of named scalars.
inline Table scalar_table(const std::vector<std::pair<std::string, double>>& values) {
  Table t{{"quantity", "value"}, {}};
  for (const auto& [k, v] : values) t.add_row({Cell{k}, cell(v)});
  return t;
}

}  // namespace rgglab
