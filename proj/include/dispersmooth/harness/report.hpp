#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "dispersmooth/types.hpp"
#include "json.hpp"

namespace dispersmooth::harness {

enum class Verdict { Pass, Fail, Info };

inline std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "fail";
    case Verdict::Info: return "info";
  }
  return "info";
}

struct ReportRow {
  std::string scenario_id;
  std::string quantity;
  double value = 0.0;
  std::optional<double> reference;
  double tolerance = 0.0;
  double rel_error = std::numeric_limits<double>::quiet_NaN();
  Verdict verdict = Verdict::Info;
  std::string grid;
  double wall_ms = 0.0;
};

/// pass iff |value - reference| <= tol * max(1, |reference|).
inline ReportRow check_row(std::string id, std::string quantity, double value, double reference, double tol,
                           std::string grid = "") {
  ReportRow r;
  r.scenario_id = std::move(id);
  r.quantity = std::move(quantity);
  r.value = value;
  r.reference = reference;
  r.tolerance = tol;
  r.rel_error = reference != 0.0 ? std::abs(value - reference) / std::abs(reference) : std::abs(value);
  r.verdict = std::isfinite(value) && std::abs(value - reference) <= tol * std::max(1.0, std::abs(reference))
                  ? Verdict::Pass
                  : Verdict::Fail;
  r.grid = std::move(grid);
  return r;
}

/// Relative tolerance expressed through check_row's absolute-or-relative rule.
inline ReportRow rel_row(std::string id, std::string quantity, double value, double reference, double rel_tol,
                         std::string grid = "") {
  const double tol = rel_tol * std::abs(reference) / std::max(1.0, std::abs(reference));
  return check_row(std::move(id), std::move(quantity), value, reference, tol, std::move(grid));
}

/// One-sided bound: value <= bound, or value >= bound when upper is false.
inline ReportRow bound_row(std::string id, std::string quantity, double value, double bound, bool upper,
                           std::string grid = "") {
  ReportRow r;
  r.scenario_id = std::move(id);
  r.quantity = std::move(quantity);
  r.value = value;
  r.reference = bound;
  r.rel_error = bound != 0.0 ? (value - bound) / std::abs(bound) : value;
  const bool ok = std::isfinite(value) && (upper ? value <= bound : value >= bound);
  r.verdict = ok ? Verdict::Pass : Verdict::Fail;
  r.grid = std::move(grid);
  return r;
}

inline ReportRow info_row(std::string id, std::string quantity, double value, std::string grid = "") {
  ReportRow r;
  r.scenario_id = std::move(id);
  r.quantity = std::move(quantity);
  r.value = value;
  r.grid = std::move(grid);
  return r;
}

inline ReportRow failure_row(std::string id, std::string what) {
  ReportRow r;
  r.scenario_id = std::move(id);
  r.quantity = "error: " + std::move(what);
  r.value = std::numeric_limits<double>::quiet_NaN();
  r.verdict = Verdict::Fail;
  return r;
}

struct Report {
  std::vector<ReportRow> rows;

  void append(const std::vector<ReportRow>& more) { rows.insert(rows.end(), more.begin(), more.end()); }

  std::size_t failures() const {
    return static_cast<std::size_t>(
        std::count_if(rows.begin(), rows.end(), [](const ReportRow& r) { return r.verdict == Verdict::Fail; }));
  }
};

namespace detail {

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

inline std::string millis(double ms) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(3) << ms;
  return os.str();
}

}  // namespace detail

inline void write_csv(std::ostream& os, const Report& rep, bool with_wall = true) {
  os << "scenario_id,quantity,value,reference,rel_error,verdict,grid,wall_ms\n";
  for (const auto& r : rep.rows) {
    os << detail::csv_field(r.scenario_id) << ',' << detail::csv_field(r.quantity) << ',' << detail::num(r.value)
       << ',' << (r.reference ? detail::num(*r.reference) : "") << ',' << detail::num(r.rel_error) << ','
       << to_string(r.verdict) << ',' << detail::csv_field(r.grid) << ','
       << (with_wall ? detail::millis(r.wall_ms) : "") << '\n';
  }
}

inline nlohmann::json to_json(const Report& rep) {
  auto rows = nlohmann::json::array();
  for (const auto& r : rep.rows) {
    nlohmann::json j;
    j["scenario_id"] = r.scenario_id;
    j["quantity"] = r.quantity;
    j["value"] = std::isfinite(r.value) ? nlohmann::json(r.value) : nlohmann::json(detail::num(r.value));
    j["reference"] = r.reference ? nlohmann::json(*r.reference) : nlohmann::json(nullptr);
    j["tolerance"] = r.tolerance;
    j["rel_error"] = std::isfinite(r.rel_error) ? nlohmann::json(r.rel_error) : nlohmann::json(nullptr);
    j["verdict"] = to_string(r.verdict);
    j["grid"] = r.grid;
    j["wall_ms"] = r.wall_ms;
    rows.push_back(j);
  }
  return {{"rows", rows}, {"failures", rep.failures()}};
}

inline void write_files(const Report& rep, const std::string& dir) {
  std::ofstream csv(dir + "/report.csv");
  write_csv(csv, rep);
  std::ofstream js(dir + "/report.json");
  js << to_json(rep).dump(2) << '\n';
  if (!csv || !js) throw Error(ErrorKind::InvalidArgument, "cannot write reports to " + dir);
}

}  // namespace dispersmooth::harness
