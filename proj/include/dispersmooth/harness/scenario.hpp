#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iterator>
#include <memory>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "dispersmooth/comparison.hpp"
#include "dispersmooth/engine.hpp"
#include "dispersmooth/inhomog.hpp"
#include "dispersmooth/norms.hpp"
#include "dispersmooth/rng.hpp"
#include "dispersmooth/symbols.hpp"
#include "json.hpp"

namespace dispersmooth::harness {

using nlohmann::json;

/// Read-only view of a JSON value that names its key path in every error.
class JsonView {
 public:
  JsonView(const json& j, std::string path) : j_(&j), path_(std::move(path)) {}

  const json& raw() const { return *j_; }
  const std::string& path() const { return path_; }

  [[noreturn]] void fail(const std::string& what) const { throw Error(ErrorKind::Parse, path_ + ": " + what); }

  bool has(const std::string& key) const { return j_->is_object() && j_->contains(key); }

  JsonView at(const std::string& key) const {
    if (!j_->is_object()) fail("expected an object");
    const auto it = j_->find(key);
    if (it == j_->end()) fail("missing key '" + key + "'");
    return {*it, path_ + "." + key};
  }

  JsonView at(std::size_t i) const {
    if (!j_->is_array()) fail("expected an array");
    if (i >= j_->size()) fail("index " + std::to_string(i) + " out of range");
    return {(*j_)[i], path_ + "[" + std::to_string(i) + "]"};
  }

  std::size_t size() const {
    if (!j_->is_array()) fail("expected an array");
    return j_->size();
  }

  double number() const {
    if (!j_->is_number()) fail("expected a number");
    return j_->get<double>();
  }

  long integer() const {
    if (!j_->is_number_integer()) fail("expected an integer");
    return j_->get<long>();
  }

  bool boolean() const {
    if (!j_->is_boolean()) fail("expected true or false");
    return j_->get<bool>();
  }

  std::string string() const {
    if (!j_->is_string()) fail("expected a string");
    return j_->get<std::string>();
  }

  std::vector<double> numbers() const {
    if (j_->is_number()) return {number()};
    std::vector<double> out;
    for (std::size_t i = 0; i < size(); ++i) out.push_back(at(i).number());
    return out;
  }

  Vec3 vec3() const {
    const auto v = numbers();
    if (v.size() > static_cast<std::size_t>(kMaxDim)) fail("more than 3 components");
    Vec3 out{0.0, 0.0, 0.0};
    std::copy(v.begin(), v.end(), out.begin());
    return out;
  }

  double number(const std::string& key, double fallback) const { return has(key) ? at(key).number() : fallback; }
  long integer(const std::string& key, long fallback) const { return has(key) ? at(key).integer() : fallback; }
  bool boolean(const std::string& key, bool fallback) const { return has(key) ? at(key).boolean() : fallback; }
  std::string string(const std::string& key, const std::string& fallback) const {
    return has(key) ? at(key).string() : fallback;
  }

  double positive(const std::string& key) const {
    const double v = at(key).number();
    if (!(v > 0.0)) at(key).fail("must be positive");
    return v;
  }

 private:
  const json* j_;
  std::string path_;
};

// ---------------------------------------------------------------------------
// Configuration

struct Scenario {
  std::string id;
  std::string kind;
  json body;         // defaults merged, references resolved
  std::string path;  // e.g. scenarios[2]
};

struct Config {
  std::vector<Scenario> scenarios;
  std::uint64_t seed = kDefaultSeed;
};

inline const std::vector<std::string>& scenario_kinds() {
  static const std::vector<std::string> kinds{"evolve", "norm", "compare", "reduce", "constant", "inhom", "suite-item"};
  return kinds;
}

/// Hex with or without 0x.
inline std::uint64_t parse_seed(const std::string& text) {
  std::string s = text;
  if (s.size() > 2 && s[0] == '0' && (s[1] == 'x' || s[1] == 'X')) s = s.substr(2);
  if (s.empty() || s.size() > 16 || s.find_first_not_of("0123456789abcdefABCDEF") != std::string::npos)
    throw Error(ErrorKind::Parse, "seed must be a 64-bit hex number, got '" + text + "'");
  return std::stoull(s, nullptr, 16);
}

namespace detail {

// Named tables in "defaults" and the scenario keys that may refer to them.
inline const std::vector<std::pair<std::string, std::vector<std::string>>>& reference_tables() {
  static const std::vector<std::pair<std::string, std::vector<std::string>>> t{
      {"symbols", {"symbol", "f", "g"}},  {"smoothers", {"smoother", "sigma", "tau"}},
      {"weights", {"weight"}},            {"data", {"data"}},
      {"grids", {"grid"}},                {"forcings", {"forcing"}}};
  return t;
}

inline std::pair<std::size_t, std::size_t> line_col(const std::string& text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t col = 1;
  for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

inline void check_expectations(const JsonView& s, double default_tol) {
  if (!s.has("expect")) return;
  const auto e = s.at("expect");
  if (!e.raw().is_array()) e.fail("expected an array of expectations");
  for (std::size_t i = 0; i < e.size(); ++i) {
    const auto x = e.at(i);
    x.at("quantity").string();
    const bool has_value = x.has("value");
    const bool has_ref = x.has("ref");
    if (has_value == has_ref) x.fail("exactly one of 'value' and 'ref' is required");
    if (has_value) x.at("value").number();
    if (has_ref) x.at("ref").string();
    if (x.has("scale")) {
      if (!has_ref) x.at("scale").fail("scale applies to 'ref' expectations only");
      x.at("scale").number();
    }
    const double tol = x.number("tolerance", default_tol);
    if (!(tol > 0.0)) x.fail("tolerance must be positive when an expectation is present");
    if (x.has("source")) x.at("source").string();
  }
}

}  // namespace detail

/// Parses and validates a configuration document. `source` prefixes
/// diagnostics (usually the file name).
inline Config parse_config(const std::string& text, const std::string& source = "config") {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    const auto [line, col] = detail::line_col(text, e.byte == 0 ? 0 : e.byte - 1);
    std::string what = e.what();
    if (const auto p = what.find(": syntax error"); p != std::string::npos) what = what.substr(p + 2);
    throw Error(ErrorKind::Parse, source + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + what);
  }
  const JsonView root(doc, source);
  if (!doc.is_object()) root.fail("top level must be an object with 'scenarios'");
  for (const auto& [key, _] : doc.items())
    if (key != "scenarios" && key != "defaults" && key != "seed") root.fail("unknown key '" + key + "'");

  Config cfg;
  json defaults = json::object();
  if (root.has("defaults")) {
    defaults = doc["defaults"];
    if (!defaults.is_object()) root.at("defaults").fail("expected an object");
  }
  const JsonView dv(defaults, source + ".defaults");
  if (dv.has("seed")) cfg.seed = parse_seed(dv.at("seed").string());
  if (root.has("seed")) cfg.seed = parse_seed(root.at("seed").string());
  const double default_tol = dv.number("tolerance", 1e-3);

  const auto list = root.at("scenarios");
  if (!list.raw().is_array()) list.fail("expected an array");
  std::set<std::string> ids;
  for (std::size_t i = 0; i < list.size(); ++i) {
    const auto s = list.at(i);
    if (!s.raw().is_object()) s.fail("expected an object");
    Scenario sc;
    sc.path = s.path();
    sc.id = s.at("id").string();
    if (sc.id.empty()) s.at("id").fail("empty id");
    if (!ids.insert(sc.id).second) s.at("id").fail("duplicate id '" + sc.id + "'");
    sc.kind = s.at("kind").string();
    const auto& kinds = scenario_kinds();
    if (std::find(kinds.begin(), kinds.end(), sc.kind) == kinds.end())
      s.at("kind").fail("unknown kind '" + sc.kind + "'");
    sc.body = s.raw();
    // Scalar and object defaults fill keys the scenario leaves out.
    for (const auto& [key, value] : defaults.items()) {
      bool table = key == "seed";
      for (const auto& [name, _] : detail::reference_tables()) table = table || key == name;
      if (!table && !sc.body.contains(key)) sc.body[key] = value;
    }
    for (const auto& [table, keys] : detail::reference_tables()) {
      for (const auto& key : keys) {
        if (!sc.body.contains(key) || !sc.body[key].is_string()) continue;
        const std::string name = sc.body[key].get<std::string>();
        if (!defaults.contains(table) || !defaults[table].contains(name))
          throw Error(ErrorKind::UnknownName,
                      sc.path + "." + key + ": unresolved reference '" + name + "' (not in defaults." + table + ")");
        sc.body[key] = defaults[table][name];
      }
    }
    detail::check_expectations(JsonView(sc.body, sc.path), default_tol);
    cfg.scenarios.push_back(std::move(sc));
  }
  return cfg;
}

inline Config load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error(ErrorKind::Parse, "cannot open config " + path);
  const std::string text((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  return parse_config(text, path);
}

// ---------------------------------------------------------------------------
// Builders

/// {"name": ..., "params": [...], "dim": n}
inline SymbolSpec build_symbol(const JsonView& v) {
  std::vector<double> params;
  if (v.has("params")) params = v.at("params").numbers();
  return catalog(v.at("name").string(), params, static_cast<int>(v.integer("dim", 0)));
}

/// Gradient kinds refer to the scenario symbol.
inline Smoother build_smoother(const JsonView& v, const SymbolPtr& a) {
  const std::string kind = v.at("kind").string();
  if (kind == "identity") return Smoother::identity();
  if (kind == "power") return Smoother::power(v.at("exponent").number());
  if (kind == "bracket") return Smoother::bracket(v.at("exponent").number());
  if (kind == "gradient_power" || kind == "gradient_bracket" || kind == "partial") {
    if (!a) v.fail("smoother '" + kind + "' needs a symbol");
    if (kind == "partial") return Smoother::partial(a, static_cast<int>(v.integer("axis", 0)));
    const double e = v.at("exponent").number();
    return kind == "gradient_power" ? Smoother::gradient_power(a, e) : Smoother::gradient_bracket(a, e);
  }
  v.at("kind").fail("unknown smoother kind '" + kind + "'");
}

inline Weight build_weight(const JsonView& v) {
  const std::string kind = v.at("kind").string();
  if (kind == "constant") return Weight::constant(v.number("value", 1.0));
  if (kind == "bracket") return Weight::bracket(v.at("exponent").number());
  if (kind == "homogeneous") return Weight::homogeneous(v.at("exponent").number());
  if (kind == "axis_bracket") return Weight::axis_bracket(static_cast<int>(v.integer("axis", 0)), v.at("exponent").number());
  v.at("kind").fail("unknown weight kind '" + kind + "'");
}

/// Draws for randomized data come from (seed, stream), where the stream is a
/// hash of the scenario id.
inline std::uint64_t stream_of(const std::string& id) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : id) h = (h ^ c) * 0x100000001b3ULL;
  return h;
}

inline FreqData build_data(const JsonView& v, int dim, const CounterRng& rng) {
  const std::string kind = v.at("kind").string();
  dim = static_cast<int>(v.integer("dim", dim));
  FreqData phi;
  if (kind == "gaussian" || kind == "random_gaussian") {
    double width = 0.0;
    Vec3 center{0.0, 0.0, 0.0};
    Vec3 momentum{0.0, 0.0, 0.0};
    if (kind == "gaussian") {
      width = v.positive("width");
      if (v.has("center")) center = v.at("center").vec3();
      if (v.has("momentum")) momentum = v.at("momentum").vec3();
    } else {
      const auto wr = v.at("width").numbers();
      if (wr.size() != 2 || !(wr[0] > 0.0) || wr[1] < wr[0]) v.at("width").fail("expected [lo, hi] with 0 < lo <= hi");
      RngStream rs(rng);
      width = rs.uniform(wr[0], wr[1]);
      const double spread = v.number("momentum_spread", 0.0);
      for (int j = 0; j < dim; ++j) momentum[j] = rs.uniform(-spread, spread);
    }
    phi = FreqData::gaussian(dim, width, center, momentum, v.number("amplitude", 1.0));
    if (v.has("cut")) {
      const double cut = v.positive("cut");
      for (int j = 0; j < dim; ++j) {
        phi.support_lo[j] = momentum[j] - cut / width;
        phi.support_hi[j] = momentum[j] + cut / width;
      }
      phi.spatial_radius = norm(center, dim) + cut * width;
    }
  } else if (kind == "half_line_bump") {
    phi = half_line_bump(dim, v.at("center").number(), v.positive("width"), v.at("edge").number(), v.positive("ramp"),
                         v.number("spatial_center", 0.0));
  } else {
    v.at("kind").fail("unknown data kind '" + kind + "'");
  }
  return phi;
}

inline ForcingSpec build_forcing(const JsonView& v, int dim, const CounterRng& rng) {
  const std::string kind = v.at("kind").string();
  dim = static_cast<int>(v.integer("dim", dim));
  const double width = v.positive("width");
  const double T = v.positive("T");
  if (kind == "modulated_gaussian") return modulated_gaussian(dim, width, T, v.number("omega", 3.0));
  if (kind == "traveling_bump") {
    const Vec3 x0 = v.has("x0") ? v.at("x0").vec3() : Vec3{0.0, 0.0, 0.0};
    const Vec3 vel = v.has("velocity") ? v.at("velocity").vec3() : Vec3{0.0, 0.0, 0.0};
    const Vec3 k0 = v.has("momentum") ? v.at("momentum").vec3() : Vec3{0.0, 0.0, 0.0};
    return traveling_bump(dim, width, T, x0, vel, k0);
  }
  if (kind == "localized_noise")
    return localized_noise(dim, width, T, v.positive("spread"), static_cast<int>(v.integer("count", 8)), rng.bits(0));
  v.at("kind").fail("unknown forcing kind '" + kind + "'");
}

/// Explicit {"L", "N", "t0", "t1", "nt"} or automatic {"T", "dt"}: the
/// smallest box and power-of-two count meeting the resolution rule with a 5%
/// margin, over t in [-T, T] (or [0, T] with "from_zero").
inline GridSpec build_grid(const JsonView& v, const SymbolSpec& a, const FreqData& phi) {
  if (v.has("L")) {
    const auto N = v.at("N").integer();
    const auto nt = v.at("nt").integer();
    if (N < 2 || (N & (N - 1)) != 0) v.at("N").fail("must be a power of two");
    if (nt < 1) v.at("nt").fail("must be positive");
    auto g = GridSpec::make(phi.dim, v.positive("L"), static_cast<std::size_t>(N), v.at("t0").number(),
                            v.at("t1").number(), static_cast<std::size_t>(nt));
    g.half_cell_offset = v.boolean("half_cell_offset", false);
    return g;
  }
  const double T = v.positive("T");
  const double dt = v.positive("dt");
  const double speed = max_grad_over_box(a, phi.dim, phi.support_lo, phi.support_hi);
  const double L = 1.05 * 1.25 * (T * speed + phi.spatial_radius);
  double ext = 0.0;
  for (int j = 0; j < phi.dim; ++j) ext = std::max(ext, phi.support_extent(j));
  std::size_t N = 16;
  while (static_cast<double>(N) < 1.05 * 2.0 * ext * 2.0 * L / kPi) N *= 2;
  const double t0 = v.boolean("from_zero", false) ? 0.0 : -T;
  const auto nt = static_cast<std::size_t>(std::ceil((T - t0) / dt)) + 1;
  return GridSpec::make(phi.dim, L, N, t0, T, nt);
}

inline TimeWindowPolicy build_window(const JsonView& s) {
  TimeWindowPolicy p;
  if (!s.has("window")) return p;
  const auto v = s.at("window");
  const std::string mode = v.string("mode", "aitken");
  if (mode == "aitken") p.mode = TimeWindowPolicy::Mode::Aitken;
  else if (mode == "plain") p.mode = TimeWindowPolicy::Mode::Plain;
  else if (mode == "power_tail") p.mode = TimeWindowPolicy::Mode::PowerTail;
  else v.at("mode").fail("unknown window mode '" + mode + "'");
  p.tail_exponent = v.number("tail_exponent", 0.0);
  p.window_tol = v.number("tolerance", p.window_tol);
  p.throw_on_inadequate = v.boolean("strict", true);
  return p;
}

inline Geometry build_geometry(const JsonView& s) {
  if (!s.has("geometry")) return Geometry::space_time();
  const auto v = s.at("geometry");
  if (v.has("axis")) return Geometry::fixed(static_cast<int>(v.at("axis").integer()), v.at("coordinate").number());
  return Geometry::space_time(v.number("radius", std::numeric_limits<double>::infinity()));
}

}  // namespace dispersmooth::harness
