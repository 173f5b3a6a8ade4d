#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dispersmooth/canonical.hpp"
#include "dispersmooth/constants.hpp"
#include "dispersmooth/harness/report.hpp"
#include "dispersmooth/harness/scenario.hpp"
#include "dispersmooth/harness/suite.hpp"
#include "dispersmooth/parallel.hpp"

namespace dispersmooth::harness {

struct RunOptions {
  std::string out_dir;                 // empty: no files, no field dumps
  unsigned workers = 0;                // 0: DISPERSMOOTH_WORKERS or hardware
  std::optional<std::uint64_t> seed;   // overrides the config seed
  bool flip_prefactor = false;         // deliberate fault in the frequency routes
};

struct RunResult {
  Report report;
  int exit_code = 0;
};

namespace detail {

struct Context {
  const Scenario& sc;
  JsonView body;
  CounterRng rng;
  const RunOptions& opt;
  std::uint64_t seed;
};

/// Named scalar outputs of one scenario, in emission order.
struct Outcome {
  std::vector<std::pair<std::string, double>> quantities;
  std::vector<ReportRow> rows;  // pre-built rows (suite items)
  std::string grid;

  void add(std::string name, double v) { quantities.emplace_back(std::move(name), v); }
};

inline std::string point_label(const Vec3& x, int dim) {
  if (dim == 1) return "x=" + fmt(x[0]);
  std::string s = "x=(";
  for (int j = 0; j < dim; ++j) s += (j ? "," : "") + fmt(x[j]);
  return s + ")";
}

inline std::vector<Vec3> points_of(const JsonView& s) {
  std::vector<Vec3> pts;
  if (!s.has("points")) return pts;
  const auto p = s.at("points");
  for (std::size_t i = 0; i < p.size(); ++i) pts.push_back(p.at(i).vec3());
  return pts;
}

inline Outcome run_evolve(const Context& c) {
  Outcome o;
  const auto a = std::make_shared<const SymbolSpec>(build_symbol(c.body.at("symbol")));
  const auto phi = build_data(c.body.at("data"), a->dim, c.rng);
  const auto grid = build_grid(c.body.at("grid"), *a, phi);
  std::optional<Smoother> sigma;
  if (c.body.has("smoother")) sigma = build_smoother(c.body.at("smoother"), a);
  const auto field = evolve(*a, phi, grid, sigma);
  o.grid = grid.id();
  const double norm0 = phi.l2_norm();
  double drift = 0.0;
  for (std::size_t k = 0; k < grid.nt; ++k) drift = std::max(drift, rel_diff(field.slice_l2(k), norm0));
  o.add("data_norm", norm0);
  o.add("l2_first", field.slice_l2(0));
  o.add("l2_last", field.slice_l2(grid.nt - 1));
  o.add("max_l2_drift", drift);
  if (c.body.boolean("dump", false) && !c.opt.out_dir.empty()) {
    const std::filesystem::path dir = std::filesystem::path(c.opt.out_dir) / "fields";
    std::filesystem::create_directories(dir);
    write_binary(field, (dir / (c.sc.id + ".bin")).string());
    std::ofstream os(dir / (c.sc.id + "_last.csv"));
    write_csv_slice(field, grid.nt - 1, os);
    if (!os) throw Error(ErrorKind::InvalidArgument, "cannot write field dump for " + c.sc.id);
  }
  return o;
}

inline Outcome run_norm(const Context& c) {
  Outcome o;
  const auto a = std::make_shared<const SymbolSpec>(build_symbol(c.body.at("symbol")));
  const auto phi = build_data(c.body.at("data"), a->dim, c.rng);
  const Smoother sigma = c.body.has("smoother") ? build_smoother(c.body.at("smoother"), a) : Smoother::identity();
  const auto pts = points_of(c.body);
  const int n = phi.dim;
  std::vector<std::string> routes{"time"};
  if (c.body.has("routes")) {
    routes.clear();
    const auto r = c.body.at("routes");
    for (std::size_t i = 0; i < r.size(); ++i) routes.push_back(r.at(i).string());
  }
  o.add("data_norm", phi.l2_norm());
  for (const auto& route : routes) {
    if (route == "time") {
      const auto grid = build_grid(c.body.at("grid"), *a, phi);
      o.grid = grid.id();
      const auto prop = make_propagator(*a, phi, grid, sigma.is_identity() ? nullptr : &sigma);
      const auto pol = build_window(c.body);
      if (!pts.empty()) {
        const auto res = time_side_norm_points(prop, pts, pol);
        for (std::size_t i = 0; i < pts.size(); ++i) {
          o.add("time " + point_label(pts[i], n), res[i].value);
          o.add("time_increment " + point_label(pts[i], n), res[i].increment);
        }
      } else {
        const Weight w = c.body.has("weight") ? build_weight(c.body.at("weight")) : Weight::constant();
        const auto r = time_side_norm(prop, w, build_geometry(c.body), pol);
        o.add("time", r.value);
        o.add("time_increment", r.increment);
      }
    } else if (route == "freq_axis") {
      const int axis = static_cast<int>(c.body.integer("axis", 0));
      double v = freq_side_norm(*a, sigma, phi, axis).value;
      if (c.opt.flip_prefactor) v *= std::pow(kTwoPi, n);
      o.add("freq_axis", v);
    } else if (route == "freq_radial") {
      if (pts.empty()) c.body.fail("route freq_radial needs 'points'");
      for (const auto& x : pts) {
        double v = freq_side_norm_radial(RadialSymbol::of(*a), sigma, Cutoff::all(), phi, x);
        if (c.opt.flip_prefactor) v *= std::pow(kTwoPi, 2 * n - 1);
        o.add("freq_radial " + point_label(x, n), v);
      }
    } else {
      c.body.at("routes").fail("unknown route '" + route + "'");
    }
  }
  return o;
}

inline FrequencyBox build_box(const JsonView& v, bool radial, int dim) {
  if (radial || v.has("lo")) {
    const auto count = v.at("count").integer();
    if (count < 2) v.at("count").fail("needs at least 2 nodes");
    return FrequencyBox::interval(v.at("lo").number(), v.at("hi").number(), static_cast<std::size_t>(count));
  }
  const auto per = v.at("per_axis").integer();
  if (per < 2) v.at("per_axis").fail("needs at least 2 nodes");
  return FrequencyBox::cube(dim, v.positive("half_width"), static_cast<std::size_t>(per));
}

inline Outcome run_compare(const Context& c) {
  Outcome o;
  const auto f = std::make_shared<const SymbolSpec>(build_symbol(c.body.at("f")));
  const auto g = std::make_shared<const SymbolSpec>(build_symbol(c.body.at("g")));
  const Smoother sigma = c.body.has("sigma") ? build_smoother(c.body.at("sigma"), f) : Smoother::identity();
  const Smoother tau = c.body.has("tau") ? build_smoother(c.body.at("tau"), g) : Smoother::identity();
  const std::string mode = c.body.string("mode", "axis");
  if (mode != "axis" && mode != "radial") c.body.at("mode").fail("expected axis or radial");
  const bool radial = mode == "radial";
  auto cc = radial ? ComparisonCase::radial(*f, sigma, *g, tau)
                   : ComparisonCase::along_axis(*f, sigma, *g, tau, static_cast<int>(c.body.integer("axis", 0)));
  if (c.body.has("point")) cc.point = c.body.at("point").vec3();
  auto cert = best_ratio(cc, build_box(c.body.at("box"), radial, f->dim));
  o.add("A", cert.A);
  o.add("A_refined", cert.A_refined);
  o.add("constant", cert.constant ? 1.0 : 0.0);
  o.add("spread", cert.spread);
  o.add("exclusions", static_cast<double>(cert.exclusions));
  if (c.body.has("validate")) {
    const auto list = c.body.at("validate");
    std::vector<FreqData> data;
    for (std::size_t i = 0; i < list.size(); ++i) {
      data.push_back(build_data(list.at(i), f->dim, CounterRng(c.seed, stream_of(c.sc.id) + i)));
      data.back().label = "validate[" + std::to_string(i) + "]";
    }
    const double tol = c.body.number("validation_tolerance", 1e-9);
    const auto rows = validate(cert, cc, data, tol, tol);
    double worst = 0.0;
    for (const auto& r : rows) worst = std::max(worst, std::abs(r.slack) / std::max(1.0, std::abs(r.lhs)));
    o.add("max_rel_slack", worst);
  }
  return o;
}

inline ReductionPlan reduction_for(const SymbolSpec& a, const std::string& form, double cone) {
  if (form == "elliptic") return elliptic_reduction(a, cone);
  if (form == "elliptic_radial") return elliptic_radial_reduction(a, cone);
  if (form == "nonelliptic") return nonelliptic_reduction(a, cone);
  if (form == "hyperbolic") return nonelliptic_hyperbolic_reduction(a, cone);
  if (form == "auto") return a.flags.elliptic ? elliptic_reduction(a, cone) : nonelliptic_reduction(a, cone);
  throw Error(ErrorKind::UnknownName,
              "unknown reduction form '" + form + "' (elliptic, elliptic_radial, nonelliptic, hyperbolic, auto)");
}

inline Outcome run_reduce(const Context& c) {
  Outcome o;
  const auto a = build_symbol(c.body.at("symbol"));
  const auto plan = reduction_for(a, c.body.string("form", "auto"), c.body.positive("cone"));
  o.add("q_sup", plan.q_sup);
  o.add("composition_residual", plan.composition_residual);
  o.add("inverse_residual", plan.bounds.inverse_residual);
  o.add("jacobian_min", plan.bounds.jac_min);
  o.add("jacobian_max", plan.bounds.jac_max);
  o.add("C", plan.bounds.C);
  if (c.body.has("egorov")) {
    const auto e = c.body.at("egorov");
    const auto phi = build_data(e.at("data"), a.dim, c.rng);
    const auto grid = build_grid(e.at("grid"), plan.target, phi);
    const auto rep = egorov_check(plan, phi, grid, e.at("times").numbers());
    o.grid = rep.grid_id;
    for (std::size_t i = 0; i < rep.times.size(); ++i) o.add("egorov_residual t=" + fmt(rep.times[i]), rep.residuals[i]);
  }
  return o;
}

inline Outcome run_constant(const Context& c) {
  Outcome o;
  const std::string name = c.body.at("name").string();
  const double m = c.body.positive("m");
  const auto n = static_cast<int>(c.body.at("n").integer());
  std::vector<double> rho{1.0};
  if (c.body.has("rho")) rho = c.body.at("rho").numbers();
  if (name == "simon") {
    o.add("closed_form", simon_constant(m, n));
    const auto r = walther_constant(Weight::homogeneous(-1.0), Smoother::power(0.5 * (m - 2.0)),
                                    catalog("power", {m}, 3), n, rho);
    o.add("bessel_route", r.constant);
  } else if (name == "walther") {
    const Weight w = c.body.has("weight") ? build_weight(c.body.at("weight")) : Weight::homogeneous(-1.0);
    const Smoother s = c.body.has("smoother") ? build_smoother(c.body.at("smoother"), nullptr)
                                              : Smoother::power(0.5 * (m - 2.0));
    const auto r = walther_constant(w, s, catalog("power", {m}, 3), n, rho);
    o.add("constant", r.constant);
    o.add("printed_constant", r.printed_constant);
    o.add("sup_bracket", r.sup_bracket);
    o.add("rho_star", r.rho_star);
    o.add("k_star", r.k_star);
  } else {
    c.body.at("name").fail("unknown constant '" + name + "' (simon, walther)");
  }
  return o;
}

inline Outcome run_inhom(const Context& c) {
  Outcome o;
  const std::string model = c.body.at("model").string();
  const int dim = model == "1d" ? 1 : 2;
  if (model != "1d" && model != "2d") c.body.at("model").fail("expected 1d or 2d");
  const auto F = build_forcing(c.body.at("forcing"), dim, c.rng);
  const auto gv = c.body.at("grid");
  const auto grid = GridSpec::make(dim, gv.positive("L"), static_cast<std::size_t>(gv.at("N").integer()),
                                   gv.number("t0", 0.0), gv.at("t1").number(), static_cast<std::size_t>(gv.at("nt").integer()));
  std::vector<double> coords{0.0};
  if (c.body.has("points")) coords = c.body.at("points").numbers();
  DuhamelOptions dopt;
  dopt.richardson_tol = c.body.number("richardson_tolerance", 1e-3);
  auto solve = [&](const GridSpec& g) {
    if (dim == 1) return inhom_model_1d(build_symbol(c.body.at("symbol")), F, g, coords, dopt);
    return inhom_model_2d(c.body.positive("m"), F, g, coords, c.body.boolean("positive_only", false), dopt);
  };
  const auto r = solve(grid);
  o.grid = r.grid_id;
  o.add("sup_ratio", r.sup_ratio);
  o.add("rhs", r.rhs);
  o.add("richardson", r.richardson);
  o.add("rhs_edge_fraction", r.rhs_edge_fraction);
  if (c.body.boolean("refine", false)) {
    const auto f = solve(refined(grid));
    o.grid = f.grid_id;
    o.add("sup_ratio_refined", f.sup_ratio);
    o.add("refinement_drift", rel_diff(r.sup_ratio, f.sup_ratio));
  }
  return o;
}

inline Outcome run_suite_item(const Context& c) {
  Outcome o;
  const std::string item = c.body.at("item").string();
  const auto items = suite_items("full");
  const auto it = std::find_if(items.begin(), items.end(), [&](const Criterion& k) { return k.id == item; });
  if (it == items.end()) c.body.at("item").fail("unknown suite item '" + item + "'");
  SuiteOptions so;
  so.seed = c.seed;
  so.flip_prefactor = c.opt.flip_prefactor;
  o.rows = run_criterion(*it, so).rows;
  for (auto& r : o.rows) {
    r.quantity = r.scenario_id == c.sc.id ? r.quantity : r.scenario_id + ": " + r.quantity;
    r.scenario_id = c.sc.id;
  }
  return o;
}

inline Outcome dispatch(const Context& c) {
  const auto& k = c.sc.kind;
  if (k == "evolve") return run_evolve(c);
  if (k == "norm") return run_norm(c);
  if (k == "compare") return run_compare(c);
  if (k == "reduce") return run_reduce(c);
  if (k == "constant") return run_constant(c);
  if (k == "inhom") return run_inhom(c);
  if (k == "suite-item") return run_suite_item(c);
  throw Error(ErrorKind::UnknownName, "unknown scenario kind '" + k + "'");
}

/// Quantities named by an expectation become checked rows, the rest info rows.
inline std::vector<ReportRow> emit(const Scenario& sc, const Outcome& o, double default_tol) {
  std::vector<ReportRow> rows = o.rows;
  const JsonView body(sc.body, sc.path);
  std::map<std::string, const json*> expect;
  if (body.has("expect"))
    for (const auto& e : sc.body["expect"]) expect[e["quantity"].get<std::string>()] = &e;
  auto find = [&](const std::string& q) -> std::optional<double> {
    for (const auto& [name, v] : o.quantities)
      if (name == q) return v;
    return std::nullopt;
  };
  for (const auto& [name, v] : o.quantities) {
    const auto it = expect.find(name);
    if (it == expect.end()) {
      rows.push_back(info_row(sc.id, name, v, o.grid));
      continue;
    }
    const json& e = *it->second;
    const double tol = e.value("tolerance", default_tol);
    std::optional<double> ref;
    if (e.contains("value")) ref = e["value"].get<double>();
    else if ((ref = find(e["ref"].get<std::string>()))) *ref *= e.value("scale", 1.0);
    if (!ref) {
      rows.push_back(failure_row(sc.id, "reference quantity '" + e["ref"].get<std::string>() + "' not produced"));
      continue;
    }
    rows.push_back(check_row(sc.id, name, v, *ref, tol, o.grid));
  }
  for (const auto& [q, _] : expect)
    if (!find(q)) rows.push_back(failure_row(sc.id, "expected quantity '" + q + "' not produced"));
  return rows;
}

}  // namespace detail

/// Runs one scenario; every exception becomes a failing row.
inline std::vector<ReportRow> run_scenario(const Scenario& sc, std::uint64_t seed, const RunOptions& opt) {
  const auto t0 = detail::Clock::now();
  std::vector<ReportRow> rows;
  try {
    const detail::Context ctx{sc, JsonView(sc.body, sc.path), CounterRng(seed, stream_of(sc.id)), opt, seed};
    const double tol = sc.body.value("tolerance", 1e-3);
    rows = detail::emit(sc, detail::dispatch(ctx), tol);
  } catch (const std::exception& e) {
    rows.push_back(failure_row(sc.id, e.what()));
  }
  const double ms = 1e3 * detail::seconds_since(t0);
  for (auto& r : rows) r.wall_ms = ms;
  return rows;
}

/// Scenarios run in parallel; rows are assembled in config order, so the
/// report does not depend on the worker count.
inline RunResult run_config(const Config& cfg, const RunOptions& opt) {
  if (opt.workers != 0) set_workers(opt.workers);
  const std::uint64_t seed = opt.seed.value_or(cfg.seed);
  std::vector<std::vector<ReportRow>> per(cfg.scenarios.size());
  parallel_for(cfg.scenarios.size(), [&](std::size_t i) { per[i] = run_scenario(cfg.scenarios[i], seed, opt); });
  RunResult res;
  for (const auto& rows : per) res.report.append(rows);
  if (!opt.out_dir.empty()) {
    std::filesystem::create_directories(opt.out_dir);
    write_files(res.report, opt.out_dir);
  }
  res.exit_code = res.report.failures() == 0 ? 0 : 1;
  return res;
}

inline RunResult run(const std::string& config_path, const RunOptions& opt) {
  return run_config(load_config(config_path), opt);
}

}  // namespace dispersmooth::harness
