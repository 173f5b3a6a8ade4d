// dispersmooth command line: scenario runs, suites, constants, comparison
// certificates and normal-form reductions.
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dispersmooth/harness/run.hpp"

using namespace dispersmooth;
using namespace dispersmooth::harness;

namespace {

void print_rows(const std::vector<ReportRow>& rows) {
  Report rep;
  rep.append(rows);
  write_csv(std::cout, rep, false);
}

std::string read_case(const std::string& arg) {
  if (!arg.empty() && arg.front() == '{') return arg;
  std::ifstream is(arg);
  if (!is) throw Error(ErrorKind::Parse, "cannot open case file " + arg);
  return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical checks of smoothing estimates for dispersive equations"};
  app.require_subcommand(1);
  unsigned workers = 0;
  std::string seed_hex;
  bool fault = false;

  auto* run_cmd = app.add_subcommand("run", "run a scenario config and write report.csv / report.json");
  std::string config;
  std::string out = "dispersmooth_out";
  run_cmd->add_option("config", config, "config JSON")->required()->check(CLI::ExistingFile);
  run_cmd->add_option("--out", out, "output directory");
  run_cmd->add_option("--workers", workers, "scenario workers (default: DISPERSMOOTH_WORKERS, then all cores)");
  run_cmd->add_option("--seed", seed_hex, "64-bit hex seed overriding the config");
  run_cmd->add_flag("--inject-fault", fault, "flip the frequency-side prefactor (mutation check)");

  auto* suite_cmd = app.add_subcommand("suite", "run the core or full suite");
  std::string suite_name;
  std::string suite_out = "dispersmooth_out";
  std::vector<std::string> only;
  suite_cmd->add_option("name", suite_name, "core or full")->required()->check(CLI::IsMember({"core", "full"}));
  suite_cmd->add_option("--out", suite_out, "output directory");
  suite_cmd->add_option("--only", only, "criterion ids or indices");
  suite_cmd->add_option("--workers", workers, "worker threads");
  suite_cmd->add_option("--seed", seed_hex, "64-bit hex seed");
  suite_cmd->add_flag("--inject-fault", fault, "flip the frequency-side prefactor (mutation check)");

  auto* const_cmd = app.add_subcommand("constants", "best constants");
  std::string const_name;
  double m = 2.0;
  int n = 3;
  const_cmd->add_option("name", const_name, "simon or walther")->required()->check(CLI::IsMember({"simon", "walther"}));
  const_cmd->add_option("--m", m, "order of |xi|^m")->required();
  const_cmd->add_option("--n", n, "dimension")->required();

  auto* cmp_cmd = app.add_subcommand("compare", "comparison certificate for one case");
  std::string case_arg;
  cmp_cmd->add_option("--case", case_arg, "compare scenario as inline JSON or a file")->required();

  auto* red_cmd = app.add_subcommand("reduce", "normal-form reduction on a cone");
  std::string symbol;
  std::vector<double> params;
  int dim = 0;
  double cone = 0.5;
  std::string form = "auto";
  red_cmd->add_option("--symbol", symbol, "catalog name")->required();
  red_cmd->add_option("--params", params, "catalog parameters");
  red_cmd->add_option("--dim", dim, "dimension (0: natural)");
  red_cmd->add_option("--cone", cone, "cone half-angle in radians")->required();
  red_cmd->add_option("--form", form, "elliptic, elliptic_radial, nonelliptic, hyperbolic or auto");

  CLI11_PARSE(app, argc, argv);

  try {
    std::optional<std::uint64_t> seed;
    if (!seed_hex.empty()) seed = parse_seed(seed_hex);
    if (workers != 0) set_workers(workers);

    if (*run_cmd) {
      RunOptions opt;
      opt.out_dir = out;
      opt.workers = workers;
      opt.seed = seed;
      opt.flip_prefactor = fault;
      const auto res = run(config, opt);
      std::printf("%zu rows, %zu failing; reports in %s\n", res.report.rows.size(), res.report.failures(), out.c_str());
      for (const auto& r : res.report.rows)
        if (r.verdict == harness::Verdict::Fail) std::printf("  fail %s: %s\n", r.scenario_id.c_str(), r.quantity.c_str());
      return res.exit_code;
    }
    if (*suite_cmd) {
      SuiteOptions so;
      if (seed) so.seed = *seed;
      so.flip_prefactor = fault;
      std::vector<CriterionOutcome> outcomes;
      int unexpected = 0;
      for (const auto& c : suite_items(suite_name)) {
        if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end() &&
            std::find(only.begin(), only.end(), std::to_string(c.index)) == only.end())
          continue;
        outcomes.push_back(run_criterion(c, so));
        std::cout << summary_line(outcomes.back()) << std::endl;
        if (!outcomes.back().passed && outcomes.back().known_deviation.empty()) ++unexpected;
      }
      std::filesystem::create_directories(suite_out);
      write_files(collect(outcomes), suite_out);
      std::printf("reports in %s\n", suite_out.c_str());
      return unexpected == 0 ? 0 : 1;
    }
    if (*const_cmd) {
      Scenario sc;
      sc.id = const_name + "_m" + harness::detail::fmt(m) + "_n" + std::to_string(n);
      sc.kind = "constant";
      sc.body = {{"name", const_name}, {"m", m}, {"n", n}};
      const auto rows = run_scenario(sc, kDefaultSeed, {});
      print_rows(rows);
      return Report{rows}.failures() == 0 ? 0 : 1;
    }
    if (*cmp_cmd) {
      auto body = json::parse(read_case(case_arg));
      body["kind"] = "compare";
      if (!body.contains("id")) body["id"] = "compare";
      const auto cfg = parse_config(json{{"scenarios", json::array({body})}}.dump(), "case");
      const auto rows = run_scenario(cfg.scenarios[0], cfg.seed, {});
      print_rows(rows);
      return Report{rows}.failures() == 0 ? 0 : 1;
    }
    if (*red_cmd) {
      const auto a = catalog(symbol, params, dim);
      std::cout << harness::detail::reduction_for(a, form, cone).to_json().dump(2) << '\n';
      return 0;
    }
  } catch (const json::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
