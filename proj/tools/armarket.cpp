// armarket: experiment runner for the AR market and kinetic exchange models.
//
//   armarket run --config exp.json [--seed N] [--out DIR] [--set a.b=v ...]
//   armarket compare RUN_A [RUN_B | --reference SPEC] [--ks-max X] ...
//   armarket analytic --lambda 0.4 --order 4 [--x-max 6] [--points 601] [--out f.csv]
//   armarket defaults EXPERIMENT
//
// Exit codes: 0 success, 1 config error, 2 runtime error, 3 comparison failed.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "armarket/errors.hpp"
#include "armarket/experiment.hpp"

namespace ex = armarket::experiment;

namespace {

constexpr int kConfigError = 1;
constexpr int kRuntimeError = 2;
constexpr int kComparisonFailed = 3;

ex::Json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw armarket::ConfigError("--config", "cannot read '" + path + "'");
  ex::Json j = ex::Json::parse(in, nullptr, false);
  if (j.is_discarded()) throw armarket::ConfigError("--config", "'" + path + "' is not valid JSON");
  return j;
}

void print_run(const ex::RunResult& r) {
  const auto& s = r.summary;
  std::cout << "run directory: " << r.dir.string() << '\n';
  if (s.contains("moments")) {
    std::cout << "mean " << s["moments"]["mean"] << "  std " << s["moments"]["std"]
              << "  se " << s["moments"]["std_err"] << '\n';
  }
  if (s.contains("reference_fit")) {
    std::cout << "KS vs " << s["reference_fit"]["reference"].get<std::string>() << ": "
              << s["reference_fit"]["ks"] << '\n';
  }
  if (s.contains("fit")) {
    std::cout << "tail exponent " << s["fit"]["gamma_hat"] << " +- " << s["fit"]["std_err"]
              << " (k=" << s["fit"]["k"] << ")\n";
  }
  if (s.contains("series")) {
    std::cout << "series boundary " << s["series"]["boundary_sum"] << "  normalization "
              << s["series"]["normalization_sum"] << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"AR market model and kinetic exchange simulations"};
  app.require_subcommand(1);

  // run
  auto* run_cmd = app.add_subcommand("run", "run an experiment configuration");
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::vector<std::string> sets;
  run_cmd->add_option("--config", config_path, "experiment configuration (JSON)");
  run_cmd->add_option("--seed", seed, "master seed override");
  run_cmd->add_option("--out", out_dir, "output directory override");
  run_cmd->add_option("--set", sets, "dotted-path override, e.g. sim.steps=1000");

  // compare
  auto* cmp_cmd = app.add_subcommand("compare", "compare a run against a run or a reference");
  ex::CompareRequest req;
  std::string run_a;
  std::optional<std::string> run_b;
  std::optional<std::string> tolerances;
  std::optional<std::string> report_path;
  cmp_cmd->add_option("run_a", run_a, "run directory or summary.json")->required();
  cmp_cmd->add_option("run_b", run_b, "second run directory or summary.json");
  cmp_cmd->add_option("--reference", req.reference,
                      "series:lambda=L[,order=M,mean=A] | exp:mean=A | gamma:n=N[,scale=S] | "
                      "normal:mean=M,std=S");
  cmp_cmd->add_option("--set-a", req.set_a, "sample set of run A")->capture_default_str();
  cmp_cmd->add_option("--set-b", req.set_b, "sample set of run B")->capture_default_str();
  cmp_cmd->add_option("--ks-max", req.ks_max, "KS tolerance")->capture_default_str();
  cmp_cmd->add_option("--mean-rel-max", req.mean_rel_max, "relative mean tolerance");
  cmp_cmd->add_option("--tolerances", tolerances, "JSON file with ks_max / mean_rel_max");
  cmp_cmd->add_option("--report", report_path, "write the report JSON here");

  // analytic
  auto* an_cmd = app.add_subcommand("analytic", "tabulate the exact steady-state series");
  double lambda = 0.4;
  std::size_t order = 4;
  double x_max = 6.0;
  std::size_t points = 601;
  std::optional<std::string> csv_out;
  an_cmd->add_option("--lambda", lambda, "savings")->capture_default_str();
  an_cmd->add_option("--order", order, "number of series terms")->capture_default_str();
  an_cmd->add_option("--x-max", x_max, "upper end of the grid")->capture_default_str();
  an_cmd->add_option("--points", points, "grid points")->capture_default_str();
  an_cmd->add_option("--out", csv_out, "CSV path (stdout when absent)");

  // defaults
  auto* def_cmd = app.add_subcommand("defaults", "print the default configuration (schema)");
  std::string experiment_name;
  def_cmd->add_option("experiment", experiment_name, "experiment name")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }

  try {
    if (*run_cmd) {
      ex::Json user = config_path.empty() ? ex::Json::object() : read_json(config_path);
      const ex::Json resolved = ex::resolve_config(user, {sets, seed, out_dir});
      print_run(ex::run(resolved));
      return 0;
    }
    if (*cmp_cmd) {
      req.run_a = run_a;
      if (run_b) req.run_b = *run_b;
      if (tolerances) {
        const ex::Json t = read_json(*tolerances);
        if (t.contains("ks_max")) req.ks_max = t["ks_max"].get<double>();
        if (t.contains("mean_rel_max")) req.mean_rel_max = t["mean_rel_max"].get<double>();
      }
      const ex::Json report = ex::compare(req);
      if (report_path) {
        std::ofstream out(*report_path);
        if (!out) throw armarket::IoError("cannot write '" + *report_path + "'");
        out << report.dump(2) << '\n';
      }
      std::cout << report.dump(2) << '\n';
      return report["pass"].get<bool>() ? 0 : kComparisonFailed;
    }
    if (*an_cmd) {
      ex::AnalyticCurves curves;
      try {
        curves = ex::analytic_curves(lambda, order, x_max, points);
      } catch (const armarket::DomainError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigError;
      }
      const std::vector<std::string> meta = {
          "# armarket analytic lambda=" + std::to_string(lambda) +
          " order=" + std::to_string(order)};
      if (csv_out) {
        ex::write_analytic_csv(*csv_out, curves, meta);
      } else {
        ex::write_analytic_csv(std::cout, curves, meta);
      }
      return 0;
    }
    if (*def_cmd) {
      std::cout << ex::default_config(ex::parse_kind(experiment_name)).dump(2) << '\n';
      return 0;
    }
  } catch (const armarket::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntimeError;
  }
  return 0;
}
