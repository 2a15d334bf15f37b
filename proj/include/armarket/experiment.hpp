#pragma once

#include <cstdint>
#include <filesystem>
#include <ostream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "armarket/analytics.hpp"
#include "armarket/estimation.hpp"

namespace armarket::experiment {

using Json = nlohmann::json;

enum class Kind {
  ArStatic,
  ArGrowing,
  ArAnnealed,
  KineticCcm,
  KineticCc,
  KineticGeneric,
  KineticYakovenko,
  ParetoSweep,
  AnalyticCurves,
};

std::string_view to_string(Kind kind);
Kind parse_kind(std::string_view name);
std::vector<std::string_view> kind_names();

// Every field the experiment accepts, with its default value. A key absent
// here is rejected by resolve_config.
Json default_config(Kind kind);

struct Overrides {
  std::vector<std::string> sets;  // "dotted.path=value"; value parsed as JSON, else string
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
};

// Defaults <- user config <- overrides, then schema validation. Throws
// ConfigError naming the offending field path.
Json resolve_config(const Json& user, const Overrides& overrides = {});

// FNV-1a 64 of the compact dump of `config`, as 16 hex digits.
std::string config_hash(const Json& config);

struct RunResult {
  std::filesystem::path dir;
  Json summary;
};

// Runs a resolved configuration and writes <output.dir>/<output.name>/
// {config.json, summary.json, histogram.csv, ...}. Throws IoError when the
// directory cannot be written.
RunResult run(const Json& resolved);

// Comparison of a recorded sample set against a second run or an analytic
// reference.
struct CompareRequest {
  std::filesystem::path run_a;  // run directory or its summary.json
  std::string set_a = "pooled";
  // Exactly one of run_b / reference.
  std::optional<std::filesystem::path> run_b;
  std::string set_b = "pooled";
  // "series:lambda=0.4,order=4[,mean=1]", "exp:mean=1", "gamma:n=2[,scale=1]",
  // "normal:mean=2,std=1.15".
  std::optional<std::string> reference;

  double ks_max = 0.01;
  // Relative tolerance on the mean difference; unchecked when absent.
  std::optional<double> mean_rel_max;
};

// Report JSON with the metrics, tolerances and an overall "pass" flag.
// Throws ComparisonError for mismatched sample domains or missing sets.
Json compare(const CompareRequest& request);

// A reference CDF parsed from the compare grammar above.
struct Reference {
  std::string description;
  double support_min = 0.0;  // -inf for normal
  Cdf cdf;
  double mean = 0.0;
};
Reference parse_reference(const std::string& spec);

// Columns x, series_raw, series_density, recursion (P_order), gamma_cc_approx,
// gamma2 on `points` uniform nodes of [0, x_max].
struct AnalyticCurves {
  SeriesDistribution series;
  std::vector<double> x;
  std::vector<double> series_raw;
  std::vector<double> series_density;
  std::vector<double> recursion;
  std::vector<double> gamma_cc;
  std::vector<double> gamma2;
  double max_recursion_gap = 0.0;  // max |series - recursion| over the recursion grid
};
AnalyticCurves analytic_curves(double lambda, std::size_t order, double x_max,
                               std::size_t points, std::size_t recursion_points = 4096);

void write_analytic_csv(const std::filesystem::path& path, const AnalyticCurves& curves,
                        const std::vector<std::string>& metadata);
void write_analytic_csv(std::ostream& out, const AnalyticCurves& curves,
                        const std::vector<std::string>& metadata);

}  // namespace armarket::experiment
