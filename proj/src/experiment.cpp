#include "armarket/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "armarket/ar_dynamics.hpp"
#include "armarket/errors.hpp"
#include "armarket/kinetic.hpp"
#include "armarket/noise.hpp"

namespace armarket::experiment {

namespace fs = std::filesystem;

namespace {

const std::map<std::string_view, Kind>& kind_table() {
  static const std::map<std::string_view, Kind> table = {
      {"ar-static", Kind::ArStatic},
      {"ar-growing", Kind::ArGrowing},
      {"ar-annealed", Kind::ArAnnealed},
      {"kinetic-ccm", Kind::KineticCcm},
      {"kinetic-cc", Kind::KineticCc},
      {"kinetic-generic", Kind::KineticGeneric},
      {"kinetic-yakovenko", Kind::KineticYakovenko},
      {"pareto-sweep", Kind::ParetoSweep},
      {"analytic-curves", Kind::AnalyticCurves},
  };
  return table;
}

// ---------------------------------------------------------------------------
// Config access by dotted path
// ---------------------------------------------------------------------------

Json::json_pointer pointer(std::string_view path) {
  std::string p = "/";
  for (char c : path) p += (c == '.') ? '/' : c;
  return Json::json_pointer(p);
}

const Json& at(const Json& c, std::string_view path) {
  const auto ptr = pointer(path);
  if (!c.contains(ptr)) throw ConfigError(std::string(path), "missing field");
  return c.at(ptr);
}

double number(const Json& c, std::string_view path) {
  const Json& v = at(c, path);
  if (!v.is_number()) throw ConfigError(std::string(path), "expected a number");
  return v.get<double>();
}

std::int64_t integer(const Json& c, std::string_view path) {
  const Json& v = at(c, path);
  if (v.is_number_integer()) return v.get<std::int64_t>();
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (std::floor(d) == d && std::abs(d) < 9.0e18) return static_cast<std::int64_t>(d);
  }
  throw ConfigError(std::string(path), "expected an integer");
}

std::optional<std::int64_t> optional_integer(const Json& c, std::string_view path) {
  if (at(c, path).is_null()) return std::nullopt;
  return integer(c, path);
}

std::string text(const Json& c, std::string_view path) {
  const Json& v = at(c, path);
  if (!v.is_string()) throw ConfigError(std::string(path), "expected a string");
  return v.get<std::string>();
}

bool flag(const Json& c, std::string_view path) {
  const Json& v = at(c, path);
  if (!v.is_boolean()) throw ConfigError(std::string(path), "expected true or false");
  return v.get<bool>();
}

std::size_t positive_size(const Json& c, std::string_view path) {
  const std::int64_t v = integer(c, path);
  if (v < 1) throw ConfigError(std::string(path), "must be a positive integer");
  return static_cast<std::size_t>(v);
}

void deep_merge(Json& base, const Json& patch) {
  if (!patch.is_object() || !base.is_object()) {
    base = patch;
    return;
  }
  for (auto it = patch.begin(); it != patch.end(); ++it) {
    if (base.contains(it.key()) && base[it.key()].is_object() && it.value().is_object()) {
      deep_merge(base[it.key()], it.value());
    } else {
      base[it.key()] = it.value();
    }
  }
}

void check_keys(const Json& value, const Json& schema, const std::string& prefix) {
  for (auto it = value.begin(); it != value.end(); ++it) {
    const std::string path = prefix.empty() ? it.key() : prefix + "." + it.key();
    if (!schema.contains(it.key())) throw ConfigError(path, "unknown field");
    const Json& expected = schema.at(it.key());
    if (expected.is_object()) {
      if (!it.value().is_object()) throw ConfigError(path, "expected an object");
      check_keys(it.value(), expected, path);
    }
  }
}

// ---------------------------------------------------------------------------
// Typed views of a resolved config
// ---------------------------------------------------------------------------

NoiseSpec noise_from(const Json& c) {
  NoiseSpec n;
  n.family = parse_noise_family(text(c, "noise.family"));
  n.mean = number(c, "noise.mean");
  n.std = n.family == NoiseFamily::Exponential ? n.mean : number(c, "noise.std");
  const auto kind = parse_schedule_kind(text(c, "noise.schedule.kind"));
  if (kind == MeanSchedule::Kind::LinearRamp) {
    n.schedule = MeanSchedule::linear_ramp(integer(c, "noise.schedule.horizon"));
  }
  n.validate();
  return n;
}

CapacityLaw law_from(const Json& c, const std::string& prefix) {
  CapacityLaw law;
  law.kind = parse_capacity_kind(text(c, prefix + ".kind"));
  law.alpha = number(c, prefix + ".alpha");
  law.mu = number(c, prefix + ".mu");
  try {
    law.validate();
  } catch (const ConfigError& e) {
    // Re-anchor the field path under the section actually used.
    const std::string leaf = e.field().substr(e.field().rfind('.') + 1);
    throw ConfigError(prefix + "." + leaf, e.detail());
  }
  return law;
}

PopulationSpec population_from(const Json& c) {
  PopulationSpec p;
  p.count = integer(c, "population.count");
  p.capacity_law = law_from(c, "population.capacity_law");
  p.initial_wealth = number(c, "population.initial_wealth");
  p.capacity_floor = number(c, "population.capacity_floor");
  p.validate();
  return p;
}

SimConfig sim_from(const Json& c) {
  SimConfig s;
  s.steps = integer(c, "sim.steps");
  s.burn_in = optional_integer(c, "sim.burn_in");
  s.stride = integer(c, "sim.stride");
  const std::int64_t seed = integer(c, "seed");
  if (seed < 0) throw ConfigError("seed", "must be non-negative");
  s.seed = static_cast<std::uint64_t>(seed);
  s.validate();
  return s;
}

struct KineticSetup {
  KineticModel model;
  std::size_t agents = 0;
  double total_wealth = 0.0;
  KineticOptions options;
};

KineticSetup kinetic_from(const Json& c, Kind kind) {
  KineticSetup k;
  switch (kind) {
    case Kind::KineticCcm:
      k.model = KineticModel::ccm();
      k.model.savings_law = law_from(c, "kinetic.savings_law");
      k.model.savings_floor = number(c, "kinetic.savings_floor");
      break;
    case Kind::KineticCc:
      k.model = KineticModel::cc(number(c, "kinetic.lambda"));
      break;
    case Kind::KineticGeneric:
      k.model = KineticModel::generic();
      break;
    default:
      k.model = KineticModel::yakovenko();
      break;
  }
  k.model.validate();
  const std::int64_t agents = integer(c, "kinetic.agents");
  if (agents < 2) throw ConfigError("kinetic.agents", "needs at least two agents");
  k.agents = static_cast<std::size_t>(agents);
  k.total_wealth = number(c, "kinetic.total_wealth");
  if (!(k.total_wealth > 0.0)) throw ConfigError("kinetic.total_wealth", "must be positive");

  const Json& tagged = at(c, "kinetic.tagged");
  if (!tagged.is_null()) {
    if (!tagged.is_object()) throw ConfigError("kinetic.tagged", "expected an object or null");
    check_keys(tagged, Json{{"index", 0}, {"savings", nullptr}}, "kinetic.tagged");
    TaggedAgent t;
    const std::int64_t index = integer(c, "kinetic.tagged.index");
    if (index < 0 || static_cast<std::size_t>(index) >= k.agents) {
      throw ConfigError("kinetic.tagged.index", "outside the population");
    }
    t.index = static_cast<std::size_t>(index);
    if (tagged.contains("savings") && !tagged.at("savings").is_null()) {
      const double s = number(c, "kinetic.tagged.savings");
      if (!(s >= 0.0 && s < 1.0)) throw ConfigError("kinetic.tagged.savings", "must lie in [0, 1)");
      t.savings = s;
    }
    k.options.tagged = t;
  }
  k.options.record_pooled = true;
  k.options.record_noise = true;
  return k;
}

void validate(const Json& c, Kind kind) {
  positive_size(c, "histogram.bins");
  positive_size(c, "histogram.log_per_decade");
  text(c, "output.dir");
  if (text(c, "output.name").empty()) throw ConfigError("output.name", "must not be empty");
  flag(c, "output.samples");
  switch (kind) {
    case Kind::ArStatic:
    case Kind::ArGrowing:
    case Kind::ArAnnealed:
    case Kind::ParetoSweep:
      noise_from(c);
      population_from(c);
      sim_from(c);
      break;
    case Kind::KineticCcm:
    case Kind::KineticCc:
    case Kind::KineticGeneric:
    case Kind::KineticYakovenko:
      sim_from(c);
      kinetic_from(c, kind);
      break;
    case Kind::AnalyticCurves: {
      const double lambda = number(c, "analytic.lambda");
      if (!(lambda > 0.0 && lambda <= kSeriesMaxLambda)) {
        throw ConfigError("analytic.lambda", "must lie in (0, 0.9]");
      }
      if (!(number(c, "analytic.x_max") > 0.0)) {
        throw ConfigError("analytic.x_max", "must be positive");
      }
      if (positive_size(c, "analytic.points") < 2) {
        throw ConfigError("analytic.points", "needs at least two points");
      }
      positive_size(c, "analytic.recursion_points");
      break;
    }
  }
  if (kind == Kind::ArStatic || kind == Kind::ArGrowing || kind == Kind::AnalyticCurves) {
    positive_size(c, "analytic.order");
  }
  if (kind == Kind::ArGrowing) {
    if (noise_from(c).is_static()) {
      throw ConfigError("noise.schedule.kind", "ar-growing needs a linear-ramp schedule");
    }
  } else if (kind != Kind::KineticCcm && kind != Kind::KineticCc &&
             kind != Kind::KineticGeneric && kind != Kind::KineticYakovenko &&
             kind != Kind::AnalyticCurves && !noise_from(c).is_static()) {
    throw ConfigError("noise.schedule.kind", "ramps are only valid for ar-growing");
  }
  if (kind == Kind::ParetoSweep) {
    if (population_from(c).count < 100) {
      throw ConfigError("population.count", "a tail fit needs at least 100 agents");
    }
    const Json& k = at(c, "tail.k");
    if (!k.is_null() && positive_size(c, "tail.k") >= static_cast<std::size_t>(population_from(c).count)) {
      throw ConfigError("tail.k", "must be smaller than population.count");
    }
  }
}

// ---------------------------------------------------------------------------
// Output
// ---------------------------------------------------------------------------

// Shortest representation that round-trips.
std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

class RunWriter {
 public:
  RunWriter(fs::path dir, const Json& config) : dir_(std::move(dir)) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec || !fs::is_directory(dir_)) {
      throw IoError("cannot create output directory '" + dir_.string() + "': " + ec.message());
    }
    metadata_ = {"# armarket experiment=" + config.at("experiment").get<std::string>(),
                 "# config_hash=" + config_hash(config), "# config=" + config.dump()};
  }

  const fs::path& dir() const { return dir_; }
  const std::vector<std::string>& metadata() const { return metadata_; }

  std::ofstream open(const std::string& name) {
    std::ofstream out(dir_ / name, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + (dir_ / name).string() + "'");
    files_.push_back(name);
    return out;
  }

  std::ofstream open_csv(const std::string& name, const std::string& header) {
    auto out = open(name);
    for (const auto& m : metadata_) out << m << '\n';
    out << header << '\n';
    return out;
  }

  void json(const std::string& name, const Json& j) {
    auto out = open(name);
    out << j.dump(2) << '\n';
    if (!out) throw IoError("failed writing '" + name + "'");
  }

  void histogram(const std::string& name, const Histogram& h) {
    auto out = open_csv(name, "bin_left,bin_right,density");
    const auto density = h.density();
    for (std::size_t b = 0; b < h.bins(); ++b) {
      out << format_double(h.edges[b]) << ',' << format_double(h.edges[b + 1]) << ','
          << format_double(density[b]) << '\n';
    }
  }

  void analytic(const AnalyticCurves& curves) {
    auto out = open("analytic.csv");
    write_analytic_csv(out, curves, metadata_);
  }

  void samples(const std::string& name, const EmpiricalDistribution& emp) {
    auto out = open_csv(name, "value");
    for (double x : emp.samples()) out << format_double(x) << '\n';
  }

  std::vector<std::string> files() const {
    auto f = files_;
    f.push_back("summary.json");
    std::sort(f.begin(), f.end());
    return f;
  }

 private:
  fs::path dir_;
  std::vector<std::string> metadata_;
  std::vector<std::string> files_;
};

Json moments_json(const EmpiricalDistribution& emp) {
  const Moments m = moments(emp, std::min<std::size_t>(50, emp.count()));
  return {{"count", m.count}, {"mean", m.mean}, {"std", m.std},
          {"std_err", m.std_err}, {"std_err_iid", m.std_err_iid}};
}

Json fit_json(const TailFitResult& f) {
  return {{"gamma_hat", f.gamma_hat}, {"std_err", f.std_err}, {"k", f.k}, {"w_min", f.w_min}};
}

// Records a sample set: histogram, optional raw samples, summary entry.
void emit_set(RunWriter& w, Json& summary, const Json& config, const std::string& set,
              const std::string& domain, const EmpiricalDistribution& emp,
              const std::string& stem) {
  Json entry = {{"domain", domain}, {"count", emp.count()}};
  if (emp.count() >= 2) {
    const auto bins = static_cast<std::size_t>(integer(config, "histogram.bins"));
    w.histogram(stem + "histogram.csv", emp.histogram(bins));
    entry["histogram"] = stem + "histogram.csv";
  }
  if (flag(config, "output.samples")) {
    w.samples(stem + "samples.csv", emp);
    entry["file"] = stem + "samples.csv";
  }
  summary["sets"][set] = entry;
}

Json ks_entry(const EmpiricalDistribution& emp, const Reference& ref, double n_eff) {
  const double ks = ks_distance(emp, ref.cdf);
  return {{"reference", ref.description}, {"ks", ks}, {"n_eff", n_eff},
          {"ks_critical_999", ks_critical_999(n_eff)}};
}

Reference exponential_reference(double mean) {
  std::ostringstream d;
  d << "exp:mean=" << format_double(mean);
  return parse_reference(d.str());
}

std::optional<Reference> static_ar_reference(const NoiseSpec& noise, double lambda,
                                             std::size_t order) {
  std::ostringstream d;
  if (noise.family == NoiseFamily::Gaussian) {
    const auto g = gaussian_fixed_point(noise.mean, noise.std, lambda);
    d << "normal:mean=" << format_double(g.mean) << ",std=" << format_double(g.std);
    return parse_reference(d.str());
  }
  if (lambda == 0.0) return exponential_reference(noise.mean);
  if (lambda > kSeriesMaxLambda) return std::nullopt;
  d << "series:lambda=" << format_double(lambda) << ",order=" << order
    << ",mean=" << format_double(noise.mean);
  return parse_reference(d.str());
}

// ---------------------------------------------------------------------------
// Experiments
// ---------------------------------------------------------------------------

void run_ar_static(const Json& c, RunWriter& w, Json& s) {
  const NoiseSpec noise = noise_from(c);
  const PopulationSpec pop = population_from(c);
  const SimConfig cfg = sim_from(c);
  const QuenchedResult r = simulate_quenched(pop, noise, cfg, true);
  const EmpiricalDistribution pooled = r.pooled();
  emit_set(w, s, c, "pooled", "wealth", pooled, "");
  s["moments"] = moments_json(pooled);

  // Mean-wealth law <x_i> = <xi> / mu_i, checked per agent.
  double max_z = 0.0;
  Json agents = Json::array();
  for (const auto& a : r.agents) {
    const double expected = noise.mean / a.capacity;
    const double z = a.std_err > 0.0 ? (a.mean - expected) / a.std_err : 0.0;
    max_z = std::max(max_z, std::abs(z));
    if (r.agents.size() <= 1000) {
      agents.push_back({{"capacity", a.capacity}, {"mean", a.mean}, {"std_err", a.std_err},
                        {"expected", expected}, {"z", z}});
    }
  }
  s["mean_law"] = {{"max_abs_z", max_z}, {"within_4se", max_z <= 4.0}};
  if (!agents.empty()) s["agents"] = agents;

  if (pop.capacity_law.kind == CapacityLaw::Kind::Constant) {
    const double lambda = 1.0 - pop.capacity_law.mu;
    const auto order = static_cast<std::size_t>(integer(c, "analytic.order"));
    if (auto ref = static_ar_reference(noise, lambda, order)) {
      const double n_eff = ar1_effective_count(static_cast<double>(pooled.count()), lambda);
      s["reference_fit"] = ks_entry(pooled, *ref, n_eff);
    }
    if (noise.family == NoiseFamily::Gaussian) {
      const auto g = gaussian_fixed_point(noise.mean, noise.std, lambda);
      s["fixed_point"] = {{"mean", g.mean}, {"std", g.std}};
    }
    if (noise.family == NoiseFamily::Exponential && lambda > 0.0 && lambda <= kSeriesMaxLambda) {
      const double x_max = noise.mean * 10.0 / (1.0 - lambda);
      AnalyticCurves curves = analytic_curves(lambda, order, x_max / noise.mean, 401);
      for (std::size_t i = 0; i < curves.x.size(); ++i) {
        curves.x[i] *= noise.mean;
        curves.series_raw[i] /= noise.mean;
        curves.series_density[i] /= noise.mean;
        curves.recursion[i] /= noise.mean;
        curves.gamma_cc[i] /= noise.mean;
        curves.gamma2[i] /= noise.mean;
      }
      w.analytic(curves);
    }
  }
}

void run_ar_growing(const Json& c, RunWriter& w, Json& s) {
  const NoiseSpec noise = noise_from(c);
  const PopulationSpec pop = population_from(c);
  const SimConfig cfg = sim_from(c);
  const EmpiricalDistribution snap = simulate_growing(pop, noise, cfg);
  emit_set(w, s, c, "pooled", "wealth", snap, "");
  s["moments"] = moments_json(snap);
  s["horizon"] = noise.schedule->horizon;
  if (pop.capacity_law.kind == CapacityLaw::Kind::Constant) {
    const double lambda = 1.0 - pop.capacity_law.mu;
    // The ramp ends at a(T) = 1; compare with the static market at mean 1.
    NoiseSpec final_market = noise;
    final_market.schedule.reset();
    final_market.mean = 1.0;
    const auto order = static_cast<std::size_t>(integer(c, "analytic.order"));
    if (auto ref = static_ar_reference(final_market, lambda, order)) {
      s["reference_fit"] = ks_entry(snap, *ref, static_cast<double>(snap.count()));
    }
  }
}

void run_ar_annealed(const Json& c, RunWriter& w, Json& s) {
  const NoiseSpec noise = noise_from(c);
  const PopulationSpec pop = population_from(c);
  const SimConfig cfg = sim_from(c);
  const EmpiricalDistribution emp = simulate_annealed(pop, noise, cfg);
  emit_set(w, s, c, "pooled", "wealth", emp, "");
  s["moments"] = moments_json(emp);
  if (noise.family == NoiseFamily::Exponential) {
    std::ostringstream d;
    d << "gamma:n=2,scale=" << format_double(noise.mean);
    // Mean savings 1/2: lag-one correlation of the pooled per-agent series.
    s["reference_fit"] = ks_entry(emp, parse_reference(d.str()),
                                  ar1_effective_count(static_cast<double>(emp.count()), 0.5));
  }
}

void run_kinetic(const Json& c, Kind kind, RunWriter& w, Json& s) {
  const SimConfig cfg = sim_from(c);
  const KineticSetup k = kinetic_from(c, kind);
  const KineticResult r = simulate_kinetic(k.model, k.agents, k.total_wealth, cfg, k.options);
  const double mean = k.total_wealth / static_cast<double>(k.agents);

  emit_set(w, s, c, "pooled", "wealth", r.pooled, "");
  emit_set(w, s, c, "noise", "noise", r.noise, "noise_");
  s["moments"] = moments_json(r.pooled);
  s["noise_moments"] = moments_json(r.noise);
  s["trades"] = r.trades;
  s["conservation"] = {{"initial_total", r.initial_total},
                       {"final_total", r.final_total},
                       {"relative_drift", std::abs(r.final_total - r.initial_total) /
                                              r.initial_total}};
  if (r.tagged) {
    emit_set(w, s, c, "tagged", "wealth", *r.tagged, "tagged_");
    emit_set(w, s, c, "tagged_noise", "noise", *r.tagged_noise, "tagged_noise_");
    s["tagged"] = {{"index", k.options.tagged->index},
                   {"savings", r.savings[k.options.tagged->index]},
                   {"moments", moments_json(*r.tagged)}};
  }

  const auto n = static_cast<double>(r.pooled.count());
  switch (kind) {
    case Kind::KineticCc: {
      if (k.model.lambda == 0.0) {
        s["reference_fit"] = ks_entry(r.pooled, exponential_reference(mean), n);
      } else {
        const double shape = cc_gamma_shape(k.model.lambda);
        std::ostringstream d;
        d << "gamma:n=" << format_double(shape) << ",scale=" << format_double(mean / shape);
        Json approx = ks_entry(r.pooled, parse_reference(d.str()), n);
        approx["note"] = "approximate Gamma fit, no acceptance bound";
        s["approximate_reference"] = approx;
      }
      break;
    }
    case Kind::KineticGeneric: {
      std::ostringstream d;
      d << "gamma:n=2,scale=" << format_double(mean / 2.0);
      s["reference_fit"] = ks_entry(r.pooled, parse_reference(d.str()), n);
      s["noise_reference_fit"] =
          ks_entry(r.noise, exponential_reference(mean / 2.0),
                   static_cast<double>(r.noise.count()));
      break;
    }
    case Kind::KineticYakovenko:
      s["reference_fit"] = ks_entry(r.pooled, exponential_reference(mean), n);
      break;
    case Kind::KineticCcm: {
      const auto [lo, hi] = std::minmax_element(r.savings.begin(), r.savings.end());
      s["savings"] = {{"min", *lo}, {"max", *hi}};
      break;
    }
    default:
      break;
  }
}

void run_pareto(const Json& c, RunWriter& w, Json& s) {
  const NoiseSpec noise = noise_from(c);
  const PopulationSpec pop = population_from(c);
  const SimConfig cfg = sim_from(c);
  const QuenchedResult r = simulate_quenched(pop, noise, cfg, false);
  const EmpiricalDistribution wealth = r.mean_wealth();

  std::optional<std::size_t> k;
  if (!at(c, "tail.k").is_null()) k = positive_size(c, "tail.k");
  const TailFitResult fit = tail_exponent(wealth, k);
  Json sensitivity = Json::array();
  for (const auto& f : tail_sensitivity(wealth)) sensitivity.push_back(fit_json(f));

  s["fit"] = fit_json(fit);
  s["fit_sensitivity"] = sensitivity;
  s["moments"] = moments_json(wealth);
  const double expected = pop.capacity_law.kind == CapacityLaw::Kind::PowerAlpha
                              ? 2.0 + pop.capacity_law.alpha
                              : 2.0;
  if (pop.capacity_law.kind != CapacityLaw::Kind::Constant) s["expected_gamma"] = expected;

  if (flag(c, "output.samples")) {
    w.samples("samples.csv", wealth);
    s["sets"]["pooled"] = {{"domain", "mean_wealth"}, {"count", wealth.count()},
                           {"file", "samples.csv"}};
  } else {
    s["sets"]["pooled"] = {{"domain", "mean_wealth"}, {"count", wealth.count()}};
  }

  const Histogram h = wealth.log_histogram(
      static_cast<std::size_t>(integer(c, "histogram.log_per_decade")));
  const auto density = h.density();
  {
    auto out = w.open_csv("log_histogram.csv", "bin_left,bin_right,density,pareto_density");
    for (std::size_t b = 0; b < h.bins(); ++b) {
      const double mid = std::sqrt(h.edges[b] * h.edges[b + 1]);
      const double ref = pop.capacity_law.kind == CapacityLaw::Kind::Constant
                             ? 0.0
                             : pareto_density(pop.capacity_law, noise.mean, mid,
                                              pop.capacity_floor);
      out << format_double(h.edges[b]) << ',' << format_double(h.edges[b + 1]) << ','
          << format_double(density[b]) << ',' << format_double(ref) << '\n';
    }
  }
  w.json("fit.json", s["fit"]);
  {
    auto out = w.open_csv("fit.csv", "gamma_hat,std_err,k,w_min");
    out << format_double(fit.gamma_hat) << ',' << format_double(fit.std_err) << ','
        << fit.k << ',' << format_double(fit.w_min) << '\n';
  }
}

void run_analytic(const Json& c, RunWriter& w, Json& s) {
  const double lambda = number(c, "analytic.lambda");
  const auto order = positive_size(c, "analytic.order");
  const AnalyticCurves curves =
      analytic_curves(lambda, order, number(c, "analytic.x_max"),
                      positive_size(c, "analytic.points"),
                      positive_size(c, "analytic.recursion_points"));
  w.analytic(curves);
  const std::size_t clamped =
      static_cast<std::size_t>(std::count_if(curves.series_raw.begin(), curves.series_raw.end(),
                                             [](double v) { return v < 0.0; }));
  s["series"] = {{"lambda", lambda},
                 {"order", order},
                 {"coefficients", curves.series.coefficients},
                 {"boundary_sum", curves.series.boundary_sum()},
                 {"normalization_sum", curves.series.normalization_sum()},
                 {"mean_sum", curves.series.mean_sum()},
                 {"expected_mean", 1.0 / (1.0 - lambda)},
                 {"clamped_points", clamped}};
  s["recursion"] = {{"level", order}, {"max_abs_gap", curves.max_recursion_gap}};
  s["cc_gamma_shape"] = cc_gamma_shape(lambda);
}

}  // namespace

std::string_view to_string(Kind kind) {
  for (const auto& [name, k] : kind_table()) {
    if (k == kind) return name;
  }
  return "?";
}

Kind parse_kind(std::string_view name) {
  const auto it = kind_table().find(name);
  if (it == kind_table().end()) {
    throw ConfigError("experiment", "unknown experiment '" + std::string(name) + "'");
  }
  return it->second;
}

std::vector<std::string_view> kind_names() {
  std::vector<std::string_view> out;
  for (const auto& [name, k] : kind_table()) out.push_back(name);
  return out;
}

Json default_config(Kind kind) {
  Json c = {
      {"experiment", std::string(to_string(kind))},
      {"seed", 1},
      {"output", {{"dir", "runs"}, {"name", std::string(to_string(kind))}, {"samples", true}}},
      {"histogram", {{"bins", 200}, {"log_per_decade", 20}}},
  };
  const Json noise = {{"family", "exponential"},
                      {"mean", 1.0},
                      {"std", 1.0},
                      {"schedule", {{"kind", "constant"}, {"horizon", 1}}}};
  auto population = [](std::int64_t count, const std::string& law, double mu) {
    return Json{{"count", count},
                {"capacity_law", {{"kind", law}, {"alpha", 0.0}, {"mu", mu}}},
                {"initial_wealth", 1.0},
                {"capacity_floor", 1e-3}};
  };
  auto sim = [](std::int64_t steps) {
    return Json{{"steps", steps}, {"burn_in", nullptr}, {"stride", 1}};
  };
  auto kinetic = [](double total) {
    return Json{{"agents", 100},
                {"total_wealth", total},
                {"lambda", 0.4},
                {"savings_law", {{"kind", "uniform01"}, {"alpha", 0.0}, {"mu", 1.0}}},
                {"savings_floor", 1e-3},
                {"tagged", nullptr}};
  };

  switch (kind) {
    case Kind::ArStatic:
      c["noise"] = noise;
      c["population"] = population(1, "constant", 0.6);
      c["sim"] = sim(1000000);
      c["analytic"] = {{"order", 12}};
      break;
    case Kind::ArGrowing: {
      Json n = noise;
      n["schedule"] = {{"kind", "linear-ramp"}, {"horizon", 200}};
      c["noise"] = n;
      c["population"] = population(100000, "constant", 0.6);
      c["sim"] = sim(200);
      c["analytic"] = {{"order", 12}};
      break;
    }
    case Kind::ArAnnealed:
      c["noise"] = noise;
      c["population"] = population(1000, "constant", 1.0);
      c["sim"] = sim(1000);
      break;
    case Kind::KineticCcm:
    case Kind::KineticCc:
    case Kind::KineticYakovenko:
      c["kinetic"] = kinetic(100.0);
      c["sim"] = sim(10000);
      break;
    case Kind::KineticGeneric:
      c["kinetic"] = kinetic(200.0);
      c["sim"] = sim(10000);
      break;
    case Kind::ParetoSweep:
      c["noise"] = noise;
      c["population"] = population(100000, "uniform01", 1.0);
      c["sim"] = sim(2000);
      c["tail"] = {{"k", nullptr}};
      c["output"]["samples"] = false;
      break;
    case Kind::AnalyticCurves:
      c["analytic"] = {{"lambda", 0.4},
                       {"order", 4},
                       {"x_max", 6.0},
                       {"points", 601},
                       {"recursion_points", 4096}};
      break;
  }
  return c;
}

Json resolve_config(const Json& user, const Overrides& overrides) {
  if (!user.is_object()) throw ConfigError("", "configuration must be a JSON object");
  Json patched = user;
  for (const auto& item : overrides.sets) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw ConfigError(item, "override must look like key.path=value");
    }
    const std::string key = item.substr(0, eq);
    const std::string raw = item.substr(eq + 1);
    Json value = Json::parse(raw, nullptr, false);
    if (value.is_discarded()) value = raw;
    try {
      patched[pointer(key)] = value;
    } catch (const Json::exception&) {
      throw ConfigError(key, "cannot set this path");
    }
  }
  if (!patched.contains("experiment") || !patched["experiment"].is_string()) {
    throw ConfigError("experiment", "missing experiment name");
  }
  const Kind kind = parse_kind(patched["experiment"].get<std::string>());
  const Json defaults = default_config(kind);
  check_keys(patched, defaults, "");

  Json resolved = defaults;
  deep_merge(resolved, patched);
  if (overrides.seed) resolved["seed"] = *overrides.seed;
  if (overrides.out_dir) resolved["output"]["dir"] = *overrides.out_dir;
  validate(resolved, kind);
  return resolved;
}

std::string config_hash(const Json& config) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : config.dump()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
  return buf;
}

RunResult run(const Json& resolved) {
  const Kind kind = parse_kind(text(resolved, "experiment"));
  validate(resolved, kind);
  RunWriter writer(fs::path(text(resolved, "output.dir")) / text(resolved, "output.name"),
                   resolved);
  writer.json("config.json", resolved);

  Json summary = {{"experiment", std::string(to_string(kind))},
                  {"seed", resolved.at("seed")},
                  {"config_hash", config_hash(resolved)},
                  {"config", resolved}};
  switch (kind) {
    case Kind::ArStatic:
      run_ar_static(resolved, writer, summary);
      break;
    case Kind::ArGrowing:
      run_ar_growing(resolved, writer, summary);
      break;
    case Kind::ArAnnealed:
      run_ar_annealed(resolved, writer, summary);
      break;
    case Kind::KineticCcm:
    case Kind::KineticCc:
    case Kind::KineticGeneric:
    case Kind::KineticYakovenko:
      run_kinetic(resolved, kind, writer, summary);
      break;
    case Kind::ParetoSweep:
      run_pareto(resolved, writer, summary);
      break;
    case Kind::AnalyticCurves:
      run_analytic(resolved, writer, summary);
      break;
  }
  summary["files"] = writer.files();
  writer.json("summary.json", summary);
  return {writer.dir(), summary};
}

// ---------------------------------------------------------------------------
// Analytic curves
// ---------------------------------------------------------------------------

AnalyticCurves analytic_curves(double lambda, std::size_t order, double x_max,
                               std::size_t points, std::size_t recursion_points) {
  if (points < 2) throw DomainError("need at least two curve points");
  if (!(x_max > 0.0)) throw DomainError("curve range must be positive");
  AnalyticCurves out;
  out.series = series_coefficients(lambda, order);
  const auto levels =
      convolution_recursion(NoiseSpec::exponential(1.0), lambda, order, {recursion_points, {}});
  const TabulatedDensity& pm = levels.back();
  for (std::size_t k = 0; k < pm.grid.size(); ++k) {
    out.max_recursion_gap = std::max(
        out.max_recursion_gap, std::abs(series_pdf(out.series, pm.grid[k]).raw - pm.density[k]));
  }
  const double shape = cc_gamma_shape(lambda);
  for (std::size_t i = 0; i < points; ++i) {
    const double x = x_max * static_cast<double>(i) / static_cast<double>(points - 1);
    const SeriesValue v = series_pdf(out.series, x);
    out.x.push_back(x);
    out.series_raw.push_back(v.raw);
    out.series_density.push_back(v.density);
    out.recursion.push_back(pm.at(x));
    out.gamma_cc.push_back(shape * gamma_pdf(shape, shape * x));
    out.gamma2.push_back(gamma_pdf(2.0, x));
  }
  return out;
}

void write_analytic_csv(const fs::path& path, const AnalyticCurves& curves,
                        const std::vector<std::string>& metadata) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  write_analytic_csv(out, curves, metadata);
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

void write_analytic_csv(std::ostream& out, const AnalyticCurves& curves,
                        const std::vector<std::string>& metadata) {
  for (const auto& m : metadata) out << m << '\n';
  out << "x,series_raw,series_density,recursion,gamma_cc_approx,gamma2\n";
  for (std::size_t i = 0; i < curves.x.size(); ++i) {
    out << format_double(curves.x[i]) << ',' << format_double(curves.series_raw[i]) << ','
        << format_double(curves.series_density[i]) << ','
        << format_double(curves.recursion[i]) << ',' << format_double(curves.gamma_cc[i])
        << ',' << format_double(curves.gamma2[i]) << '\n';
  }
}

// ---------------------------------------------------------------------------
// Comparison
// ---------------------------------------------------------------------------

Reference parse_reference(const std::string& spec) {
  const auto colon = spec.find(':');
  const std::string name = spec.substr(0, colon);
  std::map<std::string, double> params;
  if (colon != std::string::npos) {
    std::stringstream rest(spec.substr(colon + 1));
    std::string item;
    while (std::getline(rest, item, ',')) {
      const auto eq = item.find('=');
      if (eq == std::string::npos) throw ConfigError("reference", "bad parameter '" + item + "'");
      try {
        params[item.substr(0, eq)] = std::stod(item.substr(eq + 1));
      } catch (const std::exception&) {
        throw ConfigError("reference", "bad number in '" + item + "'");
      }
    }
  }
  auto get = [&](const std::string& key, std::optional<double> fallback = std::nullopt) {
    const auto it = params.find(key);
    if (it != params.end()) return it->second;
    if (fallback) return *fallback;
    throw ConfigError("reference", name + " needs parameter '" + key + "'");
  };

  Reference ref;
  ref.description = spec;
  if (name == "exp") {
    const double mean = get("mean", 1.0);
    if (!(mean > 0.0)) throw ConfigError("reference", "mean must be positive");
    ref.cdf = [mean](double x) { return x <= 0.0 ? 0.0 : -std::expm1(-x / mean); };
    ref.mean = mean;
  } else if (name == "gamma") {
    const double n = get("n");
    const double scale = get("scale", 1.0);
    if (!(n > 0.0 && scale > 0.0)) throw ConfigError("reference", "n and scale must be positive");
    ref.cdf = [n, scale](double x) { return gamma_cdf(n, x / scale); };
    ref.mean = n * scale;
  } else if (name == "normal") {
    const double mean = get("mean");
    const double std = get("std");
    if (!(std > 0.0)) throw ConfigError("reference", "std must be positive");
    ref.cdf = [mean, std](double x) { return normal_cdf(x, mean, std); };
    ref.mean = mean;
    ref.support_min = -std::numeric_limits<double>::infinity();
  } else if (name == "series") {
    const double order = get("order", 12.0);
    const double mean = get("mean", 1.0);
    if (!(order >= 1.0) || std::floor(order) != order) {
      throw ConfigError("reference", "series order must be a positive integer");
    }
    if (!(mean > 0.0)) throw ConfigError("reference", "mean must be positive");
    SeriesDistribution dist;
    try {
      dist = series_coefficients(get("lambda"), static_cast<std::size_t>(order));
    } catch (const DomainError& e) {
      throw ConfigError("reference", e.what());
    }
    ref.mean = mean * dist.mean_sum();
    ref.cdf = [dist = std::move(dist), mean](double x) { return series_cdf(dist, x / mean); };
  } else {
    throw ConfigError("reference", "unknown reference '" + name +
                                       "' (expected exp|gamma|normal|series)");
  }
  return ref;
}

namespace {

struct LoadedSet {
  Json summary;
  std::string domain;
  EmpiricalDistribution samples;
};

fs::path summary_path(const fs::path& p) {
  return fs::is_directory(p) ? p / "summary.json" : p;
}

LoadedSet load_set(const fs::path& run, const std::string& set) {
  const fs::path sp = summary_path(run);
  std::ifstream in(sp);
  if (!in) throw IoError("cannot read '" + sp.string() + "'");
  LoadedSet out;
  out.summary = Json::parse(in, nullptr, false);
  if (out.summary.is_discarded() || !out.summary.is_object()) {
    throw ComparisonError("'" + sp.string() + "' is not a run summary");
  }
  if (!out.summary.contains("sets") || !out.summary["sets"].contains(set)) {
    throw ComparisonError("run '" + sp.string() + "' has no sample set '" + set + "'");
  }
  const Json& entry = out.summary["sets"][set];
  out.domain = entry.value("domain", "");
  if (!entry.contains("file")) {
    throw ComparisonError("run '" + sp.string() + "' did not keep the samples of '" + set +
                          "' (output.samples=false)");
  }
  const fs::path file = sp.parent_path() / entry["file"].get<std::string>();
  std::ifstream csv(file);
  if (!csv) throw IoError("cannot read '" + file.string() + "'");
  std::vector<double> values;
  std::string line;
  bool header = true;
  while (std::getline(csv, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (header) {
      header = false;
      continue;
    }
    values.push_back(std::stod(line));
  }
  out.samples = EmpiricalDistribution(std::move(values));
  if (out.samples.empty()) throw ComparisonError("sample set '" + set + "' is empty");
  return out;
}

double mean_of(const EmpiricalDistribution& e) {
  double s = 0.0;
  for (double x : e.samples()) s += x;
  return s / static_cast<double>(e.count());
}

}  // namespace

Json compare(const CompareRequest& request) {
  if (request.run_b.has_value() == request.reference.has_value()) {
    throw ConfigError("compare", "give exactly one of a second run or a reference");
  }
  const LoadedSet a = load_set(request.run_a, request.set_a);
  Json report = {{"a", {{"run", summary_path(request.run_a).string()},
                        {"set", request.set_a},
                        {"domain", a.domain},
                        {"count", a.samples.count()}}},
                 {"ks_max", request.ks_max}};
  const double mean_a = mean_of(a.samples);
  double mean_b = 0.0;
  double ks = 0.0;
  if (request.run_b) {
    const LoadedSet b = load_set(*request.run_b, request.set_b);
    if (a.domain != b.domain) {
      throw ComparisonError("sample domains differ: '" + a.domain + "' vs '" + b.domain + "'");
    }
    report["b"] = {{"run", summary_path(*request.run_b).string()},
                   {"set", request.set_b},
                   {"domain", b.domain},
                   {"count", b.samples.count()}};
    ks = ks_distance(a.samples, b.samples);
    mean_b = mean_of(b.samples);
  } else {
    const Reference ref = parse_reference(*request.reference);
    if (a.samples.sorted().front() < ref.support_min) {
      throw ComparisonError("samples extend below the support of '" + ref.description + "'");
    }
    report["reference"] = ref.description;
    ks = ks_distance(a.samples, ref.cdf);
    mean_b = ref.mean;
  }
  const double rel = std::abs(mean_a - mean_b) / std::max(std::abs(mean_b), 1e-300);
  const bool ks_pass = ks < request.ks_max;
  bool pass = ks_pass;
  report["ks"] = ks;
  report["ks_pass"] = ks_pass;
  report["mean_a"] = mean_a;
  report["mean_b"] = mean_b;
  report["mean_rel_delta"] = rel;
  if (request.mean_rel_max) {
    report["mean_rel_max"] = *request.mean_rel_max;
    report["mean_pass"] = rel <= *request.mean_rel_max;
    pass = pass && rel <= *request.mean_rel_max;
  }
  report["pass"] = pass;
  return report;
}

}  // namespace armarket::experiment
