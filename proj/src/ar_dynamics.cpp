#include "armarket/ar_dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "armarket/errors.hpp"

namespace armarket {

std::string_view to_string(CapacityLaw::Kind kind) {
  switch (kind) {
    case CapacityLaw::Kind::Uniform01:
      return "uniform01";
    case CapacityLaw::Kind::PowerAlpha:
      return "power-alpha";
    case CapacityLaw::Kind::Constant:
      return "constant";
  }
  return "?";
}

CapacityLaw::Kind parse_capacity_kind(std::string_view name) {
  if (name == "uniform01") return CapacityLaw::Kind::Uniform01;
  if (name == "power-alpha") return CapacityLaw::Kind::PowerAlpha;
  if (name == "constant") return CapacityLaw::Kind::Constant;
  throw ConfigError("population.capacity_law.kind",
                    "unknown law '" + std::string(name) +
                        "' (expected uniform01|power-alpha|constant)");
}

void CapacityLaw::validate() const {
  if (kind == Kind::PowerAlpha && !(alpha >= 0.0 && alpha < 1.0)) {
    throw ConfigError("population.capacity_law.alpha", "must lie in [0, 1)");
  }
  if (kind == Kind::Constant && !(mu > 0.0 && mu <= 1.0)) {
    throw ConfigError("population.capacity_law.mu", "must lie in (0, 1]");
  }
}

double CapacityLaw::sample(RandomStream& rng, double floor) const {
  switch (kind) {
    case Kind::Constant:
      return mu;
    case Kind::Uniform01:
      return floor + (1.0 - floor) * rng.uniform();
    case Kind::PowerAlpha: {
      // Inverse CDF of mu^(alpha+1) restricted to (floor, 1].
      const double p = alpha + 1.0;
      const double lo = std::pow(floor, p);
      return std::pow(lo + (1.0 - lo) * rng.uniform(), 1.0 / p);
    }
  }
  return mu;
}

double CapacityLaw::density(double capacity, double floor) const {
  if (kind == Kind::Constant) {
    throw DomainError("a constant capacity law has no density");
  }
  if (capacity <= floor || capacity > 1.0) return 0.0;
  if (kind == Kind::Uniform01) return 1.0 / (1.0 - floor);
  const double p = alpha + 1.0;
  return p * std::pow(capacity, alpha) / (1.0 - std::pow(floor, p));
}

void PopulationSpec::validate() const {
  if (count < 1) throw ConfigError("population.count", "must be a positive integer");
  if (!(capacity_floor > 0.0 && capacity_floor < 1.0)) {
    throw ConfigError("population.capacity_floor", "must lie in (0, 1)");
  }
  if (!std::isfinite(initial_wealth)) {
    throw ConfigError("population.initial_wealth", "must be finite");
  }
  capacity_law.validate();
}

void SimConfig::validate() const {
  if (steps < 1) throw ConfigError("sim.steps", "must be a positive integer");
  if (stride < 1) throw ConfigError("sim.stride", "must be >= 1");
  if (burn_in) {
    if (*burn_in < 0) throw ConfigError("sim.burn_in", "must be non-negative");
    if (*burn_in >= steps) throw ConfigError("sim.burn_in", "must be smaller than sim.steps");
  }
}

std::int64_t default_burn_in(double max_savings) {
  if (!(max_savings < 1.0)) throw DomainError("savings must be below 1");
  return static_cast<std::int64_t>(std::ceil(20.0 / (1.0 - std::max(0.0, max_savings))));
}

std::size_t recorded_samples(const SimConfig& cfg) {
  const std::int64_t active = cfg.burn_in ? cfg.steps - *cfg.burn_in : cfg.steps;
  return static_cast<std::size_t>(active / cfg.stride);
}

EmpiricalDistribution QuenchedResult::pooled() const {
  return EmpiricalDistribution::merge(per_agent);
}

EmpiricalDistribution QuenchedResult::mean_wealth() const {
  std::vector<double> w;
  w.reserve(agents.size());
  for (const auto& a : agents) w.push_back(a.mean);
  return EmpiricalDistribution(std::move(w));
}

namespace {

// Runs the update loop for one agent, calling `record` on each sampled
// wealth. `next_savings` returns lambda for the current step.
template <typename Savings, typename Record>
void run_agent(double& wealth, const NoiseSpec& noise, std::int64_t warmup,
               std::int64_t steps, std::optional<std::int64_t> burn_in,
               std::int64_t stride, RandomStream& rng, Savings&& next_savings,
               Record&& record) {
  // Static noise only; t is irrelevant for a constant schedule.
  // Savings are drawn before the noise; the operands of + are unsequenced.
  auto step = [&] {
    const double lambda = next_savings();
    wealth = lambda * wealth + sample_noise(noise, 1, rng);
  };
  for (std::int64_t t = 0; t < warmup; ++t) step();
  const std::int64_t skip = burn_in.value_or(0);
  for (std::int64_t t = 1; t <= steps; ++t) {
    step();
    if (t > skip && (t - skip) % stride == 0) record(wealth);
  }
}

}  // namespace

QuenchedResult simulate_quenched(const PopulationSpec& pop, const NoiseSpec& noise,
                                 const SimConfig& cfg, bool keep_samples) {
  pop.validate();
  noise.validate();
  cfg.validate();
  if (!noise.is_static()) {
    throw ConfigError("noise.schedule",
                      "quenched runs need a static market; use the growing-market simulation for ramps");
  }
  const std::size_t n_rec = recorded_samples(cfg);
  if (n_rec < 2) throw ConfigError("sim.steps", "records fewer than two samples per agent");
  const std::size_t batches = std::min<std::size_t>(50, n_rec);

  QuenchedResult out;
  out.agents.reserve(static_cast<std::size_t>(pop.count));
  if (keep_samples) out.per_agent.reserve(static_cast<std::size_t>(pop.count));

  std::vector<double> buffer;
  for (std::int64_t i = 0; i < pop.count; ++i) {
    RandomStream rng(cfg.seed, static_cast<std::uint64_t>(i), StreamDomain::Agent);
    const double mu = pop.capacity_law.sample(rng, pop.capacity_floor);
    const double lambda = 1.0 - mu;
    const std::int64_t warmup = cfg.burn_in ? 0 : default_burn_in(lambda);

    BatchMeans acc(n_rec, batches);
    buffer.clear();
    double wealth = pop.initial_wealth;
    run_agent(wealth, noise, warmup, cfg.steps, cfg.burn_in, cfg.stride, rng,
              [lambda] { return lambda; },
              [&](double x) {
                acc.add(x);
                if (keep_samples) buffer.push_back(x);
              });
    out.agents.push_back({mu, acc.mean(), acc.standard_error(), acc.count()});
    if (keep_samples) out.per_agent.emplace_back(buffer);
  }
  return out;
}

EmpiricalDistribution simulate_annealed(const PopulationSpec& pop,
                                        const NoiseSpec& noise,
                                        const SimConfig& cfg) {
  pop.validate();
  noise.validate();
  cfg.validate();
  if (!noise.is_static()) {
    throw ConfigError("noise.schedule", "annealed runs need a static market");
  }
  std::vector<double> samples;
  samples.reserve(static_cast<std::size_t>(pop.count) * recorded_samples(cfg));
  for (std::int64_t i = 0; i < pop.count; ++i) {
    RandomStream rng(cfg.seed, static_cast<std::uint64_t>(i), StreamDomain::Agent);
    const std::int64_t warmup = cfg.burn_in ? 0 : 40;
    double wealth = pop.initial_wealth;
    run_agent(wealth, noise, warmup, cfg.steps, cfg.burn_in, cfg.stride, rng,
              [&rng] { return rng.uniform(); },
              [&](double x) { samples.push_back(x); });
  }
  return EmpiricalDistribution(std::move(samples));
}

EmpiricalDistribution simulate_snapshot(const PopulationSpec& pop,
                                        const NoiseSpec& noise, std::int64_t steps,
                                        std::uint64_t seed) {
  pop.validate();
  noise.validate();
  if (steps < 1) throw ConfigError("steps", "must be a positive integer");
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(pop.count));
  for (std::int64_t r = 0; r < pop.count; ++r) {
    RandomStream rng(seed, static_cast<std::uint64_t>(r), StreamDomain::Replica);
    AgentState agent{pop.initial_wealth, pop.capacity_law.sample(rng, pop.capacity_floor)};
    for (std::int64_t t = 1; t <= steps; ++t) {
      agent = ar_step(agent, sample_noise(noise, t, rng));
    }
    out.push_back(agent.wealth);
  }
  return EmpiricalDistribution(std::move(out));
}

EmpiricalDistribution simulate_growing(const PopulationSpec& pop,
                                       const NoiseSpec& noise, const SimConfig& cfg) {
  if (!noise.schedule || noise.schedule->kind != MeanSchedule::Kind::LinearRamp) {
    throw ConfigError("noise.schedule.kind", "growing markets need a linear-ramp schedule");
  }
  return simulate_snapshot(pop, noise, noise.schedule->horizon, cfg.seed);
}

Trajectory simulate_trajectory(AgentState start, const NoiseSpec& noise,
                               std::int64_t steps, RandomStream& rng) {
  Trajectory tr;
  tr.wealth.reserve(static_cast<std::size_t>(steps));
  tr.noise.reserve(static_cast<std::size_t>(steps));
  AgentState agent = start;
  for (std::int64_t t = 1; t <= steps; ++t) {
    const double xi = sample_noise(noise, t, rng);
    agent = ar_step(agent, xi);
    tr.noise.push_back(xi);
    tr.wealth.push_back(agent.wealth);
  }
  return tr;
}

}  // namespace armarket
