#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "armarket/estimation.hpp"
#include "armarket/noise.hpp"
#include "armarket/random.hpp"

namespace armarket {

struct AgentState {
  double wealth = 1.0;
  // Investment capacity mu in (0, 1]; savings lambda = 1 - mu.
  double capacity = 1.0;

  double savings() const { return 1.0 - capacity; }
};

// x <- (1 - mu) x + xi
inline AgentState ar_step(const AgentState& agent, double xi) {
  return {(1.0 - agent.capacity) * agent.wealth + xi, agent.capacity};
}

// Distribution g(mu) of investment capacities across a population.
struct CapacityLaw {
  enum class Kind { Uniform01, PowerAlpha, Constant };

  Kind kind = Kind::Constant;
  double alpha = 0.0;  // PowerAlpha: g(mu) ~ mu^alpha
  double mu = 1.0;     // Constant

  static CapacityLaw uniform01() { return {Kind::Uniform01, 0.0, 1.0}; }
  static CapacityLaw power_alpha(double alpha) { return {Kind::PowerAlpha, alpha, 1.0}; }
  static CapacityLaw constant(double mu) { return {Kind::Constant, 0.0, mu}; }

  void validate() const;

  // Draw on (floor, 1]; Constant ignores the floor.
  double sample(RandomStream& rng, double floor) const;

  // Normalized density on (floor, 1]. Constant has no density (DomainError).
  double density(double capacity, double floor) const;

  // Smallest capacity the law can produce.
  double min_capacity(double floor) const { return kind == Kind::Constant ? mu : floor; }
};

std::string_view to_string(CapacityLaw::Kind kind);
CapacityLaw::Kind parse_capacity_kind(std::string_view name);

struct PopulationSpec {
  std::int64_t count = 1;
  CapacityLaw capacity_law;
  double initial_wealth = 1.0;
  // mu_min for the continuous laws.
  double capacity_floor = 1e-3;

  void validate() const;
};

// Sampling protocol of a run.
//
// With an explicit burn_in, every agent performs `steps` updates and the
// ones after `burn_in` are recorded at `stride`. Without one, each agent
// first performs default_burn_in(its savings) unrecorded updates and then
// `steps` recorded-phase updates.
struct SimConfig {
  std::int64_t steps = 100000;
  std::optional<std::int64_t> burn_in;
  std::int64_t stride = 1;
  std::uint64_t seed = 1;

  void validate() const;
};

// 20 e-foldings of the slowest geometric mode lambda^n.
std::int64_t default_burn_in(double max_savings);

// Number of samples recorded for an agent under `cfg`.
std::size_t recorded_samples(const SimConfig& cfg);

struct AgentSummary {
  double capacity = 1.0;
  double mean = 0.0;
  double std_err = 0.0;  // batch means
  std::size_t samples = 0;
};

struct QuenchedResult {
  std::vector<AgentSummary> agents;
  // One entry per agent when samples were kept, empty otherwise.
  std::vector<EmpiricalDistribution> per_agent;

  EmpiricalDistribution pooled() const;
  // Per-agent long-run means as a distribution (the w_i of a population).
  EmpiricalDistribution mean_wealth() const;
};

// Independent agents in a static market. Agent i owns the stream
// (seed, i); it draws its capacity first and its noise afterwards, so any
// agent can be re-simulated alone. Throws ConfigError for a ramp schedule.
QuenchedResult simulate_quenched(const PopulationSpec& pop, const NoiseSpec& noise,
                                 const SimConfig& cfg, bool keep_samples = true);

// Savings redrawn uniformly on (0, 1) at every step for every agent.
// Samples are pooled in agent order. Default burn-in is 40 steps.
EmpiricalDistribution simulate_annealed(const PopulationSpec& pop,
                                        const NoiseSpec& noise,
                                        const SimConfig& cfg);

// Ensemble of pop.count independent replicas evolved for `steps` updates
// (t = 1..steps) from pop.initial_wealth; returns the wealth at the final
// step across replicas.
EmpiricalDistribution simulate_snapshot(const PopulationSpec& pop,
                                        const NoiseSpec& noise, std::int64_t steps,
                                        std::uint64_t seed);

// Growing market: simulate_snapshot up to the ramp horizon T. Only
// cfg.seed is used. Throws ConfigError unless the schedule is a LinearRamp.
EmpiricalDistribution simulate_growing(const PopulationSpec& pop,
                                       const NoiseSpec& noise, const SimConfig& cfg);

struct Trajectory {
  std::vector<double> wealth;  // x(1)..x(steps)
  std::vector<double> noise;   // xi(1)..xi(steps)
};

// Single agent path with the noise sequence retained for replay.
Trajectory simulate_trajectory(AgentState start, const NoiseSpec& noise,
                               std::int64_t steps, RandomStream& rng);

}  // namespace armarket
