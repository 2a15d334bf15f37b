#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "armarket/ar_dynamics.hpp"
#include "armarket/estimation.hpp"

namespace armarket {

// ---------------------------------------------------------------------------
// Pairwise trade rules. All of them conserve xi + xj and keep non-negative
// wealth non-negative.
// ---------------------------------------------------------------------------

struct PairWealth {
  double xi = 0.0;
  double xj = 0.0;
};

// Heterogeneous savings: both agents keep lambda x and share the pooled
// rest T = (1 - li) xi + (1 - lj) xj in proportions r : 1 - r.
PairWealth ccm_trade(double xi, double xj, double li, double lj, double r);

// Common savings lambda for both agents.
PairWealth cc_trade(double xi, double xj, double lambda, double r);

// The effective additive noise seen by agent i in a trade.
struct TradeRecord {
  double noise_value = 0.0;
};

struct GenericTrade {
  PairWealth wealth;
  TradeRecord record;  // eta * xj
};

// xi' = lambda xi + eta xj, xj' = (1 - lambda) xi + (1 - eta) xj.
GenericTrade generic_trade(double xi, double xj, double lambda, double eta);

// eta = lambda case: xi' = lambda (xi + xj).
PairWealth yakovenko_trade(double xi, double xj, double lambda);

// ---------------------------------------------------------------------------
// Population simulation
// ---------------------------------------------------------------------------

struct KineticModel {
  enum class Kind { CCM, CC, GenericTwoNoise, Yakovenko };

  Kind kind = Kind::CC;
  // CC: the shared savings.
  double lambda = 0.0;
  // CCM: savings are 1 - mu with mu drawn from this law (floor applies, so
  // lambda < 1 - floor). Drawn once at initialization.
  CapacityLaw savings_law = CapacityLaw::uniform01();
  double savings_floor = 1e-3;

  static KineticModel ccm() { return {Kind::CCM}; }
  static KineticModel cc(double lambda) { return {Kind::CC, lambda}; }
  static KineticModel generic() { return {Kind::GenericTwoNoise}; }
  static KineticModel yakovenko() { return {Kind::Yakovenko}; }

  void validate() const;
};

std::string_view to_string(KineticModel::Kind kind);
KineticModel::Kind parse_kinetic_kind(std::string_view name);

struct TaggedAgent {
  std::size_t index = 0;
  // CCM only: overrides the tagged agent's drawn savings.
  std::optional<double> savings;
};

struct KineticOptions {
  std::optional<TaggedAgent> tagged;
  bool record_pooled = true;
  bool record_noise = true;
};

// Run protocol in sweeps (one sweep = N trades). burn_in and stride are in
// sweeps; with no explicit burn_in, 20 / (1 - lambda_max) sweeps are added
// in front of `steps`, as for the AR runs.
struct KineticResult {
  // All agents' wealth at every recorded sweep end, sweep-major.
  EmpiricalDistribution pooled;
  // Tagged agent's wealth at every recorded sweep end.
  std::optional<EmpiricalDistribution> tagged;
  // noise_value of every post-burn-in trade (as seen by the first agent of
  // the pair).
  EmpiricalDistribution noise;
  // Noise received by the tagged agent in its own trades.
  std::optional<EmpiricalDistribution> tagged_noise;

  std::vector<double> savings;      // per agent (lambda_i)
  std::vector<double> mean_wealth;  // per agent, over recorded sweeps
  double initial_total = 0.0;
  double final_total = 0.0;
  std::uint64_t trades = 0;
};

// Pair selection: an ordered pair (i, j), i != j, uniformly at random with
// replacement across trades. Agent order in the pair is random, so the r
// and 1 - r roles are symmetric. Initial wealth is total_wealth / N each.
// Throws ConfigError for N < 2.
KineticResult simulate_kinetic(const KineticModel& model, std::size_t agents,
                               double total_wealth, const SimConfig& cfg,
                               const KineticOptions& options = {});

struct WealthProfileEntry {
  double savings = 0.0;
  double mean_wealth = 0.0;
};

// Long-run per-agent mean wealth against savings in a CCM population with
// total wealth N, sorted by savings.
std::vector<WealthProfileEntry> ccm_average_wealth_profile(std::size_t agents,
                                                           const CapacityLaw& savings_law,
                                                           const SimConfig& cfg);

}  // namespace armarket
