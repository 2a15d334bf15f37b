#include "armarket/kinetic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "armarket/errors.hpp"

namespace armarket {

PairWealth ccm_trade(double xi, double xj, double li, double lj, double r) {
  const double pool = (1.0 - li) * xi + (1.0 - lj) * xj;
  return {li * xi + r * pool, lj * xj + (1.0 - r) * pool};
}

PairWealth cc_trade(double xi, double xj, double lambda, double r) {
  const double pool = (1.0 - lambda) * (xi + xj);
  return {lambda * xi + r * pool, lambda * xj + (1.0 - r) * pool};
}

GenericTrade generic_trade(double xi, double xj, double lambda, double eta) {
  return {{lambda * xi + eta * xj, (1.0 - lambda) * xi + (1.0 - eta) * xj},
          {eta * xj}};
}

PairWealth yakovenko_trade(double xi, double xj, double lambda) {
  const double total = xi + xj;
  return {lambda * total, (1.0 - lambda) * total};
}

std::string_view to_string(KineticModel::Kind kind) {
  switch (kind) {
    case KineticModel::Kind::CCM:
      return "ccm";
    case KineticModel::Kind::CC:
      return "cc";
    case KineticModel::Kind::GenericTwoNoise:
      return "generic";
    case KineticModel::Kind::Yakovenko:
      return "yakovenko";
  }
  return "?";
}

KineticModel::Kind parse_kinetic_kind(std::string_view name) {
  if (name == "ccm") return KineticModel::Kind::CCM;
  if (name == "cc") return KineticModel::Kind::CC;
  if (name == "generic") return KineticModel::Kind::GenericTwoNoise;
  if (name == "yakovenko") return KineticModel::Kind::Yakovenko;
  throw ConfigError("kinetic.model", "unknown model '" + std::string(name) +
                                         "' (expected ccm|cc|generic|yakovenko)");
}

void KineticModel::validate() const {
  if (kind == Kind::CC && !(lambda >= 0.0 && lambda < 1.0)) {
    throw ConfigError("kinetic.lambda", "must lie in [0, 1)");
  }
  if (kind == Kind::CCM) {
    if (!(savings_floor > 0.0 && savings_floor < 1.0)) {
      throw ConfigError("kinetic.savings_floor", "must lie in (0, 1)");
    }
    savings_law.validate();
  }
}

namespace {

struct TradeStep {
  PairWealth wealth;
  double noise_i;
  double noise_j;
};

}  // namespace

KineticResult simulate_kinetic(const KineticModel& model, std::size_t agents,
                               double total_wealth, const SimConfig& cfg,
                               const KineticOptions& options) {
  model.validate();
  cfg.validate();
  if (agents < 2) throw ConfigError("kinetic.agents", "needs at least two agents");
  if (!(total_wealth >= 0.0) || !std::isfinite(total_wealth)) {
    throw ConfigError("kinetic.total_wealth", "must be a non-negative finite number");
  }
  if (options.tagged && options.tagged->index >= agents) {
    throw ConfigError("kinetic.tagged.index", "outside the population");
  }
  if (options.tagged && options.tagged->savings &&
      !(*options.tagged->savings >= 0.0 && *options.tagged->savings < 1.0)) {
    throw ConfigError("kinetic.tagged.savings", "must lie in [0, 1)");
  }

  RandomStream rng(cfg.seed, 0, StreamDomain::Kinetic);
  KineticResult out;
  out.savings.assign(agents, model.kind == KineticModel::Kind::CC ? model.lambda : 0.0);
  if (model.kind == KineticModel::Kind::CCM) {
    for (auto& l : out.savings) l = 1.0 - model.savings_law.sample(rng, model.savings_floor);
    if (options.tagged && options.tagged->savings) {
      out.savings[options.tagged->index] = *options.tagged->savings;
    }
  }

  std::vector<double> x(agents, total_wealth / static_cast<double>(agents));
  out.initial_total = std::accumulate(x.begin(), x.end(), 0.0);

  double lambda_max = 0.5;
  if (model.kind == KineticModel::Kind::CC || model.kind == KineticModel::Kind::CCM) {
    lambda_max = *std::max_element(out.savings.begin(), out.savings.end());
  }
  const std::int64_t warmup = cfg.burn_in ? 0 : default_burn_in(lambda_max);
  const std::int64_t skip = cfg.burn_in.value_or(0);
  const std::int64_t total_sweeps = warmup + cfg.steps;
  const std::size_t recorded = recorded_samples(cfg);

  std::vector<double> pooled;
  std::vector<double> noise;
  std::vector<double> tagged;
  std::vector<double> tagged_noise;
  if (options.record_pooled) pooled.reserve(recorded * agents);
  if (options.record_noise) noise.reserve(recorded * cfg.stride * agents);
  if (options.tagged) tagged.reserve(recorded);
  std::vector<double> wealth_sum(agents, 0.0);
  std::size_t recorded_sweeps = 0;

  const auto n = static_cast<std::uint64_t>(agents);
  const std::size_t tag = options.tagged ? options.tagged->index : agents;

  auto trade = [&](std::size_t i, std::size_t j) -> TradeStep {
    const double xi = x[i];
    const double xj = x[j];
    switch (model.kind) {
      case KineticModel::Kind::CCM: {
        const double r = rng.uniform();
        const double pool = (1.0 - out.savings[i]) * xi + (1.0 - out.savings[j]) * xj;
        return {ccm_trade(xi, xj, out.savings[i], out.savings[j], r), r * pool,
                (1.0 - r) * pool};
      }
      case KineticModel::Kind::CC: {
        const double r = rng.uniform();
        const double pool = (1.0 - model.lambda) * (xi + xj);
        return {cc_trade(xi, xj, model.lambda, r), r * pool, (1.0 - r) * pool};
      }
      case KineticModel::Kind::GenericTwoNoise: {
        const double lambda = rng.uniform();
        const double eta = rng.uniform();
        const GenericTrade g = generic_trade(xi, xj, lambda, eta);
        return {g.wealth, g.record.noise_value, (1.0 - lambda) * xi};
      }
      case KineticModel::Kind::Yakovenko: {
        const double lambda = rng.uniform();
        return {yakovenko_trade(xi, xj, lambda), lambda * xj, (1.0 - lambda) * xi};
      }
    }
    return {{xi, xj}, 0.0, 0.0};
  };

  for (std::int64_t sweep = 1; sweep <= total_sweeps; ++sweep) {
    const std::int64_t t = sweep - warmup;  // recorded-phase sweep index
    const bool after_burn_in = t > skip;
    for (std::size_t k = 0; k < agents; ++k) {
      const auto i = static_cast<std::size_t>(rng.index(n));
      auto j = static_cast<std::size_t>(rng.index(n - 1));
      if (j >= i) ++j;
      const TradeStep step = trade(i, j);
      x[i] = step.wealth.xi;
      x[j] = step.wealth.xj;
      ++out.trades;
      if (after_burn_in) {
        if (options.record_noise) noise.push_back(step.noise_i);
        if (i == tag) tagged_noise.push_back(step.noise_i);
        if (j == tag) tagged_noise.push_back(step.noise_j);
      }
    }
    if (after_burn_in && (t - skip) % cfg.stride == 0) {
      ++recorded_sweeps;
      for (std::size_t a = 0; a < agents; ++a) wealth_sum[a] += x[a];
      if (options.record_pooled) pooled.insert(pooled.end(), x.begin(), x.end());
      if (options.tagged) tagged.push_back(x[tag]);
    }
  }

  out.final_total = std::accumulate(x.begin(), x.end(), 0.0);
  out.mean_wealth.resize(agents);
  for (std::size_t a = 0; a < agents; ++a) {
    out.mean_wealth[a] =
        recorded_sweeps ? wealth_sum[a] / static_cast<double>(recorded_sweeps) : 0.0;
  }
  out.pooled = EmpiricalDistribution(std::move(pooled));
  out.noise = EmpiricalDistribution(std::move(noise));
  if (options.tagged) {
    out.tagged = EmpiricalDistribution(std::move(tagged));
    out.tagged_noise = EmpiricalDistribution(std::move(tagged_noise));
  }
  return out;
}

std::vector<WealthProfileEntry> ccm_average_wealth_profile(std::size_t agents,
                                                           const CapacityLaw& savings_law,
                                                           const SimConfig& cfg) {
  KineticModel model = KineticModel::ccm();
  model.savings_law = savings_law;
  KineticOptions options;
  options.record_pooled = false;
  options.record_noise = false;
  const KineticResult run =
      simulate_kinetic(model, agents, static_cast<double>(agents), cfg, options);
  std::vector<WealthProfileEntry> profile(agents);
  for (std::size_t a = 0; a < agents; ++a) {
    profile[a] = {run.savings[a], run.mean_wealth[a]};
  }
  std::sort(profile.begin(), profile.end(),
            [](const auto& l, const auto& r) { return l.savings < r.savings; });
  return profile;
}

}  // namespace armarket
