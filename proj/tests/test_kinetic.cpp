#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "armarket/errors.hpp"
#include "armarket/estimation.hpp"
#include "armarket/kinetic.hpp"

using namespace armarket;

TEST_CASE("trade rules on worked examples") {
  auto ccm = ccm_trade(2.0, 0.0, 0.4, 0.9, 0.25);
  CHECK(ccm.xi == doctest::Approx(1.1));
  CHECK(ccm.xj == doctest::Approx(0.9));

  auto cc = cc_trade(3.0, 1.0, 0.5, 0.5);
  CHECK(cc.xi == doctest::Approx(2.5));
  CHECK(cc.xj == doctest::Approx(1.5));

  auto g = generic_trade(2.0, 4.0, 0.5, 0.25);
  CHECK(g.wealth.xi == doctest::Approx(2.0));
  CHECK(g.wealth.xj == doctest::Approx(4.0));
  CHECK(g.record.noise_value == doctest::Approx(1.0));

  auto y = yakovenko_trade(1.0, 3.0, 0.25);
  CHECK(y.xi == doctest::Approx(1.0));
  CHECK(y.xj == doctest::Approx(3.0));
}

TEST_CASE("every rule conserves the pair and keeps wealth non-negative") {
  RandomStream rng(1, 0, StreamDomain::Test);
  for (int k = 0; k < 100000; ++k) {
    const double xi = rng.exponential(1.0) * (k % 7 == 0 ? 0.0 : 1.0);
    const double xj = rng.exponential(3.0);
    const double l1 = rng.uniform(), l2 = rng.uniform(), r = rng.uniform();
    const double total = xi + xj;
    for (const PairWealth p : {ccm_trade(xi, xj, l1, l2, r), cc_trade(xi, xj, l1, r),
                               generic_trade(xi, xj, l1, l2).wealth,
                               yakovenko_trade(xi, xj, l1)}) {
      REQUIRE(std::abs(p.xi + p.xj - total) <= 1e-12 * std::max(total, 1e-300));
      REQUIRE(p.xi >= 0.0);
      REQUIRE(p.xj >= 0.0);
    }
  }
}

TEST_CASE("swapping r and the agent order mirrors the trade") {
  const auto a = ccm_trade(2.0, 5.0, 0.3, 0.7, 0.2);
  const auto b = ccm_trade(5.0, 2.0, 0.7, 0.3, 0.8);
  CHECK(a.xi == doctest::Approx(b.xj));
  CHECK(a.xj == doctest::Approx(b.xi));
}

TEST_CASE("fewer than two agents is a configuration error") {
  SimConfig cfg;
  cfg.steps = 10;
  CHECK_THROWS_AS(simulate_kinetic(KineticModel::cc(0.5), 1, 1.0, cfg), ConfigError);
}

TEST_CASE("population totals are conserved") {
  SimConfig cfg;
  cfg.steps = 2000;
  cfg.seed = 4;
  for (const auto& model : {KineticModel::ccm(), KineticModel::cc(0.4), KineticModel::generic(),
                            KineticModel::yakovenko()}) {
    const auto r = simulate_kinetic(model, 50, 50.0, cfg);
    CHECK(std::abs(r.final_total - r.initial_total) < 1e-9 * r.initial_total);
    CHECK(r.pooled.count() == 2000u * 50u);
    CHECK(r.pooled.sorted().front() >= 0.0);
  }
}

TEST_CASE("yakovenko steady state is exponential") {
  SimConfig cfg;
  cfg.steps = 20000;
  cfg.seed = 12;
  const auto r = simulate_kinetic(KineticModel::yakovenko(), 100, 100.0, cfg,
                                  {std::nullopt, true, false});
  const double ks = ks_distance(r.pooled, [](double x) { return x <= 0 ? 0.0 : -std::expm1(-x); });
  CHECK(ks < 0.01);
}

TEST_CASE("cc with zero savings is exponential") {
  SimConfig cfg;
  cfg.steps = 20000;
  cfg.seed = 13;
  const auto r = simulate_kinetic(KineticModel::cc(0.0), 100, 100.0, cfg,
                                  {std::nullopt, true, false});
  const double ks = ks_distance(r.pooled, [](double x) { return x <= 0 ? 0.0 : -std::expm1(-x); });
  CHECK(ks < 0.01);
}

TEST_CASE("tagged agent savings override") {
  SimConfig cfg;
  cfg.steps = 100;
  cfg.seed = 2;
  KineticOptions opt;
  opt.tagged = TaggedAgent{3, 0.4};
  const auto r = simulate_kinetic(KineticModel::ccm(), 20, 20.0, cfg, opt);
  CHECK(r.savings[3] == 0.4);
  REQUIRE(r.tagged);
  CHECK(r.tagged->count() == 100);
  REQUIRE(r.tagged_noise);
  CHECK(r.tagged_noise->count() > 0);

  opt.tagged = TaggedAgent{20, std::nullopt};
  CHECK_THROWS_AS(simulate_kinetic(KineticModel::ccm(), 20, 20.0, cfg, opt), ConfigError);
}

TEST_CASE("mean wealth grows with savings in a CCM population") {
  SimConfig cfg;
  cfg.steps = 2000;
  cfg.seed = 21;
  const auto profile = ccm_average_wealth_profile(200, CapacityLaw::uniform01(), cfg);
  REQUIRE(profile.size() == 200);
  std::vector<double> s, w;
  for (const auto& e : profile) {
    s.push_back(e.savings);
    w.push_back(e.mean_wealth);
  }
  for (std::size_t k = 1; k < s.size(); ++k) REQUIRE(s[k] >= s[k - 1]);
  CHECK(rank_correlation(s, w) > 0.95);
}

TEST_CASE("kinetic runs are deterministic per seed") {
  SimConfig cfg;
  cfg.steps = 200;
  cfg.seed = 5;
  const auto a = simulate_kinetic(KineticModel::generic(), 30, 60.0, cfg);
  const auto b = simulate_kinetic(KineticModel::generic(), 30, 60.0, cfg);
  CHECK(a.pooled.samples() == b.pooled.samples());
  CHECK(a.noise.samples() == b.noise.samples());
}
