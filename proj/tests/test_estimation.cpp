#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "armarket/analytics.hpp"
#include "armarket/errors.hpp"
#include "armarket/estimation.hpp"
#include "armarket/random.hpp"

using namespace armarket;

namespace {

const Cdf kExp = [](double x) { return x <= 0 ? 0.0 : -std::expm1(-x); };

std::vector<double> exponential_draws(int n, std::uint64_t seed, double mean = 1.0) {
  RandomStream rng(seed, 0, StreamDomain::Test);
  std::vector<double> v(static_cast<std::size_t>(n));
  for (auto& x : v) x = rng.exponential(mean);
  return v;
}

}  // namespace

TEST_CASE("one sample against its own median") {
  EmpiricalDistribution e({1.0});
  CHECK(ks_distance(e, [](double x) { return x < 1.0 ? 0.0 : 0.5; }) == doctest::Approx(0.5));
  CHECK(ks_distance(e, kExp) == doctest::Approx(1.0 - std::exp(-1.0)));
}

TEST_CASE("KS between exponential and Gamma(2)") {
  // sup |e^-x (1 + x) - e^-x| = sup x e^-x = 1/e at x = 1.
  EmpiricalDistribution e(exponential_draws(200000, 1));
  CHECK(ks_distance(e, [](double x) { return gamma_cdf(2.0, x); }) ==
        doctest::Approx(std::exp(-1.0)).epsilon(0.03));
  CHECK(ks_distance(e, kExp) < ks_critical_999(2e5));
}

TEST_CASE("KS is invariant under a monotone reparameterization") {
  EmpiricalDistribution e(exponential_draws(5000, 2));
  std::vector<double> logs;
  for (double x : e.samples()) logs.push_back(std::log(x));
  EmpiricalDistribution l(logs);
  const double a = ks_distance(e, kExp);
  const double b = ks_distance(l, [](double y) { return -std::expm1(-std::exp(y)); });
  CHECK(a == doctest::Approx(b).epsilon(1e-9));
}

TEST_CASE("malformed reference CDFs are rejected") {
  EmpiricalDistribution e(exponential_draws(100, 3));
  CHECK_THROWS_AS(ks_distance(e, [](double x) { return 2.0 * x; }), ReferenceError);
  CHECK_THROWS_AS(ks_distance(e, [](double x) { return std::exp(-x); }), ReferenceError);
  CHECK_THROWS_AS(ks_distance(EmpiricalDistribution{}, kExp), DomainError);
}

TEST_CASE("two-sample KS") {
  EmpiricalDistribution a({1.0, 2.0, 3.0, 4.0});
  EmpiricalDistribution b({1.0, 2.0, 3.0, 4.0});
  EmpiricalDistribution c({10.0, 11.0});
  CHECK(ks_distance(a, b) == 0.0);
  CHECK(ks_distance(a, c) == 1.0);
  EmpiricalDistribution d({1.5, 2.5});
  CHECK(ks_distance(a, d) == doctest::Approx(0.5));  // at x = 2.5: 1/2 vs 1
}

TEST_CASE("Hill estimator on exact Pareto samples") {
  // Density w^-2 on [1, inf): w = 1 / u.
  RandomStream rng(4, 0, StreamDomain::Test);
  std::vector<double> w(1000000);
  for (auto& x : w) x = 1.0 / rng.uniform();
  EmpiricalDistribution e(w);
  const auto fit = tail_exponent(e);
  CHECK(fit.k == 100000);
  CHECK(fit.gamma_hat == doctest::Approx(2.0).epsilon(0.005));
  CHECK(fit.std_err == doctest::Approx(1.0 / std::sqrt(1e5)).epsilon(0.01));

  // Scale invariance.
  for (auto& x : w) x *= 37.0;
  CHECK(tail_exponent(EmpiricalDistribution(w)).gamma_hat ==
        doctest::Approx(fit.gamma_hat).epsilon(1e-9));

  const auto sens = tail_sensitivity(e);
  REQUIRE(sens.size() == 3);
  CHECK(sens[0].k == 50000);
  CHECK(sens[2].k == 200000);
}

TEST_CASE("Hill estimator rejects degenerate input") {
  CHECK_THROWS_AS(tail_exponent(EmpiricalDistribution(std::vector<double>(50, 1.0))), DomainError);
  CHECK_THROWS_AS(tail_exponent(EmpiricalDistribution(std::vector<double>(1000, 2.0))),
                  DomainError);
  std::vector<double> neg(1000);
  for (std::size_t k = 0; k < neg.size(); ++k) neg[k] = -static_cast<double>(k);
  CHECK_THROWS_AS(tail_exponent(EmpiricalDistribution(neg)), DomainError);
}

TEST_CASE("batch means see autocorrelation") {
  const double lambda = 0.5;
  const std::size_t n = 1000000;
  RandomStream rng(5, 0, StreamDomain::Test);
  std::vector<double> x(n);
  double w = 2.0;
  for (auto& v : x) {
    w = lambda * w + rng.exponential(1.0);
    v = w;
  }
  const auto m = moments(EmpiricalDistribution(x));
  const double ratio = m.std_err / m.std_err_iid;
  CHECK(ratio > 1.2);
  CHECK(ratio < 3.0);
  CHECK(m.mean == doctest::Approx(2.0).epsilon(0.01));
  CHECK(std::abs(m.mean - 2.0) < 5 * m.std_err);
  CHECK(ar1_effective_count(1e6, 0.5) == doctest::Approx(1e6 / 3.0));
}

TEST_CASE("constant samples have zero spread") {
  const auto m = moments(EmpiricalDistribution(std::vector<double>(1000, 3.0)));
  CHECK(m.mean == 3.0);
  CHECK(m.std == 0.0);
  CHECK(m.std_err == 0.0);
  CHECK_THROWS_AS(moments(EmpiricalDistribution({1.0, 2.0})), DomainError);
}

TEST_CASE("quantiles and empirical CDF") {
  EmpiricalDistribution e({4.0, 1.0, 3.0, 2.0});
  CHECK(e.quantile(0.0) == 1.0);
  CHECK(e.quantile(1.0) == 4.0);
  CHECK(e.quantile(0.5) == doctest::Approx(2.5));
  CHECK(e.empirical_cdf(2.0) == doctest::Approx(0.5));
  CHECK(e.empirical_cdf(0.0) == 0.0);
  CHECK(e.samples().front() == 4.0);
  CHECK(e.sorted().front() == 1.0);
}

TEST_CASE("merge keeps argument order") {
  std::vector<EmpiricalDistribution> parts{EmpiricalDistribution({3.0, 1.0}),
                                           EmpiricalDistribution({2.0})};
  const auto m = EmpiricalDistribution::merge(parts);
  CHECK(m.samples() == std::vector<double>{3.0, 1.0, 2.0});
  CHECK(m.sorted() == std::vector<double>{1.0, 2.0, 3.0});
}

TEST_CASE("histograms") {
  EmpiricalDistribution e({-1.0, 0.25, 0.75, 0.8, 5.0});
  const auto h = e.histogram(2, 0.0, 1.0);
  CHECK(h.counts == std::vector<std::uint64_t>{1, 2});
  CHECK(h.underflow == 1);
  CHECK(h.overflow == 1);
  CHECK(h.total() == 5);
  CHECK(h.density()[1] == doctest::Approx(2.0 / (5 * 0.5)));

  EmpiricalDistribution p({0.5, 5.0, 50.0, 0.0});
  const auto lh = p.log_histogram(1);
  CHECK(lh.edges.front() == doctest::Approx(0.1));
  CHECK(lh.edges.back() == doctest::Approx(100.0));
  CHECK(lh.underflow == 1);
  CHECK(lh.counts == std::vector<std::uint64_t>{1, 1, 1});
}

TEST_CASE("rank correlation") {
  const std::vector<double> a{1, 2, 3, 4, 5};
  const std::vector<double> b{10, 20, 25, 100, 1000};
  const std::vector<double> c{5, 4, 3, 2, 1};
  CHECK(rank_correlation(a, b) == doctest::Approx(1.0));
  CHECK(rank_correlation(a, c) == doctest::Approx(-1.0));
}
