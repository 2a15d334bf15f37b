#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "armarket/analytics.hpp"
#include "armarket/errors.hpp"
#include "armarket/estimation.hpp"
#include "armarket/random.hpp"

using namespace armarket;

// Reference values below come from a direct product evaluation in double
// precision with 200 factors, independent of the log-magnitude code path.

TEST_CASE("series coefficients at lambda = 0.4, four terms") {
  const auto s = series_coefficients(0.4, 4);
  const std::vector<double> expected = {2.2130721483139317, -3.68845358052322,
                                        1.7564064669158181, -0.30024042169501175};
  for (std::size_t m = 0; m < 4; ++m) {
    CHECK(s.coefficients[m] == doctest::Approx(expected[m]).epsilon(1e-12));
    CHECK(s.scales[m] == doctest::Approx(std::pow(0.4, m)));
  }
  // Four terms are not yet converged: P(0) and the mass are visibly off.
  CHECK(s.boundary_sum() == doctest::Approx(-0.01921538698848202).epsilon(1e-9));
  CHECK(s.normalization_sum() - 1.0 == doctest::Approx(-4.996361773064e-4).epsilon(1e-6));
  CHECK(s.mean_sum() == doctest::Approx(1.6666537962159984).epsilon(1e-12));
}

TEST_CASE("series invariants converge at twelve terms") {
  for (double lambda : {0.2, 0.4, 0.6}) {
    CAPTURE(lambda);
    const auto s = series_coefficients(lambda, 12);
    CHECK(std::abs(s.boundary_sum()) < 1e-6);
    CHECK(std::abs(s.normalization_sum() - 1.0) < 1e-6);
    CHECK(std::abs(s.mean_sum() - 1.0 / (1.0 - lambda)) < 1e-5);
    for (std::size_t m = 0; m < 12; ++m) {
      CHECK((s.coefficients[m] > 0) == (m % 2 == 0));
    }
  }
}

TEST_CASE("series density value") {
  const auto s = series_coefficients(0.5, 12);
  CHECK(series_pdf(s, 1.0).raw == doctest::Approx(0.420730421531672).epsilon(1e-9));
  CHECK_THROWS_AS(series_pdf(s, -0.1), DomainError);
}

TEST_CASE("low orders are clamped near the origin") {
  const auto s = series_coefficients(0.4, 4);
  const auto v = series_pdf(s, 0.0);
  CHECK(v.raw < 0.0);
  CHECK(v.clamped);
  CHECK(v.density == 0.0);
  CHECK_FALSE(series_pdf(s, 1.0).clamped);
}

TEST_CASE("series cdf is monotone and bounded") {
  for (std::size_t order : {4u, 12u}) {
    const auto s = series_coefficients(0.4, order);
    double prev = 0.0;
    for (int k = 0; k <= 2000; ++k) {
      const double f = series_cdf(s, 0.01 * k);
      REQUIRE(f >= prev);
      REQUIRE(f <= 1.0);
      prev = f;
    }
    CHECK(prev > 0.999);
  }
}

TEST_CASE("series rejects ill-conditioned savings") {
  CHECK_THROWS_AS(series_coefficients(0.95, 12), DomainError);
  CHECK_THROWS_AS(series_coefficients(0.0, 12), DomainError);
  CHECK_THROWS_AS(series_coefficients(0.5, 0), DomainError);
  CHECK_NOTHROW(series_coefficients(0.9, 12));
}

TEST_CASE("convolution recursion agrees with the series") {
  for (double lambda : {0.2, 0.4, 0.6}) {
    CAPTURE(lambda);
    const auto levels = convolution_recursion(NoiseSpec::exponential(1.0), lambda, 40);
    const auto s = series_coefficients(lambda, 12);
    const auto& p = levels.back();
    double gap = 0.0;
    for (std::size_t k = 0; k < p.grid.size(); ++k) {
      gap = std::max(gap, std::abs(p.density[k] - series_pdf(s, p.grid[k]).raw));
    }
    CHECK(gap < 1e-3);
    CHECK(p.integral() == doctest::Approx(1.0).epsilon(1e-3));
  }
}

TEST_CASE("recursion base cases") {
  const auto levels = convolution_recursion(NoiseSpec::exponential(1.0), 0.5, 3);
  REQUIRE(levels.size() == 4);
  const auto& p0 = levels[0];
  for (std::size_t k = 0; k < p0.grid.size(); k += 97) {
    CHECK(p0.density[k] == doctest::Approx(std::exp(-p0.grid[k])));
  }
  CHECK(levels[1].density[0] == 0.0);
  // P_1 for scales 1 and 1/2: 2 (e^-x - e^-2x).
  const auto& p1 = levels[1];
  for (std::size_t k = 1; k < p1.grid.size(); k += 101) {
    const double x = p1.grid[k];
    CHECK(p1.density[k] == doctest::Approx(2.0 * (std::exp(-x) - std::exp(-2.0 * x))).epsilon(1e-3));
  }
}

TEST_CASE("recursion domain checks") {
  GridSpec short_grid;
  short_grid.x_max = 10.0;
  CHECK_THROWS_AS(convolution_recursion(NoiseSpec::exponential(1.0), 0.6, 4, short_grid),
                  DomainError);
  CHECK_THROWS_AS(convolution_recursion(NoiseSpec::gaussian(1.0, 1.0), 0.6, 4), DomainError);
  GridSpec coarse;
  coarse.points = 8;
  CHECK_THROWS_AS(convolution_recursion(NoiseSpec::exponential(1.0), 0.4, 4, coarse),
                  ResolutionError);
}

TEST_CASE("gaussian fixed point") {
  const auto g = gaussian_fixed_point(1.0, 1.0, 0.5);
  CHECK(g.mean == doctest::Approx(2.0));
  CHECK(g.std == doctest::Approx(1.1547005383792515));
  CHECK_THROWS_AS(gaussian_fixed_point(1.0, 1.0, 1.0), DomainError);
  CHECK(normal_cdf(2.0, 2.0, 1.0) == doctest::Approx(0.5));
  CHECK(normal_cdf(1.0, 0.0, 1.0) == doctest::Approx(0.8413447460685429));
}

TEST_CASE("gamma family") {
  CHECK(gamma_pdf(2.0, 1.0) == doctest::Approx(std::exp(-1.0)));
  CHECK(gamma_pdf(1.0, 0.0) == 1.0);
  CHECK(gamma_cdf(2.0, 1.0) == doctest::Approx(1.0 - 2.0 * std::exp(-1.0)));
  CHECK(gamma_cdf(1.0, 3.0) == doctest::Approx(1.0 - std::exp(-3.0)));
  CHECK(cc_gamma_shape(0.5) == doctest::Approx(4.0));
  CHECK(cc_gamma_shape(0.0) == doctest::Approx(1.0));
}

TEST_CASE("pareto density integrates to one") {
  for (const auto& law : {CapacityLaw::uniform01(), CapacityLaw::power_alpha(0.5)}) {
    // Substitute w = e^u to cover three decades.
    double s = 0.0;
    const int n = 200000;
    const double lo = 0.0, hi = std::log(1e3);
    const double h = (hi - lo) / n;
    for (int k = 0; k < n; ++k) {
      const double w = std::exp(lo + (k + 0.5) * h);
      s += pareto_density(law, 1.0, w) * w * h;
    }
    CHECK(s == doctest::Approx(1.0).epsilon(1e-4));
  }
  CHECK(pareto_density(CapacityLaw::uniform01(), 1.0, 0.5) == 0.0);
  // Uniform capacities: P(w) = 1/w^2 (up to the floor normalization).
  CHECK(pareto_density(CapacityLaw::uniform01(), 1.0, 10.0) ==
        doctest::Approx(0.01 / (1.0 - 1e-3)));
}

TEST_CASE("annealed lemmas") {
  // Uniform lambda times a Gamma(2) variable is exponential; adding an
  // independent exponential returns Gamma(2). Hence Gamma(2) is stationary.
  RandomStream rng(3, 0, StreamDomain::Test);
  std::vector<double> sum;
  std::vector<double> scaled_uniform;
  const int n = 400000;
  for (int k = 0; k < n; ++k) {
    const double x = rng.exponential(1.0) + rng.exponential(1.0);  // Gamma(2)
    const double lambda = rng.uniform();
    scaled_uniform.push_back(lambda * x);
    sum.push_back(lambda * x + rng.exponential(1.0));
  }
  const Cdf expo = [](double x) { return x <= 0 ? 0.0 : -std::expm1(-x); };
  const Cdf gam2 = [](double x) { return gamma_cdf(2.0, x); };
  CHECK(ks_distance(EmpiricalDistribution(scaled_uniform), expo) < ks_critical_999(n));
  CHECK(ks_distance(EmpiricalDistribution(sum), gam2) < ks_critical_999(n));
}
