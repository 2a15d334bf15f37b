#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "armarket/errors.hpp"
#include "armarket/noise.hpp"
#include "armarket/random.hpp"

using namespace armarket;

namespace {

struct Sums {
  double mean = 0.0;
  double var = 0.0;
  double min = 1e300;
};

Sums draw(const NoiseSpec& spec, std::int64_t t, int n, std::uint64_t seed) {
  RandomStream rng(seed, 0, StreamDomain::Test);
  double s = 0.0, s2 = 0.0;
  Sums out;
  for (int k = 0; k < n; ++k) {
    const double x = sample_noise(spec, t, rng);
    s += x;
    s2 += x * x;
    out.min = std::min(out.min, x);
  }
  out.mean = s / n;
  out.var = s2 / n - out.mean * out.mean;
  return out;
}

}  // namespace

TEST_CASE("exponential draws recover mean and variance") {
  const int n = 1000000;
  const auto s = draw(NoiseSpec::exponential(1.0), 1, n, 7);
  const double se = 1.0 / std::sqrt(n);
  CHECK(std::abs(s.mean - 1.0) < 4 * se);
  // Var of the sample variance of Exp(1) is (mu4 - sigma^4)/n = 8/n.
  CHECK(std::abs(s.var - 1.0) < 4 * std::sqrt(8.0 / n));
  CHECK(s.min > 0.0);
}

TEST_CASE("gaussian draws recover mean and std") {
  const int n = 1000000;
  const auto s = draw(NoiseSpec::gaussian(1.0, 2.0), 1, n, 8);
  CHECK(std::abs(s.mean - 1.0) < 4 * 2.0 / std::sqrt(n));
  CHECK(std::abs(std::sqrt(s.var) - 2.0) < 0.01);
  // Untruncated: negative returns occur.
  CHECK(s.min < 0.0);
}

TEST_CASE("linear ramp reaches the static mean at the horizon") {
  auto spec = NoiseSpec::exponential(1.0);
  spec.schedule = MeanSchedule::linear_ramp(200);
  CHECK(spec.mean_at(200) == doctest::Approx(1.0));
  CHECK(spec.mean_at(100) == doctest::Approx(0.5));
  CHECK(spec.mean_at(1) == doctest::Approx(1.0 / 200));

  const int n = 400000;
  const auto s = draw(spec, 200, n, 9);
  CHECK(std::abs(s.mean - 1.0) < 4.0 / std::sqrt(n));
  const auto half = draw(spec, 100, n, 10);
  CHECK(std::abs(half.mean - 0.5) < 4 * 0.5 / std::sqrt(n));
}

TEST_CASE("schedule outside its horizon throws") {
  auto spec = NoiseSpec::exponential(1.0);
  spec.schedule = MeanSchedule::linear_ramp(20);
  RandomStream rng(1, 0, StreamDomain::Test);
  CHECK_THROWS_AS(sample_noise(spec, 0, rng), ScheduleError);
  CHECK_THROWS_AS(sample_noise(spec, 21, rng), ScheduleError);
  CHECK_NOTHROW(sample_noise(spec, 20, rng));
}

TEST_CASE("constant schedule ignores t") {
  auto spec = NoiseSpec::exponential(2.0);
  spec.schedule = MeanSchedule::constant();
  CHECK(spec.mean_at(1) == 2.0);
  CHECK(spec.mean_at(123456) == 2.0);
}

TEST_CASE("invalid parameters are rejected") {
  CHECK_THROWS(NoiseSpec::exponential(0.0).validate());
  CHECK_THROWS(NoiseSpec::exponential(-1.0).validate());
  CHECK_THROWS(NoiseSpec::gaussian(1.0, 0.0).validate());
  CHECK_THROWS(NoiseSpec::gaussian(-1.0, 1.0).validate());
  auto spec = NoiseSpec::exponential(1.0);
  spec.schedule = MeanSchedule::linear_ramp(0);
  CHECK_THROWS(spec.validate());
}

TEST_CASE("streams are reproducible and distinct") {
  RandomStream a(42, 3), b(42, 3), c(42, 4), d(42, 3, StreamDomain::Kinetic);
  const auto spec = NoiseSpec::exponential(1.0);
  bool differ_replica = false, differ_domain = false;
  for (int k = 0; k < 100; ++k) {
    const double x = sample_noise(spec, 1, a);
    CHECK(x == sample_noise(spec, 1, b));
    differ_replica |= x != sample_noise(spec, 1, c);
    differ_domain |= x != sample_noise(spec, 1, d);
  }
  CHECK(differ_replica);
  CHECK(differ_domain);
}

TEST_CASE("uniform stays in the open unit interval") {
  RandomStream rng(0, 0, StreamDomain::Test);
  for (int k = 0; k < 100000; ++k) {
    const double u = rng.uniform();
    REQUIRE(u > 0.0);
    REQUIRE(u < 1.0);
  }
}

TEST_CASE("names round-trip") {
  CHECK(parse_noise_family(to_string(NoiseFamily::Gaussian)) == NoiseFamily::Gaussian);
  CHECK(parse_schedule_kind(to_string(MeanSchedule::Kind::LinearRamp)) ==
        MeanSchedule::Kind::LinearRamp);
  CHECK_THROWS(parse_noise_family("cauchy"));
}
