#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "armarket/random.hpp"

namespace armarket {

enum class NoiseFamily { Exponential, Gaussian };

std::string_view to_string(NoiseFamily family);
NoiseFamily parse_noise_family(std::string_view name);

// Time profile of the market mean a(t).
struct MeanSchedule {
  enum class Kind { Constant, LinearRamp };

  Kind kind = Kind::Constant;
  // T. For LinearRamp a(t) = t / T on 1 <= t <= T.
  std::int64_t horizon = 1;

  static MeanSchedule constant() { return {}; }
  static MeanSchedule linear_ramp(std::int64_t horizon) {
    return {Kind::LinearRamp, horizon};
  }

  void validate() const;

  // Mean at step t given the static mean. Constant ignores t; LinearRamp
  // throws ScheduleError outside 1..horizon.
  double mean_at(double static_mean, std::int64_t t) const;
};

std::string_view to_string(MeanSchedule::Kind kind);
MeanSchedule::Kind parse_schedule_kind(std::string_view name);

// Distribution h(xi) of the market return. Immutable once built; freely
// shared between replicas.
struct NoiseSpec {
  NoiseFamily family = NoiseFamily::Exponential;
  double mean = 1.0;
  // Gaussian standard deviation. Ignored for Exponential, whose std equals
  // its mean.
  double std = 1.0;
  std::optional<MeanSchedule> schedule;

  static NoiseSpec exponential(double mean = 1.0) {
    return {NoiseFamily::Exponential, mean, mean, std::nullopt};
  }
  static NoiseSpec gaussian(double mean, double std) {
    return {NoiseFamily::Gaussian, mean, std, std::nullopt};
  }

  void validate() const;

  bool is_static() const {
    return !schedule || schedule->kind == MeanSchedule::Kind::Constant;
  }

  double mean_at(std::int64_t t) const {
    return schedule ? schedule->mean_at(mean, t) : mean;
  }
  double std_at(std::int64_t t) const {
    return family == NoiseFamily::Exponential ? mean_at(t) : std;
  }
};

// One draw of xi(t). Gaussian draws are not truncated: negative returns
// (debt) are part of the model.
double sample_noise(const NoiseSpec& spec, std::int64_t t, RandomStream& rng);

}  // namespace armarket
