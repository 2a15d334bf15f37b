#include "armarket/noise.hpp"

#include <cmath>
#include <string>

#include "armarket/errors.hpp"

namespace armarket {

std::string_view to_string(NoiseFamily family) {
  switch (family) {
    case NoiseFamily::Exponential:
      return "exponential";
    case NoiseFamily::Gaussian:
      return "gaussian";
  }
  return "?";
}

NoiseFamily parse_noise_family(std::string_view name) {
  if (name == "exponential") return NoiseFamily::Exponential;
  if (name == "gaussian") return NoiseFamily::Gaussian;
  throw ConfigError("noise.family", "unknown family '" + std::string(name) +
                                        "' (expected exponential|gaussian)");
}

std::string_view to_string(MeanSchedule::Kind kind) {
  return kind == MeanSchedule::Kind::Constant ? "constant" : "linear-ramp";
}

MeanSchedule::Kind parse_schedule_kind(std::string_view name) {
  if (name == "constant") return MeanSchedule::Kind::Constant;
  if (name == "linear-ramp") return MeanSchedule::Kind::LinearRamp;
  throw ConfigError("noise.schedule.kind",
                    "unknown schedule '" + std::string(name) +
                        "' (expected constant|linear-ramp)");
}

void MeanSchedule::validate() const {
  if (horizon < 1) {
    throw ConfigError("noise.schedule.horizon", "must be a positive integer");
  }
}

double MeanSchedule::mean_at(double static_mean, std::int64_t t) const {
  if (kind == Kind::Constant) return static_mean;
  if (t < 1 || t > horizon) {
    throw ScheduleError("time step " + std::to_string(t) +
                        " outside ramp horizon 1.." + std::to_string(horizon));
  }
  return static_cast<double>(t) / static_cast<double>(horizon);
}

void NoiseSpec::validate() const {
  if (!(mean > 0.0) || !std::isfinite(mean)) {
    throw ConfigError("noise.mean", "must be a positive finite number");
  }
  if (family == NoiseFamily::Gaussian && (!(std > 0.0) || !std::isfinite(std))) {
    throw ConfigError("noise.std", "must be a positive finite number");
  }
  if (schedule) schedule->validate();
}

double sample_noise(const NoiseSpec& spec, std::int64_t t, RandomStream& rng) {
  const double a = spec.mean_at(t);
  switch (spec.family) {
    case NoiseFamily::Exponential:
      return rng.exponential(a);
    case NoiseFamily::Gaussian:
      return rng.normal(a, spec.std);
  }
  return 0.0;
}

}  // namespace armarket
