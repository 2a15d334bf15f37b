#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace armarket {

// Identifies the subsystem consuming a stream so that, for example, agent 3
// of an AR run and replica 3 of a kinetic run never share a sequence.
enum class StreamDomain : std::uint32_t {
  Agent = 1,
  Kinetic = 2,
  Replica = 3,
  Test = 99,
};

// A seeded pseudo-random stream owned by a single replica.
//
// Sub-seeding rule: the engine is seeded through std::seed_seq with the
// 32-bit halves of (master seed, replica index) followed by the domain tag.
// std::seed_seq and std::mt19937_64 are fully specified by the standard, so
// a (seed, replica, domain) triple names the same sequence everywhere.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t replica,
               StreamDomain domain = StreamDomain::Agent) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed),
                      static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(replica),
                      static_cast<std::uint32_t>(replica >> 32),
                      static_cast<std::uint32_t>(domain)};
    engine_.seed(seq);
  }

  // Uniform on the open interval (0, 1).
  double uniform() {
    // 53 random mantissa bits, shifted by half an ulp away from zero.
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Uniform on (lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Exponential with the given mean (scale). Never negative.
  double exponential(double mean) { return -mean * std::log(uniform()); }

  double normal(double mean, double std) {
    return mean + std * normal_(engine_);
  }

  // Uniform integer in [0, n).
  std::uint64_t index(std::uint64_t n) {
    return std::uniform_int_distribution<std::uint64_t>(0, n - 1)(engine_);
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace armarket
