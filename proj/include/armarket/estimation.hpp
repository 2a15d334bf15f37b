#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace armarket {

struct Histogram {
  std::vector<double> edges;  // size = counts.size() + 1, increasing
  std::vector<std::uint64_t> counts;
  // Samples that fell outside [edges.front(), edges.back()].
  std::uint64_t underflow = 0;
  std::uint64_t overflow = 0;

  std::size_t bins() const { return counts.size(); }
  std::uint64_t total() const;
  // counts / (n * width) where n includes under- and overflow, so the
  // in-range part integrates to the in-range probability mass.
  std::vector<double> density() const;
};

// A finalized set of samples. Keeps the insertion order (replica-index order
// after a merge) alongside a sorted view used by every estimator.
class EmpiricalDistribution {
 public:
  EmpiricalDistribution() = default;
  explicit EmpiricalDistribution(std::vector<double> samples);

  // Concatenates in argument order.
  static EmpiricalDistribution merge(std::span<const EmpiricalDistribution> parts);

  std::size_t count() const { return samples_.size(); }
  bool empty() const { return samples_.empty(); }
  const std::vector<double>& samples() const { return samples_; }
  const std::vector<double>& sorted() const { return sorted_; }

  // Linear-interpolated quantile, q in [0, 1].
  double quantile(double q) const;
  double empirical_cdf(double x) const;

  // `bins` uniform bins on [lo, hi].
  Histogram histogram(std::size_t bins, double lo, double hi) const;
  // Default linear view: 200 bins on [min(0, min sample), 99.5th percentile].
  Histogram histogram(std::size_t bins = 200) const;
  // Logarithmic bins, `per_decade` per factor of ten, covering the positive
  // samples. Non-positive samples count as underflow.
  Histogram log_histogram(std::size_t per_decade = 20) const;

 private:
  std::vector<double> samples_;
  std::vector<double> sorted_;
};

// Streaming batch-means accumulator for a series whose length is known in
// advance. Sample i lands in batch min(i / (n / batches), batches - 1).
class BatchMeans {
 public:
  BatchMeans(std::size_t expected_count, std::size_t batches = 50);

  void add(double x);

  std::size_t count() const { return count_; }
  double mean() const;
  // Sample standard deviation (n - 1 denominator), 0 for n < 2.
  double std() const;
  // Standard error of the mean from the spread of batch means.
  double standard_error() const;

 private:
  std::size_t batch_size_;
  std::size_t batches_;
  std::size_t count_ = 0;
  double sum_ = 0.0;
  // Welford accumulators for the overall std.
  double welford_mean_ = 0.0;
  double welford_m2_ = 0.0;
  std::vector<double> batch_sum_;
  std::vector<std::size_t> batch_count_;
};

struct Moments {
  double mean = 0.0;
  double std = 0.0;
  // Batch-means standard error of the mean (autocorrelation aware).
  double std_err = 0.0;
  // Naive std / sqrt(n), for comparison with std_err.
  double std_err_iid = 0.0;
  std::size_t count = 0;
  std::size_t batches = 0;
};

// Mean, std and batch-means error. Requires count() >= batches.
Moments moments(const EmpiricalDistribution& emp, std::size_t batches = 50);

using Cdf = std::function<double(double)>;

// Two-sided one-sample Kolmogorov-Smirnov statistic sup|F_n - F|. Throws
// ReferenceError if `cdf` leaves [0, 1] or decreases across the sorted
// samples.
double ks_distance(const EmpiricalDistribution& emp, const Cdf& cdf);

// Two-sample statistic sup|F_a - F_b|.
double ks_distance(const EmpiricalDistribution& a, const EmpiricalDistribution& b);

// Effective sample size of an AR(1) series with lag-one correlation rho.
inline double ar1_effective_count(double n, double rho) {
  return n * (1.0 - rho) / (1.0 + rho);
}

// 99.9% one-sample critical value 1.95/sqrt(n).
double ks_critical_999(double n);

struct TailFitResult {
  double gamma_hat = 0.0;  // density exponent, P(w) ~ w^-gamma
  double std_err = 0.0;
  std::size_t k = 0;
  double w_min = 0.0;
};

// Hill estimator on the top k order statistics, reported as the density
// exponent gamma = 1 + tail index. Default k = n / 10.
TailFitResult tail_exponent(const EmpiricalDistribution& emp,
                            std::optional<std::size_t> k = std::nullopt);

// Fits at k = n/20, n/10 and n/5.
std::vector<TailFitResult> tail_sensitivity(const EmpiricalDistribution& emp);

// Spearman rank correlation of two equally long series.
double rank_correlation(std::span<const double> a, std::span<const double> b);

}  // namespace armarket
