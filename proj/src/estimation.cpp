#include "armarket/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "armarket/errors.hpp"

namespace armarket {

std::uint64_t Histogram::total() const {
  return std::accumulate(counts.begin(), counts.end(), std::uint64_t{0}) +
         underflow + overflow;
}

std::vector<double> Histogram::density() const {
  std::vector<double> out(counts.size(), 0.0);
  const double n = static_cast<double>(total());
  if (n == 0.0) return out;
  for (std::size_t b = 0; b < counts.size(); ++b) {
    out[b] = static_cast<double>(counts[b]) / (n * (edges[b + 1] - edges[b]));
  }
  return out;
}

EmpiricalDistribution::EmpiricalDistribution(std::vector<double> samples)
    : samples_(std::move(samples)), sorted_(samples_) {
  std::sort(sorted_.begin(), sorted_.end());
}

EmpiricalDistribution EmpiricalDistribution::merge(
    std::span<const EmpiricalDistribution> parts) {
  std::size_t n = 0;
  for (const auto& p : parts) n += p.count();
  std::vector<double> all;
  all.reserve(n);
  for (const auto& p : parts) {
    all.insert(all.end(), p.samples().begin(), p.samples().end());
  }
  return EmpiricalDistribution(std::move(all));
}

double EmpiricalDistribution::quantile(double q) const {
  if (sorted_.empty()) throw DomainError("quantile of an empty distribution");
  if (!(q >= 0.0 && q <= 1.0)) throw DomainError("quantile level outside [0, 1]");
  const double pos = q * static_cast<double>(sorted_.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted_.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted_[lo] + frac * (sorted_[hi] - sorted_[lo]);
}

double EmpiricalDistribution::empirical_cdf(double x) const {
  if (sorted_.empty()) return 0.0;
  const auto it = std::upper_bound(sorted_.begin(), sorted_.end(), x);
  return static_cast<double>(it - sorted_.begin()) /
         static_cast<double>(sorted_.size());
}

Histogram EmpiricalDistribution::histogram(std::size_t bins, double lo,
                                           double hi) const {
  if (bins == 0) throw DomainError("histogram needs at least one bin");
  if (!(hi > lo)) throw DomainError("histogram range is empty");
  Histogram h;
  h.edges.resize(bins + 1);
  const double width = (hi - lo) / static_cast<double>(bins);
  for (std::size_t b = 0; b <= bins; ++b) {
    h.edges[b] = lo + width * static_cast<double>(b);
  }
  h.edges.back() = hi;
  h.counts.assign(bins, 0);
  for (double x : samples_) {
    if (x < lo) {
      ++h.underflow;
    } else if (x > hi) {
      ++h.overflow;
    } else {
      auto b = static_cast<std::size_t>((x - lo) / width);
      ++h.counts[std::min(b, bins - 1)];
    }
  }
  return h;
}

Histogram EmpiricalDistribution::histogram(std::size_t bins) const {
  if (sorted_.empty()) throw DomainError("histogram of an empty distribution");
  const double lo = std::min(0.0, sorted_.front());
  double hi = quantile(0.995);
  if (!(hi > lo)) hi = lo + 1.0;
  return histogram(bins, lo, hi);
}

Histogram EmpiricalDistribution::log_histogram(std::size_t per_decade) const {
  if (per_decade == 0) throw DomainError("log histogram needs bins per decade");
  const auto first_pos =
      std::upper_bound(sorted_.begin(), sorted_.end(), 0.0);
  if (first_pos == sorted_.end()) {
    throw DomainError("log histogram needs positive samples");
  }
  const double lo_dec = std::floor(std::log10(*first_pos));
  const double hi_dec = std::floor(std::log10(sorted_.back())) + 1.0;
  const auto decades = static_cast<std::size_t>(std::max(1.0, hi_dec - lo_dec));
  const std::size_t bins = decades * per_decade;

  Histogram h;
  h.edges.resize(bins + 1);
  for (std::size_t b = 0; b <= bins; ++b) {
    h.edges[b] = std::pow(10.0, lo_dec + static_cast<double>(b) /
                                              static_cast<double>(per_decade));
  }
  h.counts.assign(bins, 0);
  for (double x : samples_) {
    if (!(x > 0.0)) {
      ++h.underflow;
      continue;
    }
    const double pos = (std::log10(x) - lo_dec) * static_cast<double>(per_decade);
    auto b = static_cast<std::size_t>(std::max(0.0, pos));
    ++h.counts[std::min(b, bins - 1)];
  }
  return h;
}

BatchMeans::BatchMeans(std::size_t expected_count, std::size_t batches)
    : batches_(batches), batch_sum_(batches, 0.0), batch_count_(batches, 0) {
  if (batches < 2) throw DomainError("batch means needs at least two batches");
  if (expected_count < batches) {
    throw DomainError("batch means needs at least as many samples (" +
                      std::to_string(expected_count) + ") as batches (" +
                      std::to_string(batches) + ")");
  }
  batch_size_ = expected_count / batches;
}

void BatchMeans::add(double x) {
  const std::size_t b = std::min(count_ / batch_size_, batches_ - 1);
  batch_sum_[b] += x;
  ++batch_count_[b];
  ++count_;
  sum_ += x;
  const double delta = x - welford_mean_;
  welford_mean_ += delta / static_cast<double>(count_);
  welford_m2_ += delta * (x - welford_mean_);
}

double BatchMeans::mean() const {
  return count_ == 0 ? 0.0 : sum_ / static_cast<double>(count_);
}

double BatchMeans::std() const {
  if (count_ < 2) return 0.0;
  return std::sqrt(welford_m2_ / static_cast<double>(count_ - 1));
}

double BatchMeans::standard_error() const {
  std::size_t used = 0;
  double grand = 0.0;
  for (std::size_t b = 0; b < batches_; ++b) {
    if (batch_count_[b] == 0) continue;
    grand += batch_sum_[b] / static_cast<double>(batch_count_[b]);
    ++used;
  }
  if (used < 2) return 0.0;
  grand /= static_cast<double>(used);
  double ss = 0.0;
  for (std::size_t b = 0; b < batches_; ++b) {
    if (batch_count_[b] == 0) continue;
    const double d = batch_sum_[b] / static_cast<double>(batch_count_[b]) - grand;
    ss += d * d;
  }
  const double u = static_cast<double>(used);
  return std::sqrt(ss / (u * (u - 1.0)));
}

Moments moments(const EmpiricalDistribution& emp, std::size_t batches) {
  BatchMeans acc(emp.count(), batches);
  for (double x : emp.samples()) acc.add(x);
  Moments m;
  m.count = emp.count();
  m.batches = batches;
  // Plain sum over samples so that the mean equals the arithmetic mean
  // irrespective of the batch layout.
  m.mean = std::accumulate(emp.samples().begin(), emp.samples().end(), 0.0) /
           static_cast<double>(emp.count());
  m.std = acc.std();
  m.std_err = acc.standard_error();
  m.std_err_iid = m.std / std::sqrt(static_cast<double>(emp.count()));
  return m;
}

double ks_distance(const EmpiricalDistribution& emp, const Cdf& cdf) {
  if (emp.empty()) throw DomainError("KS distance of an empty distribution");
  const auto& xs = emp.sorted();
  const double n = static_cast<double>(xs.size());
  double sup = 0.0;
  double prev = -1.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = cdf(xs[i]);
    if (!(f >= 0.0 && f <= 1.0)) {
      throw ReferenceError("reference CDF value " + std::to_string(f) +
                           " outside [0, 1] at x = " + std::to_string(xs[i]));
    }
    if (f < prev - 1e-12) {
      throw ReferenceError("reference CDF decreases at x = " +
                           std::to_string(xs[i]));
    }
    prev = std::max(prev, f);
    const double above = static_cast<double>(i + 1) / n - f;
    const double below = f - static_cast<double>(i) / n;
    sup = std::max({sup, above, below});
  }
  return sup;
}

double ks_distance(const EmpiricalDistribution& a,
                   const EmpiricalDistribution& b) {
  if (a.empty() || b.empty()) {
    throw DomainError("KS distance of an empty distribution");
  }
  const auto& xa = a.sorted();
  const auto& xb = b.sorted();
  const double na = static_cast<double>(xa.size());
  const double nb = static_cast<double>(xb.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double sup = 0.0;
  while (i < xa.size() && j < xb.size()) {
    const double x = std::min(xa[i], xb[j]);
    while (i < xa.size() && xa[i] == x) ++i;
    while (j < xb.size() && xb[j] == x) ++j;
    sup = std::max(sup, std::abs(static_cast<double>(i) / na -
                                 static_cast<double>(j) / nb));
  }
  return sup;
}

double ks_critical_999(double n) { return 1.95 / std::sqrt(n); }

TailFitResult tail_exponent(const EmpiricalDistribution& emp,
                            std::optional<std::size_t> k) {
  const std::size_t n = emp.count();
  if (n < 100) {
    throw DomainError("tail fit needs at least 100 samples, got " +
                      std::to_string(n));
  }
  const std::size_t top = k.value_or(n / 10);
  if (top < 1 || top >= n) {
    throw DomainError("tail fit window k must satisfy 1 <= k < n");
  }
  const auto& xs = emp.sorted();
  const double threshold = xs[n - top - 1];
  if (!(threshold > 0.0)) {
    throw DomainError("tail fit window contains non-positive samples");
  }
  double log_sum = 0.0;
  for (std::size_t i = n - top; i < n; ++i) {
    log_sum += std::log(xs[i] / threshold);
  }
  if (!(log_sum > 0.0)) {
    throw DomainError("tail fit window has zero log-spacing (degenerate samples)");
  }
  TailFitResult r;
  r.k = top;
  r.w_min = threshold;
  const double index = static_cast<double>(top) / log_sum;
  r.gamma_hat = 1.0 + index;
  r.std_err = index / std::sqrt(static_cast<double>(top));
  return r;
}

std::vector<TailFitResult> tail_sensitivity(const EmpiricalDistribution& emp) {
  const std::size_t n = emp.count();
  return {tail_exponent(emp, n / 20), tail_exponent(emp, n / 10),
          tail_exponent(emp, n / 5)};
}

namespace {

std::vector<double> ranks(std::span<const double> v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> r(v.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j);
    for (std::size_t t = i; t <= j; ++t) r[order[t]] = avg;
    i = j + 1;
  }
  return r;
}

}  // namespace

double rank_correlation(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.size() < 2) {
    throw DomainError("rank correlation needs two equal series of length >= 2");
  }
  const auto ra = ranks(a);
  const auto rb = ranks(b);
  const double n = static_cast<double>(a.size());
  const double mean = 0.5 * (n - 1.0);
  double sab = 0.0;
  double saa = 0.0;
  double sbb = 0.0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    sab += (ra[i] - mean) * (rb[i] - mean);
    saa += (ra[i] - mean) * (ra[i] - mean);
    sbb += (rb[i] - mean) * (rb[i] - mean);
  }
  return sab / std::sqrt(saa * sbb);
}

}  // namespace armarket
