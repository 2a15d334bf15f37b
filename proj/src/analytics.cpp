#include "armarket/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <boost/math/special_functions/gamma.hpp>

#include "armarket/errors.hpp"

namespace armarket {

double SeriesDistribution::boundary_sum() const {
  double s = 0.0;
  for (double c : coefficients) s += c;
  return s;
}

double SeriesDistribution::normalization_sum() const {
  double s = 0.0;
  for (std::size_t m = 0; m < order; ++m) s += coefficients[m] * scales[m];
  return s;
}

double SeriesDistribution::mean_sum() const {
  double s = 0.0;
  for (std::size_t m = 0; m < order; ++m) {
    s += coefficients[m] * scales[m] * scales[m];
  }
  return s;
}

SeriesDistribution series_coefficients(double lambda, std::size_t order) {
  if (!(lambda > 0.0 && lambda < 1.0)) {
    throw DomainError("series savings must lie in (0, 1), got " + std::to_string(lambda));
  }
  if (lambda > kSeriesMaxLambda) {
    throw DomainError("series evaluation is ill-conditioned for savings above 0.9; "
                      "use the convolution recursion");
  }
  if (order < 1) throw DomainError("series order must be at least 1");

  const double log_lambda = std::log(lambda);
  SeriesDistribution d;
  d.lambda = lambda;
  d.order = order;
  d.coefficients.resize(order);
  d.scales.resize(order);
  for (std::size_t m = 0; m < order; ++m) {
    // log |1/C_m|. Factors n < m are 1 - lambda^-k = -(lambda^-k)(1 - lambda^k).
    double log_inv = static_cast<double>(m) * log_lambda;
    for (std::size_t k = 1; k <= m; ++k) {
      const double lk = std::pow(lambda, static_cast<double>(k));
      log_inv += -static_cast<double>(k) * log_lambda + std::log1p(-lk);
    }
    // Factors n > m, truncated once lambda^(n-m) drops below 1e-15.
    for (double lk = lambda; lk >= 1e-15; lk *= lambda) {
      log_inv += std::log1p(-lk);
    }
    const double sign = (m % 2 == 0) ? 1.0 : -1.0;
    d.coefficients[m] = sign * std::exp(-log_inv);
    d.scales[m] = std::pow(lambda, static_cast<double>(m));
  }
  return d;
}

SeriesValue series_pdf(const SeriesDistribution& dist, double x) {
  if (x < 0.0) throw DomainError("series density is defined for x >= 0");
  double raw = 0.0;
  for (std::size_t m = 0; m < dist.order; ++m) {
    raw += dist.coefficients[m] * std::exp(-x / dist.scales[m]);
  }
  SeriesValue v;
  v.raw = raw;
  v.clamped = raw < 0.0;
  v.density = v.clamped ? 0.0 : raw;
  return v;
}

double series_cdf(const SeriesDistribution& dist, double x) {
  if (x <= 0.0) return 0.0;
  double f = 0.0;
  for (std::size_t m = 0; m < dist.order; ++m) {
    f += dist.coefficients[m] * dist.scales[m] * -std::expm1(-x / dist.scales[m]);
  }
  return std::clamp(f, 0.0, 1.0);
}

double TabulatedDensity::integral() const {
  double s = 0.0;
  for (std::size_t k = 1; k < grid.size(); ++k) {
    s += 0.5 * (density[k] + density[k - 1]) * (grid[k] - grid[k - 1]);
  }
  return s;
}

double TabulatedDensity::at(double x) const {
  if (grid.empty() || x < grid.front() || x > grid.back()) return 0.0;
  const auto it = std::upper_bound(grid.begin(), grid.end(), x);
  if (it == grid.end()) return density.back();
  const auto hi = static_cast<std::size_t>(it - grid.begin());
  const std::size_t lo = hi - 1;
  const double t = (x - grid[lo]) / (grid[hi] - grid[lo]);
  return density[lo] + t * (density[hi] - density[lo]);
}

std::vector<TabulatedDensity> convolution_recursion(const NoiseSpec& h, double lambda,
                                                    std::size_t m_max,
                                                    const GridSpec& grid) {
  if (h.family != NoiseFamily::Exponential || !h.is_static()) {
    throw DomainError("the convolution recursion needs static exponential noise");
  }
  if (!(lambda > 0.0 && lambda < 1.0)) {
    throw DomainError("savings must lie in (0, 1)");
  }
  if (grid.points < 3) throw DomainError("grid needs at least 3 points");
  const double a = h.mean;
  const double required = 20.0 * a / (1.0 - lambda);
  const double x_max = grid.x_max.value_or(25.0 * a / (1.0 - lambda));
  if (x_max < required) {
    throw DomainError("grid must reach 20 <xi> / (1 - lambda) = " + std::to_string(required));
  }

  const std::size_t n = grid.points;
  const double dx = x_max / static_cast<double>(n - 1);
  TabulatedDensity base;
  base.grid.resize(n);
  base.density.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    base.grid[k] = dx * static_cast<double>(k);
    base.density[k] = std::exp(-base.grid[k] / a) / a;
  }

  std::vector<TabulatedDensity> levels;
  levels.reserve(m_max + 1);
  levels.push_back(std::move(base));

  double scale = a;
  for (std::size_t m = 1; m <= m_max; ++m) {
    scale *= lambda;
    const auto& prev = levels.back().density;
    TabulatedDensity next;
    next.grid = levels.back().grid;
    next.density.assign(n, 0.0);

    // Q(x_{k+1}) = E Q(x_k) + (1/s) int_{x_k}^{x_{k+1}} P(y) e^{-(x_{k+1}-y)/s} dy
    // with P linear on the cell.
    const double decay = std::exp(-dx / scale);
    const double one_minus = -std::expm1(-dx / scale);
    const double ramp = (scale * one_minus - dx * decay) / dx;
    for (std::size_t k = 0; k + 1 < n; ++k) {
      const double cell = prev[k + 1] * one_minus - (prev[k + 1] - prev[k]) * ramp;
      next.density[k + 1] = decay * next.density[k] + cell;
    }

    const double norm = next.integral();
    if (std::abs(norm - 1.0) > 1e-2) {
      throw ResolutionError("level " + std::to_string(m) + " integrates to " +
                            std::to_string(norm) + "; refine the grid");
    }
    levels.push_back(std::move(next));
  }
  return levels;
}

GaussianParams gaussian_fixed_point(double alpha0, double sigma0, double lambda) {
  if (!(lambda >= 0.0 && lambda < 1.0)) {
    throw DomainError("Gaussian fixed point needs 0 <= lambda < 1");
  }
  if (!(sigma0 > 0.0)) throw DomainError("noise std must be positive");
  return {alpha0 / (1.0 - lambda), sigma0 / std::sqrt(1.0 - lambda * lambda)};
}

double normal_cdf(double x, double mean, double std) {
  return 0.5 * std::erfc(-(x - mean) / (std * std::sqrt(2.0)));
}

double gamma_pdf(double n, double x) {
  if (!(n > 0.0)) throw DomainError("gamma shape must be positive");
  if (x < 0.0) throw DomainError("gamma density is defined for x >= 0");
  if (x == 0.0) {
    if (n == 1.0) return 1.0;
    return n > 1.0 ? 0.0 : std::numeric_limits<double>::infinity();
  }
  return std::exp((n - 1.0) * std::log(x) - x - std::lgamma(n));
}

double gamma_cdf(double n, double x) {
  if (!(n > 0.0)) throw DomainError("gamma shape must be positive");
  if (x <= 0.0) return 0.0;
  return boost::math::gamma_p(n, x);
}

double cc_gamma_shape(double lambda) {
  if (!(lambda >= 0.0 && lambda < 1.0)) throw DomainError("savings must lie in [0, 1)");
  return (1.0 + 2.0 * lambda) / (1.0 - lambda);
}

double pareto_density(const CapacityLaw& law, double xi_mean, double w, double floor) {
  if (!(xi_mean > 0.0)) throw DomainError("market mean must be positive");
  if (w < xi_mean || w >= xi_mean / floor) return 0.0;
  return xi_mean * law.density(xi_mean / w, floor) / (w * w);
}

}  // namespace armarket
