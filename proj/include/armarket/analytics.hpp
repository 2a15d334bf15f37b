#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "armarket/ar_dynamics.hpp"
#include "armarket/noise.hpp"

namespace armarket {

// Exact stationary density of x = sum_{m>=0} lambda^m xi_m for unit-mean
// exponential xi:
//
//   P(x) = sum_m C_m exp(-x / lambda^m),
//   1 / C_m = lambda^m prod_{n>=0, n!=m} (1 - lambda^(n-m)),
//
// truncated to the first `order` terms m = 0..order-1. The factors with
// n < m are negative, so the coefficients alternate in sign.
struct SeriesDistribution {
  double lambda = 0.0;
  std::size_t order = 0;
  std::vector<double> coefficients;  // C_0 .. C_{order-1}
  std::vector<double> scales;        // lambda^0 .. lambda^{order-1}

  // sum C_m = P(0), tends to 0.
  double boundary_sum() const;
  // sum C_m lambda^m = integral of P, tends to 1.
  double normalization_sum() const;
  // sum C_m lambda^(2m) = mean of P, tends to 1 / (1 - lambda).
  double mean_sum() const;
};

// Largest savings accepted by the series evaluator. Beyond it the
// alternating coefficients cancel catastrophically; use the convolution
// recursion instead.
inline constexpr double kSeriesMaxLambda = 0.9;

// Throws DomainError unless 0 < lambda <= kSeriesMaxLambda and order >= 1.
SeriesDistribution series_coefficients(double lambda, std::size_t order);

struct SeriesValue {
  double raw = 0.0;      // the truncated sum, possibly slightly negative near 0
  double density = 0.0;  // max(raw, 0)
  bool clamped = false;
};

// Throws DomainError for x < 0.
SeriesValue series_pdf(const SeriesDistribution& dist, double x);

// CDF of the truncated series, clipped to [0, 1]. Low orders dip below 0
// just above x = 0; the clip keeps the result monotone.
double series_cdf(const SeriesDistribution& dist, double x);

struct TabulatedDensity {
  std::vector<double> grid;     // uniform, increasing, starts at 0
  std::vector<double> density;

  // Trapezoid integral over the grid.
  double integral() const;
  // Linear interpolation; 0 outside the grid.
  double at(double x) const;
};

struct GridSpec {
  std::size_t points = 4096;
  // Upper end of the grid; defaults to 25 <xi> / (1 - lambda).
  std::optional<double> x_max;
};

// Distributions P_0 .. P_{m_max} of the partial sums
// x_m = sum_{n=0}^{m} lambda^n xi_n, built by the recursion
//
//   P_m(x) = lambda^-m int_0^x P_{m-1}(y) h((x - y) / lambda^m) dy,  P_0 = h.
//
// P_{m-1} is interpolated linearly between grid nodes and the exponential
// kernel is integrated exactly on every cell, which stays accurate when
// lambda^m is far below the grid spacing. Throws DomainError for a
// non-exponential or scheduled h, or a grid shorter than
// 20 <xi> / (1 - lambda); ResolutionError when a level's integral drifts
// from 1 by more than 1e-2.
std::vector<TabulatedDensity> convolution_recursion(const NoiseSpec& h, double lambda,
                                                    std::size_t m_max,
                                                    const GridSpec& grid = {});

struct GaussianParams {
  double mean = 0.0;
  double std = 0.0;
};

// Stationary Gaussian of x = lambda x + xi with xi ~ N(alpha0, sigma0):
// mean alpha0 / (1 - lambda), std sigma0 / sqrt(1 - lambda^2).
GaussianParams gaussian_fixed_point(double alpha0, double sigma0, double lambda);

double normal_cdf(double x, double mean, double std);

// x^(n-1) e^-x / Gamma(n).
double gamma_pdf(double n, double x);
// Regularized lower incomplete gamma P(n, x).
double gamma_cdf(double n, double x);

// Shape of the approximate Gamma fit to the CC model, (1 + 2 lambda) / (1 - lambda).
// A labeled reference curve only.
double cc_gamma_shape(double lambda);

// Density of the long-run mean wealth w = <xi> / mu when mu ~ g:
// P(w) = <xi> g(<xi> / w) / w^2 on [<xi>, <xi> / floor], 0 elsewhere.
double pareto_density(const CapacityLaw& law, double xi_mean, double w,
                      double floor = 1e-3);

}  // namespace armarket
