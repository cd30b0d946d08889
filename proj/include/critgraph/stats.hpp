#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "critgraph/walk.hpp"

namespace critgraph {

struct EmpiricalSample {
  std::vector<double> values;
  std::string label;
  std::int64_t n_source = 0;
};

/// sqrt(sum_i (x_i - y_i)^2) after sorting both descending and zero padding
/// to a common length.
double l2_distance(std::span<const double> x, std::span<const double> y);

struct TestResult {
  double statistic = 0.0;
  double p_value = 1.0;
  std::int64_t dof = 0;  // chi-square only
};

/// Asymptotic Kolmogorov tail P{K > lambda} = 2 sum (-1)^{j-1} exp(-2 j^2 lambda^2).
double kolmogorov_tail(double lambda);

/// Two-sample KS statistic sup |F_x - F_y| with the asymptotic p-value at
/// lambda = sqrt(nm/(n+m)) D.
TestResult two_sample_ks(std::span<const double> x, std::span<const double> y);
TestResult two_sample_ks(const EmpiricalSample& x, const EmpiricalSample& y);

/// Pearson chi-square goodness of fit. Bins whose expected count is below 5
/// are pooled, smallest expectation first, until the pool reaches 5.
/// Throws std::invalid_argument when fewer than two bins remain.
TestResult chi_square_gof(std::span<const std::int64_t> observed,
                          std::span<const double> expected_probs);

/// Upper tail of the chi-square law.
double chi_square_survival(double statistic, double dof);

struct MeanCurve {
  std::vector<double> grid;
  std::vector<double> mean;
  std::vector<double> sd;
  std::vector<double> stderr_;
};

/// Pointwise mean, sample sd and standard error over replica curves that
/// share a grid. Throws std::invalid_argument on fewer than 2 replicas or a
/// grid mismatch.
MeanCurve mean_curve(std::span<const PathCurve> replicas);

/// Least-squares slope of y = c x through the origin.
double fit_slope_through_origin(std::span<const double> x, std::span<const double> y);

/// Least-squares fit of y = a s - (beta / 2) s^2; returns {a, beta}.
struct DriftFit {
  double linear = 0.0;
  double beta = 0.0;
};
DriftFit fit_parabolic_drift(std::span<const double> s, std::span<const double> y);

double sample_mean(std::span<const double> v);
double sample_sd(std::span<const double> v);
/// Linear-interpolated empirical quantile, q in [0, 1].
double quantile(std::vector<double> v, double q);

}  // namespace critgraph
