#include "critgraph/stats.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <stdexcept>

#include <boost/math/special_functions/gamma.hpp>

namespace critgraph {

double l2_distance(std::span<const double> x, std::span<const double> y) {
  std::vector<double> a(x.begin(), x.end());
  std::vector<double> b(y.begin(), y.end());
  std::sort(a.begin(), a.end(), std::greater<>());
  std::sort(b.begin(), b.end(), std::greater<>());
  const std::size_t len = std::max(a.size(), b.size());
  a.resize(len, 0.0);
  b.resize(len, 0.0);
  double sum = 0.0;
  for (std::size_t i = 0; i < len; ++i) sum += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(sum);
}

double kolmogorov_tail(double lambda) {
  if (lambda <= 0.0) return 1.0;
  if (lambda < 1.18) {
    // Jacobi-transformed series converges fast for small lambda.
    const double pi2 = M_PI * M_PI;
    const double y = std::exp(-pi2 / (8.0 * lambda * lambda));
    double cdf = 0.0;
    for (int j = 1; j <= 9; j += 2) cdf += std::pow(y, j * j);
    cdf *= std::sqrt(2.0 * M_PI) / lambda;
    return std::clamp(1.0 - cdf, 0.0, 1.0);
  }
  double sum = 0.0;
  for (int j = 1; j <= 100; ++j) {
    const double term = std::exp(-2.0 * j * j * lambda * lambda);
    sum += (j % 2 ? 1.0 : -1.0) * term;
    if (term < 1e-17) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

TestResult two_sample_ks(std::span<const double> x, std::span<const double> y) {
  if (x.empty() || y.empty()) throw std::invalid_argument("two_sample_ks on an empty sample");
  std::vector<double> a(x.begin(), x.end());
  std::vector<double> b(y.begin(), y.end());
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == v) ++i;
    while (j < b.size() && b[j] == v) ++j;
    d = std::max(d, std::fabs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  TestResult r;
  r.statistic = d;
  r.p_value = kolmogorov_tail(std::sqrt(na * nb / (na + nb)) * d);
  return r;
}

TestResult two_sample_ks(const EmpiricalSample& x, const EmpiricalSample& y) {
  return two_sample_ks(x.values, y.values);
}

double chi_square_survival(double statistic, double dof) {
  if (statistic <= 0.0) return 1.0;
  return boost::math::gamma_q(dof / 2.0, statistic / 2.0);
}

TestResult chi_square_gof(std::span<const std::int64_t> observed,
                          std::span<const double> expected_probs) {
  if (observed.size() != expected_probs.size()) {
    throw std::invalid_argument("observed and expected bin counts differ");
  }
  const double total_prob = std::accumulate(expected_probs.begin(), expected_probs.end(), 0.0);
  if (std::fabs(total_prob - 1.0) > 1e-9) {
    throw std::invalid_argument("expected probabilities do not sum to 1");
  }
  const double n = static_cast<double>(
      std::accumulate(observed.begin(), observed.end(), std::int64_t{0}));

  struct Bin {
    double observed;
    double expected;
  };
  std::vector<Bin> bins;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    bins.push_back({static_cast<double>(observed[i]), n * expected_probs[i]});
  }
  std::stable_sort(bins.begin(), bins.end(),
                   [](const Bin& l, const Bin& r) { return l.expected < r.expected; });
  std::vector<Bin> merged;
  Bin pool{0.0, 0.0};
  for (const Bin& b : bins) {
    if (b.expected >= 5.0 && pool.expected == 0.0 && pool.observed == 0.0) {
      merged.push_back(b);
      continue;
    }
    pool.observed += b.observed;
    pool.expected += b.expected;
    if (pool.expected >= 5.0) {
      merged.push_back(pool);
      pool = {0.0, 0.0};
    }
  }
  if (pool.expected > 0.0 || pool.observed > 0.0) {
    if (merged.empty()) {
      merged.push_back(pool);
    } else {
      merged.front().observed += pool.observed;
      merged.front().expected += pool.expected;
    }
  }
  if (merged.size() < 2) throw std::invalid_argument("chi-square needs at least two bins");

  TestResult r;
  for (const Bin& b : merged) {
    if (b.expected <= 0.0) {
      if (b.observed > 0.0) r.statistic = INFINITY;
      continue;
    }
    r.statistic += (b.observed - b.expected) * (b.observed - b.expected) / b.expected;
  }
  r.dof = static_cast<std::int64_t>(merged.size()) - 1;
  r.p_value = std::isfinite(r.statistic) ? chi_square_survival(r.statistic, static_cast<double>(r.dof))
                                         : 0.0;
  return r;
}

MeanCurve mean_curve(std::span<const PathCurve> replicas) {
  if (replicas.size() < 2) throw std::invalid_argument("mean_curve needs at least 2 replicas");
  const auto& grid = replicas.front().s;
  for (const auto& r : replicas) {
    if (r.s != grid || r.value.size() != grid.size()) {
      throw std::invalid_argument("mean_curve: replica grids differ");
    }
  }
  const std::size_t len = grid.size();
  const double count = static_cast<double>(replicas.size());
  MeanCurve out;
  out.grid = grid;
  out.mean.assign(len, 0.0);
  out.sd.assign(len, 0.0);
  out.stderr_.assign(len, 0.0);
  for (const auto& r : replicas) {
    for (std::size_t j = 0; j < len; ++j) out.mean[j] += r.value[j];
  }
  for (auto& m : out.mean) m /= count;
  for (const auto& r : replicas) {
    for (std::size_t j = 0; j < len; ++j) {
      const double d = r.value[j] - out.mean[j];
      out.sd[j] += d * d;
    }
  }
  for (std::size_t j = 0; j < len; ++j) {
    out.sd[j] = std::sqrt(out.sd[j] / (count - 1.0));
    out.stderr_[j] = out.sd[j] / std::sqrt(count);
  }
  return out;
}

double fit_slope_through_origin(std::span<const double> x, std::span<const double> y) {
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += x[i] * y[i];
    sxx += x[i] * x[i];
  }
  if (sxx == 0.0) throw std::invalid_argument("slope fit on a degenerate design");
  return sxy / sxx;
}

DriftFit fit_parabolic_drift(std::span<const double> s, std::span<const double> y) {
  // Normal equations for y ~ c1 s + c2 s^2.
  double s2 = 0, s3 = 0, s4 = 0, ys = 0, ys2 = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double t = s[i], t2 = t * t;
    s2 += t2;
    s3 += t2 * t;
    s4 += t2 * t2;
    ys += y[i] * t;
    ys2 += y[i] * t2;
  }
  const double det = s2 * s4 - s3 * s3;
  if (det <= 0.0) throw std::invalid_argument("drift fit on a degenerate design");
  const double c1 = (ys * s4 - ys2 * s3) / det;
  const double c2 = (s2 * ys2 - s3 * ys) / det;
  return {c1, -2.0 * c2};
}

double sample_mean(std::span<const double> v) {
  if (v.empty()) throw std::invalid_argument("mean of empty sample");
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double sample_sd(std::span<const double> v) {
  if (v.size() < 2) return 0.0;
  const double m = sample_mean(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

double quantile(std::vector<double> v, double q) {
  if (v.empty()) throw std::invalid_argument("quantile of empty sample");
  std::sort(v.begin(), v.end());
  const double pos = std::clamp(q, 0.0, 1.0) * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

}  // namespace critgraph
