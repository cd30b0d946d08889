#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "critgraph/dist.hpp"
#include "critgraph/random.hpp"

namespace critgraph {

/// Parameters of W(s) = sigma B(s) + a s - (beta / 2) s^2 on the grid
/// 0, dt, ..., s0.
struct LimitParams {
  double a = 0.0;
  double sigma = 1.0;
  double beta = 1.0;
  double s0 = 8.0;
  double dt = 1e-4;

  /// Throws std::invalid_argument unless sigma > 0, beta >= 0 (both
  /// finite), s0 > 0 and 0 < dt <= s0 / 100.
  void validate() const;
  std::int64_t grid_steps() const;

  static LimitParams from_moments(const MomentSummary& m, double a, double s0, double dt);
};

struct LimitPath {
  LimitParams params;
  std::vector<double> values;     // W at k dt
  std::vector<double> reflected;  // W - running min
  std::vector<std::int64_t> zero_set;
};

struct ExcursionList {
  std::vector<double> lengths;  // descending
  bool truncated_tail = false;
  double truncated_length = 0.0;
};

/// Exact grid marginals: each increment is Gaussian with the integrated
/// drift a dt - (beta / 2) ((t + dt)^2 - t^2) and variance sigma^2 dt.
LimitPath simulate_limit_path(const LimitParams& params, Rng& rng);

/// B_k = W_k - min_{j <= k} W_j. Requires values[0] == 0.
std::vector<double> reflect_path(std::span<const double> values);

/// Grid indices where W reaches a new running minimum (B == 0 exactly).
std::vector<std::int64_t> zero_set(std::span<const double> reflected);

/// Excursions are the gaps between consecutive zero-set indices that
/// contain at least one grid point with B > 0; length = gap * dt. A final
/// excursion still open at s0 is flagged and excluded unless requested.
ExcursionList extract_excursions(std::span<const double> reflected, double dt,
                                 bool include_truncated = false);
ExcursionList extract_excursions(const LimitPath& path, bool include_truncated = false);

struct GammaSample {
  std::vector<std::vector<double>> top;  // replicas x K, zero padded
  // Paths with B(s0) > 0. On the grid the last point is rarely a new
  // minimum, so this counts mostly tails of a few dt.
  std::int64_t truncated = 0;
  double truncation_rate = 0.0;
  // Paths whose open tail is at least as long as the K-th retained length,
  // i.e. the truncation changes the reported top-K vector.
  std::int64_t top_k_truncated = 0;
  double top_k_truncation_rate = 0.0;
};

/// Top-K excursion lengths of independent paths. Replica r uses the stream
/// derive_seed(seed, {label_tag("limit"), r}), so results do not depend on
/// the worker count.
GammaSample sample_gamma(const LimitParams& params, std::int64_t replicas, std::size_t k,
                         std::uint64_t seed, unsigned workers = 1,
                         bool include_truncated = false);

}  // namespace critgraph
