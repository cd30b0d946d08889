#pragma once

#include <cstdint>
#include <vector>

#include "critgraph/config.hpp"
#include "critgraph/dist.hpp"
#include "critgraph/limit.hpp"
#include "critgraph/stats.hpp"
#include "critgraph/walk.hpp"

namespace critgraph {

/// Cooperative interrupt flag checked between replicas. Studies finish the
/// replicas already running and report `interrupted`.
void request_stop();
void clear_stop();
bool stop_requested();

/// Seed coordinate shared by every walk replica: replica r at size n draws
/// its types and its walk from derive_seed(master, {walk tag, n, r}).
Rng walk_stream(std::uint64_t master, std::int64_t n, std::int64_t replica);

struct RankStats {
  std::size_t rank = 0;  // 1-based
  double mean = 0.0;
  double sd = 0.0;
  double stderr_ = 0.0;
};

std::vector<RankStats> rank_stats(const std::vector<std::vector<double>>& rows, std::size_t k);

/// Full-exhaustion walks at one n: top-K component sizes per replica.
struct CensusStudy {
  std::int64_t n = 0;
  std::int64_t replicas = 0;  // completed
  std::vector<std::vector<std::int64_t>> top;
  std::vector<RankStats> rescaled;  // n^{-2/3} C_k
  std::int64_t clamp_events = 0;
  std::int64_t max_type_flags = 0;
  double max_type_ratio = 0.0;
  std::int64_t incomplete = 0;
  std::int64_t checked_traces = 0;
  std::int64_t invariant_failures = 0;
  bool interrupted = false;

  /// Column k (0-based) rescaled by n^{-2/3}.
  std::vector<double> rescaled_column(std::size_t k) const;
};

CensusStudy run_census_study(const TypePmf& pmf, double a, std::int64_t n,
                             std::int64_t replicas, std::size_t k, std::uint64_t seed,
                             unsigned workers);

/// Walks cut at path_s0 n^{2/3} steps, summarized on a coarse common grid.
struct PathStudy {
  std::int64_t n = 0;
  std::int64_t replicas = 0;
  double a = 0.0;
  double s_max = 1.0;
  MomentSummary moments;
  MeanCurve z;
  MeanCurve drift;
  MeanCurve qv;
  std::vector<double> drift_target;  // a s - (beta/2) s^2
  std::vector<double> qv_target;     // E X E X^3 s
  double qv_slope = 0.0;
  double z_var_slope = 0.0;  // slope of Var Z_n(s); estimates sigma^2
  DriftFit drift_fit;        // fit of the mean drift curve
  double beta_fit_mean = 0.0;
  double beta_fit_stderr = 0.0;
  // Largest |mean drift - target| and the worst slack against
  // 4 stderr + 2 n^{-1/3} (positive means every grid point passes).
  double drift_max_deviation = 0.0;
  double drift_min_slack = 0.0;
  double martingale_mean = 0.0;  // mean of z - D at s_max
  double martingale_sd = 0.0;
  double sup_abs_z_p99 = 0.0;
  double weight_deviation_median = 0.0;
  std::int64_t clamp_events = 0;
  std::int64_t max_type_flags = 0;
  std::int64_t checked_traces = 0;
  std::int64_t invariant_failures = 0;
  bool interrupted = false;
};

PathStudy run_path_study(const TypePmf& pmf, double a, std::int64_t n, std::int64_t replicas,
                         double s_max, double curve_step, std::uint64_t seed,
                         unsigned workers);

struct LimitStudy {
  LimitParams params;
  GammaSample gamma;
  std::vector<RankStats> stats;
};

LimitStudy run_limit_study(const LimitParams& params, std::int64_t replicas, std::size_t k,
                           std::uint64_t seed, unsigned workers, bool include_truncated);

struct KsRow {
  std::int64_t n = 0;
  std::size_t coordinate = 0;  // 1-based rank
  double ks = 0.0;
  double p = 1.0;
};

struct CompareReport {
  MomentSummary moments;
  std::vector<CensusStudy> census;
  std::vector<PathStudy> paths;
  LimitStudy limit;
  std::vector<KsRow> ks;
  std::vector<double> l2_mean;  // per n: l2 distance of mean top-K vectors
  std::vector<bool> ks_decreasing;  // per coordinate, across n_list
  std::vector<bool> beta_consistent;  // per n
  bool interrupted = false;
};

CompareReport run_convergence_experiment(const ExperimentConfig& config);

}  // namespace critgraph
