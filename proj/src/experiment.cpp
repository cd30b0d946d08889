#include "critgraph/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>

namespace critgraph {

namespace {

std::atomic<bool> g_stop{false};

double two_thirds_power(std::int64_t n) {
  const double c = std::cbrt(static_cast<double>(n));
  return c * c;
}

bool check_this_replica(std::int64_t replica) {
#ifndef NDEBUG
  (void)replica;
  return true;
#else
  return replica % 100 == 0;
#endif
}

std::vector<double> coarse_grid(double s_max, double step) {
  std::vector<double> grid;
  const auto points = static_cast<std::int64_t>(std::floor(s_max / step + 1e-9));
  for (std::int64_t j = 0; j <= points; ++j) grid.push_back(static_cast<double>(j) * step);
  return grid;
}

PathCurve on_grid(const PathCurve& fine, std::int64_t n, const std::vector<double>& grid) {
  PathCurve out;
  out.s = grid;
  out.value.reserve(grid.size());
  for (double s : grid) out.value.push_back(curve_at(fine, n, s));
  return out;
}

}  // namespace

void request_stop() { g_stop.store(true); }
void clear_stop() { g_stop.store(false); }
bool stop_requested() { return g_stop.load(); }

Rng walk_stream(std::uint64_t master, std::int64_t n, std::int64_t replica) {
  static const std::uint64_t tag = label_tag("walk");
  return make_stream(master, {tag, static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(replica)});
}

std::vector<RankStats> rank_stats(const std::vector<std::vector<double>>& rows, std::size_t k) {
  std::vector<RankStats> out;
  for (std::size_t c = 0; c < k; ++c) {
    std::vector<double> column;
    column.reserve(rows.size());
    for (const auto& row : rows) column.push_back(c < row.size() ? row[c] : 0.0);
    RankStats s;
    s.rank = c + 1;
    if (!column.empty()) {
      s.mean = sample_mean(column);
      s.sd = sample_sd(column);
      s.stderr_ = s.sd / std::sqrt(static_cast<double>(column.size()));
    }
    out.push_back(s);
  }
  return out;
}

std::vector<double> CensusStudy::rescaled_column(std::size_t k) const {
  const double scale = 1.0 / two_thirds_power(n);
  std::vector<double> out;
  out.reserve(top.size());
  for (const auto& row : top) out.push_back(scale * static_cast<double>(k < row.size() ? row[k] : 0));
  return out;
}

CensusStudy run_census_study(const TypePmf& pmf, double a, std::int64_t n,
                             std::int64_t replicas, std::size_t k, std::uint64_t seed,
                             unsigned workers) {
  struct Slot {
    bool done = false;
    std::vector<std::int64_t> top;
    std::int64_t clamps = 0;
    MaxTypeDiagnostic max_type;
    bool incomplete = false;
    bool checked = false;
    bool failed = false;
  };
  std::vector<Slot> slots(static_cast<std::size_t>(replicas));
  parallel_for(slots.size(), workers, [&](std::size_t r) {
    if (stop_requested()) return;
    Slot& slot = slots[r];
    Rng rng = walk_stream(seed, n, static_cast<std::int64_t>(r));
    const TypeCounts counts = sample_types(pmf, n, rng);
    slot.max_type = validate_max_type(counts);
    ComponentCensus census;
    if (counts.total_weight() == 0) {
      census.n = n;
      census.sizes.assign(static_cast<std::size_t>(n), 1);
      census.zero_type_singletons = n;
      census.complete = true;
    } else {
      const WalkTrace trace = run_walk(counts, a, exhaustion_horizon(counts), rng);
      census = census_from_trace(trace, counts);
      slot.clamps = trace.clamp_events;
      if (check_this_replica(static_cast<std::int64_t>(r))) {
        slot.checked = true;
        slot.failed = !check_trace_invariants(trace, counts).empty();
      }
    }
    slot.incomplete = !census.complete;
    slot.top.assign(k, 0);
    for (std::size_t i = 0; i < k; ++i) slot.top[i] = census.size_at(i);
    slot.done = true;
  });

  CensusStudy study;
  study.n = n;
  std::vector<std::vector<double>> rescaled;
  const double scale = 1.0 / two_thirds_power(n);
  for (const Slot& slot : slots) {
    if (!slot.done) {
      study.interrupted = true;
      continue;
    }
    ++study.replicas;
    study.top.push_back(slot.top);
    std::vector<double> row;
    for (auto v : slot.top) row.push_back(scale * static_cast<double>(v));
    rescaled.push_back(std::move(row));
    study.clamp_events += slot.clamps;
    study.max_type_flags += slot.max_type.flagged ? 1 : 0;
    study.max_type_ratio = std::max(study.max_type_ratio, slot.max_type.ratio);
    study.incomplete += slot.incomplete ? 1 : 0;
    study.checked_traces += slot.checked ? 1 : 0;
    study.invariant_failures += slot.failed ? 1 : 0;
  }
  study.rescaled = rank_stats(rescaled, k);
  return study;
}

PathStudy run_path_study(const TypePmf& pmf, double a, std::int64_t n, std::int64_t replicas,
                         double s_max, double curve_step, std::uint64_t seed,
                         unsigned workers) {
  const MomentSummary moments = compute_moments(pmf);
  const double n23 = two_thirds_power(n);
  const double n13 = std::cbrt(static_cast<double>(n));
  const auto horizon = static_cast<std::int64_t>(std::floor(s_max * n23 + 1e-9)) + 1;
  const std::vector<double> grid = coarse_grid(s_max, curve_step);

  struct Slot {
    bool done = false;
    PathCurve z, drift, qv;
    double sup_abs_z = 0.0;
    double weight_dev = 0.0;
    double beta_fit = 0.0;
    std::int64_t clamps = 0;
    bool flagged = false;
    bool checked = false;
    bool failed = false;
  };
  std::vector<Slot> slots(static_cast<std::size_t>(replicas));
  parallel_for(slots.size(), workers, [&](std::size_t r) {
    if (stop_requested()) return;
    Slot& slot = slots[r];
    Rng rng = walk_stream(seed, n, static_cast<std::int64_t>(r));
    const TypeCounts counts = sample_types(pmf, n, rng);
    slot.flagged = validate_max_type(counts).flagged;
    if (counts.total_weight() == 0) {
      throw std::runtime_error("path study: realization without positive types at n=" +
                               std::to_string(n));
    }
    const WalkTrace trace = run_walk(counts, a, horizon, rng);
    const PathCurve z = rescaled_path(trace, n, s_max);
    const DriftQvCurves dq = drift_qv_curves(trace, n, s_max);
    for (double v : z.value) slot.sup_abs_z = std::max(slot.sup_abs_z, std::fabs(v));
    for (std::int64_t w : trace.unrevealed_weight) {
      slot.weight_dev = std::max(slot.weight_dev, std::fabs(static_cast<double>(w) / static_cast<double>(n) - moments.ex));
    }
    slot.z = on_grid(z, n, grid);
    slot.drift = on_grid(dq.drift, n, grid);
    slot.qv = on_grid(dq.qv, n, grid);
    slot.beta_fit = fit_parabolic_drift(slot.drift.s, slot.drift.value).beta;
    slot.clamps = trace.clamp_events;
    if (check_this_replica(static_cast<std::int64_t>(r))) {
      slot.checked = true;
      slot.failed = !check_trace_invariants(trace, counts).empty();
    }
    slot.done = true;
  });

  PathStudy study;
  study.n = n;
  study.a = a;
  study.s_max = s_max;
  study.moments = moments;
  std::vector<PathCurve> zs, drifts, qvs;
  std::vector<double> sups, weight_devs, betas, martingale;
  for (Slot& slot : slots) {
    if (!slot.done) {
      study.interrupted = true;
      continue;
    }
    ++study.replicas;
    martingale.push_back(slot.z.value.back() - slot.drift.value.back());
    zs.push_back(std::move(slot.z));
    drifts.push_back(std::move(slot.drift));
    qvs.push_back(std::move(slot.qv));
    sups.push_back(slot.sup_abs_z);
    weight_devs.push_back(slot.weight_dev);
    betas.push_back(slot.beta_fit);
    study.clamp_events += slot.clamps;
    study.max_type_flags += slot.flagged ? 1 : 0;
    study.checked_traces += slot.checked ? 1 : 0;
    study.invariant_failures += slot.failed ? 1 : 0;
  }
  if (study.replicas < 2) return study;

  study.z = mean_curve(zs);
  study.drift = mean_curve(drifts);
  study.qv = mean_curve(qvs);
  std::vector<double> z_var;
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double s = grid[j];
    study.drift_target.push_back(a * s - 0.5 * moments.beta * s * s);
    study.qv_target.push_back(moments.ex * moments.ex3 * s);
    z_var.push_back(study.z.sd[j] * study.z.sd[j]);
  }
  study.qv_slope = fit_slope_through_origin(grid, study.qv.mean);
  study.z_var_slope = fit_slope_through_origin(grid, z_var);
  study.drift_fit = fit_parabolic_drift(grid, study.drift.mean);
  study.beta_fit_mean = sample_mean(betas);
  study.beta_fit_stderr = sample_sd(betas) / std::sqrt(static_cast<double>(betas.size()));

  const double slack = 2.0 / n13;
  study.drift_min_slack = INFINITY;
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double dev = std::fabs(study.drift.mean[j] - study.drift_target[j]);
    study.drift_max_deviation = std::max(study.drift_max_deviation, dev);
    study.drift_min_slack = std::min(study.drift_min_slack, 4.0 * study.drift.stderr_[j] + slack - dev);
  }
  study.martingale_mean = sample_mean(martingale);
  study.martingale_sd = sample_sd(martingale);
  study.sup_abs_z_p99 = quantile(sups, 0.99);
  study.weight_deviation_median = quantile(weight_devs, 0.5);
  return study;
}

LimitStudy run_limit_study(const LimitParams& params, std::int64_t replicas, std::size_t k,
                           std::uint64_t seed, unsigned workers, bool include_truncated) {
  LimitStudy study;
  study.params = params;
  study.gamma = sample_gamma(params, replicas, k, seed, workers, include_truncated);
  study.stats = rank_stats(study.gamma.top, k);
  return study;
}

CompareReport run_convergence_experiment(const ExperimentConfig& config) {
  if (!config.pmf) throw std::invalid_argument("configuration not validated");
  const TypePmf& pmf = *config.pmf;
  CompareReport report;
  report.moments = compute_moments(pmf, config.crit_tol);
  const LimitParams params =
      LimitParams::from_moments(report.moments, config.a, config.s0, config.dt);

  report.limit = run_limit_study(params, config.replicas, config.k, config.seed, config.workers,
                                 config.include_truncated);
  for (std::int64_t n : config.n_list) {
    report.census.push_back(
        run_census_study(pmf, config.a, n, config.replicas, config.k, config.seed, config.workers));
    report.paths.push_back(run_path_study(pmf, config.a, n, config.replicas, config.path_s0,
                                          config.curve_step, config.seed, config.workers));
    report.interrupted = report.interrupted || report.census.back().interrupted ||
                         report.paths.back().interrupted;
  }

  std::vector<double> limit_mean(config.k, 0.0);
  for (std::size_t c = 0; c < config.k; ++c) limit_mean[c] = report.limit.stats[c].mean;

  for (std::size_t i = 0; i < report.census.size(); ++i) {
    const CensusStudy& study = report.census[i];
    if (study.replicas == 0) {
      report.l2_mean.push_back(NAN);
      continue;
    }
    std::vector<double> mean(config.k, 0.0);
    for (std::size_t c = 0; c < config.k; ++c) {
      const auto column = study.rescaled_column(c);
      std::vector<double> gamma_column;
      for (const auto& row : report.limit.gamma.top) gamma_column.push_back(row[c]);
      const TestResult ks = two_sample_ks(column, gamma_column);
      report.ks.push_back({study.n, c + 1, ks.statistic, ks.p_value});
      mean[c] = study.rescaled[c].mean;
    }
    report.l2_mean.push_back(l2_distance(mean, limit_mean));

    const PathStudy& path = report.paths[i];
    const double tolerance = 4.0 * path.beta_fit_stderr +
                             2.0 * report.moments.beta / std::cbrt(static_cast<double>(path.n));
    report.beta_consistent.push_back(std::fabs(path.beta_fit_mean - report.moments.beta) <= tolerance);
  }

  for (std::size_t c = 0; c < config.k; ++c) {
    bool decreasing = true;
    double previous = INFINITY;
    for (const KsRow& row : report.ks) {
      if (row.coordinate != c + 1) continue;
      decreasing = decreasing && row.ks < previous;
      previous = row.ks;
    }
    report.ks_decreasing.push_back(decreasing);
  }
  return report;
}

}  // namespace critgraph
