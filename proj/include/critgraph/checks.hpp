#pragma once

// Verification batteries shared by the `invariants` subcommand and the
// acceptance suite. Each returns a CheckResult; none of them throws on a
// failed check.

#include <cstdint>
#include <string>
#include <vector>

#include "critgraph/dist.hpp"
#include "critgraph/experiment.hpp"
#include "critgraph/limit.hpp"

namespace critgraph {

struct CheckResult {
  std::string module;
  std::string name;
  bool passed = false;
  double value = 0.0;
  double threshold = 0.0;
  std::uint64_t seed = 0;
  std::string detail;
};

/// KS distance between gamma_1 simulated at dt and at dt/2 (sigma = beta =
/// 1, a = 0, s0 = 8, dt = 1e-4, 10^4 paths each), measured during
/// development with seed 20240611 and pinned here. Reproduce with
/// `critgraph_calibrate 20240611 10000`.
inline constexpr double kDiscretizationGate = 0.0088;

/// Fraction of paths whose open final excursion reaches the top 10 for
/// sigma = beta = 1, a = 0, s0 = 8, dt = 1e-4; 47 of 10^4 paths, seed
/// 20240611. The raw B(s0) > 0 flag fires on 0.8929 of the same paths.
inline constexpr double kMeasuredTruncationRate = 0.0047;

/// Allowed chi-square rejections at alpha = 0.001 across 100 seeds.
inline constexpr std::int64_t kFalseFailureBudget = 3;

CheckResult check_oracle_equivalence(const TypePmf& pmf, std::int64_t n, std::int64_t graphs,
                                     double a, std::uint64_t seed, unsigned workers);

struct ExactMatch {
  CheckResult result;
  std::size_t classes = 0;
  double tv = 0.0;
};

/// Total variation between the bucketed-walk census law (over `walks` runs)
/// and exhaustive enumeration; passes if tv <= 4 sqrt(classes / walks).
ExactMatch check_exact_distribution(const TypeCounts& counts, double a, std::int64_t walks,
                                    std::uint64_t seed, unsigned workers);

CheckResult check_structural_invariants(const TypePmf& pmf, std::int64_t n, std::int64_t walks,
                                        double a, std::uint64_t seed, unsigned workers);

/// max_s |mean drift - target| <= 4 stderr + 2 n^{-1/3}, pointwise.
CheckResult check_drift_limit(const PathStudy& study);

/// Fitted QV slope within `relative_tol` of E X E X^3.
CheckResult check_qv_limit(const PathStudy& study, double relative_tol = 0.05);

/// |mean (z - D)| at s_max within 4 sd / sqrt(R).
CheckResult check_martingale(const PathStudy& study);

/// Chi-square of size-biased root draws against x U^x / sum y U^y over
/// `seeds` independent streams of `draws` roots each.
CheckResult check_size_biased_root(const TypeCounts& counts, std::int64_t draws,
                                   std::int64_t seeds, std::uint64_t seed);

/// Chi-square of marked types over steps i <= n^{2/3} against the
/// size-biased law, one walk per seed.
CheckResult check_marked_type_law(const TypePmf& pmf, std::int64_t n, std::int64_t seeds,
                                  std::uint64_t seed);

/// Chi-square of sample_types against the pmf over `seeds` streams.
CheckResult check_sample_types(const TypePmf& pmf, std::int64_t n, std::int64_t seeds,
                               std::uint64_t seed);

/// Medians of max_j |n^{-1} sum_x x U^x(j) - E X| over j <= n^{2/3} must
/// decrease along `n_list`.
CheckResult check_weight_trend(const TypePmf& pmf, const std::vector<std::int64_t>& n_list,
                           std::int64_t replicas, std::uint64_t seed, unsigned workers);

CheckResult check_poisson_ratio(const TypeCounts& counts, Type marked_type, double a,
                                std::int64_t samples, std::uint64_t seed);

/// KS(gamma_1 at dt, gamma_1 at dt/2) <= bound.
CheckResult check_discretization_gate(const LimitParams& params, std::int64_t paths,
                                      double bound, std::uint64_t seed, unsigned workers);

/// Truncation rate of the final excursion below `bound`.
CheckResult check_truncation_rate(const LimitParams& params, std::int64_t paths, double bound,
                                  std::uint64_t seed, unsigned workers);

/// Brownian-only sanity (beta = 0, a = 0, horizon 1): the time of the last
/// zero of the reflected path, i.e. the location of the minimum of W on
/// [0, 1], has the arcsine law with mean 1/2.
CheckResult check_arcsine(std::int64_t paths, double dt, std::uint64_t seed, unsigned workers);

/// Ratio of the 99th percentiles of sup_{s <= 1} |Z_n(s)| at two sizes lies
/// within [1 / (1 + tol), 1 + tol].
CheckResult check_stochastic_boundedness(const PathStudy& small, const PathStudy& large,
                                         double tol = 0.25);

/// Mean Z_n(1) of a supercritical pmf exceeds `threshold`.
CheckResult check_supercritical_drift(const PathStudy& study, double threshold = 1.0);

/// |mean Z_n(s_max) + (beta/2) s_max^2 - a s_max| within 4 stderr + 2 n^{-1/3}.
CheckResult check_critical_endpoint(const PathStudy& study);

struct SuiteOptions {
  std::uint64_t seed = 42;
  unsigned workers = 1;
  bool quick = false;  // reduced sizes for smoke runs
};

/// Default battery for the `invariants` subcommand.
std::vector<CheckResult> run_invariant_suite(const SuiteOptions& options);

}  // namespace critgraph
