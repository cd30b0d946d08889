#include "critgraph/checks.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "critgraph/oracle.hpp"
#include "critgraph/stats.hpp"
#include "critgraph/walk.hpp"

namespace critgraph {

namespace {

constexpr double kAlpha = 0.001;
constexpr std::int64_t kChunk = 10000;

std::string fmt(double v) {
  std::ostringstream out;
  out.precision(6);
  out << v;
  return out.str();
}

CheckResult make(std::string module, std::string name, std::uint64_t seed) {
  CheckResult r;
  r.module = std::move(module);
  r.name = std::move(name);
  r.seed = seed;
  return r;
}

std::int64_t chunks_for(std::int64_t total) { return (total + kChunk - 1) / kChunk; }

}  // namespace

CheckResult check_oracle_equivalence(const TypePmf& pmf, std::int64_t n, std::int64_t graphs,
                                     double a, std::uint64_t seed, unsigned workers) {
  CheckResult r = make("oracle", "walk_on_graph == union-find [" + pmf.to_string() + "]", seed);
  const std::uint64_t tag = label_tag("oracle-equivalence");
  std::vector<std::uint8_t> mismatch(static_cast<std::size_t>(graphs), 0);
  parallel_for(mismatch.size(), workers, [&](std::size_t g) {
    Rng rng = make_stream(seed, {tag, static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(g)});
    const auto types = sample_types(pmf, n, rng).expand();
    const ExplicitGraph graph = sample_graph(types, a, rng);
    const ComponentCensus truth = components_union_find(graph);
    const ComponentCensus walked = walk_on_graph(graph, rng);
    mismatch[g] = truth.sizes != walked.sizes ? 1 : 0;
  });
  std::int64_t bad = 0;
  std::int64_t first = -1;
  for (std::size_t g = 0; g < mismatch.size(); ++g) {
    if (mismatch[g] && first < 0) first = static_cast<std::int64_t>(g);
    bad += mismatch[g];
  }
  r.value = static_cast<double>(bad);
  r.threshold = 0.0;
  r.passed = bad == 0;
  r.detail = std::to_string(graphs) + " graphs at n=" + std::to_string(n) + ", mismatches=" +
             std::to_string(bad) + (first >= 0 ? ", first graph index " + std::to_string(first) : "");
  return r;
}

ExactMatch check_exact_distribution(const TypeCounts& counts, double a, std::int64_t walks,
                                    std::uint64_t seed, unsigned workers) {
  ExactMatch out;
  out.result = make("walk", "census law == exhaustive enumeration (n=" +
                                std::to_string(counts.n()) + ")", seed);
  const auto types = counts.expand();
  const ExactCensusLaw law = enumerate_small_exact(types, a);
  const std::uint64_t tag = label_tag("exact-distribution");
  const std::int64_t chunks = chunks_for(walks);
  std::vector<std::map<std::vector<std::int64_t>, std::int64_t>> tallies(static_cast<std::size_t>(chunks));
  parallel_for(tallies.size(), workers, [&](std::size_t c) {
    Rng rng = make_stream(seed, {tag, static_cast<std::uint64_t>(counts.n()), static_cast<std::uint64_t>(c)});
    const std::int64_t begin = static_cast<std::int64_t>(c) * kChunk;
    const std::int64_t end = std::min(walks, begin + kChunk);
    for (std::int64_t w = begin; w < end; ++w) {
      const WalkTrace trace = run_walk(counts, a, exhaustion_horizon(counts), rng);
      ++tallies[c][census_from_trace(trace, counts).sizes];
    }
  });
  std::map<std::vector<std::int64_t>, std::int64_t> total;
  for (const auto& t : tallies) {
    for (const auto& [k, v] : t) total[k] += v;
  }
  double tv = 0.0;
  for (const auto& [sizes, p] : law.probability) {
    const auto it = total.find(sizes);
    const double emp = it == total.end() ? 0.0 : static_cast<double>(it->second) / static_cast<double>(walks);
    tv += std::fabs(emp - static_cast<double>(p));
  }
  for (const auto& [sizes, c] : total) {
    if (!law.probability.contains(sizes)) tv += static_cast<double>(c) / static_cast<double>(walks);
  }
  tv *= 0.5;
  out.classes = law.probability.size();
  out.tv = tv;
  out.result.value = tv;
  out.result.threshold = 4.0 * std::sqrt(static_cast<double>(out.classes) / static_cast<double>(walks));
  out.result.passed = tv <= out.result.threshold;
  out.result.detail = std::to_string(walks) + " walks, " + std::to_string(out.classes) +
                      " census classes, TV=" + fmt(tv);
  return out;
}

CheckResult check_structural_invariants(const TypePmf& pmf, std::int64_t n, std::int64_t walks,
                                        double a, std::uint64_t seed, unsigned workers) {
  CheckResult r = make("walk", "conservation / z=I-roots / hitting times [" + pmf.to_string() + "]", seed);
  const std::uint64_t tag = label_tag("structural");
  std::vector<std::string> failure(static_cast<std::size_t>(walks));
  parallel_for(failure.size(), workers, [&](std::size_t w) {
    Rng rng = make_stream(seed, {tag, static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(w)});
    const TypeCounts counts = sample_types(pmf, n, rng);
    if (counts.total_weight() == 0) return;
    try {
      const WalkTrace trace = run_walk(counts, a, exhaustion_horizon(counts), rng);
      if (trace.stop_reason != StopReason::kExhausted) {
        failure[w] = "walk did not exhaust";
        return;
      }
      failure[w] = check_trace_invariants(trace, counts);
    } catch (const std::exception& e) {
      failure[w] = e.what();
    }
  });
  std::int64_t bad = 0;
  std::string first;
  for (std::size_t w = 0; w < failure.size(); ++w) {
    if (failure[w].empty()) continue;
    if (bad++ == 0) first = "walk " + std::to_string(w) + ": " + failure[w];
  }
  r.value = static_cast<double>(bad);
  r.passed = bad == 0;
  r.detail = std::to_string(walks) + " walks at n=" + std::to_string(n) + ", violations=" +
             std::to_string(bad) + (first.empty() ? "" : "; " + first);
  return r;
}

CheckResult check_drift_limit(const PathStudy& s) {
  CheckResult r = make("walk", "drift -> a s - (beta/2) s^2 (n=" + std::to_string(s.n) +
                                   ", beta=" + fmt(s.moments.beta) + ")", 0);
  r.value = s.drift_max_deviation;
  r.threshold = s.drift_max_deviation + s.drift_min_slack;
  r.passed = s.replicas >= 2 && s.drift_min_slack >= 0.0;
  r.detail = "max |mean D - target| = " + fmt(s.drift_max_deviation) +
             ", worst slack vs 4 stderr + 2 n^-1/3 = " + fmt(s.drift_min_slack) + " over " +
             std::to_string(s.replicas) + " replicas";
  return r;
}

CheckResult check_qv_limit(const PathStudy& s, double relative_tol) {
  const double target = s.moments.ex * s.moments.ex3;
  CheckResult r = make("walk", "QV slope -> E X E X^3 (n=" + std::to_string(s.n) + ")", 0);
  r.value = std::fabs(s.qv_slope / target - 1.0);
  r.threshold = relative_tol;
  r.passed = r.value <= relative_tol;
  r.detail = "slope=" + fmt(s.qv_slope) + " target=" + fmt(target) +
             " (Var Z_n slope=" + fmt(s.z_var_slope) + ")";
  return r;
}

CheckResult check_martingale(const PathStudy& s) {
  CheckResult r = make("walk", "z - D has mean 0 (n=" + std::to_string(s.n) + ")", 0);
  r.value = std::fabs(s.martingale_mean);
  r.threshold = 4.0 * s.martingale_sd / std::sqrt(static_cast<double>(s.replicas));
  r.passed = r.value <= r.threshold;
  r.detail = "mean=" + fmt(s.martingale_mean) + " sd=" + fmt(s.martingale_sd);
  return r;
}

CheckResult check_size_biased_root(const TypeCounts& counts, std::int64_t draws,
                                   std::int64_t seeds, std::uint64_t seed) {
  CheckResult r = make("walk", "size-biased root law", seed);
  const std::uint64_t tag = label_tag("root-law");
  std::vector<double> expected;
  std::vector<std::size_t> bucket_of;
  const double weight = static_cast<double>(counts.total_weight());
  for (std::size_t b = 0; b < counts.entries().size(); ++b) {
    const auto& e = counts.entries()[b];
    if (e.type == 0) continue;
    expected.push_back(static_cast<double>(e.type * e.count) / weight);
    bucket_of.push_back(b);
  }
  std::int64_t failures = 0;
  double worst_p = 1.0;
  for (std::int64_t s = 0; s < seeds; ++s) {
    Rng rng = make_stream(seed, {tag, static_cast<std::uint64_t>(s)});
    std::vector<std::int64_t> observed(expected.size(), 0);
    for (std::int64_t d = 0; d < draws; ++d) {
      const WalkState state = init_walk(counts, 0.0, rng);
      const auto it = std::find(bucket_of.begin(), bucket_of.end(), state.marked);
      ++observed[static_cast<std::size_t>(it - bucket_of.begin())];
    }
    if (expected.size() < 2) continue;
    const TestResult t = chi_square_gof(observed, expected);
    worst_p = std::min(worst_p, t.p_value);
    if (t.p_value < kAlpha) ++failures;
  }
  r.value = static_cast<double>(failures);
  r.threshold = static_cast<double>(kFalseFailureBudget);
  r.passed = failures <= kFalseFailureBudget;
  r.detail = std::to_string(seeds) + " seeds x " + std::to_string(draws) +
             " draws, rejections at alpha=0.001: " + std::to_string(failures) +
             ", smallest p=" + fmt(worst_p);
  return r;
}

CheckResult check_marked_type_law(const TypePmf& pmf, std::int64_t n, std::int64_t seeds,
                                  std::uint64_t seed) {
  CheckResult r = make("walk", "marked types ~ size-biased law [" + pmf.to_string() + "]", seed);
  const TypePmf biased = size_biased_pmf(pmf);
  const std::uint64_t tag = label_tag("marked-law");
  const auto horizon = static_cast<std::int64_t>(std::floor(std::pow(std::cbrt(static_cast<double>(n)), 2)));
  std::int64_t failures = 0;
  double worst_p = 1.0;
  std::int64_t steps = 0;
  for (std::int64_t s = 0; s < seeds; ++s) {
    Rng rng = make_stream(seed, {tag, static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(s)});
    const TypeCounts counts = sample_types(pmf, n, rng);
    const WalkTrace trace = run_walk(counts, 0.0, horizon, rng);
    std::vector<std::int64_t> observed(biased.size(), 0);
    for (Type x : trace.marked_type) {
      const auto it = std::lower_bound(biased.support().begin(), biased.support().end(), x);
      ++observed[static_cast<std::size_t>(it - biased.support().begin())];
    }
    steps += static_cast<std::int64_t>(trace.steps());
    const TestResult t = chi_square_gof(observed, biased.probs());
    worst_p = std::min(worst_p, t.p_value);
    if (t.p_value < kAlpha) ++failures;
  }
  r.value = static_cast<double>(failures);
  r.threshold = static_cast<double>(kFalseFailureBudget);
  r.passed = failures <= kFalseFailureBudget;
  r.detail = std::to_string(seeds) + " walks at n=" + std::to_string(n) + " (" +
             std::to_string(steps) + " marked steps), rejections: " + std::to_string(failures) +
             ", smallest p=" + fmt(worst_p);
  return r;
}

CheckResult check_sample_types(const TypePmf& pmf, std::int64_t n, std::int64_t seeds,
                               std::uint64_t seed) {
  CheckResult r = make("dist", "sample_types ~ multinomial [" + pmf.to_string() + "]", seed);
  const std::uint64_t tag = label_tag("sample-types");
  std::int64_t failures = 0;
  double worst_p = 1.0;
  for (std::int64_t s = 0; s < seeds; ++s) {
    Rng rng = make_stream(seed, {tag, static_cast<std::uint64_t>(s)});
    const TypeCounts counts = sample_types(pmf, n, rng);
    std::vector<std::int64_t> observed;
    for (Type x : pmf.support()) observed.push_back(counts.count_of(x));
    const TestResult t = chi_square_gof(observed, pmf.probs());
    worst_p = std::min(worst_p, t.p_value);
    if (t.p_value < kAlpha) ++failures;
  }
  r.value = static_cast<double>(failures);
  r.threshold = static_cast<double>(kFalseFailureBudget);
  r.passed = failures <= kFalseFailureBudget;
  r.detail = std::to_string(seeds) + " samples of n=" + std::to_string(n) + ", rejections: " +
             std::to_string(failures) + ", smallest p=" + fmt(worst_p);
  return r;
}

CheckResult check_weight_trend(const TypePmf& pmf, const std::vector<std::int64_t>& n_list,
                           std::int64_t replicas, std::uint64_t seed, unsigned workers) {
  CheckResult r = make("walk", "unrevealed weight -> E X, trend in n", seed);
  std::vector<double> medians;
  for (std::int64_t n : n_list) {
    medians.push_back(run_path_study(pmf, 0.0, n, replicas, 1.0, 0.05, seed, workers).weight_deviation_median);
  }
  bool decreasing = true;
  for (std::size_t i = 1; i < medians.size(); ++i) decreasing = decreasing && medians[i] < medians[i - 1];
  r.passed = decreasing;
  r.value = medians.empty() ? 0.0 : medians.back();
  for (std::size_t i = 0; i < medians.size(); ++i) {
    r.detail += (i ? ", " : "medians: ") + std::string("n=") + std::to_string(n_list[i]) + ":" + fmt(medians[i]);
  }
  return r;
}

CheckResult check_poisson_ratio(const TypeCounts& counts, Type marked_type, double a,
                                std::int64_t samples, std::uint64_t seed) {
  CheckResult r = make("oracle", "neighbour type share ratio (n=" + std::to_string(counts.n()) + ")", seed);
  Rng rng = make_stream(seed, {label_tag("poisson-ratio")});
  const PoissonRatioReport rep = poisson_ratio_spot_check(counts, marked_type, a, samples, rng);
  const double slack = 1.0 / std::cbrt(static_cast<double>(counts.n()));
  r.passed = true;
  r.threshold = 0.1;
  for (const auto& row : rep.rows) {
    const double dev = std::fabs(row.ratio - 1.0);
    const double half = 0.5 * (row.ratio_high - row.ratio_low);
    r.value = std::max(r.value, dev);
    r.passed = r.passed && dev <= half + slack && dev <= 0.1;
    r.detail += "x=" + std::to_string(row.type) + ": ratio " + fmt(row.ratio) + " [" +
                fmt(row.ratio_low) + ", " + fmt(row.ratio_high) + "]; ";
  }
  return r;
}

CheckResult check_discretization_gate(const LimitParams& params, std::int64_t paths,
                                      double bound, std::uint64_t seed, unsigned workers) {
  CheckResult r = make("limit", "gamma_1 stable under dt -> dt/2", seed);
  LimitParams half = params;
  half.dt = params.dt / 2.0;
  const GammaSample coarse = sample_gamma(params, paths, 1, derive_seed(seed, {1}), workers);
  const GammaSample fine = sample_gamma(half, paths, 1, derive_seed(seed, {2}), workers);
  std::vector<double> a, b;
  for (const auto& row : coarse.top) a.push_back(row[0]);
  for (const auto& row : fine.top) b.push_back(row[0]);
  const TestResult ks = two_sample_ks(a, b);
  r.value = ks.statistic;
  r.threshold = bound;
  r.passed = ks.statistic <= bound;
  r.detail = std::to_string(paths) + " paths per grid, KS=" + fmt(ks.statistic) + " p=" + fmt(ks.p_value);
  return r;
}

CheckResult check_truncation_rate(const LimitParams& params, std::int64_t paths, double bound,
                                  std::uint64_t seed, unsigned workers) {
  CheckResult r = make("limit", "final-excursion truncation rate (top-10)", seed);
  const GammaSample g = sample_gamma(params, paths, 10, seed, workers);
  r.value = g.top_k_truncation_rate;
  r.threshold = bound;
  r.passed = g.top_k_truncation_rate < bound;
  r.detail = std::to_string(g.top_k_truncated) + " of " + std::to_string(paths) +
             " open tails reach the top 10 at s0=" + fmt(params.s0) + "; B(s0)>0 on " +
             std::to_string(g.truncated);
  return r;
}

CheckResult check_arcsine(std::int64_t paths, double dt, std::uint64_t seed, unsigned workers) {
  CheckResult r = make("limit", "Brownian argmin ~ arcsine (mean 1/2)", seed);
  LimitParams p;
  p.a = 0.0;
  p.beta = 0.0;
  p.sigma = 1.0;
  p.s0 = 1.0;
  p.dt = dt;
  const std::uint64_t tag = label_tag("arcsine");
  std::vector<double> last_zero(static_cast<std::size_t>(paths), 0.0);
  parallel_for(last_zero.size(), workers, [&](std::size_t i) {
    Rng rng = make_stream(seed, {tag, static_cast<std::uint64_t>(i)});
    const LimitPath path = simulate_limit_path(p, rng);
    last_zero[i] = static_cast<double>(path.zero_set.back()) * dt;
  });
  const double mean = sample_mean(last_zero);
  const double sd = sample_sd(last_zero);
  r.value = std::fabs(mean - 0.5);
  r.threshold = 3.0 * sd / std::sqrt(static_cast<double>(paths));
  r.passed = r.value <= r.threshold;
  r.detail = "mean=" + fmt(mean) + " sd=" + fmt(sd) + " (arcsine sd=" + fmt(std::sqrt(0.125)) + ")";
  return r;
}

CheckResult check_stochastic_boundedness(const PathStudy& small, const PathStudy& large, double tol) {
  CheckResult r = make("walk", "sup |Z_n| stochastically bounded", 0);
  const double ratio = large.sup_abs_z_p99 / small.sup_abs_z_p99;
  r.value = ratio;
  r.threshold = 1.0 + tol;
  r.passed = ratio <= 1.0 + tol && ratio >= 1.0 / (1.0 + tol);
  r.detail = "p99 sup|Z| n=" + std::to_string(small.n) + ": " + fmt(small.sup_abs_z_p99) +
             ", n=" + std::to_string(large.n) + ": " + fmt(large.sup_abs_z_p99);
  return r;
}

CheckResult check_supercritical_drift(const PathStudy& s, double threshold) {
  CheckResult r = make("walk", "E X^2 > 1: mean Z_n(1) grows linearly (n=" + std::to_string(s.n) + ")", 0);
  r.value = s.z.mean.back();
  r.threshold = threshold;
  r.passed = r.value > threshold;
  r.detail = "E X^2=" + fmt(s.moments.ex2) + ", mean Z_n(" + fmt(s.s_max) + ")=" + fmt(r.value) +
             " +- " + fmt(s.z.stderr_.back());
  return r;
}

CheckResult check_critical_endpoint(const PathStudy& s) {
  CheckResult r = make("walk", "critical: mean Z_n(1) -> a - beta/2 (n=" + std::to_string(s.n) + ")", 0);
  const double target = s.a * s.s_max - 0.5 * s.moments.beta * s.s_max * s.s_max;
  r.value = std::fabs(s.z.mean.back() - target);
  r.threshold = 4.0 * s.z.stderr_.back() + 2.0 / std::cbrt(static_cast<double>(s.n));
  r.passed = r.value <= r.threshold;
  r.detail = "mean Z_n=" + fmt(s.z.mean.back()) + " target=" + fmt(target);
  return r;
}

std::vector<CheckResult> run_invariant_suite(const SuiteOptions& o) {
  const std::int64_t scale = o.quick ? 10 : 1;
  const TypePmf unit = parse_pmf("1:1");
  const TypePmf two_atom = parse_pmf("0:3/4, 2:1/4");
  const TypePmf three_atom = parse_pmf("0:1/2, 1:1/3, 2:1/6");
  const TypePmf supercritical = parse_pmf("0:0.5, 1:0.3, 2:0.2");
  const std::uint64_t seed = o.seed;
  const unsigned w = o.workers;
  std::vector<CheckResult> out;

  for (const TypePmf* pmf : {&unit, &two_atom}) {
    out.push_back(check_oracle_equivalence(*pmf, 200, 2000 / scale, 0.0, seed, w));
  }
  out.push_back(check_exact_distribution(TypeCounts::from_map({{1, 3}}), 0.0, 200000 / scale, seed, w).result);
  out.push_back(
      check_exact_distribution(TypeCounts::from_map({{1, 3}, {2, 1}}), 0.0, 200000 / scale, seed, w).result);
  for (const TypePmf* pmf : {&unit, &two_atom, &three_atom}) {
    out.push_back(check_structural_invariants(*pmf, 1000, 1000 / scale, 0.0, seed, w));
  }
  out.push_back(check_sample_types(two_atom, 100000, 100, seed));
  out.push_back(check_size_biased_root(TypeCounts::from_map({{1, 3}, {2, 1}}), 10000 / scale, 100, seed));
  out.push_back(check_marked_type_law(three_atom, 100000, 100, seed));

  const std::int64_t path_replicas = 400 / scale;
  for (const TypePmf* pmf : {&unit, &two_atom}) {
    const PathStudy s = run_path_study(*pmf, 0.0, 100000, path_replicas, 1.0, 0.01, seed, w);
    out.push_back(check_drift_limit(s));
    out.push_back(check_qv_limit(s));
    out.push_back(check_martingale(s));
  }
  {
    const PathStudy small = run_path_study(unit, 0.0, 10000, 1000 / scale, 1.0, 0.01, seed, w);
    const PathStudy large = run_path_study(unit, 0.0, 100000, 1000 / scale, 1.0, 0.01, seed, w);
    out.push_back(check_stochastic_boundedness(small, large));
  }
  out.push_back(check_weight_trend(unit, {10000, 100000, 1000000}, 100 / scale, seed, w));
  out.push_back(check_supercritical_drift(
      run_path_study(supercritical, 0.0, 1000000, 200 / scale, 1.0, 0.05, seed, w)));

  out.push_back(check_poisson_ratio(TypeCounts::from_map({{1, 100}}), 1, 0.0, 100000, seed));
  out.push_back(check_poisson_ratio(TypeCounts::from_map({{1, 50}, {2, 25}}), 2, 0.0, 1000000 / scale, seed));

  LimitParams standard;
  out.push_back(check_discretization_gate(standard, 10000 / scale,
                                            2.0 * kDiscretizationGate * std::sqrt(static_cast<double>(scale)),
                                            seed, w));
  out.push_back(check_truncation_rate(standard, 2000 / scale, 0.01, seed, w));
  out.push_back(check_arcsine(10000 / scale, 1e-3, seed, w));
  return out;
}

}  // namespace critgraph
