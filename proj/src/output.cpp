#include "critgraph/output.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <system_error>

#include "critgraph/checks.hpp"
#include "critgraph/experiment.hpp"

namespace critgraph {

namespace {

using json = nlohmann::ordered_json;

std::string suffix(std::int64_t n, std::uint64_t seed) {
  return "_n" + std::to_string(n) + "_seed" + std::to_string(seed) + ".csv";
}

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json rank_json(const std::vector<RankStats>& stats) {
  json out = json::array();
  for (const auto& s : stats) {
    out.push_back({{"rank", s.rank}, {"mean", number(s.mean)}, {"sd", number(s.sd)},
                   {"stderr", number(s.stderr_)}});
  }
  return out;
}

json config_json(const ExperimentConfig& c) {
  json out;
  out["pmf"] = c.pmf ? c.pmf->to_string() : "";
  out["a"] = c.a;
  out["n_list"] = c.n_list;
  out["replicas"] = c.replicas;
  out["s0"] = c.s0;
  out["dt"] = c.dt;
  out["path_s0"] = c.path_s0;
  out["curve_step"] = c.curve_step;
  out["K"] = c.k;
  out["include_truncated"] = c.include_truncated;
  out["crit_tol"] = c.crit_tol;
  out["allow_noncritical"] = c.allow_noncritical;
  return out;
}

json moments_json(const MomentSummary& m) {
  return {{"EX", m.ex}, {"EX2", m.ex2}, {"EX3", m.ex3}, {"sigma", m.sigma},
          {"beta", m.beta}, {"critical", m.critical}};
}

json census_json(const CensusStudy& s) {
  return {{"n", s.n},
          {"replicas", s.replicas},
          {"rescaled_top_k", rank_json(s.rescaled)},
          {"diagnostics",
           {{"clamp_events", s.clamp_events},
            {"max_type_flags", s.max_type_flags},
            {"max_type_ratio", number(s.max_type_ratio)},
            {"incomplete_censuses", s.incomplete},
            {"checked_traces", s.checked_traces},
            {"invariant_failures", s.invariant_failures}}},
          {"interrupted", s.interrupted}};
}

void census_tables(const CensusStudy& s, std::uint64_t seed, std::vector<Table>& tables) {
  const double n23 = std::pow(std::cbrt(static_cast<double>(s.n)), 2);
  Table mean{"census" + suffix(s.n, seed), {"rank", "size", "rescaled"}, {}};
  for (const auto& r : s.rescaled) {
    mean.rows.push_back({std::to_string(r.rank), format_number(r.mean * n23), format_number(r.mean)});
  }
  Table each{"census_replicas" + suffix(s.n, seed), {"replica", "rank", "size", "rescaled"}, {}};
  for (std::size_t i = 0; i < s.top.size(); ++i) {
    for (std::size_t k = 0; k < s.top[i].size(); ++k) {
      each.rows.push_back({std::to_string(i), std::to_string(k + 1), std::to_string(s.top[i][k]),
                           format_number(static_cast<double>(s.top[i][k]) / n23)});
    }
  }
  tables.push_back(std::move(mean));
  tables.push_back(std::move(each));
}

json path_json(const PathStudy& s) {
  return {{"n", s.n},
          {"replicas", s.replicas},
          {"s_max", s.s_max},
          {"qv_slope", number(s.qv_slope)},
          {"qv_slope_target", s.moments.ex * s.moments.ex3},
          {"z_variance_slope", number(s.z_var_slope)},
          {"drift_fit", {{"linear", number(s.drift_fit.linear)}, {"beta", number(s.drift_fit.beta)}}},
          {"beta_fit", {{"mean", number(s.beta_fit_mean)}, {"stderr", number(s.beta_fit_stderr)},
                        {"replicas", s.replicas}}},
          {"drift_max_deviation", number(s.drift_max_deviation)},
          {"drift_min_slack", number(s.drift_min_slack)},
          {"martingale_at_s_max", {{"mean", number(s.martingale_mean)}, {"sd", number(s.martingale_sd)},
                                   {"replicas", s.replicas}}},
          {"sup_abs_z_p99", number(s.sup_abs_z_p99)},
          {"unrevealed_weight_deviation_median", number(s.weight_deviation_median)},
          {"diagnostics",
           {{"clamp_events", s.clamp_events},
            {"max_type_flags", s.max_type_flags},
            {"checked_traces", s.checked_traces},
            {"invariant_failures", s.invariant_failures}}},
          {"interrupted", s.interrupted}};
}

void path_table(const PathStudy& s, std::uint64_t seed, std::vector<Table>& tables) {
  Table t{"path" + suffix(s.n, seed),
          {"s", "mean_z", "stderr_z", "var_z", "mean_drift", "stderr_drift", "target_drift",
           "mean_qv", "stderr_qv", "target_qv"},
          {}};
  for (std::size_t j = 0; j < s.z.grid.size(); ++j) {
    t.rows.push_back({format_number(s.z.grid[j]), format_number(s.z.mean[j]),
                      format_number(s.z.stderr_[j]), format_number(s.z.sd[j] * s.z.sd[j]),
                      format_number(s.drift.mean[j]), format_number(s.drift.stderr_[j]),
                      format_number(s.drift_target[j]), format_number(s.qv.mean[j]),
                      format_number(s.qv.stderr_[j]), format_number(s.qv_target[j])});
  }
  tables.push_back(std::move(t));
}

json limit_json(const LimitStudy& s) {
  return {{"params",
           {{"a", s.params.a}, {"sigma", s.params.sigma}, {"beta", s.params.beta},
            {"s0", s.params.s0}, {"dt", s.params.dt}}},
          {"replicas", s.gamma.top.size()},
          {"truncated", s.gamma.truncated},
          {"truncation_rate", s.gamma.truncation_rate},
          {"top_k_truncated", s.gamma.top_k_truncated},
          {"top_k_truncation_rate", s.gamma.top_k_truncation_rate},
          {"gamma_top_k", rank_json(s.stats)}};
}

void limit_tables(const LimitStudy& s, std::uint64_t seed, std::vector<Table>& tables) {
  const std::string tail = "_seed" + std::to_string(seed) + ".csv";
  Table mean{"limit" + tail, {"rank", "mean", "sd", "stderr"}, {}};
  for (const auto& r : s.stats) {
    mean.rows.push_back({std::to_string(r.rank), format_number(r.mean), format_number(r.sd),
                         format_number(r.stderr_)});
  }
  Table each{"limit_samples" + tail, {"replica", "rank", "length"}, {}};
  for (std::size_t i = 0; i < s.gamma.top.size(); ++i) {
    for (std::size_t k = 0; k < s.gamma.top[i].size(); ++k) {
      each.rows.push_back({std::to_string(i), std::to_string(k + 1), format_number(s.gamma.top[i][k])});
    }
  }
  tables.push_back(std::move(mean));
  tables.push_back(std::move(each));
}

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string summary_filename(Mode mode, std::uint64_t seed) {
  return "summary_" + std::string(to_string(mode)) + "_seed" + std::to_string(seed) + ".json";
}

std::string log_filename(Mode mode, std::uint64_t seed) {
  return "run_" + std::string(to_string(mode)) + "_seed" + std::to_string(seed) + ".log";
}

RunArtifacts execute(const ExperimentConfig& c) {
  using clock = std::chrono::steady_clock;
  const auto started = clock::now();
  RunArtifacts out;
  out.mode = c.mode;
  out.seed = c.seed;
  json& s = out.summary;
  s["mode"] = std::string(to_string(c.mode));
  s["master_seed"] = c.seed;
  s["seed_scheme"] = std::string(kSeedScheme);
  s["config"] = config_json(c);
  out.log.push_back("mode " + std::string(to_string(c.mode)) + ", seed " + std::to_string(c.seed) +
                    ", workers " + std::to_string(c.workers));

  auto timed = [&](const std::string& what, auto&& fn) {
    const auto t0 = clock::now();
    fn();
    const double secs = std::chrono::duration<double>(clock::now() - t0).count();
    out.log.push_back(what + ": " + format_number(std::round(secs * 1000.0) / 1000.0) + " s");
  };

  switch (c.mode) {
    case Mode::kCensus: {
      s["moments"] = moments_json(compute_moments(*c.pmf, c.crit_tol));
      json per_n = json::array();
      for (std::int64_t n : c.n_list) {
        timed("census n=" + std::to_string(n), [&] {
          const CensusStudy study = run_census_study(*c.pmf, c.a, n, c.replicas, c.k, c.seed, c.workers);
          per_n.push_back(census_json(study));
          census_tables(study, c.seed, out.tables);
          out.interrupted = out.interrupted || study.interrupted;
        });
      }
      s["census"] = per_n;
      break;
    }
    case Mode::kPath: {
      s["moments"] = moments_json(compute_moments(*c.pmf, c.crit_tol));
      json per_n = json::array();
      for (std::int64_t n : c.n_list) {
        timed("path n=" + std::to_string(n), [&] {
          const PathStudy study =
              run_path_study(*c.pmf, c.a, n, c.replicas, c.path_s0, c.curve_step, c.seed, c.workers);
          per_n.push_back(path_json(study));
          if (study.replicas >= 2) path_table(study, c.seed, out.tables);
          out.interrupted = out.interrupted || study.interrupted;
        });
      }
      s["path"] = per_n;
      break;
    }
    case Mode::kLimit: {
      const MomentSummary m = compute_moments(*c.pmf, c.crit_tol);
      s["moments"] = moments_json(m);
      timed("limit", [&] {
        const LimitStudy study = run_limit_study(LimitParams::from_moments(m, c.a, c.s0, c.dt), c.replicas,
                                                 c.k, c.seed, c.workers, c.include_truncated);
        s["limit"] = limit_json(study);
        limit_tables(study, c.seed, out.tables);
      });
      break;
    }
    case Mode::kCompare: {
      CompareReport report;
      timed("compare", [&] { report = run_convergence_experiment(c); });
      s["moments"] = moments_json(report.moments);
      s["limit"] = limit_json(report.limit);
      limit_tables(report.limit, c.seed, out.tables);
      json per_n = json::array();
      Table ks{"ks_summary.csv", {"n", "coordinate", "ks", "p"}, {}};
      for (std::size_t i = 0; i < report.census.size(); ++i) {
        json entry = census_json(report.census[i]);
        entry["l2_mean_top_k"] = number(report.l2_mean[i]);
        entry["path"] = path_json(report.paths[i]);
        entry["beta_consistent"] = report.beta_consistent[i];
        json ks_rows = json::array();
        for (const KsRow& row : report.ks) {
          if (row.n != report.census[i].n) continue;
          ks_rows.push_back({{"coordinate", row.coordinate}, {"ks", row.ks}, {"p", row.p},
                             {"walk_replicas", report.census[i].replicas},
                             {"limit_replicas", report.limit.gamma.top.size()}});
        }
        entry["ks"] = ks_rows;
        per_n.push_back(entry);
        census_tables(report.census[i], c.seed, out.tables);
        if (report.paths[i].replicas >= 2) path_table(report.paths[i], c.seed, out.tables);
      }
      for (const KsRow& row : report.ks) {
        ks.rows.push_back({std::to_string(row.n), std::to_string(row.coordinate), format_number(row.ks),
                           format_number(row.p)});
      }
      s["per_n"] = per_n;
      json trend = json::array();
      for (std::size_t k = 0; k < report.ks_decreasing.size(); ++k) {
        trend.push_back({{"coordinate", k + 1}, {"ks_decreasing_in_n", static_cast<bool>(report.ks_decreasing[k])}});
      }
      s["trend"] = trend;
      out.tables.push_back(std::move(ks));
      out.interrupted = report.interrupted;
      break;
    }
    case Mode::kInvariants: {
      SuiteOptions options;
      options.seed = c.seed;
      options.workers = c.workers;
      options.quick = c.quick;
      std::vector<CheckResult> results;
      timed("invariant suite", [&] { results = run_invariant_suite(options); });
      json checks = json::array();
      Table t{"invariants_seed" + std::to_string(c.seed) + ".csv",
              {"module", "check", "status", "value", "threshold", "seed", "detail"}, {}};
      for (const CheckResult& r : results) {
        out.all_passed = out.all_passed && r.passed;
        checks.push_back({{"module", r.module}, {"check", r.name}, {"passed", r.passed},
                          {"value", number(r.value)}, {"threshold", number(r.threshold)},
                          {"seed", r.seed}, {"detail", r.detail}});
        std::string detail = r.detail;
        for (char& ch : detail) {
          if (ch == ',') ch = ';';
        }
        std::string name = r.name;
        for (char& ch : name) {
          if (ch == ',') ch = ';';
        }
        t.rows.push_back({r.module, name, r.passed ? "pass" : "FAIL", format_number(r.value),
                          format_number(r.threshold), std::to_string(r.seed), detail});
        out.log.push_back(std::string(r.passed ? "PASS " : "FAIL ") + r.module + " / " + r.name + " : " +
                          r.detail);
      }
      s["quick"] = c.quick;
      s["checks"] = checks;
      s["all_passed"] = out.all_passed;
      out.tables.push_back(std::move(t));
      break;
    }
  }
  s["interrupted"] = out.interrupted;
  const double total = std::chrono::duration<double>(clock::now() - started).count();
  out.log.push_back("wall-clock total: " + format_number(std::round(total * 1000.0) / 1000.0) + " s");
  return out;
}

std::vector<std::filesystem::path> emit_outputs(const RunArtifacts& artifacts,
                                                const std::filesystem::path& dir, bool force) {
  namespace fs = std::filesystem;
  std::vector<fs::path> targets;
  targets.push_back(dir / summary_filename(artifacts.mode, artifacts.seed));
  targets.push_back(dir / log_filename(artifacts.mode, artifacts.seed));
  for (const Table& t : artifacts.tables) targets.push_back(dir / t.filename);
  if (!force) {
    for (const fs::path& p : targets) {
      if (fs::exists(p)) {
        throw std::runtime_error("refusing to overwrite " + p.string() + " (use --force)");
      }
    }
  }
  fs::create_directories(dir);

  auto open = [](const fs::path& p) {
    std::ofstream f(p, std::ios::binary | std::ios::trunc);
    if (!f) throw std::system_error(errno, std::generic_category(), "cannot write " + p.string());
    return f;
  };
  auto finish = [](std::ofstream& f, const fs::path& p) {
    f.flush();
    if (!f) throw std::system_error(errno, std::generic_category(), "error writing " + p.string());
  };

  {
    auto f = open(targets[0]);
    f << artifacts.summary.dump(2) << '\n';
    finish(f, targets[0]);
  }
  {
    auto f = open(targets[1]);
    for (const auto& line : artifacts.log) f << line << '\n';
    finish(f, targets[1]);
  }
  for (std::size_t i = 0; i < artifacts.tables.size(); ++i) {
    const Table& t = artifacts.tables[i];
    const fs::path& p = targets[i + 2];
    auto f = open(p);
    for (std::size_t c = 0; c < t.header.size(); ++c) f << (c ? "," : "") << t.header[c];
    f << '\n';
    for (const auto& row : t.rows) {
      for (std::size_t c = 0; c < row.size(); ++c) f << (c ? "," : "") << row[c];
      f << '\n';
    }
    finish(f, p);
  }
  return targets;
}

}  // namespace critgraph
