#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "critgraph/checks.hpp"
#include "critgraph/config.hpp"
#include "critgraph/experiment.hpp"
#include "critgraph/output.hpp"

using namespace critgraph;
namespace fs = std::filesystem;

namespace {

ExperimentConfig parsed(const std::string& text) {
  ExperimentConfig c = parse_config(text);
  validate_config(c);
  return c;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("critgraph_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string message_of(const std::string& text) {
  try {
    parsed(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(Config, PointMassIsCritical) {
  const ExperimentConfig c = parsed("a = 0\nn_list = 1000\n[pmf]\n1:1\n");
  ASSERT_TRUE(c.pmf);
  EXPECT_TRUE(compute_moments(*c.pmf).critical);
  EXPECT_EQ(c.n_list, (std::vector<std::int64_t>{1000}));
  EXPECT_EQ(c.dt, 1e-4);
  EXPECT_EQ(c.s0, 8.0);
  EXPECT_EQ(c.k, 10u);
}

TEST(Config, TwoAtomIsCritical) {
  const ExperimentConfig c = parsed("[pmf]\n0:0.75, 2:0.25\n");
  EXPECT_TRUE(compute_moments(*c.pmf).critical);
}

TEST(Config, NonCriticalCompareRejected) {
  const std::string text = "mode = compare\n[pmf]\n1:0.9, 2:0.1\n";
  EXPECT_NE(message_of(text).find("critical"), std::string::npos);
  EXPECT_NO_THROW(parsed("allow_noncritical = true\n" + text));
  EXPECT_NO_THROW(parsed("mode = census\n[pmf]\n1:0.9, 2:0.1\n"));
}

TEST(Config, ErrorsCarryLineNumbers) {
  EXPECT_NE(message_of("a = 0\nbogus = 3\n").find("line 2"), std::string::npos);
  EXPECT_NE(message_of("a = 0\n\nreplicas = many\n").find("line 3"), std::string::npos);
  EXPECT_NE(message_of("[pmf]\n1:1\n2:x\n").find("line 3"), std::string::npos);
  EXPECT_NE(message_of("a = 0\nno equals sign\n").find("line 2"), std::string::npos);
}

TEST(Config, InvariantsNamed) {
  EXPECT_NE(message_of("n_list = 100, 10\n[pmf]\n1:1\n").find("n_list"), std::string::npos);
  EXPECT_NE(message_of("replicas = 0\n[pmf]\n1:1\n").find("replicas"), std::string::npos);
  EXPECT_NE(message_of("K = 0\n[pmf]\n1:1\n").find("K"), std::string::npos);
  EXPECT_NE(message_of("[pmf]\n1:0.5\n").find("sum to 1"), std::string::npos);
  EXPECT_NE(message_of("mode = census\n").find("pmf"), std::string::npos);
  EXPECT_NO_THROW(parsed("mode = invariants\n"));
}

TEST(Seeds, PureFunctionOfCoordinates) {
  EXPECT_EQ(derive_seed(42, {1, 2, 3}), derive_seed(42, {1, 2, 3}));
  EXPECT_NE(derive_seed(42, {1, 2, 3}), derive_seed(42, {1, 3, 2}));
  EXPECT_NE(derive_seed(42, {1}), derive_seed(43, {1}));
  Rng a = walk_stream(42, 1000, 7), b = walk_stream(42, 1000, 7);
  EXPECT_EQ(a(), b());
}

TEST(Parallel, RethrowsAndFillsSlots) {
  std::vector<int> out(100, 0);
  parallel_for(out.size(), 4, [&](std::size_t i) { out[i] = static_cast<int>(i * i); });
  for (std::size_t i = 0; i < out.size(); ++i) EXPECT_EQ(out[i], static_cast<int>(i * i));
  EXPECT_THROW(parallel_for(10, 3,
                            [](std::size_t i) {
                              if (i == 6) throw std::runtime_error("boom");
                            }),
               std::runtime_error);
}

TEST(Output, NamingContract) {
  ExperimentConfig c = parsed("mode = census\nn_list = 10000\nreplicas = 3\nK = 2\n[pmf]\n1:1\n");
  const RunArtifacts r = execute(c);
  bool found = false;
  for (const Table& t : r.tables) {
    if (t.filename == "census_n10000_seed42.csv") {
      found = true;
      EXPECT_EQ(t.header, (std::vector<std::string>{"rank", "size", "rescaled"}));
      EXPECT_EQ(t.rows.size(), 2u);
    }
  }
  EXPECT_TRUE(found);
  EXPECT_EQ(summary_filename(Mode::kCensus, 42), "summary_census_seed42.json");
}

TEST(Output, RefusesOverwrite) {
  ExperimentConfig c = parsed("mode = limit\nreplicas = 4\ns0 = 1\ndt = 0.001\n[pmf]\n1:1\n");
  const RunArtifacts r = execute(c);
  const fs::path dir = scratch("overwrite");
  const auto written = emit_outputs(r, dir, false);
  EXPECT_FALSE(written.empty());
  EXPECT_THROW(emit_outputs(r, dir, false), std::runtime_error);
  EXPECT_NO_THROW(emit_outputs(r, dir, true));
  fs::remove_all(dir);
}

TEST(Output, CompareTables) {
  ExperimentConfig c = parsed(
      "mode = compare\nn_list = 1000, 8000\nreplicas = 20\nK = 2\ns0 = 4\ndt = 0.001\n[pmf]\n1:1\n");
  const RunArtifacts r = execute(c);
  const Table* ks = nullptr;
  for (const Table& t : r.tables) {
    if (t.filename == "ks_summary.csv") ks = &t;
  }
  ASSERT_NE(ks, nullptr);
  EXPECT_EQ(ks->header, (std::vector<std::string>{"n", "coordinate", "ks", "p"}));
  EXPECT_EQ(ks->rows.size(), 4u);
  EXPECT_TRUE(r.summary.contains("seed_scheme"));
  EXPECT_EQ(r.summary["config"]["dt"], 0.001);
}

TEST(Determinism, WorkerCountIrrelevant) {
  const std::string text =
      "mode = compare\nn_list = 1000, 4000\nreplicas = 12\nK = 3\ns0 = 4\ndt = 0.001\n[pmf]\n0:1/2, 1:1/3, 2:1/6\n";
  ExperimentConfig one = parsed("workers = 1\n" + text);
  ExperimentConfig many = parsed("workers = 5\n" + text);
  const RunArtifacts a = execute(one), b = execute(many);
  EXPECT_EQ(a.summary.dump(2), b.summary.dump(2));
  ASSERT_EQ(a.tables.size(), b.tables.size());
  for (std::size_t i = 0; i < a.tables.size(); ++i) EXPECT_EQ(a.tables[i].rows, b.tables[i].rows);
}

TEST(Checks, SmallBatteriesPass) {
  const CheckResult ok = check_oracle_equivalence(parse_pmf("0:3/4, 2:1/4"), 60, 50, 0.0, 3, 1);
  EXPECT_TRUE(ok.passed) << ok.detail;
  const ExactMatch exact = check_exact_distribution(TypeCounts::from_map({{1, 3}}), 0.0, 20000, 3, 2);
  EXPECT_TRUE(exact.result.passed) << exact.result.detail;
  EXPECT_EQ(exact.classes, 3u);
}

TEST(Cli, RunsAndRefusesOverwrite) {
  const fs::path dir = scratch("cli");
  const fs::path cfg = dir.string() + ".cfg";
  {
    std::ofstream f(cfg);
    f << "n_list = 500\nreplicas = 3\n";
  }
  const std::string cmd = std::string(CRITGRAPH_CLI) + " census --config " + cfg.string() +
                          " --pmf \"1:1\" --out " + dir.string() + " --seed 5";
  EXPECT_EQ(std::system((cmd + " > /dev/null 2>&1").c_str()), 0);
  EXPECT_TRUE(fs::exists(dir / "census_n500_seed5.csv"));
  EXPECT_TRUE(fs::exists(dir / "summary_census_seed5.json"));
  EXPECT_NE(std::system((cmd + " > /dev/null 2>&1").c_str()), 0);
  EXPECT_EQ(std::system((cmd + " --force > /dev/null 2>&1").c_str()), 0);
  const std::string bad = std::string(CRITGRAPH_CLI) + " compare --pmf \"1:0.9, 2:0.1\" --out " +
                          dir.string() + " > /dev/null 2>&1";
  EXPECT_NE(std::system(bad.c_str()), 0);
  fs::remove_all(dir);
  fs::remove(cfg);
}
