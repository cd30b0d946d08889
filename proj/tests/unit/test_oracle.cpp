#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "critgraph/oracle.hpp"

using namespace critgraph;

namespace {

ExplicitGraph make_graph(std::int64_t n, std::vector<std::pair<std::int32_t, std::int32_t>> edges) {
  ExplicitGraph g;
  g.n = n;
  g.types.assign(static_cast<std::size_t>(n), 1);
  g.edges = std::move(edges);
  return g;
}

// Plain recursive DFS, kept deliberately different from the library code.
std::vector<std::int64_t> dfs_sizes(const ExplicitGraph& g) {
  std::vector<std::vector<int>> adj(static_cast<std::size_t>(g.n));
  for (auto [i, j] : g.edges) {
    adj[i].push_back(j);
    adj[j].push_back(i);
  }
  std::vector<char> seen(adj.size(), 0);
  std::vector<std::int64_t> sizes;
  for (std::size_t v = 0; v < adj.size(); ++v) {
    if (seen[v]) continue;
    std::int64_t size = 0;
    std::vector<int> stack{static_cast<int>(v)};
    seen[v] = 1;
    while (!stack.empty()) {
      const int u = stack.back();
      stack.pop_back();
      ++size;
      for (int w : adj[u]) {
        if (!seen[w]) {
          seen[w] = 1;
          stack.push_back(w);
        }
      }
    }
    sizes.push_back(size);
  }
  std::sort(sizes.rbegin(), sizes.rend());
  return sizes;
}

}  // namespace

TEST(UnionFind, SmallGraphs) {
  EXPECT_EQ(components_union_find(make_graph(3, {{0, 1}, {1, 2}, {0, 2}})).sizes,
            (std::vector<std::int64_t>{3}));
  EXPECT_EQ(components_union_find(make_graph(4, {})).sizes, (std::vector<std::int64_t>{1, 1, 1, 1}));
  EXPECT_EQ(components_union_find(make_graph(5, {{0, 1}, {2, 3}})).sizes,
            (std::vector<std::int64_t>{2, 2, 1}));
  EXPECT_TRUE(components_union_find(make_graph(4, {})).complete);
}

TEST(Graph, ValidateRejects) {
  EXPECT_THROW(make_graph(3, {{1, 1}}).validate(), std::invalid_argument);
  EXPECT_THROW(make_graph(3, {{0, 1}, {0, 1}}).validate(), std::invalid_argument);
  EXPECT_THROW(make_graph(3, {{0, 3}}).validate(), std::invalid_argument);
}

TEST(SampleGraph, ZeroTypeNeverConnects) {
  Rng rng(1);
  const std::vector<Type> types{0, 5};
  for (int i = 0; i < 1000; ++i) EXPECT_TRUE(sample_graph(types, 3.0, rng).edges.empty());
}

TEST(SampleGraph, PairProbabilityHalf) {
  Rng rng(2);
  const std::vector<Type> types{1, 1};
  const int graphs = 100000;
  int edges = 0;
  for (int i = 0; i < graphs; ++i) edges += static_cast<int>(sample_graph(types, 0.0, rng).edges.size());
  EXPECT_LE(std::fabs(edges / static_cast<double>(graphs) - 0.5), 5 * std::sqrt(0.25 / graphs));
}

TEST(SampleGraph, EdgeCountMean) {
  Rng rng(3);
  const std::vector<Type> types(100, 1);
  const int graphs = 10000;
  double sum = 0.0;
  for (int i = 0; i < graphs; ++i) sum += static_cast<double>(sample_graph(types, 0.0, rng).edges.size());
  const double pairs = 4950.0, p = 0.01;
  const double sd = std::sqrt(pairs * p * (1 - p) / graphs);
  EXPECT_LE(std::fabs(sum / graphs - pairs * p), 3 * sd);
}

TEST(WalkOnGraph, MatchesUnionFindAndDfs) {
  Rng rng(4);
  std::vector<Type> types;
  for (int i = 0; i < 150; ++i) types.push_back(i % 3);
  for (int g = 0; g < 500; ++g) {
    const ExplicitGraph graph = sample_graph(types, 1.0, rng);
    const auto uf = components_union_find(graph).sizes;
    EXPECT_EQ(walk_on_graph(graph, rng).sizes, uf);
    EXPECT_EQ(dfs_sizes(graph), uf);
  }
}

TEST(WalkOnGraph, IsolatedTypeZero) {
  ExplicitGraph g = make_graph(4, {{0, 1}});
  g.types = {1, 1, 0, 0};
  Rng rng(1);
  EXPECT_EQ(walk_on_graph(g, rng).sizes, (std::vector<std::int64_t>{2, 1, 1}));
}

TEST(Enumerate, ThreeVertices) {
  const ExactCensusLaw law = enumerate_small_exact(std::vector<Type>{1, 1, 1}, 0.0);
  EXPECT_NEAR(static_cast<double>(law.probability.at({3})), 7.0 / 27, 1e-15);
  EXPECT_NEAR(static_cast<double>(law.probability.at({2, 1})), 12.0 / 27, 1e-15);
  EXPECT_NEAR(static_cast<double>(law.probability.at({1, 1, 1})), 8.0 / 27, 1e-15);
  ASSERT_TRUE(law.exact);
  EXPECT_EQ(law.exact->at({3}), (std::pair<std::int64_t, std::int64_t>{7, 27}));
}

TEST(Enumerate, Trivial) {
  const ExactCensusLaw a = enumerate_small_exact(std::vector<Type>{0, 1}, 0.4);
  ASSERT_EQ(a.probability.size(), 1u);
  EXPECT_EQ(a.probability.begin()->first, (std::vector<std::int64_t>{1, 1}));
  const ExactCensusLaw b = enumerate_small_exact(std::vector<Type>{1, 1}, 0.0);
  EXPECT_NEAR(static_cast<double>(b.probability.at({2})), 0.5, 1e-18);
  EXPECT_NEAR(static_cast<double>(b.probability.at({1, 1})), 0.5, 1e-18);
}

TEST(Enumerate, MixedTypesSumToOne) {
  const ExactCensusLaw law = enumerate_small_exact(std::vector<Type>{1, 1, 1, 2}, 0.0);
  long double total = 0.0L;
  for (const auto& [c, p] : law.probability) total += p;
  EXPECT_NEAR(static_cast<double>(total), 1.0, 1e-15);
  // P(all isolated) = (1 - 1/4)^3 (1 - 2/4)^3.
  EXPECT_NEAR(static_cast<double>(law.probability.at({1, 1, 1, 1})), std::pow(0.75, 3) * std::pow(0.5, 3), 1e-15);
}

TEST(Enumerate, RejectsLarge) {
  EXPECT_THROW(enumerate_small_exact(std::vector<Type>(7, 1), 0.0), std::invalid_argument);
}

TEST(PoissonRatio, SingleTypeIsExact) {
  Rng rng(5);
  const PoissonRatioReport r = poisson_ratio_spot_check(TypeCounts::from_map({{1, 100}}), 1, 0.0, 20000, rng);
  ASSERT_EQ(r.rows.size(), 1u);
  EXPECT_DOUBLE_EQ(r.rows[0].ratio, 1.0);
}

TEST(PoissonRatio, SingleVertex) {
  Rng rng(5);
  const PoissonRatioReport r = poisson_ratio_spot_check(TypeCounts::from_map({{1, 1}}), 1, 0.0, 1000, rng);
  for (const auto& row : r.rows) {
    EXPECT_DOUBLE_EQ(row.lhs, row.rhs);
  }
}

TEST(PoissonRatio, TwoTypes) {
  Rng rng(6);
  const PoissonRatioReport r =
      poisson_ratio_spot_check(TypeCounts::from_map({{1, 50}, {2, 25}}), 2, 0.0, 1000000, rng);
  for (const auto& row : r.rows) {
    EXPECT_GE(row.ratio, 0.9);
    EXPECT_LE(row.ratio, 1.1);
  }
}

TEST(Dump, RoundTrip) {
  Rng rng(7);
  std::vector<Type> types{0, 1, 2, 1, 3, 1};
  const ExplicitGraph g = sample_graph(types, 2.0, rng);
  std::stringstream ss;
  write_graph(ss, g);
  const ExplicitGraph h = read_graph(ss);
  EXPECT_EQ(h.n, g.n);
  EXPECT_EQ(h.types, g.types);
  EXPECT_EQ(h.edges, g.edges);
}

TEST(Dump, RejectsBadIndex) {
  std::stringstream ss("2\n1 1\n1 3\n");
  EXPECT_THROW(read_graph(ss), std::invalid_argument);
}
