#pragma once

// Ground-truth implementations for small graphs. Everything here works on
// materialized edge sets and is meant to check the bucketed walk, not to
// scale.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "critgraph/census.hpp"
#include "critgraph/dist.hpp"
#include "critgraph/random.hpp"

namespace critgraph {

/// Simple undirected graph on vertices 0..n-1 (1..n in the dump format).
struct ExplicitGraph {
  std::int64_t n = 0;
  std::vector<Type> types;
  std::vector<std::pair<std::int32_t, std::int32_t>> edges;  // i < j

  /// Throws std::invalid_argument on self-loops, duplicates or bad indices.
  void validate() const;
};

ExplicitGraph sample_graph(std::span<const Type> types, double a, Rng& rng);

ComponentCensus components_union_find(const ExplicitGraph& graph);

/// Breadth-first exploration of a materialized graph: size-biased roots
/// among unrevealed vertices, uniform choice among active vertices.
ComponentCensus walk_on_graph(const ExplicitGraph& graph, Rng& rng);

/// Exact law of the census over all 2^{n(n-1)/2} edge subsets.
struct ExactCensusLaw {
  std::map<std::vector<std::int64_t>, long double> probability;
  /// Populated only for n <= 4 with rational edge probabilities (a == 0).
  std::optional<std::map<std::vector<std::int64_t>, std::pair<std::int64_t, std::int64_t>>>
      exact;
  long double rounding_bound = 0.0L;
};

inline constexpr std::int64_t kMaxEnumerationVertices = 6;

ExactCensusLaw enumerate_small_exact(std::span<const Type> types, double a);

/// Monte Carlo check that a new neighbour's type is size-biased: for each
/// type x compares E[N^x / sum N ; sum N > 0] with
/// (x U^x / sum_y y U^y) P{sum N > 0}, estimated from the same draws.
struct PoissonRatioRow {
  Type type = 0;
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 1.0;
  double ratio_low = 1.0;   // 95% interval
  double ratio_high = 1.0;
};

struct PoissonRatioReport {
  Type marked_type = 0;
  std::int64_t samples = 0;
  double p_any = 0.0;  // estimated P{sum N > 0}
  std::vector<PoissonRatioRow> rows;
};

PoissonRatioReport poisson_ratio_spot_check(const TypeCounts& counts, Type marked_type,
                                            double a, std::int64_t samples, Rng& rng);

/// Dump format: "n", then the n types on one line, then one "i j" edge per
/// line with 1-based indices.
void write_graph(std::ostream& out, const ExplicitGraph& graph);
ExplicitGraph read_graph(std::istream& in);

}  // namespace critgraph
