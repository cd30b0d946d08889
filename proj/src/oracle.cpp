#include "critgraph/oracle.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <set>
#include <stdexcept>
#include <string>

namespace critgraph {

namespace {

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n), size_(n, 1) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }

  std::size_t find(std::size_t v) {
    while (parent_[v] != v) {
      parent_[v] = parent_[parent_[v]];
      v = parent_[v];
    }
    return v;
  }

  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (size_[a] < size_[b]) std::swap(a, b);
    parent_[b] = a;
    size_[a] += size_[b];
  }

  std::vector<std::int64_t> component_sizes() {
    std::vector<std::int64_t> sizes;
    for (std::size_t v = 0; v < parent_.size(); ++v) {
      if (find(v) == v) sizes.push_back(static_cast<std::int64_t>(size_[v]));
    }
    sort_descending(sizes);
    return sizes;
  }

 private:
  std::vector<std::size_t> parent_;
  std::vector<std::size_t> size_;
};

long double pair_probability(Type x, Type y, double a, std::int64_t n) {
  const long double eps = static_cast<long double>(a) / std::cbrt(static_cast<long double>(n));
  const long double p = static_cast<long double>(x) * static_cast<long double>(y) *
                        (1.0L + eps) / static_cast<long double>(n);
  return std::clamp(p, 0.0L, 1.0L);
}

}  // namespace

void ExplicitGraph::validate() const {
  if (static_cast<std::int64_t>(types.size()) != n) {
    throw std::invalid_argument("type list length differs from n");
  }
  std::set<std::pair<std::int32_t, std::int32_t>> seen;
  for (auto [i, j] : edges) {
    if (i < 0 || j < 0 || i >= n || j >= n) throw std::invalid_argument("edge index out of range");
    if (i == j) throw std::invalid_argument("self-loop");
    if (!seen.insert(std::minmax(i, j)).second) throw std::invalid_argument("duplicate edge");
  }
}

ExplicitGraph sample_graph(std::span<const Type> types, double a, Rng& rng) {
  if (types.empty()) throw std::invalid_argument("sample_graph requires n >= 1");
  ExplicitGraph g;
  g.n = static_cast<std::int64_t>(types.size());
  g.types.assign(types.begin(), types.end());
  const double eps = a / std::cbrt(static_cast<double>(g.n));
  const double inv_n = 1.0 / static_cast<double>(g.n);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::int32_t i = 0; i < g.n; ++i) {
    if (types[static_cast<std::size_t>(i)] == 0) continue;
    for (std::int32_t j = i + 1; j < g.n; ++j) {
      const double p = std::clamp(static_cast<double>(types[static_cast<std::size_t>(i)]) *
                                      static_cast<double>(types[static_cast<std::size_t>(j)]) *
                                      (1.0 + eps) * inv_n,
                                  0.0, 1.0);
      if (p > 0.0 && unit(rng) < p) g.edges.emplace_back(i, j);
    }
  }
  return g;
}

ComponentCensus components_union_find(const ExplicitGraph& graph) {
  DisjointSets sets(static_cast<std::size_t>(graph.n));
  std::vector<bool> touched(static_cast<std::size_t>(graph.n), false);
  for (auto [i, j] : graph.edges) {
    sets.unite(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
    touched[static_cast<std::size_t>(i)] = touched[static_cast<std::size_t>(j)] = true;
  }
  ComponentCensus c;
  c.n = graph.n;
  c.sizes = sets.component_sizes();
  for (std::size_t v = 0; v < graph.types.size(); ++v) {
    if (graph.types[v] == 0 && !touched[v]) ++c.zero_type_singletons;
  }
  c.complete = true;
  return c;
}

ComponentCensus walk_on_graph(const ExplicitGraph& graph, Rng& rng) {
  const auto n = static_cast<std::size_t>(graph.n);
  std::vector<std::size_t> offsets(n + 1, 0);
  for (auto [i, j] : graph.edges) {
    ++offsets[static_cast<std::size_t>(i) + 1];
    ++offsets[static_cast<std::size_t>(j) + 1];
  }
  std::partial_sum(offsets.begin(), offsets.end(), offsets.begin());
  std::vector<std::int32_t> adjacency(offsets.back());
  {
    std::vector<std::size_t> fill(offsets.begin(), offsets.end() - 1);
    for (auto [i, j] : graph.edges) {
      adjacency[fill[static_cast<std::size_t>(i)]++] = j;
      adjacency[fill[static_cast<std::size_t>(j)]++] = i;
    }
  }

  enum : std::uint8_t { kUnrevealed, kActive, kMarked };
  std::vector<std::uint8_t> state(n, kUnrevealed);
  std::int64_t unrevealed_weight = 0;
  for (Type x : graph.types) unrevealed_weight += x;

  ComponentCensus c;
  c.n = graph.n;
  std::vector<std::size_t> active;

  auto explore_from = [&](std::size_t root) {
    std::int64_t size = 0;
    std::size_t current = root;
    state[root] = kMarked;
    unrevealed_weight -= graph.types[root];
    for (;;) {
      ++size;
      for (std::size_t e = offsets[current]; e < offsets[current + 1]; ++e) {
        const auto nb = static_cast<std::size_t>(adjacency[e]);
        if (state[nb] != kUnrevealed) continue;
        state[nb] = kActive;
        unrevealed_weight -= graph.types[nb];
        active.push_back(nb);
      }
      if (active.empty()) break;
      const auto pick = static_cast<std::size_t>(
          sample_below(rng, static_cast<std::int64_t>(active.size())));
      current = active[pick];
      active[pick] = active.back();
      active.pop_back();
      state[current] = kMarked;
    }
    return size;
  };

  while (unrevealed_weight > 0) {
    std::int64_t r = sample_below(rng, unrevealed_weight);
    std::size_t root = n;
    for (std::size_t v = 0; v < n; ++v) {
      if (state[v] != kUnrevealed) continue;
      if (r < graph.types[v]) {
        root = v;
        break;
      }
      r -= graph.types[v];
    }
    if (root == n) throw std::logic_error("size-biased root selection failed");
    c.sizes.push_back(explore_from(root));
  }
  // Only zero-weight vertices remain; they are isolated in any model graph.
  for (std::size_t v = 0; v < n; ++v) {
    if (state[v] != kUnrevealed) continue;
    const std::int64_t size = explore_from(v);
    if (size == 1 && graph.types[v] == 0) ++c.zero_type_singletons;
    c.sizes.push_back(size);
  }
  sort_descending(c.sizes);
  c.complete = true;
  return c;
}

ExactCensusLaw enumerate_small_exact(std::span<const Type> types, double a) {
  const auto n = static_cast<std::int64_t>(types.size());
  if (n < 1) throw std::invalid_argument("enumerate_small_exact requires n >= 1");
  if (n > kMaxEnumerationVertices) {
    throw std::invalid_argument("enumerate_small_exact supports at most " +
                                std::to_string(kMaxEnumerationVertices) + " vertices");
  }
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  std::vector<long double> p;
  for (std::size_t i = 0; i < types.size(); ++i) {
    for (std::size_t j = i + 1; j < types.size(); ++j) {
      pairs.emplace_back(i, j);
      p.push_back(pair_probability(types[i], types[j], a, n));
    }
  }
  const std::size_t m = pairs.size();
  const bool rational = n <= 4 && a == 0.0;

  // With a == 0 every edge probability is min(x y, n) / n, so each subset
  // weight is an integer over n^m.
  std::vector<std::int64_t> edge_num(m);
  std::int64_t denominator = 1;
  if (rational) {
    for (std::size_t e = 0; e < m; ++e) {
      edge_num[e] = std::min<std::int64_t>(types[pairs[e].first] * types[pairs[e].second], n);
      denominator *= n;
    }
  }

  ExactCensusLaw law;
  std::map<std::vector<std::int64_t>, std::int64_t> numerators;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << m); ++mask) {
    DisjointSets sets(types.size());
    long double weight = 1.0L;
    std::int64_t num = 1;
    for (std::size_t e = 0; e < m; ++e) {
      const bool present = (mask >> e) & 1U;
      if (present) sets.unite(pairs[e].first, pairs[e].second);
      weight *= present ? p[e] : 1.0L - p[e];
      if (rational) num *= present ? edge_num[e] : n - edge_num[e];
    }
    if (weight == 0.0L && (!rational || num == 0)) continue;
    auto sizes = sets.component_sizes();
    law.probability[sizes] += weight;
    if (rational) numerators[sizes] += num;
  }
  law.rounding_bound = static_cast<long double>(std::uint64_t{1} << m) *
                       static_cast<long double>(m + 2) * LDBL_EPSILON;
  if (rational) {
    law.exact.emplace();
    for (const auto& [sizes, num] : numerators) {
      if (num == 0) continue;
      const std::int64_t g = std::gcd(num, denominator);
      (*law.exact)[sizes] = {num / g, denominator / g};
    }
  }
  std::erase_if(law.probability, [](const auto& kv) { return kv.second == 0.0L; });
  return law;
}

PoissonRatioReport poisson_ratio_spot_check(const TypeCounts& counts, Type marked_type,
                                            double a, std::int64_t samples, Rng& rng) {
  if (samples < 2) throw std::invalid_argument("poisson_ratio_spot_check needs >= 2 samples");
  if (marked_type <= 0) throw std::invalid_argument("marked type must be positive");
  const std::int64_t n = counts.n();
  const double eps = a / std::cbrt(static_cast<double>(n));
  const std::int64_t weight = counts.total_weight();

  struct Bucket {
    Type type;
    std::int64_t pool;
    double p;
    double sum = 0.0;
    double sum_sq = 0.0;
  };
  std::vector<Bucket> buckets;
  for (const auto& e : counts.entries()) {
    if (e.type == 0) continue;
    buckets.push_back({e.type, e.count, std::clamp(static_cast<double>(marked_type) *
                                                       static_cast<double>(e.type) * (1.0 + eps) /
                                                       static_cast<double>(n),
                                                   0.0, 1.0)});
  }

  std::vector<std::int64_t> draws(buckets.size());
  std::int64_t any = 0;
  for (std::int64_t s = 0; s < samples; ++s) {
    std::int64_t total = 0;
    for (std::size_t b = 0; b < buckets.size(); ++b) {
      draws[b] = sample_binomial(rng, buckets[b].pool, buckets[b].p);
      total += draws[b];
    }
    if (total == 0) continue;
    ++any;
    for (std::size_t b = 0; b < buckets.size(); ++b) {
      const double share = static_cast<double>(draws[b]) / static_cast<double>(total);
      buckets[b].sum += share;
      buckets[b].sum_sq += share * share;
    }
  }

  const double count = static_cast<double>(samples);
  const double p_any = static_cast<double>(any) / count;
  // Wilson interval for P{sum N > 0}.
  const double z = 1.959963984540054;
  const double centre = (p_any + z * z / (2 * count)) / (1 + z * z / count);
  const double half = z * std::sqrt(p_any * (1 - p_any) / count + z * z / (4 * count * count)) /
                      (1 + z * z / count);

  PoissonRatioReport report;
  report.marked_type = marked_type;
  report.samples = samples;
  report.p_any = p_any;
  for (const auto& b : buckets) {
    PoissonRatioRow row;
    row.type = b.type;
    const double lambda = static_cast<double>(b.type * b.pool) / static_cast<double>(weight);
    row.lhs = b.sum / count;
    row.rhs = lambda * p_any;
    const double var = std::max(0.0, b.sum_sq / count - row.lhs * row.lhs);
    const double lhs_half = z * std::sqrt(var / count);
    if (row.rhs > 0.0) {
      row.ratio = row.lhs / row.rhs;
      const double rhs_low = lambda * std::max(centre - half, 1e-300);
      const double rhs_high = lambda * (centre + half);
      row.ratio_low = std::max(0.0, row.lhs - lhs_half) / rhs_high;
      row.ratio_high = (row.lhs + lhs_half) / rhs_low;
    }
    report.rows.push_back(row);
  }
  return report;
}

void write_graph(std::ostream& out, const ExplicitGraph& graph) {
  out << graph.n << '\n';
  for (std::size_t i = 0; i < graph.types.size(); ++i) {
    if (i) out << ' ';
    out << graph.types[i];
  }
  out << '\n';
  for (auto [i, j] : graph.edges) out << (i + 1) << ' ' << (j + 1) << '\n';
}

ExplicitGraph read_graph(std::istream& in) {
  ExplicitGraph g;
  if (!(in >> g.n) || g.n < 0) throw std::invalid_argument("graph dump: bad vertex count");
  g.types.resize(static_cast<std::size_t>(g.n));
  for (auto& x : g.types) {
    if (!(in >> x) || x < 0) throw std::invalid_argument("graph dump: bad type list");
  }
  std::int64_t i = 0, j = 0;
  while (in >> i >> j) {
    if (i < 1 || j < 1 || i > g.n || j > g.n) {
      throw std::invalid_argument("graph dump: edge index out of range");
    }
    const auto a = static_cast<std::int32_t>(i - 1);
    const auto b = static_cast<std::int32_t>(j - 1);
    g.edges.emplace_back(std::min(a, b), std::max(a, b));
  }
  if (!in.eof()) throw std::invalid_argument("graph dump: malformed edge line");
  g.validate();
  return g;
}

}  // namespace critgraph
