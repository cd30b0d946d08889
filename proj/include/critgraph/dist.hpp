#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "critgraph/random.hpp"

namespace critgraph {

using Type = std::int64_t;

/// Finite-support law of the vertex type X on {0, 1, 2, ...}.
///
/// Support is kept sorted ascending with distinct values; probabilities are
/// non-negative and sum to one within kSumTolerance. At least one positive
/// type must carry mass, otherwise no vertex can ever be explored.
class TypePmf {
 public:
  static constexpr double kSumTolerance = 1e-12;

  /// Validates and builds a pmf. Pairs may be given in any order; they are
  /// sorted by type. Throws std::invalid_argument naming the violated rule.
  static TypePmf create(std::vector<Type> support, std::vector<double> probs);

  const std::vector<Type>& support() const { return support_; }
  const std::vector<double>& probs() const { return probs_; }
  std::size_t size() const { return support_.size(); }

  /// Probability of a type value (0 when outside the support).
  double prob(Type x) const;

  /// "x:p, y:q" with shortest round-trip formatting of each probability.
  std::string to_string() const;

 private:
  TypePmf(std::vector<Type> support, std::vector<double> probs)
      : support_(std::move(support)), probs_(std::move(probs)) {}

  std::vector<Type> support_;
  std::vector<double> probs_;
};

/// Parses a probability written as a decimal ("0.75") or a rational ("3/4").
long double parse_probability(std::string_view text);

/// Parses one "x:p" atom.
std::pair<Type, double> parse_pmf_atom(std::string_view atom);

/// Parses "x:p, y:q, ..." (also accepts newlines between atoms).
TypePmf parse_pmf(std::string_view text);

struct MomentSummary {
  double ex = 0.0;
  double ex2 = 0.0;
  double ex3 = 0.0;
  double sigma = 0.0;  // sqrt(E X * E X^3)
  double beta = 0.0;   // E X^3 / E X
  bool critical = false;
};

/// Exact finite-sum moments. `critical` is |E X^2 - 1| <= tol.
MomentSummary compute_moments(const TypePmf& pmf, double tol = 1e-9);

/// Law of the size-biased type: P{X~ = y} = y P{X = y} / E X. Type 0 is
/// dropped from the support.
TypePmf size_biased_pmf(const TypePmf& pmf);

/// Aggregated vertex types of one realization: count of vertices per type.
class TypeCounts {
 public:
  struct Entry {
    Type type;
    std::int64_t count;
  };

  TypeCounts() = default;

  /// Entries with zero count are dropped; duplicate types are merged.
  static TypeCounts from_map(const std::map<Type, std::int64_t>& counts);
  static TypeCounts from_types(std::span<const Type> types);

  const std::vector<Entry>& entries() const { return entries_; }
  std::int64_t n() const { return n_; }
  std::int64_t count_of(Type x) const;
  bool empty() const { return n_ == 0; }

  /// Sum over vertices of their type, i.e. sum_x x * U^x.
  std::int64_t total_weight() const;

  /// Vertices expanded to a type list (type-ascending order).
  std::vector<Type> expand() const;

 private:
  std::vector<Entry> entries_;
  std::int64_t n_ = 0;
};

/// i.i.d. types from the pmf, drawn as a multinomial via conditional
/// binomials. Requires n >= 1.
TypeCounts sample_types(const TypePmf& pmf, std::int64_t n, Rng& rng);

struct MaxTypeDiagnostic {
  Type max_type = 0;
  double cube_root_n = 0.0;
  double ratio = 0.0;  // max_type / n^{1/3}
  bool flagged = false;  // ratio >= 1
};

/// Records (never rejects) realizations whose largest type reaches n^{1/3}.
MaxTypeDiagnostic validate_max_type(const TypeCounts& counts);

}  // namespace critgraph
