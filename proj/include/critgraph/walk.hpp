#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "critgraph/census.hpp"
#include "critgraph/dist.hpp"
#include "critgraph/random.hpp"

namespace critgraph {

/// Exploration chain on type buckets: unrevealed and active counts per type,
/// plus the type of the vertex marked at the current step.
///
/// Bucket b refers to types[b]. At step i (1-based) the state satisfies
///   unrevealed_total + active_total + (i - 1) == n,
/// the vertex marked at step i still being held in the pool it came from.
struct WalkState {
  std::vector<Type> types;
  std::vector<std::int64_t> unrevealed;
  std::vector<std::int64_t> active;
  std::int64_t active_total = 0;
  std::int64_t unrevealed_total = 0;
  std::int64_t unrevealed_weight = 0;  // sum_x x * U^x
  std::size_t marked = 0;              // bucket of x(i)
  std::int64_t step = 1;
  std::int64_t z = 0;
  std::int64_t n = 0;
  std::int64_t roots = 0;  // components started at steps < i
  double eps = 0.0;        // a * n^{-1/3}
  std::int64_t clamp_events = 0;
  bool stopped = false;

  Type marked_type() const { return types[marked]; }
};

/// What one call to step_walk observed at step i.
struct StepRecord {
  std::int64_t step = 0;
  std::int64_t z = 0;            // z(i), before the step
  std::int64_t active_total = 0; // I(i)
  Type marked_type = 0;          // x(i)
  bool component_start = false;  // I(i) == 0
  std::int64_t revealed = 0;     // sum_x N^x(i)
  double cond_mean = 0.0;        // E[z(i+1) - z(i) | full chain state]
  double cond_var = 0.0;         // Var[z(i+1) - z(i) | full chain state]
};

enum class StopReason { kExhausted, kHorizon };

std::string_view to_string(StopReason reason);

/// Per-step record of one exploration run. Arrays indexed by step use index
/// i-1 for step i; `z`, `active`, `unrevealed` and `unrevealed_weight`
/// (sum_x x U^x) carry one extra
/// entry for the state after the last step.
struct WalkTrace {
  std::int64_t n = 0;
  double a = 0.0;
  std::vector<std::int64_t> z;
  std::vector<std::int64_t> active;
  std::vector<std::int64_t> unrevealed;
  std::vector<std::int64_t> unrevealed_weight;
  std::vector<Type> marked_type;
  std::vector<std::uint8_t> component_start;
  std::vector<double> cond_mean;
  std::vector<double> cond_var;
  std::int64_t clamp_events = 0;
  StopReason stop_reason = StopReason::kHorizon;

  std::size_t steps() const { return marked_type.size(); }
};

/// Edge probability clamp(x y (1 + eps) / n, 0, 1).
double edge_probability(Type x, Type y, double eps, std::int64_t n);

/// Initial state: nothing active, first marked type drawn size-biased.
/// Throws std::invalid_argument if no vertex has a positive type.
WalkState init_walk(const TypeCounts& counts, double a, Rng& rng);

/// Advances the chain by one step. Throws std::logic_error on an invariant
/// breach and std::invalid_argument if the state is already stopped.
StepRecord step_walk(WalkState& state, Rng& rng);

/// Iterates until `horizon_steps` steps are taken or every positive-type
/// vertex has been marked.
WalkTrace run_walk(const TypeCounts& counts, double a, std::int64_t horizon_steps,
                   Rng& rng);

/// Steps needed to reach every vertex; used as the "full exhaustion" horizon.
inline std::int64_t exhaustion_horizon(const TypeCounts& counts) { return counts.n(); }

/// Component sizes from the hitting times tau_k = min{i : z(i) = -k}. The
/// first size is tau_1 - 1, the k-th is tau_k - tau_{k-1}. Type-0 vertices
/// are appended as singletons. For traces cut by the horizon only closed
/// components are listed and `complete` is false.
ComponentCensus census_from_trace(const WalkTrace& trace, const TypeCounts& counts);

/// A curve sampled on the walk's natural grid s_j = j n^{-2/3}.
struct PathCurve {
  std::vector<double> s;
  std::vector<double> value;
};

/// Z_n(s_j) = n^{-1/3} z(j + 1) for j = 0 .. min(len - 1, floor(s0 n^{2/3})).
PathCurve rescaled_path(const WalkTrace& trace, std::int64_t n, double s0);

struct DriftQvCurves {
  PathCurve drift;  // n^{-1/3} D(j + 1), D(k) = sum_{i<k} cond_mean_i
  PathCurve qv;     // n^{-2/3} QV(j + 1), QV(k) = sum_{i<k} cond_var_i
};

DriftQvCurves drift_qv_curves(const WalkTrace& trace, std::int64_t n, double s0);

/// Value of a natural-grid curve at time s (step function, floor(n^{2/3} s)).
/// Past the end of the curve the last value is held.
double curve_at(const PathCurve& curve, std::int64_t n, double s);

/// Checks conservation, the z = I - roots identity, the increment bound
/// and hitting-time identities on a full trace. Returns an empty string if
/// all hold, otherwise a description of the first violation.
std::string check_trace_invariants(const WalkTrace& trace, const TypeCounts& counts);

}  // namespace critgraph
