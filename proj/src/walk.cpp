#include "critgraph/walk.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace critgraph {

namespace {

std::size_t pick_bucket(const std::vector<std::int64_t>& weights, std::int64_t r) {
  for (std::size_t b = 0; b < weights.size(); ++b) {
    if (r < weights[b]) return b;
    r -= weights[b];
  }
  throw std::logic_error("bucket selection ran past total weight");
}

std::size_t pick_size_biased(const WalkState& s, Rng& rng) {
  std::int64_t r = sample_below(rng, s.unrevealed_weight);
  for (std::size_t b = 0; b < s.types.size(); ++b) {
    const std::int64_t w = s.types[b] * s.unrevealed[b];
    if (r < w) return b;
    r -= w;
  }
  throw std::logic_error("size-biased selection ran past total weight");
}

double two_thirds_power(std::int64_t n) {
  const double c = std::cbrt(static_cast<double>(n));
  return c * c;
}

}  // namespace

std::string_view to_string(StopReason reason) {
  switch (reason) {
    case StopReason::kExhausted: return "exhausted";
    case StopReason::kHorizon: return "horizon";
  }
  return "unknown";
}

double edge_probability(Type x, Type y, double eps, std::int64_t n) {
  const double p = static_cast<double>(x) * static_cast<double>(y) * (1.0 + eps) /
                   static_cast<double>(n);
  return std::clamp(p, 0.0, 1.0);
}

WalkState init_walk(const TypeCounts& counts, double a, Rng& rng) {
  if (counts.total_weight() <= 0) throw std::invalid_argument("no explorable vertices");
  WalkState s;
  s.n = counts.n();
  s.eps = a / std::cbrt(static_cast<double>(s.n));
  for (const auto& e : counts.entries()) {
    s.types.push_back(e.type);
    s.unrevealed.push_back(e.count);
  }
  s.active.assign(s.types.size(), 0);
  s.unrevealed_total = s.n;
  s.unrevealed_weight = counts.total_weight();
  s.marked = pick_size_biased(s, rng);
  return s;
}

StepRecord step_walk(WalkState& s, Rng& rng) {
  if (s.stopped) throw std::invalid_argument("step_walk on a stopped walk");

  StepRecord rec;
  rec.step = s.step;
  rec.z = s.z;
  rec.active_total = s.active_total;
  rec.marked_type = s.marked_type();
  rec.component_start = s.active_total == 0;

  const bool root = rec.component_start;
  const Type xi = s.marked_type();
  double mean = -1.0;
  double var = 0.0;
  std::int64_t revealed = 0;
  std::int64_t revealed_weight = 0;

  for (std::size_t b = 0; b < s.types.size(); ++b) {
    const Type y = s.types[b];
    const std::int64_t pool = s.unrevealed[b] - ((root && b == s.marked) ? 1 : 0);
    if (y == 0 || pool <= 0) continue;
    const double raw = static_cast<double>(xi) * static_cast<double>(y) * (1.0 + s.eps) /
                       static_cast<double>(s.n);
    if (raw > 1.0) ++s.clamp_events;
    const double p = std::clamp(raw, 0.0, 1.0);
    const std::int64_t found = sample_binomial(rng, pool, p);
    mean += static_cast<double>(pool) * p;
    var += static_cast<double>(pool) * p * (1.0 - p);
    s.unrevealed[b] -= found;
    s.active[b] += found;
    revealed += found;
    revealed_weight += found * y;
  }

  if (root) {
    s.unrevealed[s.marked] -= 1;
    s.unrevealed_total -= 1;
    s.unrevealed_weight -= xi;
    ++s.roots;
  } else {
    s.active[s.marked] -= 1;
    s.active_total -= 1;
  }
  s.unrevealed_total -= revealed;
  s.unrevealed_weight -= revealed_weight;
  s.active_total += revealed;
  s.z += revealed - 1;
  s.step += 1;

  rec.revealed = revealed;
  rec.cond_mean = mean;
  rec.cond_var = var;

  if (s.unrevealed[s.marked] < 0 || s.active[s.marked] < 0 || s.active_total < 0 ||
      s.unrevealed_total < 0 || s.unrevealed_weight < 0) {
    throw std::logic_error("walk invariant breach: negative count at step " +
                           std::to_string(rec.step));
  }
  if (s.unrevealed_total + s.active_total + (s.step - 1) != s.n) {
    throw std::logic_error("walk invariant breach: conservation at step " +
                           std::to_string(rec.step));
  }

  if (s.active_total > 0) {
    s.marked = pick_bucket(s.active, sample_below(rng, s.active_total));
  } else if (s.unrevealed_weight > 0) {
    s.marked = pick_size_biased(s, rng);
  } else {
    s.stopped = true;
  }
  return rec;
}

WalkTrace run_walk(const TypeCounts& counts, double a, std::int64_t horizon_steps, Rng& rng) {
  if (horizon_steps < 1) throw std::invalid_argument("horizon_steps must be >= 1");
  WalkState s = init_walk(counts, a, rng);
  WalkTrace t;
  t.n = s.n;
  t.a = a;
  const auto expected = static_cast<std::size_t>(std::min(horizon_steps, s.n));
  t.z.reserve(expected + 1);
  t.active.reserve(expected + 1);
  t.unrevealed.reserve(expected + 1);
  t.unrevealed_weight.reserve(expected + 1);
  t.marked_type.reserve(expected);
  t.component_start.reserve(expected);
  t.cond_mean.reserve(expected);
  t.cond_var.reserve(expected);

  while (!s.stopped && static_cast<std::int64_t>(t.steps()) < horizon_steps) {
    t.unrevealed.push_back(s.unrevealed_total);
    t.unrevealed_weight.push_back(s.unrevealed_weight);
    const StepRecord r = step_walk(s, rng);
    t.z.push_back(r.z);
    t.active.push_back(r.active_total);
    t.marked_type.push_back(r.marked_type);
    t.component_start.push_back(r.component_start ? 1 : 0);
    t.cond_mean.push_back(r.cond_mean);
    t.cond_var.push_back(r.cond_var);
  }
  t.z.push_back(s.z);
  t.active.push_back(s.active_total);
  t.unrevealed.push_back(s.unrevealed_total);
  t.unrevealed_weight.push_back(s.unrevealed_weight);
  t.clamp_events = s.clamp_events;
  t.stop_reason = s.stopped ? StopReason::kExhausted : StopReason::kHorizon;
  return t;
}

ComponentCensus census_from_trace(const WalkTrace& trace, const TypeCounts& counts) {
  ComponentCensus c;
  c.n = counts.n();
  std::int64_t k = 1;
  std::int64_t previous_hit = 1;  // tau_0 := 1 so the first size is tau_1 - 1
  for (std::size_t idx = 0; idx < trace.z.size(); ++idx) {
    const auto i = static_cast<std::int64_t>(idx) + 1;
    if (trace.z[idx] == -k) {
      c.sizes.push_back(i - previous_hit);
      previous_hit = i;
      ++k;
    }
  }
  c.zero_type_singletons = counts.count_of(0);
  c.sizes.insert(c.sizes.end(), static_cast<std::size_t>(c.zero_type_singletons), 1);
  sort_descending(c.sizes);
  c.complete = trace.stop_reason == StopReason::kExhausted;
  return c;
}

PathCurve rescaled_path(const WalkTrace& trace, std::int64_t n, double s0) {
  PathCurve out;
  if (trace.z.empty()) return out;
  const double n23 = two_thirds_power(n);
  const double scale = 1.0 / std::cbrt(static_cast<double>(n));
  const auto last = std::min<std::int64_t>(static_cast<std::int64_t>(trace.z.size()) - 1,
                                           static_cast<std::int64_t>(std::floor(s0 * n23 + 1e-9)));
  out.s.reserve(static_cast<std::size_t>(last + 1));
  out.value.reserve(static_cast<std::size_t>(last + 1));
  for (std::int64_t j = 0; j <= last; ++j) {
    out.s.push_back(static_cast<double>(j) / n23);
    out.value.push_back(scale * static_cast<double>(trace.z[static_cast<std::size_t>(j)]));
  }
  return out;
}

DriftQvCurves drift_qv_curves(const WalkTrace& trace, std::int64_t n, double s0) {
  DriftQvCurves out;
  const double n23 = two_thirds_power(n);
  const double n13 = std::cbrt(static_cast<double>(n));
  const auto last = std::min<std::int64_t>(static_cast<std::int64_t>(trace.steps()),
                                           static_cast<std::int64_t>(std::floor(s0 * n23 + 1e-9)));
  double drift = 0.0;
  double qv = 0.0;
  for (std::int64_t j = 0; j <= last; ++j) {
    const double s = static_cast<double>(j) / n23;
    out.drift.s.push_back(s);
    out.drift.value.push_back(drift / n13);
    out.qv.s.push_back(s);
    out.qv.value.push_back(qv / n23);
    if (j < static_cast<std::int64_t>(trace.steps())) {
      drift += trace.cond_mean[static_cast<std::size_t>(j)];
      qv += trace.cond_var[static_cast<std::size_t>(j)];
    }
  }
  return out;
}

double curve_at(const PathCurve& curve, std::int64_t n, double s) {
  if (curve.value.empty()) throw std::invalid_argument("curve_at on an empty curve");
  const auto j = static_cast<std::size_t>(std::max(0.0, std::floor(two_thirds_power(n) * s + 1e-9)));
  return curve.value[std::min(j, curve.value.size() - 1)];
}

std::string check_trace_invariants(const WalkTrace& t, const TypeCounts& counts) {
  if (t.z.empty() || t.z.front() != 0) return "z(1) != 0";
  std::int64_t roots = 0;
  std::int64_t record_low = 0;
  for (std::size_t idx = 0; idx < t.z.size(); ++idx) {
    const auto step = static_cast<std::int64_t>(idx) + 1;
    if (t.unrevealed[idx] + t.active[idx] + (step - 1) != t.n) {
      return "conservation fails at step " + std::to_string(step);
    }
    if (t.active[idx] < 0 || t.unrevealed[idx] < 0) {
      return "negative count at step " + std::to_string(step);
    }
    // z(i) = I(i) - (components opened before step i); inside the first
    // component this is z(i) = I(i) - 1.
    if (t.z[idx] != t.active[idx] - roots) {
      return "z/I identity fails at step " + std::to_string(step);
    }
    if (idx + 1 < t.z.size() && t.z[idx + 1] - t.z[idx] < -1) {
      return "increment below -1 at step " + std::to_string(step);
    }
    if (idx < t.steps()) {
      const bool start = t.active[idx] == 0;
      if (start != (t.component_start[idx] != 0)) {
        return "component-start flag mismatch at step " + std::to_string(step);
      }
      // A component starts exactly when z sits at a new record low.
      if (start && t.z[idx] != -roots) {
        return "hitting-time identity fails at step " + std::to_string(step);
      }
      if (start) ++roots;
    }
    record_low = std::min(record_low, t.z[idx]);
  }
  if (t.stop_reason == StopReason::kExhausted) {
    if (t.active.back() != 0) return "exhausted walk left active vertices";
    if (t.z.back() != -roots) return "final z differs from minus component count";
    if (record_low != -roots) return "record low differs from minus component count";
    const ComponentCensus c = census_from_trace(t, counts);
    if (c.total() != counts.n()) return "complete census does not sum to n";
    if (static_cast<std::int64_t>(c.sizes.size()) != roots + c.zero_type_singletons) {
      return "census size count differs from number of components";
    }
  }
  return {};
}

}  // namespace critgraph
