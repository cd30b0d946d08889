#include "critgraph/limit.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

namespace critgraph {

void LimitParams::validate() const {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw std::invalid_argument("sigma must be > 0");
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw std::invalid_argument("beta must be >= 0");
  if (!std::isfinite(a)) throw std::invalid_argument("a must be finite");
  if (!(s0 > 0.0)) throw std::invalid_argument("s0 must be > 0");
  if (!(dt > 0.0) || dt > s0 / 100.0) throw std::invalid_argument("dt must lie in (0, s0/100]");
}

std::int64_t LimitParams::grid_steps() const { return std::llround(s0 / dt); }

LimitParams LimitParams::from_moments(const MomentSummary& m, double a, double s0, double dt) {
  LimitParams p;
  p.a = a;
  p.sigma = m.sigma;
  p.beta = m.beta;
  p.s0 = s0;
  p.dt = dt;
  return p;
}

LimitPath simulate_limit_path(const LimitParams& params, Rng& rng) {
  params.validate();
  const std::int64_t steps = params.grid_steps();
  LimitPath path;
  path.params = params;
  path.values.resize(static_cast<std::size_t>(steps) + 1);
  std::normal_distribution<double> gauss(0.0, params.sigma * std::sqrt(params.dt));
  double w = 0.0;
  path.values[0] = 0.0;
  for (std::int64_t k = 0; k < steps; ++k) {
    const double t = static_cast<double>(k) * params.dt;
    const double t_next = static_cast<double>(k + 1) * params.dt;
    w += params.a * params.dt - 0.5 * params.beta * (t_next * t_next - t * t) + gauss(rng);
    path.values[static_cast<std::size_t>(k) + 1] = w;
  }
  path.reflected = reflect_path(path.values);
  path.zero_set = zero_set(path.reflected);
  return path;
}

std::vector<double> reflect_path(std::span<const double> values) {
  if (values.empty() || values.front() != 0.0) {
    throw std::invalid_argument("reflect_path requires a path starting at 0");
  }
  std::vector<double> out(values.size());
  double running_min = 0.0;
  for (std::size_t k = 0; k < values.size(); ++k) {
    running_min = std::min(running_min, values[k]);
    out[k] = values[k] - running_min;
  }
  return out;
}

std::vector<std::int64_t> zero_set(std::span<const double> reflected) {
  std::vector<std::int64_t> zeros;
  for (std::size_t k = 0; k < reflected.size(); ++k) {
    if (reflected[k] == 0.0) zeros.push_back(static_cast<std::int64_t>(k));
  }
  return zeros;
}

ExcursionList extract_excursions(std::span<const double> reflected, double dt,
                                 bool include_truncated) {
  ExcursionList out;
  if (reflected.empty()) return out;
  std::int64_t last_zero = 0;
  for (std::size_t k = 1; k < reflected.size(); ++k) {
    if (reflected[k] != 0.0) continue;
    const auto idx = static_cast<std::int64_t>(k);
    if (idx - last_zero > 1) out.lengths.push_back(static_cast<double>(idx - last_zero) * dt);
    last_zero = idx;
  }
  const auto end = static_cast<std::int64_t>(reflected.size()) - 1;
  if (reflected.back() > 0.0) {
    out.truncated_tail = true;
    out.truncated_length = static_cast<double>(end - last_zero) * dt;
    if (include_truncated) out.lengths.push_back(out.truncated_length);
  }
  std::sort(out.lengths.begin(), out.lengths.end(), std::greater<>());
  return out;
}

ExcursionList extract_excursions(const LimitPath& path, bool include_truncated) {
  return extract_excursions(path.reflected, path.params.dt, include_truncated);
}

GammaSample sample_gamma(const LimitParams& params, std::int64_t replicas, std::size_t k,
                         std::uint64_t seed, unsigned workers, bool include_truncated) {
  if (replicas < 1) throw std::invalid_argument("sample_gamma requires replicas >= 1");
  if (k < 1) throw std::invalid_argument("sample_gamma requires K >= 1");
  params.validate();
  GammaSample out;
  out.top.assign(static_cast<std::size_t>(replicas), std::vector<double>(k, 0.0));
  std::vector<std::uint8_t> truncated(static_cast<std::size_t>(replicas), 0);
  const std::uint64_t tag = label_tag("limit");
  parallel_for(static_cast<std::size_t>(replicas), workers, [&](std::size_t r) {
    Rng rng = make_stream(seed, {tag, static_cast<std::uint64_t>(r)});
    const LimitPath path = simulate_limit_path(params, rng);
    const ExcursionList ex = extract_excursions(path, include_truncated);
    const std::size_t keep = std::min(k, ex.lengths.size());
    std::copy_n(ex.lengths.begin(), keep, out.top[r].begin());
    std::uint8_t flag = ex.truncated_tail ? 1 : 0;
    if (ex.truncated_tail && ex.truncated_length >= out.top[r][k - 1]) flag |= 2;
    truncated[r] = flag;
  });
  for (auto t : truncated) {
    out.truncated += t & 1;
    out.top_k_truncated += (t >> 1) & 1;
  }
  out.truncation_rate = static_cast<double>(out.truncated) / static_cast<double>(replicas);
  out.top_k_truncation_rate =
      static_cast<double>(out.top_k_truncated) / static_cast<double>(replicas);
  return out;
}

}  // namespace critgraph
