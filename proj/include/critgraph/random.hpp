#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <random>
#include <string_view>

namespace critgraph {

/// Engine used for every stream in the project.
using Rng = std::mt19937_64;

/// One round of the splitmix64 finalizer.
std::uint64_t splitmix64(std::uint64_t x);

/// Derives a per-stream seed as a pure function of the master seed and a
/// list of experiment coordinates (e.g. {tag, n, replica}). Each coordinate
/// is folded in with a splitmix64 round, so streams for distinct coordinate
/// tuples are decorrelated and independent of scheduling.
std::uint64_t derive_seed(std::uint64_t master,
                          std::initializer_list<std::uint64_t> coordinates);

/// Stable 64-bit tag for a string label (FNV-1a), used as a seed coordinate.
std::uint64_t label_tag(std::string_view label);

Rng make_stream(std::uint64_t master,
                std::initializer_list<std::uint64_t> coordinates);

/// Human-readable description of the derivation scheme, pinned in reports.
inline constexpr std::string_view kSeedScheme =
    "seed(master, c1..ck) = fold(splitmix64(h ^ ci)) starting from "
    "h = splitmix64(master); stream = mt19937_64(seed)";

/// Binomial(trials, p) draw with explicit handling of the degenerate cases.
std::int64_t sample_binomial(Rng& rng, std::int64_t trials, double p);

/// Uniform integer in [0, bound).
std::int64_t sample_below(Rng& rng, std::int64_t bound);

/// Runs body(i) for i in [0, count) on up to `workers` threads. Results must
/// be written into index-addressed slots so output does not depend on the
/// worker count. The first exception thrown by any body is rethrown.
void parallel_for(std::size_t count, unsigned workers,
                  const std::function<void(std::size_t)>& body);

}  // namespace critgraph
