#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "critgraph/dist.hpp"

namespace critgraph {

enum class Mode { kCensus, kPath, kLimit, kCompare, kInvariants };

std::string_view to_string(Mode mode);
Mode parse_mode(std::string_view text);

/// Raised for malformed or invalid configuration; parse errors carry the
/// 1-based line number in their message.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  std::string pmf_text;
  std::optional<TypePmf> pmf;
  double a = 0.0;
  std::vector<std::int64_t> n_list{10000, 30000, 100000};
  std::int64_t replicas = 200;
  double s0 = 8.0;        // limit horizon
  double dt = 1e-4;       // limit grid step
  double path_s0 = 1.0;   // walk-side horizon for path curves, in n^{2/3} units
  double curve_step = 0.01;
  std::size_t k = 10;
  std::uint64_t seed = 42;
  Mode mode = Mode::kCompare;
  std::filesystem::path out_dir = "out";
  unsigned workers = 1;
  bool allow_noncritical = false;
  bool include_truncated = false;
  bool force = false;
  bool quick = false;  // reduced invariant suite
  double crit_tol = 1e-9;
};

/// Parses the line-oriented format:
///
///   # comment
///   mode = compare
///   a = 0
///   n_list = 10000, 100000
///   [pmf]
///   0: 3/4
///   2: 1/4
///
/// Unknown keys are rejected. The result is not yet validated.
ExperimentConfig parse_config(std::string_view text);

/// Reads and parses a config file, then validates it.
ExperimentConfig load_config(const std::filesystem::path& path);

/// Checks every invariant of the configuration; throws ConfigError naming
/// the first violated one. Also materializes `pmf` from `pmf_text`.
void validate_config(ExperimentConfig& config);

}  // namespace critgraph
