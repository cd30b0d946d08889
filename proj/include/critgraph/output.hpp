#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "critgraph/config.hpp"

namespace critgraph {

/// Comma-separated table with a header row.
struct Table {
  std::string filename;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

/// Everything one run writes: a structured summary (deterministic for a
/// given config and seed), tables, and a human-readable log that may carry
/// wall-clock timings.
struct RunArtifacts {
  Mode mode = Mode::kCompare;
  std::uint64_t seed = 0;
  nlohmann::ordered_json summary;
  std::vector<Table> tables;
  std::vector<std::string> log;
  bool all_passed = true;  // invariants mode
  bool interrupted = false;
};

/// Shortest round-trip decimal form of a double.
std::string format_number(double v);

/// Runs the configured mode and collects its outputs.
RunArtifacts execute(const ExperimentConfig& config);

std::string summary_filename(Mode mode, std::uint64_t seed);
std::string log_filename(Mode mode, std::uint64_t seed);

/// Writes summary, tables and log into `dir` (created if missing). Refuses
/// to replace existing files unless `force`; I/O errors are rethrown with
/// the operating system's message.
std::vector<std::filesystem::path> emit_outputs(const RunArtifacts& artifacts,
                                                const std::filesystem::path& dir, bool force);

}  // namespace critgraph
