#include <csignal>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "critgraph/config.hpp"
#include "critgraph/experiment.hpp"
#include "critgraph/output.hpp"

namespace {

extern "C" void on_interrupt(int) { critgraph::request_stop(); }

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw critgraph::ConfigError("cannot open config " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Critical rank-1 random graph simulation lab"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::string pmf_text;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<unsigned> workers;
  bool force = false;
  bool allow_noncritical = false;
  bool quick = false;

  app.add_option("--config", config_path, "Config file (key = value, [pmf] section)");
  app.add_option("--pmf", pmf_text, "Type pmf, e.g. \"0:3/4, 2:1/4\" (replaces the [pmf] section)");
  app.add_option("--seed", seed, "Master seed");
  app.add_option("--out", out_dir, "Output directory");
  app.add_option("--workers", workers, "Worker threads")->check(CLI::PositiveNumber);
  app.add_flag("--force", force, "Overwrite existing output files");
  app.add_flag("--allow-noncritical", allow_noncritical, "Permit E X^2 != 1 in compare mode");

  const std::pair<const char*, const char*> commands[] = {
      {"census", "Top-K component sizes by exhausting the exploration walk"},
      {"path", "Rescaled walk, drift and quadratic variation curves"},
      {"limit", "Excursion lengths of the reflected limit process"},
      {"compare", "Walk censuses against the limit, with KS and l2 trends"},
      {"invariants", "Run the verification battery"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    if (std::string_view(name) == "invariants") {
      sub->add_flag("--quick", quick, "Reduced sizes for a smoke run");
    }
  }
  CLI11_PARSE(app, argc, argv);

  critgraph::ExperimentConfig config;
  try {
    if (!config_path.empty()) config = critgraph::parse_config(read_file(config_path));
    config.mode = critgraph::parse_mode(app.get_subcommands().front()->get_name());
    if (!pmf_text.empty()) config.pmf_text = pmf_text;
    if (seed) config.seed = *seed;
    if (out_dir) config.out_dir = *out_dir;
    if (workers) config.workers = *workers;
    config.force = config.force || force;
    config.allow_noncritical = config.allow_noncritical || allow_noncritical;
    config.quick = config.quick || quick;
    critgraph::validate_config(config);
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  }

  std::signal(SIGINT, on_interrupt);
  std::signal(SIGTERM, on_interrupt);

  critgraph::RunArtifacts artifacts;
  try {
    artifacts = critgraph::execute(config);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  if (critgraph::stop_requested()) artifacts.interrupted = true;

  try {
    for (const auto& path : critgraph::emit_outputs(artifacts, config.out_dir, config.force)) {
      std::cout << path.string() << '\n';
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  for (const auto& line : artifacts.log) std::cerr << line << '\n';

  if (artifacts.interrupted) {
    std::cerr << "interrupted: partial results written\n";
    return 130;
  }
  return artifacts.all_passed ? 0 : 1;
}
