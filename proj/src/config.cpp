#include "critgraph/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "critgraph/dist.hpp"

namespace critgraph {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void fail(std::size_t line, const std::string& message) {
  throw ConfigError("line " + std::to_string(line) + ": " + message);
}

double to_double(std::string_view text, std::size_t line) {
  const std::string buffer(text);
  char* end = nullptr;
  const double v = std::strtod(buffer.c_str(), &end);
  if (buffer.empty() || end != buffer.c_str() + buffer.size() || !std::isfinite(v)) {
    fail(line, "expected a real number, got '" + buffer + "'");
  }
  return v;
}

std::int64_t to_int(std::string_view text, std::size_t line) {
  std::int64_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec == std::errc() && ptr == text.data() + text.size() && !text.empty()) return v;
  // Accept integral reals such as 1e5.
  const double d = to_double(text, line);
  if (d != std::floor(d) || std::fabs(d) > 9e18) fail(line, "expected an integer, got '" + std::string(text) + "'");
  return static_cast<std::int64_t>(d);
}

std::uint64_t to_uint(std::string_view text, std::size_t line) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    fail(line, "expected an unsigned integer, got '" + std::string(text) + "'");
  }
  return v;
}

bool to_bool(std::string_view text, std::size_t line) {
  std::string v(text);
  std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return std::tolower(c); });
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  fail(line, "expected a boolean, got '" + std::string(text) + "'");
}

}  // namespace

std::string_view to_string(Mode mode) {
  switch (mode) {
    case Mode::kCensus: return "census";
    case Mode::kPath: return "path";
    case Mode::kLimit: return "limit";
    case Mode::kCompare: return "compare";
    case Mode::kInvariants: return "invariants";
  }
  return "unknown";
}

Mode parse_mode(std::string_view text) {
  for (Mode m : {Mode::kCensus, Mode::kPath, Mode::kLimit, Mode::kCompare, Mode::kInvariants}) {
    if (text == to_string(m)) return m;
  }
  throw ConfigError("unknown mode '" + std::string(text) + "'");
}

ExperimentConfig parse_config(std::string_view text) {
  ExperimentConfig c;
  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t line = 0;
  bool in_pmf = false;
  bool saw_pmf = false;
  std::string pmf_atoms;
  while (std::getline(in, raw)) {
    ++line;
    std::string_view view(raw);
    if (const auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    view = trim(view);
    if (view.empty()) continue;

    if (view.front() == '[') {
      if (view != "[pmf]") fail(line, "unknown section '" + std::string(view) + "'");
      if (saw_pmf) fail(line, "duplicate [pmf] section");
      in_pmf = saw_pmf = true;
      continue;
    }
    if (in_pmf) {
      if (view.find('=') != std::string_view::npos) {
        fail(line, "expected value:probability inside [pmf]");
      }
      std::string_view rest = view;
      while (!rest.empty()) {
        const auto comma = rest.find(',');
        const auto atom = trim(rest.substr(0, comma));
        if (!atom.empty()) {
          try {
            (void)parse_pmf_atom(atom);
          } catch (const std::invalid_argument& e) {
            fail(line, e.what());
          }
        }
        if (comma == std::string_view::npos) break;
        rest = rest.substr(comma + 1);
      }
      if (!pmf_atoms.empty()) pmf_atoms += ", ";
      pmf_atoms += std::string(view);
      continue;
    }

    const auto eq = view.find('=');
    if (eq == std::string_view::npos) fail(line, "expected key = value");
    const std::string key(trim(view.substr(0, eq)));
    const std::string_view value = trim(view.substr(eq + 1));
    if (value.empty()) fail(line, "missing value for '" + key + "'");

    if (key == "pmf") {
      if (saw_pmf) fail(line, "pmf given twice");
      saw_pmf = true;
      pmf_atoms = std::string(value);
    } else if (key == "a") {
      c.a = to_double(value, line);
    } else if (key == "n_list") {
      c.n_list.clear();
      std::string_view rest = value;
      while (!rest.empty()) {
        const auto comma = rest.find(',');
        const auto item = trim(rest.substr(0, comma));
        if (item.empty()) fail(line, "empty entry in n_list");
        c.n_list.push_back(to_int(item, line));
        if (comma == std::string_view::npos) break;
        rest = rest.substr(comma + 1);
      }
    } else if (key == "replicas") {
      c.replicas = to_int(value, line);
    } else if (key == "s0") {
      c.s0 = to_double(value, line);
    } else if (key == "dt") {
      c.dt = to_double(value, line);
    } else if (key == "path_s0") {
      c.path_s0 = to_double(value, line);
    } else if (key == "curve_step") {
      c.curve_step = to_double(value, line);
    } else if (key == "K" || key == "k") {
      const auto k = to_int(value, line);
      if (k < 1) fail(line, "K must be >= 1");
      c.k = static_cast<std::size_t>(k);
    } else if (key == "seed") {
      c.seed = to_uint(value, line);
    } else if (key == "mode") {
      try {
        c.mode = parse_mode(value);
      } catch (const ConfigError& e) {
        fail(line, e.what());
      }
    } else if (key == "out" || key == "output_dir") {
      c.out_dir = std::string(value);
    } else if (key == "workers") {
      const auto w = to_int(value, line);
      if (w < 1) fail(line, "workers must be >= 1");
      c.workers = static_cast<unsigned>(w);
    } else if (key == "allow_noncritical") {
      c.allow_noncritical = to_bool(value, line);
    } else if (key == "include_truncated") {
      c.include_truncated = to_bool(value, line);
    } else if (key == "quick") {
      c.quick = to_bool(value, line);
    } else if (key == "crit_tol") {
      c.crit_tol = to_double(value, line);
    } else {
      fail(line, "unknown key '" + key + "'");
    }
  }
  c.pmf_text = pmf_atoms;
  return c;
}

void validate_config(ExperimentConfig& c) {
  if (c.pmf_text.empty()) {
    // The invariant suite fixes its own laws.
    if (c.mode == Mode::kInvariants) {
      c.pmf.reset();
      return;
    }
    throw ConfigError("pmf: missing [pmf] section");
  }
  try {
    c.pmf = parse_pmf(c.pmf_text);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("pmf: ") + e.what());
  }
  const MomentSummary m = compute_moments(*c.pmf, c.crit_tol);
  if (c.n_list.empty()) throw ConfigError("n_list: must be non-empty");
  for (std::size_t i = 0; i < c.n_list.size(); ++i) {
    if (c.n_list[i] < 1) throw ConfigError("n_list: entries must be >= 1");
    if (i > 0 && c.n_list[i] <= c.n_list[i - 1]) throw ConfigError("n_list: must be strictly ascending");
  }
  if (c.replicas < 1) throw ConfigError("replicas: must be >= 1");
  if (c.k < 1) throw ConfigError("K: must be >= 1");
  if (c.workers < 1) throw ConfigError("workers: must be >= 1");
  if (!(c.s0 > 0.0)) throw ConfigError("s0: must be > 0");
  if (!(c.dt > 0.0) || c.dt > c.s0 / 100.0) throw ConfigError("dt: must lie in (0, s0/100]");
  if (!(c.path_s0 > 0.0)) throw ConfigError("path_s0: must be > 0");
  if (!(c.curve_step > 0.0) || c.curve_step > c.path_s0) {
    throw ConfigError("curve_step: must lie in (0, path_s0]");
  }
  if ((c.mode == Mode::kPath || c.mode == Mode::kCompare) && c.replicas < 2) {
    throw ConfigError("replicas: path and compare modes need at least 2");
  }
  if (c.mode == Mode::kCompare && !m.critical && !c.allow_noncritical) {
    throw ConfigError("pmf: compare mode requires E X^2 = 1 (got " + std::to_string(m.ex2) +
                      "); pass --allow-noncritical to override");
  }
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  ExperimentConfig c = parse_config(buffer.str());
  validate_config(c);
  return c;
}

}  // namespace critgraph
