#include "critgraph/dist.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <stdexcept>

namespace critgraph {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

long double parse_real(std::string_view text) {
  const std::string buffer(trim(text));
  if (buffer.empty()) throw std::invalid_argument("empty number");
  char* end = nullptr;
  const long double value = std::strtold(buffer.c_str(), &end);
  if (end != buffer.c_str() + buffer.size() || !std::isfinite(value)) {
    throw std::invalid_argument("malformed number '" + buffer + "'");
  }
  return value;
}

Type parse_type(std::string_view text) {
  const auto t = trim(text);
  Type value = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
    throw std::invalid_argument("malformed type value '" + std::string(t) + "'");
  }
  return value;
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

}  // namespace

TypePmf TypePmf::create(std::vector<Type> support, std::vector<double> probs) {
  if (support.size() != probs.size()) {
    throw std::invalid_argument("support and probabilities differ in length");
  }
  if (support.empty()) throw std::invalid_argument("empty support");

  std::vector<std::size_t> order(support.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t l, std::size_t r) { return support[l] < support[r]; });

  std::vector<Type> sorted_support;
  std::vector<double> sorted_probs;
  long double total = 0.0L;
  bool any_positive = false;
  for (std::size_t idx : order) {
    const Type x = support[idx];
    const double p = probs[idx];
    if (x < 0) throw std::invalid_argument("negative type value");
    if (!(p >= 0.0) || !std::isfinite(p)) {
      throw std::invalid_argument("probabilities must be finite and >= 0");
    }
    if (!sorted_support.empty() && sorted_support.back() == x) {
      throw std::invalid_argument("duplicate type value " + std::to_string(x));
    }
    sorted_support.push_back(x);
    sorted_probs.push_back(p);
    total += p;
    if (x > 0 && p > 0.0) any_positive = true;
  }
  if (std::fabs(static_cast<double>(total - 1.0L)) > kSumTolerance) {
    throw std::invalid_argument("probabilities do not sum to 1");
  }
  if (!any_positive) throw std::invalid_argument("no positive types");
  return TypePmf(std::move(sorted_support), std::move(sorted_probs));
}

double TypePmf::prob(Type x) const {
  const auto it = std::lower_bound(support_.begin(), support_.end(), x);
  if (it == support_.end() || *it != x) return 0.0;
  return probs_[static_cast<std::size_t>(it - support_.begin())];
}

std::string TypePmf::to_string() const {
  std::string out;
  for (std::size_t i = 0; i < support_.size(); ++i) {
    if (i) out += ", ";
    out += std::to_string(support_[i]) + ":" + format_double(probs_[i]);
  }
  return out;
}

long double parse_probability(std::string_view text) {
  const auto t = trim(text);
  const auto slash = t.find('/');
  long double value = 0.0L;
  if (slash == std::string_view::npos) {
    value = parse_real(t);
  } else {
    const long double num = parse_real(t.substr(0, slash));
    const long double den = parse_real(t.substr(slash + 1));
    if (den == 0.0L) throw std::invalid_argument("zero denominator in probability");
    value = num / den;
  }
  if (value < 0.0L || value > 1.0L) {
    throw std::invalid_argument("probability outside [0,1]: " + std::string(t));
  }
  return value;
}

std::pair<Type, double> parse_pmf_atom(std::string_view atom) {
  atom = trim(atom);
  const auto colon = atom.find(':');
  if (colon == std::string_view::npos) {
    throw std::invalid_argument("pmf atom '" + std::string(atom) +
                                "' is not of the form value:probability");
  }
  return {parse_type(atom.substr(0, colon)),
          static_cast<double>(parse_probability(atom.substr(colon + 1)))};
}

TypePmf parse_pmf(std::string_view text) {
  std::vector<Type> support;
  std::vector<double> probs;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto next = text.find_first_of(",\n;", pos);
    if (next == std::string_view::npos) next = text.size();
    const auto atom = trim(text.substr(pos, next - pos));
    pos = next + 1;
    if (atom.empty()) continue;
    const auto [type, prob] = parse_pmf_atom(atom);
    support.push_back(type);
    probs.push_back(prob);
  }
  return TypePmf::create(std::move(support), std::move(probs));
}

MomentSummary compute_moments(const TypePmf& pmf, double tol) {
  long double m1 = 0.0L, m2 = 0.0L, m3 = 0.0L;
  for (std::size_t i = 0; i < pmf.size(); ++i) {
    const long double x = static_cast<long double>(pmf.support()[i]);
    const long double p = pmf.probs()[i];
    m1 += x * p;
    m2 += x * x * p;
    m3 += x * x * x * p;
  }
  if (!(m1 > 0.0L)) throw std::invalid_argument("no positive types");
  MomentSummary m;
  m.ex = static_cast<double>(m1);
  m.ex2 = static_cast<double>(m2);
  m.ex3 = static_cast<double>(m3);
  m.sigma = static_cast<double>(std::sqrt(m1 * m3));
  m.beta = static_cast<double>(m3 / m1);
  m.critical = std::fabs(m.ex2 - 1.0) <= tol;
  return m;
}

TypePmf size_biased_pmf(const TypePmf& pmf) {
  long double mean = 0.0L;
  for (std::size_t i = 0; i < pmf.size(); ++i) {
    mean += static_cast<long double>(pmf.support()[i]) * pmf.probs()[i];
  }
  if (!(mean > 0.0L)) throw std::invalid_argument("size-biasing requires E X > 0");
  std::vector<Type> support;
  std::vector<double> probs;
  for (std::size_t i = 0; i < pmf.size(); ++i) {
    const Type x = pmf.support()[i];
    if (x == 0) continue;
    support.push_back(x);
    probs.push_back(static_cast<double>(static_cast<long double>(x) * pmf.probs()[i] / mean));
  }
  return TypePmf::create(std::move(support), std::move(probs));
}

TypeCounts TypeCounts::from_map(const std::map<Type, std::int64_t>& counts) {
  TypeCounts out;
  for (const auto& [type, count] : counts) {
    if (type < 0) throw std::invalid_argument("negative type value");
    if (count < 0) throw std::invalid_argument("negative type count");
    if (count == 0) continue;
    out.entries_.push_back({type, count});
    out.n_ += count;
  }
  return out;
}

TypeCounts TypeCounts::from_types(std::span<const Type> types) {
  std::map<Type, std::int64_t> counts;
  for (Type x : types) ++counts[x];
  return from_map(counts);
}

std::int64_t TypeCounts::count_of(Type x) const {
  for (const auto& e : entries_) {
    if (e.type == x) return e.count;
  }
  return 0;
}

std::int64_t TypeCounts::total_weight() const {
  std::int64_t w = 0;
  for (const auto& e : entries_) w += e.type * e.count;
  return w;
}

std::vector<Type> TypeCounts::expand() const {
  std::vector<Type> out;
  out.reserve(static_cast<std::size_t>(n_));
  for (const auto& e : entries_) out.insert(out.end(), static_cast<std::size_t>(e.count), e.type);
  return out;
}

TypeCounts sample_types(const TypePmf& pmf, std::int64_t n, Rng& rng) {
  if (n < 1) throw std::invalid_argument("sample_types requires n >= 1");
  std::map<Type, std::int64_t> counts;
  std::int64_t remaining = n;
  long double mass_left = 1.0L;
  for (std::size_t i = 0; i < pmf.size() && remaining > 0; ++i) {
    const long double p = pmf.probs()[i];
    std::int64_t c = 0;
    if (i + 1 == pmf.size() || p >= mass_left) {
      c = remaining;
    } else if (p > 0.0L) {
      c = sample_binomial(rng, remaining, static_cast<double>(p / mass_left));
    }
    counts[pmf.support()[i]] += c;
    remaining -= c;
    mass_left -= p;
  }
  return TypeCounts::from_map(counts);
}

MaxTypeDiagnostic validate_max_type(const TypeCounts& counts) {
  if (counts.empty()) throw std::invalid_argument("validate_max_type requires non-empty counts");
  MaxTypeDiagnostic d;
  d.max_type = counts.entries().back().type;
  d.cube_root_n = std::cbrt(static_cast<double>(counts.n()));
  d.ratio = static_cast<double>(d.max_type) / d.cube_root_n;
  d.flagged = d.ratio >= 1.0;
  return d;
}

}  // namespace critgraph
