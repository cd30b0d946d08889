// Reproduces the pinned limit-side constants in checks.hpp.
#include <cstdlib>
#include <iostream>

#include "critgraph/checks.hpp"
#include "critgraph/limit.hpp"

int main(int argc, char** argv) {
  const std::uint64_t seed = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 20240611;
  const std::int64_t paths = argc > 2 ? std::atoll(argv[2]) : 10000;
  const unsigned workers = argc > 3 ? static_cast<unsigned>(std::atoi(argv[3])) : 1;
  critgraph::LimitParams standard;
  const auto gate = critgraph::check_discretization_gate(standard, paths, 1.0, seed, workers);
  std::cout << "gate KS(dt, dt/2) = " << gate.value << "  (" << gate.detail << ")\n";
  const auto g = critgraph::sample_gamma(standard, paths, 10, seed, workers);
  std::cout << "B(s0) > 0 rate = " << g.truncation_rate << "\n";
  std::cout << "top-10 truncation rate = " << g.top_k_truncation_rate << " (" << g.top_k_truncated
            << " of " << paths << ")\n";
}
