#pragma once

#include <cstdint>
#include <vector>

namespace critgraph {

/// Component sizes of one realization, largest first.
struct ComponentCensus {
  std::vector<std::int64_t> sizes;
  std::int64_t n = 0;
  std::int64_t zero_type_singletons = 0;
  bool complete = false;  // every vertex accounted for

  std::int64_t total() const;
  /// k-th largest size (0-based), or 0 past the end.
  std::int64_t size_at(std::size_t rank) const;
};

/// Sorts sizes descending in place.
void sort_descending(std::vector<std::int64_t>& sizes);

}  // namespace critgraph
