#include "critgraph/census.hpp"

#include <algorithm>
#include <functional>
#include <numeric>

namespace critgraph {

std::int64_t ComponentCensus::total() const {
  return std::accumulate(sizes.begin(), sizes.end(), std::int64_t{0});
}

std::int64_t ComponentCensus::size_at(std::size_t rank) const {
  return rank < sizes.size() ? sizes[rank] : 0;
}

void sort_descending(std::vector<std::int64_t>& sizes) {
  std::sort(sizes.begin(), sizes.end(), std::greater<>());
}

}  // namespace critgraph
