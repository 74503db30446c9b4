// Apache License, Version 2.0, refer to LICENSE.txt

#include "spikemix/trace.hpp"

#include <algorithm>
#include <stdexcept>

namespace spikemix {

int count_distinct(const std::vector<int>& labels) {
  std::vector<int> sorted(labels);
  std::sort(sorted.begin(), sorted.end());
  return static_cast<int>(std::unique(sorted.begin(), sorted.end()) - sorted.begin());
}

AllocationTrace AllocationTrace::from_draws(std::vector<std::vector<int>> draws) {
  AllocationTrace t;
  for (const auto& d : draws) {
    if (d.size() != draws.front().size())
      throw std::invalid_argument("allocation trace rows have different lengths");
    t.occupied.push_back(count_distinct(d));
  }
  t.draws = std::move(draws);
  return t;
}

}  // namespace spikemix
