// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <vector>

namespace spikemix {

// Kept MCMC draws of one chain. Allocations are zero-based component indices.
struct AllocationTrace {
  std::vector<std::vector<int>> draws;
  std::vector<int> occupied;          // components with n_k >= 1, per kept draw
  std::vector<double> weight_sums;    // sum_k log pi_k (OFM inference rung)
  std::vector<int> represented;       // stick truncation level (DPM)
  std::vector<double> concentration;  // m (DPM)
  std::vector<double> swap_acceptance;  // per adjacent rung pair (OFM)
  std::vector<double> label_switch_acceptance;  // random, adjacent (DPM)
  int burn_in = 0;
  int thin = 1;

  std::size_t size() const { return draws.size(); }
  bool empty() const { return draws.empty(); }
  int observations() const { return draws.empty() ? 0 : static_cast<int>(draws.front().size()); }

  // Builds a trace from raw allocation rows, deriving occupied counts as the
  // number of distinct labels per row.
  static AllocationTrace from_draws(std::vector<std::vector<int>> draws);
};

int count_distinct(const std::vector<int>& labels);

}  // namespace spikemix
