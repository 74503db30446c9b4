// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <vector>

#include "spikemix/features.hpp"
#include "spikemix/rng.hpp"

namespace spikemix {

struct KmeansOptions {
  int max_sweeps = 100;
};

// Lloyd's algorithm with k-means++ seeding. Returns labels in [0, k).
// Clusters that empty during a sweep are re-seeded at the point farthest
// from its assigned centre.
std::vector<int> kmeans(const FeatureMatrix& x, int k, RngStream& rng,
                        const KmeansOptions& options = {});

// Within-cluster sum of squared distances to cluster means.
double within_cluster_ss(const FeatureMatrix& x, const std::vector<int>& labels);

}  // namespace spikemix
