// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <vector>

#include "spikemix/synthetic.hpp"

namespace fixture {

// Four unit-covariance clusters in r = 4, pairwise 8 apart, equal weights.
inline spikemix::SyntheticSpec separable_spec(int n = 300) {
  spikemix::RowMatrix means = spikemix::RowMatrix::Zero(4, 4);
  means(1, 0) = 8.0;
  means(2, 1) = 8.0;
  means(3, 2) = 8.0;
  std::vector<spikemix::SpdMatrix> covs(4, spikemix::SpdMatrix::identity(4));
  return {spikemix::SimplexVector({0.25, 0.25, 0.25, 0.25}), means, covs, n};
}

inline spikemix::LabeledFeatures separable(std::uint64_t seed, int n = 300) {
  spikemix::RngStream rng(seed, 99);
  return spikemix::generate_synthetic_mixture(separable_spec(n), rng);
}

inline spikemix::FeatureMatrix empty_features(int r) {
  spikemix::FeatureMatrix x;
  x.values.resize(0, r);
  return x;
}

inline spikemix::FeatureMatrix column(const std::vector<double>& v) {
  spikemix::FeatureMatrix x;
  x.values.resize(static_cast<Eigen::Index>(v.size()), 1);
  for (std::size_t i = 0; i < v.size(); ++i) x.values(static_cast<Eigen::Index>(i), 0) = v[i];
  return x;
}

}  // namespace fixture
