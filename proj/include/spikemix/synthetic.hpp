// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <span>
#include <vector>

#include "spikemix/distributions.hpp"
#include "spikemix/features.hpp"
#include "spikemix/waveforms.hpp"

namespace spikemix {

// Ground-truth Gaussian mixture used in place of recorded data.
struct SyntheticSpec {
  SimplexVector weights;
  RowMatrix means;  // K x r
  std::vector<SpdMatrix> covariances;
  int n = 0;
  double outlier_fraction = 0.0;
  double outlier_scale = 10.0;

  int components() const { return static_cast<int>(weights.size()); }
  void validate() const;
};

// Labels are 1..K for component draws and 0 for outliers.
struct LabeledFeatures {
  FeatureMatrix features;
  std::vector<int> labels;
};

struct LabeledWaveforms {
  WaveformMatrix waveforms;
  std::vector<int> labels;
};

// Each observation picks its component from the weights, then with probability
// outlier_fraction is drawn with covariance inflated by outlier_scale and
// labelled 0.
LabeledFeatures generate_synthetic_mixture(const SyntheticSpec& spec, RngStream& rng);

// counts[k] copies of template k plus i.i.d. N(0, noise_sd^2) per sample,
// emitted in template order and labelled k + 1.
LabeledWaveforms generate_synthetic_waveforms(const RowMatrix& templates,
                                              std::span<const int> counts, double noise_sd,
                                              RngStream& rng);

}  // namespace spikemix
