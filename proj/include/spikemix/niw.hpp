// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <vector>

#include "spikemix/distributions.hpp"
#include "spikemix/features.hpp"

namespace spikemix {

// Normal-Inverse-Wishart prior shared by every mixture component:
//   Sigma ~ IW(c0, C0),  mu | Sigma ~ N(b0, Sigma / N0).
struct NiwHyperparams {
  VectorXd b0;
  double n0;
  double c0;
  SpdMatrix c0_scale;

  int dim() const { return static_cast<int>(b0.size()); }
  void validate() const;

  // b0 = column means, C0 = scale_factor * cov(y).
  static NiwHyperparams from_data(const FeatureMatrix& x, double n0 = 0.01, double c0 = 5.0,
                                  double scale_factor = 0.75);
};

// Sufficient statistics of the observations allocated to one component.
struct ClusterStats {
  int count = 0;
  VectorXd mean;     // zero when count == 0
  MatrixXd scatter;  // sum (y - mean)(y - mean)^T
};

// Collects per-component statistics for labels in [0, k).
std::vector<ClusterStats> cluster_stats(const FeatureMatrix& x, const std::vector<int>& z,
                                        int k);

struct NiwPosterior {
  VectorXd b;
  double n;
  double c;
  MatrixXd scale;
};

// Conjugate update: N_n = N0 + n_k, b_n = (N0 b0 + n_k ybar) / N_n, c_n = c0 + n_k,
// C_n = C0 + S_k + (N0 n_k / N_n)(ybar - b0)(ybar - b0)^T.
NiwPosterior niw_posterior(const NiwHyperparams& hyper, const ClusterStats& stats);

// Sigma ~ IW(c, scale), then mu ~ N(b, Sigma / n).
GaussianComponent sample_niw(const NiwPosterior& post, RngStream& rng);
GaussianComponent sample_niw_prior(const NiwHyperparams& hyper, RngStream& rng);

}  // namespace spikemix
