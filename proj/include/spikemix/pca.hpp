// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include "spikemix/features.hpp"
#include "spikemix/waveforms.hpp"

namespace spikemix {

// Fitted PCA. Scores are (Z - mean) * loadings, where Z is the input after the
// optional median/MAD standardization and mean is zero when centering is off.
struct PcaResult {
  FeatureMatrix features;
  MatrixXd loadings;       // s x r, columns are unit eigenvectors
  VectorXd eigenvalues;    // all s eigenvalues, descending
  VectorXd mean;           // subtracted before projection
  VectorXd robust_center;  // column medians (robust_scale only)
  VectorXd robust_scale;   // 1.4826 * MAD (robust_scale only)
};

// Classical PCA on the sample covariance. Each eigenvector's largest-magnitude
// loading is made positive. explained_variance = top-r eigenvalues / trace.
PcaResult pca_reduce(const WaveformMatrix& w, int r, bool center = true,
                     bool robust_scale = false);

// Rescales every column to unit sample variance.
void standardize_columns(FeatureMatrix& x);

}  // namespace spikemix
