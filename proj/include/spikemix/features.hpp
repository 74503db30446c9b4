// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <vector>

#include "spikemix/linalg.hpp"

namespace spikemix {

// n observations by r features, stored row-major so each observation is
// contiguous. explained_variance is filled when the features are PCA scores.
struct FeatureMatrix {
  RowMatrix values;
  std::vector<double> explained_variance;

  FeatureMatrix() = default;
  explicit FeatureMatrix(RowMatrix v) : values(std::move(v)) {}

  int n() const { return static_cast<int>(values.rows()); }
  int r() const { return static_cast<int>(values.cols()); }
  const double* row(int i) const { return values.data() + static_cast<Eigen::Index>(i) * values.cols(); }

  VectorXd column_means() const;
  // Unbiased sample covariance (n - 1 denominator).
  MatrixXd covariance() const;
};

}  // namespace spikemix
