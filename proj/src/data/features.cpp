// Apache License, Version 2.0, refer to LICENSE.txt

#include "spikemix/features.hpp"

#include <stdexcept>

namespace spikemix {

VectorXd FeatureMatrix::column_means() const {
  if (n() == 0) return VectorXd::Zero(r());
  return values.colwise().mean().transpose();
}

MatrixXd FeatureMatrix::covariance() const {
  if (n() < 2) throw std::invalid_argument("covariance needs at least two observations");
  const RowMatrix centered = values.rowwise() - values.colwise().mean();
  MatrixXd cov = (centered.transpose() * centered) / static_cast<double>(n() - 1);
  return 0.5 * (cov + cov.transpose());
}

}  // namespace spikemix
