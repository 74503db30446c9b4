// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace spikemix {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

class NotPositiveDefinite : public std::domain_error {
 public:
  NotPositiveDefinite(int pivot, double value);
  // Zero-based row of the first non-positive pivot.
  int pivot() const { return pivot_; }

 private:
  int pivot_;
};

// Lower Cholesky factor L with L * L^T = a. Throws NotPositiveDefinite on the
// first non-positive pivot; only the lower triangle of `a` is read.
MatrixXd cholesky(const MatrixXd& a);

// Symmetric positive-definite matrix together with its Cholesky factor.
class SpdMatrix {
 public:
  explicit SpdMatrix(MatrixXd a);
  static SpdMatrix identity(int dim);

  int dim() const { return static_cast<int>(a_.rows()); }
  const MatrixXd& matrix() const { return a_; }
  const MatrixXd& chol() const { return l_; }
  double log_det() const;

 private:
  MatrixXd a_;
  MatrixXd l_;
};

// log N(y; mu, L L^T).
double mvn_logpdf(const VectorXd& y, const VectorXd& mu, const MatrixXd& chol_sigma);

// Solves L x = b in place for lower-triangular L.
void forward_substitute(const MatrixXd& l, VectorXd& b);

// Multivariate normal component with cached factor and normalizing constant,
// evaluated on raw row pointers in the sampler inner loops.
class GaussianComponent {
 public:
  GaussianComponent(VectorXd mean, SpdMatrix cov);

  const VectorXd& mean() const { return mean_; }
  const SpdMatrix& cov() const { return cov_; }
  int dim() const { return static_cast<int>(mean_.size()); }

  double log_density(const double* y) const;

 private:
  VectorXd mean_;
  SpdMatrix cov_;
  double log_norm_;
};

}  // namespace spikemix
