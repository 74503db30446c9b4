// Apache License, Version 2.0, refer to LICENSE.txt

#include "spikemix/linalg.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace spikemix {

namespace {

std::string pivot_message(int pivot, double value) {
  std::ostringstream os;
  os << "matrix is not positive definite: pivot " << pivot + 1 << " is non-positive ("
     << value << ")";
  return os.str();
}

constexpr double kSymmetryTol = 1e-10;

}  // namespace

NotPositiveDefinite::NotPositiveDefinite(int pivot, double value)
    : std::domain_error(pivot_message(pivot, value)), pivot_(pivot) {}

MatrixXd cholesky(const MatrixXd& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("cholesky: matrix is not square");
  const Eigen::Index n = a.rows();
  MatrixXd l = MatrixXd::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    double d = a(j, j);
    for (Eigen::Index k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
    if (!(d > 0.0)) throw NotPositiveDefinite(static_cast<int>(j), d);
    const double ljj = std::sqrt(d);
    l(j, j) = ljj;
    for (Eigen::Index i = j + 1; i < n; ++i) {
      double s = a(i, j);
      for (Eigen::Index k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      l(i, j) = s / ljj;
    }
  }
  return l;
}

SpdMatrix::SpdMatrix(MatrixXd a) : a_(std::move(a)) {
  if (a_.rows() == 0 || a_.rows() != a_.cols())
    throw std::invalid_argument("SpdMatrix: matrix must be square and non-empty");
  const double scale = std::max(1.0, a_.cwiseAbs().maxCoeff());
  if ((a_ - a_.transpose()).cwiseAbs().maxCoeff() > kSymmetryTol * scale)
    throw std::invalid_argument("SpdMatrix: matrix is not symmetric");
  l_ = cholesky(a_);
}

SpdMatrix SpdMatrix::identity(int dim) { return SpdMatrix(MatrixXd::Identity(dim, dim)); }

double SpdMatrix::log_det() const { return 2.0 * l_.diagonal().array().log().sum(); }

void forward_substitute(const MatrixXd& l, VectorXd& b) {
  const Eigen::Index n = l.rows();
  for (Eigen::Index i = 0; i < n; ++i) {
    double s = b(i);
    for (Eigen::Index k = 0; k < i; ++k) s -= l(i, k) * b(k);
    b(i) = s / l(i, i);
  }
}

double mvn_logpdf(const VectorXd& y, const VectorXd& mu, const MatrixXd& chol_sigma) {
  if (y.size() != mu.size() || chol_sigma.rows() != y.size() || chol_sigma.cols() != y.size())
    throw std::invalid_argument("mvn_logpdf: dimension mismatch");
  VectorXd w = y - mu;
  forward_substitute(chol_sigma, w);
  const double r = static_cast<double>(y.size());
  return -0.5 * r * std::log(2.0 * std::numbers::pi) -
         chol_sigma.diagonal().array().log().sum() - 0.5 * w.squaredNorm();
}

GaussianComponent::GaussianComponent(VectorXd mean, SpdMatrix cov)
    : mean_(std::move(mean)), cov_(std::move(cov)) {
  if (mean_.size() != cov_.dim())
    throw std::invalid_argument("GaussianComponent: dimension mismatch");
  log_norm_ = -0.5 * static_cast<double>(mean_.size()) * std::log(2.0 * std::numbers::pi) -
              0.5 * cov_.log_det();
}

double GaussianComponent::log_density(const double* y) const {
  // r is small (typically 4), so a fixed-size scratch buffer avoids allocation.
  constexpr int kStack = 16;
  const int r = dim();
  double stack[kStack];
  VectorXd heap;
  double* w = stack;
  if (r > kStack) {
    heap.resize(r);
    w = heap.data();
  }
  const MatrixXd& l = cov_.chol();
  double quad = 0.0;
  for (int i = 0; i < r; ++i) {
    double s = y[i] - mean_(i);
    for (int k = 0; k < i; ++k) s -= l(i, k) * w[k];
    w[i] = s / l(i, i);
    quad += w[i] * w[i];
  }
  return log_norm_ - 0.5 * quad;
}

}  // namespace spikemix
