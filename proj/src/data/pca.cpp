// Apache License, Version 2.0, refer to LICENSE.txt

#include "spikemix/pca.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace spikemix {

namespace {

constexpr double kMadConsistency = 1.4826;

double median(std::vector<double> v) {
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  const double hi = v[mid];
  if (v.size() % 2 == 1) return hi;
  const double lo = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lo + hi);
}

}  // namespace

PcaResult pca_reduce(const WaveformMatrix& w, int r, bool center, bool robust_scale) {
  const int n = w.n();
  const int s = w.s();
  if (r < 1) throw std::invalid_argument("pca_reduce: r must be at least 1");
  if (r > std::min(n, s))
    throw std::invalid_argument("pca_reduce: r = " + std::to_string(r) +
                                " exceeds min(n, s) = " + std::to_string(std::min(n, s)));
  if (n < 2) throw std::invalid_argument("pca_reduce: need at least two waveforms");

  PcaResult out;
  RowMatrix z = w.values;
  if (robust_scale) {
    out.robust_center.resize(s);
    out.robust_scale.resize(s);
    for (int j = 0; j < s; ++j) {
      std::vector<double> col(n);
      for (int i = 0; i < n; ++i) col[i] = z(i, j);
      const double med = median(col);
      for (double& x : col) x = std::abs(x - med);
      const double mad = kMadConsistency * median(col);
      if (!(mad > 0.0))
        throw std::invalid_argument("pca_reduce: column " + std::to_string(j + 1) +
                                    " has zero MAD under robust scaling");
      out.robust_center(j) = med;
      out.robust_scale(j) = mad;
      z.col(j) = (z.col(j).array() - med) / mad;
    }
  }

  const VectorXd col_mean = z.colwise().mean().transpose();
  const RowMatrix centered = z.rowwise() - col_mean.transpose();
  MatrixXd cov = (centered.transpose() * centered) / static_cast<double>(n - 1);
  cov = 0.5 * (cov + cov.transpose());

  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(cov);
  if (eig.info() != Eigen::Success) throw std::runtime_error("pca_reduce: eigensolver failed");
  // Eigen returns ascending eigenvalues; reverse, with a stable index tie-break.
  std::vector<int> order(s);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return eig.eigenvalues()(a) > eig.eigenvalues()(b);
  });

  out.eigenvalues.resize(s);
  MatrixXd vectors(s, s);
  for (int c = 0; c < s; ++c) {
    out.eigenvalues(c) = std::max(0.0, eig.eigenvalues()(order[c]));
    VectorXd v = eig.eigenvectors().col(order[c]);
    Eigen::Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    if (v(arg) < 0.0) v = -v;
    vectors.col(c) = v;
  }
  out.loadings = vectors.leftCols(r);
  out.mean = center ? col_mean : VectorXd::Zero(s);

  const RowMatrix shifted = z.rowwise() - out.mean.transpose();
  out.features = FeatureMatrix(shifted * out.loadings);

  const double trace = out.eigenvalues.sum();
  out.features.explained_variance.resize(r);
  for (int c = 0; c < r; ++c)
    out.features.explained_variance[c] = trace > 0.0 ? out.eigenvalues(c) / trace : 0.0;
  return out;
}

void standardize_columns(FeatureMatrix& x) {
  if (x.n() < 2) throw std::invalid_argument("standardize_columns: need at least two rows");
  const MatrixXd cov = x.covariance();
  for (int j = 0; j < x.r(); ++j) {
    const double sd = std::sqrt(cov(j, j));
    if (!(sd > 0.0))
      throw std::invalid_argument("standardize_columns: column " + std::to_string(j + 1) +
                                  " has zero variance");
    x.values.col(j) /= sd;
  }
}

}  // namespace spikemix
