// Apache License, Version 2.0, refer to LICENSE.txt

#include "spikemix/synthetic.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace spikemix {

void SyntheticSpec::validate() const {
  const int k = components();
  if (means.rows() != k)
    throw std::invalid_argument("synthetic spec: " + std::to_string(means.rows()) +
                                " means for " + std::to_string(k) + " weights");
  if (static_cast<int>(covariances.size()) != k)
    throw std::invalid_argument("synthetic spec: " + std::to_string(covariances.size()) +
                                " covariances for " + std::to_string(k) + " weights");
  if (means.cols() < 1) throw std::invalid_argument("synthetic spec: zero-dimensional means");
  for (const auto& c : covariances)
    if (c.dim() != means.cols())
      throw std::invalid_argument("synthetic spec: covariance dimension does not match means");
  if (n < 0) throw std::invalid_argument("synthetic spec: n must be non-negative");
  if (!(outlier_fraction >= 0.0 && outlier_fraction < 1.0))
    throw std::invalid_argument("synthetic spec: outlier fraction must lie in [0, 1)");
  if (!(outlier_scale > 1.0))
    throw std::invalid_argument("synthetic spec: outlier scale must exceed 1");
}

LabeledFeatures generate_synthetic_mixture(const SyntheticSpec& spec, RngStream& rng) {
  spec.validate();
  const int r = static_cast<int>(spec.means.cols());
  std::vector<double> logw(spec.weights.size());
  for (std::size_t k = 0; k < logw.size(); ++k) logw[k] = std::log(spec.weights[k]);
  const double inflate = std::sqrt(spec.outlier_scale);

  LabeledFeatures out;
  out.features.values.resize(spec.n, r);
  out.labels.resize(spec.n);
  for (int i = 0; i < spec.n; ++i) {
    const int k = sample_categorical_log(logw, rng);
    const bool outlier = spec.outlier_fraction > 0.0 && rng.uniform() < spec.outlier_fraction;
    const VectorXd mu = spec.means.row(k).transpose();
    const MatrixXd& l = spec.covariances[k].chol();
    const VectorXd y = outlier ? sample_mvn(mu, (inflate * l).eval(), rng) : sample_mvn(mu, l, rng);
    out.features.values.row(i) = y.transpose();
    out.labels[i] = outlier ? 0 : k + 1;
  }
  return out;
}

LabeledWaveforms generate_synthetic_waveforms(const RowMatrix& templates,
                                              std::span<const int> counts, double noise_sd,
                                              RngStream& rng) {
  if (static_cast<Eigen::Index>(counts.size()) != templates.rows())
    throw std::invalid_argument("synthetic waveforms: " + std::to_string(counts.size()) +
                                " counts for " + std::to_string(templates.rows()) +
                                " templates");
  if (!(noise_sd >= 0.0))
    throw std::invalid_argument("synthetic waveforms: noise sd must be non-negative");
  for (int c : counts)
    if (c < 0) throw std::invalid_argument("synthetic waveforms: negative count");
  const int total = std::accumulate(counts.begin(), counts.end(), 0);

  LabeledWaveforms out;
  out.waveforms.values.resize(total, templates.cols());
  out.labels.reserve(total);
  int row = 0;
  for (std::size_t k = 0; k < counts.size(); ++k) {
    for (int c = 0; c < counts[k]; ++c, ++row) {
      for (Eigen::Index j = 0; j < templates.cols(); ++j)
        out.waveforms.values(row, j) =
            templates(static_cast<Eigen::Index>(k), j) + (noise_sd > 0.0 ? noise_sd * rng.normal() : 0.0);
      out.labels.push_back(static_cast<int>(k) + 1);
    }
  }
  return out;
}

}  // namespace spikemix
