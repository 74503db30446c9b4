// Apache License, Version 2.0, refer to LICENSE.txt

#include "spikemix/niw.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace spikemix {

void NiwHyperparams::validate() const {
  if (!(n0 > 0.0)) throw std::invalid_argument("NIW prior: N0 must be positive");
  if (!(c0 > dim() - 1))
    throw std::invalid_argument("NIW prior: c0 = " + std::to_string(c0) +
                                " must exceed r - 1 = " + std::to_string(dim() - 1));
  if (c0_scale.dim() != dim())
    throw std::invalid_argument("NIW prior: C0 dimension does not match b0");
}

NiwHyperparams NiwHyperparams::from_data(const FeatureMatrix& x, double n0, double c0,
                                         double scale_factor) {
  if (!(scale_factor > 0.0)) throw std::invalid_argument("NIW prior: C0 factor must be positive");
  NiwHyperparams h{x.column_means(), n0, c0, SpdMatrix(scale_factor * x.covariance())};
  h.validate();
  return h;
}

std::vector<ClusterStats> cluster_stats(const FeatureMatrix& x, const std::vector<int>& z,
                                        int k) {
  const int r = x.r();
  std::vector<ClusterStats> stats(k);
  for (auto& s : stats) {
    s.mean = VectorXd::Zero(r);
    s.scatter = MatrixXd::Zero(r, r);
  }
  for (int i = 0; i < x.n(); ++i) {
    auto& s = stats[z[i]];
    ++s.count;
    s.mean += x.values.row(i).transpose();
  }
  for (auto& s : stats)
    if (s.count > 0) s.mean /= static_cast<double>(s.count);
  VectorXd d(r);
  for (int i = 0; i < x.n(); ++i) {
    auto& s = stats[z[i]];
    d = x.values.row(i).transpose() - s.mean;
    s.scatter.noalias() += d * d.transpose();
  }
  return stats;
}

NiwPosterior niw_posterior(const NiwHyperparams& hyper, const ClusterStats& stats) {
  const double nk = static_cast<double>(stats.count);
  NiwPosterior post;
  post.n = hyper.n0 + nk;
  post.c = hyper.c0 + nk;
  if (stats.count == 0) {
    post.b = hyper.b0;
    post.scale = hyper.c0_scale.matrix();
    return post;
  }
  const VectorXd d = stats.mean - hyper.b0;
  // Same as (N0 b0 + n_k ybar) / N_n, written so that ybar == b0 gives b0 exactly.
  post.b = hyper.b0 + (nk / post.n) * d;
  post.scale = hyper.c0_scale.matrix() + stats.scatter + (hyper.n0 * nk / post.n) * (d * d.transpose());
  post.scale = 0.5 * (post.scale + post.scale.transpose());
  return post;
}

GaussianComponent sample_niw(const NiwPosterior& post, RngStream& rng) {
  SpdMatrix sigma = sample_inverse_wishart(post.c, SpdMatrix(post.scale), rng);
  const MatrixXd l = sigma.chol() / std::sqrt(post.n);
  VectorXd mu = sample_mvn(post.b, l, rng);
  return GaussianComponent(std::move(mu), std::move(sigma));
}

GaussianComponent sample_niw_prior(const NiwHyperparams& hyper, RngStream& rng) {
  return sample_niw(NiwPosterior{hyper.b0, hyper.n0, hyper.c0, hyper.c0_scale.matrix()}, rng);
}

}  // namespace spikemix
