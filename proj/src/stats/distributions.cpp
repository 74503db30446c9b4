// Apache License, Version 2.0, refer to LICENSE.txt

#include "spikemix/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace spikemix {

namespace {

void require_positive(double x, const char* what) {
  if (!(x > 0.0) || !std::isfinite(x))
    throw std::invalid_argument(std::string(what) + " must be positive and finite, got " +
                                std::to_string(x));
}

}  // namespace

SimplexVector::SimplexVector(std::vector<double> weights) : weights_(std::move(weights)) {
  if (weights_.empty()) throw std::invalid_argument("SimplexVector: empty weight vector");
  double total = 0.0;
  for (double w : weights_) {
    if (!(w >= 0.0) || w > 1.0)
      throw std::invalid_argument("SimplexVector: weights must lie in [0, 1]");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12)
    throw std::invalid_argument("SimplexVector: weights sum to " + std::to_string(total));
}

double log_sum_exp(std::span<const double> x) {
  double mx = -std::numeric_limits<double>::infinity();
  for (double v : x) mx = std::max(mx, v);
  if (!std::isfinite(mx)) return mx;
  double s = 0.0;
  for (double v : x) s += std::exp(v - mx);
  return mx + std::log(s);
}

VectorXd sample_mvn(const VectorXd& mu, const MatrixXd& chol_sigma, RngStream& rng) {
  if (chol_sigma.rows() != mu.size() || chol_sigma.cols() != mu.size())
    throw std::invalid_argument("sample_mvn: dimension mismatch");
  VectorXd zeta(mu.size());
  for (Eigen::Index i = 0; i < mu.size(); ++i) zeta(i) = rng.normal();
  return mu + chol_sigma.triangularView<Eigen::Lower>() * zeta;
}

double sample_log_gamma(double shape, RngStream& rng) {
  require_positive(shape, "gamma shape");
  if (shape >= 1.0) {
    std::gamma_distribution<double> g(shape, 1.0);
    double x = 0.0;
    do {
      x = g(rng.engine());
    } while (x <= 0.0);
    return std::log(x);
  }
  std::gamma_distribution<double> g(shape + 1.0, 1.0);
  double x = 0.0;
  do {
    x = g(rng.engine());
  } while (x <= 0.0);
  return std::log(x) + std::log(rng.uniform_open()) / shape;
}

double sample_gamma(double shape, double rate, RngStream& rng) {
  require_positive(shape, "gamma shape");
  require_positive(rate, "gamma rate");
  const double x = std::exp(sample_log_gamma(shape, rng)) / rate;
  return std::max(x, std::numeric_limits<double>::denorm_min());
}

LogBeta sample_beta_log(double a, double b, RngStream& rng) {
  require_positive(a, "beta a");
  require_positive(b, "beta b");
  const double la = sample_log_gamma(a, rng);
  const double lb = sample_log_gamma(b, rng);
  const double lab = std::max(la, lb) + std::log1p(std::exp(-std::abs(la - lb)));
  return {la - lab, lb - lab};
}

double sample_beta(double a, double b, RngStream& rng) {
  const double v = std::exp(sample_beta_log(a, b, rng).log_v);
  constexpr double kUpper = 1.0 - std::numeric_limits<double>::epsilon() / 2.0;
  return std::clamp(v, std::numeric_limits<double>::denorm_min(), kUpper);
}

std::vector<double> sample_dirichlet_log(std::span<const double> alpha, RngStream& rng) {
  if (alpha.empty()) throw std::invalid_argument("sample_dirichlet: empty alpha");
  std::vector<double> logg(alpha.size());
  for (std::size_t k = 0; k < alpha.size(); ++k) {
    if (!(alpha[k] > 0.0))
      throw std::invalid_argument("sample_dirichlet: alpha[" + std::to_string(k) +
                                  "] must be positive");
    logg[k] = sample_log_gamma(alpha[k], rng);
  }
  const double norm = log_sum_exp(logg);
  for (double& x : logg) x -= norm;
  return logg;
}

SimplexVector sample_dirichlet(std::span<const double> alpha, RngStream& rng) {
  const std::vector<double> logw = sample_dirichlet_log(alpha, rng);
  std::vector<double> w(logw.size());
  std::transform(logw.begin(), logw.end(), w.begin(), [](double x) { return std::exp(x); });
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  for (double& x : w) x /= total;
  return SimplexVector(std::move(w));
}

SpdMatrix sample_inverse_wishart(double nu, const SpdMatrix& scale, RngStream& rng) {
  const int p = scale.dim();
  if (!(nu > p - 1))
    throw std::invalid_argument("sample_inverse_wishart: improper prior, nu = " +
                                std::to_string(nu) + " must exceed dim - 1 = " +
                                std::to_string(p - 1));
  // Bartlett factor A of Wishart(nu, I): A_ii^2 ~ chi2(nu - i), A_ij ~ N(0,1).
  MatrixXd a = MatrixXd::Zero(p, p);
  for (int i = 0; i < p; ++i) {
    a(i, i) = std::sqrt(2.0 * std::exp(sample_log_gamma(0.5 * (nu - i), rng)));
    for (int j = 0; j < i; ++j) a(i, j) = rng.normal();
  }
  // With scale = U U^T, Sigma = (U A^{-T})(U A^{-T})^T; X = A^{-1} U^T = (U A^{-T})^T.
  const MatrixXd x =
      a.triangularView<Eigen::Lower>().solve(scale.chol().transpose().eval());
  MatrixXd sigma = x.transpose() * x;
  sigma = 0.5 * (sigma + sigma.transpose());
  return SpdMatrix(std::move(sigma));
}

int sample_categorical_log(std::span<const double> logw, RngStream& rng) {
  double mx = -std::numeric_limits<double>::infinity();
  for (double v : logw) mx = std::max(mx, v);
  if (!std::isfinite(mx))
    throw std::invalid_argument("sample_categorical_log: no finite log-weight");
  double total = 0.0;
  for (double v : logw) total += std::exp(v - mx);
  double target = rng.uniform() * total;
  const int k = static_cast<int>(logw.size());
  int last_positive = 0;
  for (int i = 0; i < k; ++i) {
    const double w = std::exp(logw[i] - mx);
    if (w <= 0.0) continue;
    last_positive = i;
    if (target < w) return i;
    target -= w;
  }
  return last_positive;
}

}  // namespace spikemix
