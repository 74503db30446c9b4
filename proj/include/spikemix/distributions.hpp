// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <span>
#include <vector>

#include "spikemix/linalg.hpp"
#include "spikemix/rng.hpp"

namespace spikemix {

// Probability vector; entries non-negative and summing to one within 1e-12.
class SimplexVector {
 public:
  explicit SimplexVector(std::vector<double> weights);

  const std::vector<double>& weights() const { return weights_; }
  std::size_t size() const { return weights_.size(); }
  double operator[](std::size_t k) const { return weights_[k]; }

 private:
  std::vector<double> weights_;
};

double log_sum_exp(std::span<const double> x);

VectorXd sample_mvn(const VectorXd& mu, const MatrixXd& chol_sigma, RngStream& rng);

// Gamma(shape, rate), mean shape / rate.
double sample_gamma(double shape, double rate, RngStream& rng);

// log of a Gamma(shape, 1) draw. For shape < 1 the draw is formed as
// log G(shape + 1) + log(U) / shape, which stays finite where the draw itself
// underflows.
double sample_log_gamma(double shape, RngStream& rng);

// Beta(a, b) via two Gamma draws, clamped to the open interval (0, 1).
double sample_beta(double a, double b, RngStream& rng);

// log v and log(1 - v) for v ~ Beta(a, b), both accurate when v is within
// rounding of 0 or 1.
struct LogBeta {
  double log_v;
  double log_1mv;
};
LogBeta sample_beta_log(double a, double b, RngStream& rng);

// Log-weights of a Dirichlet(alpha) draw; every entry is finite.
std::vector<double> sample_dirichlet_log(std::span<const double> alpha, RngStream& rng);
SimplexVector sample_dirichlet(std::span<const double> alpha, RngStream& rng);

// Inverse-Wishart with E[Sigma] = scale / (nu - dim - 1), drawn by inverting a
// Bartlett-decomposed Wishart(nu, scale^{-1}). Requires nu > dim - 1.
SpdMatrix sample_inverse_wishart(double nu, const SpdMatrix& scale, RngStream& rng);

// Index k with probability proportional to exp(logw[k]).
int sample_categorical_log(std::span<const double> logw, RngStream& rng);

}  // namespace spikemix
