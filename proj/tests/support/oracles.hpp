// Apache License, Version 2.0, refer to LICENSE.txt

// Independent reference computations used to check the library. Nothing here
// calls into the code paths it is used to verify.

#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <vector>

namespace oracle {

// Running mean / variance / fourth central moment for Monte Carlo checks.
class Moments {
 public:
  void add(double x) { xs_.push_back(x); }
  std::size_t count() const { return xs_.size(); }
  double mean() const { return std::accumulate(xs_.begin(), xs_.end(), 0.0) / xs_.size(); }
  double variance() const { return central(2) * xs_.size() / (xs_.size() - 1.0); }
  double mean_se() const { return std::sqrt(variance() / xs_.size()); }
  // Standard error of the sample variance: sqrt((mu4 - sigma^4) / N).
  double variance_se() const {
    const double v = central(2);
    return std::sqrt(std::max(central(4) - v * v, 0.0) / xs_.size());
  }
  // Standard error of the mean for a correlated chain, from non-overlapping
  // batch means.
  double batch_mean_se(std::size_t batches = 50) const {
    const std::size_t len = xs_.size() / batches;
    Moments means;
    for (std::size_t b = 0; b < batches; ++b)
      means.add(std::accumulate(xs_.begin() + b * len, xs_.begin() + (b + 1) * len, 0.0) / len);
    return means.mean_se();
  }

 private:
  double central(int k) const {
    const double m = mean();
    double s = 0.0;
    for (double x : xs_) s += std::pow(x - m, k);
    return s / xs_.size();
  }
  std::vector<double> xs_;
};

// All set partitions of {0..n-1} as restricted growth strings (labels from 1).
inline std::vector<std::vector<int>> all_set_partitions(int n) {
  std::vector<std::vector<int>> out;
  std::vector<int> a(n, 0);
  std::function<void(int, int)> rec = [&](int i, int mx) {
    if (i == n) {
      std::vector<int> labels(n);
      for (int j = 0; j < n; ++j) labels[j] = a[j] + 1;
      out.push_back(labels);
      return;
    }
    for (int v = 0; v <= mx + 1; ++v) {
      a[i] = v;
      rec(i + 1, std::max(mx, v));
    }
  };
  if (n == 0) return {{}};
  a[0] = 0;
  rec(1, 0);
  return out;
}

// Adjusted Rand from the four pair-agreement counts.
inline double adjusted_rand_pairs(const std::vector<int>& x, const std::vector<int>& y) {
  double ss = 0, sd = 0, ds = 0, dd = 0;
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = i + 1; j < x.size(); ++j) {
      const bool sx = x[i] == x[j], sy = y[i] == y[j];
      if (sx && sy) ++ss;
      else if (sx) ++sd;
      else if (sy) ++ds;
      else ++dd;
    }
  const double den = (ss + sd) * (sd + dd) + (ss + ds) * (ds + dd);
  return den == 0 ? 1.0 : 2.0 * (ss * dd - sd * ds) / den;
}

// PEAR by direct pair enumeration over an n x n similarity given row-major.
inline double pear_direct(const std::vector<double>& p, int n, const std::vector<int>& c) {
  double cp = 0, sc = 0, sp = 0, m = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double cij = c[i] == c[j] ? 1.0 : 0.0;
      const double pij = p[i * n + j];
      cp += cij * pij;
      sc += cij;
      sp += pij;
      m += 1;
    }
  const double e = sc * sp / m;
  return (cp - e) / (0.5 * (sc + sp) - e);
}

// Symmetric Dirichlet(alpha) log density at log-weights logw, normalizer included.
inline double dirichlet_log_density(const std::vector<double>& logw, double alpha) {
  const double k = static_cast<double>(logw.size());
  double s = std::lgamma(k * alpha) - k * std::lgamma(alpha);
  for (double lw : logw) s += (alpha - 1.0) * lw;
  return s;
}

// Univariate Normal-Inverse-Gamma posterior moments for
//   sigma^2 ~ IW_1(c0, C0) = IG(c0/2, C0/2), mu | sigma^2 ~ N(b0, sigma^2 / N0).
struct NigMoments {
  double mu_mean, mu_var, s2_mean, s2_var;
};

inline NigMoments nig_posterior(const std::vector<double>& y, double b0, double n0, double c0,
                                double cap_c0) {
  const double n = static_cast<double>(y.size());
  double ybar = 0;
  for (double v : y) ybar += v;
  ybar /= n;
  double ss = 0;
  for (double v : y) ss += (v - ybar) * (v - ybar);
  const double nn = n0 + n;
  const double bn = (n0 * b0 + n * ybar) / nn;
  const double cn = c0 + n;
  const double capn = cap_c0 + ss + n0 * n / nn * (ybar - b0) * (ybar - b0);
  const double a = cn / 2.0, b = capn / 2.0;
  const double s2_mean = b / (a - 1.0);
  const double s2_var = b * b / ((a - 1.0) * (a - 1.0) * (a - 2.0));
  // mu marginal: E[mu] = bn, Var[mu] = E[sigma^2] / nn.
  return {bn, s2_mean / nn, s2_mean, s2_var};
}

}  // namespace oracle
