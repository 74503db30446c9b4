// Apache License, Version 2.0, refer to LICENSE.txt

#include "spikemix/kmeans.hpp"

#include <limits>
#include <map>
#include <stdexcept>
#include <string>

namespace spikemix {

namespace {

double sq_dist(const double* a, const double* b, int r) {
  double s = 0.0;
  for (int j = 0; j < r; ++j) {
    const double d = a[j] - b[j];
    s += d * d;
  }
  return s;
}

}  // namespace

std::vector<int> kmeans(const FeatureMatrix& x, int k, RngStream& rng,
                        const KmeansOptions& options) {
  const int n = x.n();
  const int r = x.r();
  if (k < 1) throw std::invalid_argument("kmeans: k must be at least 1");
  if (k > n)
    throw std::invalid_argument("kmeans: k = " + std::to_string(k) +
                                " exceeds the number of observations " + std::to_string(n));

  RowMatrix centers(k, r);
  // k-means++ seeding.
  std::vector<double> d2(n, std::numeric_limits<double>::infinity());
  int first = rng.index(n);
  centers.row(0) = x.values.row(first);
  for (int c = 1; c < k; ++c) {
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
      d2[i] = std::min(d2[i], sq_dist(x.row(i), centers.row(c - 1).data(), r));
      total += d2[i];
    }
    int pick = n - 1;
    if (total > 0.0) {
      double target = rng.uniform() * total;
      for (int i = 0; i < n; ++i) {
        if (d2[i] <= 0.0) continue;
        if (target < d2[i]) {
          pick = i;
          break;
        }
        target -= d2[i];
        pick = i;
      }
    } else {
      pick = rng.index(n);
    }
    centers.row(c) = x.values.row(pick);
  }

  std::vector<int> labels(n, -1);
  std::vector<int> counts(k);
  for (int sweep = 0; sweep < options.max_sweeps; ++sweep) {
    bool changed = false;
    for (int i = 0; i < n; ++i) {
      int best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (int c = 0; c < k; ++c) {
        const double d = sq_dist(x.row(i), centers.row(c).data(), r);
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      if (labels[i] != best) {
        labels[i] = best;
        changed = true;
      }
    }
    // Re-seed empty clusters from the farthest point of a cluster with > 1 member.
    std::fill(counts.begin(), counts.end(), 0);
    for (int l : labels) ++counts[l];
    for (int c = 0; c < k; ++c) {
      if (counts[c] > 0) continue;
      int far = -1;
      double far_d = -1.0;
      for (int i = 0; i < n; ++i) {
        if (counts[labels[i]] < 2) continue;
        const double d = sq_dist(x.row(i), centers.row(labels[i]).data(), r);
        if (d > far_d) {
          far_d = d;
          far = i;
        }
      }
      if (far < 0) break;
      --counts[labels[far]];
      labels[far] = c;
      counts[c] = 1;
      centers.row(c) = x.values.row(far);
      changed = true;
    }
    centers.setZero();
    for (int i = 0; i < n; ++i) centers.row(labels[i]) += x.values.row(i);
    for (int c = 0; c < k; ++c)
      if (counts[c] > 0) centers.row(c) /= static_cast<double>(counts[c]);
    if (!changed) break;
  }
  return labels;
}

double within_cluster_ss(const FeatureMatrix& x, const std::vector<int>& labels) {
  if (static_cast<int>(labels.size()) != x.n())
    throw std::invalid_argument("within_cluster_ss: label count mismatch");
  std::map<int, std::pair<VectorXd, int>> sums;
  for (int i = 0; i < x.n(); ++i) {
    auto [it, inserted] = sums.try_emplace(labels[i], VectorXd::Zero(x.r()), 0);
    it->second.first += x.values.row(i).transpose();
    ++it->second.second;
  }
  double ss = 0.0;
  for (int i = 0; i < x.n(); ++i) {
    const auto& [sum, count] = sums.at(labels[i]);
    ss += (x.values.row(i).transpose() - sum / count).squaredNorm();
  }
  return ss;
}

}  // namespace spikemix
