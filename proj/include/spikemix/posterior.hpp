// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <map>
#include <span>
#include <vector>

#include "spikemix/linalg.hpp"
#include "spikemix/trace.hpp"

namespace spikemix {

// Posterior co-clustering probabilities P[i][j] = Pr(z_i = z_j | y).
// Symmetric with unit diagonal and entries in [0, 1].
class SimilarityMatrix {
 public:
  explicit SimilarityMatrix(MatrixXd p);

  int n() const { return static_cast<int>(p_.rows()); }
  double operator()(int i, int j) const { return p_(i, j); }
  const MatrixXd& matrix() const { return p_; }

 private:
  MatrixXd p_;
};

// Partition with contiguous labels 1..K.
class Partition {
 public:
  // Relabels by first occurrence, so {2,2,1} and {1,1,2} give the same partition.
  static Partition canonical(std::span<const int> raw);

  const std::vector<int>& labels() const { return labels_; }
  int n() const { return static_cast<int>(labels_.size()); }
  int clusters() const { return clusters_; }
  // Cluster sizes sorted in decreasing order.
  std::vector<int> sizes() const;

  bool operator==(const Partition& other) const { return labels_ == other.labels_; }

 private:
  std::vector<int> labels_;
  int clusters_ = 0;
};

// Occupied-count -> proportion of kept iterations.
struct OccupiedCountDistribution {
  std::map<int, double> table;

  int mode() const;  // ties resolved toward fewer components
  // max - min over counts whose proportion is at least min_proportion.
  int support_width(double min_proportion) const;
};

SimilarityMatrix pairwise_similarity(const AllocationTrace& trace);
SimilarityMatrix pairwise_similarity(std::span<const std::vector<int>> draws);

OccupiedCountDistribution occupied_distribution(const AllocationTrace& trace);

double rand_index(const Partition& a, const Partition& b);
// Hubert-Arabie adjusted Rand. When the expected-index correction leaves a
// zero denominator (both partitions trivial), returns 1 for identical
// partitions and 0 otherwise.
double adjusted_rand(const Partition& a, const Partition& b);

// Posterior expected adjusted Rand of candidate c against P.
// Returns NaN when the denominator vanishes.
double pear_index(const SimilarityMatrix& p, const Partition& c);

// Candidate maximizing PEAR; ties go to fewer clusters, then first seen. If any
// candidate has a vanishing PEAR denominator, all candidates are instead
// scored by the expected pairwise agreement sum_{i<j} c_ij p_ij + (1-c_ij)(1-p_ij).
Partition pear_optimal(const SimilarityMatrix& p, std::span<const Partition> candidates);

// Average-linkage clustering on 1 - P, cut at 1..max_clusters clusters.
std::vector<Partition> hierarchical_cuts(const SimilarityMatrix& p, int max_clusters);

// Distinct trace partitions followed by hierarchical cuts for K = 1..max_cut,
// without duplicates.
std::vector<Partition> candidate_partitions(const AllocationTrace& trace,
                                            const SimilarityMatrix& p, int max_cut = 10);

// PEAR over the trace's distinct partitions restricted to iterations whose
// occupied count equals the modal count (ties toward fewer), using P
// recomputed from those iterations.
Partition ofm_modal_partition(const AllocationTrace& trace);

// PEAR optimum over candidate_partitions.
Partition pear_partition(const AllocationTrace& trace, const SimilarityMatrix& p);

struct SimilarityComparison {
  MatrixXd agreement;  // 1 - |P_a - P_b|
  double mean_abs_diff = 0.0;  // off-diagonal
};

SimilarityComparison compare_similarity(const SimilarityMatrix& a, const SimilarityMatrix& b);

}  // namespace spikemix
