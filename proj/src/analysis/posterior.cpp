// Apache License, Version 2.0, refer to LICENSE.txt

#include "spikemix/posterior.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>

namespace spikemix {

namespace {

double comb2(double x) { return 0.5 * x * (x - 1.0); }

constexpr double kTieTol = 1e-12;

// Observation indices grouped by label; labels are 1..K.
std::vector<std::vector<int>> members(const Partition& c) {
  std::vector<std::vector<int>> groups(c.clusters());
  for (int i = 0; i < c.n(); ++i) groups[c.labels()[i] - 1].push_back(i);
  return groups;
}

struct PearTerms {
  double both = 0.0;     // sum_{i<j} c_ij p_ij
  double c_pairs = 0.0;  // sum_{i<j} c_ij
};

PearTerms pear_terms(const SimilarityMatrix& p, const Partition& c) {
  PearTerms t;
  for (const auto& g : members(c)) {
    t.c_pairs += comb2(static_cast<double>(g.size()));
    for (std::size_t a = 0; a < g.size(); ++a)
      for (std::size_t b = a + 1; b < g.size(); ++b) t.both += p(g[a], g[b]);
  }
  return t;
}

double off_diagonal_sum(const SimilarityMatrix& p) {
  double s = 0.0;
  for (int j = 1; j < p.n(); ++j)
    for (int i = 0; i < j; ++i) s += p(i, j);
  return s;
}

double pear_from_terms(const PearTerms& t, double p_pairs, double m) {
  const double expected = t.c_pairs * p_pairs / m;
  const double den = 0.5 * (t.c_pairs + p_pairs) - expected;
  if (!(std::abs(den) > kTieTol * std::max(1.0, m))) return std::numeric_limits<double>::quiet_NaN();
  return (t.both - expected) / den;
}

}  // namespace

SimilarityMatrix::SimilarityMatrix(MatrixXd p) : p_(std::move(p)) {
  if (p_.rows() != p_.cols()) throw std::invalid_argument("similarity matrix must be square");
  constexpr double tol = 1e-12;
  for (Eigen::Index i = 0; i < p_.rows(); ++i) {
    if (std::abs(p_(i, i) - 1.0) > tol)
      throw std::invalid_argument("similarity matrix diagonal must be 1 (row " +
                                  std::to_string(i + 1) + ")");
    for (Eigen::Index j = 0; j < i; ++j) {
      const double v = p_(i, j);
      if (!(v >= -tol && v <= 1.0 + tol) || std::abs(v - p_(j, i)) > tol)
        throw std::invalid_argument("similarity matrix entry (" + std::to_string(i + 1) + ", " +
                                    std::to_string(j + 1) +
                                    ") must be symmetric and within [0, 1]");
    }
  }
}

Partition Partition::canonical(std::span<const int> raw) {
  Partition out;
  out.labels_.resize(raw.size());
  std::unordered_map<int, int> relabel;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    auto [it, inserted] = relabel.try_emplace(raw[i], static_cast<int>(relabel.size()) + 1);
    out.labels_[i] = it->second;
  }
  out.clusters_ = static_cast<int>(relabel.size());
  return out;
}

std::vector<int> Partition::sizes() const {
  std::vector<int> s(clusters_, 0);
  for (int l : labels_) ++s[l - 1];
  std::sort(s.begin(), s.end(), std::greater<>());
  return s;
}

int OccupiedCountDistribution::mode() const {
  if (table.empty()) throw std::logic_error("occupied-count distribution is empty");
  int best = table.begin()->first;
  double best_p = -1.0;
  for (const auto& [count, p] : table)
    if (p > best_p) {
      best = count;
      best_p = p;
    }
  return best;
}

int OccupiedCountDistribution::support_width(double min_proportion) const {
  int lo = std::numeric_limits<int>::max();
  int hi = std::numeric_limits<int>::min();
  for (const auto& [count, p] : table)
    if (p >= min_proportion) {
      lo = std::min(lo, count);
      hi = std::max(hi, count);
    }
  return hi >= lo ? hi - lo : 0;
}

SimilarityMatrix pairwise_similarity(std::span<const std::vector<int>> draws) {
  if (draws.empty()) throw std::invalid_argument("pairwise_similarity: empty trace");
  const int n = static_cast<int>(draws.front().size());
  Eigen::MatrixXi together = Eigen::MatrixXi::Zero(n, n);
  std::unordered_map<int, std::vector<int>> groups;
  for (const auto& z : draws) {
    if (static_cast<int>(z.size()) != n)
      throw std::invalid_argument("pairwise_similarity: draws have different lengths");
    for (auto& [label, g] : groups) g.clear();
    for (int i = 0; i < n; ++i) groups[z[i]].push_back(i);
    for (const auto& [label, g] : groups)
      for (std::size_t b = 1; b < g.size(); ++b)
        for (std::size_t a = 0; a < b; ++a) ++together(g[a], g[b]);
  }
  const double t = static_cast<double>(draws.size());
  MatrixXd p = MatrixXd::Identity(n, n);
  for (int j = 1; j < n; ++j)
    for (int i = 0; i < j; ++i) p(i, j) = p(j, i) = together(i, j) / t;
  return SimilarityMatrix(std::move(p));
}

SimilarityMatrix pairwise_similarity(const AllocationTrace& trace) {
  return pairwise_similarity(std::span<const std::vector<int>>(trace.draws));
}

OccupiedCountDistribution occupied_distribution(const AllocationTrace& trace) {
  if (trace.occupied.empty()) throw std::invalid_argument("occupied_distribution: empty trace");
  std::map<int, long> counts;
  for (int k : trace.occupied) ++counts[k];
  OccupiedCountDistribution d;
  const double total = static_cast<double>(trace.occupied.size());
  for (const auto& [k, c] : counts) d.table[k] = static_cast<double>(c) / total;
  return d;
}

namespace {

struct PairCounts {
  double index = 0.0;  // sum C(n_ij, 2)
  double a = 0.0;      // sum C(a_i, 2)
  double b = 0.0;      // sum C(b_j, 2)
  double m = 0.0;      // C(n, 2)
};

PairCounts pair_counts(const Partition& a, const Partition& b) {
  if (a.n() != b.n())
    throw std::invalid_argument("partition lengths differ: " + std::to_string(a.n()) + " vs " +
                                std::to_string(b.n()));
  std::vector<long> table(static_cast<std::size_t>(a.clusters()) * b.clusters(), 0);
  std::vector<long> rows(a.clusters(), 0), cols(b.clusters(), 0);
  for (int i = 0; i < a.n(); ++i) {
    const int ra = a.labels()[i] - 1;
    const int cb = b.labels()[i] - 1;
    ++table[static_cast<std::size_t>(ra) * b.clusters() + cb];
    ++rows[ra];
    ++cols[cb];
  }
  PairCounts pc;
  for (long x : table) pc.index += comb2(static_cast<double>(x));
  for (long x : rows) pc.a += comb2(static_cast<double>(x));
  for (long x : cols) pc.b += comb2(static_cast<double>(x));
  pc.m = comb2(static_cast<double>(a.n()));
  return pc;
}

}  // namespace

double rand_index(const Partition& a, const Partition& b) {
  const PairCounts pc = pair_counts(a, b);
  if (pc.m == 0.0) return 1.0;
  return (pc.m + 2.0 * pc.index - pc.a - pc.b) / pc.m;
}

double adjusted_rand(const Partition& a, const Partition& b) {
  const PairCounts pc = pair_counts(a, b);
  if (pc.m == 0.0) return a == b ? 1.0 : 0.0;
  const double expected = pc.a * pc.b / pc.m;
  const double den = 0.5 * (pc.a + pc.b) - expected;
  if (den == 0.0) return a == b ? 1.0 : 0.0;
  return (pc.index - expected) / den;
}

double pear_index(const SimilarityMatrix& p, const Partition& c) {
  if (c.n() != p.n()) throw std::invalid_argument("pear_index: partition length mismatch");
  return pear_from_terms(pear_terms(p, c), off_diagonal_sum(p), comb2(p.n()));
}

Partition pear_optimal(const SimilarityMatrix& p, std::span<const Partition> candidates) {
  if (candidates.empty()) throw std::invalid_argument("pear_optimal: no candidates");
  const double m = comb2(p.n());
  const double p_pairs = off_diagonal_sum(p);
  std::vector<double> score(candidates.size());
  std::vector<PearTerms> terms(candidates.size());
  bool degenerate = false;
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    if (candidates[c].n() != p.n())
      throw std::invalid_argument("pear_optimal: candidate length mismatch");
    terms[c] = pear_terms(p, candidates[c]);
    score[c] = pear_from_terms(terms[c], p_pairs, m);
    degenerate = degenerate || std::isnan(score[c]);
  }
  if (degenerate)
    for (std::size_t c = 0; c < candidates.size(); ++c)
      score[c] = m - terms[c].c_pairs - p_pairs + 2.0 * terms[c].both;

  std::size_t best = 0;
  for (std::size_t c = 1; c < candidates.size(); ++c) {
    const double tol = kTieTol * std::max(1.0, std::abs(score[best]));
    if (score[c] > score[best] + tol ||
        (std::abs(score[c] - score[best]) <= tol &&
         candidates[c].clusters() < candidates[best].clusters()))
      best = c;
  }
  return candidates[best];
}

std::vector<Partition> hierarchical_cuts(const SimilarityMatrix& p, int max_clusters) {
  const int n = p.n();
  std::vector<Partition> cuts;
  if (n == 0 || max_clusters < 1) return cuts;
  MatrixXd d = MatrixXd::Ones(n, n) - p.matrix();
  std::vector<int> size(n, 1);
  std::vector<bool> active(n, true);
  std::vector<int> owner(n);  // observation -> active cluster representative
  for (int i = 0; i < n; ++i) owner[i] = i;

  auto emit = [&] { cuts.push_back(Partition::canonical(owner)); };
  int remaining = n;
  if (remaining <= max_clusters) emit();
  while (remaining > 1) {
    int best_a = -1, best_b = -1;
    double best = std::numeric_limits<double>::infinity();
    for (int b = 0; b < n; ++b) {
      if (!active[b]) continue;
      for (int a = 0; a < b; ++a) {
        if (!active[a]) continue;
        if (d(a, b) < best) {
          best = d(a, b);
          best_a = a;
          best_b = b;
        }
      }
    }
    // Merge b into a with the average-linkage (Lance-Williams) update.
    const double wa = size[best_a], wb = size[best_b];
    for (int k = 0; k < n; ++k) {
      if (!active[k] || k == best_a || k == best_b) continue;
      const double nd = (wa * d(best_a, k) + wb * d(best_b, k)) / (wa + wb);
      d(best_a, k) = d(k, best_a) = nd;
    }
    size[best_a] += size[best_b];
    active[best_b] = false;
    for (int& o : owner)
      if (o == best_b) o = best_a;
    --remaining;
    if (remaining <= max_clusters) emit();
  }
  std::reverse(cuts.begin(), cuts.end());
  return cuts;
}

std::vector<Partition> candidate_partitions(const AllocationTrace& trace,
                                            const SimilarityMatrix& p, int max_cut) {
  if (trace.empty()) throw std::invalid_argument("candidate_partitions: empty trace");
  std::vector<Partition> out;
  std::set<std::vector<int>> seen;
  auto add = [&](Partition c) {
    if (seen.insert(c.labels()).second) out.push_back(std::move(c));
  };
  for (const auto& z : trace.draws) add(Partition::canonical(z));
  for (auto& c : hierarchical_cuts(p, max_cut)) add(std::move(c));
  return out;
}

Partition ofm_modal_partition(const AllocationTrace& trace) {
  const int mode = occupied_distribution(trace).mode();
  std::vector<std::vector<int>> kept;
  std::vector<Partition> candidates;
  std::set<std::vector<int>> seen;
  for (std::size_t t = 0; t < trace.size(); ++t) {
    if (trace.occupied[t] != mode) continue;
    kept.push_back(trace.draws[t]);
    Partition c = Partition::canonical(trace.draws[t]);
    if (seen.insert(c.labels()).second) candidates.push_back(std::move(c));
  }
  const SimilarityMatrix p = pairwise_similarity(kept);
  return pear_optimal(p, candidates);
}

Partition pear_partition(const AllocationTrace& trace, const SimilarityMatrix& p) {
  const auto candidates = candidate_partitions(trace, p);
  return pear_optimal(p, candidates);
}

SimilarityComparison compare_similarity(const SimilarityMatrix& a, const SimilarityMatrix& b) {
  if (a.n() != b.n())
    throw std::invalid_argument("compare_similarity: sizes differ (" + std::to_string(a.n()) +
                                " vs " + std::to_string(b.n()) + ")");
  SimilarityComparison out;
  const MatrixXd diff = (a.matrix() - b.matrix()).cwiseAbs();
  out.agreement = MatrixXd::Ones(a.n(), a.n()) - diff;
  const int n = a.n();
  if (n > 1) out.mean_abs_diff = (diff.sum() - diff.trace()) / (static_cast<double>(n) * (n - 1));
  return out;
}

}  // namespace spikemix
