// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <cstdint>
#include <vector>

#include "spikemix/features.hpp"
#include "spikemix/niw.hpp"
#include "spikemix/trace.hpp"

namespace spikemix {

// Slice-sampler state for the stick-breaking Dirichlet process mixture.
// Only the first represented() sticks are instantiated; the rest are implicit
// draws from Beta(1, m) with components from the prior.
//
// Invariants after a full sweep: 0 < u_i < pi[z_i], sum(pi) + prod(1 - v) = 1,
// and z_i < represented().
struct DpmState {
  std::vector<int> z;
  std::vector<double> v;
  // log(1 - v_k), kept separately because 1 - v underflows for small m.
  // refresh_weights rebuilds it from v when the lengths disagree.
  std::vector<double> log_1mv;
  std::vector<double> pi;
  std::vector<double> u;
  std::vector<GaussianComponent> components;
  double m = 1.0;
  std::vector<int> counts;
  // Lower bound on the number of sticks kept by compact_sticks.
  int min_represented = 1;

  int represented() const { return static_cast<int>(v.size()); }
  int occupied() const;
  double represented_mass() const;
  // prod_k (1 - v_k), the stick mass not yet broken off.
  double residual_mass() const;

  void refresh_counts();
  void refresh_weights();
};

struct DpmConfig {
  int k_init = 10;
  double m_shape = 1.0;
  double m_rate = 1.0;
  double m_init = 1.0;
  int iterations = 50000;
  int burn_in = 25000;
  int thin = 1;
  std::uint64_t seed = 1;
  // Label-switch attempts per sweep, alternating random and adjacent moves.
  int moves_per_sweep = 2;
  int min_represented = 1;

  void validate() const;
};

DpmState init_dpm(const FeatureMatrix& x, int k_init, const NiwHyperparams& hyper,
                  RngStream& rng, double m_init = 1.0);

// u_i ~ Uniform(0, pi[z_i]).
void update_slices(DpmState& state, RngStream& rng);

// Appends sticks v ~ Beta(1, m) with prior components until the residual
// mass falls below min_i u_i. Throws if more than n + 1000 sticks are needed.
void extend_sticks(DpmState& state, const NiwHyperparams& hyper, RngStream& rng);

// z_i drawn over {k : pi_k > u_i} with probability proportional to the
// component density.
void update_allocations_slice(DpmState& state, const FeatureMatrix& x, RngStream& rng);

// Drops trailing unoccupied sticks, keeping at least min_represented.
void compact_sticks(DpmState& state);

// v_k ~ Beta(1 + n_k, m + sum_{l>k} n_l), then pi from the stick-breaking product.
void update_sticks(DpmState& state, RngStream& rng);

void update_components_dpm(DpmState& state, const FeatureMatrix& x,
                           const NiwHyperparams& hyper, RngStream& rng);

// m ~ Gamma(shape + K, rate - sum_k log(1 - v_k)) over the represented sticks.
void update_concentration(DpmState& state, RngStream& rng, double prior_shape = 1.0,
                          double prior_rate = 1.0);

// Log acceptance ratios of the label-switch proposals.
//   random(k, l): exchange labels and parameters of k and l, sticks stay;
//                 (n_l - n_k) * (log pi_k - log pi_l).
//   adjacent(k):  exchange k and k + 1 together with their stick fractions;
//                 n_k log(1 - v_{k+1}) - n_{k+1} log(1 - v_k).
double label_swap_random_log_ratio(const DpmState& state, int k, int l);
double label_swap_adjacent_log_ratio(const DpmState& state, int k);

// Metropolis label-switch moves; return true when the proposal is accepted.
// Proposals that would change the compacted stick count are rejected so the
// move stays reversible.
bool label_swap_random(DpmState& state, RngStream& rng);
bool label_swap_adjacent(DpmState& state, RngStream& rng);

struct DpmSweepStats {
  int truncation = 0;
  int random_attempts = 0;
  int random_accepts = 0;
  int adjacent_attempts = 0;
  int adjacent_accepts = 0;
};

// extend -> allocate -> compact -> sticks -> components -> concentration ->
// label switches -> slices.
void dpm_sweep(DpmState& state, const FeatureMatrix& x, const NiwHyperparams& hyper,
               const DpmConfig& config, RngStream& rng, DpmSweepStats* stats = nullptr);

AllocationTrace run_dpm(const FeatureMatrix& x, const NiwHyperparams& hyper,
                        const DpmConfig& config);

}  // namespace spikemix
