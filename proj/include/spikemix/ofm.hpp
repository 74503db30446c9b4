// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <cstdint>
#include <vector>

#include "spikemix/features.hpp"
#include "spikemix/niw.hpp"
#include "spikemix/trace.hpp"

namespace spikemix {

// One chain of the overfitted finite mixture: K* Gaussian components under a
// symmetric Dirichlet(alpha) weight prior. Weights are kept as logs because a
// near-zero alpha pushes empty-component weights far below double underflow.
struct OfmState {
  std::vector<int> z;
  std::vector<double> log_pi;
  std::vector<GaussianComponent> components;
  double alpha = 1.0;
  std::vector<int> counts;

  int kstar() const { return static_cast<int>(components.size()); }
  int occupied() const;
  double log_weight_sum() const;
  void refresh_counts();
};

// Dirichlet hyperparameters for the tempering rungs; alphas[0] is the
// inference rung and the sequence is strictly increasing.
struct TemperingLadder {
  std::vector<double> alphas{0.001, 0.01, 0.1, 1.0, 20.0};
  int swap_interval = 5;

  int rungs() const { return static_cast<int>(alphas.size()); }
  void validate() const;
};

struct OfmConfig {
  int kstar = 10;
  TemperingLadder ladder;
  int iterations = 50000;
  int burn_in = 25000;
  int thin = 1;
  std::uint64_t seed = 1;
  // Threads used for the rung chains; the output does not depend on it.
  int workers = 1;

  void validate() const;
};

// k-means initial allocation, then components and weights from their
// full conditionals.
OfmState init_state(const FeatureMatrix& x, int kstar, const NiwHyperparams& hyper,
                    double alpha, RngStream& rng);
OfmState init_state_from_labels(const FeatureMatrix& x, std::vector<int> z, int kstar,
                                const NiwHyperparams& hyper, double alpha, RngStream& rng);

void update_allocations(OfmState& state, const FeatureMatrix& x, RngStream& rng);
void update_weights(OfmState& state, RngStream& rng);
void update_components(OfmState& state, const FeatureMatrix& x, const NiwHyperparams& hyper,
                       RngStream& rng);

// allocations -> weights -> components.
void ofm_sweep(OfmState& state, const FeatureMatrix& x, const NiwHyperparams& hyper,
               RngStream& rng);

// Log Metropolis ratio for exchanging the full states held at rungs alpha_a
// and alpha_b. Likelihoods cancel, leaving (alpha_a - alpha_b)(S_b - S_a)
// with S = sum_k log pi_k.
double swap_log_acceptance(const OfmState& a, const OfmState& b, double alpha_a,
                           double alpha_b);

AllocationTrace run_ofm(const FeatureMatrix& x, const NiwHyperparams& hyper,
                        const OfmConfig& config);

}  // namespace spikemix
