// Apache License, Version 2.0, refer to LICENSE.txt

#include "spikemix/ofm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <thread>

#include "spikemix/kmeans.hpp"

namespace spikemix {

namespace {

constexpr std::uint64_t kInitStream = 0;
constexpr std::uint64_t kSwapStream = 1u << 20;

std::uint64_t rung_stream(int t) { return 1 + static_cast<std::uint64_t>(t); }

}  // namespace

int OfmState::occupied() const {
  return static_cast<int>(std::count_if(counts.begin(), counts.end(), [](int c) { return c > 0; }));
}

double OfmState::log_weight_sum() const {
  return std::accumulate(log_pi.begin(), log_pi.end(), 0.0);
}

void OfmState::refresh_counts() {
  counts.assign(components.size(), 0);
  for (int k : z) ++counts[k];
}

void TemperingLadder::validate() const {
  if (alphas.empty()) throw std::invalid_argument("tempering ladder needs at least one rung");
  for (std::size_t t = 0; t < alphas.size(); ++t) {
    if (!(alphas[t] > 0.0)) throw std::invalid_argument("tempering ladder: alpha must be positive");
    if (t > 0 && !(alphas[t] > alphas[t - 1]))
      throw std::invalid_argument("tempering ladder: alphas must be strictly increasing");
  }
  if (swap_interval < 1) throw std::invalid_argument("tempering ladder: swap interval must be >= 1");
}

void OfmConfig::validate() const {
  if (kstar < 2) throw std::invalid_argument("overfitting requires K* >= 2");
  ladder.validate();
  if (burn_in < 0) throw std::invalid_argument("burn-in must be non-negative");
  if (iterations <= burn_in)
    throw std::invalid_argument("iterations (" + std::to_string(iterations) +
                                ") must exceed burn-in (" + std::to_string(burn_in) + ")");
  if (thin < 1) throw std::invalid_argument("thin must be >= 1");
  if (workers < 1) throw std::invalid_argument("workers must be >= 1");
}

OfmState init_state_from_labels(const FeatureMatrix& x, std::vector<int> z, int kstar,
                                const NiwHyperparams& hyper, double alpha, RngStream& rng) {
  if (kstar < 2) throw std::invalid_argument("overfitting requires K* >= 2");
  if (!(alpha > 0.0)) throw std::invalid_argument("Dirichlet alpha must be positive");
  if (static_cast<int>(z.size()) != x.n())
    throw std::invalid_argument("initial allocation length does not match data");
  if (x.r() != hyper.dim()) throw std::invalid_argument("prior dimension does not match data");
  for (int k : z)
    if (k < 0 || k >= kstar) throw std::invalid_argument("initial allocation out of range");
  OfmState s;
  s.z = std::move(z);
  s.alpha = alpha;
  s.log_pi.assign(kstar, -std::log(static_cast<double>(kstar)));
  for (int k = 0; k < kstar; ++k) s.components.push_back(sample_niw_prior(hyper, rng));
  s.refresh_counts();
  update_components(s, x, hyper, rng);
  update_weights(s, rng);
  return s;
}

OfmState init_state(const FeatureMatrix& x, int kstar, const NiwHyperparams& hyper,
                    double alpha, RngStream& rng) {
  if (kstar < 2) throw std::invalid_argument("overfitting requires K* >= 2");
  return init_state_from_labels(x, kmeans(x, kstar, rng), kstar, hyper, alpha, rng);
}

void update_allocations(OfmState& state, const FeatureMatrix& x, RngStream& rng) {
  const int k = state.kstar();
  std::vector<double> logw(k);
  for (int i = 0; i < x.n(); ++i) {
    const double* y = x.row(i);
    for (int c = 0; c < k; ++c) logw[c] = state.log_pi[c] + state.components[c].log_density(y);
    state.z[i] = sample_categorical_log(logw, rng);
  }
  state.refresh_counts();
}

void update_weights(OfmState& state, RngStream& rng) {
  std::vector<double> post(state.kstar());
  for (int c = 0; c < state.kstar(); ++c) post[c] = state.alpha + state.counts[c];
  state.log_pi = sample_dirichlet_log(post, rng);
}

void update_components(OfmState& state, const FeatureMatrix& x, const NiwHyperparams& hyper,
                       RngStream& rng) {
  const auto stats = cluster_stats(x, state.z, state.kstar());
  for (int c = 0; c < state.kstar(); ++c)
    state.components[c] = sample_niw(niw_posterior(hyper, stats[c]), rng);
}

void ofm_sweep(OfmState& state, const FeatureMatrix& x, const NiwHyperparams& hyper,
               RngStream& rng) {
  update_allocations(state, x, rng);
  update_weights(state, rng);
  update_components(state, x, hyper, rng);
}

double swap_log_acceptance(const OfmState& a, const OfmState& b, double alpha_a,
                           double alpha_b) {
  if (a.kstar() != b.kstar()) throw std::invalid_argument("swap: states have different K*");
  return (alpha_a - alpha_b) * (b.log_weight_sum() - a.log_weight_sum());
}

AllocationTrace run_ofm(const FeatureMatrix& x, const NiwHyperparams& hyper,
                        const OfmConfig& config) {
  config.validate();
  hyper.validate();
  const int rungs = config.ladder.rungs();

  RngStream init_rng(config.seed, kInitStream);
  const std::vector<int> z0 = kmeans(x, config.kstar, init_rng);

  std::vector<RngStream> rngs;
  std::vector<OfmState> states;
  for (int t = 0; t < rungs; ++t) {
    rngs.emplace_back(config.seed, rung_stream(t));
    states.push_back(
        init_state_from_labels(x, z0, config.kstar, hyper, config.ladder.alphas[t], rngs[t]));
  }
  RngStream swap_rng(config.seed, kSwapStream);

  AllocationTrace trace;
  trace.burn_in = config.burn_in;
  trace.thin = config.thin;
  const int kept = (config.iterations - config.burn_in) / config.thin;
  trace.draws.reserve(kept);

  auto record = [&](int it) {
    const int after = it - config.burn_in + 1;
    if (after <= 0 || after % config.thin != 0) return;
    const OfmState& s = states[0];
    trace.draws.push_back(s.z);
    trace.occupied.push_back(s.occupied());
    trace.weight_sums.push_back(s.log_weight_sum());
  };

  std::vector<long> attempts(std::max(rungs - 1, 0), 0);
  std::vector<long> accepts(std::max(rungs - 1, 0), 0);
  const int interval = config.ladder.swap_interval;
  const int workers = std::min(config.workers, rungs);

  for (int start = 0; start < config.iterations; start += interval) {
    const int stop = std::min(start + interval, config.iterations);
    // Rung 0 records every sweep of the block except the last, which is
    // recorded after the swap phase.
    auto run_rung = [&](int t) {
      for (int it = start; it < stop; ++it) {
        ofm_sweep(states[t], x, hyper, rngs[t]);
        if (t == 0 && it + 1 < stop) record(it);
      }
    };
    if (workers <= 1) {
      for (int t = 0; t < rungs; ++t) run_rung(t);
    } else {
      std::vector<std::jthread> pool;
      for (int w = 0; w < workers; ++w)
        pool.emplace_back([&, w] {
          for (int t = w; t < rungs; t += workers) run_rung(t);
        });
    }

    if (rungs > 1 && stop - start == interval) {
      const int first_parity = swap_rng.index(2);
      for (int pass = 0; pass < 2; ++pass) {
        for (int t = (first_parity + pass) % 2; t + 1 < rungs; t += 2) {
          const double alpha_a = config.ladder.alphas[t];
          const double alpha_b = config.ladder.alphas[t + 1];
          const double log_ratio = swap_log_acceptance(states[t], states[t + 1], alpha_a, alpha_b);
          ++attempts[t];
          if (log_ratio >= 0.0 || std::log(swap_rng.uniform_open()) < log_ratio) {
            std::swap(states[t], states[t + 1]);
            states[t].alpha = alpha_a;
            states[t + 1].alpha = alpha_b;
            ++accepts[t];
          }
        }
      }
    }
    record(stop - 1);
  }

  trace.swap_acceptance.resize(attempts.size());
  for (std::size_t p = 0; p < attempts.size(); ++p)
    trace.swap_acceptance[p] =
        attempts[p] > 0 ? static_cast<double>(accepts[p]) / static_cast<double>(attempts[p]) : 0.0;
  return trace;
}

}  // namespace spikemix
