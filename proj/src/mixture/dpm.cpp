// Apache License, Version 2.0, refer to LICENSE.txt

#include "spikemix/dpm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "spikemix/kmeans.hpp"

namespace spikemix {

namespace {

constexpr int kRunawayMargin = 1000;

// Number of sticks compact_sticks would keep for these counts.
int compacted_size(const std::vector<int>& counts, int min_represented) {
  int last = 0;
  for (int k = 0; k < static_cast<int>(counts.size()); ++k)
    if (counts[k] > 0) last = k + 1;
  return std::min(static_cast<int>(counts.size()), std::max(last, min_represented));
}

// v itself is only used for pi, so clamping it inside (0, 1) loses nothing.
double stick_value(const LogBeta& b) {
  constexpr double kUpper = 1.0 - std::numeric_limits<double>::epsilon() / 2.0;
  return std::clamp(std::exp(b.log_v), std::numeric_limits<double>::denorm_min(), kUpper);
}

void relabel_swap(std::vector<int>& z, int k, int l) {
  for (int& zi : z) {
    if (zi == k)
      zi = l;
    else if (zi == l)
      zi = k;
  }
}

}  // namespace

int DpmState::occupied() const {
  return static_cast<int>(std::count_if(counts.begin(), counts.end(), [](int c) { return c > 0; }));
}

double DpmState::represented_mass() const { return std::accumulate(pi.begin(), pi.end(), 0.0); }

double DpmState::residual_mass() const {
  return std::exp(std::accumulate(log_1mv.begin(), log_1mv.end(), 0.0));
}

void DpmState::refresh_counts() {
  counts.assign(v.size(), 0);
  for (int k : z) ++counts[k];
}

void DpmState::refresh_weights() {
  if (log_1mv.size() != v.size()) {
    log_1mv.resize(v.size());
    for (std::size_t k = 0; k < v.size(); ++k) log_1mv[k] = std::log1p(-v[k]);
  }
  pi.resize(v.size());
  double log_rest = 0.0;
  for (std::size_t k = 0; k < v.size(); ++k) {
    pi[k] = v[k] * std::exp(log_rest);
    log_rest += log_1mv[k];
  }
}

void DpmConfig::validate() const {
  if (k_init < 1) throw std::invalid_argument("DPM: K_init must be at least 1");
  if (!(m_shape > 0.0) || !(m_rate > 0.0))
    throw std::invalid_argument("DPM: concentration prior parameters must be positive");
  if (!(m_init > 0.0)) throw std::invalid_argument("DPM: initial concentration must be positive");
  if (burn_in < 0) throw std::invalid_argument("burn-in must be non-negative");
  if (iterations <= burn_in)
    throw std::invalid_argument("iterations (" + std::to_string(iterations) +
                                ") must exceed burn-in (" + std::to_string(burn_in) + ")");
  if (thin < 1) throw std::invalid_argument("thin must be >= 1");
  if (moves_per_sweep < 0) throw std::invalid_argument("moves_per_sweep must be >= 0");
  if (min_represented < 1) throw std::invalid_argument("min_represented must be >= 1");
}

DpmState init_dpm(const FeatureMatrix& x, int k_init, const NiwHyperparams& hyper,
                  RngStream& rng, double m_init) {
  if (k_init < 1) throw std::invalid_argument("DPM: K_init must be at least 1");
  if (x.r() != hyper.dim()) throw std::invalid_argument("prior dimension does not match data");
  DpmState s;
  s.z = kmeans(x, k_init, rng);
  s.m = m_init;
  s.v.assign(k_init, 0.5);
  s.log_1mv.assign(k_init, std::log(0.5));
  s.refresh_counts();
  update_sticks(s, rng);
  for (int k = 0; k < k_init; ++k) s.components.push_back(sample_niw_prior(hyper, rng));
  update_components_dpm(s, x, hyper, rng);
  update_slices(s, rng);
  return s;
}

void update_slices(DpmState& state, RngStream& rng) {
  state.u.resize(state.z.size());
  for (std::size_t i = 0; i < state.z.size(); ++i)
    state.u[i] = state.pi[state.z[i]] * rng.uniform_open();
}

void extend_sticks(DpmState& state, const NiwHyperparams& hyper, RngStream& rng) {
  if (state.u.empty()) return;
  const double min_u = *std::min_element(state.u.begin(), state.u.end());
  const int limit = static_cast<int>(state.z.size()) + kRunawayMargin;
  const double log_min_u = std::log(min_u);
  double log_residual = std::accumulate(state.log_1mv.begin(), state.log_1mv.end(), 0.0);
  // sum(pi) <= 1 - min_u, tested on the residual to avoid cancellation.
  while (log_residual >= log_min_u) {
    if (state.represented() >= limit)
      throw std::runtime_error("extend_sticks: more than " + std::to_string(limit) +
                               " sticks required (min slice " + std::to_string(min_u) + ")");
    const LogBeta b = sample_beta_log(1.0, state.m, rng);
    state.v.push_back(stick_value(b));
    state.log_1mv.push_back(b.log_1mv);
    state.pi.push_back(std::exp(b.log_v + log_residual));
    state.components.push_back(sample_niw_prior(hyper, rng));
    state.counts.push_back(0);
    log_residual += b.log_1mv;
  }
}

void update_allocations_slice(DpmState& state, const FeatureMatrix& x, RngStream& rng) {
  const int k = state.represented();
  std::vector<double> logw(k);
  for (int i = 0; i < x.n(); ++i) {
    const double* y = x.row(i);
    bool any = false;
    for (int c = 0; c < k; ++c) {
      if (state.pi[c] > state.u[i]) {
        logw[c] = state.components[c].log_density(y);
        any = true;
      } else {
        logw[c] = -std::numeric_limits<double>::infinity();
      }
    }
    if (!any)
      throw std::logic_error("update_allocations_slice: observation " + std::to_string(i) +
                             " has an empty slice set");
    state.z[i] = sample_categorical_log(logw, rng);
  }
  state.refresh_counts();
}

void compact_sticks(DpmState& state) {
  const int keep = compacted_size(state.counts, state.min_represented);
  if (keep >= state.represented()) return;
  state.v.resize(keep);
  state.log_1mv.resize(keep);
  state.pi.resize(keep);
  state.counts.resize(keep);
  state.components.erase(state.components.begin() + keep, state.components.end());
}

void update_sticks(DpmState& state, RngStream& rng) {
  const int k = state.represented();
  state.log_1mv.resize(k);
  long tail = 0;
  for (int c = 0; c < k; ++c) tail += state.counts[c];
  for (int c = 0; c < k; ++c) {
    tail -= state.counts[c];
    const LogBeta b =
        sample_beta_log(1.0 + state.counts[c], state.m + static_cast<double>(tail), rng);
    state.v[c] = stick_value(b);
    state.log_1mv[c] = b.log_1mv;
  }
  state.refresh_weights();
}

void update_components_dpm(DpmState& state, const FeatureMatrix& x,
                           const NiwHyperparams& hyper, RngStream& rng) {
  const auto stats = cluster_stats(x, state.z, state.represented());
  for (int c = 0; c < state.represented(); ++c)
    state.components[c] = sample_niw(niw_posterior(hyper, stats[c]), rng);
}

void update_concentration(DpmState& state, RngStream& rng, double prior_shape,
                          double prior_rate) {
  double log_rest = 0.0;
  for (double l : state.log_1mv) {
    if (!std::isfinite(l)) throw std::domain_error("update_concentration: stick fraction v >= 1");
    log_rest += l;
  }
  state.m = sample_gamma(prior_shape + state.represented(), prior_rate - log_rest, rng);
}

double label_swap_random_log_ratio(const DpmState& state, int k, int l) {
  const double nk = state.counts.at(k);
  const double nl = state.counts.at(l);
  if (nk == nl) return 0.0;
  return (nl - nk) * (std::log(state.pi.at(k)) - std::log(state.pi.at(l)));
}

double label_swap_adjacent_log_ratio(const DpmState& state, int k) {
  const double nk = state.counts.at(k);
  const double nk1 = state.counts.at(k + 1);
  double r = 0.0;
  if (nk > 0) r += nk * state.log_1mv.at(k + 1);
  if (nk1 > 0) r -= nk1 * state.log_1mv.at(k);
  return r;
}

bool label_swap_random(DpmState& state, RngStream& rng) {
  const int kr = state.represented();
  if (kr < 2) return false;
  const int k = rng.index(kr);
  int l = rng.index(kr - 1);
  if (l >= k) ++l;
  const double log_ratio = label_swap_random_log_ratio(state, k, l);
  const double log_u = std::log(rng.uniform_open());

  std::vector<int> proposed = state.counts;
  std::swap(proposed[k], proposed[l]);
  if (compacted_size(proposed, state.min_represented) !=
      compacted_size(state.counts, state.min_represented))
    return false;
  if (log_ratio < 0.0 && log_u >= log_ratio) return false;

  std::swap(state.components[k], state.components[l]);
  relabel_swap(state.z, k, l);
  state.counts = std::move(proposed);
  return true;
}

bool label_swap_adjacent(DpmState& state, RngStream& rng) {
  const int kr = state.represented();
  if (kr < 2) return false;
  const int k = rng.index(kr - 1);
  const double log_ratio = label_swap_adjacent_log_ratio(state, k);
  const double log_u = std::log(rng.uniform_open());

  std::vector<int> proposed = state.counts;
  std::swap(proposed[k], proposed[k + 1]);
  if (compacted_size(proposed, state.min_represented) !=
      compacted_size(state.counts, state.min_represented))
    return false;
  if (log_ratio < 0.0 && log_u >= log_ratio) return false;

  std::swap(state.components[k], state.components[k + 1]);
  std::swap(state.v[k], state.v[k + 1]);
  std::swap(state.log_1mv[k], state.log_1mv[k + 1]);
  relabel_swap(state.z, k, k + 1);
  state.counts = std::move(proposed);
  state.refresh_weights();
  return true;
}

void dpm_sweep(DpmState& state, const FeatureMatrix& x, const NiwHyperparams& hyper,
               const DpmConfig& config, RngStream& rng, DpmSweepStats* stats) {
  extend_sticks(state, hyper, rng);
  if (stats) stats->truncation = state.represented();
  update_allocations_slice(state, x, rng);
  compact_sticks(state);
  update_sticks(state, rng);
  update_components_dpm(state, x, hyper, rng);
  update_concentration(state, rng, config.m_shape, config.m_rate);
  for (int a = 0; a < config.moves_per_sweep; ++a) {
    if (a % 2 == 0) {
      const bool ok = label_swap_random(state, rng);
      if (stats) {
        ++stats->random_attempts;
        stats->random_accepts += ok;
      }
    } else {
      const bool ok = label_swap_adjacent(state, rng);
      if (stats) {
        ++stats->adjacent_attempts;
        stats->adjacent_accepts += ok;
      }
    }
  }
  update_slices(state, rng);
}

AllocationTrace run_dpm(const FeatureMatrix& x, const NiwHyperparams& hyper,
                        const DpmConfig& config) {
  config.validate();
  hyper.validate();
  RngStream rng(config.seed, 1);
  DpmState state = init_dpm(x, config.k_init, hyper, rng, config.m_init);
  state.min_represented = config.min_represented;

  AllocationTrace trace;
  trace.burn_in = config.burn_in;
  trace.thin = config.thin;
  long random_attempts = 0, random_accepts = 0, adjacent_attempts = 0, adjacent_accepts = 0;
  for (int it = 0; it < config.iterations; ++it) {
    DpmSweepStats stats;
    try {
      dpm_sweep(state, x, hyper, config, rng, &stats);
    } catch (const std::exception& e) {
      throw std::runtime_error("DPM sweep " + std::to_string(it + 1) + ": " + e.what());
    }
    random_attempts += stats.random_attempts;
    random_accepts += stats.random_accepts;
    adjacent_attempts += stats.adjacent_attempts;
    adjacent_accepts += stats.adjacent_accepts;
    const int after = it - config.burn_in + 1;
    if (after <= 0 || after % config.thin != 0) continue;
    trace.draws.push_back(state.z);
    trace.occupied.push_back(state.occupied());
    trace.represented.push_back(stats.truncation);
    trace.concentration.push_back(state.m);
  }
  auto rate = [](long acc, long att) {
    return att > 0 ? static_cast<double>(acc) / static_cast<double>(att) : 0.0;
  };
  trace.label_switch_acceptance = {rate(random_accepts, random_attempts),
                                   rate(adjacent_accepts, adjacent_attempts)};
  return trace;
}

}  // namespace spikemix
