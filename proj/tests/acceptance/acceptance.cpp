// Apache License, Version 2.0, refer to LICENSE.txt

// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits nonzero if any fails.

#include <fmt/format.h>
#include <fmt/ranges.h>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "spikemix/cli/commands.hpp"
#include "spikemix/cli/csv_io.hpp"
#include "spikemix/dpm.hpp"
#include "spikemix/ofm.hpp"
#include "spikemix/posterior.hpp"

using namespace spikemix;
namespace fs = std::filesystem;

namespace {

const fs::path kData = SPIKEMIX_DATA_DIR;

struct Outcome {
  bool pass = false;
  std::string detail;
};

GaussianComponent univariate(double mean, double var) {
  MatrixXd c(1, 1);
  c(0, 0) = var;
  return GaussianComponent(VectorXd::Constant(1, mean), SpdMatrix(c));
}

FeatureMatrix column(const std::vector<double>& y) {
  FeatureMatrix x;
  x.values.resize(static_cast<Eigen::Index>(y.size()), 1);
  for (std::size_t i = 0; i < y.size(); ++i) x.values(static_cast<Eigen::Index>(i), 0) = y[i];
  return x;
}

FeatureMatrix no_rows(int r) {
  FeatureMatrix x;
  x.values.resize(0, r);
  return x;
}

bool within(double estimate, double target, double se, double k = 3.0) {
  return std::abs(estimate - target) < k * se;
}

std::string distribution_text(const OccupiedCountDistribution& d) {
  std::vector<std::string> parts;
  for (const auto& [k, p] : d.table) parts.push_back(fmt::format("{}:{:.4f}", k, p));
  return fmt::format("{{{}}}", fmt::join(parts, " "));
}

// ---------------------------------------------------------------------------

Outcome conjugate_oracle() {
  RngStream data_rng(101, 0);
  std::vector<double> y(50);
  for (double& v : y) v = 2.0 + 0.7 * data_rng.normal();
  const FeatureMatrix x = column(y);
  const NiwHyperparams hyper{VectorXd::Zero(1), 0.01, 5.0, SpdMatrix::identity(1)};
  OfmState s;
  s.z.assign(50, 0);
  s.components = {univariate(0, 1), univariate(0, 1)};
  s.log_pi = {std::log(0.5), std::log(0.5)};
  s.refresh_counts();

  const auto truth = oracle::nig_posterior(y, 0.0, 0.01, 5.0, 1.0);
  RngStream rng(102, 0);
  oracle::Moments mu, s2;
  for (int i = 0; i < 100000; ++i) {
    update_components(s, x, hyper, rng);
    mu.add(s.components[0].mean()(0));
    s2.add(s.components[0].cov().matrix()(0, 0));
  }
  const bool ok = within(mu.mean(), truth.mu_mean, mu.mean_se()) &&
                  within(mu.variance(), truth.mu_var, mu.variance_se()) &&
                  within(s2.mean(), truth.s2_mean, s2.mean_se()) &&
                  within(s2.variance(), truth.s2_var, s2.variance_se());
  return {ok, fmt::format("E[mu] {:.5f} vs {:.5f}, Var[mu] {:.3e} vs {:.3e}, E[s2] {:.5f} vs "
                          "{:.5f}, Var[s2] {:.3e} vs {:.3e}",
                          mu.mean(), truth.mu_mean, mu.variance(), truth.mu_var, s2.mean(),
                          truth.s2_mean, s2.variance(), truth.s2_var)};
}

Outcome prior_invariance() {
  constexpr int kSweeps = 100000;
  std::vector<std::string> notes;
  bool ok = true;

  {
    // Dirichlet(0.5, 0.5, 0.5): E[pi_1] = 1/3, E[pi_1^2] = (0.5 * 1.5) / (1.5 * 2.5) = 0.2.
    const FeatureMatrix x = no_rows(2);
    const NiwHyperparams hyper{VectorXd::Zero(2), 0.01, 5.0, SpdMatrix::identity(2)};
    RngStream rng(201, 1);
    OfmState s = init_state_from_labels(x, {}, 3, hyper, 0.5, rng);
    oracle::Moments p1, p1sq;
    for (int i = 0; i < kSweeps; ++i) {
      ofm_sweep(s, x, hyper, rng);
      const double p = std::exp(s.log_pi[0]);
      p1.add(p);
      p1sq.add(p * p);
    }
    ok = ok && within(p1.mean(), 1.0 / 3.0, p1.batch_mean_se()) &&
         within(p1sq.mean(), 0.2, p1sq.batch_mean_se());
    notes.push_back(fmt::format("OFM E[pi1] {:.4f} (1/3), E[pi1^2] {:.4f} (0.2)", p1.mean(),
                                p1sq.mean()));
  }
  {
    // m ~ Gamma(1, 1) and v_1 | m ~ Beta(1, m): E[v_1] = e * E1(1).
    DpmState s;
    s.v.assign(5, 0.5);
    for (int k = 0; k < 5; ++k) s.components.push_back(univariate(0, 1));
    s.refresh_weights();
    s.refresh_counts();
    s.min_represented = 5;
    const FeatureMatrix x = no_rows(1);
    const NiwHyperparams hyper{VectorXd::Zero(1), 0.01, 5.0, SpdMatrix::identity(1)};
    DpmConfig cfg;
    RngStream rng(202, 1);
    oracle::Moments v1, m, m2;
    for (int i = 0; i < kSweeps; ++i) {
      dpm_sweep(s, x, hyper, cfg, rng);
      v1.add(s.v[0]);
      m.add(s.m);
      m2.add(s.m * s.m);
    }
    const double ev1 = 0.5963473623231940;
    ok = ok && within(v1.mean(), ev1, v1.batch_mean_se()) &&
         within(m.mean(), 1.0, m.batch_mean_se()) && within(m2.mean(), 2.0, m2.batch_mean_se());
    notes.push_back(fmt::format("DPM E[v1] {:.4f} ({:.4f}), E[m] {:.4f} (1), E[m^2] {:.4f} (2)",
                                v1.mean(), ev1, m.mean(), m2.mean()));
  }
  return {ok, fmt::format("{}", fmt::join(notes, "; "))};
}

// Runs on the bundled well-separated dataset, shared by three criteria.
struct SeparableRuns {
  std::vector<int> truth;
  std::vector<AllocationTrace> ofm, dpm;
};

SeparableRuns separable_runs(const fs::path& scratch) {
  cli::SimulateOptions sim;
  sim.spec = (kData / "separable.json").string();
  sim.seed = 1;
  sim.out = scratch / "separable";
  std::ostringstream log;
  cli::cmd_simulate(sim, log);
  const FeatureMatrix x = cli::read_features_csv(sim.out / "features.csv");
  SeparableRuns runs;
  runs.truth = cli::read_labels_csv(sim.out / "labels.csv");
  const NiwHyperparams hyper = NiwHyperparams::from_data(x);
  for (std::uint64_t seed : {1, 2, 3}) {
    OfmConfig ofm;
    ofm.kstar = 10;
    ofm.iterations = 10000;
    ofm.burn_in = 5000;
    ofm.seed = seed;
    runs.ofm.push_back(run_ofm(x, hyper, ofm));
    DpmConfig dpm;
    dpm.iterations = 10000;
    dpm.burn_in = 5000;
    dpm.seed = seed;
    runs.dpm.push_back(run_dpm(x, hyper, dpm));
  }
  return runs;
}

Outcome ofm_emptying(const SeparableRuns& runs) {
  bool ok = true;
  std::vector<std::string> notes;
  for (std::size_t s = 0; s < runs.ofm.size(); ++s) {
    const auto d = occupied_distribution(runs.ofm[s]);
    const double p4 = d.table.count(4) ? d.table.at(4) : 0.0;
    ok = ok && p4 >= 0.8 && d.mode() == 4;
    notes.push_back(fmt::format("seed {}: P(4) {:.4f} mode {}", s + 1, p4, d.mode()));
  }
  return {ok, fmt::format("{}", fmt::join(notes, "; "))};
}

Outcome dpm_recovery_and_spread(const SeparableRuns& runs) {
  bool ok = true;
  std::vector<std::string> notes;
  const Partition truth = Partition::canonical(runs.truth);
  for (std::size_t s = 0; s < runs.dpm.size(); ++s) {
    const auto p = pairwise_similarity(runs.dpm[s]);
    const double ari = adjusted_rand(pear_partition(runs.dpm[s], p), truth);
    const auto dd = occupied_distribution(runs.dpm[s]);
    const auto od = occupied_distribution(runs.ofm[s]);
    const int wd = dd.support_width(0.01), wo = od.support_width(0.01);
    ok = ok && ari >= 0.9 && wd > wo;
    notes.push_back(fmt::format("seed {}: ARI {:.4f}, width DPM {} vs OFM {}, DPM {} OFM {}", s + 1,
                                ari, wd, wo, distribution_text(dd), distribution_text(od)));
  }
  return {ok, fmt::format("{}", fmt::join(notes, "; "))};
}

Outcome posterior_agreement(const SeparableRuns& runs) {
  double worst = 0.0;
  std::vector<std::string> notes;
  for (std::size_t s = 0; s < runs.ofm.size(); ++s) {
    const double d = compare_similarity(pairwise_similarity(runs.ofm[s]),
                                        pairwise_similarity(runs.dpm[s]))
                         .mean_abs_diff;
    worst = std::max(worst, d);
    notes.push_back(fmt::format("seed {}: {:.3e}", s + 1, d));
  }
  return {worst <= 0.1, fmt::format("mean |P_ofm - P_dpm| {}", fmt::join(notes, ", "))};
}

// Exhaustive scoring, written directly from pair sums. Falls back to expected
// pairwise agreement when any candidate's PEAR denominator vanishes.
std::vector<double> exhaustive_scores(const std::vector<double>& p, int n,
                                      const std::vector<std::vector<int>>& parts) {
  std::vector<double> pear(parts.size()), agree(parts.size());
  bool degenerate = false;
  for (std::size_t c = 0; c < parts.size(); ++c) {
    double cp = 0, sc = 0, sp = 0, m = 0, a = 0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        const double cij = parts[c][i] == parts[c][j] ? 1.0 : 0.0, pij = p[i * n + j];
        cp += cij * pij;
        sc += cij;
        sp += pij;
        m += 1;
        a += cij * pij + (1 - cij) * (1 - pij);
      }
    const double e = sc * sp / m, den = 0.5 * (sc + sp) - e;
    if (den == 0.0) degenerate = true;
    pear[c] = (cp - e) / den;
    agree[c] = a;
  }
  return degenerate ? agree : pear;
}

Outcome pear_brute_force() {
  RngStream rng(601, 0);
  int agree = 0, unique = 0;
  double worst_gap = 0.0;
  constexpr int kTrials = 100;
  for (int trial = 0; trial < kTrials; ++trial) {
    const int n = 3 + trial % 6;
    const int draws = 1 + rng.index(30);
    std::vector<std::vector<int>> rows;
    for (int t = 0; t < draws; ++t) {
      const int k = 1 + rng.index(n);
      std::vector<int> z(n);
      for (int& zi : z) zi = rng.index(k);
      rows.push_back(z);
    }
    const auto sim = pairwise_similarity(rows);
    std::vector<double> flat(n * n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) flat[i * n + j] = sim(i, j);

    const auto parts = oracle::all_set_partitions(n);
    std::vector<Partition> candidates;
    for (const auto& labels : parts) candidates.push_back(Partition::canonical(labels));
    const Partition chosen = pear_optimal(sim, candidates);

    const auto score = exhaustive_scores(flat, n, parts);
    std::size_t best = 0;
    for (std::size_t c = 1; c < score.size(); ++c)
      if (score[c] > score[best]) best = c;
    std::size_t chosen_idx = 0;
    while (!(candidates[chosen_idx] == chosen)) ++chosen_idx;
    const double gap = score[best] - score[chosen_idx];
    worst_gap = std::max(worst_gap, gap);
    int near_best = 0;
    for (double s : score)
      if (score[best] - s <= 1e-9) ++near_best;
    const bool match = near_best == 1 ? chosen_idx == best : gap <= 1e-12;
    if (near_best == 1) ++unique;
    agree += match;
  }
  return {agree == kTrials,
          fmt::format("{}/{} matrices agree ({} with a unique maximizer), max score gap {:.2e}",
                      agree, kTrials, unique, worst_gap)};
}

Outcome swap_correctness() {
  RngStream rng(701, 0);
  double worst = 0.0;
  int antisymmetric = 0;
  constexpr int kStates = 1000;
  for (int t = 0; t < kStates; ++t) {
    const int k = 2 + rng.index(11);
    OfmState a, b;
    for (int j = 0; j < k; ++j) {
      a.components.push_back(univariate(0, 1));
      b.components.push_back(univariate(0, 1));
    }
    a.log_pi = sample_dirichlet_log(std::vector<double>(k, std::exp(-4 + 6 * rng.uniform())), rng);
    b.log_pi = sample_dirichlet_log(std::vector<double>(k, std::exp(-4 + 6 * rng.uniform())), rng);
    const double alpha_a = std::exp(-7 + 10 * rng.uniform());
    const double alpha_b = std::exp(-7 + 10 * rng.uniform());
    const double before = oracle::dirichlet_log_density(a.log_pi, alpha_a) +
                          oracle::dirichlet_log_density(b.log_pi, alpha_b);
    const double after = oracle::dirichlet_log_density(b.log_pi, alpha_a) +
                         oracle::dirichlet_log_density(a.log_pi, alpha_b);
    const double ratio = swap_log_acceptance(a, b, alpha_a, alpha_b);
    worst = std::max(worst, std::abs(ratio - (after - before)));
    antisymmetric += ratio == -swap_log_acceptance(b, a, alpha_a, alpha_b);
  }
  return {worst <= 1e-10 && antisymmetric == kStates,
          fmt::format("max |ratio - oracle| {:.2e} over {} states, exact antisymmetry {}/{}", worst,
                      kStates, antisymmetric, kStates)};
}

Outcome slice_invariants() {
  cli::SimulateOptions sim;
  sim.spec = (kData / "realistic.json").string();
  sim.seed = 8;
  sim.out = fs::temp_directory_path() / "spikemix_acceptance_slice";
  std::ostringstream log;
  cli::cmd_simulate(sim, log);
  const FeatureMatrix x = cli::read_features_csv(sim.out / "features.csv");
  fs::remove_all(sim.out);

  const NiwHyperparams hyper = NiwHyperparams::from_data(x);
  DpmConfig cfg;
  cfg.iterations = 3000;
  cfg.burn_in = 1000;
  RngStream rng(801, 1);
  DpmState s = init_dpm(x, cfg.k_init, hyper, rng, cfg.m_init);
  s.min_represented = cfg.min_represented;
  int kept = 0, slice_bad = 0, mass_bad = 0, ref_bad = 0;
  double worst_mass = 0.0;
  int max_represented = 0;
  for (int it = 0; it < cfg.iterations; ++it) {
    dpm_sweep(s, x, hyper, cfg, rng);
    if (it < cfg.burn_in) continue;
    ++kept;
    bool slice_ok = true, ref_ok = true;
    for (int i = 0; i < x.n(); ++i) {
      if (s.z[i] < 0 || s.z[i] >= s.represented()) {
        ref_ok = false;
        continue;
      }
      slice_ok = slice_ok && s.u[i] > 0 && s.u[i] < s.pi[s.z[i]];
    }
    const double mass_err = std::abs(s.represented_mass() + s.residual_mass() - 1.0);
    worst_mass = std::max(worst_mass, mass_err);
    max_represented = std::max(max_represented, s.represented());
    slice_bad += !slice_ok;
    ref_bad += !ref_ok;
    mass_bad += mass_err > 1e-9;
  }
  return {slice_bad == 0 && mass_bad == 0 && ref_bad == 0,
          fmt::format("{} kept sweeps: slice violations {}, mass violations {} (max error {:.1e}), "
                      "unrepresented references {}, max represented {}",
                      kept, slice_bad, mass_bad, worst_mass, ref_bad, max_represented)};
}

// Relative path -> file bytes for every regular file under root.
std::map<std::string, std::string> snapshot(const fs::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& entry : fs::recursive_directory_iterator(root))
    if (entry.is_regular_file())
      files[fs::relative(entry.path(), root).generic_string()] = cli::read_text(entry.path());
  return files;
}

Outcome determinism(const fs::path& scratch) {
  const std::vector<std::vector<std::string>> pipeline = {
      {"simulate", "--spec", (kData / "waveforms.json").string(), "--seed", "5", "--out", "sim"},
      {"pca", "--input", "sim/waveforms.csv", "-r", "4", "--out", "pca"},
      {"run", "--features", "pca/features.csv", "--model", "ofm", "--iterations", "1500",
       "--burn-in", "500", "--seed", "11", "--out", "ofm"},
      {"run", "--features", "pca/features.csv", "--model", "dpm", "--iterations", "1500",
       "--burn-in", "500", "--seed", "11", "--out", "dpm"},
      {"analyze", "--trace", "ofm/trace.csv", "--features", "pca/features.csv", "--method",
       "modal", "--waveforms", "sim/waveforms.csv", "--truth", "sim/labels.csv", "--out",
       "analyze_ofm"},
      {"analyze", "--trace", "dpm/trace.csv", "--features", "pca/features.csv", "--waveforms",
       "sim/waveforms.csv", "--truth", "sim/labels.csv", "--out", "analyze_dpm"},
      {"compare", "--ofm-trace", "ofm/trace.csv", "--dpm-trace", "dpm/trace.csv", "--features",
       "pca/features.csv", "--truth", "sim/labels.csv", "--out", "compare"},
  };
  const fs::path cwd = fs::current_path();
  std::vector<std::map<std::string, std::string>> trees;
  for (const char* name : {"first", "second"}) {
    const fs::path root = scratch / name;
    fs::create_directories(root);
    fs::current_path(root);
    for (const auto& args : pipeline) {
      std::ostringstream out, err;
      if (cli::run_cli(args, out, err) != 0) {
        fs::current_path(cwd);
        return {false, fmt::format("'{}' failed: {}", args.front(), err.str())};
      }
    }
    fs::current_path(cwd);
    trees.push_back(snapshot(root));
  }
  std::vector<std::string> differing;
  for (const auto& [path, bytes] : trees[0]) {
    const auto it = trees[1].find(path);
    if (it == trees[1].end() || it->second != bytes) differing.push_back(path);
  }
  for (const auto& [path, bytes] : trees[1])
    if (!trees[0].count(path)) differing.push_back(path);
  std::size_t total = 0;
  for (const auto& [path, bytes] : trees[0]) total += bytes.size();
  if (!differing.empty())
    return {false, fmt::format("differing files: {}", fmt::join(differing, ", "))};
  return {true, fmt::format("{} files, {} bytes identical across two invocations",
                            trees[0].size(), total)};
}

}  // namespace

int main() {
  const fs::path scratch = fs::temp_directory_path() / "spikemix_acceptance";
  fs::remove_all(scratch);
  fs::create_directories(scratch);

  int failures = 0;
  auto report = [&](int id, const std::string& name, const std::function<Outcome()>& check) {
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = check();
    } catch (const std::exception& e) {
      outcome = {false, fmt::format("exception: {}", e.what())};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failures += !outcome.pass;
    fmt::print("{} [{}] {} ({:.1f} s): {}\n", outcome.pass ? "PASS" : "FAIL", id, name, secs,
               outcome.detail);
    std::fflush(stdout);
  };

  report(1, "conjugate component update", conjugate_oracle);
  report(2, "prior invariance with no data", prior_invariance);

  SeparableRuns runs;
  bool have_runs = false;
  std::string run_error;
  const auto start = std::chrono::steady_clock::now();
  try {
    runs = separable_runs(scratch);
    have_runs = true;
  } catch (const std::exception& e) {
    run_error = e.what();
  }
  fmt::print("     separable runs: 3 seeds x (OFM + DPM), 10000 iterations, {:.1f} s\n",
             std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
  auto with_runs = [&](Outcome (*check)(const SeparableRuns&)) {
    return [&, check]() -> Outcome {
      if (!have_runs) return {false, "separable runs failed: " + run_error};
      return check(runs);
    };
  };
  report(3, "OFM empties extra components", with_runs(ofm_emptying));
  report(4, "DPM recovery and wider occupied-count spread", with_runs(dpm_recovery_and_spread));
  report(5, "OFM and DPM similarity agreement", with_runs(posterior_agreement));
  report(6, "PEAR optimum matches exhaustive search", pear_brute_force);
  report(7, "tempering swap ratio", swap_correctness);
  report(8, "slice sampler invariants", slice_invariants);
  report(9, "pipeline determinism", [&] { return determinism(scratch / "determinism"); });

  fs::remove_all(scratch);
  fmt::print("{} of 9 criteria passed\n", 9 - failures);
  return failures == 0 ? 0 : 1;
}
