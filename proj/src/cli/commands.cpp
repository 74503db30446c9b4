// Apache License, Version 2.0, refer to LICENSE.txt

#include "spikemix/cli/commands.hpp"

#include <fmt/format.h>
#include <fmt/ranges.h>

#include <CLI11.hpp>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <json.hpp>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "spikemix/cli/csv_io.hpp"
#include "spikemix/cli/svg.hpp"
#include "spikemix/pca.hpp"
#include "spikemix/posterior.hpp"
#include "spikemix/synthetic.hpp"

namespace spikemix::cli {

namespace {

using ordered_json = nlohmann::ordered_json;

void write_json(const fs::path& path, const ordered_json& j) { write_text(path, j.dump(2) + "\n"); }

ordered_json distribution_json(const OccupiedCountDistribution& d) {
  ordered_json j = ordered_json::object();
  for (const auto& [k, p] : d.table) j[std::to_string(k)] = p;
  return j;
}

FeatureMatrix load_run_features(const RunConfig& c) {
  FeatureMatrix x;
  if (!c.features.empty()) {
    x = read_features_csv(c.features);
  } else {
    const WaveformMatrix w = load_waveforms(c.input, c.input_header);
    x = c.raw_features ? FeatureMatrix(w.values) : pca_reduce(w, c.pca_components).features;
  }
  if (c.standardize) standardize_columns(x);
  return x;
}

void require_same_n(int trace_n, int features_n, const std::string& trace_path) {
  if (trace_n != features_n)
    throw std::invalid_argument(fmt::format(
        "{}: trace covers {} observations but the features have {} rows", trace_path, trace_n,
        features_n));
}

AllocationTrace load_trace(const std::string& path) {
  AllocationTrace t = read_trace_csv(path);
  if (t.empty()) throw ParseError(path + ": trace has no draws");
  return t;
}

ordered_json sizes_json(const Partition& p) { return ordered_json(p.sizes()); }

// Table-1 layout: occupied count rows, one proportion column per model.
ordered_json occupied_table(const OccupiedCountDistribution& a, const OccupiedCountDistribution& b) {
  std::map<int, std::pair<double, double>> rows;
  for (const auto& [k, p] : a.table) rows[k].first = p;
  for (const auto& [k, p] : b.table) rows[k].second = p;
  ordered_json out = ordered_json::array();
  for (const auto& [k, v] : rows) out.push_back({{"occupied", k}, {"ofm", v.first}, {"dpm", v.second}});
  return out;
}

// Table-2 layout: cluster sizes in decreasing order, side by side.
ordered_json size_table(const Partition& a, const Partition& b) {
  const auto sa = a.sizes(), sb = b.sizes();
  ordered_json out = ordered_json::array();
  for (std::size_t k = 0; k < std::max(sa.size(), sb.size()); ++k) {
    ordered_json row{{"cluster", k + 1}};
    row["ofm"] = k < sa.size() ? ordered_json(sa[k]) : ordered_json(nullptr);
    row["dpm"] = k < sb.size() ? ordered_json(sb[k]) : ordered_json(nullptr);
    out.push_back(row);
  }
  return out;
}

SpdMatrix spd_from_json(const nlohmann::json& v, int r, const std::string& what) {
  if (v.is_number()) return SpdMatrix(MatrixXd::Identity(r, r) * v.get<double>());
  if (!v.is_array() || static_cast<int>(v.size()) != r)
    throw std::invalid_argument(fmt::format("{}: expected a number or an {}x{} matrix", what, r, r));
  MatrixXd m(r, r);
  for (int i = 0; i < r; ++i) {
    if (!v[i].is_array() || static_cast<int>(v[i].size()) != r)
      throw std::invalid_argument(fmt::format("{}: row {} must have {} entries", what, i + 1, r));
    for (int j = 0; j < r; ++j) m(i, j) = v[i][j].get<double>();
  }
  return SpdMatrix(m);
}

RowMatrix matrix_from_json(const nlohmann::json& v, const std::string& what) {
  if (!v.is_array() || v.empty() || !v[0].is_array() || v[0].empty())
    throw std::invalid_argument(what + ": expected a non-empty list of rows");
  RowMatrix m(v.size(), v[0].size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i].size() != v[0].size())
      throw std::invalid_argument(fmt::format("{}: row {} has {} entries, expected {}", what, i + 1,
                                              v[i].size(), v[0].size()));
    for (std::size_t j = 0; j < v[i].size(); ++j) m(i, j) = v[i][j].get<double>();
  }
  return m;
}

}  // namespace

fs::path resolve_output_dir(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("SPIKEMIX_OUT"); env && *env) return env;
  return "spikemix_out";
}

void cmd_pca(const PcaOptions& o, std::ostream& log) {
  const WaveformMatrix w = load_waveforms(o.input, o.header);
  PcaResult p = pca_reduce(w, o.components, true, o.robust_scale);
  if (o.standardize) standardize_columns(p.features);
  const double total = p.eigenvalues.sum();
  std::vector<double> proportions(p.eigenvalues.size());
  for (Eigen::Index c = 0; c < p.eigenvalues.size(); ++c)
    proportions[c] = total > 0 ? p.eigenvalues(c) / total : 0.0;

  write_features_csv(o.out / "features.csv", p.features);
  write_explained_variance_csv(o.out / "explained_variance.csv", proportions);
  write_text(o.out / "pc_histograms.svg", histogram_panel_svg(p.features));
  double kept = 0;
  for (int c = 0; c < o.components; ++c) kept += proportions[c];
  log << fmt::format("pca: {} waveforms x {} samples -> {} components ({:.1f}% of variance) in {}\n",
                     w.n(), w.s(), o.components, 100 * kept, o.out.string());
}

void cmd_run(const RunOptions& o, std::ostream& log) {
  const RunConfig& c = o.config;
  c.validate();
  const FeatureMatrix x = load_run_features(c);
  const NiwHyperparams hyper = c.hyperparams(x);

  const auto start = std::chrono::steady_clock::now();
  AllocationTrace trace = c.model == "ofm" ? run_ofm(x, hyper, c.ofm_config())
                                           : run_dpm(x, hyper, c.dpm_config());
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  const auto dist = occupied_distribution(trace);
  ordered_json s;
  s["model"] = c.model;
  s["observations"] = x.n();
  s["features"] = x.r();
  s["kept_iterations"] = trace.size();
  s["occupied_distribution"] = distribution_json(dist);
  s["modal_occupied"] = dist.mode();
  if (c.model == "ofm") {
    s["swap_acceptance"] = trace.swap_acceptance;
  } else {
    s["label_switch_acceptance"] = {{"random", trace.label_switch_acceptance.at(0)},
                                    {"adjacent", trace.label_switch_acceptance.at(1)}};
    s["represented"] = trace.represented;
    s["concentration"] = trace.concentration;
  }
  if (o.record_wall_time) s["wall_time_seconds"] = seconds;
  ordered_json echo = ordered_json::object();
  std::istringstream lines(c.to_text());
  for (std::string line; std::getline(lines, line);) {
    const auto eq = line.find(" = ");
    if (eq != std::string::npos) echo[line.substr(0, eq)] = line.substr(eq + 3);
  }
  s["config"] = echo;

  write_trace_csv(o.out / "trace.csv", trace);
  write_json(o.out / "summary.json", s);
  write_text(o.out / "config.txt", c.to_text());
  log << fmt::format("run: {} on {} x {}, {} kept draws, modal occupied {} ({:.3f}); {:.1f} s -> {}\n",
                     c.model, x.n(), x.r(), trace.size(), dist.mode(), dist.table.at(dist.mode()),
                     seconds, o.out.string());
}

void cmd_analyze(const AnalyzeOptions& o, std::ostream& log) {
  if (o.method != "pear" && o.method != "modal")
    throw std::invalid_argument("analyze: --method must be 'pear' or 'modal'");
  const AllocationTrace trace = load_trace(o.trace);
  const FeatureMatrix x = read_features_csv(o.features);
  require_same_n(trace.observations(), x.n(), o.trace);

  const SimilarityMatrix p = pairwise_similarity(trace);
  const Partition best = o.method == "modal" ? ofm_modal_partition(trace) : pear_partition(trace, p);
  const auto dist = occupied_distribution(trace);
  const auto order = order_by_first_feature(x);

  RowMatrix curves = x.values;
  if (!o.waveforms.empty()) {
    curves = load_waveforms(o.waveforms, o.waveforms_header).values;
    require_same_n(static_cast<int>(curves.rows()), x.n(), o.waveforms);
  }
  std::optional<Partition> colors;
  if (!o.color_by.empty()) {
    colors = Partition::canonical(read_labels_csv(o.color_by));
    require_same_n(colors->n(), x.n(), o.color_by);
  }

  ordered_json a;
  a["method"] = o.method;
  a["observations"] = x.n();
  a["kept_iterations"] = trace.size();
  a["occupied_distribution"] = distribution_json(dist);
  a["modal_occupied"] = dist.mode();
  a["clusters"] = best.clusters();
  a["cluster_sizes"] = sizes_json(best);
  const double pear = pear_index(p, best);
  a["pear"] = std::isnan(pear) ? ordered_json(nullptr) : ordered_json(pear);
  if (!o.truth.empty()) {
    const Partition truth = Partition::canonical(read_labels_csv(o.truth));
    require_same_n(truth.n(), x.n(), o.truth);
    a["adjusted_rand_vs_truth"] = adjusted_rand(best, truth);
  }

  write_similarity_csv(o.out / "similarity.csv", p);
  write_labels_csv(o.out / "partition.csv", best.labels());
  write_text(o.out / "similarity.svg",
             heatmap_svg(p.matrix(), order, "Posterior pairwise similarity (ordered by PC1)"));
  write_text(o.out / "clusters.svg", cluster_frames_svg(curves, best, colors ? &*colors : nullptr));
  write_json(o.out / "analysis.json", a);
  log << fmt::format("analyze: {} partition with {} clusters (sizes {}) -> {}\n", o.method,
                     best.clusters(), fmt::join(best.sizes(), " "), o.out.string());
}

void cmd_compare(const CompareOptions& o, std::ostream& log) {
  const AllocationTrace ofm = load_trace(o.ofm_trace);
  const AllocationTrace dpm = load_trace(o.dpm_trace);
  const FeatureMatrix x = read_features_csv(o.features);
  require_same_n(ofm.observations(), x.n(), o.ofm_trace);
  require_same_n(dpm.observations(), x.n(), o.dpm_trace);

  const SimilarityMatrix p_ofm = pairwise_similarity(ofm);
  const SimilarityMatrix p_dpm = pairwise_similarity(dpm);
  const SimilarityComparison cmp = compare_similarity(p_ofm, p_dpm);
  const Partition best_ofm = ofm_modal_partition(ofm);
  const Partition best_dpm = pear_partition(dpm, p_dpm);

  ordered_json m;
  m["observations"] = x.n();
  m["mean_abs_diff"] = cmp.mean_abs_diff;
  m["occupied_counts"] = occupied_table(occupied_distribution(ofm), occupied_distribution(dpm));
  m["optimal_partition_sizes"] = size_table(best_ofm, best_dpm);
  m["adjusted_rand_ofm_vs_dpm"] = adjusted_rand(best_ofm, best_dpm);
  if (!o.truth.empty()) {
    const Partition truth = Partition::canonical(read_labels_csv(o.truth));
    require_same_n(truth.n(), x.n(), o.truth);
    m["adjusted_rand_vs_truth"] = {{"ofm", adjusted_rand(best_ofm, truth)},
                                   {"dpm", adjusted_rand(best_dpm, truth)}};
  }

  const auto order = order_by_first_feature(x);
  write_text(o.out / "comparison.svg",
             triptych_svg(p_ofm.matrix(), p_dpm.matrix(), cmp.agreement, order,
                          {"a) OFM", "b) DPM", "c) 1 - |P_OFM - P_DPM|"}));
  write_labels_csv(o.out / "partition_ofm.csv", best_ofm.labels());
  write_labels_csv(o.out / "partition_dpm.csv", best_dpm.labels());
  write_json(o.out / "metrics.json", m);
  log << fmt::format("compare: mean |P_ofm - P_dpm| = {:.4f}; clusters ofm {} / dpm {} -> {}\n",
                     cmp.mean_abs_diff, best_ofm.clusters(), best_dpm.clusters(), o.out.string());
}

void cmd_simulate(const SimulateOptions& o, std::ostream& log) {
  nlohmann::json spec;
  try {
    spec = nlohmann::json::parse(read_text(o.spec));
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(fmt::format("{}: {}", o.spec, e.what()));
  }
  const std::string kind = spec.value("kind", "features");
  RngStream rng(o.seed, 0);
  try {
    if (kind == "features") {
      const RowMatrix means = matrix_from_json(spec.at("means"), "means");
      const int r = static_cast<int>(means.cols());
      std::vector<SpdMatrix> covs;
      const auto& cj = spec.at("covariances");
      if (!cj.is_array()) throw std::invalid_argument("covariances: expected a list");
      for (std::size_t k = 0; k < cj.size(); ++k)
        covs.push_back(spd_from_json(cj[k], r, fmt::format("covariances[{}]", k + 1)));
      SyntheticSpec s{SimplexVector(spec.at("weights").get<std::vector<double>>()), means,
                      std::move(covs), spec.at("n").get<int>(),
                      spec.value("outlier_fraction", 0.0), spec.value("outlier_scale", 10.0)};
      s.validate();
      const LabeledFeatures out = generate_synthetic_mixture(s, rng);
      write_features_csv(o.out / "features.csv", out.features);
      write_labels_csv(o.out / "labels.csv", out.labels);
      log << fmt::format("simulate: {} observations x {} features -> {}\n", out.features.n(), r,
                         o.out.string());
    } else if (kind == "waveforms") {
      const RowMatrix templates = matrix_from_json(spec.at("templates"), "templates");
      const auto counts = spec.at("counts").get<std::vector<int>>();
      const LabeledWaveforms out =
          generate_synthetic_waveforms(templates, counts, spec.at("noise_sd").get<double>(), rng);
      write_waveforms_csv(o.out / "waveforms.csv", out.waveforms.values);
      write_labels_csv(o.out / "labels.csv", out.labels);
      log << fmt::format("simulate: {} waveforms x {} samples -> {}\n", out.waveforms.n(),
                         out.waveforms.s(), o.out.string());
    } else {
      throw std::invalid_argument(fmt::format("unknown kind '{}' (features | waveforms)", kind));
    }
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(fmt::format("{}: {}", o.spec, e.what()));
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(fmt::format("{}: {}", o.spec, e.what()));
  }
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Bayesian mixture clustering of spike waveforms (OFM and DPM samplers)", "spikemix"};
  app.require_subcommand(1);
  std::string out_dir;

  PcaOptions pca;
  auto* pca_cmd = app.add_subcommand("pca", "Reduce waveforms to principal component scores");
  pca_cmd->add_option("--input", pca.input, "Waveform CSV (one spike per row)")->required();
  pca_cmd->add_flag("--header", pca.header, "Input has a header row");
  pca_cmd->add_option("-r,--components", pca.components, "Number of components")->capture_default_str();
  pca_cmd->add_flag("--robust-scale", pca.robust_scale, "Scale columns by median/MAD first");
  pca_cmd->add_flag("--standardize", pca.standardize, "Standardize the scores");
  pca_cmd->add_option("--out", out_dir, "Output directory");

  RunOptions run;
  std::string config_path;
  std::map<std::string, std::string> settings;
  auto* run_cmd = app.add_subcommand("run", "Run the OFM or DPM sampler");
  run_cmd->add_option("--config", config_path, "Config file (key = value or JSON)");
  for (const char* key : {"features", "input", "pca_components", "model", "b0", "n0", "c0",
                          "c0_scale_factor", "c0_matrix", "kstar", "k_init", "iterations", "burn_in",
                          "thin", "seed", "ladder", "swap_interval", "workers", "moves_per_sweep",
                          "m_shape", "m_rate", "m_init"}) {
    std::string flag = std::string("--") + key;
    std::replace(flag.begin(), flag.end(), '_', '-');
    run_cmd->add_option_function<std::string>(
        flag, [&settings, key](const std::string& v) { settings[key] = v; }, "Overrides config key " + std::string(key));
  }
  for (const char* key : {"input_header", "raw_features", "standardize"}) {
    std::string flag = std::string("--") + key;
    std::replace(flag.begin(), flag.end(), '_', '-');
    run_cmd->add_flag_callback(flag, [&settings, key] { settings[key] = "true"; });
  }
  run_cmd->add_flag("--record-wall-time", run.record_wall_time,
                    "Include wall time in summary.json (breaks byte-identical reruns)");
  run_cmd->add_option("--out", out_dir, "Output directory");

  AnalyzeOptions analyze;
  auto* an_cmd = app.add_subcommand("analyze", "Similarity matrix, optimal partition and figures");
  an_cmd->add_option("--trace", analyze.trace, "Trace CSV from run")->required();
  an_cmd->add_option("--features", analyze.features, "Feature CSV")->required();
  an_cmd->add_option("--method", analyze.method, "pear | modal")->capture_default_str();
  an_cmd->add_option("--waveforms", analyze.waveforms, "Waveform CSV for the cluster frames");
  an_cmd->add_flag("--waveforms-header", analyze.waveforms_header);
  an_cmd->add_option("--color-by", analyze.color_by, "Partition CSV used to color the frames");
  an_cmd->add_option("--truth", analyze.truth, "Labels CSV to score against");
  an_cmd->add_option("--out", out_dir, "Output directory");

  CompareOptions compare;
  auto* cmp_cmd = app.add_subcommand("compare", "Compare OFM and DPM posteriors");
  cmp_cmd->add_option("--ofm-trace", compare.ofm_trace)->required();
  cmp_cmd->add_option("--dpm-trace", compare.dpm_trace)->required();
  cmp_cmd->add_option("--features", compare.features)->required();
  cmp_cmd->add_option("--truth", compare.truth, "Labels CSV to score against");
  cmp_cmd->add_option("--out", out_dir, "Output directory");

  SimulateOptions simulate;
  auto* sim_cmd = app.add_subcommand("simulate", "Generate synthetic data with truth labels");
  sim_cmd->add_option("--spec", simulate.spec, "Simulation spec (JSON)")->required();
  sim_cmd->add_option("--seed", simulate.seed)->capture_default_str();
  sim_cmd->add_option("--out", out_dir, "Output directory");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (pca_cmd->parsed()) {
      pca.out = resolve_output_dir(out_dir);
      cmd_pca(pca, out);
    } else if (run_cmd->parsed()) {
      run.config = config_path.empty() ? RunConfig{} : load_run_config(config_path);
      for (const auto& [key, value] : settings) apply_setting(run.config, key, value);
      run.out = resolve_output_dir(out_dir.empty() ? run.config.output : out_dir);
      cmd_run(run, out);
    } else if (an_cmd->parsed()) {
      analyze.out = resolve_output_dir(out_dir);
      cmd_analyze(analyze, out);
    } else if (cmp_cmd->parsed()) {
      compare.out = resolve_output_dir(out_dir);
      cmd_compare(compare, out);
    } else if (sim_cmd->parsed()) {
      simulate.out = resolve_output_dir(out_dir);
      cmd_simulate(simulate, out);
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace spikemix::cli
