// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "spikemix/dpm.hpp"
#include "spikemix/features.hpp"
#include "spikemix/niw.hpp"
#include "spikemix/ofm.hpp"

namespace spikemix::cli {

inline constexpr int kConfigSchema = 1;

struct RunConfig {
  // Data: either a feature CSV, or a waveform CSV reduced by PCA (or used raw).
  std::string features;
  std::string input;
  bool input_header = false;
  bool raw_features = false;
  int pca_components = 4;
  bool standardize = false;

  std::string model = "ofm";

  // Prior. b0 and C0 default to the data mean and c0_scale_factor * cov(y).
  std::optional<std::vector<double>> b0;
  double n0 = 0.01;
  double c0 = 5.0;
  double c0_scale_factor = 0.75;
  std::optional<std::vector<double>> c0_matrix;  // row-major r x r

  int kstar = 10;  // K* for OFM, K_init for DPM
  int iterations = 50000;
  int burn_in = 25000;
  int thin = 1;
  std::uint64_t seed = 1;
  std::vector<double> ladder{0.001, 0.01, 0.1, 1.0, 20.0};
  int swap_interval = 5;
  int workers = 1;
  int moves_per_sweep = 2;
  double m_shape = 1.0;
  double m_rate = 1.0;
  double m_init = 1.0;

  std::string output;

  void validate() const;
  OfmConfig ofm_config() const;
  DpmConfig dpm_config() const;
  NiwHyperparams hyperparams(const FeatureMatrix& x) const;
  // Key-value text that parses back to the same config.
  std::string to_text() const;
};

// Sets one key from its textual value; throws naming the key on bad input.
void apply_setting(RunConfig& config, std::string_view key, std::string_view value);

// Flat "key = value" text (with "schema = 1") or a JSON object.
RunConfig parse_run_config(std::string_view text, const std::string& source);
RunConfig load_run_config(const std::filesystem::path& path);

}  // namespace spikemix::cli
