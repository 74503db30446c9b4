// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "spikemix/cli/run_config.hpp"

namespace spikemix::cli {

namespace fs = std::filesystem;

// --out, else $SPIKEMIX_OUT, else ./spikemix_out.
fs::path resolve_output_dir(const std::string& flag);

struct PcaOptions {
  std::string input;
  bool header = false;
  int components = 4;
  bool robust_scale = false;
  bool standardize = false;
  fs::path out;
};
void cmd_pca(const PcaOptions& options, std::ostream& log);

struct RunOptions {
  RunConfig config;
  bool record_wall_time = false;
  fs::path out;
};
void cmd_run(const RunOptions& options, std::ostream& log);

struct AnalyzeOptions {
  std::string trace;
  std::string features;
  std::string method = "pear";  // pear | modal
  std::string waveforms;
  bool waveforms_header = false;
  std::string color_by;
  std::string truth;
  fs::path out;
};
void cmd_analyze(const AnalyzeOptions& options, std::ostream& log);

struct CompareOptions {
  std::string ofm_trace;
  std::string dpm_trace;
  std::string features;
  std::string truth;
  fs::path out;
};
void cmd_compare(const CompareOptions& options, std::ostream& log);

struct SimulateOptions {
  std::string spec;
  std::uint64_t seed = 1;
  fs::path out;
};
void cmd_simulate(const SimulateOptions& options, std::ostream& log);

// Parses argv-style arguments (without the program name), runs the verb and
// returns the exit status. Errors are reported on `err` as "error: ...".
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace spikemix::cli
