// Apache License, Version 2.0, refer to LICENSE.txt

#include "spikemix/cli/run_config.hpp"

#include <fmt/format.h>

#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <stdexcept>

namespace spikemix::cli {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value, const char* want) {
  throw std::invalid_argument(fmt::format("config key '{}': expected {}, got '{}'", key, want, value));
}

long long parse_int(std::string_view key, std::string_view value) {
  long long out = 0;
  const auto v = trim(value);
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || v.empty()) bad_value(key, value, "an integer");
  return out;
}

int parse_int32(std::string_view key, std::string_view value) {
  const long long v = parse_int(key, value);
  if (v < -2147483647LL || v > 2147483647LL) bad_value(key, value, "a 32-bit integer");
  return static_cast<int>(v);
}

double parse_double(std::string_view key, std::string_view value) {
  const std::string v(trim(value));
  char* end = nullptr;
  errno = 0;
  const double out = std::strtod(v.c_str(), &end);
  if (v.empty() || end != v.c_str() + v.size() || errno == ERANGE || !std::isfinite(out))
    bad_value(key, value, "a finite number");
  return out;
}

bool parse_bool(std::string_view key, std::string_view value) {
  const auto v = trim(value);
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  bad_value(key, value, "true or false");
}

std::vector<double> parse_list(std::string_view key, std::string_view value) {
  std::vector<double> out;
  std::string_view rest = trim(value);
  if (!rest.empty() && rest.front() == '[' && rest.back() == ']')
    rest = trim(rest.substr(1, rest.size() - 2));
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    out.push_back(parse_double(key, rest.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    rest = rest.substr(comma + 1);
  }
  if (out.empty()) bad_value(key, value, "a comma-separated list of numbers");
  return out;
}

std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt::format("{}", v[i]);
  return s;
}

// JSON scalars and arrays to the textual form accepted by apply_setting.
std::string json_to_text(const nlohmann::json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_array()) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
      const auto& e = v[i];
      if (e.is_array())
        for (const auto& x : e) s += (s.empty() ? "" : ",") + x.dump();
      else
        s += (i ? "," : "") + e.dump();
    }
    return s;
  }
  return v.dump();
}

}  // namespace

void apply_setting(RunConfig& c, std::string_view key, std::string_view value) {
  const std::string_view v = trim(value);
  if (key == "schema") {
    if (parse_int(key, v) != kConfigSchema)
      throw std::invalid_argument(
          fmt::format("unsupported config schema {} (this build reads schema {})", v, kConfigSchema));
  } else if (key == "features") {
    c.features = v;
  } else if (key == "input") {
    c.input = v;
  } else if (key == "input_header") {
    c.input_header = parse_bool(key, v);
  } else if (key == "raw_features") {
    c.raw_features = parse_bool(key, v);
  } else if (key == "pca_components") {
    c.pca_components = parse_int32(key, v);
  } else if (key == "standardize") {
    c.standardize = parse_bool(key, v);
  } else if (key == "model") {
    c.model = v;
  } else if (key == "b0") {
    if (v == "data_mean")
      c.b0.reset();
    else
      c.b0 = parse_list(key, v);
  } else if (key == "n0") {
    c.n0 = parse_double(key, v);
  } else if (key == "c0") {
    c.c0 = parse_double(key, v);
  } else if (key == "c0_scale_factor") {
    c.c0_scale_factor = parse_double(key, v);
  } else if (key == "c0_matrix") {
    if (v == "scaled_covariance")
      c.c0_matrix.reset();
    else
      c.c0_matrix = parse_list(key, v);
  } else if (key == "kstar" || key == "k_init") {
    c.kstar = parse_int32(key, v);
  } else if (key == "iterations") {
    c.iterations = parse_int32(key, v);
  } else if (key == "burn_in") {
    c.burn_in = parse_int32(key, v);
  } else if (key == "thin") {
    c.thin = parse_int32(key, v);
  } else if (key == "seed") {
    const long long s = parse_int(key, v);
    if (s < 0) bad_value(key, v, "a non-negative integer");
    c.seed = static_cast<std::uint64_t>(s);
  } else if (key == "ladder") {
    c.ladder = parse_list(key, v);
  } else if (key == "swap_interval") {
    c.swap_interval = parse_int32(key, v);
  } else if (key == "workers") {
    c.workers = parse_int32(key, v);
  } else if (key == "moves_per_sweep") {
    c.moves_per_sweep = parse_int32(key, v);
  } else if (key == "m_shape") {
    c.m_shape = parse_double(key, v);
  } else if (key == "m_rate") {
    c.m_rate = parse_double(key, v);
  } else if (key == "m_init") {
    c.m_init = parse_double(key, v);
  } else if (key == "output") {
    c.output = v;
  } else {
    throw std::invalid_argument(fmt::format("unknown config key '{}'", key));
  }
}

void RunConfig::validate() const {
  if (features.empty() == input.empty())
    throw std::invalid_argument("config: give exactly one of 'features' or 'input'");
  if (!input.empty() && !raw_features && pca_components < 1)
    throw std::invalid_argument("config: pca_components must be >= 1");
  if (model != "ofm" && model != "dpm")
    throw std::invalid_argument(fmt::format("config: model must be 'ofm' or 'dpm', got '{}'", model));
  if (!(n0 > 0.0)) throw std::invalid_argument("config: n0 must be positive");
  if (!(c0_scale_factor > 0.0)) throw std::invalid_argument("config: c0_scale_factor must be positive");
  if (model == "ofm")
    ofm_config().validate();
  else
    dpm_config().validate();
}

OfmConfig RunConfig::ofm_config() const {
  OfmConfig o;
  o.kstar = kstar;
  o.ladder.alphas = ladder;
  o.ladder.swap_interval = swap_interval;
  o.iterations = iterations;
  o.burn_in = burn_in;
  o.thin = thin;
  o.seed = seed;
  o.workers = workers;
  return o;
}

DpmConfig RunConfig::dpm_config() const {
  DpmConfig d;
  d.k_init = kstar;
  d.m_shape = m_shape;
  d.m_rate = m_rate;
  d.m_init = m_init;
  d.iterations = iterations;
  d.burn_in = burn_in;
  d.thin = thin;
  d.seed = seed;
  d.moves_per_sweep = moves_per_sweep;
  return d;
}

NiwHyperparams RunConfig::hyperparams(const FeatureMatrix& x) const {
  NiwHyperparams h = NiwHyperparams::from_data(x, n0, c0, c0_scale_factor);
  const int r = x.r();
  if (b0) {
    if (static_cast<int>(b0->size()) != r)
      throw std::invalid_argument(
          fmt::format("config: b0 has {} entries but the features have {} columns", b0->size(), r));
    h.b0 = Eigen::Map<const VectorXd>(b0->data(), r);
  }
  if (c0_matrix) {
    if (static_cast<int>(c0_matrix->size()) != r * r)
      throw std::invalid_argument(
          fmt::format("config: c0_matrix needs {} entries (r x r), got {}", r * r, c0_matrix->size()));
    h.c0_scale = SpdMatrix(Eigen::Map<const RowMatrix>(c0_matrix->data(), r, r));
  }
  h.validate();
  return h;
}

std::string RunConfig::to_text() const {
  std::string s = fmt::format("schema = {}\n", kConfigSchema);
  if (!features.empty()) s += fmt::format("features = {}\n", features);
  if (!input.empty()) {
    s += fmt::format("input = {}\ninput_header = {}\nraw_features = {}\npca_components = {}\n",
                     input, input_header, raw_features, pca_components);
  }
  s += fmt::format("standardize = {}\nmodel = {}\n", standardize, model);
  s += fmt::format("b0 = {}\n", b0 ? join(*b0) : "data_mean");
  s += fmt::format("n0 = {}\nc0 = {}\nc0_scale_factor = {}\n", n0, c0, c0_scale_factor);
  s += fmt::format("c0_matrix = {}\n", c0_matrix ? join(*c0_matrix) : "scaled_covariance");
  s += fmt::format("kstar = {}\niterations = {}\nburn_in = {}\nthin = {}\nseed = {}\n", kstar,
                   iterations, burn_in, thin, seed);
  if (model == "ofm")
    s += fmt::format("ladder = {}\nswap_interval = {}\nworkers = {}\n", join(ladder), swap_interval,
                     workers);
  else
    s += fmt::format("moves_per_sweep = {}\nm_shape = {}\nm_rate = {}\nm_init = {}\n",
                     moves_per_sweep, m_shape, m_rate, m_init);
  return s;
}

RunConfig parse_run_config(std::string_view text, const std::string& source) {
  RunConfig c;
  const auto first = trim(text).substr(0, 1);
  if (first == "{") {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      throw std::invalid_argument(fmt::format("{}: invalid JSON: {}", source, e.what()));
    }
    if (!j.contains("schema"))
      throw std::invalid_argument(fmt::format("{}: missing 'schema' (expected {})", source, kConfigSchema));
    for (const auto& [key, value] : j.items()) {
      try {
        apply_setting(c, key, json_to_text(value));
      } catch (const std::invalid_argument& e) {
        throw std::invalid_argument(fmt::format("{}: {}", source, e.what()));
      }
    }
    return c;
  }

  bool saw_schema = false;
  std::istringstream in{std::string(text)};
  std::string line;
  for (int lineno = 1; std::getline(in, line); ++lineno) {
    std::string_view l = line;
    if (const auto hash = l.find('#'); hash != std::string_view::npos) l = l.substr(0, hash);
    l = trim(l);
    if (l.empty()) continue;
    const auto eq = l.find('=');
    if (eq == std::string_view::npos)
      throw std::invalid_argument(fmt::format("{}:{}: expected 'key = value'", source, lineno));
    const auto key = trim(l.substr(0, eq));
    try {
      apply_setting(c, key, l.substr(eq + 1));
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument(fmt::format("{}:{}: {}", source, lineno, e.what()));
    }
    saw_schema = saw_schema || key == "schema";
  }
  if (!saw_schema)
    throw std::invalid_argument(fmt::format("{}: missing 'schema = {}' line", source, kConfigSchema));
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument(path.string() + ": cannot open config file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_run_config(ss.str(), path.string());
}

}  // namespace spikemix::cli
