// Apache License, Version 2.0, refer to LICENSE.txt

#include "spikemix/cli/csv_io.hpp"

#include <fmt/format.h>

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace spikemix::cli {

namespace {

std::ifstream open_input(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path.string() + ": cannot open file");
  return in;
}

RowMatrix read_csv(const fs::path& path, bool header) {
  std::ifstream in = open_input(path);
  return read_numeric_csv(in, header, path.string());
}

int to_label(double v, const fs::path& path, Eigen::Index row, Eigen::Index col) {
  if (v != std::floor(v) || std::abs(v) > 1e9)
    throw ParseError(fmt::format("{}: row {} column {}: expected an integer label, got {}",
                                 path.string(), row + 1, col + 1, format_number(v)));
  return static_cast<int>(v);
}

}  // namespace

std::string format_number(double x) { return fmt::format("{}", x); }

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error(path.string() + ": cannot open for writing");
  out << text;
  if (!out) throw std::runtime_error(path.string() + ": write failed");
}

std::string read_text(const fs::path& path) {
  std::ifstream in = open_input(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_features_csv(const fs::path& path, const FeatureMatrix& x) {
  std::string s;
  for (int c = 0; c < x.r(); ++c) s += fmt::format("{}pc{}", c ? "," : "", c + 1);
  s += '\n';
  for (int i = 0; i < x.n(); ++i) {
    for (int c = 0; c < x.r(); ++c) s += (c ? "," : "") + format_number(x.values(i, c));
    s += '\n';
  }
  write_text(path, s);
}

FeatureMatrix read_features_csv(const fs::path& path) {
  return FeatureMatrix(read_csv(path, true));
}

void write_waveforms_csv(const fs::path& path, const RowMatrix& w) {
  std::string s;
  for (Eigen::Index i = 0; i < w.rows(); ++i) {
    for (Eigen::Index c = 0; c < w.cols(); ++c) s += (c ? "," : "") + format_number(w(i, c));
    s += '\n';
  }
  write_text(path, s);
}

void write_explained_variance_csv(const fs::path& path, std::span<const double> proportions) {
  std::string s = "component,proportion\n";
  for (std::size_t c = 0; c < proportions.size(); ++c)
    s += fmt::format("{},{}\n", c + 1, format_number(proportions[c]));
  write_text(path, s);
}

void write_trace_csv(const fs::path& path, const AllocationTrace& trace) {
  std::string s;
  for (const auto& draw : trace.draws) {
    for (std::size_t i = 0; i < draw.size(); ++i) s += fmt::format("{}{}", i ? "," : "", draw[i] + 1);
    s += '\n';
  }
  write_text(path, s);
}

AllocationTrace read_trace_csv(const fs::path& path) {
  const RowMatrix m = read_csv(path, false);
  std::vector<std::vector<int>> draws(m.rows(), std::vector<int>(m.cols()));
  for (Eigen::Index t = 0; t < m.rows(); ++t)
    for (Eigen::Index i = 0; i < m.cols(); ++i) {
      const int label = to_label(m(t, i), path, t, i);
      if (label < 1)
        throw ParseError(fmt::format("{}: row {} column {}: allocation labels start at 1",
                                     path.string(), t + 1, i + 1));
      draws[t][i] = label - 1;
    }
  return AllocationTrace::from_draws(std::move(draws));
}

void write_similarity_csv(const fs::path& path, const SimilarityMatrix& p) {
  std::string s;
  for (int i = 0; i < p.n(); ++i) {
    for (int j = 0; j < p.n(); ++j) s += (j ? "," : "") + format_number(p(i, j));
    s += '\n';
  }
  write_text(path, s);
}

void write_labels_csv(const fs::path& path, std::span<const int> labels) {
  std::string s = "index,label\n";
  for (std::size_t i = 0; i < labels.size(); ++i) s += fmt::format("{},{}\n", i + 1, labels[i]);
  write_text(path, s);
}

std::vector<int> read_labels_csv(const fs::path& path) {
  const RowMatrix m = read_csv(path, true);
  if (m.cols() != 2) throw ParseError(path.string() + ": expected columns index,label");
  std::vector<int> labels(m.rows());
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    if (to_label(m(i, 0), path, i, 0) != i + 1)
      throw ParseError(fmt::format("{}: row {}: index column must count up from 1",
                                   path.string(), i + 1));
    labels[i] = to_label(m(i, 1), path, i, 1);
  }
  return labels;
}

}  // namespace spikemix::cli
