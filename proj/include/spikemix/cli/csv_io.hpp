// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "spikemix/features.hpp"
#include "spikemix/posterior.hpp"
#include "spikemix/trace.hpp"
#include "spikemix/waveforms.hpp"

namespace spikemix::cli {

namespace fs = std::filesystem;

// Shortest decimal form that reads back to the same double.
std::string format_number(double x);

void write_text(const fs::path& path, const std::string& text);
std::string read_text(const fs::path& path);

// Header pc1..pcr, one row per observation.
void write_features_csv(const fs::path& path, const FeatureMatrix& x);
FeatureMatrix read_features_csv(const fs::path& path);

void write_waveforms_csv(const fs::path& path, const RowMatrix& w);

// component,proportion with components numbered from 1.
void write_explained_variance_csv(const fs::path& path, std::span<const double> proportions);

// One row per kept draw, labels written 1-based, no header.
void write_trace_csv(const fs::path& path, const AllocationTrace& trace);
AllocationTrace read_trace_csv(const fs::path& path);

void write_similarity_csv(const fs::path& path, const SimilarityMatrix& p);

// index,label with both 1-based (label 0 is allowed for truth files).
void write_labels_csv(const fs::path& path, std::span<const int> labels);
std::vector<int> read_labels_csv(const fs::path& path);

}  // namespace spikemix::cli
