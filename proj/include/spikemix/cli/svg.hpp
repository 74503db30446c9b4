// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <span>
#include <string>
#include <vector>

#include "spikemix/features.hpp"
#include "spikemix/posterior.hpp"

namespace spikemix::cli {

// Observation indices sorted by the first feature, ties kept in index order.
std::vector<int> order_by_first_feature(const FeatureMatrix& x);

// One histogram panel per feature column.
std::string histogram_panel_svg(const FeatureMatrix& x, int bins = 40);

// Grayscale image of p (white = 1) with rows and columns taken in `order`.
std::string heatmap_svg(const MatrixXd& p, std::span<const int> order, const std::string& title);

// Three heatmaps side by side sharing one ordering.
std::string triptych_svg(const MatrixXd& a, const MatrixXd& b, const MatrixXd& c,
                         std::span<const int> order, const std::vector<std::string>& titles);

// One frame per cluster of `clusters` (in decreasing size), each row of
// `curves` drawn as a polyline. With `colors`, lines are colored by that
// partition's label instead of the frame's.
std::string cluster_frames_svg(const RowMatrix& curves, const Partition& clusters,
                               const Partition* colors = nullptr);

}  // namespace spikemix::cli
