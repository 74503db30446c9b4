// Apache License, Version 2.0, refer to LICENSE.txt

#include "spikemix/cli/svg.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace spikemix::cli {

namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string color_for(int label) {
  return kPalette[static_cast<std::size_t>(label - 1) % std::size(kPalette)];
}

std::string open_svg(double w, double h) {
  return fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0:.0f}\" height=\"{1:.0f}\" "
      "viewBox=\"0 0 {0:.0f} {1:.0f}\" font-family=\"sans-serif\" font-size=\"11\">\n"
      "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n",
      w, h);
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

int gray_level(double p) {
  return static_cast<int>(std::lround(std::clamp(p, 0.0, 1.0) * 255.0));
}

// Heatmap body at (x0, y0), `size` pixels square, each row run-length encoded.
std::string heatmap_body(const MatrixXd& p, std::span<const int> order, double x0, double y0,
                         double size) {
  const int n = static_cast<int>(order.size());
  const double cell = size / std::max(n, 1);
  std::string s = fmt::format("<g shape-rendering=\"crispEdges\">\n");
  for (int a = 0; a < n; ++a) {
    int b = 0;
    while (b < n) {
      const int level = gray_level(p(order[a], order[b]));
      int end = b + 1;
      while (end < n && gray_level(p(order[a], order[end])) == level) ++end;
      s += fmt::format(
          "<rect x=\"{:.3f}\" y=\"{:.3f}\" width=\"{:.3f}\" height=\"{:.3f}\" "
          "fill=\"#{:02x}{:02x}{:02x}\"/>\n",
          x0 + b * cell, y0 + a * cell, (end - b) * cell, cell, level, level, level);
      b = end;
    }
  }
  s += fmt::format(
      "</g>\n<rect x=\"{:.3f}\" y=\"{:.3f}\" width=\"{:.3f}\" height=\"{:.3f}\" fill=\"none\" "
      "stroke=\"#000000\"/>\n",
      x0, y0, size, size);
  return s;
}

void check_square(const MatrixXd& p, std::span<const int> order) {
  if (p.rows() != p.cols() || p.rows() != static_cast<Eigen::Index>(order.size()))
    throw std::invalid_argument("heatmap: matrix and ordering sizes differ");
}

}  // namespace

std::vector<int> order_by_first_feature(const FeatureMatrix& x) {
  std::vector<int> order(x.n());
  std::iota(order.begin(), order.end(), 0);
  if (x.r() == 0) return order;
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return x.values(a, 0) < x.values(b, 0); });
  return order;
}

std::string histogram_panel_svg(const FeatureMatrix& x, int bins) {
  if (bins < 1) throw std::invalid_argument("histogram: bins must be positive");
  constexpr double pw = 280, ph = 180, margin = 30;
  const int cols = std::min(x.r(), 2);
  const int rows = (x.r() + 1) / 2;
  std::string s = open_svg(std::max(cols, 1) * (pw + margin) + margin,
                           std::max(rows, 1) * (ph + margin) + margin);
  for (int c = 0; c < x.r(); ++c) {
    const double ox = margin + (c % 2) * (pw + margin);
    const double oy = margin + (c / 2) * (ph + margin);
    const auto col = x.values.col(c);
    const double lo = x.n() ? col.minCoeff() : 0.0;
    const double hi = x.n() ? col.maxCoeff() : 1.0;
    const double width = hi > lo ? (hi - lo) / bins : 1.0;
    std::vector<int> counts(bins, 0);
    for (int i = 0; i < x.n(); ++i)
      ++counts[std::min(bins - 1, static_cast<int>((col(i) - lo) / width))];
    const int top = std::max(1, *std::max_element(counts.begin(), counts.end()));
    s += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\">PC{}</text>\n", ox, oy - 6, c + 1);
    for (int b = 0; b < bins; ++b) {
      const double h = ph * counts[b] / top;
      s += fmt::format(
          "<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\" fill=\"#4a4a4a\"/>\n",
          ox + b * pw / bins, oy + ph - h, pw / bins, h);
    }
    s += fmt::format(
        "<line x1=\"{0:.1f}\" y1=\"{1:.1f}\" x2=\"{2:.1f}\" y2=\"{1:.1f}\" stroke=\"#000000\"/>\n"
        "<text x=\"{0:.1f}\" y=\"{3:.1f}\">{4:.3g}</text>\n"
        "<text x=\"{2:.1f}\" y=\"{3:.1f}\" text-anchor=\"end\">{5:.3g}</text>\n",
        ox, oy + ph, ox + pw, oy + ph + 13, lo, hi);
  }
  return s + "</svg>\n";
}

std::string heatmap_svg(const MatrixXd& p, std::span<const int> order, const std::string& title) {
  check_square(p, order);
  constexpr double size = 600, margin = 30;
  std::string s = open_svg(size + 2 * margin, size + 2 * margin);
  s += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\">{}</text>\n", margin, margin - 8,
                   escape(title));
  s += heatmap_body(p, order, margin, margin, size);
  return s + "</svg>\n";
}

std::string triptych_svg(const MatrixXd& a, const MatrixXd& b, const MatrixXd& c,
                         std::span<const int> order, const std::vector<std::string>& titles) {
  check_square(a, order);
  check_square(b, order);
  check_square(c, order);
  constexpr double size = 400, margin = 30;
  std::string s = open_svg(3 * size + 4 * margin, size + 2 * margin);
  const MatrixXd* panels[] = {&a, &b, &c};
  for (int k = 0; k < 3; ++k) {
    const double x0 = margin + k * (size + margin);
    if (k < static_cast<int>(titles.size()))
      s += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\">{}</text>\n", x0, margin - 8,
                       escape(titles[k]));
    s += heatmap_body(*panels[k], order, x0, margin, size);
  }
  return s + "</svg>\n";
}

std::string cluster_frames_svg(const RowMatrix& curves, const Partition& clusters,
                               const Partition* colors) {
  if (curves.rows() != clusters.n())
    throw std::invalid_argument("cluster frames: curves and partition sizes differ");
  if (colors && colors->n() != clusters.n())
    throw std::invalid_argument("cluster frames: coloring partition has the wrong size");
  constexpr double fw = 260, fh = 170, margin = 28;
  const int k = clusters.clusters();

  // Frames in decreasing cluster size, ties by label.
  std::vector<int> sizes(k, 0);
  for (int l : clusters.labels()) ++sizes[l - 1];
  std::vector<int> frames(k);
  std::iota(frames.begin(), frames.end(), 1);
  std::stable_sort(frames.begin(), frames.end(),
                   [&](int a, int b) { return sizes[a - 1] > sizes[b - 1]; });

  const int grid = std::min(std::max(k, 1), 4);
  const int grid_rows = (k + grid - 1) / grid;
  std::string s = open_svg(grid * (fw + margin) + margin, std::max(grid_rows, 1) * (fh + margin) + margin);
  const double lo = curves.size() ? curves.minCoeff() : 0.0;
  const double hi = curves.size() ? curves.maxCoeff() : 1.0;
  const double span = hi > lo ? hi - lo : 1.0;
  const Eigen::Index len = curves.cols();

  for (int f = 0; f < k; ++f) {
    const int label = frames[f];
    const double ox = margin + (f % grid) * (fw + margin);
    const double oy = margin + (f / grid) * (fh + margin);
    s += fmt::format(
        "<text x=\"{:.1f}\" y=\"{:.1f}\">cluster {} (n = {})</text>\n"
        "<rect x=\"{:.1f}\" y=\"{:.1f}\" width=\"{:.1f}\" height=\"{:.1f}\" fill=\"none\" "
        "stroke=\"#000000\"/>\n",
        ox, oy - 6, f + 1, sizes[label - 1], ox, oy, fw, fh);
    for (int i = 0; i < clusters.n(); ++i) {
      if (clusters.labels()[i] != label) continue;
      const int color_label = colors ? colors->labels()[i] : label;
      s += fmt::format("<polyline fill=\"none\" stroke=\"{}\" stroke-opacity=\"0.5\" points=\"",
                       color_for(color_label));
      for (Eigen::Index t = 0; t < len; ++t) {
        const double px = ox + (len > 1 ? fw * t / (len - 1) : fw / 2);
        const double py = oy + fh - fh * (curves(i, t) - lo) / span;
        s += fmt::format("{}{:.2f},{:.2f}", t ? " " : "", px, py);
      }
      s += "\"/>\n";
    }
  }
  return s + "</svg>\n";
}

}  // namespace spikemix::cli
