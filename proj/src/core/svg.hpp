#pragma once

#include <filesystem>
#include <optional>

#include "matrix.hpp"

namespace deepvox::svg {

// Scatter map: one <circle> per row of the n x 2 positions. Optional labels
// matrix: column 0 selects the fill color from a fixed categorical palette;
// column 1, when present and nonzero, marks the point with a black outline
// (train/validation split).
void write_scatter(const Mat& positions, const Mat* labels, const std::filesystem::path& path);

// Heatmap with a symmetric diverging scale centered at 0 (blue-white-red),
// one <rect> per cell.
void write_heatmap(const Mat& m, const std::filesystem::path& path);

// Line chart: column 0 is x, every further column is one series drawn as a
// <polyline> in palette order.
void write_curves(const Mat& xy, const std::filesystem::path& path);

}  // namespace deepvox::svg
