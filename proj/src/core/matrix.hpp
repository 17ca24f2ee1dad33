#pragma once

#include <Eigen/Core>
#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

namespace deepvox {

// Row-major storage throughout: file payloads are row-major and the C API
// exposes the buffer directly.
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vec = Eigen::VectorXd;

// Voxel-grid provenance of the feature columns. `mask` holds the linear grid
// index of each column, strictly increasing, one entry per column.
struct VolumeGeometry {
  std::array<int64_t, 3> dims{0, 0, 0};
  std::vector<int64_t> mask;
};

// Dense samples-by-features matrix, the universal data carrier. Rows are
// samples (volumes or subjects), columns are features (voxels).
struct SampleMatrix {
  Mat values;
  std::optional<VolumeGeometry> geometry;

  int64_t rows() const { return values.rows(); }
  int64_t cols() const { return values.cols(); }
};

// Throws unless rows/cols >= 1, all values finite, and any attached geometry
// is consistent with the column count.
void validate(const SampleMatrix& m);

SampleMatrix load_matrix(const std::filesystem::path& path);
void save_matrix(const SampleMatrix& m, const std::filesystem::path& path);

struct MaskResult {
  SampleMatrix matrix;
  std::vector<int64_t> retained;  // input column indices that were kept
};

// Keeps columns whose across-sample mean is >= the grand mean of all values.
MaskResult mask_below_mean(const SampleMatrix& m);

// Subtracts the per-column mean (the mean image) from every row.
SampleMatrix remove_mean_image(const SampleMatrix& m);

// Centers and scales each column to mean 0, population standard deviation 1.
// Zero-variance columns become all zeros. Requires rows >= 2.
SampleMatrix zscore_voxels(const SampleMatrix& m);

}  // namespace deepvox
