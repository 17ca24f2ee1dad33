#pragma once

#include <cstdint>
#include <vector>

#include "matrix.hpp"

namespace deepvox::synth {

// Simulated activation data: Gaussian spatial blobs mixed by smooth time
// courses on an nx-by-ny grid, flattened to voxel vectors.
struct SynthSpec {
  int64_t nx = 32;
  int64_t ny = 32;
  int64_t n_sources = 8;
  int64_t timepoints = 200;
  double overlap = 0.0;     // >= 0; spaces source centers inversely
  double snr = 10.0;        // power(signal) / power(noise)
  uint64_t seed = 1;
  double default_width = 2.0;
  std::vector<double> centers;  // optional, 2 entries per source (x, y)
  std::vector<double> widths;   // optional, one radius per source
};

struct SynthGroundTruth {
  SampleMatrix sm;  // R x V, nonnegative, unit max per row
  SampleMatrix tc;  // T x R, unit-variance smooth columns
  SampleMatrix x;   // T x V, tc * sm + scaled white noise
  SynthSpec spec;
};

void validate(const SynthSpec& spec);

// Source centers on a lattice around the grid center; spacing shrinks as
// overlap grows (4 * max width at overlap 0).
std::vector<double> default_centers(const SynthSpec& spec);

SynthGroundTruth generate(const SynthSpec& spec);

// One dataset per overlap level, centers re-laid-out per level, seed varied
// deterministically.
std::vector<SynthGroundTruth> overlap_sweep(const SynthSpec& base, const std::vector<double>& levels);

struct LabeledData {
  SampleMatrix x;            // 2 * n_per_class rows
  std::vector<int> labels;   // class 0 block then class 1 block
};

// Two-class volumetric data: both classes share the blob background; class 1
// additionally gets `effect`-scaled intensity in the first half of the blobs.
LabeledData generate_labeled(const SynthSpec& spec, int64_t n_per_class, double effect);

}  // namespace deepvox::synth
