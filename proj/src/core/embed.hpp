#pragma once

#include <cstdint>
#include <vector>

#include "matrix.hpp"

namespace deepvox::embed {

enum class ConstraintMode { exact_distance, cap };

struct EmbedConfig {
  int64_t k = 10;
  double beta = 0.9;
  int64_t max_iters = 2000;
  double tol = 1e-6;          // residual convergence / oscillation improvement threshold
  int64_t osc_window = 50;
  ConstraintMode mode = ConstraintMode::exact_distance;
  uint64_t seed = 1;
};

// Directed k-NN constraints: point i must hold its k nearest input-space
// neighbors at the stored 2D target distances (exact_distance mode) or
// within the cap radius (cap mode). Targets are scaled so their median is 1.
struct ConstraintGraph {
  int64_t n = 0;
  ConstraintMode mode = ConstraintMode::exact_distance;
  std::vector<std::vector<int64_t>> neighbors;       // per point, ascending-distance order
  std::vector<std::vector<double>> targets;          // parallel to neighbors
};

// Replica field for the divide-and-concur iteration. Constraint i owns one
// replica of point i (its center) plus one replica of each neighbor; the
// flat layout is [offset[i] .. offset[i] + 1 + |N_i|).
struct ReplicaState {
  Eigen::Matrix<double, Eigen::Dynamic, 2, Eigen::RowMajor> replicas;
  std::vector<int64_t> offset;                       // per constraint
  std::vector<std::vector<int64_t>> point_replicas;  // replica rows owned by each point
  std::vector<double> residual_trace;
};

enum class EmbedStatus { converged, oscillating, max_iters };

struct EmbedResult {
  Mat positions;  // n x 2 consensus
  EmbedStatus status = EmbedStatus::max_iters;
  int64_t iterations = 0;
  std::vector<double> residual_trace;
  std::vector<double> oscillation_score;  // per point, replica variance over the last window
};

void validate(const EmbedConfig& cfg);

ConstraintGraph build_constraints(const Mat& data, int64_t k, ConstraintMode mode);

// Replica field with every replica of point p at positions.row(p).
ReplicaState make_state(const ConstraintGraph& g, const Mat& positions);

using ReplicaMat = Eigen::Matrix<double, Eigen::Dynamic, 2, Eigen::RowMajor>;

// Divide projection P_d: per constraint, each edge moves its two replicas
// symmetrically onto the target distance; the center replica takes the mean
// of its per-edge results. Satisfied edges map to themselves exactly.
void divide_project(const ConstraintGraph& g, const ReplicaState& layout, const ReplicaMat& in,
                    ReplicaMat& out);

// Concur projection P_c: every replica of a point moves to the point's mean
// replica position. `consensus`, when given, receives the n x 2 means.
void concur_project(const ReplicaState& layout, const ReplicaMat& in, ReplicaMat& out,
                    Mat* consensus = nullptr);

struct StepDebug {
  ReplicaMat x_c;
  ReplicaMat x_d;
};

// One difference-map update
//   x_c = P_c((1 + 1/beta) P_d(x) - (1/beta) x)
//   x_d = P_d((1 - 1/beta) P_c(x) + (1/beta) x)
//   x  += beta (x_c - x_d)
// Returns the residual, the RMS of (x_c - x_d) over all replica coordinates,
// and appends it to the state's trace.
double difference_map_step(ReplicaState& state, const ConstraintGraph& g, double beta,
                           StepDebug* debug = nullptr);

// True iff the best residual of the last `window` entries fails to improve
// on the best of the preceding window by more than tol. Traces shorter than
// 2 * window report false.
bool detect_oscillation(const std::vector<double>& trace, int64_t window, double tol);

// Deterministic initialization: data projected onto its top two principal
// directions (power method, fixed iteration count, seeded start).
Mat pca2_init(const Mat& data, uint64_t seed);

EmbedResult embed(const Mat& data, const EmbedConfig& cfg);

// Same solver from an explicit starting layout (analysis hook).
EmbedResult embed_with_init(const Mat& data, const EmbedConfig& cfg, const Mat& init_positions);

}  // namespace deepvox::embed
