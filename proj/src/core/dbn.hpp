#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "matrix.hpp"
#include "rbm.hpp"

namespace deepvox::dbn {

struct Layer {
  Mat W;  // in x out
  Vec b;  // out
};

struct SoftmaxHead {
  Mat W;  // top width x classes
  Vec b;  // classes
};

// Stack of tanh layers pretrained as RBMs, optionally topped by a softmax
// classifier after fine-tuning.
struct DbnModel {
  std::vector<Layer> layers;
  std::optional<SoftmaxHead> softmax;

  int64_t depth() const { return static_cast<int64_t>(layers.size()); }
  int64_t input_width() const { return layers.front().W.rows(); }
  int64_t top_width() const { return layers.back().W.cols(); }
};

struct FineTuneConfig {
  double learning_rate = 0.01;
  int64_t epochs = 300;
  int64_t batch_size = 10;
  uint64_t seed = 1;
  double l2 = 0.0;
};

void validate(const DbnModel& m);
void validate(const FineTuneConfig& cfg);

// Greedy layer-wise pretraining: layer 1 is a Gaussian-visible RBM on the
// data, upper layers are clipped-linear-visible RBMs on the previous layer's
// hidden means.
DbnModel pretrain(const Mat& data, const std::vector<int64_t>& layer_sizes,
                  const rbm::RbmTrainConfig& cfg);

// Per-layer tanh activations; result[i] is the output of layer i+1.
std::vector<Mat> forward(const DbnModel& m, const Mat& x);

// Loss and gradients of softmax cross-entropy (plus L2 on weights) for one
// batch; exposed so tests can difference it.
struct Gradients {
  std::vector<Layer> layers;
  SoftmaxHead softmax;
  double loss = 0.0;
};
Gradients loss_and_gradients(const DbnModel& m, const Mat& x, const std::vector<int>& labels,
                             double l2);

// Backpropagation over all layers plus the softmax head (attached zero-
// initialized if absent). Returns the per-epoch mean cross-entropy.
std::vector<double> fine_tune(DbnModel& m, const Mat& data, const std::vector<int>& labels,
                              int64_t n_classes, const FineTuneConfig& cfg);

struct Prediction {
  std::vector<int> labels;
  Mat probabilities;  // rows sum to 1, entries strictly inside (0, 1)
};
Prediction predict(const DbnModel& m, const Mat& x);

// Activations at the requested depth (1-based, <= depth()).
Mat hidden_features(const DbnModel& m, const Mat& x, int64_t depth);

void save_dbn(const DbnModel& m, const std::filesystem::path& path);
DbnModel load_dbn(const std::filesystem::path& path);

}  // namespace deepvox::dbn
