#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "matrix.hpp"
#include "rng.hpp"

namespace deepvox::rbm {

// Gaussian-visible, tanh-hidden restricted Boltzmann machine with energy
//   E(v,h) = sum_j (v_j - a_j)^2 / (2 sigma_j^2)
//          - sum_i b_i h_i - sum_ij (v_j / sigma_j) W_ji h_i
// Hidden units are +-1 spins whose conditional mean is tanh(.).
struct RbmParams {
  Mat W;       // V x H
  Vec a;       // visible biases, length V
  Vec b;       // hidden biases, length H
  Vec sigma;   // per-visible scale, length V, all > 0

  int64_t visible() const { return W.rows(); }
  int64_t hidden() const { return W.cols(); }
};

enum class HiddenSampling { spin, mean_field };

// Visible conditional used when reconstructing: Gaussian units for raw data,
// clipped-linear units when an upper DBN layer trains on tanh activations.
enum class VisibleUnits { gaussian, clipped };

struct RbmTrainConfig {
  double epsilon = 0.08;   // learning rate
  double lambda = 0.1;     // L1 weight decay coefficient
  int64_t batch_size = 5;
  int64_t epochs = 100;
  int64_t cd_steps = 1;
  uint64_t seed = 1;
  double momentum = 0.0;   // in [0, 1)
  HiddenSampling hidden_sampling = HiddenSampling::spin;
  VisibleUnits visible_units = VisibleUnits::gaussian;
};

struct TrainTrace {
  std::vector<double> recon_error;  // per-epoch MSE of one-step reconstruction
  std::vector<double> mean_abs_w;   // per-epoch mean |W|
  std::vector<std::string> warnings;
};

void validate(const RbmParams& p);
void validate(const RbmTrainConfig& cfg);

double energy(const Vec& v, const Vec& h, const RbmParams& p);

// tanh(b_i + sum_j (v_j/sigma_j) W_ji), strictly inside (-1, 1)
Vec hidden_mean(const Vec& v, const RbmParams& p);
Mat hidden_mean_batch(const Mat& v, const RbmParams& p);

// Spin sample: +1 with probability (1 + mean_i)/2, else -1.
Vec sample_hidden(const Vec& mean, Rng& rng);

// a_j + sigma_j sum_i W_ji h_i
Vec visible_mean(const Vec& h, const RbmParams& p);

// Adds N(0, sigma_j^2) noise to the conditional mean; `add_noise = false`
// returns the mean exactly (test hook).
Vec sample_visible(const Vec& mean, const RbmParams& p, Rng& rng, bool add_noise = true);

// Momentum state for train(); zero-initialized to the parameter shapes.
struct UpdateVelocity {
  Mat W;
  Vec a;
  Vec b;
};

// One CD step on a mini-batch (rows = samples). Updates p in place and
// returns the batch reconstruction MSE. Gradient statistics use conditional
// means in both phases; sampling (per cfg.hidden_sampling) only drives the
// reconstruction chain.
double cd1_update(const Mat& batch, RbmParams& p, const RbmTrainConfig& cfg, Rng& rng,
                  UpdateVelocity* velocity = nullptr);

struct TrainResult {
  RbmParams params;
  TrainTrace trace;
};

TrainResult train(const Mat& data, int64_t n_hidden, const RbmTrainConfig& cfg);

// Negates every weight column (and hidden bias) whose entries sum to a
// negative value. The model distribution is unchanged: tanh spins are
// sign-symmetric.
RbmParams flip_negative_fields(const RbmParams& p);

// Row t = hidden_mean(data row t); expects mean-removed data.
Mat feed_forward_timecourses(const Mat& data, const RbmParams& p);

// ---- exact inference, feasible only for small H (enumerates 2^H states) ----

struct RbmGradient {
  Mat W;
  Vec a;
  Vec b;
};

// Mean log-likelihood of the data rows under the model.
double exact_loglik(const Mat& data, const RbmParams& p);

// Exact gradient of the mean log-likelihood w.r.t. W, a, b.
RbmGradient exact_loglik_gradient(const Mat& data, const RbmParams& p);

void save_rbm(const RbmParams& p, const std::filesystem::path& path);
RbmParams load_rbm(const std::filesystem::path& path);

}  // namespace deepvox::rbm
