#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dbn.hpp"
#include "matrix.hpp"
#include "rbm.hpp"

namespace deepvox::eval {

struct PcaResult {
  Mat components;   // n_components x cols, orthonormal rows
  Mat projections;  // rows x n_components
};

// Uncentered PCA (plain SVD of the data); callers pass mean-removed data.
// Component signs are fixed by making the largest-magnitude coordinate
// positive.
PcaResult pca_baseline(const Mat& data, int64_t n_components);

// Pearson correlation with a zero-variance guard (r := 0).
double pearson(const Eigen::Ref<const Vec>& x, const Eigen::Ref<const Vec>& y);

struct MatchResult {
  std::vector<int64_t> est_index;   // matched pairs, est_index[p] <-> gt_index[p]
  std::vector<int64_t> gt_index;
  std::vector<double> signs;        // +-1, sign of the matched correlation
  std::vector<double> abs_corr;     // |r| per pair
  double mean_sm_corr = 0.0;
  double mean_tc_corr = -1.0;       // filled by match_with_timecourses
};

// Assignment of estimated to ground-truth components maximizing the total
// |Pearson r| between rows (Hungarian algorithm).
MatchResult match_components(const Mat& est, const Mat& gt);

// SM-based matching, then TC correlations evaluated pair-wise under the same
// assignment (columns of the T x R time-course matrices).
MatchResult match_with_timecourses(const Mat& est_sm, const Mat& gt_sm, const Mat& est_tc,
                                   const Mat& gt_tc);

// Cross-correlation of time-course columns: symmetric, unit diagonal,
// zero-variance columns zeroed off-diagonal.
Mat fnc(const Mat& tc);

struct ModularityResult {
  double q = 0.0;
  std::vector<int64_t> labels;  // community per node, relabeled 0..C-1 by first appearance
};

// Greedy agglomerative maximization on the positive-weight graph (diagonal
// excluded); Q uses the signed formulation where positive and negative
// contributions are normalized separately (Rubinov-Sporns Q*).
ModularityResult modularity(const Mat& corr);

double modularity_q(const Mat& corr, const std::vector<int64_t>& labels);

struct TTestResult {
  double t = 0.0;
  double p = 1.0;  // two-sided
};
TTestResult paired_t_test(const std::vector<double>& x, const std::vector<double>& y);

struct FoldPlan {
  std::vector<int> fold_of;  // per sample
  int64_t folds = 0;
};

// Class-balanced folds: per-class seeded shuffle, then round-robin.
FoldPlan kfold_split(const std::vector<int>& labels, int64_t folds, uint64_t seed);

// Unweighted mean over classes of 2PR/(P+R); a class with P + R = 0 scores 0.
double macro_f_score(const std::vector<int>& pred, const std::vector<int>& truth);

// Majority vote among the k Euclidean-nearest training rows; distance ties
// break toward the lower index, vote ties toward the lower class.
std::vector<int> knn_classify(const Mat& train, const std::vector<int>& train_labels,
                              const Mat& test, int64_t k);

struct LogRegConfig {
  double learning_rate = 0.5;
  int64_t iters = 500;
  double l2 = 1e-4;
};

struct LogRegModel {
  Mat W;  // features x classes
  Vec b;
};

struct LogRegGradient {
  Mat W;
  Vec b;
  double loss = 0.0;
};

LogRegGradient logreg_loss_and_gradient(const LogRegModel& m, const Mat& data,
                                        const std::vector<int>& labels, double l2);

// Multinomial fit by full-batch gradient descent from zero init; the step is
// halved whenever it would increase the loss, so the loss trace is
// non-increasing.
LogRegModel logreg_train(const Mat& data, const std::vector<int>& labels, int64_t n_classes,
                         const LogRegConfig& cfg, std::vector<double>* loss_trace = nullptr);

std::vector<int> logreg_predict(const LogRegModel& m, const Mat& data);

struct DepthExperimentConfig {
  std::vector<int64_t> layer_sizes{50, 50, 100};
  rbm::RbmTrainConfig rbm;
  dbn::FineTuneConfig fine_tune;
  LogRegConfig logreg;
  int64_t folds = 10;
  int64_t knn_k = 5;
  uint64_t seed = 1;
};

struct DepthExperimentRow {
  int64_t depth = 0;  // 0 = raw data
  std::string classifier;
  double mean_f = 0.0;
  double sd_f = 0.0;
};

// Cross-validated depth-versus-F-score protocol: per fold, pretrain on the
// training split, fine-tune one model per depth, classify test-split hidden
// features with LR and KNN; the raw rows classify the untransformed data.
std::vector<DepthExperimentRow> depth_experiment(const Mat& data, const std::vector<int>& labels,
                                                 const DepthExperimentConfig& cfg);

}  // namespace deepvox::eval
