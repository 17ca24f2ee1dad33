#include "eval.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <limits>
#include <map>

#include "error.hpp"
#include "rng.hpp"

namespace deepvox::eval {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

PcaResult pca_baseline(const Mat& data, int64_t n_components) {
  if (n_components < 1 || n_components > std::min(data.rows(), data.cols()))
    raise(ErrorCode::invalid_argument, "n_components must lie in [1, min(rows, cols)]");
  Eigen::BDCSVD<Mat> svd(data, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& s = svd.singularValues();
  if (s[0] <= 0.0 || s[n_components - 1] < 1e-12 * s[0])
    raise(ErrorCode::numeric, "input rank is below the requested ", n_components, " components");

  PcaResult res;
  res.components.resize(n_components, data.cols());
  res.projections.resize(data.rows(), n_components);
  for (int64_t c = 0; c < n_components; ++c) {
    Vec dir = svd.matrixV().col(c);
    int64_t arg = 0;
    for (int64_t j = 1; j < dir.size(); ++j)
      if (std::abs(dir[j]) > std::abs(dir[arg])) arg = j;
    double sign = dir[arg] < 0.0 ? -1.0 : 1.0;
    res.components.row(c) = sign * dir.transpose();
    res.projections.col(c) = sign * s[c] * svd.matrixU().col(c);
  }
  return res;
}

double pearson(const Eigen::Ref<const Vec>& x, const Eigen::Ref<const Vec>& y) {
  if (x.size() != y.size()) raise(ErrorCode::dimension_mismatch, "pearson: length mismatch");
  const double n = static_cast<double>(x.size());
  double mx = x.mean(), my = y.mean();
  Vec dx = x.array() - mx;
  Vec dy = y.array() - my;
  double sx = dx.squaredNorm() / n, sy = dy.squaredNorm() / n;
  if (sx <= 0.0 || sy <= 0.0) return 0.0;
  return dx.dot(dy) / (n * std::sqrt(sx * sy));
}

namespace {

// Kuhn-Munkres with potentials, O(n^3); returns, per column, the assigned
// row (or -1). Requires rows <= cols.
std::vector<int64_t> hungarian_min(const Mat& cost) {
  const int64_t n = cost.rows(), m = cost.cols();
  std::vector<double> u(static_cast<size_t>(n + 1), 0.0), v(static_cast<size_t>(m + 1), 0.0);
  std::vector<int64_t> p(static_cast<size_t>(m + 1), 0), way(static_cast<size_t>(m + 1), 0);
  for (int64_t i = 1; i <= n; ++i) {
    p[0] = i;
    int64_t j0 = 0;
    std::vector<double> minv(static_cast<size_t>(m + 1), kInf);
    std::vector<char> used(static_cast<size_t>(m + 1), 0);
    do {
      used[static_cast<size_t>(j0)] = 1;
      int64_t i0 = p[static_cast<size_t>(j0)], j1 = 0;
      double delta = kInf;
      for (int64_t j = 1; j <= m; ++j) {
        if (used[static_cast<size_t>(j)]) continue;
        double cur = cost(i0 - 1, j - 1) - u[static_cast<size_t>(i0)] - v[static_cast<size_t>(j)];
        if (cur < minv[static_cast<size_t>(j)]) {
          minv[static_cast<size_t>(j)] = cur;
          way[static_cast<size_t>(j)] = j0;
        }
        if (minv[static_cast<size_t>(j)] < delta) {
          delta = minv[static_cast<size_t>(j)];
          j1 = j;
        }
      }
      for (int64_t j = 0; j <= m; ++j) {
        if (used[static_cast<size_t>(j)]) {
          u[static_cast<size_t>(p[static_cast<size_t>(j)])] += delta;
          v[static_cast<size_t>(j)] -= delta;
        } else {
          minv[static_cast<size_t>(j)] -= delta;
        }
      }
      j0 = j1;
    } while (p[static_cast<size_t>(j0)] != 0);
    do {
      int64_t j1 = way[static_cast<size_t>(j0)];
      p[static_cast<size_t>(j0)] = p[static_cast<size_t>(j1)];
      j0 = j1;
    } while (j0);
  }
  std::vector<int64_t> row_of_col(static_cast<size_t>(m), -1);
  for (int64_t j = 1; j <= m; ++j) row_of_col[static_cast<size_t>(j - 1)] = p[static_cast<size_t>(j)] - 1;
  return row_of_col;
}

}  // namespace

MatchResult match_components(const Mat& est, const Mat& gt) {
  if (est.cols() != gt.cols())
    raise(ErrorCode::dimension_mismatch, "component feature counts differ: ", est.cols(), " vs ",
          gt.cols());
  const int64_t re = est.rows(), rg = gt.rows();

  Mat corr(re, rg);
  for (int64_t i = 0; i < re; ++i)
    for (int64_t j = 0; j < rg; ++j)
      corr(i, j) = pearson(est.row(i).transpose(), gt.row(j).transpose());

  // minimize -|r| with est on the short side
  MatchResult res;
  if (re <= rg) {
    auto row_of_col = hungarian_min(-corr.cwiseAbs());
    for (int64_t j = 0; j < rg; ++j)
      if (row_of_col[static_cast<size_t>(j)] >= 0) {
        res.est_index.push_back(row_of_col[static_cast<size_t>(j)]);
        res.gt_index.push_back(j);
      }
  } else {
    Mat t = (-corr.cwiseAbs()).transpose();
    auto col_of_row = hungarian_min(t);
    for (int64_t j = 0; j < re; ++j)
      if (col_of_row[static_cast<size_t>(j)] >= 0) {
        res.est_index.push_back(j);
        res.gt_index.push_back(col_of_row[static_cast<size_t>(j)]);
      }
  }

  // order pairs by estimated index
  std::vector<size_t> order(res.est_index.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](size_t a, size_t b) { return res.est_index[a] < res.est_index[b]; });
  MatchResult sorted;
  double total = 0.0;
  for (size_t i : order) {
    double r = corr(res.est_index[i], res.gt_index[i]);
    sorted.est_index.push_back(res.est_index[i]);
    sorted.gt_index.push_back(res.gt_index[i]);
    sorted.signs.push_back(r < 0.0 ? -1.0 : 1.0);
    sorted.abs_corr.push_back(std::abs(r));
    total += std::abs(r);
  }
  sorted.mean_sm_corr = sorted.abs_corr.empty() ? 0.0 : total / static_cast<double>(sorted.abs_corr.size());
  return sorted;
}

MatchResult match_with_timecourses(const Mat& est_sm, const Mat& gt_sm, const Mat& est_tc,
                                   const Mat& gt_tc) {
  if (est_tc.cols() != est_sm.rows() || gt_tc.cols() != gt_sm.rows())
    raise(ErrorCode::dimension_mismatch, "time-course column counts must match component counts");
  if (est_tc.rows() != gt_tc.rows())
    raise(ErrorCode::dimension_mismatch, "time-course lengths differ");
  MatchResult res = match_components(est_sm, gt_sm);
  double total = 0.0;
  for (size_t p = 0; p < res.est_index.size(); ++p) {
    double r = pearson(est_tc.col(res.est_index[p]), gt_tc.col(res.gt_index[p]));
    total += std::abs(r);
  }
  res.mean_tc_corr = res.est_index.empty() ? 0.0 : total / static_cast<double>(res.est_index.size());
  return res;
}

Mat fnc(const Mat& tc) {
  if (tc.rows() < 3) raise(ErrorCode::invalid_argument, "fnc needs at least 3 timepoints");
  const int64_t r = tc.cols();
  Mat out = Mat::Identity(r, r);
  for (int64_t i = 0; i < r; ++i)
    for (int64_t j = i + 1; j < r; ++j) {
      double c = pearson(tc.col(i), tc.col(j));
      out(i, j) = c;
      out(j, i) = c;
    }
  return out;
}

double modularity_q(const Mat& corr, const std::vector<int64_t>& labels) {
  const int64_t n = corr.rows();
  if (corr.cols() != n) raise(ErrorCode::dimension_mismatch, "correlation matrix must be square");
  if (static_cast<int64_t>(labels.size()) != n)
    raise(ErrorCode::dimension_mismatch, "label count must match node count");

  double v_pos = 0.0, v_neg = 0.0;
  Vec s_pos = Vec::Zero(n), s_neg = Vec::Zero(n);
  for (int64_t i = 0; i < n; ++i)
    for (int64_t j = 0; j < n; ++j) {
      if (i == j) continue;
      double w = corr(i, j);
      if (w > 0.0) {
        v_pos += w;
        s_pos[i] += w;
      } else if (w < 0.0) {
        v_neg += -w;
        s_neg[i] += -w;
      }
    }

  auto q_part = [&](double v, const Vec& s, bool positive) {
    if (v <= 0.0) return 0.0;
    std::map<int64_t, double> strength;
    double internal = 0.0;
    for (int64_t i = 0; i < n; ++i) {
      strength[labels[static_cast<size_t>(i)]] += s[i];
      for (int64_t j = 0; j < n; ++j) {
        if (i == j || labels[static_cast<size_t>(i)] != labels[static_cast<size_t>(j)]) continue;
        double w = corr(i, j);
        if (positive && w > 0.0) internal += w;
        if (!positive && w < 0.0) internal += -w;
      }
    }
    double null_term = 0.0;
    for (const auto& [c, sc] : strength) null_term += sc * sc / v;
    return (internal - null_term) / v;
  };

  double q_pos = q_part(v_pos, s_pos, true);
  double q_neg = q_part(v_neg, s_neg, false);
  if (v_pos + v_neg <= 0.0) return 0.0;
  return q_pos - v_neg / (v_pos + v_neg) * q_neg;
}

ModularityResult modularity(const Mat& corr) {
  const int64_t n = corr.rows();
  if (corr.cols() != n) raise(ErrorCode::dimension_mismatch, "correlation matrix must be square");
  if ((corr - corr.transpose()).cwiseAbs().maxCoeff() > 1e-9)
    raise(ErrorCode::invalid_argument, "correlation matrix must be symmetric");

  // community-pair sums of positive / negative weight (one direction),
  // maintained through merges
  Mat d_pos = corr.cwiseMax(0.0), d_neg = (-corr).cwiseMax(0.0);
  for (int64_t i = 0; i < n; ++i) d_pos(i, i) = d_neg(i, i) = 0.0;
  double v_pos = d_pos.sum(), v_neg = d_neg.sum();
  Vec s_pos = d_pos.rowwise().sum(), s_neg = d_neg.rowwise().sum();

  std::vector<int64_t> member(static_cast<size_t>(n));  // community of each node
  for (int64_t i = 0; i < n; ++i) member[static_cast<size_t>(i)] = i;
  std::vector<char> alive(static_cast<size_t>(n), 1);

  if (v_pos > 0.0) {
    for (;;) {
      double best = 0.0;
      int64_t best_c = -1, best_d = -1;
      for (int64_t c = 0; c < n; ++c) {
        if (!alive[static_cast<size_t>(c)]) continue;
        for (int64_t d = c + 1; d < n; ++d) {
          if (!alive[static_cast<size_t>(d)] || d_pos(c, d) <= 0.0) continue;
          double dq = (2.0 * d_pos(c, d) - 2.0 * s_pos[c] * s_pos[d] / v_pos) / v_pos;
          if (v_neg > 0.0)
            dq -= (2.0 * d_neg(c, d) - 2.0 * s_neg[c] * s_neg[d] / v_neg) / (v_pos + v_neg);
          if (dq > best) {
            best = dq;
            best_c = c;
            best_d = d;
          }
        }
      }
      if (best_c < 0) break;
      // merge best_d into best_c
      for (int64_t e = 0; e < n; ++e) {
        if (!alive[static_cast<size_t>(e)] || e == best_c || e == best_d) continue;
        d_pos(best_c, e) += d_pos(best_d, e);
        d_pos(e, best_c) = d_pos(best_c, e);
        d_neg(best_c, e) += d_neg(best_d, e);
        d_neg(e, best_c) = d_neg(best_c, e);
      }
      s_pos[best_c] += s_pos[best_d];
      s_neg[best_c] += s_neg[best_d];
      alive[static_cast<size_t>(best_d)] = 0;
      for (auto& m : member)
        if (m == best_d) m = best_c;
    }
  }

  // relabel by first appearance
  ModularityResult res;
  res.labels.resize(static_cast<size_t>(n));
  std::map<int64_t, int64_t> remap;
  for (int64_t i = 0; i < n; ++i) {
    auto [it, inserted] = remap.emplace(member[static_cast<size_t>(i)],
                                        static_cast<int64_t>(remap.size()));
    res.labels[static_cast<size_t>(i)] = it->second;
  }
  res.q = modularity_q(corr, res.labels);
  return res;
}

TTestResult paired_t_test(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) raise(ErrorCode::dimension_mismatch, "paired t-test needs equal lengths");
  if (x.size() < 2) raise(ErrorCode::invalid_argument, "paired t-test needs at least 2 pairs");
  const double n = static_cast<double>(x.size());
  double mean = 0.0;
  for (size_t i = 0; i < x.size(); ++i) mean += x[i] - y[i];
  mean /= n;
  double ss = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    double d = x[i] - y[i] - mean;
    ss += d * d;
  }
  double var = ss / (n - 1.0);
  if (var <= 0.0) raise(ErrorCode::numeric, "paired t-test: difference variance is zero");

  TTestResult res;
  res.t = mean / std::sqrt(var / n);
  boost::math::students_t dist(n - 1.0);
  res.p = 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(res.t)));
  return res;
}

FoldPlan kfold_split(const std::vector<int>& labels, int64_t folds, uint64_t seed) {
  if (folds < 1) raise(ErrorCode::invalid_argument, "folds must be at least 1");
  if (folds > static_cast<int64_t>(labels.size()))
    raise(ErrorCode::invalid_argument, "folds exceed sample count");

  std::map<int, std::vector<int64_t>> by_class;
  for (size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(static_cast<int64_t>(i));

  FoldPlan plan;
  plan.folds = folds;
  plan.fold_of.assign(labels.size(), 0);
  Rng rng(seed);
  int64_t cursor = 0;
  for (auto& [cls, indices] : by_class) {
    rng.shuffle(indices);
    for (int64_t idx : indices) {
      plan.fold_of[static_cast<size_t>(idx)] = static_cast<int>(cursor % folds);
      ++cursor;
    }
  }
  return plan;
}

double macro_f_score(const std::vector<int>& pred, const std::vector<int>& truth) {
  if (pred.size() != truth.size()) raise(ErrorCode::dimension_mismatch, "prediction/truth length mismatch");
  if (pred.empty()) raise(ErrorCode::invalid_argument, "macro_f_score: empty input");

  std::map<int, std::array<int64_t, 3>> counts;  // class -> {tp, fp, fn}
  for (size_t i = 0; i < pred.size(); ++i) {
    counts.emplace(pred[i], std::array<int64_t, 3>{0, 0, 0});
    counts.emplace(truth[i], std::array<int64_t, 3>{0, 0, 0});
    if (pred[i] == truth[i]) {
      counts[pred[i]][0]++;
    } else {
      counts[pred[i]][1]++;
      counts[truth[i]][2]++;
    }
  }
  double sum = 0.0;
  for (const auto& [cls, c] : counts) {
    double precision = c[0] + c[1] > 0 ? static_cast<double>(c[0]) / static_cast<double>(c[0] + c[1]) : 0.0;
    double recall = c[0] + c[2] > 0 ? static_cast<double>(c[0]) / static_cast<double>(c[0] + c[2]) : 0.0;
    if (precision + recall > 0.0) sum += 2.0 * precision * recall / (precision + recall);
  }
  return sum / static_cast<double>(counts.size());
}

std::vector<int> knn_classify(const Mat& train, const std::vector<int>& train_labels,
                              const Mat& test, int64_t k) {
  if (train.rows() < 1) raise(ErrorCode::invalid_argument, "knn: empty training set");
  if (static_cast<int64_t>(train_labels.size()) != train.rows())
    raise(ErrorCode::dimension_mismatch, "knn: label count mismatch");
  if (k < 1 || k > train.rows()) raise(ErrorCode::invalid_argument, "knn: k must lie in [1, train rows]");
  if (test.cols() != train.cols()) raise(ErrorCode::dimension_mismatch, "knn: feature width mismatch");

  std::vector<int> out(static_cast<size_t>(test.rows()));
  std::vector<std::pair<double, int64_t>> dist(static_cast<size_t>(train.rows()));
  for (int64_t t = 0; t < test.rows(); ++t) {
    for (int64_t i = 0; i < train.rows(); ++i)
      dist[static_cast<size_t>(i)] = {(test.row(t) - train.row(i)).norm(), i};
    std::partial_sort(dist.begin(), dist.begin() + k, dist.end());
    std::map<int, int64_t> votes;
    for (int64_t i = 0; i < k; ++i) votes[train_labels[static_cast<size_t>(dist[static_cast<size_t>(i)].second)]]++;
    int best_class = votes.begin()->first;
    int64_t best_votes = votes.begin()->second;
    for (const auto& [cls, v] : votes)
      if (v > best_votes) {
        best_class = cls;
        best_votes = v;
      }
    out[static_cast<size_t>(t)] = best_class;
  }
  return out;
}

LogRegGradient logreg_loss_and_gradient(const LogRegModel& m, const Mat& data,
                                        const std::vector<int>& labels, double l2) {
  const int64_t n = data.rows();
  const int64_t classes = m.W.cols();
  if (data.cols() != m.W.rows()) raise(ErrorCode::dimension_mismatch, "logreg: feature width mismatch");
  if (static_cast<int64_t>(labels.size()) != n)
    raise(ErrorCode::dimension_mismatch, "logreg: label count mismatch");

  Mat logits = (data * m.W).rowwise() + m.b.transpose();
  Mat probs(n, classes);
  double loss = 0.0;
  for (int64_t r = 0; r < n; ++r) {
    double mx = logits.row(r).maxCoeff();
    double sum = 0.0;
    for (int64_t c = 0; c < classes; ++c) {
      probs(r, c) = std::exp(logits(r, c) - mx);
      sum += probs(r, c);
    }
    probs.row(r) /= sum;
    loss -= std::log(std::max(probs(r, labels[static_cast<size_t>(r)]), 1e-300));
  }
  loss /= static_cast<double>(n);

  Mat dl = probs;
  for (int64_t r = 0; r < n; ++r) dl(r, labels[static_cast<size_t>(r)]) -= 1.0;
  dl /= static_cast<double>(n);

  LogRegGradient g;
  g.W = data.transpose() * dl + l2 * m.W;
  g.b = dl.colwise().sum().transpose();
  g.loss = loss + 0.5 * l2 * m.W.squaredNorm();
  return g;
}

LogRegModel logreg_train(const Mat& data, const std::vector<int>& labels, int64_t n_classes,
                         const LogRegConfig& cfg, std::vector<double>* loss_trace) {
  if (n_classes < 2) raise(ErrorCode::invalid_argument, "logreg needs at least 2 classes");
  if (cfg.learning_rate <= 0.0 || cfg.iters < 1)
    raise(ErrorCode::invalid_argument, "logreg config out of range");
  for (int label : labels)
    if (label < 0 || label >= n_classes) raise(ErrorCode::invalid_argument, "label out of range");

  LogRegModel m{Mat::Zero(data.cols(), n_classes), Vec::Zero(n_classes)};
  LogRegGradient g = logreg_loss_and_gradient(m, data, labels, cfg.l2);
  if (loss_trace) loss_trace->push_back(g.loss);

  double lr = cfg.learning_rate;
  for (int64_t it = 0; it < cfg.iters; ++it) {
    bool accepted = false;
    for (int attempt = 0; attempt < 60; ++attempt) {
      LogRegModel trial{m.W - lr * g.W, m.b - lr * g.b};
      LogRegGradient tg = logreg_loss_and_gradient(trial, data, labels, cfg.l2);
      if (tg.loss <= g.loss) {
        m = std::move(trial);
        g = std::move(tg);
        accepted = true;
        break;
      }
      lr *= 0.5;
    }
    if (!accepted) break;  // no descent direction left at this precision
    if (loss_trace) loss_trace->push_back(g.loss);
  }
  return m;
}

std::vector<int> logreg_predict(const LogRegModel& m, const Mat& data) {
  if (data.cols() != m.W.rows()) raise(ErrorCode::dimension_mismatch, "logreg: feature width mismatch");
  Mat logits = (data * m.W).rowwise() + m.b.transpose();
  std::vector<int> out(static_cast<size_t>(data.rows()));
  for (int64_t r = 0; r < data.rows(); ++r) {
    int best = 0;
    for (int64_t c = 1; c < logits.cols(); ++c)
      if (logits(r, c) > logits(r, best)) best = static_cast<int>(c);
    out[static_cast<size_t>(r)] = best;
  }
  return out;
}

namespace {

Mat take_rows(const Mat& m, const std::vector<int64_t>& rows) {
  Mat out(static_cast<int64_t>(rows.size()), m.cols());
  for (size_t i = 0; i < rows.size(); ++i) out.row(static_cast<int64_t>(i)) = m.row(rows[i]);
  return out;
}

}  // namespace

std::vector<DepthExperimentRow> depth_experiment(const Mat& data, const std::vector<int>& labels,
                                                 const DepthExperimentConfig& cfg) {
  if (cfg.layer_sizes.empty()) raise(ErrorCode::invalid_argument, "depth_experiment: no layers");
  int n_classes = 0;
  for (int label : labels) n_classes = std::max(n_classes, label + 1);
  if (n_classes < 2) raise(ErrorCode::invalid_argument, "depth_experiment needs at least 2 classes");

  const int64_t depths = static_cast<int64_t>(cfg.layer_sizes.size());
  FoldPlan plan = kfold_split(labels, cfg.folds, mix_seed(cfg.seed, 0));

  // scores[depth][classifier] -> per-fold macro F (classifier 0 = LR, 1 = KNN)
  std::vector<std::array<std::vector<double>, 2>> scores(static_cast<size_t>(depths + 1));

  for (int64_t fold = 0; fold < cfg.folds; ++fold) {
    std::vector<int64_t> train_idx, test_idx;
    for (size_t i = 0; i < labels.size(); ++i)
      (plan.fold_of[i] == fold ? test_idx : train_idx).push_back(static_cast<int64_t>(i));
    if (train_idx.empty() || test_idx.empty())
      raise(ErrorCode::invalid_argument, "fold ", fold, " leaves an empty split");

    Mat x_train = take_rows(data, train_idx);
    Mat x_test = take_rows(data, test_idx);
    std::vector<int> y_train, y_test;
    for (int64_t i : train_idx) y_train.push_back(labels[static_cast<size_t>(i)]);
    for (int64_t i : test_idx) y_test.push_back(labels[static_cast<size_t>(i)]);

    auto score_both = [&](int64_t depth, const Mat& ftr, const Mat& fte) {
      LogRegModel lr = logreg_train(ftr, y_train, n_classes, cfg.logreg);
      scores[static_cast<size_t>(depth)][0].push_back(macro_f_score(logreg_predict(lr, fte), y_test));
      int64_t k = std::min(cfg.knn_k, ftr.rows());
      scores[static_cast<size_t>(depth)][1].push_back(
          macro_f_score(knn_classify(ftr, y_train, fte, k), y_test));
    };

    score_both(0, x_train, x_test);

    rbm::RbmTrainConfig rbm_cfg = cfg.rbm;
    rbm_cfg.seed = mix_seed(cfg.seed, 1000 + static_cast<uint64_t>(fold));
    dbn::DbnModel full = dbn::pretrain(x_train, cfg.layer_sizes, rbm_cfg);

    for (int64_t depth = 1; depth <= depths; ++depth) {
      dbn::DbnModel model;
      model.layers.assign(full.layers.begin(), full.layers.begin() + depth);
      dbn::FineTuneConfig ft_cfg = cfg.fine_tune;
      ft_cfg.seed = mix_seed(cfg.seed, 2000 + 16 * static_cast<uint64_t>(fold) + static_cast<uint64_t>(depth));
      dbn::fine_tune(model, x_train, y_train, n_classes, ft_cfg);
      score_both(depth, dbn::hidden_features(model, x_train, depth),
                 dbn::hidden_features(model, x_test, depth));
    }
  }

  std::vector<DepthExperimentRow> rows;
  for (int64_t depth = 0; depth <= depths; ++depth)
    for (int c = 0; c < 2; ++c) {
      const auto& f = scores[static_cast<size_t>(depth)][static_cast<size_t>(c)];
      DepthExperimentRow row;
      row.depth = depth;
      row.classifier = c == 0 ? "LR" : "KNN";
      double mean = 0.0;
      for (double v : f) mean += v;
      mean /= static_cast<double>(f.size());
      double ss = 0.0;
      for (double v : f) ss += (v - mean) * (v - mean);
      row.mean_f = mean;
      row.sd_f = f.size() > 1 ? std::sqrt(ss / static_cast<double>(f.size() - 1)) : 0.0;
      rows.push_back(std::move(row));
    }
  return rows;
}

}  // namespace deepvox::eval
