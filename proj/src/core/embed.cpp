#include "embed.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>

#include "error.hpp"
#include "rng.hpp"

namespace deepvox::embed {

namespace {

constexpr double kCoincidentFloor = 1e-12;  // replica separations below this count as coincident
constexpr double kTargetFloor = 1e-6;       // target for duplicate input rows, after scaling

// Fixed integer mix of an edge's endpoint indices; drives the deterministic
// separation direction for coincident replicas.
double hash_angle(int64_t i, int64_t j) {
  uint64_t h = mix_seed(static_cast<uint64_t>(i) + 1, static_cast<uint64_t>(j) + 1);
  return 2.0 * M_PI * static_cast<double>(h & 0xffffffffULL) / 4294967296.0;
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  double hi = v[mid];
  if (v.size() % 2 == 1) return hi;
  double lo = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lo + hi);
}

// Symmetric projection of one edge onto its constraint set. Writes the new
// endpoint positions; identity when the edge is already satisfied.
inline void project_edge(ConstraintMode mode, double target, int64_t pi, int64_t pj,
                         const Eigen::RowVector2d& a, const Eigen::RowVector2d& b,
                         Eigen::RowVector2d& a_out, Eigen::RowVector2d& b_out) {
  Eigen::RowVector2d u = b - a;
  double r = u.norm();
  if (r == target || (mode == ConstraintMode::cap && r <= target)) {
    a_out = a;
    b_out = b;
    return;
  }
  Eigen::RowVector2d dir;
  if (r < kCoincidentFloor) {
    double angle = hash_angle(pi, pj);
    dir << std::cos(angle), std::sin(angle);
  } else {
    dir = u / r;
  }
  Eigen::RowVector2d mid = 0.5 * (a + b);
  a_out = mid - 0.5 * target * dir;
  b_out = mid + 0.5 * target * dir;
}

}  // namespace

void validate(const EmbedConfig& cfg) {
  if (cfg.k < 1) raise(ErrorCode::invalid_argument, "k must be at least 1");
  if (cfg.beta == 0.0) raise(ErrorCode::invalid_argument, "beta must be nonzero");
  if (cfg.max_iters < 1) raise(ErrorCode::invalid_argument, "max_iters must be at least 1");
  if (cfg.tol <= 0.0) raise(ErrorCode::invalid_argument, "tol must be positive");
  if (cfg.osc_window < 2) raise(ErrorCode::invalid_argument, "osc_window must be at least 2");
}

ConstraintGraph build_constraints(const Mat& data, int64_t k, ConstraintMode mode) {
  const int64_t n = data.rows();
  if (n < 2) raise(ErrorCode::invalid_argument, "need at least 2 points, got ", n);
  if (k < 1) raise(ErrorCode::invalid_argument, "k must be at least 1");

  ConstraintGraph g;
  g.n = n;
  g.mode = mode;
  g.neighbors.resize(static_cast<size_t>(n));
  g.targets.resize(static_cast<size_t>(n));

  const int64_t kk = std::min(k, n - 1);
  std::vector<std::pair<double, int64_t>> dist(static_cast<size_t>(n));
  for (int64_t i = 0; i < n; ++i) {
    for (int64_t j = 0; j < n; ++j)
      dist[static_cast<size_t>(j)] = {j == i ? std::numeric_limits<double>::infinity()
                                             : (data.row(i) - data.row(j)).norm(),
                                      j};
    // ties break toward the lower index
    std::partial_sort(dist.begin(), dist.begin() + kk, dist.end());
    auto& nbrs = g.neighbors[static_cast<size_t>(i)];
    auto& tgts = g.targets[static_cast<size_t>(i)];
    nbrs.reserve(static_cast<size_t>(kk));
    tgts.reserve(static_cast<size_t>(kk));
    for (int64_t t = 0; t < kk; ++t) {
      nbrs.push_back(dist[static_cast<size_t>(t)].second);
      tgts.push_back(dist[static_cast<size_t>(t)].first);
    }
  }

  std::vector<double> all;
  for (const auto& tgts : g.targets) all.insert(all.end(), tgts.begin(), tgts.end());
  double med = median(all);
  if (med <= 0.0) {
    std::vector<double> nonzero;
    for (double d : all)
      if (d > 0.0) nonzero.push_back(d);
    if (nonzero.empty()) raise(ErrorCode::numeric, "all pairwise neighbor distances are zero");
    med = median(nonzero);
  }
  for (auto& tgts : g.targets)
    for (double& d : tgts) {
      if (mode == ConstraintMode::cap) {
        d = 1.0;  // uniform cap radius after scaling
      } else {
        d /= med;
        if (d <= 0.0) d = kTargetFloor;
      }
    }
  return g;
}

ReplicaState make_state(const ConstraintGraph& g, const Mat& positions) {
  if (positions.rows() != g.n || positions.cols() != 2)
    raise(ErrorCode::dimension_mismatch, "positions must be n x 2");
  ReplicaState s;
  s.offset.resize(static_cast<size_t>(g.n));
  s.point_replicas.resize(static_cast<size_t>(g.n));
  int64_t total = 0;
  for (int64_t i = 0; i < g.n; ++i) {
    s.offset[static_cast<size_t>(i)] = total;
    total += 1 + static_cast<int64_t>(g.neighbors[static_cast<size_t>(i)].size());
  }
  s.replicas.resize(total, 2);
  for (int64_t i = 0; i < g.n; ++i) {
    int64_t base = s.offset[static_cast<size_t>(i)];
    s.replicas.row(base) = positions.row(i);
    s.point_replicas[static_cast<size_t>(i)].push_back(base);
    const auto& nbrs = g.neighbors[static_cast<size_t>(i)];
    for (size_t t = 0; t < nbrs.size(); ++t) {
      int64_t row = base + 1 + static_cast<int64_t>(t);
      s.replicas.row(row) = positions.row(nbrs[t]);
      s.point_replicas[static_cast<size_t>(nbrs[t])].push_back(row);
    }
  }
  return s;
}

void divide_project(const ConstraintGraph& g, const ReplicaState& layout, const ReplicaMat& in,
                    ReplicaMat& out) {
  out.resize(in.rows(), 2);
  Eigen::RowVector2d a_new, b_new;
  for (int64_t i = 0; i < g.n; ++i) {
    const int64_t base = layout.offset[static_cast<size_t>(i)];
    const auto& nbrs = g.neighbors[static_cast<size_t>(i)];
    const auto& tgts = g.targets[static_cast<size_t>(i)];
    Eigen::RowVector2d center = in.row(base);
    Eigen::RowVector2d center_sum(0.0, 0.0);
    for (size_t t = 0; t < nbrs.size(); ++t) {
      int64_t row = base + 1 + static_cast<int64_t>(t);
      project_edge(g.mode, tgts[t], i, nbrs[t], center, in.row(row), a_new, b_new);
      center_sum += a_new;
      out.row(row) = b_new;
    }
    out.row(base) = center_sum / static_cast<double>(nbrs.size());
  }
}

void concur_project(const ReplicaState& layout, const ReplicaMat& in, ReplicaMat& out,
                    Mat* consensus) {
  out.resize(in.rows(), 2);
  if (consensus) consensus->resize(static_cast<int64_t>(layout.point_replicas.size()), 2);
  for (size_t p = 0; p < layout.point_replicas.size(); ++p) {
    const auto& rows = layout.point_replicas[p];
    Eigen::RowVector2d sum(0.0, 0.0);
    for (int64_t r : rows) sum += in.row(r);
    Eigen::RowVector2d mean = sum / static_cast<double>(rows.size());
    for (int64_t r : rows) out.row(r) = mean;
    if (consensus) consensus->row(static_cast<int64_t>(p)) = mean;
  }
}

double difference_map_step(ReplicaState& state, const ConstraintGraph& g, double beta,
                           StepDebug* debug) {
  if (beta == 0.0) raise(ErrorCode::invalid_argument, "beta must be nonzero");
  const double inv_beta = 1.0 / beta;

  ReplicaMat pd_x, pc_x, arg, x_c, x_d;
  divide_project(g, state, state.replicas, pd_x);
  concur_project(state, state.replicas, pc_x);

  arg = (1.0 + inv_beta) * pd_x - inv_beta * state.replicas;
  concur_project(state, arg, x_c);

  arg = (1.0 - inv_beta) * pc_x + inv_beta * state.replicas;
  divide_project(g, state, arg, x_d);

  ReplicaMat diff = x_c - x_d;
  state.replicas += beta * diff;
  double residual = std::sqrt(diff.squaredNorm() / static_cast<double>(diff.size()));
  state.residual_trace.push_back(residual);
  if (debug) {
    debug->x_c = std::move(x_c);
    debug->x_d = std::move(x_d);
  }
  return residual;
}

bool detect_oscillation(const std::vector<double>& trace, int64_t window, double tol) {
  if (window < 2) raise(ErrorCode::invalid_argument, "window must be at least 2");
  if (static_cast<int64_t>(trace.size()) < 2 * window) return false;
  auto last_begin = trace.end() - static_cast<std::ptrdiff_t>(window);
  auto prev_begin = trace.end() - static_cast<std::ptrdiff_t>(2 * window);
  double min_last = *std::min_element(last_begin, trace.end());
  double min_prev = *std::min_element(prev_begin, last_begin);
  return min_prev - min_last <= tol;
}

Mat pca2_init(const Mat& data, uint64_t seed) {
  const int64_t n = data.rows();
  const int64_t d = data.cols();
  Mat centered = data.rowwise() - data.colwise().mean();
  Mat cov = centered.transpose() * centered / static_cast<double>(n);

  constexpr int kPowerIters = 100;
  Rng rng(seed);
  Mat dirs(d, 2);
  for (int64_t c = 0; c < 2; ++c) {
    Vec v(d);
    for (int64_t j = 0; j < d; ++j) v[j] = rng.normal();
    for (int it = 0; it < kPowerIters; ++it) {
      if (c == 1) v -= dirs.col(0) * dirs.col(0).dot(v);
      v = cov * v;
      double norm = v.norm();
      if (norm > 0.0)
        v /= norm;
      else
        v.setZero();
    }
    if (c == 1) {
      v -= dirs.col(0) * dirs.col(0).dot(v);
      double norm = v.norm();
      if (norm > 0.0) v /= norm;
    }
    // deterministic sign: largest-magnitude coordinate positive
    int64_t arg = 0;
    for (int64_t j = 1; j < d; ++j)
      if (std::abs(v[j]) > std::abs(v[arg])) arg = j;
    if (v[arg] < 0.0) v = -v;
    dirs.col(c) = v;
  }
  return centered * dirs;
}

namespace {

// Per-iteration aggregates for the oscillation score: replica count, sum and
// squared-coordinate sum per point.
struct WindowEntry {
  std::vector<double> sum_x, sum_y, sum_sq;
};

EmbedResult run(const Mat& data, const EmbedConfig& cfg, const Mat& init) {
  ConstraintGraph g = build_constraints(data, cfg.k, cfg.mode);

  // rescale the start so its median edge length matches the unit target scale
  Mat positions = init;
  {
    std::vector<double> edges;
    for (int64_t i = 0; i < g.n; ++i)
      for (int64_t j : g.neighbors[static_cast<size_t>(i)])
        edges.push_back((positions.row(i) - positions.row(j)).norm());
    double med = median(edges);
    if (med > 0.0) positions /= med;
  }

  ReplicaState state = make_state(g, positions);
  std::deque<WindowEntry> window;
  const size_t n = static_cast<size_t>(g.n);

  EmbedResult res;
  res.status = EmbedStatus::max_iters;
  for (int64_t iter = 0; iter < cfg.max_iters; ++iter) {
    double residual = difference_map_step(state, g, cfg.beta);

    WindowEntry entry;
    entry.sum_x.assign(n, 0.0);
    entry.sum_y.assign(n, 0.0);
    entry.sum_sq.assign(n, 0.0);
    for (size_t p = 0; p < n; ++p)
      for (int64_t r : state.point_replicas[p]) {
        entry.sum_x[p] += state.replicas(r, 0);
        entry.sum_y[p] += state.replicas(r, 1);
        entry.sum_sq[p] += state.replicas.row(r).squaredNorm();
      }
    window.push_back(std::move(entry));
    if (static_cast<int64_t>(window.size()) > cfg.osc_window) window.pop_front();

    res.iterations = iter + 1;
    if (residual < cfg.tol) {
      res.status = EmbedStatus::converged;
      break;
    }
    if (detect_oscillation(state.residual_trace, cfg.osc_window, cfg.tol)) {
      res.status = EmbedStatus::oscillating;
      break;
    }
  }

  ReplicaMat settled;
  concur_project(state, state.replicas, settled, &res.positions);
  res.residual_trace = std::move(state.residual_trace);

  res.oscillation_score.assign(n, 0.0);
  for (size_t p = 0; p < n; ++p) {
    double count = 0.0, sx = 0.0, sy = 0.0, sq = 0.0;
    for (const auto& entry : window) {
      sx += entry.sum_x[p];
      sy += entry.sum_y[p];
      sq += entry.sum_sq[p];
    }
    count = static_cast<double>(window.size() * state.point_replicas[p].size());
    double mx = sx / count, my = sy / count;
    res.oscillation_score[p] = std::max(0.0, sq / count - (mx * mx + my * my));
  }
  return res;
}

}  // namespace

EmbedResult embed(const Mat& data, const EmbedConfig& cfg) {
  validate(cfg);
  if (data.rows() < 2) raise(ErrorCode::invalid_argument, "need at least 2 points");
  return run(data, cfg, pca2_init(data, cfg.seed));
}

EmbedResult embed_with_init(const Mat& data, const EmbedConfig& cfg, const Mat& init_positions) {
  validate(cfg);
  if (data.rows() < 2) raise(ErrorCode::invalid_argument, "need at least 2 points");
  if (init_positions.rows() != data.rows() || init_positions.cols() != 2)
    raise(ErrorCode::dimension_mismatch, "init must be n x 2");
  return run(data, cfg, init_positions);
}

}  // namespace deepvox::embed
