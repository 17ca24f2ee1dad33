#include <doctest.h>

#include <cmath>

#include "core/embed.hpp"
#include "core/error.hpp"
#include "core/rng.hpp"

using namespace deepvox;
using namespace deepvox::embed;

namespace {

Mat gaussian_points(int64_t n, int64_t d, uint64_t seed) {
  Rng rng(seed);
  Mat x(n, d);
  for (int64_t i = 0; i < x.size(); ++i) x.data()[i] = rng.normal();
  return x;
}

ReplicaMat rotate(const ReplicaMat& m, double angle) {
  Eigen::Matrix2d r;
  r << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
  return m * r.transpose();
}

// mean silhouette of a 2-cluster labeling
double silhouette(const Mat& pos, const std::vector<int>& labels) {
  const int64_t n = pos.rows();
  double total = 0.0;
  for (int64_t i = 0; i < n; ++i) {
    double same = 0.0, other = 0.0;
    int64_t same_n = 0, other_n = 0;
    for (int64_t j = 0; j < n; ++j) {
      if (j == i) continue;
      double d = (pos.row(i) - pos.row(j)).norm();
      if (labels[static_cast<size_t>(j)] == labels[static_cast<size_t>(i)]) {
        same += d;
        ++same_n;
      } else {
        other += d;
        ++other_n;
      }
    }
    double a = same / static_cast<double>(same_n);
    double b = other / static_cast<double>(other_n);
    total += (b - a) / std::max(a, b);
  }
  return total / static_cast<double>(n);
}

}  // namespace

TEST_CASE("build_constraints: hand-checked k-NN on collinear points") {
  Mat data(3, 1);
  data << 0.0, 1.0, 3.0;
  ConstraintGraph g = build_constraints(data, 1, ConstraintMode::exact_distance);
  CHECK(g.neighbors[0] == std::vector<int64_t>{1});
  CHECK(g.neighbors[1] == std::vector<int64_t>{0});
  CHECK(g.neighbors[2] == std::vector<int64_t>{1});
  // raw distances 1, 1, 2 -> median 1 -> targets 1, 1, 2
  CHECK(g.targets[0][0] == doctest::Approx(1.0));
  CHECK(g.targets[2][0] == doctest::Approx(2.0));
}

TEST_CASE("build_constraints: distance ties break toward the lower index") {
  Mat data(3, 1);
  data << 0.0, 1.0, -1.0;  // points 1 and 2 are equidistant from 0
  ConstraintGraph g = build_constraints(data, 1, ConstraintMode::exact_distance);
  CHECK(g.neighbors[0] == std::vector<int64_t>{1});
}

TEST_CASE("build_constraints: k saturates at n-1") {
  Mat data = gaussian_points(5, 3, 1);
  ConstraintGraph g = build_constraints(data, 10, ConstraintMode::exact_distance);
  for (const auto& nbrs : g.neighbors) CHECK(nbrs.size() == 4);
}

TEST_CASE("build_constraints: median target is 1 after scaling") {
  Mat data = gaussian_points(30, 4, 2);
  ConstraintGraph g = build_constraints(data, 3, ConstraintMode::exact_distance);
  std::vector<double> all;
  for (const auto& t : g.targets) all.insert(all.end(), t.begin(), t.end());
  std::sort(all.begin(), all.end());
  double median = 0.5 * (all[all.size() / 2] + all[(all.size() - 1) / 2]);
  CHECK(median == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("build_constraints: duplicate rows get the floor target") {
  Mat data(4, 2);
  data << 0.0, 0.0, 0.0, 0.0, 3.0, 0.0, 0.0, 4.0;
  ConstraintGraph g = build_constraints(data, 1, ConstraintMode::exact_distance);
  CHECK(g.targets[0][0] > 0.0);  // duplicate pair
  CHECK(g.targets[0][0] <= 1e-6);

  SUBCASE("cap mode stores the uniform radius") {
    ConstraintGraph c = build_constraints(data, 2, ConstraintMode::cap);
    for (const auto& t : c.targets)
      for (double v : t) CHECK(v == 1.0);
  }

  SUBCASE("fewer than two points rejected") {
    CHECK_THROWS_AS(build_constraints(Mat::Zero(1, 2), 1, ConstraintMode::exact_distance), Error);
  }
}

TEST_CASE("divide_project moves edges symmetrically onto the target") {
  Mat data(2, 1);
  data << 0.0, 2.0;
  ConstraintGraph g = build_constraints(data, 1, ConstraintMode::exact_distance);
  // both targets are 1 (median scaling of the single distance)
  Mat pos(2, 2);
  pos << 0.0, 0.0, 2.0, 0.0;
  ReplicaState s = make_state(g, pos);
  ReplicaMat out;
  divide_project(g, s, s.replicas, out);
  // constraint 0: center replica of point 0 at (0.5, 0), neighbor replica at (1.5, 0)
  CHECK(out(0, 0) == doctest::Approx(0.5));
  CHECK(out(0, 1) == doctest::Approx(0.0));
  CHECK(out(1, 0) == doctest::Approx(1.5));

  SUBCASE("already satisfied edges are fixed points, exactly") {
    Mat sat(2, 2);
    sat << 0.25, 0.0, 1.25, 0.0;  // distance exactly 1.0
    ReplicaState s2 = make_state(g, sat);
    ReplicaMat out2;
    divide_project(g, s2, s2.replicas, out2);
    CHECK(out2 == s2.replicas);
  }
  SUBCASE("cap mode leaves close pairs alone") {
    ConstraintGraph c = build_constraints(data, 1, ConstraintMode::cap);
    Mat close(2, 2);
    close << 0.0, 0.0, 0.5, 0.0;  // inside the unit cap
    ReplicaState s3 = make_state(c, close);
    ReplicaMat out3;
    divide_project(c, s3, s3.replicas, out3);
    CHECK(out3 == s3.replicas);
  }
  SUBCASE("coincident replicas separate deterministically") {
    Mat same(2, 2);
    same << 1.0, 1.0, 1.0, 1.0;
    ReplicaState s4 = make_state(g, same);
    ReplicaMat a, b;
    divide_project(g, s4, s4.replicas, a);
    divide_project(g, s4, s4.replicas, b);
    CHECK(a == b);
    CHECK((a.row(0) - a.row(1)).norm() == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("concur_project averages replicas per point") {
  Mat data(2, 1);
  data << 0.0, 2.0;
  ConstraintGraph g = build_constraints(data, 1, ConstraintMode::exact_distance);
  Mat pos(2, 2);
  pos << 0.0, 0.0, 2.0, 0.0;
  ReplicaState s = make_state(g, pos);
  // point 0 owns replica rows {0, 3}; move one of them
  s.replicas(3, 0) = 2.0;
  s.replicas(3, 1) = 2.0;
  ReplicaMat out;
  Mat consensus;
  concur_project(s, s.replicas, out, &consensus);
  CHECK(consensus(0, 0) == doctest::Approx(1.0));
  CHECK(consensus(0, 1) == doctest::Approx(1.0));
  CHECK(out.row(0) == out.row(3));

  SUBCASE("equal replicas are a fixed point") {
    ReplicaState s2 = make_state(g, pos);
    ReplicaMat out2;
    concur_project(s2, s2.replicas, out2);
    CHECK(out2 == s2.replicas);
  }
}

TEST_CASE("difference_map_step follows the hand-worked two-point instance") {
  // two points, k = 1, targets 1; replicas start consistent at distance 2
  Mat data(2, 1);
  data << 0.0, 2.0;
  ConstraintGraph g = build_constraints(data, 1, ConstraintMode::exact_distance);
  Mat pos(2, 2);
  pos << 0.0, 0.0, 2.0, 0.0;
  ReplicaState s = make_state(g, pos);

  StepDebug dbg;
  double residual = difference_map_step(s, g, 0.5, &dbg);

  // with beta = 1/2: x_c has point 0 at (1.5, 0) and point 1 at (0.5, 0);
  // x_d is the plain divide projection; the update lands on the solution
  CHECK(dbg.x_c(0, 0) == doctest::Approx(1.5).epsilon(1e-14));
  CHECK(dbg.x_c(1, 0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(dbg.x_d(0, 0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(dbg.x_d(1, 0) == doctest::Approx(1.5).epsilon(1e-14));
  CHECK(residual == doctest::Approx(0.70710678118654757).epsilon(1e-14));

  Mat consensus;
  ReplicaMat settled;
  concur_project(s, s.replicas, settled, &consensus);
  CHECK(consensus(0, 0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(consensus(1, 0) == doctest::Approx(1.5).epsilon(1e-14));

  SUBCASE("next step is an exact fixed point") {
    double r2 = difference_map_step(s, g, 0.5);
    CHECK(r2 == 0.0);
  }
}

TEST_CASE("a constraint-satisfying state yields exactly zero update") {
  // integer coordinates and beta = 1/2 keep every operation exact in floats
  Mat data(4, 2);
  data << 0.0, 0.0, 1.0, 0.0, 0.0, 1.0, 1.0, 1.0;
  ConstraintGraph g = build_constraints(data, 2, ConstraintMode::exact_distance);
  // the input is its own embedding; unit square edges have lengths 1 and 1
  // (median 1), so targets equal the realized distances bit for bit
  ReplicaState s = make_state(g, data);
  ReplicaMat before = s.replicas;
  double residual = difference_map_step(s, g, 0.5);
  CHECK(residual == 0.0);
  CHECK(s.replicas == before);
}

TEST_CASE("residual is invariant under global translation") {
  Mat data = gaussian_points(12, 3, 5);
  ConstraintGraph g = build_constraints(data, 3, ConstraintMode::exact_distance);
  Mat pos = gaussian_points(12, 2, 6);
  ReplicaState s1 = make_state(g, pos);
  Mat shifted = pos;
  shifted.col(0).array() += 13.5;
  shifted.col(1).array() -= 4.25;
  ReplicaState s2 = make_state(g, shifted);
  double r1 = difference_map_step(s1, g, 0.9);
  double r2 = difference_map_step(s2, g, 0.9);
  CHECK(r1 == doctest::Approx(r2).epsilon(1e-10));
}

TEST_CASE("difference map step is rotation-equivariant") {
  Mat data = gaussian_points(10, 4, 7);
  ConstraintGraph g = build_constraints(data, 2, ConstraintMode::exact_distance);
  Mat pos = gaussian_points(10, 2, 8);
  ReplicaState plain = make_state(g, pos);
  ReplicaState turned = make_state(g, pos);
  turned.replicas = rotate(turned.replicas, 0.7);

  difference_map_step(plain, g, 0.9);
  difference_map_step(turned, g, 0.9);
  ReplicaMat expected = rotate(plain.replicas, 0.7);
  CHECK((turned.replicas - expected).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("detect_oscillation") {
  SUBCASE("strictly decreasing trace is not oscillation") {
    std::vector<double> trace;
    for (int i = 0; i < 20; ++i) trace.push_back(10.0 - static_cast<double>(i) * 0.4);
    CHECK(!detect_oscillation(trace, 5, 1e-6));
  }
  SUBCASE("periodic trace is oscillation") {
    std::vector<double> trace;
    for (int i = 0; i < 24; ++i) trace.push_back(1.0 + 0.5 * ((i % 3) == 0));
    CHECK(detect_oscillation(trace, 6, 1e-6));
  }
  SUBCASE("short trace gives no verdict") {
    std::vector<double> trace{3.0, 3.0, 3.0};
    CHECK(!detect_oscillation(trace, 2, 1e-6));
  }
}

TEST_CASE("embed finds an existing 2-D solution") {
  Mat truth = gaussian_points(40, 2, 11);
  EmbedConfig cfg;
  cfg.k = 4;
  cfg.max_iters = 2000;
  cfg.tol = 1e-7;
  EmbedResult res = embed(truth, cfg);
  CHECK(res.status == EmbedStatus::converged);
  CHECK(res.residual_trace.back() < 1e-6);
}

TEST_CASE("embed is bit-for-bit deterministic") {
  Mat data = gaussian_points(25, 6, 13);
  EmbedConfig cfg;
  cfg.k = 4;
  cfg.max_iters = 60;
  EmbedResult a = embed(data, cfg);
  EmbedResult b = embed(data, cfg);
  CHECK(a.positions == b.positions);
  CHECK(a.residual_trace == b.residual_trace);
  CHECK(a.status == b.status);
}

TEST_CASE("translating the input leaves the constraint graph unchanged") {
  Mat data = gaussian_points(15, 5, 17);
  Mat shifted = data;
  shifted.array() += 42.0;
  ConstraintGraph g1 = build_constraints(data, 3, ConstraintMode::exact_distance);
  ConstraintGraph g2 = build_constraints(shifted, 3, ConstraintMode::exact_distance);
  CHECK(g1.neighbors == g2.neighbors);
  for (size_t i = 0; i < g1.targets.size(); ++i)
    for (size_t t = 0; t < g1.targets[i].size(); ++t)
      CHECK(g1.targets[i][t] == doctest::Approx(g2.targets[i][t]).epsilon(1e-9));
}

TEST_CASE("two planted clusters separate in the map") {
  Rng rng(19);
  const int64_t per = 20, d = 50;
  Mat data(2 * per, d);
  std::vector<int> labels;
  for (int64_t i = 0; i < 2 * per; ++i) {
    int cls = i < per ? 0 : 1;
    labels.push_back(cls);
    for (int64_t j = 0; j < d; ++j)
      data(i, j) = (cls == 0 ? -3.0 : 3.0) * (j < 5 ? 1.0 : 0.0) + rng.normal();
  }
  EmbedConfig cfg;
  cfg.k = 6;
  cfg.max_iters = 300;
  EmbedResult res = embed(data, cfg);
  CHECK(silhouette(res.positions, labels) >= 0.5);
}

TEST_CASE("two initializations agree up to a rigid transform (reported)") {
  Mat truth = gaussian_points(30, 2, 23);
  EmbedConfig cfg;
  cfg.k = 3;
  cfg.max_iters = 3000;
  cfg.tol = 1e-9;
  EmbedResult a = embed(truth, cfg);
  Mat other_init = gaussian_points(30, 2, 24);
  EmbedResult b = embed_with_init(truth, cfg, other_init);

  // orthogonal Procrustes after centering; reported, not asserted
  Mat pa = a.positions.rowwise() - a.positions.colwise().mean();
  Mat pb = b.positions.rowwise() - b.positions.colwise().mean();
  Eigen::JacobiSVD<Eigen::Matrix2d> svd(Eigen::Matrix2d(pb.transpose() * pa),
                                        Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::Matrix2d rot = svd.matrixU() * svd.matrixV().transpose();
  double rel = (pb * rot - pa).norm() / pa.norm();
  CHECK(std::isfinite(rel));
  MESSAGE("procrustes relative residual between inits: ", rel,
          " (status a=", static_cast<int>(a.status), " b=", static_cast<int>(b.status), ")");
}

TEST_CASE("oscillation scores are reported per point") {
  Mat data = gaussian_points(20, 8, 29);
  EmbedConfig cfg;
  cfg.k = 4;
  cfg.max_iters = 80;
  cfg.osc_window = 10;
  EmbedResult res = embed(data, cfg);
  REQUIRE(res.oscillation_score.size() == 20);
  for (double s : res.oscillation_score) CHECK(s >= 0.0);
}

TEST_CASE("config validation") {
  EmbedConfig cfg;
  cfg.k = 0;
  CHECK_THROWS_AS(validate(cfg), Error);
  cfg.k = 1;
  cfg.beta = 0.0;
  CHECK_THROWS_AS(validate(cfg), Error);
  cfg.beta = 0.9;
  cfg.osc_window = 1;
  CHECK_THROWS_AS(validate(cfg), Error);
}
