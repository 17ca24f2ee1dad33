#include <doctest.h>

#include <cmath>

#include "core/dbn.hpp"
#include "core/error.hpp"
#include "core/rng.hpp"
#include "test_util.hpp"

using namespace deepvox;
using namespace deepvox::dbn;

namespace {

DbnModel make_model(const std::vector<int64_t>& widths, uint64_t seed, bool with_softmax,
                    int64_t classes = 2) {
  Rng rng(seed);
  DbnModel m;
  for (size_t i = 0; i + 1 < widths.size(); ++i) {
    Layer l;
    l.W.resize(widths[i], widths[i + 1]);
    for (int64_t j = 0; j < l.W.size(); ++j) l.W.data()[j] = 0.4 * rng.normal();
    l.b.resize(widths[i + 1]);
    for (int64_t j = 0; j < l.b.size(); ++j) l.b[j] = 0.2 * rng.normal();
    m.layers.push_back(std::move(l));
  }
  if (with_softmax) {
    SoftmaxHead head;
    head.W.resize(widths.back(), classes);
    for (int64_t j = 0; j < head.W.size(); ++j) head.W.data()[j] = 0.4 * rng.normal();
    head.b.resize(classes);
    for (int64_t j = 0; j < classes; ++j) head.b[j] = 0.2 * rng.normal();
    m.softmax = std::move(head);
  }
  return m;
}

Mat gaussian_data(int64_t n, int64_t d, uint64_t seed) {
  Rng rng(seed);
  Mat x(n, d);
  for (int64_t i = 0; i < x.size(); ++i) x.data()[i] = rng.normal();
  return x;
}

// two linearly separable point clouds in 2-D
void separable_toy(Mat& x, std::vector<int>& y, int64_t per_class, uint64_t seed) {
  Rng rng(seed);
  x.resize(2 * per_class, 2);
  y.clear();
  for (int64_t i = 0; i < 2 * per_class; ++i) {
    int cls = i < per_class ? 0 : 1;
    double shift = cls == 0 ? -2.0 : 2.0;
    x(i, 0) = shift + 0.3 * rng.normal();
    x(i, 1) = 0.3 * rng.normal();
    y.push_back(cls);
  }
}

}  // namespace

TEST_CASE("forward activations") {
  SUBCASE("zero parameters give zero activations at every depth") {
    DbnModel m = make_model({4, 3, 2}, 1, false);
    for (auto& l : m.layers) {
      l.W.setZero();
      l.b.setZero();
    }
    auto acts = forward(m, gaussian_data(5, 4, 2));
    for (const auto& a : acts) CHECK(a.cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("activations stay inside (-1, 1) and shapes chain") {
    DbnModel m = make_model({4, 6, 3}, 3, false);
    Mat x = gaussian_data(7, 4, 4);
    auto acts = forward(m, x);
    REQUIRE(acts.size() == 2);
    CHECK(acts[0].rows() == 7);
    CHECK(acts[0].cols() == 6);
    CHECK(acts[1].cols() == 3);
    CHECK((acts[1].cwiseAbs().array() < 1.0).all());
  }
  SUBCASE("single-sample input keeps one row") {
    DbnModel m = make_model({4, 3}, 5, false);
    auto acts = forward(m, gaussian_data(1, 4, 6));
    CHECK(acts[0].rows() == 1);
  }
  SUBCASE("width mismatch rejected") {
    DbnModel m = make_model({4, 3}, 7, false);
    CHECK_THROWS_AS(forward(m, gaussian_data(2, 5, 8)), Error);
  }
}

TEST_CASE("pretrain") {
  Mat data = gaussian_data(40, 10, 11);
  rbm::RbmTrainConfig cfg;
  cfg.epochs = 5;
  cfg.seed = 12;

  SUBCASE("returned widths equal the requested layer sizes") {
    DbnModel m = pretrain(data, {7, 5, 9}, cfg);
    REQUIRE(m.depth() == 3);
    CHECK(m.layers[0].W.rows() == 10);
    CHECK(m.layers[0].W.cols() == 7);
    CHECK(m.layers[1].W.cols() == 5);
    CHECK(m.layers[2].W.cols() == 9);
    CHECK(!m.softmax.has_value());
  }
  SUBCASE("single layer matches a plain RBM run") {
    rbm::RbmTrainConfig layer_cfg = cfg;
    layer_cfg.seed = mix_seed(cfg.seed, 0);
    auto direct = rbm::train(data, 7, layer_cfg);
    DbnModel m = pretrain(data, {7}, cfg);
    CHECK(m.layers[0].W == direct.params.W);
    CHECK(m.layers[0].b == direct.params.b);
  }
  SUBCASE("deterministic under the seed") {
    DbnModel m1 = pretrain(data, {6, 4}, cfg);
    DbnModel m2 = pretrain(data, {6, 4}, cfg);
    CHECK(m1.layers[1].W == m2.layers[1].W);
  }
}

TEST_CASE("backprop gradients match finite differences for every parameter group") {
  DbnModel m = make_model({3, 4, 3}, 21, true, 3);
  Mat x = gaussian_data(4, 3, 22);
  std::vector<int> y{0, 2, 1, 2};
  const double l2 = 0.01;

  Gradients g = loss_and_gradients(m, x, y, l2);

  const double delta = 1e-6;
  auto fd_at = [&](double* slot) {
    double orig = *slot;
    *slot = orig + delta;
    double up = loss_and_gradients(m, x, y, l2).loss;
    *slot = orig - delta;
    double down = loss_and_gradients(m, x, y, l2).loss;
    *slot = orig;
    return (up - down) / (2.0 * delta);
  };

  auto check_group = [&](double* base, int64_t count, const double* analytic) {
    double num = 0.0, den = 0.0;
    for (int64_t i = 0; i < count; ++i) {
      double fd = fd_at(base + i);
      num += (analytic[i] - fd) * (analytic[i] - fd);
      den += fd * fd;
    }
    CHECK(std::sqrt(num) / std::max(std::sqrt(den), 1e-12) < 1e-4);
  };

  for (size_t i = 0; i < m.layers.size(); ++i) {
    check_group(m.layers[i].W.data(), m.layers[i].W.size(), g.layers[i].W.data());
    check_group(m.layers[i].b.data(), m.layers[i].b.size(), g.layers[i].b.data());
  }
  check_group(m.softmax->W.data(), m.softmax->W.size(), g.softmax.W.data());
  check_group(m.softmax->b.data(), m.softmax->b.size(), g.softmax.b.data());
}

TEST_CASE("fine_tune fits a separable toy problem") {
  Mat x;
  std::vector<int> y;
  separable_toy(x, y, 15, 31);

  rbm::RbmTrainConfig pre_cfg;
  pre_cfg.epochs = 10;
  pre_cfg.seed = 32;
  DbnModel m = pretrain(x, {4}, pre_cfg);

  FineTuneConfig cfg;
  cfg.epochs = 200;
  cfg.seed = 33;
  auto trace = fine_tune(m, x, y, 2, cfg);
  REQUIRE(trace.size() == 200);
  CHECK(trace.back() < trace.front());

  auto pred = predict(m, x);
  int64_t correct = 0;
  for (size_t i = 0; i < y.size(); ++i) correct += pred.labels[i] == y[i] ? 1 : 0;
  CHECK(correct == static_cast<int64_t>(y.size()));

  SUBCASE("deterministic") {
    DbnModel m2 = pretrain(x, {4}, pre_cfg);
    fine_tune(m2, x, y, 2, cfg);
    CHECK(m2.layers[0].W == m.layers[0].W);
    CHECK(m2.softmax->W == m.softmax->W);
  }
  SUBCASE("zero epochs rejected") {
    FineTuneConfig bad = cfg;
    bad.epochs = 0;
    CHECK_THROWS_AS(fine_tune(m, x, y, 2, bad), Error);
  }
  SUBCASE("label out of range rejected") {
    std::vector<int> bad_labels = y;
    bad_labels[0] = 2;
    CHECK_THROWS_AS(fine_tune(m, x, bad_labels, 2, cfg), Error);
  }
}

TEST_CASE("predict") {
  SUBCASE("zero softmax gives uniform probabilities and class 0") {
    DbnModel m = make_model({3, 2}, 41, true, 2);
    m.softmax->W.setZero();
    m.softmax->b.setZero();
    auto pred = predict(m, gaussian_data(5, 3, 42));
    for (int64_t r = 0; r < 5; ++r) {
      CHECK(pred.probabilities(r, 0) == doctest::Approx(0.5).epsilon(1e-12));
      CHECK(pred.labels[static_cast<size_t>(r)] == 0);
    }
  }
  SUBCASE("constant logit shifts leave probabilities unchanged") {
    DbnModel m = make_model({3, 4}, 43, true, 3);
    Mat x = gaussian_data(6, 3, 44);
    auto before = predict(m, x);
    m.softmax->b.array() += 7.5;
    auto after = predict(m, x);
    CHECK((before.probabilities - after.probabilities).cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("rows sum to one with entries strictly inside (0, 1)") {
    DbnModel m = make_model({3, 4}, 45, true, 4);
    auto pred = predict(m, gaussian_data(8, 3, 46));
    for (int64_t r = 0; r < 8; ++r) {
      CHECK(std::abs(pred.probabilities.row(r).sum() - 1.0) < 1e-9);
      for (int64_t c = 0; c < 4; ++c) {
        CHECK(pred.probabilities(r, c) > 0.0);
        CHECK(pred.probabilities(r, c) < 1.0);
      }
    }
  }
  SUBCASE("missing softmax head rejected") {
    DbnModel m = make_model({3, 2}, 47, false);
    CHECK_THROWS_AS(predict(m, gaussian_data(2, 3, 48)), Error);
  }
}

TEST_CASE("hidden_features") {
  DbnModel m = make_model({5, 4, 3, 6}, 51, false);
  Mat x = gaussian_data(9, 5, 52);
  auto acts = forward(m, x);

  CHECK(hidden_features(m, x, 1) == acts[0]);
  CHECK(hidden_features(m, x, 3) == acts[2]);
  CHECK(hidden_features(m, x, 3).cols() == 6);
  CHECK_THROWS_AS(hidden_features(m, x, 0), Error);
  CHECK_THROWS_AS(hidden_features(m, x, 4), Error);

  // identical input rows produce identical feature rows
  Mat dup(2, 5);
  dup.row(0) = x.row(0);
  dup.row(1) = x.row(0);
  Mat f = hidden_features(m, dup, 2);
  CHECK(f.row(0) == f.row(1));
}

TEST_CASE("DBN model files round trip") {
  TempDir tmp;
  DbnModel m = make_model({5, 4, 3}, 61, true, 3);
  save_dbn(m, tmp.path("m.dvdbn"));
  DbnModel back = load_dbn(tmp.path("m.dvdbn"));
  CHECK(back.depth() == 2);
  CHECK(back.input_width() == 5);
  REQUIRE(back.softmax.has_value());
  CHECK(back.softmax->W.cols() == 3);
  for (int64_t i = 0; i < m.layers[0].W.size(); ++i)
    CHECK(back.layers[0].W.data()[i] ==
          static_cast<double>(static_cast<float>(m.layers[0].W.data()[i])));

  SUBCASE("headless model round trips too") {
    DbnModel plain = make_model({4, 2}, 62, false);
    save_dbn(plain, tmp.path("p.dvdbn"));
    CHECK(!load_dbn(tmp.path("p.dvdbn")).softmax.has_value());
  }
}
