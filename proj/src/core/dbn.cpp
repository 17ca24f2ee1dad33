#include "dbn.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "error.hpp"
#include "rng.hpp"

namespace deepvox::dbn {

namespace {

double bounded_tanh(double z) {
  double t = std::tanh(z);
  double lim = std::nextafter(1.0, 0.0);
  if (t > lim) return lim;
  if (t < -lim) return -lim;
  return t;
}

Mat softmax_rows(const Mat& logits) {
  Mat p(logits.rows(), logits.cols());
  for (int64_t r = 0; r < logits.rows(); ++r) {
    double mx = logits.row(r).maxCoeff();
    double sum = 0.0;
    for (int64_t c = 0; c < logits.cols(); ++c) {
      double e = std::exp(logits(r, c) - mx);
      p(r, c) = e;
      sum += e;
    }
    for (int64_t c = 0; c < logits.cols(); ++c) p(r, c) = std::max(p(r, c) / sum, 1e-300);
    p.row(r) /= p.row(r).sum();
  }
  return p;
}

void check_labels(const std::vector<int>& labels, int64_t n_rows, int64_t n_classes) {
  if (static_cast<int64_t>(labels.size()) != n_rows)
    raise(ErrorCode::dimension_mismatch, "label count ", labels.size(), " != sample count ", n_rows);
  for (int label : labels)
    if (label < 0 || label >= n_classes)
      raise(ErrorCode::invalid_argument, "label ", label, " out of range [0, ", n_classes, ")");
}

}  // namespace

void validate(const DbnModel& m) {
  if (m.layers.empty()) raise(ErrorCode::invalid_argument, "DBN needs at least one layer");
  for (size_t i = 0; i < m.layers.size(); ++i) {
    const Layer& l = m.layers[i];
    if (l.W.rows() < 1 || l.W.cols() < 1 || l.b.size() != l.W.cols())
      raise(ErrorCode::dimension_mismatch, "layer ", i + 1, " has inconsistent shapes");
    if (!l.W.allFinite() || !l.b.allFinite())
      raise(ErrorCode::non_finite, "layer ", i + 1, " contains non-finite values");
    if (i > 0 && m.layers[i - 1].W.cols() != l.W.rows())
      raise(ErrorCode::dimension_mismatch, "layer widths do not chain at layer ", i + 1);
  }
  if (m.softmax) {
    if (m.softmax->W.rows() != m.top_width() || m.softmax->W.cols() < 2 ||
        m.softmax->b.size() != m.softmax->W.cols())
      raise(ErrorCode::dimension_mismatch, "softmax head has inconsistent shapes");
    if (!m.softmax->W.allFinite() || !m.softmax->b.allFinite())
      raise(ErrorCode::non_finite, "softmax head contains non-finite values");
  }
}

void validate(const FineTuneConfig& cfg) {
  if (cfg.learning_rate <= 0.0) raise(ErrorCode::invalid_argument, "learning_rate must be positive");
  if (cfg.epochs < 1) raise(ErrorCode::invalid_argument, "epochs must be at least 1");
  if (cfg.batch_size < 1) raise(ErrorCode::invalid_argument, "batch_size must be at least 1");
  if (cfg.l2 < 0.0) raise(ErrorCode::invalid_argument, "l2 must be nonnegative");
}

DbnModel pretrain(const Mat& data, const std::vector<int64_t>& layer_sizes,
                  const rbm::RbmTrainConfig& cfg) {
  if (layer_sizes.empty()) raise(ErrorCode::invalid_argument, "pretrain: no layer sizes given");
  rbm::validate(cfg);

  DbnModel m;
  Mat input = data;
  for (size_t i = 0; i < layer_sizes.size(); ++i) {
    rbm::RbmTrainConfig layer_cfg = cfg;
    layer_cfg.seed = mix_seed(cfg.seed, static_cast<uint64_t>(i));
    layer_cfg.visible_units = i == 0 ? rbm::VisibleUnits::gaussian : rbm::VisibleUnits::clipped;
    auto trained = rbm::train(input, layer_sizes[i], layer_cfg);
    m.layers.push_back(Layer{trained.params.W, trained.params.b});
    if (i + 1 < layer_sizes.size()) input = rbm::hidden_mean_batch(input, trained.params);
  }
  validate(m);
  return m;
}

std::vector<Mat> forward(const DbnModel& m, const Mat& x) {
  validate(m);
  if (x.cols() != m.input_width())
    raise(ErrorCode::dimension_mismatch, "forward: input width ", x.cols(), " != ", m.input_width());
  std::vector<Mat> acts;
  acts.reserve(m.layers.size());
  const Mat* prev = &x;
  for (const Layer& l : m.layers) {
    Mat z = (*prev * l.W).rowwise() + l.b.transpose();
    acts.push_back(z.unaryExpr([](double v) { return bounded_tanh(v); }));
    prev = &acts.back();
  }
  return acts;
}

Gradients loss_and_gradients(const DbnModel& m, const Mat& x, const std::vector<int>& labels,
                             double l2) {
  if (!m.softmax) raise(ErrorCode::invalid_argument, "model has no softmax head");
  const int64_t n = x.rows();
  const int64_t classes = m.softmax->W.cols();
  check_labels(labels, n, classes);

  std::vector<Mat> acts = forward(m, x);
  const Mat& top = acts.back();
  Mat logits = (top * m.softmax->W).rowwise() + m.softmax->b.transpose();
  Mat probs = softmax_rows(logits);

  Gradients g;
  g.loss = 0.0;
  for (int64_t r = 0; r < n; ++r) g.loss -= std::log(probs(r, labels[static_cast<size_t>(r)]));
  g.loss /= static_cast<double>(n);

  Mat dlogits = probs;
  for (int64_t r = 0; r < n; ++r) dlogits(r, labels[static_cast<size_t>(r)]) -= 1.0;
  dlogits /= static_cast<double>(n);

  g.softmax.W = top.transpose() * dlogits;
  g.softmax.b = dlogits.colwise().sum().transpose();
  if (l2 > 0.0) {
    g.loss += 0.5 * l2 * m.softmax->W.squaredNorm();
    g.softmax.W += l2 * m.softmax->W;
  }

  g.layers.resize(m.layers.size());
  Mat dact = dlogits * m.softmax->W.transpose();
  for (size_t i = m.layers.size(); i-- > 0;) {
    const Mat& a = acts[i];
    Mat dz = dact.array() * (1.0 - a.array().square());
    const Mat& below = i == 0 ? x : acts[i - 1];
    g.layers[i].W = below.transpose() * dz;
    g.layers[i].b = dz.colwise().sum().transpose();
    if (l2 > 0.0) {
      g.loss += 0.5 * l2 * m.layers[i].W.squaredNorm();
      g.layers[i].W += l2 * m.layers[i].W;
    }
    if (i > 0) dact = dz * m.layers[i].W.transpose();
  }
  return g;
}

std::vector<double> fine_tune(DbnModel& m, const Mat& data, const std::vector<int>& labels,
                              int64_t n_classes, const FineTuneConfig& cfg) {
  validate(m);
  validate(cfg);
  if (n_classes < 2) raise(ErrorCode::invalid_argument, "need at least 2 classes");
  check_labels(labels, data.rows(), n_classes);
  if (!m.softmax) m.softmax = SoftmaxHead{Mat::Zero(m.top_width(), n_classes), Vec::Zero(n_classes)};
  else if (m.softmax->W.cols() != n_classes)
    raise(ErrorCode::dimension_mismatch, "existing softmax head has ", m.softmax->W.cols(),
          " classes, expected ", n_classes);

  std::vector<int64_t> order(static_cast<size_t>(data.rows()));
  for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int64_t>(i);

  std::vector<double> epoch_loss;
  epoch_loss.reserve(static_cast<size_t>(cfg.epochs));
  for (int64_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    Rng epoch_rng(mix_seed(cfg.seed, static_cast<uint64_t>(epoch)));
    epoch_rng.shuffle(order);
    double loss_sum = 0.0;
    for (int64_t start = 0; start < data.rows(); start += cfg.batch_size) {
      int64_t len = std::min(cfg.batch_size, data.rows() - start);
      Mat batch(len, data.cols());
      std::vector<int> batch_labels(static_cast<size_t>(len));
      for (int64_t r = 0; r < len; ++r) {
        int64_t src = order[static_cast<size_t>(start + r)];
        batch.row(r) = data.row(src);
        batch_labels[static_cast<size_t>(r)] = labels[static_cast<size_t>(src)];
      }
      Gradients g = loss_and_gradients(m, batch, batch_labels, cfg.l2);
      for (size_t i = 0; i < m.layers.size(); ++i) {
        m.layers[i].W -= cfg.learning_rate * g.layers[i].W;
        m.layers[i].b -= cfg.learning_rate * g.layers[i].b;
      }
      m.softmax->W -= cfg.learning_rate * g.softmax.W;
      m.softmax->b -= cfg.learning_rate * g.softmax.b;
      loss_sum += g.loss * static_cast<double>(len);
    }
    epoch_loss.push_back(loss_sum / static_cast<double>(data.rows()));
  }
  return epoch_loss;
}

Prediction predict(const DbnModel& m, const Mat& x) {
  validate(m);
  if (!m.softmax) raise(ErrorCode::invalid_argument, "predict: model has no softmax head");
  Mat top = forward(m, x).back();
  Mat logits = (top * m.softmax->W).rowwise() + m.softmax->b.transpose();
  Prediction pred;
  pred.probabilities = softmax_rows(logits);
  pred.labels.resize(static_cast<size_t>(x.rows()));
  for (int64_t r = 0; r < x.rows(); ++r) {
    int best = 0;
    for (int64_t c = 1; c < pred.probabilities.cols(); ++c)
      if (pred.probabilities(r, c) > pred.probabilities(r, best)) best = static_cast<int>(c);
    pred.labels[static_cast<size_t>(r)] = best;
  }
  return pred;
}

Mat hidden_features(const DbnModel& m, const Mat& x, int64_t depth) {
  if (depth < 1 || depth > m.depth())
    raise(ErrorCode::invalid_argument, "depth ", depth, " out of range [1, ", m.depth(), "]");
  return forward(m, x)[static_cast<size_t>(depth - 1)];
}

namespace {
constexpr const char* kDbnMagic = "DVDN";

void write_f32(std::ostream& out, const double* src, int64_t count) {
  for (int64_t i = 0; i < count; ++i) {
    float f = static_cast<float>(src[i]);
    uint32_t bits;
    std::memcpy(&bits, &f, 4);
    unsigned char b[4] = {static_cast<unsigned char>(bits & 0xff),
                          static_cast<unsigned char>((bits >> 8) & 0xff),
                          static_cast<unsigned char>((bits >> 16) & 0xff),
                          static_cast<unsigned char>((bits >> 24) & 0xff)};
    out.write(reinterpret_cast<const char*>(b), 4);
  }
}

void read_f32(std::istream& in, double* dst, int64_t count, const char* what) {
  for (int64_t i = 0; i < count; ++i) {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    if (!in) raise(ErrorCode::size_mismatch, "DBN payload truncated while reading ", what);
    uint32_t bits = static_cast<uint32_t>(b[0]) | (static_cast<uint32_t>(b[1]) << 8) |
                    (static_cast<uint32_t>(b[2]) << 16) | (static_cast<uint32_t>(b[3]) << 24);
    float f;
    std::memcpy(&f, &bits, 4);
    dst[i] = static_cast<double>(f);
  }
}
}  // namespace

void save_dbn(const DbnModel& m, const std::filesystem::path& path) {
  validate(m);
  std::ofstream out(path, std::ios::binary);
  if (!out) raise(ErrorCode::io, "cannot open '", path.string(), "' for writing");
  out << kDbnMagic << " 1\n";
  out << "layers " << m.depth() << "\n";
  out << "widths " << m.input_width();
  for (const Layer& l : m.layers) out << " " << l.W.cols();
  out << "\n";
  out << "classes " << (m.softmax ? m.softmax->W.cols() : 0) << "\n";
  out << "data\n";
  for (const Layer& l : m.layers) {
    write_f32(out, l.W.data(), l.W.size());
    write_f32(out, l.b.data(), l.b.size());
  }
  if (m.softmax) {
    write_f32(out, m.softmax->W.data(), m.softmax->W.size());
    write_f32(out, m.softmax->b.data(), m.softmax->b.size());
  }
  if (!out) raise(ErrorCode::io, "write failed for '", path.string(), "'");
}

DbnModel load_dbn(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(ErrorCode::io, "cannot open '", path.string(), "' for reading");
  std::string line;
  auto next_line = [&]() {
    if (!std::getline(in, line)) raise(ErrorCode::format, "truncated DBN model header");
    return std::istringstream(line);
  };
  {
    auto ls = next_line();
    std::string magic;
    int version = 0;
    ls >> magic >> version;
    if (magic != kDbnMagic || version != 1)
      raise(ErrorCode::format, "'", path.string(), "' is not a DBN model file");
  }
  int64_t n_layers = 0;
  {
    auto ls = next_line();
    std::string key;
    ls >> key >> n_layers;
    if (key != "layers" || n_layers < 1) raise(ErrorCode::format, "bad layers line");
  }
  std::vector<int64_t> widths(static_cast<size_t>(n_layers + 1));
  {
    auto ls = next_line();
    std::string key;
    ls >> key;
    if (key != "widths") raise(ErrorCode::format, "bad widths line");
    for (auto& w : widths) {
      ls >> w;
      if (!ls || w < 1) raise(ErrorCode::format, "bad widths line");
    }
  }
  int64_t classes = -1;
  {
    auto ls = next_line();
    std::string key;
    ls >> key >> classes;
    if (key != "classes" || classes < 0) raise(ErrorCode::format, "bad classes line");
  }
  {
    next_line();
    if (line != "data") raise(ErrorCode::format, "expected 'data' sentinel");
  }
  DbnModel m;
  for (int64_t i = 0; i < n_layers; ++i) {
    Layer l;
    l.W.resize(widths[static_cast<size_t>(i)], widths[static_cast<size_t>(i + 1)]);
    l.b.resize(widths[static_cast<size_t>(i + 1)]);
    read_f32(in, l.W.data(), l.W.size(), "layer W");
    read_f32(in, l.b.data(), l.b.size(), "layer b");
    m.layers.push_back(std::move(l));
  }
  if (classes > 0) {
    SoftmaxHead head;
    head.W.resize(widths.back(), classes);
    head.b.resize(classes);
    read_f32(in, head.W.data(), head.W.size(), "softmax W");
    read_f32(in, head.b.data(), head.b.size(), "softmax b");
    m.softmax = std::move(head);
  }
  char extra;
  if (in.read(&extra, 1)) raise(ErrorCode::size_mismatch, "DBN payload longer than expected");
  validate(m);
  return m;
}

}  // namespace deepvox::dbn
