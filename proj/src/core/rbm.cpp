#include "rbm.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

#include "error.hpp"

namespace deepvox::rbm {

namespace {

// tanh saturates to exactly +-1 in double for |z| > ~19; pull such values
// back inside the open interval so downstream range contracts hold.
double bounded_tanh(double z) {
  double t = std::tanh(z);
  double lim = std::nextafter(1.0, 0.0);
  if (t > lim) return lim;
  if (t < -lim) return -lim;
  return t;
}

void check_dims(const RbmParams& p, int64_t v_len, int64_t h_len, const char* where) {
  if (v_len >= 0 && v_len != p.visible())
    raise(ErrorCode::dimension_mismatch, where, ": visible length ", v_len, " != ", p.visible());
  if (h_len >= 0 && h_len != p.hidden())
    raise(ErrorCode::dimension_mismatch, where, ": hidden length ", h_len, " != ", p.hidden());
}

Mat clip_unit(Mat m) {
  return m.cwiseMax(-1.0).cwiseMin(1.0);
}

}  // namespace

void validate(const RbmParams& p) {
  if (p.visible() < 1 || p.hidden() < 1)
    raise(ErrorCode::invalid_argument, "RBM needs at least one visible and one hidden unit");
  if (p.a.size() != p.visible() || p.b.size() != p.hidden() || p.sigma.size() != p.visible())
    raise(ErrorCode::dimension_mismatch, "RBM parameter shapes are inconsistent");
  if (!p.W.allFinite() || !p.a.allFinite() || !p.b.allFinite() || !p.sigma.allFinite())
    raise(ErrorCode::non_finite, "RBM parameters contain non-finite values");
  if ((p.sigma.array() <= 0.0).any())
    raise(ErrorCode::invalid_argument, "RBM sigma entries must be positive");
}

void validate(const RbmTrainConfig& cfg) {
  if (cfg.epsilon <= 0.0) raise(ErrorCode::invalid_argument, "epsilon must be positive");
  if (cfg.lambda < 0.0) raise(ErrorCode::invalid_argument, "lambda must be nonnegative");
  if (cfg.batch_size < 1) raise(ErrorCode::invalid_argument, "batch_size must be at least 1");
  if (cfg.epochs < 1) raise(ErrorCode::invalid_argument, "epochs must be at least 1");
  if (cfg.cd_steps < 1) raise(ErrorCode::invalid_argument, "cd_steps must be at least 1");
  if (cfg.momentum < 0.0 || cfg.momentum >= 1.0)
    raise(ErrorCode::invalid_argument, "momentum must be in [0, 1)");
}

double energy(const Vec& v, const Vec& h, const RbmParams& p) {
  check_dims(p, v.size(), h.size(), "energy");
  Vec vs = v.cwiseQuotient(p.sigma);
  double containment = ((v - p.a).cwiseQuotient(p.sigma)).squaredNorm() / 2.0;
  return containment - p.b.dot(h) - vs.dot(p.W * h);
}

Vec hidden_mean(const Vec& v, const RbmParams& p) {
  check_dims(p, v.size(), -1, "hidden_mean");
  Vec z = p.b + p.W.transpose() * v.cwiseQuotient(p.sigma);
  return z.unaryExpr([](double x) { return bounded_tanh(x); });
}

Mat hidden_mean_batch(const Mat& v, const RbmParams& p) {
  check_dims(p, v.cols(), -1, "hidden_mean_batch");
  Mat vs = v.array().rowwise() / p.sigma.transpose().array();
  Mat z = (vs * p.W).rowwise() + p.b.transpose();
  return z.unaryExpr([](double x) { return bounded_tanh(x); });
}

Vec sample_hidden(const Vec& mean, Rng& rng) {
  Vec out(mean.size());
  for (int64_t i = 0; i < mean.size(); ++i) {
    double p_plus = 0.5 * (1.0 + mean[i]);
    out[i] = rng.uniform() < p_plus ? 1.0 : -1.0;
  }
  return out;
}

Vec visible_mean(const Vec& h, const RbmParams& p) {
  check_dims(p, -1, h.size(), "visible_mean");
  return p.a + p.sigma.cwiseProduct(p.W * h);
}

Vec sample_visible(const Vec& mean, const RbmParams& p, Rng& rng, bool add_noise) {
  check_dims(p, mean.size(), -1, "sample_visible");
  if (!add_noise) return mean;
  Vec out(mean.size());
  for (int64_t j = 0; j < mean.size(); ++j) out[j] = mean[j] + p.sigma[j] * rng.normal();
  return out;
}

double cd1_update(const Mat& batch, RbmParams& p, const RbmTrainConfig& cfg, Rng& rng,
                  UpdateVelocity* velocity) {
  if (batch.rows() < 1) raise(ErrorCode::invalid_argument, "cd1_update: empty batch");
  check_dims(p, batch.cols(), -1, "cd1_update");
  const int64_t n = batch.rows();

  Mat v_scaled = batch.array().rowwise() / p.sigma.transpose().array();
  Mat h_mean0 = hidden_mean_batch(batch, p);

  // Gibbs chain; per-sample spins drive the reconstruction, means enter the
  // gradient statistics.
  Mat v_chain = batch;
  Mat h_driver = h_mean0;
  for (int64_t step = 0; step < cfg.cd_steps; ++step) {
    if (step > 0) h_driver = hidden_mean_batch(v_chain, p);
    if (cfg.hidden_sampling == HiddenSampling::spin) {
      for (int64_t s = 0; s < n; ++s)
        for (int64_t i = 0; i < p.hidden(); ++i)
          h_driver(s, i) = rng.uniform() < 0.5 * (1.0 + h_driver(s, i)) ? 1.0 : -1.0;
    }
    v_chain = ((h_driver * p.W.transpose()).array().rowwise() * p.sigma.transpose().array()).matrix();
    v_chain.rowwise() += p.a.transpose();
    if (cfg.visible_units == VisibleUnits::clipped) v_chain = clip_unit(v_chain);
  }
  Mat h_mean1 = hidden_mean_batch(v_chain, p);
  Mat v1_scaled = v_chain.array().rowwise() / p.sigma.transpose().array();

  double inv_n = 1.0 / static_cast<double>(n);
  Mat grad_w = (v_scaled.transpose() * h_mean0 - v1_scaled.transpose() * h_mean1) * inv_n;
  grad_w -= cfg.lambda * p.W.unaryExpr([](double w) { return w > 0.0 ? 1.0 : (w < 0.0 ? -1.0 : 0.0); });
  Vec grad_a = ((batch - v_chain).colwise().sum().transpose().array() * inv_n /
                p.sigma.array().square()).matrix();
  Vec grad_b = (h_mean0 - h_mean1).colwise().sum().transpose() * inv_n;

  if (velocity) {
    velocity->W = cfg.momentum * velocity->W + cfg.epsilon * grad_w;
    velocity->a = cfg.momentum * velocity->a + cfg.epsilon * grad_a;
    velocity->b = cfg.momentum * velocity->b + cfg.epsilon * grad_b;
    p.W += velocity->W;
    p.a += velocity->a;
    p.b += velocity->b;
  } else {
    p.W += cfg.epsilon * grad_w;
    p.a += cfg.epsilon * grad_a;
    p.b += cfg.epsilon * grad_b;
  }

  return (batch - v_chain).squaredNorm() / static_cast<double>(n * batch.cols());
}

TrainResult train(const Mat& data, int64_t n_hidden, const RbmTrainConfig& cfg) {
  validate(cfg);
  if (data.rows() < 1 || data.cols() < 1) raise(ErrorCode::invalid_argument, "train: empty data");
  if (n_hidden < 1) raise(ErrorCode::invalid_argument, "train: n_hidden must be at least 1");

  TrainResult res;
  RbmParams& p = res.params;
  Rng rng(cfg.seed);
  p.W.resize(data.cols(), n_hidden);
  for (int64_t j = 0; j < p.W.size(); ++j) p.W.data()[j] = 0.01 * rng.normal();
  p.a = Vec::Zero(data.cols());
  p.b = Vec::Zero(n_hidden);
  p.sigma = Vec::Ones(data.cols());

  if (cfg.visible_units == VisibleUnits::gaussian) {
    double mean_off = data.colwise().mean().cwiseAbs().mean();
    Vec centered_sq = (data.rowwise() - data.colwise().mean()).array().square().colwise().mean();
    double sd_off = (centered_sq.array().sqrt() - 1.0).abs().mean();
    if (mean_off > 0.05 || sd_off > 0.05) {
      std::ostringstream os;
      os << "training data does not look z-scored (mean offset " << mean_off
         << ", sd offset " << sd_off << "); sigma is fixed at 1";
      res.trace.warnings.push_back(os.str());
    }
  }

  UpdateVelocity vel{Mat::Zero(data.cols(), n_hidden), Vec::Zero(data.cols()), Vec::Zero(n_hidden)};
  UpdateVelocity* vel_ptr = cfg.momentum > 0.0 ? &vel : nullptr;

  std::vector<int64_t> order(static_cast<size_t>(data.rows()));
  for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int64_t>(i);

  for (int64_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    Rng epoch_rng(mix_seed(cfg.seed, static_cast<uint64_t>(epoch)));
    epoch_rng.shuffle(order);
    double sq_err_sum = 0.0;
    for (int64_t start = 0; start < data.rows(); start += cfg.batch_size) {
      int64_t len = std::min(cfg.batch_size, data.rows() - start);
      Mat batch(len, data.cols());
      for (int64_t r = 0; r < len; ++r) batch.row(r) = data.row(order[static_cast<size_t>(start + r)]);
      double mse = cd1_update(batch, p, cfg, epoch_rng, vel_ptr);
      sq_err_sum += mse * static_cast<double>(len * data.cols());
    }
    res.trace.recon_error.push_back(sq_err_sum / static_cast<double>(data.rows() * data.cols()));
    res.trace.mean_abs_w.push_back(p.W.cwiseAbs().mean());
  }
  return res;
}

RbmParams flip_negative_fields(const RbmParams& p) {
  validate(p);
  RbmParams out = p;
  for (int64_t i = 0; i < p.hidden(); ++i) {
    if (p.W.col(i).sum() < 0.0) {
      out.W.col(i) = -p.W.col(i);
      out.b[i] = -p.b[i];
    }
  }
  return out;
}

Mat feed_forward_timecourses(const Mat& data, const RbmParams& p) {
  return hidden_mean_batch(data, p);
}

namespace {

// Enumeration helpers for the exact marginal: with m_j(h) = sum_i W_ji h_i,
// integrating the Gaussian visibles gives, per hidden state h,
//   log w(h) = b.h + sum_j (a_j m_j / sigma_j + m_j^2 / 2).
constexpr int64_t kMaxExactHidden = 12;

Vec spin_state(uint64_t code, int64_t h) {
  Vec s(h);
  for (int64_t i = 0; i < h; ++i) s[i] = (code >> i) & 1 ? 1.0 : -1.0;
  return s;
}

}  // namespace

double exact_loglik(const Mat& data, const RbmParams& p) {
  validate(p);
  check_dims(p, data.cols(), -1, "exact_loglik");
  if (p.hidden() > kMaxExactHidden)
    raise(ErrorCode::unsupported, "exact_loglik: H = ", p.hidden(), " exceeds enumeration limit ",
          kMaxExactHidden);

  const uint64_t states = 1ULL << p.hidden();
  std::vector<double> log_w(states);
  double max_lw = -std::numeric_limits<double>::infinity();
  for (uint64_t code = 0; code < states; ++code) {
    Vec h = spin_state(code, p.hidden());
    Vec m = p.W * h;
    log_w[code] = p.b.dot(h) + (p.a.cwiseQuotient(p.sigma)).dot(m) + 0.5 * m.squaredNorm();
    max_lw = std::max(max_lw, log_w[code]);
  }
  double acc = 0.0;
  for (uint64_t code = 0; code < states; ++code) acc += std::exp(log_w[code] - max_lw);
  double log_z = max_lw + std::log(acc);
  for (int64_t j = 0; j < p.visible(); ++j) log_z += 0.5 * std::log(2.0 * M_PI * p.sigma[j] * p.sigma[j]);

  // unnormalized log marginal: -containment + sum_i log(2 cosh(phi_i))
  double total = 0.0;
  for (int64_t r = 0; r < data.rows(); ++r) {
    Vec v = data.row(r).transpose();
    Vec phi = p.b + p.W.transpose() * v.cwiseQuotient(p.sigma);
    double lf = -((v - p.a).cwiseQuotient(p.sigma)).squaredNorm() / 2.0;
    for (int64_t i = 0; i < p.hidden(); ++i)
      lf += std::abs(phi[i]) + std::log1p(std::exp(-2.0 * std::abs(phi[i])));
    total += lf;
  }
  return total / static_cast<double>(data.rows()) - log_z;
}

RbmGradient exact_loglik_gradient(const Mat& data, const RbmParams& p) {
  validate(p);
  check_dims(p, data.cols(), -1, "exact_loglik_gradient");
  if (p.hidden() > kMaxExactHidden)
    raise(ErrorCode::unsupported, "exact_loglik_gradient: H = ", p.hidden(),
          " exceeds enumeration limit ", kMaxExactHidden);

  const int64_t V = p.visible(), H = p.hidden();
  const uint64_t states = 1ULL << H;

  // p(h) over the 2^H spin states, via log weights
  std::vector<double> log_w(states);
  double max_lw = -std::numeric_limits<double>::infinity();
  for (uint64_t code = 0; code < states; ++code) {
    Vec h = spin_state(code, H);
    Vec m = p.W * h;
    log_w[code] = p.b.dot(h) + (p.a.cwiseQuotient(p.sigma)).dot(m) + 0.5 * m.squaredNorm();
    max_lw = std::max(max_lw, log_w[code]);
  }
  double z = 0.0;
  for (uint64_t code = 0; code < states; ++code) z += std::exp(log_w[code] - max_lw);

  // model expectations: E[(v_j/sigma_j) h_i], E[(v_j - a_j)/sigma_j^2], E[h_i]
  Mat model_w = Mat::Zero(V, H);
  Vec model_a = Vec::Zero(V);
  Vec model_b = Vec::Zero(H);
  for (uint64_t code = 0; code < states; ++code) {
    double prob = std::exp(log_w[code] - max_lw) / z;
    Vec h = spin_state(code, H);
    Vec m = p.W * h;
    Vec v_mean_scaled = p.a.cwiseQuotient(p.sigma) + m;  // E[v_j | h] / sigma_j
    model_w += prob * (v_mean_scaled * h.transpose());
    model_a += prob * m.cwiseQuotient(p.sigma);
    model_b += prob * h;
  }

  double inv_n = 1.0 / static_cast<double>(data.rows());
  Mat data_w = Mat::Zero(V, H);
  Vec data_a = Vec::Zero(V);
  Vec data_b = Vec::Zero(H);
  for (int64_t r = 0; r < data.rows(); ++r) {
    Vec v = data.row(r).transpose();
    Vec hm = hidden_mean(v, p);
    data_w += (v.cwiseQuotient(p.sigma)) * hm.transpose();
    data_a += (v - p.a).cwiseQuotient(p.sigma.cwiseProduct(p.sigma));
    data_b += hm;
  }

  RbmGradient g;
  g.W = data_w * inv_n - model_w;
  g.a = data_a * inv_n - model_a;
  g.b = data_b * inv_n - model_b;
  return g;
}

namespace {
constexpr const char* kRbmMagic = "DVRB";

void write_payload_f32(std::ostream& out, const double* src, int64_t count) {
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

void read_payload_f32(std::istream& in, double* dst, int64_t count, const char* what) {
  for (int64_t i = 0; i < count; ++i) {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    if (!in) raise(ErrorCode::size_mismatch, "model payload truncated while reading ", what);
    uint32_t bits = static_cast<uint32_t>(b[0]) | (static_cast<uint32_t>(b[1]) << 8) |
                    (static_cast<uint32_t>(b[2]) << 16) | (static_cast<uint32_t>(b[3]) << 24);
    float f;
    std::memcpy(&f, &bits, 4);
    dst[i] = static_cast<double>(f);
  }
}
}  // namespace

void save_rbm(const RbmParams& p, const std::filesystem::path& path) {
  validate(p);
  bool sigma_fixed = (p.sigma.array() == 1.0).all();
  std::ofstream out(path, std::ios::binary);
  if (!out) raise(ErrorCode::io, "cannot open '", path.string(), "' for writing");
  out << kRbmMagic << " 1\n";
  out << "visible " << p.visible() << "\n";
  out << "hidden " << p.hidden() << "\n";
  out << "sigma " << (sigma_fixed ? "fixed" : "stored") << "\n";
  out << "data\n";
  write_payload_f32(out, p.W.data(), p.W.size());
  write_payload_f32(out, p.a.data(), p.a.size());
  write_payload_f32(out, p.b.data(), p.b.size());
  if (!sigma_fixed) write_payload_f32(out, p.sigma.data(), p.sigma.size());
  if (!out) raise(ErrorCode::io, "write failed for '", path.string(), "'");
}

RbmParams load_rbm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(ErrorCode::io, "cannot open '", path.string(), "' for reading");
  std::string line;
  auto next_line = [&]() {
    if (!std::getline(in, line)) raise(ErrorCode::format, "truncated RBM model header");
    return std::istringstream(line);
  };
  {
    auto ls = next_line();
    std::string magic;
    int version = 0;
    ls >> magic >> version;
    if (magic != kRbmMagic || version != 1)
      raise(ErrorCode::format, "'", path.string(), "' is not an RBM model file");
  }
  int64_t v = 0, h = 0;
  std::string sigma_mode;
  {
    auto ls = next_line();
    std::string key;
    ls >> key >> v;
    if (key != "visible" || v < 1) raise(ErrorCode::format, "bad visible line");
  }
  {
    auto ls = next_line();
    std::string key;
    ls >> key >> h;
    if (key != "hidden" || h < 1) raise(ErrorCode::format, "bad hidden line");
  }
  {
    auto ls = next_line();
    std::string key;
    ls >> key >> sigma_mode;
    if (key != "sigma" || (sigma_mode != "fixed" && sigma_mode != "stored"))
      raise(ErrorCode::format, "bad sigma line");
  }
  {
    auto ls = next_line();
    if (line != "data") raise(ErrorCode::format, "expected 'data' sentinel");
  }
  RbmParams p;
  p.W.resize(v, h);
  p.a.resize(v);
  p.b.resize(h);
  read_payload_f32(in, p.W.data(), p.W.size(), "W");
  read_payload_f32(in, p.a.data(), p.a.size(), "a");
  read_payload_f32(in, p.b.data(), p.b.size(), "b");
  if (sigma_mode == "stored") {
    p.sigma.resize(v);
    read_payload_f32(in, p.sigma.data(), p.sigma.size(), "sigma");
  } else {
    p.sigma = Vec::Ones(v);
  }
  char extra;
  if (in.read(&extra, 1)) raise(ErrorCode::size_mismatch, "RBM model payload longer than expected");
  validate(p);
  return p;
}

}  // namespace deepvox::rbm
