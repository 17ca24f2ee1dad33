#include "synth.hpp"

#include <cmath>

#include "error.hpp"
#include "rng.hpp"

namespace deepvox::synth {

namespace {

constexpr double kTcKernelWidth = 5.0;  // samples

Mat blob_maps(const SynthSpec& spec, const std::vector<double>& centers,
              const std::vector<double>& widths) {
  const int64_t v = spec.nx * spec.ny;
  Mat sm(spec.n_sources, v);
  for (int64_t r = 0; r < spec.n_sources; ++r) {
    double cx = centers[static_cast<size_t>(2 * r)];
    double cy = centers[static_cast<size_t>(2 * r + 1)];
    double w = widths[static_cast<size_t>(r)];
    if (cx < 0.0 || cx > static_cast<double>(spec.nx - 1) || cy < 0.0 ||
        cy > static_cast<double>(spec.ny - 1))
      raise(ErrorCode::invalid_argument, "source center (", cx, ", ", cy, ") lies outside the grid");
    double peak = 0.0;
    for (int64_t y = 0; y < spec.ny; ++y)
      for (int64_t x = 0; x < spec.nx; ++x) {
        double dx = static_cast<double>(x) - cx;
        double dy = static_cast<double>(y) - cy;
        double val = std::exp(-(dx * dx + dy * dy) / (2.0 * w * w));
        sm(r, y * spec.nx + x) = val;
        peak = std::max(peak, val);
      }
    sm.row(r) /= peak;  // unit max, exactly
  }
  return sm;
}

Mat smooth_timecourses(const SynthSpec& spec, Rng& rng) {
  const int64_t radius = static_cast<int64_t>(std::ceil(3.0 * kTcKernelWidth));
  std::vector<double> kernel(static_cast<size_t>(2 * radius + 1));
  for (int64_t i = -radius; i <= radius; ++i)
    kernel[static_cast<size_t>(i + radius)] =
        std::exp(-static_cast<double>(i * i) / (2.0 * kTcKernelWidth * kTcKernelWidth));

  Mat tc(spec.timepoints, spec.n_sources);
  std::vector<double> white(static_cast<size_t>(spec.timepoints + 2 * radius));
  for (int64_t r = 0; r < spec.n_sources; ++r) {
    for (auto& w : white) w = rng.normal();
    for (int64_t t = 0; t < spec.timepoints; ++t) {
      double acc = 0.0;
      for (int64_t i = 0; i < 2 * radius + 1; ++i)
        acc += kernel[static_cast<size_t>(i)] * white[static_cast<size_t>(t + i)];
      tc(t, r) = acc;
    }
    double mean = tc.col(r).mean();
    tc.col(r).array() -= mean;
    double sd = std::sqrt(tc.col(r).squaredNorm() / static_cast<double>(spec.timepoints));
    if (sd > 0.0) tc.col(r) /= sd;
  }
  return tc;
}

VolumeGeometry full_grid_geometry(const SynthSpec& spec) {
  VolumeGeometry g;
  g.dims = {spec.nx, spec.ny, 1};
  g.mask.resize(static_cast<size_t>(spec.nx * spec.ny));
  for (size_t i = 0; i < g.mask.size(); ++i) g.mask[i] = static_cast<int64_t>(i);
  return g;
}

}  // namespace

void validate(const SynthSpec& spec) {
  if (spec.nx < 1 || spec.ny < 1) raise(ErrorCode::invalid_argument, "grid dims must be positive");
  if (spec.n_sources < 1) raise(ErrorCode::invalid_argument, "need at least one source");
  if (spec.timepoints < 2) raise(ErrorCode::invalid_argument, "need at least two timepoints");
  if (spec.snr <= 0.0) raise(ErrorCode::invalid_argument, "snr must be positive");
  if (spec.overlap < 0.0) raise(ErrorCode::invalid_argument, "overlap must be nonnegative");
  if (spec.default_width <= 0.0) raise(ErrorCode::invalid_argument, "width must be positive");
  if (!spec.centers.empty() && static_cast<int64_t>(spec.centers.size()) != 2 * spec.n_sources)
    raise(ErrorCode::invalid_argument, "centers must hold 2 entries per source");
  if (!spec.widths.empty()) {
    if (static_cast<int64_t>(spec.widths.size()) != spec.n_sources)
      raise(ErrorCode::invalid_argument, "widths must hold one entry per source");
    for (double w : spec.widths)
      if (w <= 0.0) raise(ErrorCode::invalid_argument, "widths must be positive");
  }
}

std::vector<double> default_centers(const SynthSpec& spec) {
  double w_max = spec.default_width;
  for (double w : spec.widths) w_max = std::max(w_max, w);
  double spacing = 4.0 * w_max / (1.0 + spec.overlap);

  auto side = static_cast<int64_t>(std::ceil(std::sqrt(static_cast<double>(spec.n_sources))));
  double cx0 = static_cast<double>(spec.nx - 1) / 2.0;
  double cy0 = static_cast<double>(spec.ny - 1) / 2.0;
  double half = spacing * static_cast<double>(side - 1) / 2.0;

  std::vector<double> centers;
  centers.reserve(static_cast<size_t>(2 * spec.n_sources));
  for (int64_t r = 0; r < spec.n_sources; ++r) {
    int64_t gx = r % side;
    int64_t gy = r / side;
    centers.push_back(cx0 - half + spacing * static_cast<double>(gx));
    centers.push_back(cy0 - half + spacing * static_cast<double>(gy));
  }
  return centers;
}

SynthGroundTruth generate(const SynthSpec& spec) {
  validate(spec);
  std::vector<double> centers = spec.centers.empty() ? default_centers(spec) : spec.centers;
  std::vector<double> widths = spec.widths;
  if (widths.empty()) widths.assign(static_cast<size_t>(spec.n_sources), spec.default_width);

  Rng rng(spec.seed);
  Mat sm = blob_maps(spec, centers, widths);
  Mat tc = smooth_timecourses(spec, rng);
  Mat signal = tc * sm;

  Mat noise(spec.timepoints, sm.cols());
  for (int64_t i = 0; i < noise.size(); ++i) noise.data()[i] = rng.normal();
  double p_signal = signal.squaredNorm() / static_cast<double>(signal.size());
  double p_noise = noise.squaredNorm() / static_cast<double>(noise.size());
  double scale = p_noise > 0.0 ? std::sqrt(p_signal / (spec.snr * p_noise)) : 0.0;

  SynthGroundTruth gt;
  gt.sm.values = std::move(sm);
  gt.sm.geometry = full_grid_geometry(spec);
  gt.tc.values = std::move(tc);
  gt.x.values = signal + scale * noise;
  gt.x.geometry = full_grid_geometry(spec);
  gt.spec = spec;
  return gt;
}

std::vector<SynthGroundTruth> overlap_sweep(const SynthSpec& base, const std::vector<double>& levels) {
  if (levels.empty()) raise(ErrorCode::invalid_argument, "overlap_sweep needs at least one level");
  std::vector<SynthGroundTruth> out;
  out.reserve(levels.size());
  for (size_t i = 0; i < levels.size(); ++i) {
    SynthSpec spec = base;
    spec.overlap = levels[i];
    spec.centers.clear();  // re-layout per level
    spec.seed = mix_seed(base.seed, static_cast<uint64_t>(i));
    out.push_back(generate(spec));
  }
  return out;
}

LabeledData generate_labeled(const SynthSpec& spec, int64_t n_per_class, double effect) {
  validate(spec);
  if (n_per_class < 1) raise(ErrorCode::invalid_argument, "n_per_class must be at least 1");

  std::vector<double> centers = spec.centers.empty() ? default_centers(spec) : spec.centers;
  std::vector<double> widths = spec.widths;
  if (widths.empty()) widths.assign(static_cast<size_t>(spec.n_sources), spec.default_width);
  Mat sm = blob_maps(spec, centers, widths);

  const int64_t v = sm.cols();
  Vec base_pattern = sm.colwise().sum().transpose();
  // class 1 brightens the first half of the sources
  int64_t n_affected = (spec.n_sources + 1) / 2;
  Vec contrast = sm.topRows(n_affected).colwise().sum().transpose();

  double p_signal = base_pattern.squaredNorm() / static_cast<double>(v);
  double noise_sd = std::sqrt(p_signal / spec.snr);

  Rng rng(spec.seed);
  LabeledData out;
  out.x.values.resize(2 * n_per_class, v);
  out.labels.resize(static_cast<size_t>(2 * n_per_class));
  for (int64_t s = 0; s < 2 * n_per_class; ++s) {
    int label = s < n_per_class ? 0 : 1;
    out.labels[static_cast<size_t>(s)] = label;
    for (int64_t j = 0; j < v; ++j) {
      double mean = base_pattern[j] + (label == 1 ? effect * contrast[j] : 0.0);
      out.x.values(s, j) = mean + noise_sd * rng.normal();
    }
  }
  out.x.geometry = full_grid_geometry(spec);
  return out;
}

}  // namespace deepvox::synth
