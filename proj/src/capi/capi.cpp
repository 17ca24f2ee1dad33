#include "deepvox.h"

#include <cmath>
#include <cstring>
#include <string>

#include "core/dbn.hpp"
#include "core/embed.hpp"
#include "core/error.hpp"
#include "core/eval.hpp"
#include "core/matrix.hpp"
#include "core/rbm.hpp"
#include "core/svg.hpp"
#include "core/synth.hpp"

struct dv_matrix {
  deepvox::SampleMatrix m;
};
struct dv_rbm {
  deepvox::rbm::RbmParams p;
};
struct dv_dbn {
  deepvox::dbn::DbnModel m;
};
struct dv_logreg {
  deepvox::eval::LogRegModel m;
};

namespace {

using deepvox::Error;
using deepvox::ErrorCode;
using deepvox::Mat;
using deepvox::SampleMatrix;
using deepvox::Vec;

thread_local std::string g_last_error;

dv_status map_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument: return DV_ERR_INVALID_ARGUMENT;
    case ErrorCode::dimension_mismatch: return DV_ERR_DIMENSION;
    case ErrorCode::io: return DV_ERR_IO;
    case ErrorCode::format: return DV_ERR_FORMAT;
    case ErrorCode::size_mismatch: return DV_ERR_SIZE;
    case ErrorCode::non_finite: return DV_ERR_NONFINITE;
    case ErrorCode::numeric: return DV_ERR_NUMERIC;
    case ErrorCode::unsupported: return DV_ERR_UNSUPPORTED;
  }
  return DV_ERR_INVALID_ARGUMENT;
}

template <typename Fn>
dv_status guarded(Fn&& fn) noexcept {
  try {
    fn();
    g_last_error.clear();
    return DV_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return map_code(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return DV_ERR_NUMERIC;
  } catch (...) {
    g_last_error = "unknown error";
    return DV_ERR_NUMERIC;
  }
}

void require(bool ok, const char* what) {
  if (!ok) deepvox::raise(ErrorCode::invalid_argument, what);
}

dv_matrix* wrap(Mat values) {
  auto* m = new dv_matrix;
  m->m.values = std::move(values);
  return m;
}

dv_matrix* wrap(SampleMatrix sm) {
  auto* m = new dv_matrix;
  m->m = std::move(sm);
  return m;
}

Mat column_matrix(const std::vector<double>& v) {
  Mat out(static_cast<int64_t>(v.size()), 1);
  for (size_t i = 0; i < v.size(); ++i) out(static_cast<int64_t>(i), 0) = v[i];
  return out;
}

std::vector<int> to_labels(const dv_matrix* labels) {
  require(labels != nullptr, "labels must not be NULL");
  require(labels->m.cols() == 1, "labels must be an n x 1 matrix");
  std::vector<int> out(static_cast<size_t>(labels->m.rows()));
  for (int64_t i = 0; i < labels->m.rows(); ++i) {
    double v = labels->m.values(i, 0);
    double r = std::nearbyint(v);
    if (std::abs(v - r) > 1e-9)
      deepvox::raise(ErrorCode::invalid_argument, "label ", v, " is not an integer");
    out[static_cast<size_t>(i)] = static_cast<int>(r);
  }
  return out;
}

deepvox::rbm::RbmTrainConfig to_core(const dv_rbm_train_config& c) {
  deepvox::rbm::RbmTrainConfig cfg;
  cfg.epsilon = c.epsilon;
  cfg.lambda = c.lambda;
  cfg.batch_size = c.batch_size;
  cfg.epochs = c.epochs;
  cfg.cd_steps = c.cd_steps;
  cfg.seed = c.seed;
  cfg.momentum = c.momentum;
  require(c.hidden_sampling == 0 || c.hidden_sampling == 1, "hidden_sampling must be 0 or 1");
  require(c.visible_units == 0 || c.visible_units == 1, "visible_units must be 0 or 1");
  cfg.hidden_sampling = c.hidden_sampling == 0 ? deepvox::rbm::HiddenSampling::spin
                                               : deepvox::rbm::HiddenSampling::mean_field;
  cfg.visible_units = c.visible_units == 0 ? deepvox::rbm::VisibleUnits::gaussian
                                           : deepvox::rbm::VisibleUnits::clipped;
  return cfg;
}

deepvox::dbn::FineTuneConfig to_core(const dv_finetune_config& c) {
  deepvox::dbn::FineTuneConfig cfg;
  cfg.learning_rate = c.learning_rate;
  cfg.epochs = c.epochs;
  cfg.batch_size = c.batch_size;
  cfg.seed = c.seed;
  cfg.l2 = c.l2;
  return cfg;
}

deepvox::synth::SynthSpec to_core(const dv_synth_spec& s) {
  deepvox::synth::SynthSpec spec;
  spec.nx = s.nx;
  spec.ny = s.ny;
  spec.n_sources = s.n_sources;
  spec.timepoints = s.timepoints;
  spec.overlap = s.overlap;
  spec.snr = s.snr;
  spec.seed = s.seed;
  spec.default_width = s.width;
  return spec;
}

}  // namespace

extern "C" {

const char* dv_status_name(dv_status status) {
  switch (status) {
    case DV_OK: return "ok";
    case DV_ERR_INVALID_ARGUMENT: return "invalid argument";
    case DV_ERR_DIMENSION: return "dimension mismatch";
    case DV_ERR_IO: return "io error";
    case DV_ERR_FORMAT: return "format error";
    case DV_ERR_SIZE: return "size mismatch";
    case DV_ERR_NONFINITE: return "non-finite value";
    case DV_ERR_NUMERIC: return "numeric error";
    case DV_ERR_UNSUPPORTED: return "unsupported";
  }
  return "unknown";
}

const char* dv_last_error(void) { return g_last_error.c_str(); }

/* ---- matrices ---- */

dv_status dv_matrix_create(int64_t rows, int64_t cols, const double* values, dv_matrix** out) {
  return guarded([&] {
    require(values != nullptr && out != nullptr, "values and out must not be NULL");
    SampleMatrix m;
    m.values.resize(rows, cols);
    std::memcpy(m.values.data(), values, sizeof(double) * static_cast<size_t>(rows * cols));
    deepvox::validate(m);
    *out = wrap(std::move(m));
  });
}

dv_status dv_matrix_load(const char* path, dv_matrix** out) {
  return guarded([&] {
    require(path != nullptr && out != nullptr, "path and out must not be NULL");
    *out = wrap(deepvox::load_matrix(path));
  });
}

dv_status dv_matrix_save(const dv_matrix* m, const char* path) {
  return guarded([&] {
    require(m != nullptr && path != nullptr, "matrix and path must not be NULL");
    deepvox::save_matrix(m->m, path);
  });
}

void dv_matrix_free(dv_matrix* m) { delete m; }

int64_t dv_matrix_rows(const dv_matrix* m) { return m ? m->m.rows() : 0; }
int64_t dv_matrix_cols(const dv_matrix* m) { return m ? m->m.cols() : 0; }
const double* dv_matrix_data(const dv_matrix* m) { return m ? m->m.values.data() : nullptr; }

dv_status dv_matrix_set_geometry(dv_matrix* m, int64_t nx, int64_t ny, int64_t nz,
                                 const int64_t* mask, int64_t mask_len) {
  return guarded([&] {
    require(m != nullptr && mask != nullptr, "matrix and mask must not be NULL");
    deepvox::VolumeGeometry g;
    g.dims = {nx, ny, nz};
    g.mask.assign(mask, mask + mask_len);
    m->m.geometry = std::move(g);
    deepvox::validate(m->m);
  });
}

dv_status dv_matrix_geometry(const dv_matrix* m, int* has_geometry, int64_t dims[3],
                             int64_t* mask) {
  return guarded([&] {
    require(m != nullptr && has_geometry != nullptr, "matrix and has_geometry must not be NULL");
    *has_geometry = m->m.geometry ? 1 : 0;
    if (m->m.geometry) {
      if (dims)
        for (int i = 0; i < 3; ++i) dims[i] = m->m.geometry->dims[static_cast<size_t>(i)];
      if (mask)
        std::memcpy(mask, m->m.geometry->mask.data(), sizeof(int64_t) * m->m.geometry->mask.size());
    }
  });
}

/* ---- preprocessing ---- */

dv_status dv_mask_below_mean(const dv_matrix* m, dv_matrix** out, int64_t* retained,
                             int64_t* retained_len) {
  return guarded([&] {
    require(m != nullptr && out != nullptr, "matrix and out must not be NULL");
    auto res = deepvox::mask_below_mean(m->m);
    if (retained)
      std::memcpy(retained, res.retained.data(), sizeof(int64_t) * res.retained.size());
    if (retained_len) *retained_len = static_cast<int64_t>(res.retained.size());
    *out = wrap(std::move(res.matrix));
  });
}

dv_status dv_remove_mean_image(const dv_matrix* m, dv_matrix** out) {
  return guarded([&] {
    require(m != nullptr && out != nullptr, "matrix and out must not be NULL");
    *out = wrap(deepvox::remove_mean_image(m->m));
  });
}

dv_status dv_zscore_voxels(const dv_matrix* m, dv_matrix** out) {
  return guarded([&] {
    require(m != nullptr && out != nullptr, "matrix and out must not be NULL");
    *out = wrap(deepvox::zscore_voxels(m->m));
  });
}

/* ---- RBM ---- */

void dv_rbm_train_config_defaults(dv_rbm_train_config* cfg) {
  if (!cfg) return;
  deepvox::rbm::RbmTrainConfig d;
  cfg->epsilon = d.epsilon;
  cfg->lambda = d.lambda;
  cfg->batch_size = d.batch_size;
  cfg->epochs = d.epochs;
  cfg->cd_steps = d.cd_steps;
  cfg->seed = d.seed;
  cfg->momentum = d.momentum;
  cfg->hidden_sampling = 0;
  cfg->visible_units = 0;
}

dv_status dv_rbm_train(const dv_matrix* data, int64_t n_hidden, const dv_rbm_train_config* cfg,
                       dv_rbm** out, dv_matrix** trace) {
  return guarded([&] {
    require(data != nullptr && cfg != nullptr && out != nullptr,
            "data, cfg and out must not be NULL");
    auto res = deepvox::rbm::train(data->m.values, n_hidden, to_core(*cfg));
    if (trace) {
      Mat t(static_cast<int64_t>(res.trace.recon_error.size()), 2);
      for (size_t e = 0; e < res.trace.recon_error.size(); ++e) {
        t(static_cast<int64_t>(e), 0) = res.trace.recon_error[e];
        t(static_cast<int64_t>(e), 1) = res.trace.mean_abs_w[e];
      }
      *trace = wrap(std::move(t));
    }
    *out = new dv_rbm{std::move(res.params)};
  });
}

dv_status dv_rbm_save(const dv_rbm* r, const char* path) {
  return guarded([&] {
    require(r != nullptr && path != nullptr, "model and path must not be NULL");
    deepvox::rbm::save_rbm(r->p, path);
  });
}

dv_status dv_rbm_load(const char* path, dv_rbm** out) {
  return guarded([&] {
    require(path != nullptr && out != nullptr, "path and out must not be NULL");
    *out = new dv_rbm{deepvox::rbm::load_rbm(path)};
  });
}

void dv_rbm_free(dv_rbm* r) { delete r; }

int64_t dv_rbm_visible(const dv_rbm* r) { return r ? r->p.visible() : 0; }
int64_t dv_rbm_hidden(const dv_rbm* r) { return r ? r->p.hidden() : 0; }

dv_status dv_rbm_flip_negative_fields(dv_rbm* r) {
  return guarded([&] {
    require(r != nullptr, "model must not be NULL");
    r->p = deepvox::rbm::flip_negative_fields(r->p);
  });
}

dv_status dv_rbm_spatial_maps(const dv_rbm* r, dv_matrix** out) {
  return guarded([&] {
    require(r != nullptr && out != nullptr, "model and out must not be NULL");
    *out = wrap(Mat(r->p.W.transpose()));
  });
}

dv_status dv_rbm_timecourses(const dv_rbm* r, const dv_matrix* data, dv_matrix** out) {
  return guarded([&] {
    require(r != nullptr && data != nullptr && out != nullptr,
            "model, data and out must not be NULL");
    *out = wrap(deepvox::rbm::feed_forward_timecourses(data->m.values, r->p));
  });
}

/* ---- DBN ---- */

void dv_finetune_config_defaults(dv_finetune_config* cfg) {
  if (!cfg) return;
  deepvox::dbn::FineTuneConfig d;
  cfg->learning_rate = d.learning_rate;
  cfg->epochs = d.epochs;
  cfg->batch_size = d.batch_size;
  cfg->seed = d.seed;
  cfg->l2 = d.l2;
}

dv_status dv_dbn_pretrain(const dv_matrix* data, const int64_t* layer_sizes, int64_t n_layers,
                          const dv_rbm_train_config* cfg, dv_dbn** out) {
  return guarded([&] {
    require(data != nullptr && layer_sizes != nullptr && cfg != nullptr && out != nullptr,
            "data, layer_sizes, cfg and out must not be NULL");
    require(n_layers >= 1, "need at least one layer");
    std::vector<int64_t> sizes(layer_sizes, layer_sizes + n_layers);
    *out = new dv_dbn{deepvox::dbn::pretrain(data->m.values, sizes, to_core(*cfg))};
  });
}

dv_status dv_dbn_finetune(dv_dbn* m, const dv_matrix* data, const dv_matrix* labels,
                          int64_t n_classes, const dv_finetune_config* cfg,
                          dv_matrix** loss_trace) {
  return guarded([&] {
    require(m != nullptr && data != nullptr && cfg != nullptr,
            "model, data and cfg must not be NULL");
    auto trace =
        deepvox::dbn::fine_tune(m->m, data->m.values, to_labels(labels), n_classes, to_core(*cfg));
    if (loss_trace) *loss_trace = wrap(column_matrix(trace));
  });
}

dv_status dv_dbn_predict(const dv_dbn* m, const dv_matrix* x, dv_matrix** labels_out,
                         dv_matrix** probs) {
  return guarded([&] {
    require(m != nullptr && x != nullptr && labels_out != nullptr,
            "model, x and labels_out must not be NULL");
    auto pred = deepvox::dbn::predict(m->m, x->m.values);
    Mat lab(static_cast<int64_t>(pred.labels.size()), 1);
    for (size_t i = 0; i < pred.labels.size(); ++i)
      lab(static_cast<int64_t>(i), 0) = static_cast<double>(pred.labels[i]);
    *labels_out = wrap(std::move(lab));
    if (probs) *probs = wrap(std::move(pred.probabilities));
  });
}

dv_status dv_dbn_hidden_features(const dv_dbn* m, const dv_matrix* x, int64_t depth,
                                 dv_matrix** out) {
  return guarded([&] {
    require(m != nullptr && x != nullptr && out != nullptr, "model, x and out must not be NULL");
    *out = wrap(deepvox::dbn::hidden_features(m->m, x->m.values, depth));
  });
}

dv_status dv_dbn_save(const dv_dbn* m, const char* path) {
  return guarded([&] {
    require(m != nullptr && path != nullptr, "model and path must not be NULL");
    deepvox::dbn::save_dbn(m->m, path);
  });
}

dv_status dv_dbn_load(const char* path, dv_dbn** out) {
  return guarded([&] {
    require(path != nullptr && out != nullptr, "path and out must not be NULL");
    *out = new dv_dbn{deepvox::dbn::load_dbn(path)};
  });
}

void dv_dbn_free(dv_dbn* m) { delete m; }

int64_t dv_dbn_depth(const dv_dbn* m) { return m ? m->m.depth() : 0; }

/* ---- embedding ---- */

void dv_embed_config_defaults(dv_embed_config* cfg) {
  if (!cfg) return;
  deepvox::embed::EmbedConfig d;
  cfg->k = d.k;
  cfg->beta = d.beta;
  cfg->max_iters = d.max_iters;
  cfg->tol = d.tol;
  cfg->osc_window = d.osc_window;
  cfg->mode = 0;
  cfg->seed = d.seed;
}

dv_status dv_embed(const dv_matrix* data, const dv_embed_config* cfg, dv_matrix** positions,
                   int* status, dv_matrix** residual_trace, dv_matrix** osc_scores) {
  return guarded([&] {
    require(data != nullptr && cfg != nullptr && positions != nullptr,
            "data, cfg and positions must not be NULL");
    require(cfg->mode == 0 || cfg->mode == 1, "mode must be 0 or 1");
    deepvox::embed::EmbedConfig c;
    c.k = cfg->k;
    c.beta = cfg->beta;
    c.max_iters = cfg->max_iters;
    c.tol = cfg->tol;
    c.osc_window = cfg->osc_window;
    c.mode = cfg->mode == 0 ? deepvox::embed::ConstraintMode::exact_distance
                            : deepvox::embed::ConstraintMode::cap;
    c.seed = cfg->seed;
    auto res = deepvox::embed::embed(data->m.values, c);
    *positions = wrap(std::move(res.positions));
    if (status) {
      switch (res.status) {
        case deepvox::embed::EmbedStatus::converged: *status = DV_EMBED_CONVERGED; break;
        case deepvox::embed::EmbedStatus::oscillating: *status = DV_EMBED_OSCILLATING; break;
        case deepvox::embed::EmbedStatus::max_iters: *status = DV_EMBED_MAX_ITERS; break;
      }
    }
    if (residual_trace) *residual_trace = wrap(column_matrix(res.residual_trace));
    if (osc_scores) *osc_scores = wrap(column_matrix(res.oscillation_score));
  });
}

/* ---- synth ---- */

void dv_synth_spec_defaults(dv_synth_spec* spec) {
  if (!spec) return;
  deepvox::synth::SynthSpec d;
  spec->nx = d.nx;
  spec->ny = d.ny;
  spec->n_sources = d.n_sources;
  spec->timepoints = d.timepoints;
  spec->overlap = d.overlap;
  spec->snr = d.snr;
  spec->seed = d.seed;
  spec->width = d.default_width;
}

dv_status dv_synth_generate(const dv_synth_spec* spec, dv_matrix** sm, dv_matrix** tc,
                            dv_matrix** x) {
  return guarded([&] {
    require(spec != nullptr, "spec must not be NULL");
    auto gt = deepvox::synth::generate(to_core(*spec));
    if (sm) *sm = wrap(std::move(gt.sm));
    if (tc) *tc = wrap(std::move(gt.tc));
    if (x) *x = wrap(std::move(gt.x));
  });
}

dv_status dv_synth_sweep_spec(const dv_synth_spec* base, double level, int64_t level_index,
                              dv_synth_spec* out) {
  return guarded([&] {
    require(base != nullptr && out != nullptr, "base and out must not be NULL");
    require(level >= 0.0, "overlap level must be nonnegative");
    *out = *base;
    out->overlap = level;
    out->seed = deepvox::mix_seed(base->seed, static_cast<uint64_t>(level_index));
  });
}

dv_status dv_synth_labeled(const dv_synth_spec* spec, int64_t n_per_class, double effect,
                           dv_matrix** x, dv_matrix** labels) {
  return guarded([&] {
    require(spec != nullptr && x != nullptr, "spec and x must not be NULL");
    auto data = deepvox::synth::generate_labeled(to_core(*spec), n_per_class, effect);
    *x = wrap(std::move(data.x));
    if (labels) {
      Mat lab(static_cast<int64_t>(data.labels.size()), 1);
      for (size_t i = 0; i < data.labels.size(); ++i)
        lab(static_cast<int64_t>(i), 0) = static_cast<double>(data.labels[i]);
      *labels = wrap(std::move(lab));
    }
  });
}

/* ---- eval ---- */

dv_status dv_pca_baseline(const dv_matrix* data, int64_t n_components, dv_matrix** components,
                          dv_matrix** projections) {
  return guarded([&] {
    require(data != nullptr && components != nullptr, "data and components must not be NULL");
    auto res = deepvox::eval::pca_baseline(data->m.values, n_components);
    *components = wrap(std::move(res.components));
    if (projections) *projections = wrap(std::move(res.projections));
  });
}

namespace {

dv_matrix* pairs_matrix(const deepvox::eval::MatchResult& res) {
  Mat pairs(static_cast<int64_t>(res.est_index.size()), 4);
  for (size_t i = 0; i < res.est_index.size(); ++i) {
    pairs(static_cast<int64_t>(i), 0) = static_cast<double>(res.est_index[i]);
    pairs(static_cast<int64_t>(i), 1) = static_cast<double>(res.gt_index[i]);
    pairs(static_cast<int64_t>(i), 2) = res.abs_corr[i];
    pairs(static_cast<int64_t>(i), 3) = res.signs[i];
  }
  return wrap(std::move(pairs));
}

}  // namespace

dv_status dv_match_components(const dv_matrix* est, const dv_matrix* gt, dv_matrix** pairs,
                              double* mean_abs_corr) {
  return guarded([&] {
    require(est != nullptr && gt != nullptr, "est and gt must not be NULL");
    auto res = deepvox::eval::match_components(est->m.values, gt->m.values);
    if (pairs) *pairs = pairs_matrix(res);
    if (mean_abs_corr) *mean_abs_corr = res.mean_sm_corr;
  });
}

dv_status dv_match_with_timecourses(const dv_matrix* est_sm, const dv_matrix* gt_sm,
                                    const dv_matrix* est_tc, const dv_matrix* gt_tc,
                                    dv_matrix** pairs, double* mean_sm_corr,
                                    double* mean_tc_corr) {
  return guarded([&] {
    require(est_sm != nullptr && gt_sm != nullptr && est_tc != nullptr && gt_tc != nullptr,
            "all four matrices must not be NULL");
    auto res = deepvox::eval::match_with_timecourses(est_sm->m.values, gt_sm->m.values,
                                                     est_tc->m.values, gt_tc->m.values);
    if (pairs) *pairs = pairs_matrix(res);
    if (mean_sm_corr) *mean_sm_corr = res.mean_sm_corr;
    if (mean_tc_corr) *mean_tc_corr = res.mean_tc_corr;
  });
}

dv_status dv_fnc(const dv_matrix* tc, dv_matrix** out) {
  return guarded([&] {
    require(tc != nullptr && out != nullptr, "tc and out must not be NULL");
    *out = wrap(deepvox::eval::fnc(tc->m.values));
  });
}

dv_status dv_modularity(const dv_matrix* corr, double* q, int64_t* labels) {
  return guarded([&] {
    require(corr != nullptr && q != nullptr, "corr and q must not be NULL");
    auto res = deepvox::eval::modularity(corr->m.values);
    *q = res.q;
    if (labels) std::memcpy(labels, res.labels.data(), sizeof(int64_t) * res.labels.size());
  });
}

dv_status dv_paired_t_test(const double* x, const double* y, int64_t n, double* t, double* p) {
  return guarded([&] {
    require(x != nullptr && y != nullptr && t != nullptr && p != nullptr,
            "x, y, t and p must not be NULL");
    require(n >= 0, "n must be nonnegative");
    std::vector<double> xv(x, x + n), yv(y, y + n);
    auto res = deepvox::eval::paired_t_test(xv, yv);
    *t = res.t;
    *p = res.p;
  });
}

dv_status dv_kfold_split(const dv_matrix* labels, int64_t folds, uint64_t seed,
                         dv_matrix** fold_of) {
  return guarded([&] {
    require(fold_of != nullptr, "fold_of must not be NULL");
    auto plan = deepvox::eval::kfold_split(to_labels(labels), folds, seed);
    Mat out(static_cast<int64_t>(plan.fold_of.size()), 1);
    for (size_t i = 0; i < plan.fold_of.size(); ++i)
      out(static_cast<int64_t>(i), 0) = static_cast<double>(plan.fold_of[i]);
    *fold_of = wrap(std::move(out));
  });
}

dv_status dv_macro_f_score(const dv_matrix* pred, const dv_matrix* truth, double* f) {
  return guarded([&] {
    require(f != nullptr, "f must not be NULL");
    *f = deepvox::eval::macro_f_score(to_labels(pred), to_labels(truth));
  });
}

dv_status dv_knn_classify(const dv_matrix* train, const dv_matrix* train_labels,
                          const dv_matrix* test, int64_t k, dv_matrix** labels_out) {
  return guarded([&] {
    require(train != nullptr && test != nullptr && labels_out != nullptr,
            "train, test and labels_out must not be NULL");
    auto pred =
        deepvox::eval::knn_classify(train->m.values, to_labels(train_labels), test->m.values, k);
    Mat out(static_cast<int64_t>(pred.size()), 1);
    for (size_t i = 0; i < pred.size(); ++i)
      out(static_cast<int64_t>(i), 0) = static_cast<double>(pred[i]);
    *labels_out = wrap(std::move(out));
  });
}

void dv_logreg_config_defaults(dv_logreg_config* cfg) {
  if (!cfg) return;
  deepvox::eval::LogRegConfig d;
  cfg->learning_rate = d.learning_rate;
  cfg->iters = d.iters;
  cfg->l2 = d.l2;
}

dv_status dv_logreg_train(const dv_matrix* data, const dv_matrix* labels, int64_t n_classes,
                          const dv_logreg_config* cfg, dv_logreg** out) {
  return guarded([&] {
    require(data != nullptr && cfg != nullptr && out != nullptr,
            "data, cfg and out must not be NULL");
    deepvox::eval::LogRegConfig c{cfg->learning_rate, cfg->iters, cfg->l2};
    *out = new dv_logreg{deepvox::eval::logreg_train(data->m.values, to_labels(labels), n_classes, c)};
  });
}

dv_status dv_logreg_predict(const dv_logreg* m, const dv_matrix* data, dv_matrix** labels_out) {
  return guarded([&] {
    require(m != nullptr && data != nullptr && labels_out != nullptr,
            "model, data and labels_out must not be NULL");
    auto pred = deepvox::eval::logreg_predict(m->m, data->m.values);
    Mat out(static_cast<int64_t>(pred.size()), 1);
    for (size_t i = 0; i < pred.size(); ++i)
      out(static_cast<int64_t>(i), 0) = static_cast<double>(pred[i]);
    *labels_out = wrap(std::move(out));
  });
}

void dv_logreg_free(dv_logreg* m) { delete m; }

void dv_depth_experiment_config_defaults(dv_depth_experiment_config* cfg) {
  if (!cfg) return;
  cfg->layer_sizes = nullptr;
  cfg->n_layers = 0;
  dv_rbm_train_config_defaults(&cfg->rbm);
  dv_finetune_config_defaults(&cfg->fine_tune);
  dv_logreg_config_defaults(&cfg->logreg);
  cfg->folds = 10;
  cfg->knn_k = 5;
  cfg->seed = 1;
}

dv_status dv_depth_experiment(const dv_matrix* data, const dv_matrix* labels,
                              const dv_depth_experiment_config* cfg, dv_matrix** table) {
  return guarded([&] {
    require(data != nullptr && cfg != nullptr && table != nullptr,
            "data, cfg and table must not be NULL");
    require(cfg->layer_sizes != nullptr && cfg->n_layers >= 1, "layer_sizes must name at least one layer");
    deepvox::eval::DepthExperimentConfig c;
    c.layer_sizes.assign(cfg->layer_sizes, cfg->layer_sizes + cfg->n_layers);
    c.rbm = to_core(cfg->rbm);
    c.fine_tune = to_core(cfg->fine_tune);
    c.logreg = {cfg->logreg.learning_rate, cfg->logreg.iters, cfg->logreg.l2};
    c.folds = cfg->folds;
    c.knn_k = cfg->knn_k;
    c.seed = cfg->seed;
    auto rows = deepvox::eval::depth_experiment(data->m.values, to_labels(labels), c);
    Mat out(static_cast<int64_t>(rows.size()), 4);
    for (size_t i = 0; i < rows.size(); ++i) {
      out(static_cast<int64_t>(i), 0) = static_cast<double>(rows[i].depth);
      out(static_cast<int64_t>(i), 1) = rows[i].classifier == "LR" ? 0.0 : 1.0;
      out(static_cast<int64_t>(i), 2) = rows[i].mean_f;
      out(static_cast<int64_t>(i), 3) = rows[i].sd_f;
    }
    *table = wrap(std::move(out));
  });
}

/* ---- plots ---- */

dv_status dv_plot_scatter(const dv_matrix* positions, const dv_matrix* labels, const char* path) {
  return guarded([&] {
    require(positions != nullptr && path != nullptr, "positions and path must not be NULL");
    deepvox::svg::write_scatter(positions->m.values, labels ? &labels->m.values : nullptr, path);
  });
}

dv_status dv_plot_heatmap(const dv_matrix* m, const char* path) {
  return guarded([&] {
    require(m != nullptr && path != nullptr, "matrix and path must not be NULL");
    deepvox::svg::write_heatmap(m->m.values, path);
  });
}

dv_status dv_plot_curves(const dv_matrix* xy, const char* path) {
  return guarded([&] {
    require(xy != nullptr && path != nullptr, "matrix and path must not be NULL");
    deepvox::svg::write_curves(xy->m.values, path);
  });
}

} /* extern "C" */
