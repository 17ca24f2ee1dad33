/* deepvox - matrix-factorization feature learning and constraint-satisfaction
 * embedding for volumetric activation data.
 *
 * C API over the shared library. All entry points return dv_status; results
 * come back through out-parameters as opaque handles the caller frees. On
 * failure dv_last_error() returns a thread-local message describing what
 * went wrong.
 */
#ifndef DEEPVOX_H
#define DEEPVOX_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum dv_status {
  DV_OK = 0,
  DV_ERR_INVALID_ARGUMENT = 1,
  DV_ERR_DIMENSION = 2,
  DV_ERR_IO = 3,
  DV_ERR_FORMAT = 4,
  DV_ERR_SIZE = 5,
  DV_ERR_NONFINITE = 6,
  DV_ERR_NUMERIC = 7,
  DV_ERR_UNSUPPORTED = 8
} dv_status;

const char* dv_status_name(dv_status status);

/* Message for the most recent failure on this thread; empty string if none. */
const char* dv_last_error(void);

/* ---- matrices ----------------------------------------------------------
 * Dense samples-by-features matrix, row-major. Optionally carries voxel-grid
 * geometry: grid dims plus one strictly increasing linear grid index per
 * column. Files round-trip bit-exactly (text header + little-endian float32
 * payload). */

typedef struct dv_matrix dv_matrix;

dv_status dv_matrix_create(int64_t rows, int64_t cols, const double* values, dv_matrix** out);
dv_status dv_matrix_load(const char* path, dv_matrix** out);
dv_status dv_matrix_save(const dv_matrix* m, const char* path);
void dv_matrix_free(dv_matrix* m);

int64_t dv_matrix_rows(const dv_matrix* m);
int64_t dv_matrix_cols(const dv_matrix* m);
/* Borrowed pointer to rows*cols doubles, row-major; valid until the matrix
 * is freed or mutated. */
const double* dv_matrix_data(const dv_matrix* m);

dv_status dv_matrix_set_geometry(dv_matrix* m, int64_t nx, int64_t ny, int64_t nz,
                                 const int64_t* mask, int64_t mask_len);
/* has_geometry receives 0 or 1; dims/mask may be NULL when not wanted.
 * mask must have capacity dv_matrix_cols(m). */
dv_status dv_matrix_geometry(const dv_matrix* m, int* has_geometry, int64_t dims[3], int64_t* mask);

/* ---- preprocessing ------------------------------------------------------ */

/* Keeps columns whose mean is >= the grand mean of all values. `retained`
 * (capacity >= cols, may be NULL) receives the kept input column indices,
 * `retained_len` their count. */
dv_status dv_mask_below_mean(const dv_matrix* m, dv_matrix** out, int64_t* retained,
                             int64_t* retained_len);
dv_status dv_remove_mean_image(const dv_matrix* m, dv_matrix** out);
/* Per-column mean 0, population standard deviation 1; constant columns
 * become zeros. */
dv_status dv_zscore_voxels(const dv_matrix* m, dv_matrix** out);

/* ---- restricted Boltzmann machine --------------------------------------- */

typedef struct dv_rbm dv_rbm;

typedef struct dv_rbm_train_config {
  double epsilon;        /* learning rate */
  double lambda;         /* L1 weight decay */
  int64_t batch_size;
  int64_t epochs;
  int64_t cd_steps;
  uint64_t seed;
  double momentum;       /* in [0, 1) */
  int hidden_sampling;   /* 0 spin, 1 mean-field */
  int visible_units;     /* 0 gaussian, 1 clipped-linear */
} dv_rbm_train_config;

/* epsilon 0.08, lambda 0.1, batch 5, 100 epochs, CD-1, spin sampling. */
void dv_rbm_train_config_defaults(dv_rbm_train_config* cfg);

/* Trains on z-scored data (a warning is recorded otherwise). `trace`, when
 * non-NULL, receives an epochs x 2 matrix of reconstruction error and
 * mean |W|. */
dv_status dv_rbm_train(const dv_matrix* data, int64_t n_hidden, const dv_rbm_train_config* cfg,
                       dv_rbm** out, dv_matrix** trace);
dv_status dv_rbm_save(const dv_rbm* r, const char* path);
dv_status dv_rbm_load(const char* path, dv_rbm** out);
void dv_rbm_free(dv_rbm* r);

int64_t dv_rbm_visible(const dv_rbm* r);
int64_t dv_rbm_hidden(const dv_rbm* r);

/* Negates weight columns (and hidden biases) with negative column sums. */
dv_status dv_rbm_flip_negative_fields(dv_rbm* r);
/* Receptive fields as an H x V matrix (one spatial map per hidden unit). */
dv_status dv_rbm_spatial_maps(const dv_rbm* r, dv_matrix** out);
/* Feed-forward hidden means per sample row; expects mean-removed data. */
dv_status dv_rbm_timecourses(const dv_rbm* r, const dv_matrix* data, dv_matrix** out);

/* ---- deep belief network ------------------------------------------------ */

typedef struct dv_dbn dv_dbn;

typedef struct dv_finetune_config {
  double learning_rate;
  int64_t epochs;
  int64_t batch_size;
  uint64_t seed;
  double l2;
} dv_finetune_config;

void dv_finetune_config_defaults(dv_finetune_config* cfg);

dv_status dv_dbn_pretrain(const dv_matrix* data, const int64_t* layer_sizes, int64_t n_layers,
                          const dv_rbm_train_config* cfg, dv_dbn** out);
/* Attaches a softmax head when absent and backpropagates through every
 * layer. labels is an n x 1 matrix of integral class indices. `loss_trace`,
 * when non-NULL, receives the per-epoch mean cross-entropy. */
dv_status dv_dbn_finetune(dv_dbn* m, const dv_matrix* data, const dv_matrix* labels,
                          int64_t n_classes, const dv_finetune_config* cfg, dv_matrix** loss_trace);
/* labels_out: n x 1 predicted classes; probs (optional): n x classes. */
dv_status dv_dbn_predict(const dv_dbn* m, const dv_matrix* x, dv_matrix** labels_out,
                         dv_matrix** probs);
dv_status dv_dbn_hidden_features(const dv_dbn* m, const dv_matrix* x, int64_t depth,
                                 dv_matrix** out);
dv_status dv_dbn_save(const dv_dbn* m, const char* path);
dv_status dv_dbn_load(const char* path, dv_dbn** out);
void dv_dbn_free(dv_dbn* m);
int64_t dv_dbn_depth(const dv_dbn* m);

/* ---- constraint-satisfaction embedding ---------------------------------- */

typedef struct dv_embed_config {
  int64_t k;           /* neighbors kept per point */
  double beta;         /* difference-map parameter, nonzero */
  int64_t max_iters;
  double tol;          /* residual convergence threshold */
  int64_t osc_window;  /* oscillation detection window, >= 2 */
  int mode;            /* 0 exact-distance, 1 cap */
  uint64_t seed;
} dv_embed_config;

/* k 10, beta 0.9, 2000 iterations, tol 1e-6, window 50, exact-distance. */
void dv_embed_config_defaults(dv_embed_config* cfg);

enum { DV_EMBED_CONVERGED = 0, DV_EMBED_OSCILLATING = 1, DV_EMBED_MAX_ITERS = 2 };

/* Deterministic for a fixed (data, cfg). positions: n x 2. residual_trace
 * (optional): iterations x 1. osc_scores (optional): n x 1 replica variance
 * over the last window. */
dv_status dv_embed(const dv_matrix* data, const dv_embed_config* cfg, dv_matrix** positions,
                   int* status, dv_matrix** residual_trace, dv_matrix** osc_scores);

/* ---- synthetic ground truth --------------------------------------------- */

typedef struct dv_synth_spec {
  int64_t nx, ny;       /* voxel grid */
  int64_t n_sources;
  int64_t timepoints;
  double overlap;       /* >= 0, spaces source centers inversely */
  double snr;           /* power(signal) / power(noise) */
  uint64_t seed;
  double width;         /* Gaussian radius of every source */
} dv_synth_spec;

/* 32x32 grid, 8 sources, 200 timepoints, overlap 0, snr 10, width 2. */
void dv_synth_spec_defaults(dv_synth_spec* spec);

/* sm: R x V unit-max blobs; tc: T x R unit-variance smooth courses;
 * x: T x V mixed data with scaled white noise. Any output may be NULL. */
dv_status dv_synth_generate(const dv_synth_spec* spec, dv_matrix** sm, dv_matrix** tc,
                            dv_matrix** x);
/* Spec for one sweep level: overlap set, centers re-laid-out, seed varied
 * deterministically by level index. */
dv_status dv_synth_sweep_spec(const dv_synth_spec* base, double level, int64_t level_index,
                              dv_synth_spec* out);
/* Two-class data (class 1 brightens the first half of the sources by
 * `effect`); x: 2n x V, labels: 2n x 1. */
dv_status dv_synth_labeled(const dv_synth_spec* spec, int64_t n_per_class, double effect,
                           dv_matrix** x, dv_matrix** labels);

/* ---- evaluation --------------------------------------------------------- */

dv_status dv_pca_baseline(const dv_matrix* data, int64_t n_components, dv_matrix** components,
                          dv_matrix** projections);

/* Assignment of est rows to gt rows maximizing total |Pearson r| (Hungarian).
 * pairs: m x 4 rows of (est index, gt index, |r|, sign). */
dv_status dv_match_components(const dv_matrix* est, const dv_matrix* gt, dv_matrix** pairs,
                              double* mean_abs_corr);
/* SM matching plus TC correlations under the same assignment (tc matrices
 * are T x R, columns parallel to the SM rows). */
dv_status dv_match_with_timecourses(const dv_matrix* est_sm, const dv_matrix* gt_sm,
                                    const dv_matrix* est_tc, const dv_matrix* gt_tc,
                                    dv_matrix** pairs, double* mean_sm_corr, double* mean_tc_corr);

/* Correlation matrix of time-course columns. */
dv_status dv_fnc(const dv_matrix* tc, dv_matrix** out);

/* Greedy community detection; labels (capacity = node count, may be NULL)
 * receives the community index per node. */
dv_status dv_modularity(const dv_matrix* corr, double* q, int64_t* labels);

dv_status dv_paired_t_test(const double* x, const double* y, int64_t n, double* t, double* p);

/* labels: n x 1 integral classes. fold_of: n x 1 fold index per sample. */
dv_status dv_kfold_split(const dv_matrix* labels, int64_t folds, uint64_t seed,
                         dv_matrix** fold_of);

dv_status dv_macro_f_score(const dv_matrix* pred, const dv_matrix* truth, double* f);

dv_status dv_knn_classify(const dv_matrix* train, const dv_matrix* train_labels,
                          const dv_matrix* test, int64_t k, dv_matrix** labels_out);

typedef struct dv_logreg_config {
  double learning_rate;
  int64_t iters;
  double l2;
} dv_logreg_config;

void dv_logreg_config_defaults(dv_logreg_config* cfg);

typedef struct dv_logreg dv_logreg;

dv_status dv_logreg_train(const dv_matrix* data, const dv_matrix* labels, int64_t n_classes,
                          const dv_logreg_config* cfg, dv_logreg** out);
dv_status dv_logreg_predict(const dv_logreg* m, const dv_matrix* data, dv_matrix** labels_out);
void dv_logreg_free(dv_logreg* m);

typedef struct dv_depth_experiment_config {
  const int64_t* layer_sizes;
  int64_t n_layers;
  dv_rbm_train_config rbm;
  dv_finetune_config fine_tune;
  dv_logreg_config logreg;
  int64_t folds;
  int64_t knn_k;
  uint64_t seed;
} dv_depth_experiment_config;

void dv_depth_experiment_config_defaults(dv_depth_experiment_config* cfg);

/* Cross-validated depth-versus-F-score table. Rows ordered by depth (0 =
 * raw data, then 1..n_layers) then classifier (0 = LR, 1 = KNN); columns are
 * (depth, classifier, mean macro F, sd). */
dv_status dv_depth_experiment(const dv_matrix* data, const dv_matrix* labels,
                              const dv_depth_experiment_config* cfg, dv_matrix** table);

/* ---- plots --------------------------------------------------------------
 * Standalone SVG files. Scatter: one circle per position row; labels
 * (optional, n x 1 or n x 2) pick fill colors from a fixed palette, second
 * column nonzero adds a black outline. Heatmap: symmetric diverging scale
 * centered at 0. Curves: column 0 is x, remaining columns are series. */

dv_status dv_plot_scatter(const dv_matrix* positions, const dv_matrix* labels, const char* path);
dv_status dv_plot_heatmap(const dv_matrix* m, const char* path);
dv_status dv_plot_curves(const dv_matrix* xy, const char* path);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* DEEPVOX_H */
