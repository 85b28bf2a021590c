/* C interface of the mufor library. All handles are opaque; every function
 * returning mufor_status leaves a message for mufor_last_error() on failure.
 * Strings returned through char** are owned by the caller and released with
 * mufor_string_free. */
#ifndef MUFOR_MUFOR_H
#define MUFOR_MUFOR_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(MUFOR_BUILDING_LIBRARY)
#define MUFOR_API __declspec(dllexport)
#else
#define MUFOR_API __declspec(dllimport)
#endif
#else
#define MUFOR_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mufor_status {
  MUFOR_OK = 0,
  MUFOR_ERR_INVALID_ARGUMENT = 1,
  MUFOR_ERR_IO = 2,
  MUFOR_ERR_PARSE = 3,
  MUFOR_ERR_SCHEMA_MISMATCH = 4,
  MUFOR_ERR_INTERNAL = 5
} mufor_status;

typedef struct mufor_dataset mufor_dataset;
typedef struct mufor_model mufor_model;

/* Message of the last failure on the calling thread; empty after success. */
MUFOR_API const char* mufor_last_error(void);
MUFOR_API const char* mufor_version(void);
MUFOR_API void mufor_string_free(char* s);
/* 0 quiet, 1 warnings, 2 info. Logs go to standard error. */
MUFOR_API void mufor_set_log_level(int level);

/* ---- datasets ---- */

/* outcome_column and schema_path may be NULL (last column, inferred kinds). */
MUFOR_API mufor_status mufor_dataset_load(const char* path, const char* outcome_column, const char* schema_path,
                                          mufor_dataset** out);
/* Simulated dataset with 4, 6 or 10 balanced classes; also keeps
 * the covariate roles for mufor_dataset_write_roles. */
MUFOR_API mufor_status mufor_dataset_simulate(int n_classes, size_t n, uint64_t seed, mufor_dataset** out);
/* Builds a dataset from a column-major n x p matrix of continuous values and
 * 0-based labels below n_classes. names may be NULL (X1..Xp). */
MUFOR_API mufor_status mufor_dataset_from_arrays(size_t n, size_t p, const double* values, const int* labels,
                                                 int n_classes, const char* const* names, mufor_dataset** out);
MUFOR_API void mufor_dataset_free(mufor_dataset* data);
MUFOR_API size_t mufor_dataset_n(const mufor_dataset* data);
MUFOR_API size_t mufor_dataset_p(const mufor_dataset* data);
MUFOR_API int mufor_dataset_n_classes(const mufor_dataset* data);
MUFOR_API mufor_status mufor_dataset_write(const mufor_dataset* data, const char* path);
/* Fails for datasets that were not simulated. */
MUFOR_API mufor_status mufor_dataset_write_roles(const mufor_dataset* data, const char* path);

/* ---- configuration ---- */

typedef struct mufor_config {
  size_t ntree;
  size_t mtry; /* 0 selects floor(sqrt(p)) */
  size_t npervar;
  size_t nmin;
  double prop;
  double multiway_probability;
  int squared;       /* 1 squared proportions, 0 unsquared */
  int gini;          /* 1 Gini for binary splits, 0 class assignment */
  int majority_vote; /* 1 majority vote, 0 maximum mean probability */
  uint64_t seed;
} mufor_config;

MUFOR_API void mufor_config_default(mufor_config* config);
/* wsquared_wgini, wosquared_wgini, wsquared_wogini or wosquared_wogini. */
MUFOR_API mufor_status mufor_config_set_variant(mufor_config* config, const char* variant);
/* max_probability or majority_vote. */
MUFOR_API mufor_status mufor_config_set_prediction_rule(mufor_config* config, const char* rule);

/* ---- models ---- */

/* workers == 0 reads MUFOR_WORKERS, then the hardware concurrency. */
MUFOR_API mufor_status mufor_train(const mufor_dataset* data, const mufor_config* config, size_t workers,
                                   mufor_model** out);
MUFOR_API void mufor_model_free(mufor_model* model);
MUFOR_API mufor_status mufor_model_save(const mufor_model* model, const char* path);
MUFOR_API mufor_status mufor_model_load(const char* path, mufor_model** out);
MUFOR_API int mufor_model_n_classes(const mufor_model* model);
MUFOR_API size_t mufor_model_p(const mufor_model* model);
/* Label of class k (0-based); NULL when out of range. Owned by the model. */
MUFOR_API const char* mufor_model_class_name(const mufor_model* model, int k);

typedef struct mufor_model_summary {
  size_t trees;
  size_t nodes;
  size_t leaves;
  size_t multiway_nodes;
  size_t binary_nodes;
  double mean_depth;
  size_t max_depth;
} mufor_model_summary;

MUFOR_API mufor_status mufor_model_summarize(const mufor_model* model, mufor_model_summary* out);

/* ---- prediction ---- */

/* Loads a file whose covariates are matched to the model by name. The
 * outcome column is optional; without one all labels are a placeholder. */
MUFOR_API mufor_status mufor_dataset_load_for_model(const mufor_model* model, const char* path,
                                                    const char* outcome_column, mufor_dataset** out);
/* proba: n x C row-major, classes: n entries; either may be NULL. data is
 * either from mufor_dataset_load_for_model or raw data with the training
 * covariates. */
MUFOR_API mufor_status mufor_predict(const mufor_model* model, const mufor_dataset* data, size_t workers,
                                     double* proba, int* classes);
/* Table with columns row, predicted, [observed,] prob_<class>... */
MUFOR_API mufor_status mufor_predict_table(const mufor_model* model, const mufor_dataset* data, size_t workers,
                                           int with_observed, char** table);

/* ---- importance ---- */

typedef struct mufor_vim_options {
  int multi_class;
  int discriminatory;
  int permutation;
  int has_seed; /* 0 uses the model seed */
  uint64_t seed;
  size_t node_permutations; /* permuted-criterion draws averaged per node */
} mufor_vim_options;

MUFOR_API void mufor_vim_options_default(mufor_vim_options* options);
/* data must be the raw training data of the model. Table columns:
 * covariate, multi_class, discriminatory, permutation; undefined or
 * unrequested values are empty cells. */
MUFOR_API mufor_status mufor_importance_table(const mufor_model* model, const mufor_dataset* data,
                                              const mufor_vim_options* options, size_t workers, char** table);
/* Values per covariate; NaN marks undefined or unrequested values. Each
 * array may be NULL and otherwise holds p entries. */
MUFOR_API mufor_status mufor_importance(const mufor_model* model, const mufor_dataset* data,
                                        const mufor_vim_options* options, size_t workers, double* multi_class,
                                        double* discriminatory, double* permutation);

/* ---- simulation study ---- */

typedef struct mufor_study_options {
  const int* classes;
  size_t n_classes_count;
  const size_t* sizes;
  size_t sizes_count;
  int repetitions;
  /* Comma-separated subset of multi_class,discriminatory,difference,
   * permutation; NULL for all. */
  const char* measures;
  uint64_t seed;
} mufor_study_options;

/* Any output pointer may be NULL. summary: mean AUC with 95% interval per
 * (C, n, comparison, method, measure); raw: one AUC per repetition; roles:
 * mean VIM per role and repetition. */
MUFOR_API mufor_status mufor_simstudy(const mufor_study_options* options, const mufor_config* forest,
                                      size_t workers, char** summary, char** raw, char** roles);

/* ---- cross-validation ---- */

typedef struct mufor_cv_options {
  int folds;
  int repetitions;
  uint64_t seed;
  /* 1 runs all four variants instead of only the configured one. */
  int all_variants;
} mufor_cv_options;

MUFOR_API void mufor_cv_options_default(mufor_cv_options* options);
/* Runs the configured forest and a binary-only baseline (multiway
 * probability 0) on every dataset. folds: per-fold metrics; summary: median,
 * quartiles and mean per method and measure; tests: signed-rank tests
 * against the baseline, Holm-adjusted, only when count >= 6 (else empty).
 * names label the datasets in the tables. */
MUFOR_API mufor_status mufor_crossval(const mufor_dataset* const* datasets, const char* const* names, size_t count,
                                      const mufor_config* forest, const mufor_cv_options* options, size_t workers,
                                      char** folds, char** summary, char** tests);

#ifdef __cplusplus
}
#endif

#endif
