#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "mufor/data.h"
#include "mufor/forest.h"

namespace mufor {

// Fold index per observation. Each class is shuffled and dealt round-robin,
// continuing where the previous class stopped, so per-class and total fold
// sizes differ by at most one.
std::vector<int> stratified_folds(std::span<const int> labels, int n_classes, int folds, std::uint64_t seed);

// Fits on `train` and returns the row-major n_test x C probability matrix
// for `test`. `seed` is shared by all methods of one fold.
using Trainer = std::function<std::vector<double>(const Dataset& train, const Dataset& test, std::uint64_t seed)>;

struct CvMethod {
  std::string name;
  Trainer trainer;
};

struct CvRow {
  std::string method;
  int repetition = 0;
  int fold = 0;
  double aunu = 0.0;
  double aunp = 0.0;
  double brier = 0.0;
  double accuracy = 0.0;
};

struct CvOptions {
  int folds = 5;
  int repetitions = 5;
  std::uint64_t seed = 1;
  std::size_t workers = 1;
};

// Rows ordered by method, repetition, fold. Throws when a class has fewer
// members than folds.
std::vector<CvRow> stratified_cv(const Dataset& data, const std::vector<CvMethod>& methods,
                                 const CvOptions& options);

// Trainer for a multi forest with the given configuration; its seed is
// replaced by the fold seed. Nominal covariates are ordered on the
// training part.
Trainer forest_trainer(const MufConfig& config, std::size_t workers = 1);

struct CvSummaryRow {
  std::string method;
  std::string measure;
  double median = 0.0;
  double q1 = 0.0;
  double q3 = 0.0;
  double mean = 0.0;
};

std::vector<CvSummaryRow> summarize_cv(const std::vector<CvRow>& rows);

// Per-dataset mean of each measure, paired over datasets: every method is
// tested against the baseline by the signed-rank test, Holm-adjusted within
// each measure. `per_dataset[d]` holds the rows of dataset d.
struct CvComparisonRow {
  std::string measure;
  std::string method;
  std::string baseline;
  std::size_t n_datasets = 0;
  double median_difference = 0.0;
  double statistic = 0.0;
  double p_value = 1.0;
  double adjusted_p = 1.0;
  double z = 0.0;
  double effect_size = 0.0;
  bool exact = false;
};

std::vector<CvComparisonRow> compare_across_datasets(const std::vector<std::vector<CvRow>>& per_dataset,
                                                     const std::string& baseline);

std::string format_cv_comparison(const std::vector<CvComparisonRow>& rows);

std::string format_cv_table(const std::vector<CvRow>& rows, const std::string& dataset);
std::string format_cv_summary(const std::vector<CvSummaryRow>& rows, const std::string& dataset);

}  // namespace mufor
