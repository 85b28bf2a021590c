#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace mufor {

// Probability that a random value of `a` exceeds a random value of `b`;
// ties count one half.
double auc_two_groups(std::span<const double> a, std::span<const double> b);

struct MeanCi {
  double mean = 0.0;
  double sd = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  std::size_t count = 0;
  // False with fewer than two values; the bounds are then NaN.
  bool ci_defined = false;
};

// Mean with the normal-approximation interval mean +- 1.96 sd / sqrt(m).
MeanCi mean_auc_ci(std::span<const double> values);

// AUC of column c of the row-major n x C matrix against the indicator
// label == c. NaN for classes absent from, or covering all of, `labels`.
std::vector<double> one_vs_rest_aucs(std::span<const double> proba, std::span<const int> labels,
                                     std::size_t n_classes);

// Unweighted and class-frequency-weighted means of the one-vs-rest AUCs.
// Undefined terms are dropped and the weights renormalized.
double aunu(std::span<const double> proba, std::span<const int> labels, std::size_t n_classes);
double aunp(std::span<const double> proba, std::span<const int> labels, std::size_t n_classes);

// Mean over observations of sum_c (p_c - [y = c])^2, in [0, 2].
double brier(std::span<const double> proba, std::span<const int> labels, std::size_t n_classes);

double accuracy(std::span<const int> predicted, std::span<const int> labels);

// Type-7 sample quantile (linear interpolation between order statistics).
double quantile(std::vector<double> values, double q);

}  // namespace mufor
