#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace mufor {

struct WilcoxonResult {
  // Sum of the ranks of positive differences.
  double statistic = 0.0;
  double p_value = 1.0;
  // Normal score (V - E[V]) / sd with tie correction, no continuity term.
  double z = 0.0;
  // |z| / sqrt(m), m the number of nonzero differences.
  double effect_size = 0.0;
  std::size_t n_nonzero = 0;
  bool exact = false;
};

// Two-sided signed-rank test on x - y. Zero differences are dropped. Up to
// 25 nonzero differences use the exact null distribution of the midrank sum;
// beyond that the normal approximation with continuity and tie correction.
WilcoxonResult wilcoxon_signed_rank(std::span<const double> x, std::span<const double> y);

// Holm step-down adjustment with monotonicity enforcement, in input order.
std::vector<double> holm_adjust(std::span<const double> p_values);

struct PairedComparison {
  std::size_t method = 0;
  WilcoxonResult test;
  double adjusted_p = 1.0;
  double median_difference = 0.0;
};

// Tests every column of the row-major datasets x methods matrix against the
// baseline column and Holm-adjusts the p-values. Needs at least 6 datasets.
std::vector<PairedComparison> paired_wilcoxon_holm(std::span<const double> matrix, std::size_t n_datasets,
                                                   std::size_t n_methods, std::size_t baseline);

double normal_upper_tail(double z);

}  // namespace mufor
