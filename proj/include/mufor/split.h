#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <variant>
#include <vector>

#include "mufor/data.h"
#include "mufor/hungarian.h"
#include "mufor/random.h"

namespace mufor {

// Squared rewards pure class-to-child matches more strongly than NonSquared.
enum class ProportionVariant { kSquared, kNonSquared };
// Criterion for binary splits: CART Gini gain or class assignment.
enum class BinaryCriterion { kGini, kAssignClasses };

// Sorted unique in-node values of one covariate together with cumulative
// per-class counts: cumulative[t * n_local + c] is the number of in-node
// observations of local class c among the first t unique values.
struct CovariateProfile {
  std::size_t covariate = 0;
  std::size_t n_local = 0;
  std::vector<double> values;
  std::vector<std::uint32_t> cumulative;

  std::size_t n_unique() const { return values.size(); }
  std::uint32_t count(std::size_t t, std::size_t local_class) const {
    return cumulative[t * n_local + local_class];
  }
};

// The observations of one tree node. Profiles are built on first use and
// cached, so a view is not safe for concurrent use.
class NodeView {
 public:
  NodeView(const Dataset& data, std::span<const std::size_t> rows);
  ~NodeView();
  NodeView(const NodeView&) = delete;
  NodeView& operator=(const NodeView&) = delete;

  const Dataset& data() const { return *data_; }
  std::span<const std::size_t> rows() const { return rows_; }
  std::size_t size() const { return rows_.size(); }

  // Per-class counts over all C classes.
  const std::vector<std::size_t>& class_counts() const { return class_counts_; }
  // Classes present in the node (C_l), ascending.
  const std::vector<int>& classes() const { return classes_; }
  std::size_t n_local_classes() const { return classes_.size(); }
  int local_index(int global_class) const { return local_of_class_[static_cast<std::size_t>(global_class)]; }
  bool is_pure() const { return classes_.size() <= 1; }

  // True when the covariate takes at least two distinct values in the node.
  bool has_split_point(std::size_t covariate) const;
  const CovariateProfile& profile(std::size_t covariate) const;

 private:
  const Dataset* data_;
  std::span<const std::size_t> rows_;
  std::vector<std::size_t> class_counts_;
  std::vector<int> classes_;
  std::vector<int> local_of_class_;
  mutable std::vector<std::unique_ptr<CovariateProfile>> profiles_;
};

// Ordered split points of one covariate. cuts[i] is the number of unique
// in-node values at or below points[i]; points[i] is the midpoint between
// unique values cuts[i]-1 and cuts[i] (0-based).
struct MultiwayCandidate {
  std::size_t covariate = 0;
  std::vector<std::size_t> cuts;
  std::vector<double> points;

  std::size_t n_children() const { return points.size() + 1; }
};

// Child index per global class; -1 for classes absent from the node.
struct ClassAssignment {
  std::vector<int> child;
};

struct MultiwaySplit {
  std::size_t covariate = 0;
  std::vector<double> points;
  ClassAssignment assignment;
  double score = 0.0;
};

struct BinarySplit {
  std::size_t covariate = 0;
  double point = 0.0;
  // Filled only under BinaryCriterion::kAssignClasses (children 0 and 1).
  ClassAssignment assignment;
  double score = 0.0;
};

using SplitDecision = std::variant<MultiwaySplit, BinarySplit>;

struct SplitConfig {
  std::size_t mtry = 1;
  std::size_t npervar = 5;
  double multiway_probability = 0.5;
  ProportionVariant proportions = ProportionVariant::kSquared;
  BinaryCriterion binary = BinaryCriterion::kGini;
};

// Minimum number of unique values in every interval of a sampled multi-way
// split: floor(N / (2 c_l)), at least 1.
std::size_t min_interval_size(std::size_t n_unique, std::size_t n_classes);

// Draws mtry covariates among those with a split point (without replacement
// when enough exist) and generates their multi-way candidates. Empty when no
// covariate can be split.
std::vector<MultiwayCandidate> sample_candidates(const NodeView& node, std::size_t mtry,
                                                 std::size_t npervar, Rng& rng);

// Cuts for `n_children` intervals over `n_unique` values, uniform over all
// placements whose intervals each hold at least `min_size` values.
std::vector<std::size_t> sample_spaced_cuts(std::size_t n_unique, std::size_t n_children,
                                            std::size_t min_size, Rng& rng);

// Injective class-to-child assignment maximizing the summed (squared)
// proportions. Rows are classes, columns children; requires rows <= cols.
std::vector<std::size_t> assign_classes(const WeightMatrix& proportions, ProportionVariant variant);

struct ScoredAssignment {
  double score = 0.0;
  ClassAssignment assignment;
};

// Multi-way criterion. With at least as many children as node classes the
// assignment is injective (Hungarian); otherwise each class goes to its
// highest-proportion child with random tie resolution.
ScoredAssignment score_multiway(const MultiwayCandidate& candidate, const NodeView& node,
                                ProportionVariant variant, Rng& rng);

// CART Gini gain: parent impurity minus size-weighted child impurity.
double score_binary_gini(std::size_t covariate, double point, const NodeView& node);

ScoredAssignment score_binary_assign(std::size_t covariate, double point, const NodeView& node,
                                     ProportionVariant variant, Rng& rng);

// Chooses multi-way with probability config.multiway_probability and
// returns the best candidate, or the best single split point across all
// candidates for a binary split. Ties keep the earliest.
SplitDecision select_best_split(const std::vector<MultiwayCandidate>& candidates, const NodeView& node,
                                const SplitConfig& config, Rng& rng);

// Child index of a value under ordered split points: x <= points[0] goes to
// child 0, points[k-1] < x <= points[k] to child k.
inline std::size_t route_multiway(std::span<const double> points, double x) {
  std::size_t lo = 0;
  std::size_t hi = points.size();
  while (lo < hi) {
    std::size_t mid = (lo + hi) / 2;
    if (points[mid] < x) {
      lo = mid + 1;
    } else {
      hi = mid;
    }
  }
  return lo;
}

}  // namespace mufor
