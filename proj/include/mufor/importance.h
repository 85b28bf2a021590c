#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mufor/forest.h"

namespace mufor {

// Multi-way criterion on OOB data: sum over the node's classes of the
// (squared) proportion of that class in its stored child. Children without
// OOB observations contribute 0. With `permute` set, the covariate values of
// the given rows are shuffled among themselves before routing.
double oob_multiway_criterion(const TreeNode& node, const Dataset& data, std::span<const std::size_t> rows,
                              bool permute, ProportionVariant variant, Rng& rng);

// Binary-node criterion on OOB data. Gini nodes use the size-weighted child
// purity sum_k (n_k / n) sum_c p_ck^2; nodes with a stored assignment use
// the multi-way form.
double oob_binary_criterion(const TreeNode& node, const Dataset& data, std::span<const std::size_t> rows,
                            bool permute, ProportionVariant variant, Rng& rng);

// Both criteria on explicit (value, label) pairs, for callers that manage
// the permutation themselves.
double node_criterion(const TreeNode& node, std::span<const double> values, std::span<const int> labels,
                      int n_classes, ProportionVariant variant);

// Stream seeds. For node `node` of tree `tree`, the node's OOB rows are
// taken in ascending row order and their covariate values are shuffled by
// Rng::shuffle, once per draw, all draws from one stream. The permutation
// VIM shuffles the tree's ascending OOB rows once per covariate.
std::uint64_t node_permutation_seed(std::uint64_t seed, std::size_t tree, std::size_t node);
std::uint64_t covariate_permutation_seed(std::uint64_t seed, std::size_t tree, std::size_t covariate);

// A categorical covariate needs at least C categories for the multi-class
// measure; continuous covariates always qualify.
bool multiclass_eligible(const CovariateInfo& info, int n_classes);

struct VimOptions {
  bool multi_class = true;
  bool discriminatory = true;
  bool permutation = true;
  // Seed of the permutation streams; the model's seed when unset.
  std::optional<std::uint64_t> seed;
  // Permuted-criterion draws averaged per node for the split-based VIMs.
  std::size_t node_permutations = 1;
  std::size_t workers = 1;
};

struct VimReport {
  std::vector<std::string> covariates;
  std::vector<bool> multi_class_defined;
  // NaN where undefined or not computed.
  std::vector<double> multi_class;
  std::vector<double> discriminatory;
  std::vector<double> permutation;
  bool has_multi_class = false;
  bool has_discriminatory = false;
  bool has_permutation = false;
};

// Per-tree sums of n_l * (criterion - permuted criterion) over eligible
// nodes, averaged over all trees. `data` must be the encoded training data.
std::vector<double> compute_multiclass_vim(const MultiForestModel& model, const Dataset& data,
                                           std::uint64_t seed, std::size_t workers = 1,
                                           std::size_t permutations = 1);
std::vector<double> compute_discriminatory_vim(const MultiForestModel& model, const Dataset& data,
                                               std::uint64_t seed, std::size_t workers = 1,
                                               std::size_t permutations = 1);
// Mean over trees of the OOB misclassification increase after permuting a
// covariate across the tree's OOB observations.
std::vector<double> compute_permutation_vim(const MultiForestModel& model, const Dataset& data,
                                            std::uint64_t seed, std::size_t workers = 1);

// Checks that `raw` is the training data of `model`, encodes it and fills
// the requested measures.
VimReport compute_importance(const MultiForestModel& model, const Dataset& raw, const VimOptions& options);

// Columns: covariate, multi_class, discriminatory, permutation. Undefined or
// omitted values are empty cells.
std::string format_vim_table(const VimReport& report);
void write_vim_table(const VimReport& report, const std::string& path);

}  // namespace mufor
