#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mufor/data.h"
#include "mufor/random.h"
#include "mufor/split.h"

namespace mufor {

enum class PredictionRule { kMaxProbability, kMajorityVote };

struct MufConfig {
  std::size_t ntree = 5000;
  // 0 selects floor(sqrt(p)).
  std::size_t mtry = 0;
  std::size_t npervar = 5;
  std::size_t nmin = 5;
  double prop = 0.7;
  double multiway_probability = 0.5;
  ProportionVariant proportions = ProportionVariant::kSquared;
  BinaryCriterion binary = BinaryCriterion::kGini;
  std::uint64_t seed = 1;
  PredictionRule prediction_rule = PredictionRule::kMaxProbability;

  std::size_t effective_mtry(std::size_t p) const;
  void validate() const;
};

// Variant names used by the command line and the study tables:
// wsquared_wgini, wosquared_wgini, wsquared_wogini, wosquared_wogini.
void apply_variant(MufConfig& config, const std::string& name);
std::string variant_name(const MufConfig& config);
const char* to_string(PredictionRule rule);
PredictionRule parse_prediction_rule(const std::string& text);

enum class NodeType { kLeaf, kBinary, kMultiway };

struct TreeNode {
  NodeType type = NodeType::kLeaf;
  std::size_t covariate = 0;
  // One point for binary nodes, K-1 ordered points for a K-way node.
  std::vector<double> points;
  // Child ids ordered by interval; binary nodes list left then right.
  std::vector<std::size_t> children;
  // Child per global class, -1 for classes absent at the node. Empty for
  // leaves and for Gini binary nodes.
  std::vector<int> assignment;
  // In-bag class counts; filled for leaves only.
  std::vector<std::uint32_t> class_counts;
  // In-bag observations reaching the node.
  std::size_t n_in_bag = 0;

  bool is_leaf() const { return type == NodeType::kLeaf; }
  std::size_t route(double x) const { return children[route_multiway(points, x)]; }
};

struct Tree {
  std::vector<TreeNode> nodes;
  // Sorted in-bag observation indices.
  std::vector<std::size_t> in_bag;

  std::vector<std::size_t> out_of_bag(std::size_t n) const;
  std::size_t depth() const;
  // Leaf reached by row `row` of `data`.
  std::size_t leaf_for(const Dataset& data, std::size_t row) const;
};

// Covariate schema as seen before nominal encoding, plus the encodings, so
// raw files can be mapped onto the model.
struct ModelSchema {
  std::vector<CovariateInfo> covariates;
  std::vector<std::string> class_names;
  std::vector<CategoryEncoding> encodings;
};

struct MultiForestModel {
  static constexpr int kFormatVersion = 1;

  MufConfig config;
  ModelSchema schema;
  std::size_t n_observations = 0;
  std::string training_fingerprint;
  std::vector<Tree> trees;

  int n_classes() const { return static_cast<int>(schema.class_names.size()); }
  std::size_t p() const { return schema.covariates.size(); }
};

// Leaf or split for one node. nullopt means the node is terminal: it is
// pure, holds at most nmin observations, or no covariate can be split.
std::optional<SplitDecision> grow_node(const NodeView& node, const MufConfig& config, std::size_t mtry,
                                       Rng& rng);

Tree grow_tree(const Dataset& data, std::vector<std::size_t> in_bag, const MufConfig& config, Rng& rng);

// Trains on an encoded dataset (no nominal covariates). Tree b uses the
// stream derive_seed(seed, {b}); results do not depend on `workers`.
MultiForestModel train(const Dataset& data, const MufConfig& config, std::size_t workers = 1);

// Orders and encodes nominal covariates, then trains. The model keeps the
// raw schema and encodings.
MultiForestModel fit(const Dataset& raw, const MufConfig& config, std::size_t workers = 1);

// Maps a raw dataset onto the model: covariates and classes by name,
// nominal levels by label, then the stored encodings. Unknown nominal levels
// take the middle rank ceil((n_cat + 1) / 2).
Dataset conform_to_model(const Dataset& raw, const ModelSchema& schema);

// Reads covariates named in the schema from a delimited file; other columns
// are ignored. Labels are read from `outcome_column` when it exists and are
// otherwise set to class 0.
Dataset load_prediction_data(const std::string& path, const ModelSchema& schema,
                             const std::string& outcome_column = {});

// Row-major n x C matrix of averaged leaf class distributions.
std::vector<double> predict_proba(const MultiForestModel& model, const Dataset& data, std::size_t workers = 1);

// 0-based class indices; argmax ties go to the lowest class.
std::vector<int> predict_class(const MultiForestModel& model, const Dataset& data, PredictionRule rule,
                               std::size_t workers = 1);

std::size_t argmax_lowest(std::span<const double> row);

struct ModelSummary {
  std::size_t trees = 0;
  std::size_t nodes = 0;
  std::size_t leaves = 0;
  std::size_t multiway_nodes = 0;
  std::size_t binary_nodes = 0;
  double mean_depth = 0.0;
  std::size_t max_depth = 0;
};

ModelSummary summarize(const MultiForestModel& model);

}  // namespace mufor
