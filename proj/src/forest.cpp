#include "mufor/forest.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

#include "mufor/error.h"
#include "mufor/parallel.h"

namespace mufor {

std::size_t MufConfig::effective_mtry(std::size_t p) const {
  if (mtry > 0) return mtry;
  auto m = static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(p))));
  return std::max<std::size_t>(1, m);
}

void MufConfig::validate() const {
  if (ntree < 1) fail(ErrorKind::kInvalidArgument, "ntree must be at least 1");
  if (npervar < 1) fail(ErrorKind::kInvalidArgument, "npervar must be at least 1");
  if (nmin < 1) fail(ErrorKind::kInvalidArgument, "nmin must be at least 1");
  if (!(prop > 0.0 && prop <= 1.0)) fail(ErrorKind::kInvalidArgument, "prop must lie in (0, 1]");
  if (!(multiway_probability >= 0.0 && multiway_probability <= 1.0)) {
    fail(ErrorKind::kInvalidArgument, "multiway probability must lie in [0, 1]");
  }
}

void apply_variant(MufConfig& config, const std::string& name) {
  if (name == "wsquared_wgini") {
    config.proportions = ProportionVariant::kSquared;
    config.binary = BinaryCriterion::kGini;
  } else if (name == "wosquared_wgini") {
    config.proportions = ProportionVariant::kNonSquared;
    config.binary = BinaryCriterion::kGini;
  } else if (name == "wsquared_wogini") {
    config.proportions = ProportionVariant::kSquared;
    config.binary = BinaryCriterion::kAssignClasses;
  } else if (name == "wosquared_wogini") {
    config.proportions = ProportionVariant::kNonSquared;
    config.binary = BinaryCriterion::kAssignClasses;
  } else {
    fail(ErrorKind::kInvalidArgument, "unknown variant '" + name + "'");
  }
}

std::string variant_name(const MufConfig& config) {
  std::string out = config.proportions == ProportionVariant::kSquared ? "wsquared" : "wosquared";
  out += config.binary == BinaryCriterion::kGini ? "_wgini" : "_wogini";
  return out;
}

const char* to_string(PredictionRule rule) {
  return rule == PredictionRule::kMajorityVote ? "majority_vote" : "max_probability";
}

PredictionRule parse_prediction_rule(const std::string& text) {
  if (text == "max_probability") return PredictionRule::kMaxProbability;
  if (text == "majority_vote") return PredictionRule::kMajorityVote;
  fail(ErrorKind::kInvalidArgument, "unknown prediction rule '" + text + "'");
}

std::vector<std::size_t> Tree::out_of_bag(std::size_t n) const {
  std::vector<std::size_t> out;
  out.reserve(n - std::min(n, in_bag.size()));
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (k < in_bag.size() && in_bag[k] == i) {
      ++k;
    } else {
      out.push_back(i);
    }
  }
  return out;
}

std::size_t Tree::depth() const {
  if (nodes.empty()) return 0;
  std::vector<std::size_t> level(nodes.size(), 0);
  std::size_t deepest = 0;
  // Children always have larger ids than their parent.
  for (std::size_t id = 0; id < nodes.size(); ++id) {
    deepest = std::max(deepest, level[id]);
    for (std::size_t child : nodes[id].children) level[child] = level[id] + 1;
  }
  return deepest;
}

std::size_t Tree::leaf_for(const Dataset& data, std::size_t row) const {
  std::size_t id = 0;
  while (!nodes[id].is_leaf()) {
    const TreeNode& node = nodes[id];
    id = node.route(data.value(row, node.covariate));
  }
  return id;
}

std::optional<SplitDecision> grow_node(const NodeView& node, const MufConfig& config, std::size_t mtry,
                                       Rng& rng) {
  if (node.is_pure() || node.size() <= config.nmin) return std::nullopt;
  std::vector<MultiwayCandidate> candidates = sample_candidates(node, mtry, config.npervar, rng);
  if (candidates.empty()) return std::nullopt;
  SplitConfig sc;
  sc.mtry = mtry;
  sc.npervar = config.npervar;
  sc.multiway_probability = config.multiway_probability;
  sc.proportions = config.proportions;
  sc.binary = config.binary;
  return select_best_split(candidates, node, sc, rng);
}

Tree grow_tree(const Dataset& data, std::vector<std::size_t> in_bag, const MufConfig& config, Rng& rng) {
  Tree tree;
  std::sort(in_bag.begin(), in_bag.end());
  tree.in_bag = in_bag;
  const std::size_t mtry = config.effective_mtry(data.p());
  const auto n_classes = static_cast<std::size_t>(data.n_classes());

  std::vector<std::size_t> rows = std::move(in_bag);
  std::vector<std::size_t> scratch(rows.size());
  std::vector<std::size_t> child_of(rows.size());

  struct Pending {
    std::size_t id;
    std::size_t begin;
    std::size_t end;
  };
  std::vector<Pending> stack;
  tree.nodes.emplace_back();
  stack.push_back({0, 0, rows.size()});

  while (!stack.empty()) {
    Pending cur = stack.back();
    stack.pop_back();
    std::span<const std::size_t> span(rows.data() + cur.begin, cur.end - cur.begin);
    NodeView view(data, span);
    std::optional<SplitDecision> decision = grow_node(view, config, mtry, rng);

    TreeNode node;
    node.n_in_bag = span.size();
    if (!decision) {
      node.type = NodeType::kLeaf;
      node.class_counts.resize(n_classes);
      for (std::size_t c = 0; c < n_classes; ++c) {
        node.class_counts[c] = static_cast<std::uint32_t>(view.class_counts()[c]);
      }
      tree.nodes[cur.id] = std::move(node);
      continue;
    }
    if (auto* m = std::get_if<MultiwaySplit>(&*decision)) {
      node.type = NodeType::kMultiway;
      node.covariate = m->covariate;
      node.points = std::move(m->points);
      node.assignment = std::move(m->assignment.child);
    } else {
      auto& b = std::get<BinarySplit>(*decision);
      node.type = NodeType::kBinary;
      node.covariate = b.covariate;
      node.points = {b.point};
      node.assignment = std::move(b.assignment.child);
    }

    // Stable counting-sort partition of the node's rows by child.
    const std::size_t k = node.points.size() + 1;
    std::vector<std::size_t> offsets(k + 1, 0);
    auto col = data.column(node.covariate);
    for (std::size_t i = cur.begin; i < cur.end; ++i) {
      std::size_t c = route_multiway(node.points, col[rows[i]]);
      child_of[i] = c;
      ++offsets[c + 1];
    }
    for (std::size_t c = 0; c < k; ++c) {
      MUFOR_CHECK(offsets[c + 1] > 0, "split produced an empty child");
      offsets[c + 1] += offsets[c];
    }
    std::vector<std::size_t> fill(offsets.begin(), offsets.end() - 1);
    for (std::size_t i = cur.begin; i < cur.end; ++i) scratch[cur.begin + fill[child_of[i]]++] = rows[i];
    std::copy(scratch.begin() + static_cast<std::ptrdiff_t>(cur.begin),
              scratch.begin() + static_cast<std::ptrdiff_t>(cur.end),
              rows.begin() + static_cast<std::ptrdiff_t>(cur.begin));

    const std::size_t first_child = tree.nodes.size();
    node.children.resize(k);
    for (std::size_t c = 0; c < k; ++c) node.children[c] = first_child + c;
    tree.nodes[cur.id] = std::move(node);
    tree.nodes.resize(first_child + k);
    for (std::size_t c = k; c-- > 0;) {
      stack.push_back({first_child + c, cur.begin + offsets[c], cur.begin + offsets[c + 1]});
    }
  }
  return tree;
}

MultiForestModel train(const Dataset& data, const MufConfig& config, std::size_t workers) {
  config.validate();
  if (data.p() == 0) fail(ErrorKind::kInvalidArgument, "dataset has no covariates");
  if (data.n() == 0) fail(ErrorKind::kInvalidArgument, "dataset has no observations");
  if (data.n_classes() < 3) fail(ErrorKind::kInvalidArgument, "outcome needs at least 3 classes");
  for (const auto& info : data.covariates()) {
    if (info.kind == CovariateKind::kNominal) {
      fail(ErrorKind::kInvalidArgument, "covariate '" + info.name + "' is nominal; encode it before training");
    }
  }

  MultiForestModel model;
  model.config = config;
  model.schema.covariates = data.covariates();
  model.schema.class_names = data.class_names();
  model.n_observations = data.n();
  model.training_fingerprint = data.fingerprint();
  model.trees.resize(config.ntree);

  const std::size_t n = data.n();
  const auto n_in = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::floor(config.prop * static_cast<double>(n) + 1e-9)));
  parallel_for(config.ntree, resolve_workers(workers), [&](std::size_t b) {
    Rng rng(derive_seed(config.seed, {static_cast<std::uint64_t>(b)}));
    std::vector<std::size_t> all(n);
    std::iota(all.begin(), all.end(), std::size_t{0});
    // Partial Fisher-Yates: the first n_in entries are a uniform subsample.
    for (std::size_t i = 0; i < n_in; ++i) std::swap(all[i], all[i + rng.uniform_index(n - i)]);
    all.resize(n_in);
    model.trees[b] = grow_tree(data, std::move(all), config, rng);
  });
  return model;
}

MultiForestModel fit(const Dataset& raw, const MufConfig& config, std::size_t workers) {
  std::vector<CategoryEncoding> encodings = order_all_nominal(raw);
  Dataset encoded = encode_dataset(raw, encodings);
  MultiForestModel model = train(encoded, config, workers);
  model.schema.covariates = raw.covariates();
  model.schema.encodings = std::move(encodings);
  model.training_fingerprint = raw.fingerprint();
  return model;
}

namespace {

const CategoryEncoding* encoding_for(const ModelSchema& schema, std::size_t covariate) {
  for (const auto& e : schema.encodings) {
    if (e.covariate == covariate) return &e;
  }
  return nullptr;
}

}  // namespace

Dataset conform_to_model(const Dataset& raw, const ModelSchema& schema) {
  const std::size_t n = raw.n();
  std::unordered_map<std::string, std::size_t> raw_index;
  for (std::size_t j = 0; j < raw.p(); ++j) raw_index[raw.covariate(j).name] = j;

  std::vector<CovariateInfo> covariates;
  std::vector<double> values;
  values.reserve(n * schema.covariates.size());
  for (std::size_t j = 0; j < schema.covariates.size(); ++j) {
    const CovariateInfo& info = schema.covariates[j];
    auto it = raw_index.find(info.name);
    if (it == raw_index.end()) fail(ErrorKind::kSchemaMismatch, "covariate '" + info.name + "' missing");
    const CovariateInfo& have = raw.covariate(it->second);
    auto col = raw.column(it->second);
    CovariateInfo out = info;
    if (info.kind == CovariateKind::kNominal) {
      const CategoryEncoding* enc = encoding_for(schema, j);
      if (enc == nullptr) fail(ErrorKind::kSchemaMismatch, "no encoding stored for '" + info.name + "'");
      std::unordered_map<std::string, int> code;
      for (std::size_t k = 0; k < info.levels.size(); ++k) code[info.levels[k]] = static_cast<int>(k) + 1;
      const int middle = (enc->n_categories() + 2) / 2;
      for (double v : col) {
        std::string label;
        if (have.kind == CovariateKind::kNominal) {
          label = have.levels[static_cast<std::size_t>(v) - 1];
        } else {
          fail(ErrorKind::kSchemaMismatch, "covariate '" + info.name + "' must be nominal");
        }
        auto found = code.find(label);
        values.push_back(found == code.end() ? middle : enc->rank(found->second));
      }
      out.kind = CovariateKind::kOrderedCategorical;
      out.levels.clear();
      out.n_categories = enc->n_categories();
    } else {
      if (have.kind == CovariateKind::kNominal) {
        fail(ErrorKind::kSchemaMismatch, "covariate '" + info.name + "' must be numeric");
      }
      values.insert(values.end(), col.begin(), col.end());
    }
    covariates.push_back(std::move(out));
  }

  std::unordered_map<std::string, int> class_index;
  for (std::size_t c = 0; c < schema.class_names.size(); ++c) {
    class_index[schema.class_names[c]] = static_cast<int>(c);
  }
  std::vector<int> labels(n, 0);
  const bool placeholder = raw.n_classes() == 1 && raw.class_names()[0] == "?";
  if (!placeholder) {
    for (std::size_t i = 0; i < n; ++i) {
      const std::string& name = raw.class_names()[static_cast<std::size_t>(raw.label(i))];
      auto found = class_index.find(name);
      if (found == class_index.end()) fail(ErrorKind::kSchemaMismatch, "unknown class '" + name + "'");
      labels[i] = found->second;
    }
  }
  return Dataset(std::move(covariates), std::move(values), std::move(labels), schema.class_names);
}

Dataset load_prediction_data(const std::string& path, const ModelSchema& schema,
                             const std::string& outcome_column) {
  LoadOptions opts;
  opts.min_classes = 1;
  opts.outcome_column = outcome_column;
  opts.has_outcome = !outcome_column.empty();
  for (const auto& info : schema.covariates) opts.schema[info.name] = info.kind;
  return conform_to_model(load_dataset(path, opts), schema);
}

std::size_t argmax_lowest(std::span<const double> row) {
  std::size_t best = 0;
  for (std::size_t c = 1; c < row.size(); ++c) {
    if (row[c] > row[best]) best = c;
  }
  return best;
}

namespace {

void check_conforms(const MultiForestModel& model, const Dataset& data) {
  if (data.p() != model.p()) fail(ErrorKind::kSchemaMismatch, "covariate count differs from the model");
  for (std::size_t j = 0; j < data.p(); ++j) {
    if (data.covariate(j).kind == CovariateKind::kNominal) {
      fail(ErrorKind::kSchemaMismatch, "nominal covariate '" + data.covariate(j).name + "' is not encoded");
    }
  }
}

}  // namespace

std::vector<double> predict_proba(const MultiForestModel& model, const Dataset& data, std::size_t workers) {
  check_conforms(model, data);
  const auto C = static_cast<std::size_t>(model.n_classes());
  std::vector<double> out(data.n() * C, 0.0);
  const double inv_trees = 1.0 / static_cast<double>(model.trees.size());
  parallel_for(data.n(), resolve_workers(workers), [&](std::size_t i) {
    double* row = out.data() + i * C;
    // Trees are summed in index order so results do not depend on workers.
    for (const Tree& tree : model.trees) {
      const TreeNode& leaf = tree.nodes[tree.leaf_for(data, i)];
      const double inv = 1.0 / static_cast<double>(leaf.n_in_bag);
      for (std::size_t c = 0; c < C; ++c) row[c] += leaf.class_counts[c] * inv;
    }
    for (std::size_t c = 0; c < C; ++c) row[c] *= inv_trees;
  });
  return out;
}

std::vector<int> predict_class(const MultiForestModel& model, const Dataset& data, PredictionRule rule,
                               std::size_t workers) {
  const auto C = static_cast<std::size_t>(model.n_classes());
  std::vector<int> out(data.n());
  if (rule == PredictionRule::kMaxProbability) {
    std::vector<double> proba = predict_proba(model, data, workers);
    for (std::size_t i = 0; i < data.n(); ++i) {
      out[i] = static_cast<int>(argmax_lowest(std::span<const double>(proba.data() + i * C, C)));
    }
    return out;
  }
  check_conforms(model, data);
  parallel_for(data.n(), resolve_workers(workers), [&](std::size_t i) {
    std::vector<double> votes(C, 0.0);
    std::vector<double> dist(C);
    for (const Tree& tree : model.trees) {
      const TreeNode& leaf = tree.nodes[tree.leaf_for(data, i)];
      for (std::size_t c = 0; c < C; ++c) dist[c] = leaf.class_counts[c];
      votes[argmax_lowest(dist)] += 1.0;
    }
    out[i] = static_cast<int>(argmax_lowest(votes));
  });
  return out;
}

ModelSummary summarize(const MultiForestModel& model) {
  ModelSummary s;
  s.trees = model.trees.size();
  double depth_sum = 0.0;
  for (const Tree& tree : model.trees) {
    s.nodes += tree.nodes.size();
    for (const TreeNode& node : tree.nodes) {
      switch (node.type) {
        case NodeType::kLeaf:
          ++s.leaves;
          break;
        case NodeType::kBinary:
          ++s.binary_nodes;
          break;
        case NodeType::kMultiway:
          ++s.multiway_nodes;
          break;
      }
    }
    std::size_t d = tree.depth();
    depth_sum += static_cast<double>(d);
    s.max_depth = std::max(s.max_depth, d);
  }
  s.mean_depth = s.trees == 0 ? 0.0 : depth_sum / static_cast<double>(s.trees);
  return s;
}

}  // namespace mufor
