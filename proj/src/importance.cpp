#include "mufor/importance.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "mufor/error.h"
#include "mufor/format.h"
#include "mufor/parallel.h"

namespace mufor {
namespace {

constexpr std::uint64_t kNodeStream = 0x4e4f4445;  // per-node permutation
constexpr std::uint64_t kPermStream = 0x5045524d;  // permutation importance

double transform(double proportion, ProportionVariant variant) {
  return variant == ProportionVariant::kSquared ? proportion * proportion : proportion;
}

// OOB rows reaching every node of a tree. Node l holds
// rows[range[l].first, range[l].second).
struct OobRouting {
  std::vector<std::size_t> rows;
  std::vector<std::pair<std::size_t, std::size_t>> range;
};

OobRouting route_oob(const Tree& tree, const Dataset& data, std::vector<std::size_t> oob) {
  OobRouting r;
  r.rows = std::move(oob);
  r.range.assign(tree.nodes.size(), {0, 0});
  r.range[0] = {0, r.rows.size()};
  std::vector<std::size_t> scratch(r.rows.size());
  std::vector<std::size_t> child_of(r.rows.size());
  // Children have larger ids than parents, so one pass in id order works.
  for (std::size_t id = 0; id < tree.nodes.size(); ++id) {
    const TreeNode& node = tree.nodes[id];
    if (node.is_leaf()) continue;
    auto [begin, end] = r.range[id];
    const std::size_t k = node.children.size();
    std::vector<std::size_t> offsets(k + 1, 0);
    auto col = data.column(node.covariate);
    for (std::size_t i = begin; i < end; ++i) {
      child_of[i] = route_multiway(node.points, col[r.rows[i]]);
      ++offsets[child_of[i] + 1];
    }
    for (std::size_t c = 0; c < k; ++c) offsets[c + 1] += offsets[c];
    std::vector<std::size_t> fill(offsets.begin(), offsets.end() - 1);
    for (std::size_t i = begin; i < end; ++i) scratch[begin + fill[child_of[i]]++] = r.rows[i];
    std::copy(scratch.begin() + static_cast<std::ptrdiff_t>(begin),
              scratch.begin() + static_cast<std::ptrdiff_t>(end),
              r.rows.begin() + static_cast<std::ptrdiff_t>(begin));
    for (std::size_t c = 0; c < k; ++c) {
      r.range[node.children[c]] = {begin + offsets[c], begin + offsets[c + 1]};
    }
  }
  return r;
}

// True when no proper ancestor of each node splits on the node's covariate.
std::vector<bool> first_use_on_path(const Tree& tree) {
  const std::size_t m = tree.nodes.size();
  std::vector<std::size_t> parent(m, m);
  for (std::size_t id = 0; id < m; ++id) {
    for (std::size_t c : tree.nodes[id].children) parent[c] = id;
  }
  std::vector<bool> out(m, false);
  for (std::size_t id = 0; id < m; ++id) {
    if (tree.nodes[id].is_leaf()) continue;
    const std::size_t s = tree.nodes[id].covariate;
    bool clean = true;
    for (std::size_t a = parent[id]; a != m; a = parent[a]) {
      if (tree.nodes[a].covariate == s && !tree.nodes[a].is_leaf()) {
        clean = false;
        break;
      }
    }
    out[id] = clean;
  }
  return out;
}

double criterion_for_rows(const TreeNode& node, const Dataset& data, std::span<const std::size_t> rows,
                          bool permute, ProportionVariant variant, Rng& rng) {
  std::vector<std::size_t> sorted(rows.begin(), rows.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> values(sorted.size());
  std::vector<int> labels(sorted.size());
  auto col = data.column(node.covariate);
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    values[i] = col[sorted[i]];
    labels[i] = data.label(sorted[i]);
  }
  if (permute) rng.shuffle(std::span<double>(values));
  return node_criterion(node, values, labels, data.n_classes(), variant);
}

// Per-tree contribution vector for multi-way (multiway = true) or binary
// nodes. The permuted criterion is averaged over `permutations` draws.
std::vector<double> tree_split_vim(const Tree& tree, std::size_t tree_index, const Dataset& data,
                                   bool multiway, ProportionVariant variant, std::uint64_t seed,
                                   std::size_t permutations) {
  std::vector<double> out(data.p(), 0.0);
  const NodeType wanted = multiway ? NodeType::kMultiway : NodeType::kBinary;
  bool any = false;
  for (const TreeNode& node : tree.nodes) any = any || node.type == wanted;
  if (!any) return out;

  OobRouting routing = route_oob(tree, data, tree.out_of_bag(data.n()));
  std::vector<bool> eligible = first_use_on_path(tree);
  for (std::size_t id = 0; id < tree.nodes.size(); ++id) {
    const TreeNode& node = tree.nodes[id];
    if (node.type != wanted || !eligible[id]) continue;
    auto [begin, end] = routing.range[id];
    if (begin == end) continue;
    std::span<const std::size_t> rows(routing.rows.data() + begin, end - begin);
    Rng rng(node_permutation_seed(seed, tree_index, id));
    const double plain = criterion_for_rows(node, data, rows, false, variant, rng);
    double permuted = 0.0;
    for (std::size_t r = 0; r < permutations; ++r) permuted += criterion_for_rows(node, data, rows, true, variant, rng);
    permuted /= static_cast<double>(permutations);
    out[node.covariate] += static_cast<double>(node.n_in_bag) * (plain - permuted);
  }
  return out;
}

std::vector<double> split_vim(const MultiForestModel& model, const Dataset& data, bool multiway,
                              std::uint64_t seed, std::size_t workers, std::size_t permutations) {
  if (permutations == 0) fail(ErrorKind::kInvalidArgument, "need at least one permutation per node");
  if (data.p() != model.p() || data.n() != model.n_observations) {
    fail(ErrorKind::kSchemaMismatch, "dataset does not match the model's training data");
  }
  const std::size_t B = model.trees.size();
  std::vector<std::vector<double>> per_tree(B);
  parallel_for(B, resolve_workers(workers), [&](std::size_t b) {
    per_tree[b] = tree_split_vim(model.trees[b], b, data, multiway, model.config.proportions, seed, permutations);
  });
  std::vector<double> out(data.p(), 0.0);
  for (const auto& contrib : per_tree) {
    for (std::size_t j = 0; j < out.size(); ++j) out[j] += contrib[j];
  }
  for (double& v : out) v /= static_cast<double>(B);
  return out;
}

std::vector<int> leaf_classes(const Tree& tree) {
  std::vector<int> out(tree.nodes.size(), -1);
  std::vector<double> dist;
  for (std::size_t id = 0; id < tree.nodes.size(); ++id) {
    const TreeNode& node = tree.nodes[id];
    if (!node.is_leaf()) continue;
    dist.assign(node.class_counts.begin(), node.class_counts.end());
    out[id] = static_cast<int>(argmax_lowest(dist));
  }
  return out;
}

}  // namespace

std::uint64_t node_permutation_seed(std::uint64_t seed, std::size_t tree, std::size_t node) {
  return derive_seed(seed, {static_cast<std::uint64_t>(tree), static_cast<std::uint64_t>(node), kNodeStream});
}

std::uint64_t covariate_permutation_seed(std::uint64_t seed, std::size_t tree, std::size_t covariate) {
  return derive_seed(seed, {static_cast<std::uint64_t>(tree), static_cast<std::uint64_t>(covariate), kPermStream});
}

double node_criterion(const TreeNode& node, std::span<const double> values, std::span<const int> labels,
                      int n_classes, ProportionVariant variant) {
  MUFOR_CHECK(!node.is_leaf(), "criterion on a leaf");
  MUFOR_CHECK(values.size() == labels.size(), "values/labels length mismatch");
  const std::size_t k = node.children.size();
  const auto C = static_cast<std::size_t>(n_classes);
  std::vector<std::size_t> counts(k * C, 0);
  std::vector<std::size_t> sizes(k, 0);
  for (std::size_t i = 0; i < values.size(); ++i) {
    std::size_t child = route_multiway(node.points, values[i]);
    ++counts[child * C + static_cast<std::size_t>(labels[i])];
    ++sizes[child];
  }
  double total = 0.0;
  if (!node.assignment.empty()) {
    for (std::size_t c = 0; c < C; ++c) {
      const int child = node.assignment[c];
      if (child < 0) continue;
      const auto kc = static_cast<std::size_t>(child);
      if (sizes[kc] == 0) continue;
      total += transform(static_cast<double>(counts[kc * C + c]) / static_cast<double>(sizes[kc]), variant);
    }
    return total;
  }
  const double n = static_cast<double>(values.size());
  if (n == 0) return 0.0;
  for (std::size_t child = 0; child < k; ++child) {
    if (sizes[child] == 0) continue;
    const double size = static_cast<double>(sizes[child]);
    double purity = 0.0;
    for (std::size_t c = 0; c < C; ++c) {
      const double q = static_cast<double>(counts[child * C + c]) / size;
      purity += q * q;
    }
    total += (size / n) * purity;
  }
  return total;
}

double oob_multiway_criterion(const TreeNode& node, const Dataset& data, std::span<const std::size_t> rows,
                              bool permute, ProportionVariant variant, Rng& rng) {
  if (node.type != NodeType::kMultiway) fail(ErrorKind::kInvalidArgument, "node is not a multi-way split");
  return criterion_for_rows(node, data, rows, permute, variant, rng);
}

double oob_binary_criterion(const TreeNode& node, const Dataset& data, std::span<const std::size_t> rows,
                            bool permute, ProportionVariant variant, Rng& rng) {
  if (node.type != NodeType::kBinary) fail(ErrorKind::kInvalidArgument, "node is not a binary split");
  return criterion_for_rows(node, data, rows, permute, variant, rng);
}

bool multiclass_eligible(const CovariateInfo& info, int n_classes) {
  if (info.kind == CovariateKind::kContinuous) return true;
  return info.n_categories >= n_classes;
}

std::vector<double> compute_multiclass_vim(const MultiForestModel& model, const Dataset& data,
                                           std::uint64_t seed, std::size_t workers, std::size_t permutations) {
  std::vector<double> out = split_vim(model, data, true, seed, workers, permutations);
  for (std::size_t j = 0; j < out.size(); ++j) {
    if (!multiclass_eligible(model.schema.covariates[j], model.n_classes())) {
      out[j] = std::numeric_limits<double>::quiet_NaN();
    }
  }
  return out;
}

std::vector<double> compute_discriminatory_vim(const MultiForestModel& model, const Dataset& data,
                                               std::uint64_t seed, std::size_t workers, std::size_t permutations) {
  return split_vim(model, data, false, seed, workers, permutations);
}

std::vector<double> compute_permutation_vim(const MultiForestModel& model, const Dataset& data,
                                            std::uint64_t seed, std::size_t workers) {
  if (data.p() != model.p() || data.n() != model.n_observations) {
    fail(ErrorKind::kSchemaMismatch, "dataset does not match the model's training data");
  }
  const std::size_t B = model.trees.size();
  const std::size_t p = data.p();
  std::vector<std::vector<double>> per_tree(B);
  std::vector<char> has_oob(B, 0);
  parallel_for(B, resolve_workers(workers), [&](std::size_t b) {
    const Tree& tree = model.trees[b];
    std::vector<double> delta(p, 0.0);
    std::vector<std::size_t> oob = tree.out_of_bag(data.n());
    if (oob.empty()) {
      per_tree[b] = std::move(delta);
      return;
    }
    has_oob[b] = 1;
    const std::vector<int> leaf_class = leaf_classes(tree);
    std::size_t base_errors = 0;
    for (std::size_t r : oob) base_errors += leaf_class[tree.leaf_for(data, r)] != data.label(r);

    std::vector<bool> used(p, false);
    for (const TreeNode& node : tree.nodes) {
      if (!node.is_leaf()) used[node.covariate] = true;
    }
    std::vector<double> permuted(oob.size());
    for (std::size_t s = 0; s < p; ++s) {
      if (!used[s]) continue;
      auto col = data.column(s);
      for (std::size_t i = 0; i < oob.size(); ++i) permuted[i] = col[oob[i]];
      Rng rng(covariate_permutation_seed(seed, b, s));
      rng.shuffle(std::span<double>(permuted));
      std::size_t errors = 0;
      for (std::size_t i = 0; i < oob.size(); ++i) {
        std::size_t id = 0;
        while (!tree.nodes[id].is_leaf()) {
          const TreeNode& node = tree.nodes[id];
          const double x = node.covariate == s ? permuted[i] : data.value(oob[i], node.covariate);
          id = node.route(x);
        }
        errors += leaf_class[id] != data.label(oob[i]);
      }
      delta[s] = (static_cast<double>(errors) - static_cast<double>(base_errors)) / static_cast<double>(oob.size());
    }
    per_tree[b] = std::move(delta);
  });
  std::vector<double> out(p, 0.0);
  std::size_t counted = 0;
  for (std::size_t b = 0; b < B; ++b) {
    if (!has_oob[b]) continue;
    ++counted;
    for (std::size_t j = 0; j < p; ++j) out[j] += per_tree[b][j];
  }
  for (double& v : out) {
    v = counted == 0 ? std::numeric_limits<double>::quiet_NaN() : v / static_cast<double>(counted);
  }
  return out;
}

VimReport compute_importance(const MultiForestModel& model, const Dataset& raw, const VimOptions& options) {
  if (raw.fingerprint() != model.training_fingerprint) {
    fail(ErrorKind::kSchemaMismatch, "dataset fingerprint does not match the model's training data");
  }
  Dataset data = conform_to_model(raw, model.schema);
  const std::uint64_t seed = options.seed.value_or(model.config.seed);
  const std::size_t p = data.p();
  const double nan = std::numeric_limits<double>::quiet_NaN();

  VimReport report;
  for (const auto& info : model.schema.covariates) {
    report.covariates.push_back(info.name);
    report.multi_class_defined.push_back(multiclass_eligible(info, model.n_classes()));
  }
  report.multi_class.assign(p, nan);
  report.discriminatory.assign(p, nan);
  report.permutation.assign(p, nan);
  if (options.multi_class) {
    report.multi_class = compute_multiclass_vim(model, data, seed, options.workers, options.node_permutations);
    report.has_multi_class = true;
  }
  if (options.discriminatory) {
    report.discriminatory = compute_discriminatory_vim(model, data, seed, options.workers, options.node_permutations);
    report.has_discriminatory = true;
  }
  if (options.permutation) {
    report.permutation = compute_permutation_vim(model, data, seed, options.workers);
    report.has_permutation = true;
  }
  return report;
}

std::string format_vim_table(const VimReport& report) {
  std::ostringstream out;
  out << "covariate,multi_class,discriminatory,permutation\n";
  for (std::size_t j = 0; j < report.covariates.size(); ++j) {
    out << csv_field(report.covariates[j]) << ',' << format_cell(report.multi_class[j]) << ','
        << format_cell(report.discriminatory[j]) << ',' << format_cell(report.permutation[j]) << '\n';
  }
  return out.str();
}

void write_vim_table(const VimReport& report, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::kIo, "cannot write '" + path + "'");
  out << format_vim_table(report);
  if (!out) fail(ErrorKind::kIo, "write failed for '" + path + "'");
}

}  // namespace mufor
