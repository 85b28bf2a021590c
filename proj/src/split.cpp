#include "mufor/split.h"

#include <algorithm>
#include <numeric>

#include "mufor/error.h"

namespace mufor {
namespace {

double transform(double proportion, ProportionVariant variant) {
  return variant == ProportionVariant::kSquared ? proportion * proportion : proportion;
}

// Class counts per child for a partition of the node's unique values.
struct ChildCounts {
  std::size_t n_local = 0;
  std::size_t n_children = 0;
  std::vector<std::uint32_t> counts;  // child-major: counts[k * n_local + c]
  std::vector<std::uint32_t> sizes;

  std::uint32_t count(std::size_t c, std::size_t k) const { return counts[k * n_local + c]; }
  double proportion(std::size_t c, std::size_t k) const {
    return sizes[k] == 0 ? 0.0 : static_cast<double>(count(c, k)) / sizes[k];
  }
};

ChildCounts child_counts(const CovariateProfile& prof, std::span<const std::size_t> cuts) {
  ChildCounts out;
  out.n_local = prof.n_local;
  out.n_children = cuts.size() + 1;
  out.counts.assign(out.n_children * out.n_local, 0);
  out.sizes.assign(out.n_children, 0);
  std::size_t prev = 0;
  for (std::size_t k = 0; k < out.n_children; ++k) {
    std::size_t next = k < cuts.size() ? cuts[k] : prof.n_unique();
    for (std::size_t c = 0; c < out.n_local; ++c) {
      std::uint32_t v = prof.count(next, c) - prof.count(prev, c);
      out.counts[k * out.n_local + c] = v;
      out.sizes[k] += v;
    }
    prev = next;
  }
  return out;
}

// Each class goes to the child with its largest proportion; ties are broken
// uniformly at random. Comparisons are exact on the integer counts.
std::vector<std::size_t> argmax_assignment(const ChildCounts& cc, Rng& rng) {
  std::vector<std::size_t> result(cc.n_local);
  std::vector<std::size_t> best;
  for (std::size_t c = 0; c < cc.n_local; ++c) {
    best.clear();
    std::uint64_t best_num = 0;
    std::uint64_t best_den = 1;
    for (std::size_t k = 0; k < cc.n_children; ++k) {
      if (cc.sizes[k] == 0) continue;
      const std::uint64_t num = cc.count(c, k);
      const std::uint64_t den = cc.sizes[k];
      if (best.empty() || num * best_den > best_num * den) {
        best.assign(1, k);
        best_num = num;
        best_den = den;
      } else if (num * best_den == best_num * den) {
        best.push_back(k);
      }
    }
    MUFOR_CHECK(!best.empty(), "node without nonempty child");
    result[c] = best.size() == 1 ? best[0] : best[rng.uniform_index(best.size())];
  }
  return result;
}

ScoredAssignment finish(const ChildCounts& cc, const std::vector<std::size_t>& local_assignment,
                        const NodeView& node, ProportionVariant variant) {
  ScoredAssignment out;
  out.assignment.child.assign(static_cast<std::size_t>(node.data().n_classes()), -1);
  // p^2 * n_k / n_l = count * p / n_l and p * n_k / n_l = count / n_l. Summing
  // the numerators first keeps a perfect split at exactly 1.
  double numerator = 0.0;
  for (std::size_t c = 0; c < cc.n_local; ++c) {
    const std::size_t k = local_assignment[c];
    const double count = cc.count(c, k);
    numerator += variant == ProportionVariant::kSquared ? count * cc.proportion(c, k) : count;
    out.assignment.child[static_cast<std::size_t>(node.classes()[c])] = static_cast<int>(k);
  }
  out.score = numerator / static_cast<double>(node.size());
  return out;
}

ScoredAssignment score_partition(const ChildCounts& cc, const NodeView& node, ProportionVariant variant,
                                 Rng& rng) {
  if (cc.n_children >= cc.n_local) {
    WeightMatrix weights(cc.n_local, cc.n_children);
    for (std::size_t c = 0; c < cc.n_local; ++c) {
      for (std::size_t k = 0; k < cc.n_children; ++k) weights(c, k) = transform(cc.proportion(c, k), variant);
    }
    return finish(cc, max_weight_assignment(weights), node, variant);
  }
  return finish(cc, argmax_assignment(cc, rng), node, variant);
}

// Midpoint that routes `lo` left and `hi` right even when the two are
// adjacent doubles.
double split_midpoint(double lo, double hi) {
  double mid = std::midpoint(lo, hi);
  return mid < hi ? mid : lo;
}

std::size_t cut_for_point(const CovariateProfile& prof, double point) {
  auto it = std::upper_bound(prof.values.begin(), prof.values.end(), point);
  std::size_t t = static_cast<std::size_t>(it - prof.values.begin());
  if (t == 0 || t >= prof.n_unique()) {
    fail(ErrorKind::kInvalidArgument, "split point outside the in-node value range");
  }
  return t;
}

// Gini gain of the binary split after unique value `cut`, read directly off
// the cumulative counts.
double gini_gain(const CovariateProfile& prof, std::size_t cut, std::size_t n_l) {
  const std::size_t last = prof.n_unique();
  double left_size = 0.0;
  double right_size = 0.0;
  for (std::size_t c = 0; c < prof.n_local; ++c) {
    left_size += prof.count(cut, c);
    right_size += prof.count(last, c) - prof.count(cut, c);
  }
  const double n = static_cast<double>(n_l);
  double parent = 1.0;
  double left = 1.0;
  double right = 1.0;
  for (std::size_t c = 0; c < prof.n_local; ++c) {
    const double l = prof.count(cut, c);
    const double t = prof.count(last, c);
    const double r = t - l;
    parent -= (t / n) * (t / n);
    if (left_size > 0) left -= (l / left_size) * (l / left_size);
    if (right_size > 0) right -= (r / right_size) * (r / right_size);
  }
  if (left_size == 0) left = 0.0;
  if (right_size == 0) right = 0.0;
  return parent - (left_size / n) * left - (right_size / n) * right;
}

}  // namespace

NodeView::NodeView(const Dataset& data, std::span<const std::size_t> rows)
    : data_(&data), rows_(rows), profiles_(data.p()) {
  const auto n_classes = static_cast<std::size_t>(data.n_classes());
  class_counts_.assign(n_classes, 0);
  for (std::size_t r : rows_) ++class_counts_[static_cast<std::size_t>(data.label(r))];
  local_of_class_.assign(n_classes, -1);
  for (std::size_t c = 0; c < n_classes; ++c) {
    if (class_counts_[c] > 0) {
      local_of_class_[c] = static_cast<int>(classes_.size());
      classes_.push_back(static_cast<int>(c));
    }
  }
}

NodeView::~NodeView() = default;

bool NodeView::has_split_point(std::size_t covariate) const {
  if (rows_.size() < 2) return false;
  auto col = data_->column(covariate);
  const double first = col[rows_[0]];
  for (std::size_t i = 1; i < rows_.size(); ++i) {
    if (col[rows_[i]] != first) return true;
  }
  return false;
}

const CovariateProfile& NodeView::profile(std::size_t covariate) const {
  auto& slot = profiles_[covariate];
  if (slot) return *slot;
  auto prof = std::make_unique<CovariateProfile>();
  prof->covariate = covariate;
  prof->n_local = classes_.size();
  auto col = data_->column(covariate);
  thread_local std::vector<std::pair<double, int>> pairs;
  pairs.clear();
  for (std::size_t r : rows_) pairs.emplace_back(col[r], local_of_class_[static_cast<std::size_t>(data_->label(r))]);
  std::sort(pairs.begin(), pairs.end());
  prof->values.reserve(pairs.size());
  prof->cumulative.reserve((pairs.size() + 1) * prof->n_local);
  prof->cumulative.assign(prof->n_local, 0);
  std::vector<std::uint32_t> running(prof->n_local, 0);
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    ++running[static_cast<std::size_t>(pairs[i].second)];
    if (i + 1 == pairs.size() || pairs[i + 1].first != pairs[i].first) {
      prof->values.push_back(pairs[i].first);
      prof->cumulative.insert(prof->cumulative.end(), running.begin(), running.end());
    }
  }
  slot = std::move(prof);
  return *slot;
}

std::size_t min_interval_size(std::size_t n_unique, std::size_t n_classes) {
  return std::max<std::size_t>(1, n_unique / (2 * n_classes));
}

std::vector<std::size_t> sample_spaced_cuts(std::size_t n_unique, std::size_t n_children,
                                            std::size_t min_size, Rng& rng) {
  if (n_children < 2 || min_size < 1 || n_children * min_size > n_unique) {
    fail(ErrorKind::kInvalidArgument, "infeasible spaced cut request");
  }
  // Interval sizes of at least min_size correspond one-to-one to
  // compositions of n_unique - n_children * (min_size - 1) into positive
  // parts, i.e. to (n_children - 1)-subsets of its interior positions.
  const std::size_t reduced = n_unique - n_children * (min_size - 1);
  const std::size_t range = reduced - 1;
  const std::size_t k = n_children - 1;
  // Floyd's subset sampling over {1, ..., range}.
  std::vector<std::size_t> chosen;
  chosen.reserve(k);
  for (std::size_t j = range - k + 1; j <= range; ++j) {
    std::size_t t = 1 + rng.uniform_index(j);
    if (std::find(chosen.begin(), chosen.end(), t) != chosen.end()) {
      chosen.push_back(j);
    } else {
      chosen.push_back(t);
    }
  }
  std::sort(chosen.begin(), chosen.end());
  for (std::size_t i = 0; i < k; ++i) chosen[i] += (i + 1) * (min_size - 1);
  return chosen;
}

std::vector<MultiwayCandidate> sample_candidates(const NodeView& node, std::size_t mtry,
                                                 std::size_t npervar, Rng& rng) {
  std::vector<std::size_t> splittable;
  for (std::size_t j = 0; j < node.data().p(); ++j) {
    if (node.has_split_point(j)) splittable.push_back(j);
  }
  std::vector<MultiwayCandidate> out;
  if (splittable.empty() || mtry == 0) return out;

  std::vector<std::size_t> drawn;
  if (splittable.size() >= mtry) {
    for (std::size_t i = 0; i < mtry; ++i) {
      std::size_t j = i + rng.uniform_index(splittable.size() - i);
      std::swap(splittable[i], splittable[j]);
      drawn.push_back(splittable[i]);
    }
  } else {
    for (std::size_t i = 0; i < mtry; ++i) drawn.push_back(splittable[rng.uniform_index(splittable.size())]);
  }

  // A single-class node still gets binary candidates.
  const std::size_t c_l = std::max<std::size_t>(2, node.n_local_classes());
  for (std::size_t covariate : drawn) {
    const CovariateProfile& prof = node.profile(covariate);
    const std::size_t n_unique = prof.n_unique();
    auto make = [&](std::vector<std::size_t> cuts) {
      MultiwayCandidate cand;
      cand.covariate = covariate;
      cand.points.reserve(cuts.size());
      for (std::size_t t : cuts) cand.points.push_back(split_midpoint(prof.values[t - 1], prof.values[t]));
      cand.cuts = std::move(cuts);
      out.push_back(std::move(cand));
    };
    if (n_unique <= c_l) {
      std::vector<std::size_t> cuts(n_unique - 1);
      std::iota(cuts.begin(), cuts.end(), std::size_t{1});
      make(std::move(cuts));
    } else {
      const std::size_t min_size = min_interval_size(n_unique, c_l);
      for (std::size_t r = 0; r < npervar; ++r) make(sample_spaced_cuts(n_unique, c_l, min_size, rng));
    }
  }
  return out;
}

std::vector<std::size_t> assign_classes(const WeightMatrix& proportions, ProportionVariant variant) {
  if (proportions.rows > proportions.cols) {
    fail(ErrorKind::kInvalidArgument, "assign_classes needs at least as many children as classes");
  }
  WeightMatrix w = proportions;
  for (double& v : w.data) v = transform(v, variant);
  return max_weight_assignment(w);
}

ScoredAssignment score_multiway(const MultiwayCandidate& candidate, const NodeView& node,
                                ProportionVariant variant, Rng& rng) {
  const CovariateProfile& prof = node.profile(candidate.covariate);
  return score_partition(child_counts(prof, candidate.cuts), node, variant, rng);
}

double score_binary_gini(std::size_t covariate, double point, const NodeView& node) {
  const CovariateProfile& prof = node.profile(covariate);
  std::size_t cut = cut_for_point(prof, point);
  return gini_gain(prof, cut, node.size());
}

ScoredAssignment score_binary_assign(std::size_t covariate, double point, const NodeView& node,
                                     ProportionVariant variant, Rng& rng) {
  const CovariateProfile& prof = node.profile(covariate);
  std::size_t cut = cut_for_point(prof, point);
  ChildCounts cc = child_counts(prof, std::span<const std::size_t>(&cut, 1));
  return finish(cc, argmax_assignment(cc, rng), node, variant);
}

SplitDecision select_best_split(const std::vector<MultiwayCandidate>& candidates, const NodeView& node,
                                const SplitConfig& config, Rng& rng) {
  if (candidates.empty()) fail(ErrorKind::kInvalidArgument, "no split candidates");
  const bool multiway = rng.bernoulli(config.multiway_probability);
  if (multiway) {
    MultiwaySplit best;
    bool have = false;
    for (const auto& cand : candidates) {
      ScoredAssignment s = score_multiway(cand, node, config.proportions, rng);
      if (!have || s.score > best.score) {
        best.covariate = cand.covariate;
        best.points = cand.points;
        best.assignment = std::move(s.assignment);
        best.score = s.score;
        have = true;
      }
    }
    return best;
  }

  BinarySplit best;
  bool have = false;
  for (const auto& cand : candidates) {
    const CovariateProfile& prof = node.profile(cand.covariate);
    for (std::size_t i = 0; i < cand.cuts.size(); ++i) {
      std::size_t cut = cand.cuts[i];
      ScoredAssignment s;
      if (config.binary == BinaryCriterion::kGini) {
        s.score = gini_gain(prof, cut, node.size());
      } else {
        ChildCounts cc = child_counts(prof, std::span<const std::size_t>(&cut, 1));
        s = finish(cc, argmax_assignment(cc, rng), node, config.proportions);
      }
      if (!have || s.score > best.score) {
        best.covariate = cand.covariate;
        best.point = cand.points[i];
        best.assignment = std::move(s.assignment);
        best.score = s.score;
        have = true;
      }
    }
  }
  return best;
}

}  // namespace mufor
