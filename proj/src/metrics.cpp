#include "mufor/metrics.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "mufor/error.h"

namespace mufor {

double auc_two_groups(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) fail(ErrorKind::kInvalidArgument, "auc needs two nonempty groups");
  // Mann-Whitney U from midranks of the pooled sample.
  std::vector<std::pair<double, int>> pooled;
  pooled.reserve(a.size() + b.size());
  for (double v : a) pooled.emplace_back(v, 0);
  for (double v : b) pooled.emplace_back(v, 1);
  std::sort(pooled.begin(), pooled.end());
  double rank_sum_a = 0.0;
  for (std::size_t i = 0; i < pooled.size();) {
    std::size_t j = i;
    while (j < pooled.size() && pooled[j].first == pooled[i].first) ++j;
    const double midrank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k) {
      if (pooled[k].second == 0) rank_sum_a += midrank;
    }
    i = j;
  }
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  return (rank_sum_a - na * (na + 1) / 2.0) / (na * nb);
}

MeanCi mean_auc_ci(std::span<const double> values) {
  MeanCi out;
  out.count = values.size();
  const double nan = std::numeric_limits<double>::quiet_NaN();
  if (values.empty()) {
    out.mean = out.sd = out.lower = out.upper = nan;
    return out;
  }
  const double m = static_cast<double>(values.size());
  out.mean = std::accumulate(values.begin(), values.end(), 0.0) / m;
  if (values.size() < 2) {
    out.sd = out.lower = out.upper = nan;
    return out;
  }
  double ss = 0.0;
  for (double v : values) ss += (v - out.mean) * (v - out.mean);
  out.sd = std::sqrt(ss / (m - 1.0));
  const double half = 1.96 * out.sd / std::sqrt(m);
  out.lower = out.mean - half;
  out.upper = out.mean + half;
  out.ci_defined = true;
  return out;
}

std::vector<double> one_vs_rest_aucs(std::span<const double> proba, std::span<const int> labels,
                                     std::size_t n_classes) {
  const std::size_t n = labels.size();
  if (proba.size() != n * n_classes) fail(ErrorKind::kInvalidArgument, "probability matrix size mismatch");
  std::vector<double> out(n_classes, std::numeric_limits<double>::quiet_NaN());
  std::vector<double> pos;
  std::vector<double> neg;
  for (std::size_t c = 0; c < n_classes; ++c) {
    pos.clear();
    neg.clear();
    for (std::size_t i = 0; i < n; ++i) {
      (static_cast<std::size_t>(labels[i]) == c ? pos : neg).push_back(proba[i * n_classes + c]);
    }
    if (!pos.empty() && !neg.empty()) out[c] = auc_two_groups(pos, neg);
  }
  return out;
}

namespace {

double weighted_auc(std::span<const double> proba, std::span<const int> labels, std::size_t n_classes,
                    bool by_frequency) {
  std::vector<double> aucs = one_vs_rest_aucs(proba, labels, n_classes);
  std::vector<double> freq(n_classes, 0.0);
  for (int y : labels) freq[static_cast<std::size_t>(y)] += 1.0;
  double num = 0.0;
  double den = 0.0;
  for (std::size_t c = 0; c < n_classes; ++c) {
    if (std::isnan(aucs[c])) continue;
    const double w = by_frequency ? freq[c] : 1.0;
    num += w * aucs[c];
    den += w;
  }
  return den == 0.0 ? std::numeric_limits<double>::quiet_NaN() : num / den;
}

}  // namespace

double aunu(std::span<const double> proba, std::span<const int> labels, std::size_t n_classes) {
  return weighted_auc(proba, labels, n_classes, false);
}

double aunp(std::span<const double> proba, std::span<const int> labels, std::size_t n_classes) {
  return weighted_auc(proba, labels, n_classes, true);
}

double brier(std::span<const double> proba, std::span<const int> labels, std::size_t n_classes) {
  const std::size_t n = labels.size();
  if (proba.size() != n * n_classes) fail(ErrorKind::kInvalidArgument, "probability matrix size mismatch");
  if (n == 0) fail(ErrorKind::kInvalidArgument, "brier of an empty sample");
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < n_classes; ++c) {
      const double d = proba[i * n_classes + c] - (static_cast<std::size_t>(labels[i]) == c ? 1.0 : 0.0);
      total += d * d;
    }
  }
  return total / static_cast<double>(n);
}

double accuracy(std::span<const int> predicted, std::span<const int> labels) {
  if (predicted.size() != labels.size()) fail(ErrorKind::kInvalidArgument, "length mismatch");
  if (labels.empty()) fail(ErrorKind::kInvalidArgument, "accuracy of an empty sample");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) hits += predicted[i] == labels[i];
  return static_cast<double>(hits) / static_cast<double>(labels.size());
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(values.begin(), values.end());
  const double h = (static_cast<double>(values.size()) - 1.0) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

}  // namespace mufor
