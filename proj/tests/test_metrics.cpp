#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "mufor/metrics.h"
#include "mufor/random.h"

namespace mufor {
namespace {

double pair_count_auc(const std::vector<double>& a, const std::vector<double>& b) {
  double wins = 0.0;
  for (double x : a) {
    for (double y : b) wins += x > y ? 1.0 : (x == y ? 0.5 : 0.0);
  }
  return wins / static_cast<double>(a.size() * b.size());
}

TEST(Metrics, AucWorkedExamples) {
  EXPECT_EQ(auc_two_groups(std::vector<double>{0.9, 0.8, 0.7}, std::vector<double>{0.5, 0.4, 0.1}), 1.0);
  const std::vector<double> a = {0.9, 0.4, 0.7};
  const std::vector<double> b = {0.5, 0.8, 0.1};
  EXPECT_NEAR(auc_two_groups(a, b), 6.0 / 9.0, 1e-15);
  EXPECT_NEAR(pair_count_auc(a, b), 6.0 / 9.0, 1e-15);
  EXPECT_EQ(auc_two_groups(std::vector<double>{1, 2}, std::vector<double>{1, 2}), 0.5);
}

TEST(Metrics, AucMatchesPairCountAndIsComplementary) {
  Rng rng(1);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<double> a(1 + rng.uniform_index(12));
    std::vector<double> b(1 + rng.uniform_index(12));
    for (double& v : a) v = static_cast<double>(rng.uniform_index(6));
    for (double& v : b) v = static_cast<double>(rng.uniform_index(6));
    const double ab = auc_two_groups(a, b);
    EXPECT_NEAR(ab, pair_count_auc(a, b), 1e-12);
    EXPECT_NEAR(ab + auc_two_groups(b, a), 1.0, 1e-12);
    // Invariant under a strictly increasing transform.
    std::vector<double> ta = a;
    std::vector<double> tb = b;
    for (double& v : ta) v = std::exp(v) - 3.0;
    for (double& v : tb) v = std::exp(v) - 3.0;
    EXPECT_NEAR(auc_two_groups(ta, tb), ab, 1e-12);
  }
}

TEST(Metrics, MeanCi) {
  auto flat = mean_auc_ci(std::vector<double>{0.8, 0.8, 0.8});
  EXPECT_NEAR(flat.mean, 0.8, 1e-15);
  EXPECT_NEAR(flat.lower, 0.8, 1e-15);
  EXPECT_NEAR(flat.upper, 0.8, 1e-15);
  EXPECT_TRUE(flat.ci_defined);

  auto two = mean_auc_ci(std::vector<double>{0.0, 1.0});
  EXPECT_EQ(two.mean, 0.5);
  // Sample SD of (0, 1) is sqrt(1/2), so the half-width is 1.96 / 2 = 0.98.
  const double half = 1.96 * std::sqrt(0.5) / std::sqrt(2.0);
  EXPECT_NEAR(half, 0.98, 1e-12);
  EXPECT_NEAR(two.sd, std::sqrt(0.5), 1e-15);
  EXPECT_NEAR(two.upper - two.mean, half, 1e-12);
  EXPECT_NEAR(two.mean - two.lower, half, 1e-12);

  auto one = mean_auc_ci(std::vector<double>{0.7});
  EXPECT_FALSE(one.ci_defined);
  EXPECT_TRUE(std::isnan(one.lower));
}

TEST(Metrics, CiWidthShrinksAsRootM) {
  std::vector<double> small = {0.0, 1.0, 0.0, 1.0};
  std::vector<double> large;
  for (int i = 0; i < 4; ++i) large.insert(large.end(), small.begin(), small.end());
  const auto s = mean_auc_ci(small);
  const auto l = mean_auc_ci(large);
  const double ratio = (s.upper - s.lower) / (l.upper - l.lower);
  // Same values repeated: sample SDs differ only by the n - 1 factor.
  EXPECT_NEAR(ratio, std::sqrt(16.0 / 4.0) * s.sd / l.sd, 1e-12);
}

TEST(Metrics, OneVsRestExamples) {
  // Two classes, scores for class 1 are (0.9, 0.6, 0.4, 0.2).
  const std::vector<double> proba = {0.9, 0.1, 0.6, 0.4, 0.4, 0.6, 0.2, 0.8};
  const std::vector<int> labels = {0, 0, 1, 1};
  const auto aucs = one_vs_rest_aucs(proba, labels, 2);
  EXPECT_EQ(aucs[0], 1.0);
  EXPECT_EQ(aucs[1], 1.0);

  const std::vector<double> uniform(12, 1.0 / 3.0);
  const std::vector<int> y3 = {0, 1, 2, 0};
  for (double a : one_vs_rest_aucs(uniform, y3, 3)) EXPECT_EQ(a, 0.5);
}

TEST(Metrics, OneVsRestAbsentClassIsUndefined) {
  const std::vector<double> proba = {0.5, 0.3, 0.2, 0.1, 0.8, 0.1};
  const std::vector<int> labels = {0, 1};
  const auto aucs = one_vs_rest_aucs(proba, labels, 3);
  EXPECT_TRUE(std::isnan(aucs[2]));
}

TEST(Metrics, AunuAunpWeightedSums) {
  // Class proportions (0.5, 0.25, 0.25); per-class AUCs (1, 0.5, 0.5).
  // Column 0 separates class 0 perfectly; columns 1 and 2 are constant.
  const std::vector<int> labels = {0, 0, 1, 2};
  const std::vector<double> proba = {0.9, 0.3, 0.3, 0.8, 0.3, 0.3, 0.2, 0.3, 0.3, 0.1, 0.3, 0.3};
  const auto aucs = one_vs_rest_aucs(proba, labels, 3);
  ASSERT_EQ(aucs[0], 1.0);
  ASSERT_EQ(aucs[1], 0.5);
  ASSERT_EQ(aucs[2], 0.5);
  EXPECT_NEAR(aunu(proba, labels, 3), 2.0 / 3.0, 1e-12);
  EXPECT_NEAR(aunp(proba, labels, 3), 0.75, 1e-12);
  EXPECT_NEAR((1.0 + 0.5 + 0.5) / 3.0, 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(0.5 * 1.0 + 0.25 * 0.5 + 0.25 * 0.5, 0.75, 1e-15);
}

TEST(Metrics, AunuEqualsAunpWhenBalanced) {
  Rng rng(2);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t C = 3 + rng.uniform_index(3);
    std::vector<int> labels;
    for (std::size_t c = 0; c < C; ++c) {
      for (int k = 0; k < 4; ++k) labels.push_back(static_cast<int>(c));
    }
    std::vector<double> proba(labels.size() * C);
    for (double& v : proba) v = rng.uniform01();
    EXPECT_NEAR(aunu(proba, labels, C), aunp(proba, labels, C), 1e-12);
  }
}

TEST(Metrics, AunuDropsAbsentClasses) {
  const std::vector<int> labels = {0, 0, 1, 1};
  const std::vector<double> proba = {0.9, 0.1, 0.0, 0.8, 0.2, 0.0, 0.3, 0.7, 0.0, 0.1, 0.9, 0.0};
  EXPECT_EQ(aunu(proba, labels, 3), 1.0);
  EXPECT_EQ(aunp(proba, labels, 3), 1.0);
}

TEST(Metrics, PerfectClassifier) {
  const std::vector<int> labels = {0, 1, 2, 1};
  std::vector<double> proba(12, 0.0);
  for (std::size_t i = 0; i < labels.size(); ++i) proba[i * 3 + static_cast<std::size_t>(labels[i])] = 1.0;
  EXPECT_EQ(aunu(proba, labels, 3), 1.0);
  EXPECT_EQ(aunp(proba, labels, 3), 1.0);
  EXPECT_EQ(brier(proba, labels, 3), 0.0);
}

TEST(Metrics, BrierExamples) {
  const std::vector<int> labels = {0, 1, 2};
  const std::vector<double> uniform(9, 1.0 / 3.0);
  EXPECT_NEAR(brier(uniform, labels, 3), 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(2.0 / 3.0, (2.0 / 3.0) * (2.0 / 3.0) + 2.0 * (1.0 / 3.0) * (1.0 / 3.0), 1e-15);
  std::vector<double> wrong(9, 0.0);
  for (std::size_t i = 0; i < 3; ++i) wrong[i * 3 + (i + 1) % 3] = 1.0;
  EXPECT_EQ(brier(wrong, labels, 3), 2.0);
}

TEST(Metrics, Accuracy) {
  EXPECT_EQ(accuracy(std::vector<int>{0, 1, 2}, std::vector<int>{0, 1, 2}), 1.0);
  EXPECT_EQ(accuracy(std::vector<int>{1, 2, 0}, std::vector<int>{0, 1, 2}), 0.0);
  EXPECT_EQ(accuracy(std::vector<int>{0, 1, 2, 0}, std::vector<int>{0, 1, 2, 1}), 0.75);
}

TEST(Metrics, QuantileType7) {
  const std::vector<double> v = {4, 1, 3, 2};
  EXPECT_EQ(quantile(v, 0.5), 2.5);
  EXPECT_EQ(quantile(v, 0.25), 1.75);
  EXPECT_EQ(quantile(v, 0.75), 3.25);
  EXPECT_EQ(quantile(v, 0.0), 1.0);
  EXPECT_EQ(quantile(v, 1.0), 4.0);
}

}  // namespace
}  // namespace mufor
