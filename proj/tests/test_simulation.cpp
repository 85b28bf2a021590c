#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>

#include "mufor/error.h"
#include "mufor/simulation.h"

namespace mufor {
namespace {

using Means = std::map<CovariateRole, std::vector<double>>;

// Class means transcribed from the design table, one entry per class.
const std::map<int, Means>& design_table() {
  static const std::map<int, Means> table = {
      {4,
       {{CovariateRole::kTwoGroups, {0, 0, 1.5, 1.5}},
        {CovariateRole::kClassAssoc1, {0, 0, 0, 1}},
        {CovariateRole::kClassAssoc2, {0, 0, 1, 2}},
        {CovariateRole::kClassAssoc3, {0, 0.75, 1.5, 2.25}}}},
      {6,
       {{CovariateRole::kTwoGroups, {0, 0, 0, 1.5, 1.5, 1.5}},
        {CovariateRole::kThreeGroups, {0, 0, 1, 1, 2, 2}},
        {CovariateRole::kClassAssoc1, {0, 0, 0, 0, 0, 1}},
        {CovariateRole::kClassAssoc2, {0, 0, 0, 0, 1, 2}},
        {CovariateRole::kClassAssoc3, {0, 0, 0, 0.75, 1.5, 2.25}}}},
      {10,
       {{CovariateRole::kTwoGroups, {0, 0, 0, 0, 0, 1.5, 1.5, 1.5, 1.5, 1.5}},
        {CovariateRole::kThreeGroups, {0, 0, 0, 0, 1, 1, 1, 2, 2, 2}},
        {CovariateRole::kClassAssoc1, {0, 0, 0, 0, 0, 0, 0, 0, 0, 1}},
        {CovariateRole::kClassAssoc2, {0, 0, 0, 0, 0, 0, 0, 0, 1, 2}},
        {CovariateRole::kClassAssoc3, {0, 0, 0, 0, 0, 0, 0.75, 0.75, 1.5, 2.25}},
        {CovariateRole::kClassAssoc4, {0, 0, 0, 0, 0.75, 0.75, 1.5, 1.5, 2.25, 3}}}},
  };
  return table;
}

TEST(Simulation, RoleMeansMatchDesignTable) {
  for (const auto& [C, roles] : design_table()) {
    std::vector<CovariateRole> expected_roles;
    for (const auto& [role, means] : roles) {
      EXPECT_EQ(role_means(role, C), means) << C << " " << to_string(role);
      expected_roles.push_back(role);
    }
    EXPECT_EQ(informative_roles(C), expected_roles);
    EXPECT_EQ(role_means(CovariateRole::kNoise, C), std::vector<double>(static_cast<std::size_t>(C), 0.0));
  }
  EXPECT_EQ(role_means(CovariateRole::kClassAssoc3, 4), (std::vector<double>{0, 0.75, 1.5, 2.25}));
}

TEST(Simulation, ColumnCountsAndRoleLayout) {
  const std::map<int, std::size_t> columns = {{4, 62}, {6, 65}, {10, 68}};
  for (const auto& [C, p] : columns) {
    const SimDataset sim = generate({C, 200, 1});
    EXPECT_EQ(sim.data.p(), p);
    EXPECT_EQ(sim.roles.size(), p);
    EXPECT_EQ(sim.data.n_classes(), C);
    for (std::size_t j = 0; j < 50; ++j) EXPECT_EQ(sim.roles[j], CovariateRole::kNoise);
    std::map<CovariateRole, int> count;
    for (CovariateRole r : sim.roles) ++count[r];
    for (const auto& [role, k] : count) {
      if (role != CovariateRole::kNoise) {
        EXPECT_EQ(k, 3);
      }
    }
    EXPECT_EQ(count.count(CovariateRole::kThreeGroups), C == 4 ? 0u : 1u);
    EXPECT_EQ(count.count(CovariateRole::kClassAssoc4), C == 10 ? 1u : 0u);
  }
}

TEST(Simulation, RejectsInvalidSettings) {
  EXPECT_THROW(generate({5, 100, 1}), Error);
  EXPECT_THROW(generate({3, 100, 1}), Error);
  EXPECT_THROW(generate({6, 5, 1}), Error);
  EXPECT_NO_THROW(generate({6, 6, 1}));
  EXPECT_THROW(role_means(CovariateRole::kThreeGroups, 4), Error);
  EXPECT_THROW(parse_role("bogus"), Error);
}

TEST(Simulation, BalancedAllocationWithLowRemainder) {
  const SimDataset sim = generate({6, 100, 3});
  std::vector<int> counts(6, 0);
  for (int y : sim.data.labels()) ++counts[static_cast<std::size_t>(y)];
  EXPECT_EQ(counts, (std::vector<int>{17, 17, 17, 17, 16, 16}));
}

TEST(Simulation, DeterministicAndShuffled) {
  const SimDataset a = generate({4, 300, 9});
  const SimDataset b = generate({4, 300, 9});
  const SimDataset c = generate({4, 300, 10});
  EXPECT_EQ(a.data.fingerprint(), b.data.fingerprint());
  EXPECT_NE(a.data.fingerprint(), c.data.fingerprint());
  // Label order carries no information: not sorted, not cyclic.
  bool sorted = std::is_sorted(a.data.labels().begin(), a.data.labels().end());
  EXPECT_FALSE(sorted);
  int cyclic = 0;
  for (std::size_t i = 0; i < a.data.n(); ++i) cyclic += a.data.label(i) == static_cast<int>(i % 4);
  EXPECT_LT(cyclic, 150);
}

TEST(Simulation, LawOfLargeNumbers) {
  const std::size_t n = 100000;
  for (const auto& [C, roles] : design_table()) {
    const SimDataset sim = generate({C, n, 42});
    const double per_class = static_cast<double>(n / static_cast<std::size_t>(C));
    for (std::size_t j = 0; j < sim.data.p(); ++j) {
      const auto expected = role_means(sim.roles[j], C);
      std::vector<double> sum(static_cast<std::size_t>(C), 0.0);
      std::vector<double> sum_sq(static_cast<std::size_t>(C), 0.0);
      std::vector<double> cnt(static_cast<std::size_t>(C), 0.0);
      double total = 0;
      for (std::size_t i = 0; i < n; ++i) {
        const auto y = static_cast<std::size_t>(sim.data.label(i));
        const double v = sim.data.value(i, j);
        sum[y] += v;
        sum_sq[y] += v * v;
        cnt[y] += 1;
        total += v;
      }
      if (sim.roles[j] == CovariateRole::kNoise) {
        EXPECT_NEAR(total / static_cast<double>(n), 0.0, 4.0 / std::sqrt(static_cast<double>(n)));
      }
      for (std::size_t c = 0; c < static_cast<std::size_t>(C); ++c) {
        const double mean = sum[c] / cnt[c];
        const double var = (sum_sq[c] - cnt[c] * mean * mean) / (cnt[c] - 1);
        EXPECT_NEAR(mean, expected[c], 5.0 / std::sqrt(per_class)) << "C=" << C << " col " << j;
        // Sample variance of a normal has sd sqrt(2 / (m - 1)).
        EXPECT_NEAR(var, 1.0, 5.0 * std::sqrt(2.0 / (per_class - 1))) << "C=" << C << " col " << j;
      }
    }
  }
}

TEST(Simulation, RolesSidecarRoundTrip) {
  const SimDataset sim = generate({10, 50, 2});
  const auto path = std::filesystem::temp_directory_path() / "mufor_test_roles.csv";
  write_roles(sim, path.string());
  EXPECT_EQ(load_roles(path.string(), sim.data), sim.roles);
  std::filesystem::remove(path);
  for (CovariateRole r : {CovariateRole::kNoise, CovariateRole::kTwoGroups, CovariateRole::kThreeGroups,
                          CovariateRole::kClassAssoc1, CovariateRole::kClassAssoc4}) {
    EXPECT_EQ(parse_role(to_string(r)), r);
  }
}

}  // namespace
}  // namespace mufor
