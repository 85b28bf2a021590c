#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mufor/forest.h"
#include "mufor/simulation.h"

namespace mufor {

enum class VimMeasure { kMultiClass, kDiscriminatory, kDifference, kPermutation };

// "multi_class", "discriminatory", "difference", "permutation".
const char* to_string(VimMeasure measure);
VimMeasure parse_measure(const std::string& text);

struct RoleComparison {
  CovariateRole higher;
  CovariateRole lower;
  std::string name() const;
};

// Every informative role against noise, then every class-associated role
// against each group role present.
std::vector<RoleComparison> comparisons_for(int n_classes);

struct StudyConfig {
  std::vector<int> classes = {4};
  std::vector<std::size_t> sizes = {1000};
  int repetitions = 100;
  // Forest settings; its seed is replaced per repetition.
  MufConfig forest;
  std::vector<VimMeasure> measures = {VimMeasure::kMultiClass, VimMeasure::kDiscriminatory,
                                      VimMeasure::kDifference, VimMeasure::kPermutation};
  std::uint64_t seed = 1;
  std::size_t workers = 1;
};

// VIM values of one simulated dataset. The permutation measure comes from a
// binary-only forest (multiway probability 0) with otherwise equal settings,
// standing in for a conventional forest.
struct RepetitionVims {
  SimDataset sim;
  std::vector<double> multi_class;
  std::vector<double> discriminatory;
  std::vector<double> permutation;

  std::vector<double> values(VimMeasure measure) const;
};

RepetitionVims score_repetition(int n_classes, std::size_t n, std::uint64_t seed, const MufConfig& forest,
                                bool with_permutation, std::size_t workers = 1);

struct StudyRawRow {
  int n_classes = 0;
  std::size_t n = 0;
  int repetition = 0;
  std::string comparison;
  std::string method;
  VimMeasure measure = VimMeasure::kMultiClass;
  double auc = 0.0;
};

struct StudyRoleRow {
  int n_classes = 0;
  std::size_t n = 0;
  int repetition = 0;
  std::string method;
  VimMeasure measure = VimMeasure::kMultiClass;
  CovariateRole role = CovariateRole::kNoise;
  double mean_vim = 0.0;
};

struct StudySummaryRow {
  int n_classes = 0;
  std::size_t n = 0;
  std::string comparison;
  std::string method;
  VimMeasure measure = VimMeasure::kMultiClass;
  double mean_auc = 0.0;
  double ci_lower = 0.0;
  double ci_upper = 0.0;
  std::size_t n_datasets = 0;
};

struct StudyResult {
  std::vector<StudySummaryRow> summary;
  std::vector<StudyRawRow> raw;
  std::vector<StudyRoleRow> roles;
};

StudyResult run_simulation_study(const StudyConfig& config);

const StudySummaryRow* find_summary(const StudyResult& result, int n_classes, std::size_t n,
                                    const std::string& comparison, VimMeasure measure);

std::string format_study_summary(const std::vector<StudySummaryRow>& rows);
std::string format_study_raw(const std::vector<StudyRawRow>& rows);
std::string format_study_roles(const std::vector<StudyRoleRow>& rows);

}  // namespace mufor
