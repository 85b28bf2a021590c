#include "mufor/simstudy.h"

#include <map>
#include <sstream>
#include <tuple>

#include "mufor/error.h"
#include "mufor/format.h"
#include "mufor/importance.h"
#include "mufor/metrics.h"
#include "mufor/parallel.h"

namespace mufor {

const char* to_string(VimMeasure measure) {
  switch (measure) {
    case VimMeasure::kMultiClass:
      return "multi_class";
    case VimMeasure::kDiscriminatory:
      return "discriminatory";
    case VimMeasure::kDifference:
      return "difference";
    case VimMeasure::kPermutation:
      return "permutation";
  }
  return "multi_class";
}

VimMeasure parse_measure(const std::string& text) {
  for (auto m : {VimMeasure::kMultiClass, VimMeasure::kDiscriminatory, VimMeasure::kDifference,
                 VimMeasure::kPermutation}) {
    if (text == to_string(m)) return m;
  }
  fail(ErrorKind::kInvalidArgument, "unknown measure '" + text + "'");
}

std::string RoleComparison::name() const {
  return std::string(to_string(higher)) + "_vs_" + to_string(lower);
}

std::vector<RoleComparison> comparisons_for(int n_classes) {
  std::vector<CovariateRole> roles = informative_roles(n_classes);
  std::vector<RoleComparison> out;
  for (CovariateRole r : roles) out.push_back({r, CovariateRole::kNoise});
  for (CovariateRole r : roles) {
    if (r == CovariateRole::kTwoGroups || r == CovariateRole::kThreeGroups) continue;
    for (CovariateRole g : roles) {
      if (g == CovariateRole::kTwoGroups || g == CovariateRole::kThreeGroups) out.push_back({r, g});
    }
  }
  return out;
}

std::vector<double> RepetitionVims::values(VimMeasure measure) const {
  switch (measure) {
    case VimMeasure::kMultiClass:
      return multi_class;
    case VimMeasure::kDiscriminatory:
      return discriminatory;
    case VimMeasure::kDifference: {
      std::vector<double> out(multi_class.size());
      for (std::size_t j = 0; j < out.size(); ++j) out[j] = multi_class[j] - discriminatory[j];
      return out;
    }
    case VimMeasure::kPermutation:
      return permutation;
  }
  return {};
}

RepetitionVims score_repetition(int n_classes, std::size_t n, std::uint64_t seed, const MufConfig& forest,
                                bool with_permutation, std::size_t workers) {
  RepetitionVims out;
  out.sim = generate({n_classes, n, seed});
  MufConfig config = forest;
  config.seed = derive_seed(seed, {1});
  MultiForestModel model = train(out.sim.data, config, workers);
  out.multi_class = compute_multiclass_vim(model, out.sim.data, config.seed, workers);
  out.discriminatory = compute_discriminatory_vim(model, out.sim.data, config.seed, workers);
  if (with_permutation) {
    MufConfig binary = forest;
    binary.multiway_probability = 0.0;
    binary.seed = derive_seed(seed, {2});
    MultiForestModel baseline = train(out.sim.data, binary, workers);
    out.permutation = compute_permutation_vim(baseline, out.sim.data, binary.seed, workers);
  }
  return out;
}

namespace {

bool needs(const StudyConfig& c, VimMeasure m) {
  for (VimMeasure x : c.measures) {
    if (x == m) return true;
  }
  return false;
}

std::string method_of(VimMeasure m, const MufConfig& forest) {
  return m == VimMeasure::kPermutation ? "perm" : variant_name(forest);
}

std::vector<double> values_of(const std::vector<double>& vim, const std::vector<CovariateRole>& roles,
                              CovariateRole role) {
  std::vector<double> out;
  for (std::size_t j = 0; j < roles.size(); ++j) {
    if (roles[j] == role) out.push_back(vim[j]);
  }
  return out;
}

}  // namespace

StudyResult run_simulation_study(const StudyConfig& config) {
  if (config.repetitions < 2) fail(ErrorKind::kInvalidArgument, "a study needs at least 2 repetitions");
  config.forest.validate();
  struct Task {
    int c;
    std::size_t n;
    int rep;
  };
  std::vector<Task> tasks;
  for (int c : config.classes) {
    informative_roles(c);
    for (std::size_t n : config.sizes) {
      if (n < static_cast<std::size_t>(c)) fail(ErrorKind::kInvalidArgument, "n below the class count");
      for (int r = 0; r < config.repetitions; ++r) tasks.push_back({c, n, r});
    }
  }
  const bool with_perm = needs(config, VimMeasure::kPermutation);
  std::vector<std::vector<StudyRawRow>> raw(tasks.size());
  std::vector<std::vector<StudyRoleRow>> roles(tasks.size());
  // Repetitions run concurrently; each forest is grown single-threaded.
  parallel_for(tasks.size(), resolve_workers(config.workers), [&](std::size_t t) {
    const Task& task = tasks[t];
    const std::uint64_t seed =
        derive_seed(config.seed, {static_cast<std::uint64_t>(task.c), static_cast<std::uint64_t>(task.n),
                                  static_cast<std::uint64_t>(task.rep)});
    RepetitionVims vims = score_repetition(task.c, task.n, seed, config.forest, with_perm, 1);
    std::vector<CovariateRole> present = {CovariateRole::kNoise};
    for (CovariateRole r : informative_roles(task.c)) present.push_back(r);
    for (VimMeasure m : config.measures) {
      const std::vector<double> vim = vims.values(m);
      const std::string method = method_of(m, config.forest);
      for (const RoleComparison& cmp : comparisons_for(task.c)) {
        StudyRawRow row{task.c, task.n, task.rep + 1, cmp.name(), method, m, 0.0};
        row.auc = auc_two_groups(values_of(vim, vims.sim.roles, cmp.higher), values_of(vim, vims.sim.roles, cmp.lower));
        raw[t].push_back(row);
      }
      for (CovariateRole r : present) {
        std::vector<double> v = values_of(vim, vims.sim.roles, r);
        double sum = 0.0;
        for (double x : v) sum += x;
        roles[t].push_back({task.c, task.n, task.rep + 1, method, m, r, sum / static_cast<double>(v.size())});
      }
    }
  });

  StudyResult result;
  for (auto& block : raw) result.raw.insert(result.raw.end(), block.begin(), block.end());
  for (auto& block : roles) result.roles.insert(result.roles.end(), block.begin(), block.end());

  using Key = std::tuple<int, std::size_t, std::string, int>;
  std::map<Key, std::vector<double>> groups;
  std::vector<Key> order;
  for (const StudyRawRow& row : result.raw) {
    Key key{row.n_classes, row.n, row.comparison, static_cast<int>(row.measure)};
    auto [it, inserted] = groups.try_emplace(key);
    if (inserted) order.push_back(key);
    it->second.push_back(row.auc);
  }
  for (const Key& key : order) {
    const auto& aucs = groups[key];
    MeanCi ci = mean_auc_ci(aucs);
    const auto measure = static_cast<VimMeasure>(std::get<3>(key));
    result.summary.push_back({std::get<0>(key), std::get<1>(key), std::get<2>(key), method_of(measure, config.forest),
                              measure, ci.mean, ci.lower, ci.upper, aucs.size()});
  }
  return result;
}

const StudySummaryRow* find_summary(const StudyResult& result, int n_classes, std::size_t n,
                                    const std::string& comparison, VimMeasure measure) {
  for (const auto& row : result.summary) {
    if (row.n_classes == n_classes && row.n == n && row.comparison == comparison && row.measure == measure) {
      return &row;
    }
  }
  return nullptr;
}

std::string format_study_summary(const std::vector<StudySummaryRow>& rows) {
  std::ostringstream out;
  out << "C,n,comparison,method,measure,mean_auc,ci_lower,ci_upper,n_datasets\n";
  for (const auto& r : rows) {
    out << r.n_classes << ',' << r.n << ',' << r.comparison << ',' << r.method << ',' << to_string(r.measure) << ','
        << format_cell(r.mean_auc) << ',' << format_cell(r.ci_lower) << ',' << format_cell(r.ci_upper) << ','
        << r.n_datasets << '\n';
  }
  return out.str();
}

std::string format_study_raw(const std::vector<StudyRawRow>& rows) {
  std::ostringstream out;
  out << "C,n,repetition,comparison,method,measure,auc\n";
  for (const auto& r : rows) {
    out << r.n_classes << ',' << r.n << ',' << r.repetition << ',' << r.comparison << ',' << r.method << ','
        << to_string(r.measure) << ',' << format_cell(r.auc) << '\n';
  }
  return out.str();
}

std::string format_study_roles(const std::vector<StudyRoleRow>& rows) {
  std::ostringstream out;
  out << "C,n,repetition,method,measure,role,mean_vim\n";
  for (const auto& r : rows) {
    out << r.n_classes << ',' << r.n << ',' << r.repetition << ',' << r.method << ',' << to_string(r.measure)
        << ',' << to_string(r.role) << ',' << format_cell(r.mean_vim) << '\n';
  }
  return out.str();
}

}  // namespace mufor
