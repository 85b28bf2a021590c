#include "mufor/crossval.h"

#include <algorithm>
#include <map>
#include <numeric>
#include <sstream>

#include "mufor/error.h"
#include "mufor/format.h"
#include "mufor/metrics.h"
#include "mufor/parallel.h"
#include "mufor/random.h"
#include "mufor/stats.h"

namespace mufor {

namespace {
constexpr std::uint64_t kFoldStream = 0x464f4c44;
}

std::vector<int> stratified_folds(std::span<const int> labels, int n_classes, int folds, std::uint64_t seed) {
  if (folds < 2) fail(ErrorKind::kInvalidArgument, "need at least two folds");
  std::vector<std::vector<std::size_t>> members(static_cast<std::size_t>(n_classes));
  for (std::size_t i = 0; i < labels.size(); ++i) members[static_cast<std::size_t>(labels[i])].push_back(i);
  for (std::size_t c = 0; c < members.size(); ++c) {
    if (members[c].size() < static_cast<std::size_t>(folds)) {
      fail(ErrorKind::kInvalidArgument, "class " + std::to_string(c + 1) + " has " +
                                            std::to_string(members[c].size()) + " observations, fewer than " +
                                            std::to_string(folds) + " folds");
    }
  }
  Rng rng(derive_seed(seed, {kFoldStream}));
  std::vector<int> out(labels.size(), -1);
  std::size_t next = 0;
  for (auto& group : members) {
    rng.shuffle(std::span<std::size_t>(group));
    for (std::size_t i : group) {
      out[i] = static_cast<int>(next);
      next = (next + 1) % static_cast<std::size_t>(folds);
    }
  }
  return out;
}

std::vector<CvRow> stratified_cv(const Dataset& data, const std::vector<CvMethod>& methods,
                                 const CvOptions& options) {
  const auto C = static_cast<std::size_t>(data.n_classes());
  std::vector<std::vector<int>> assignments;
  for (int r = 0; r < options.repetitions; ++r) {
    assignments.push_back(stratified_folds(data.labels(), data.n_classes(), options.folds,
                                           derive_seed(options.seed, {static_cast<std::uint64_t>(r)})));
  }
  const std::size_t per_method = static_cast<std::size_t>(options.repetitions * options.folds);
  std::vector<CvRow> rows(methods.size() * per_method);
  parallel_for(rows.size(), resolve_workers(options.workers), [&](std::size_t task) {
    const std::size_t m = task / per_method;
    const int r = static_cast<int>((task % per_method) / static_cast<std::size_t>(options.folds));
    const int f = static_cast<int>(task % static_cast<std::size_t>(options.folds));
    std::vector<std::size_t> train_rows;
    std::vector<std::size_t> test_rows;
    const auto& fold_of = assignments[static_cast<std::size_t>(r)];
    for (std::size_t i = 0; i < data.n(); ++i) (fold_of[i] == f ? test_rows : train_rows).push_back(i);
    Dataset train = data.subset(train_rows);
    Dataset test = data.subset(test_rows);
    const std::uint64_t seed =
        derive_seed(options.seed, {static_cast<std::uint64_t>(r), static_cast<std::uint64_t>(f), 1});
    std::vector<double> proba = methods[m].trainer(train, test, seed);
    if (proba.size() != test.n() * C) fail(ErrorKind::kInternal, "trainer returned a wrong-sized matrix");
    std::vector<int> predicted(test.n());
    for (std::size_t i = 0; i < test.n(); ++i) {
      predicted[i] = static_cast<int>(argmax_lowest(std::span<const double>(proba.data() + i * C, C)));
    }
    CvRow row;
    row.method = methods[m].name;
    row.repetition = r + 1;
    row.fold = f + 1;
    row.aunu = aunu(proba, test.labels(), C);
    row.aunp = aunp(proba, test.labels(), C);
    row.brier = brier(proba, test.labels(), C);
    row.accuracy = accuracy(predicted, test.labels());
    rows[task] = std::move(row);
  });
  return rows;
}

Trainer forest_trainer(const MufConfig& config, std::size_t workers) {
  return [config, workers](const Dataset& train, const Dataset& test, std::uint64_t seed) {
    MufConfig c = config;
    c.seed = seed;
    MultiForestModel model = fit(train, c, workers);
    Dataset encoded = conform_to_model(test, model.schema);
    return predict_proba(model, encoded, workers);
  };
}

std::vector<CvSummaryRow> summarize_cv(const std::vector<CvRow>& rows) {
  std::vector<std::string> order;
  std::map<std::string, std::map<std::string, std::vector<double>>> values;
  for (const CvRow& r : rows) {
    if (values.find(r.method) == values.end()) order.push_back(r.method);
    auto& v = values[r.method];
    v["aunu"].push_back(r.aunu);
    v["aunp"].push_back(r.aunp);
    v["brier"].push_back(r.brier);
    v["accuracy"].push_back(r.accuracy);
  }
  std::vector<CvSummaryRow> out;
  for (const std::string& method : order) {
    for (const char* measure : {"aunu", "aunp", "brier", "accuracy"}) {
      const auto& v = values[method][measure];
      CvSummaryRow s;
      s.method = method;
      s.measure = measure;
      s.median = quantile(v, 0.5);
      s.q1 = quantile(v, 0.25);
      s.q3 = quantile(v, 0.75);
      s.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
      out.push_back(s);
    }
  }
  return out;
}

std::vector<CvComparisonRow> compare_across_datasets(const std::vector<std::vector<CvRow>>& per_dataset,
                                                     const std::string& baseline) {
  if (per_dataset.empty()) fail(ErrorKind::kInvalidArgument, "no datasets to compare");
  std::vector<std::string> methods;
  for (const CvRow& r : per_dataset.front()) {
    if (std::find(methods.begin(), methods.end(), r.method) == methods.end()) methods.push_back(r.method);
  }
  auto base = std::find(methods.begin(), methods.end(), baseline);
  if (base == methods.end()) fail(ErrorKind::kInvalidArgument, "unknown baseline method '" + baseline + "'");
  const std::size_t b = static_cast<std::size_t>(base - methods.begin());
  const std::size_t D = per_dataset.size();
  const std::size_t M = methods.size();
  std::vector<std::vector<CvSummaryRow>> summaries;
  for (const auto& rows : per_dataset) summaries.push_back(summarize_cv(rows));
  std::vector<CvComparisonRow> out;
  for (const char* measure : {"aunu", "aunp", "brier", "accuracy"}) {
    std::vector<double> matrix(D * M, 0.0);
    for (std::size_t d = 0; d < D; ++d) {
      for (std::size_t m = 0; m < M; ++m) {
        const auto it = std::find_if(summaries[d].begin(), summaries[d].end(), [&](const CvSummaryRow& s) {
          return s.method == methods[m] && s.measure == measure;
        });
        if (it == summaries[d].end()) {
          fail(ErrorKind::kInvalidArgument, "dataset " + std::to_string(d + 1) + " lacks method " + methods[m]);
        }
        matrix[d * M + m] = it->mean;
      }
    }
    for (const PairedComparison& pc : paired_wilcoxon_holm(matrix, D, M, b)) {
      CvComparisonRow row;
      row.measure = measure;
      row.method = methods[pc.method];
      row.baseline = baseline;
      row.n_datasets = D;
      row.median_difference = pc.median_difference;
      row.statistic = pc.test.statistic;
      row.p_value = pc.test.p_value;
      row.adjusted_p = pc.adjusted_p;
      row.z = pc.test.z;
      row.effect_size = pc.test.effect_size;
      row.exact = pc.test.exact;
      out.push_back(row);
    }
  }
  return out;
}

std::string format_cv_comparison(const std::vector<CvComparisonRow>& rows) {
  std::ostringstream out;
  out << "measure,method,baseline,n_datasets,median_difference,statistic,p_value,adjusted_p,z,effect_size,exact\n";
  for (const CvComparisonRow& r : rows) {
    out << r.measure << ',' << csv_field(r.method) << ',' << csv_field(r.baseline) << ',' << r.n_datasets << ','
        << format_cell(r.median_difference) << ',' << format_cell(r.statistic) << ',' << format_cell(r.p_value)
        << ',' << format_cell(r.adjusted_p) << ',' << format_cell(r.z) << ',' << format_cell(r.effect_size) << ','
        << (r.exact ? "true" : "false") << '\n';
  }
  return out.str();
}

std::string format_cv_table(const std::vector<CvRow>& rows, const std::string& dataset) {
  std::ostringstream out;
  out << "dataset,method,repetition,fold,aunu,aunp,brier,accuracy\n";
  for (const CvRow& r : rows) {
    out << csv_field(dataset) << ',' << csv_field(r.method) << ',' << r.repetition << ',' << r.fold << ','
        << format_cell(r.aunu) << ',' << format_cell(r.aunp) << ',' << format_cell(r.brier) << ','
        << format_cell(r.accuracy) << '\n';
  }
  return out.str();
}

std::string format_cv_summary(const std::vector<CvSummaryRow>& rows, const std::string& dataset) {
  std::ostringstream out;
  out << "dataset,method,measure,median,q1,q3,mean\n";
  for (const CvSummaryRow& r : rows) {
    out << csv_field(dataset) << ',' << csv_field(r.method) << ',' << r.measure << ',' << format_cell(r.median)
        << ',' << format_cell(r.q1) << ',' << format_cell(r.q3) << ',' << format_cell(r.mean) << '\n';
  }
  return out.str();
}

}  // namespace mufor
