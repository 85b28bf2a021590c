// Command-line front end. Uses only the C interface of the library.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mufor/mufor.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitInternal = 3;

// Carries a status out of a subcommand; the message is already formatted.
struct Failure {
  mufor_status status;
  std::string message;
};

void check(mufor_status status, const std::string& what) {
  if (status != MUFOR_OK) throw Failure{status, what + ": " + mufor_last_error()};
}

struct DatasetDeleter {
  void operator()(mufor_dataset* d) const { mufor_dataset_free(d); }
};
struct ModelDeleter {
  void operator()(mufor_model* m) const { mufor_model_free(m); }
};
struct StringDeleter {
  void operator()(char* s) const { mufor_string_free(s); }
};
using DatasetPtr = std::unique_ptr<mufor_dataset, DatasetDeleter>;
using ModelPtr = std::unique_ptr<mufor_model, ModelDeleter>;
using StringPtr = std::unique_ptr<char, StringDeleter>;

const char* c_str_or_null(const std::string& s) { return s.empty() ? nullptr : s.c_str(); }

// Writes to the file, or to standard output when path is empty.
void emit(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Failure{MUFOR_ERR_IO, "cannot write '" + path + "'"};
  out << text;
  if (!out) throw Failure{MUFOR_ERR_IO, "write failed for '" + path + "'"};
}

struct ForestFlags {
  mufor_config config{};
  std::string variant = "wsquared_wgini";
  std::string prediction_rule = "max_probability";
  std::size_t workers = 0;

  ForestFlags() { mufor_config_default(&config); }

  void add_to(CLI::App* app, bool with_prediction_rule) {
    app->add_option("--ntree", config.ntree, "Number of trees")->capture_default_str();
    app->add_option("--mtry", config.mtry, "Covariates drawn per split (0: floor(sqrt(p)))")->capture_default_str();
    app->add_option("--npervar", config.npervar, "Multi-way candidates per drawn covariate")->capture_default_str();
    app->add_option("--nmin", config.nmin, "Nodes of at most this size become leaves")->capture_default_str();
    app->add_option("--prop", config.prop, "Subsample proportion per tree")->capture_default_str();
    app->add_option("--multiway-prob", config.multiway_probability, "Probability of a multi-way split")
        ->capture_default_str();
    app->add_option("--variant", variant, "wsquared_wgini, wosquared_wgini, wsquared_wogini or wosquared_wogini")
        ->capture_default_str();
    app->add_option("--seed", config.seed, "Random seed")->capture_default_str();
    if (with_prediction_rule) {
      app->add_option("--prediction-rule", prediction_rule, "max_probability or majority_vote")
          ->capture_default_str();
    }
    add_workers(app);
  }

  void add_workers(CLI::App* app) {
    app->add_option("--workers", workers, "Worker threads (0: MUFOR_WORKERS or all cores)")->capture_default_str();
  }

  const mufor_config& resolve() {
    check(mufor_config_set_variant(&config, variant.c_str()), "--variant");
    check(mufor_config_set_prediction_rule(&config, prediction_rule.c_str()), "--prediction-rule");
    return config;
  }
};

DatasetPtr load(const std::string& path, const std::string& outcome, const std::string& schema) {
  mufor_dataset* d = nullptr;
  check(mufor_dataset_load(path.c_str(), c_str_or_null(outcome), c_str_or_null(schema), &d),
        "loading '" + path + "'");
  return DatasetPtr(d);
}

ModelPtr load_model(const std::string& path) {
  mufor_model* m = nullptr;
  check(mufor_model_load(path.c_str(), &m), "loading model '" + path + "'");
  return ModelPtr(m);
}

// ---- simulate ----

struct SimulateArgs {
  int classes = 4;
  std::size_t n = 1000;
  std::uint64_t seed = 1;
  std::string out;
  std::string roles;
};

void run_simulate(const SimulateArgs& a) {
  mufor_dataset* raw = nullptr;
  check(mufor_dataset_simulate(a.classes, a.n, a.seed, &raw), "simulate");
  DatasetPtr d(raw);
  check(mufor_dataset_write(d.get(), a.out.c_str()), "writing data");
  if (!a.roles.empty()) check(mufor_dataset_write_roles(d.get(), a.roles.c_str()), "writing roles");
}

// ---- train ----

struct TrainArgs {
  std::string input;
  std::string outcome;
  std::string schema;
  std::string model;
  ForestFlags forest;
};

void run_train(TrainArgs& a) {
  const mufor_config& config = a.forest.resolve();
  DatasetPtr data = load(a.input, a.outcome, a.schema);
  const auto start = std::chrono::steady_clock::now();
  mufor_model* raw = nullptr;
  check(mufor_train(data.get(), &config, a.forest.workers, &raw), "training");
  ModelPtr model(raw);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  check(mufor_model_save(model.get(), a.model.c_str()), "saving model");
  mufor_model_summary s{};
  check(mufor_model_summarize(model.get(), &s), "summary");
  std::fprintf(stderr,
               "trained %zu trees on %zu x %zu (%d classes) in %.2f s: %zu nodes, %zu leaves, %zu multi-way, "
               "%zu binary, depth mean %.2f max %zu\n",
               s.trees, mufor_dataset_n(data.get()), mufor_dataset_p(data.get()), mufor_dataset_n_classes(data.get()),
               seconds, s.nodes, s.leaves, s.multiway_nodes, s.binary_nodes, s.mean_depth, s.max_depth);
}

// ---- predict ----

struct PredictArgs {
  std::string input;
  std::string outcome;
  std::string model;
  std::string out;
  std::size_t workers = 0;
};

void run_predict(const PredictArgs& a) {
  ModelPtr model = load_model(a.model);
  mufor_dataset* raw = nullptr;
  check(mufor_dataset_load_for_model(model.get(), a.input.c_str(), c_str_or_null(a.outcome), &raw),
        "loading '" + a.input + "'");
  DatasetPtr data(raw);
  char* table = nullptr;
  check(mufor_predict_table(model.get(), data.get(), a.workers, a.outcome.empty() ? 0 : 1, &table), "predict");
  StringPtr owned(table);
  emit(a.out, table);
}

// ---- importance ----

struct ImportanceArgs {
  std::string input;
  std::string outcome;
  std::string schema;
  std::string model;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> measures = {"multi_class", "discriminatory", "permutation"};
  std::size_t node_permutations = 1;
  std::size_t workers = 0;
};

void run_importance(const ImportanceArgs& a) {
  ModelPtr model = load_model(a.model);
  DatasetPtr data = load(a.input, a.outcome, a.schema);
  mufor_vim_options options;
  mufor_vim_options_default(&options);
  options.multi_class = options.discriminatory = options.permutation = 0;
  for (const std::string& m : a.measures) {
    if (m == "multi_class") {
      options.multi_class = 1;
    } else if (m == "discriminatory") {
      options.discriminatory = 1;
    } else if (m == "permutation") {
      options.permutation = 1;
    } else {
      throw Failure{MUFOR_ERR_INVALID_ARGUMENT, "unknown measure '" + m + "'"};
    }
  }
  options.node_permutations = a.node_permutations;
  if (a.seed) {
    options.has_seed = 1;
    options.seed = *a.seed;
  }
  char* table = nullptr;
  check(mufor_importance_table(model.get(), data.get(), &options, a.workers, &table), "importance");
  StringPtr owned(table);
  emit(a.out, table);
}

// ---- simstudy ----

struct SimstudyArgs {
  std::vector<int> classes = {4};
  std::vector<std::size_t> sizes = {1000};
  int repetitions = 100;
  std::vector<std::string> measures = {"multi_class", "discriminatory", "difference", "permutation"};
  std::string out;
  std::string raw;
  std::string roles;
  ForestFlags forest;
};

void run_simstudy(SimstudyArgs& a) {
  const mufor_config& config = a.forest.resolve();
  std::string measures;
  for (const std::string& m : a.measures) measures += (measures.empty() ? "" : ",") + m;
  mufor_study_options options{};
  options.classes = a.classes.data();
  options.n_classes_count = a.classes.size();
  options.sizes = a.sizes.data();
  options.sizes_count = a.sizes.size();
  options.repetitions = a.repetitions;
  options.measures = measures.c_str();
  options.seed = config.seed;
  char* summary = nullptr;
  char* raw = nullptr;
  char* roles = nullptr;
  check(mufor_simstudy(&options, &config, a.forest.workers, &summary, &raw, &roles), "simstudy");
  StringPtr s(summary), r(raw), o(roles);
  emit(a.out, summary);
  if (!a.raw.empty()) emit(a.raw, raw);
  if (!a.roles.empty()) emit(a.roles, roles);
}

// ---- crossval ----

struct CrossvalArgs {
  std::vector<std::string> inputs;
  std::string outcome;
  std::string schema;
  std::string out;
  std::string summary;
  std::string tests;
  int folds = 5;
  int repetitions = 5;
  bool all_variants = false;
  ForestFlags forest;
};

void run_crossval(CrossvalArgs& a) {
  const mufor_config& config = a.forest.resolve();
  std::vector<DatasetPtr> owned;
  std::vector<const mufor_dataset*> datasets;
  std::vector<const char*> names;
  for (const std::string& path : a.inputs) {
    owned.push_back(load(path, a.outcome, a.schema));
    datasets.push_back(owned.back().get());
    names.push_back(path.c_str());
  }
  mufor_cv_options options;
  mufor_cv_options_default(&options);
  options.folds = a.folds;
  options.repetitions = a.repetitions;
  options.seed = config.seed;
  options.all_variants = a.all_variants ? 1 : 0;
  char* folds = nullptr;
  char* summary = nullptr;
  char* tests = nullptr;
  check(mufor_crossval(datasets.data(), names.data(), datasets.size(), &config, &options, a.forest.workers, &folds,
                       &summary, &tests),
        "crossval");
  StringPtr f(folds), s(summary), t(tests);
  emit(a.out, folds);
  if (a.summary.empty()) {
    std::cout << '\n' << summary;
  } else {
    emit(a.summary, summary);
  }
  if (datasets.size() >= 6) {
    if (a.tests.empty()) {
      std::cout << '\n' << tests;
    } else {
      emit(a.tests, tests);
    }
  } else if (!a.tests.empty()) {
    std::fprintf(stderr, "paired tests need at least 6 datasets; '%s' not written\n", a.tests.c_str());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi forests: mixed multi-way and binary split random forests"};
  app.require_subcommand(1);
  int verbosity = 1;
  app.add_option("--log-level", verbosity, "0 quiet, 1 warnings, 2 info")->capture_default_str();

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Write a simulated dataset");
  simulate->add_option("--C", sim.classes, "Number of classes (4, 6 or 10)")->capture_default_str();
  simulate->add_option("--n", sim.n, "Number of observations")->capture_default_str();
  simulate->add_option("--seed", sim.seed, "Random seed")->capture_default_str();
  simulate->add_option("--out", sim.out, "Output data file")->required();
  simulate->add_option("--roles", sim.roles, "Optional covariate role file");

  TrainArgs train;
  auto* train_cmd = app.add_subcommand("train", "Train a multi forest and save it");
  train_cmd->add_option("--input", train.input, "Training data")->required();
  train_cmd->add_option("--outcome-column", train.outcome, "Outcome column (default: last)");
  train_cmd->add_option("--schema", train.schema, "Schema file of 'column: kind' lines");
  train_cmd->add_option("--model", train.model, "Output model file")->required();
  train.forest.add_to(train_cmd, true);

  PredictArgs predict;
  auto* predict_cmd = app.add_subcommand("predict", "Predict classes and probabilities");
  predict_cmd->add_option("--input", predict.input, "Data to predict")->required();
  predict_cmd->add_option("--outcome-column", predict.outcome, "Observed outcome column, if present");
  predict_cmd->add_option("--model", predict.model, "Model file")->required();
  predict_cmd->add_option("--out", predict.out, "Output table (default: stdout)");
  predict_cmd->add_option("--workers", predict.workers, "Worker threads (0: MUFOR_WORKERS or all cores)");

  ImportanceArgs imp;
  auto* imp_cmd = app.add_subcommand("importance", "Variable importance of a trained model");
  imp_cmd->add_option("--input", imp.input, "Training data of the model")->required();
  imp_cmd->add_option("--outcome-column", imp.outcome, "Outcome column (default: last)");
  imp_cmd->add_option("--schema", imp.schema, "Schema file used for training");
  imp_cmd->add_option("--model", imp.model, "Model file")->required();
  imp_cmd->add_option("--out", imp.out, "Output table (default: stdout)");
  imp_cmd->add_option("--seed", imp.seed, "Permutation seed (default: model seed)");
  imp_cmd->add_option("--measures", imp.measures, "multi_class, discriminatory, permutation")
      ->delimiter(',')
      ->capture_default_str();
  imp_cmd->add_option("--node-permutations", imp.node_permutations,
                      "Permutations averaged per node for the split-based measures")
      ->capture_default_str();
  imp_cmd->add_option("--workers", imp.workers, "Worker threads (0: MUFOR_WORKERS or all cores)");

  SimstudyArgs study;
  auto* study_cmd = app.add_subcommand("simstudy", "Simulation study of the importance measures");
  study_cmd->add_option("--C", study.classes, "Class counts (4, 6, 10)")->delimiter(',')->capture_default_str();
  study_cmd->add_option("--n", study.sizes, "Sample sizes")->delimiter(',')->capture_default_str();
  study_cmd->add_option("--reps", study.repetitions, "Repetitions per setting")->capture_default_str();
  study_cmd->add_option("--measures", study.measures, "multi_class, discriminatory, difference, permutation")
      ->delimiter(',')
      ->capture_default_str();
  study_cmd->add_option("--out", study.out, "Summary table (default: stdout)");
  study_cmd->add_option("--raw", study.raw, "Per-repetition AUC table");
  study_cmd->add_option("--roles-out", study.roles, "Per-role mean importance table");
  study.forest.add_to(study_cmd, false);

  CrossvalArgs cv;
  auto* cv_cmd = app.add_subcommand("crossval", "Repeated stratified cross-validation");
  cv_cmd->add_option("--input", cv.inputs, "Data files (one or more)")->required();
  cv_cmd->add_option("--outcome-column", cv.outcome, "Outcome column (default: last)");
  cv_cmd->add_option("--schema", cv.schema, "Schema file applied to every input");
  cv_cmd->add_option("--out", cv.out, "Per-fold table (default: stdout)");
  cv_cmd->add_option("--summary", cv.summary, "Summary table (default: stdout)");
  cv_cmd->add_option("--tests", cv.tests, "Paired test table, at least 6 datasets (default: stdout)");
  cv_cmd->add_option("--folds", cv.folds, "Folds")->capture_default_str();
  cv_cmd->add_option("--repetitions", cv.repetitions, "Repetitions")->capture_default_str();
  cv_cmd->add_flag("--all-variants", cv.all_variants, "Evaluate all four split variants");
  cv.forest.add_to(cv_cmd, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }
  mufor_set_log_level(verbosity);

  try {
    if (*simulate) {
      run_simulate(sim);
    } else if (*train_cmd) {
      run_train(train);
    } else if (*predict_cmd) {
      run_predict(predict);
    } else if (*imp_cmd) {
      run_importance(imp);
    } else if (*study_cmd) {
      run_simstudy(study);
    } else if (*cv_cmd) {
      run_crossval(cv);
    }
  } catch (const Failure& f) {
    std::fprintf(stderr, "error: %s\n", f.message.c_str());
    return f.status == MUFOR_ERR_INTERNAL ? kExitInternal : kExitUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitInternal;
  }
  return kExitOk;
}
