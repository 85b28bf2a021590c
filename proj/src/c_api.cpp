#include "mufor/mufor.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <limits>
#include <memory>
#include <new>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "mufor/crossval.h"
#include "mufor/data.h"
#include "mufor/error.h"
#include "mufor/format.h"
#include "mufor/forest.h"
#include "mufor/importance.h"
#include "mufor/log.h"
#include "mufor/model_io.h"
#include "mufor/simstudy.h"
#include "mufor/simulation.h"

struct mufor_dataset {
  mufor::Dataset data;
  std::optional<std::vector<mufor::CovariateRole>> roles;
  // Already matched to a model's schema by mufor_dataset_load_for_model.
  bool conformed = false;
};

struct mufor_model {
  mufor::MultiForestModel model;
};

namespace {

thread_local std::string g_last_error;

mufor_status status_of(mufor::ErrorKind kind) {
  switch (kind) {
    case mufor::ErrorKind::kInvalidArgument: return MUFOR_ERR_INVALID_ARGUMENT;
    case mufor::ErrorKind::kIo: return MUFOR_ERR_IO;
    case mufor::ErrorKind::kParse: return MUFOR_ERR_PARSE;
    case mufor::ErrorKind::kSchemaMismatch: return MUFOR_ERR_SCHEMA_MISMATCH;
    case mufor::ErrorKind::kInternal: return MUFOR_ERR_INTERNAL;
  }
  return MUFOR_ERR_INTERNAL;
}

// Runs fn and converts any exception into a status plus message.
template <typename Fn>
mufor_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return MUFOR_OK;
  } catch (const mufor::Error& e) {
    g_last_error = e.what();
    return status_of(e.kind());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return MUFOR_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return MUFOR_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return MUFOR_ERR_INTERNAL;
  }
}

void require(bool cond, const char* what) {
  if (!cond) mufor::fail(mufor::ErrorKind::kInvalidArgument, what);
}

char* copy_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

mufor::MufConfig to_config(const mufor_config& c) {
  mufor::MufConfig out;
  out.ntree = c.ntree;
  out.mtry = c.mtry;
  out.npervar = c.npervar;
  out.nmin = c.nmin;
  out.prop = c.prop;
  out.multiway_probability = c.multiway_probability;
  out.proportions = c.squared ? mufor::ProportionVariant::kSquared : mufor::ProportionVariant::kNonSquared;
  out.binary = c.gini ? mufor::BinaryCriterion::kGini : mufor::BinaryCriterion::kAssignClasses;
  out.prediction_rule =
      c.majority_vote ? mufor::PredictionRule::kMajorityVote : mufor::PredictionRule::kMaxProbability;
  out.seed = c.seed;
  out.validate();
  return out;
}

void from_config(const mufor::MufConfig& c, mufor_config& out) {
  out.ntree = c.ntree;
  out.mtry = c.mtry;
  out.npervar = c.npervar;
  out.nmin = c.nmin;
  out.prop = c.prop;
  out.multiway_probability = c.multiway_probability;
  out.squared = c.proportions == mufor::ProportionVariant::kSquared ? 1 : 0;
  out.gini = c.binary == mufor::BinaryCriterion::kGini ? 1 : 0;
  out.majority_vote = c.prediction_rule == mufor::PredictionRule::kMajorityVote ? 1 : 0;
  out.seed = c.seed;
}

std::vector<mufor::VimMeasure> parse_measures(const char* text) {
  std::vector<mufor::VimMeasure> out;
  if (text == nullptr) {
    return {mufor::VimMeasure::kMultiClass, mufor::VimMeasure::kDiscriminatory, mufor::VimMeasure::kDifference,
            mufor::VimMeasure::kPermutation};
  }
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(mufor::parse_measure(item));
  }
  require(!out.empty(), "no measures selected");
  return out;
}

mufor::VimOptions to_vim_options(const mufor_vim_options* options, std::size_t workers) {
  mufor_vim_options o;
  if (options != nullptr) {
    o = *options;
  } else {
    mufor_vim_options_default(&o);
  }
  mufor::VimOptions out;
  out.multi_class = o.multi_class != 0;
  out.discriminatory = o.discriminatory != 0;
  out.permutation = o.permutation != 0;
  if (o.has_seed) out.seed = o.seed;
  out.node_permutations = o.node_permutations;
  out.workers = workers;
  return out;
}

mufor::Dataset conformed(const mufor_model& model, const mufor_dataset& data) {
  return data.conformed ? data.data : mufor::conform_to_model(data.data, model.model.schema);
}

}  // namespace

extern "C" {

const char* mufor_last_error(void) { return g_last_error.c_str(); }

const char* mufor_version(void) { return "1.0.0"; }

void mufor_string_free(char* s) { std::free(s); }

void mufor_set_log_level(int level) {
  if (level <= 0) {
    mufor::set_log_level(mufor::LogLevel::kQuiet);
  } else if (level == 1) {
    mufor::set_log_level(mufor::LogLevel::kWarning);
  } else {
    mufor::set_log_level(mufor::LogLevel::kInfo);
  }
}

mufor_status mufor_dataset_load(const char* path, const char* outcome_column, const char* schema_path,
                                mufor_dataset** out) {
  return guarded([&] {
    require(path != nullptr && out != nullptr, "null argument");
    mufor::LoadOptions options;
    if (outcome_column != nullptr) options.outcome_column = outcome_column;
    if (schema_path != nullptr) options.schema = mufor::load_schema(schema_path);
    auto d = std::make_unique<mufor_dataset>();
    d->data = mufor::load_dataset(path, options);
    *out = d.release();
  });
}

mufor_status mufor_dataset_simulate(int n_classes, size_t n, uint64_t seed, mufor_dataset** out) {
  return guarded([&] {
    require(out != nullptr, "null argument");
    mufor::SimDataset sim = mufor::generate({n_classes, n, seed});
    auto d = std::make_unique<mufor_dataset>();
    d->data = std::move(sim.data);
    d->roles = std::move(sim.roles);
    *out = d.release();
  });
}

mufor_status mufor_dataset_from_arrays(size_t n, size_t p, const double* values, const int* labels, int n_classes,
                                       const char* const* names, mufor_dataset** out) {
  return guarded([&] {
    require(out != nullptr && labels != nullptr && (values != nullptr || n * p == 0), "null argument");
    require(n_classes >= 1, "n_classes must be positive");
    std::vector<mufor::CovariateInfo> covariates(p);
    for (std::size_t j = 0; j < p; ++j) {
      covariates[j].name = names != nullptr ? std::string(names[j]) : "X" + std::to_string(j + 1);
    }
    std::vector<std::string> class_names;
    for (int c = 1; c <= n_classes; ++c) class_names.push_back(std::to_string(c));
    auto d = std::make_unique<mufor_dataset>();
    d->data = mufor::Dataset(std::move(covariates), std::vector<double>(values, values + n * p),
                             std::vector<int>(labels, labels + n), std::move(class_names));
    *out = d.release();
  });
}

void mufor_dataset_free(mufor_dataset* data) { delete data; }

size_t mufor_dataset_n(const mufor_dataset* data) { return data != nullptr ? data->data.n() : 0; }

size_t mufor_dataset_p(const mufor_dataset* data) { return data != nullptr ? data->data.p() : 0; }

int mufor_dataset_n_classes(const mufor_dataset* data) { return data != nullptr ? data->data.n_classes() : 0; }

mufor_status mufor_dataset_write(const mufor_dataset* data, const char* path) {
  return guarded([&] {
    require(data != nullptr && path != nullptr, "null argument");
    mufor::write_dataset(data->data, path);
  });
}

mufor_status mufor_dataset_write_roles(const mufor_dataset* data, const char* path) {
  return guarded([&] {
    require(data != nullptr && path != nullptr, "null argument");
    require(data->roles.has_value(), "dataset has no covariate roles");
    mufor::write_roles({data->data, *data->roles}, path);
  });
}

void mufor_config_default(mufor_config* config) {
  if (config != nullptr) from_config(mufor::MufConfig{}, *config);
}

mufor_status mufor_config_set_variant(mufor_config* config, const char* variant) {
  return guarded([&] {
    require(config != nullptr && variant != nullptr, "null argument");
    mufor::MufConfig c;
    mufor::apply_variant(c, variant);
    config->squared = c.proportions == mufor::ProportionVariant::kSquared ? 1 : 0;
    config->gini = c.binary == mufor::BinaryCriterion::kGini ? 1 : 0;
  });
}

mufor_status mufor_config_set_prediction_rule(mufor_config* config, const char* rule) {
  return guarded([&] {
    require(config != nullptr && rule != nullptr, "null argument");
    config->majority_vote = mufor::parse_prediction_rule(rule) == mufor::PredictionRule::kMajorityVote ? 1 : 0;
  });
}

mufor_status mufor_train(const mufor_dataset* data, const mufor_config* config, size_t workers,
                         mufor_model** out) {
  return guarded([&] {
    require(data != nullptr && config != nullptr && out != nullptr, "null argument");
    auto m = std::make_unique<mufor_model>();
    m->model = mufor::fit(data->data, to_config(*config), workers);
    *out = m.release();
  });
}

void mufor_model_free(mufor_model* model) { delete model; }

mufor_status mufor_model_save(const mufor_model* model, const char* path) {
  return guarded([&] {
    require(model != nullptr && path != nullptr, "null argument");
    mufor::save_model(model->model, path);
  });
}

mufor_status mufor_model_load(const char* path, mufor_model** out) {
  return guarded([&] {
    require(path != nullptr && out != nullptr, "null argument");
    auto m = std::make_unique<mufor_model>();
    m->model = mufor::load_model(path);
    *out = m.release();
  });
}

int mufor_model_n_classes(const mufor_model* model) { return model != nullptr ? model->model.n_classes() : 0; }

size_t mufor_model_p(const mufor_model* model) { return model != nullptr ? model->model.p() : 0; }

const char* mufor_model_class_name(const mufor_model* model, int k) {
  if (model == nullptr || k < 0 || k >= model->model.n_classes()) return nullptr;
  return model->model.schema.class_names[static_cast<std::size_t>(k)].c_str();
}

mufor_status mufor_model_summarize(const mufor_model* model, mufor_model_summary* out) {
  return guarded([&] {
    require(model != nullptr && out != nullptr, "null argument");
    const mufor::ModelSummary s = mufor::summarize(model->model);
    out->trees = s.trees;
    out->nodes = s.nodes;
    out->leaves = s.leaves;
    out->multiway_nodes = s.multiway_nodes;
    out->binary_nodes = s.binary_nodes;
    out->mean_depth = s.mean_depth;
    out->max_depth = s.max_depth;
  });
}

mufor_status mufor_dataset_load_for_model(const mufor_model* model, const char* path, const char* outcome_column,
                                          mufor_dataset** out) {
  return guarded([&] {
    require(model != nullptr && path != nullptr && out != nullptr, "null argument");
    auto d = std::make_unique<mufor_dataset>();
    d->data = mufor::load_prediction_data(path, model->model.schema,
                                          outcome_column != nullptr ? outcome_column : "");
    d->conformed = true;
    *out = d.release();
  });
}

mufor_status mufor_predict(const mufor_model* model, const mufor_dataset* data, size_t workers, double* proba,
                           int* classes) {
  return guarded([&] {
    require(model != nullptr && data != nullptr, "null argument");
    const mufor::Dataset encoded = conformed(*model, *data);
    if (proba != nullptr) {
      const std::vector<double> p = mufor::predict_proba(model->model, encoded, workers);
      std::copy(p.begin(), p.end(), proba);
    }
    if (classes != nullptr) {
      const std::vector<int> c =
          mufor::predict_class(model->model, encoded, model->model.config.prediction_rule, workers);
      std::copy(c.begin(), c.end(), classes);
    }
  });
}

mufor_status mufor_predict_table(const mufor_model* model, const mufor_dataset* data, size_t workers,
                                 int with_observed, char** table) {
  return guarded([&] {
    require(model != nullptr && data != nullptr && table != nullptr, "null argument");
    const mufor::MultiForestModel& m = model->model;
    const mufor::Dataset encoded = conformed(*model, *data);
    const std::vector<double> proba = mufor::predict_proba(m, encoded, workers);
    const std::vector<int> classes = mufor::predict_class(m, encoded, m.config.prediction_rule, workers);
    const auto C = static_cast<std::size_t>(m.n_classes());
    const auto& names = m.schema.class_names;
    std::ostringstream out;
    out << "row,predicted";
    if (with_observed) out << ",observed";
    for (const std::string& name : names) out << ',' << mufor::csv_field("prob_" + name);
    out << '\n';
    for (std::size_t i = 0; i < encoded.n(); ++i) {
      out << (i + 1) << ',' << mufor::csv_field(names[static_cast<std::size_t>(classes[i])]);
      if (with_observed) out << ',' << mufor::csv_field(names[static_cast<std::size_t>(encoded.label(i))]);
      for (std::size_t c = 0; c < C; ++c) out << ',' << mufor::format_double(proba[i * C + c]);
      out << '\n';
    }
    *table = copy_string(out.str());
  });
}

void mufor_vim_options_default(mufor_vim_options* options) {
  if (options == nullptr) return;
  options->multi_class = 1;
  options->discriminatory = 1;
  options->permutation = 1;
  options->has_seed = 0;
  options->seed = 0;
  options->node_permutations = 1;
}

mufor_status mufor_importance_table(const mufor_model* model, const mufor_dataset* data,
                                    const mufor_vim_options* options, size_t workers, char** table) {
  return guarded([&] {
    require(model != nullptr && data != nullptr && table != nullptr, "null argument");
    const mufor::VimReport report =
        mufor::compute_importance(model->model, data->data, to_vim_options(options, workers));
    *table = copy_string(mufor::format_vim_table(report));
  });
}

mufor_status mufor_importance(const mufor_model* model, const mufor_dataset* data, const mufor_vim_options* options,
                              size_t workers, double* multi_class, double* discriminatory, double* permutation) {
  return guarded([&] {
    require(model != nullptr && data != nullptr, "null argument");
    const mufor::VimReport r = mufor::compute_importance(model->model, data->data, to_vim_options(options, workers));
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t j = 0; j < r.covariates.size(); ++j) {
      if (multi_class != nullptr) {
        multi_class[j] = r.has_multi_class && r.multi_class_defined[j] ? r.multi_class[j] : nan;
      }
      if (discriminatory != nullptr) discriminatory[j] = r.has_discriminatory ? r.discriminatory[j] : nan;
      if (permutation != nullptr) permutation[j] = r.has_permutation ? r.permutation[j] : nan;
    }
  });
}

mufor_status mufor_simstudy(const mufor_study_options* options, const mufor_config* forest, size_t workers,
                            char** summary, char** raw, char** roles) {
  return guarded([&] {
    require(options != nullptr && forest != nullptr, "null argument");
    require(options->classes != nullptr && options->n_classes_count > 0, "no class counts given");
    require(options->sizes != nullptr && options->sizes_count > 0, "no sample sizes given");
    require(options->repetitions >= 2, "need at least two repetitions");
    mufor::StudyConfig config;
    config.classes.assign(options->classes, options->classes + options->n_classes_count);
    config.sizes.assign(options->sizes, options->sizes + options->sizes_count);
    config.repetitions = options->repetitions;
    config.forest = to_config(*forest);
    config.measures = parse_measures(options->measures);
    config.seed = options->seed;
    config.workers = workers;
    const mufor::StudyResult result = mufor::run_simulation_study(config);
    if (summary != nullptr) *summary = copy_string(mufor::format_study_summary(result.summary));
    if (raw != nullptr) *raw = copy_string(mufor::format_study_raw(result.raw));
    if (roles != nullptr) *roles = copy_string(mufor::format_study_roles(result.roles));
  });
}

void mufor_cv_options_default(mufor_cv_options* options) {
  if (options == nullptr) return;
  options->folds = 5;
  options->repetitions = 5;
  options->seed = 1;
  options->all_variants = 0;
}

mufor_status mufor_crossval(const mufor_dataset* const* datasets, const char* const* names, size_t count,
                            const mufor_config* forest, const mufor_cv_options* options, size_t workers,
                            char** folds, char** summary, char** tests) {
  return guarded([&] {
    require(datasets != nullptr && forest != nullptr && count > 0, "null argument");
    mufor_cv_options o;
    if (options != nullptr) {
      o = *options;
    } else {
      mufor_cv_options_default(&o);
    }
    const mufor::MufConfig base = to_config(*forest);
    std::vector<mufor::CvMethod> methods;
    if (o.all_variants) {
      for (const char* v : {"wsquared_wgini", "wosquared_wgini", "wsquared_wogini", "wosquared_wogini"}) {
        mufor::MufConfig c = base;
        mufor::apply_variant(c, v);
        methods.push_back({v, mufor::forest_trainer(c, 1)});
      }
    } else {
      methods.push_back({mufor::variant_name(base), mufor::forest_trainer(base, 1)});
    }
    mufor::MufConfig binary = base;
    binary.multiway_probability = 0.0;
    const std::string baseline = "binary_only";
    methods.push_back({baseline, mufor::forest_trainer(binary, 1)});

    mufor::CvOptions cv;
    cv.folds = o.folds;
    cv.repetitions = o.repetitions;
    cv.seed = o.seed;
    cv.workers = workers;
    std::string fold_text;
    std::string summary_text;
    std::vector<std::vector<mufor::CvRow>> per_dataset;
    for (std::size_t d = 0; d < count; ++d) {
      require(datasets[d] != nullptr, "null dataset");
      const std::string name = names != nullptr && names[d] != nullptr ? names[d] : "dataset" + std::to_string(d + 1);
      mufor::log_info("cross-validating " + name);
      std::vector<mufor::CvRow> rows = mufor::stratified_cv(datasets[d]->data, methods, cv);
      std::string f = mufor::format_cv_table(rows, name);
      std::string s = mufor::format_cv_summary(mufor::summarize_cv(rows), name);
      // Keep the header of the first dataset only.
      if (d > 0) {
        f.erase(0, f.find('\n') + 1);
        s.erase(0, s.find('\n') + 1);
      }
      fold_text += f;
      summary_text += s;
      per_dataset.push_back(std::move(rows));
    }
    std::string test_text;
    if (count >= 6) test_text = mufor::format_cv_comparison(mufor::compare_across_datasets(per_dataset, baseline));
    if (folds != nullptr) *folds = copy_string(fold_text);
    if (summary != nullptr) *summary = copy_string(summary_text);
    if (tests != nullptr) *tests = copy_string(test_text);
  });
}

}  // extern "C"
