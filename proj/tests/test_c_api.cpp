#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "mufor/mufor.h"

namespace {

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("mufor_capi_" + name);
}

std::string take(char* s) {
  std::string out = s != nullptr ? s : "";
  mufor_string_free(s);
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

mufor_config small_config(size_t ntree) {
  mufor_config c;
  mufor_config_default(&c);
  c.ntree = ntree;
  c.seed = 11;
  return c;
}

TEST(CApi, VersionAndErrorChannel) {
  EXPECT_GT(std::string(mufor_version()).size(), 0u);
  mufor_dataset* d = nullptr;
  EXPECT_EQ(mufor_dataset_load("/nonexistent/mufor.csv", nullptr, nullptr, &d), MUFOR_ERR_IO);
  EXPECT_EQ(d, nullptr);
  EXPECT_GT(std::string(mufor_last_error()).size(), 0u);
  ASSERT_EQ(mufor_dataset_simulate(4, 40, 1, &d), MUFOR_OK);
  EXPECT_STREQ(mufor_last_error(), "");
  mufor_dataset_free(d);
  mufor_dataset_free(nullptr);
  mufor_model_free(nullptr);
  mufor_string_free(nullptr);
}

TEST(CApi, RejectsInvalidArguments) {
  mufor_dataset* d = nullptr;
  EXPECT_EQ(mufor_dataset_simulate(5, 100, 1, &d), MUFOR_ERR_INVALID_ARGUMENT);
  EXPECT_EQ(mufor_dataset_simulate(4, 100, 1, nullptr), MUFOR_ERR_INVALID_ARGUMENT);
  const double values[] = {1, 2, 3};
  const int bad_labels[] = {0, 1, 3};
  EXPECT_EQ(mufor_dataset_from_arrays(3, 1, values, bad_labels, 3, nullptr, &d), MUFOR_ERR_INVALID_ARGUMENT);
  mufor_config c;
  mufor_config_default(&c);
  EXPECT_EQ(mufor_config_set_variant(&c, "bogus"), MUFOR_ERR_INVALID_ARGUMENT);
  EXPECT_EQ(mufor_config_set_prediction_rule(&c, "bogus"), MUFOR_ERR_INVALID_ARGUMENT);
  ASSERT_EQ(mufor_dataset_simulate(4, 60, 1, &d), MUFOR_OK);
  c.prop = 1.5;
  mufor_model* m = nullptr;
  EXPECT_EQ(mufor_train(d, &c, 1, &m), MUFOR_ERR_INVALID_ARGUMENT);
  EXPECT_EQ(m, nullptr);
  mufor_dataset_free(d);
  EXPECT_EQ(mufor_model_load("/nonexistent/model.json", &m), MUFOR_ERR_IO);
}

TEST(CApi, ConfigDefaultsAndVariants) {
  mufor_config c;
  mufor_config_default(&c);
  EXPECT_EQ(c.ntree, 5000u);
  EXPECT_EQ(c.mtry, 0u);
  EXPECT_DOUBLE_EQ(c.multiway_probability, 0.5);
  EXPECT_EQ(c.squared, 1);
  EXPECT_EQ(c.gini, 1);
  ASSERT_EQ(mufor_config_set_variant(&c, "wosquared_wogini"), MUFOR_OK);
  EXPECT_EQ(c.squared, 0);
  EXPECT_EQ(c.gini, 0);
  ASSERT_EQ(mufor_config_set_variant(&c, "wsquared_wogini"), MUFOR_OK);
  EXPECT_EQ(c.squared, 1);
  EXPECT_EQ(c.gini, 0);
  ASSERT_EQ(mufor_config_set_prediction_rule(&c, "majority_vote"), MUFOR_OK);
  EXPECT_EQ(c.majority_vote, 1);
}

TEST(CApi, TrainSaveLoadPredict) {
  mufor_dataset* d = nullptr;
  ASSERT_EQ(mufor_dataset_simulate(4, 200, 3, &d), MUFOR_OK);
  EXPECT_EQ(mufor_dataset_n(d), 200u);
  EXPECT_EQ(mufor_dataset_p(d), 62u);
  EXPECT_EQ(mufor_dataset_n_classes(d), 4);
  const mufor_config c = small_config(30);
  mufor_model* m = nullptr;
  ASSERT_EQ(mufor_train(d, &c, 1, &m), MUFOR_OK);
  EXPECT_EQ(mufor_model_n_classes(m), 4);
  EXPECT_EQ(mufor_model_p(m), 62u);
  EXPECT_STREQ(mufor_model_class_name(m, 0), "1");
  EXPECT_EQ(mufor_model_class_name(m, 4), nullptr);

  mufor_model_summary s;
  ASSERT_EQ(mufor_model_summarize(m, &s), MUFOR_OK);
  EXPECT_EQ(s.trees, 30u);
  EXPECT_EQ(s.nodes, s.leaves + s.multiway_nodes + s.binary_nodes);
  EXPECT_GT(s.multiway_nodes, 0u);
  EXPECT_GT(s.binary_nodes, 0u);

  const auto path = temp_file("model.json");
  ASSERT_EQ(mufor_model_save(m, path.string().c_str()), MUFOR_OK);
  mufor_model* back = nullptr;
  ASSERT_EQ(mufor_model_load(path.string().c_str(), &back), MUFOR_OK);
  const auto path2 = temp_file("model2.json");
  ASSERT_EQ(mufor_model_save(back, path2.string().c_str()), MUFOR_OK);
  EXPECT_EQ(read_file(path), read_file(path2));

  std::vector<double> p1(200 * 4), p2(200 * 4);
  std::vector<int> k1(200), k2(200);
  ASSERT_EQ(mufor_predict(m, d, 1, p1.data(), k1.data()), MUFOR_OK);
  ASSERT_EQ(mufor_predict(back, d, 2, p2.data(), k2.data()), MUFOR_OK);
  EXPECT_EQ(p1, p2);
  EXPECT_EQ(k1, k2);
  for (size_t i = 0; i < 200; ++i) {
    double sum = 0;
    for (size_t c2 = 0; c2 < 4; ++c2) sum += p1[i * 4 + c2];
    EXPECT_NEAR(sum, 1.0, 1e-12);
  }

  char* table = nullptr;
  ASSERT_EQ(mufor_predict_table(m, d, 1, 1, &table), MUFOR_OK);
  const std::string text = take(table);
  EXPECT_EQ(text.substr(0, text.find('\n')), "row,predicted,observed,prob_1,prob_2,prob_3,prob_4");
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 201);

  // Prediction from a file matched by column name.
  const auto data_path = temp_file("data.csv");
  ASSERT_EQ(mufor_dataset_write(d, data_path.string().c_str()), MUFOR_OK);
  mufor_dataset* reread = nullptr;
  ASSERT_EQ(mufor_dataset_load_for_model(m, data_path.string().c_str(), "y", &reread), MUFOR_OK)
      << mufor_last_error();
  std::vector<double> p3(200 * 4);
  ASSERT_EQ(mufor_predict(m, reread, 1, p3.data(), nullptr), MUFOR_OK);
  EXPECT_EQ(p3, p1);

  for (const auto& f : {path, path2, data_path}) std::filesystem::remove(f);
  mufor_dataset_free(reread);
  mufor_model_free(back);
  mufor_model_free(m);
  mufor_dataset_free(d);
}

TEST(CApi, WorkersDoNotChangeModels) {
  mufor_dataset* d = nullptr;
  ASSERT_EQ(mufor_dataset_simulate(6, 150, 4, &d), MUFOR_OK);
  const mufor_config c = small_config(20);
  mufor_model* a = nullptr;
  mufor_model* b = nullptr;
  ASSERT_EQ(mufor_train(d, &c, 1, &a), MUFOR_OK);
  ASSERT_EQ(mufor_train(d, &c, 4, &b), MUFOR_OK);
  const auto pa = temp_file("wa.json");
  const auto pb = temp_file("wb.json");
  ASSERT_EQ(mufor_model_save(a, pa.string().c_str()), MUFOR_OK);
  ASSERT_EQ(mufor_model_save(b, pb.string().c_str()), MUFOR_OK);
  EXPECT_EQ(read_file(pa), read_file(pb));
  mufor_vim_options o;
  mufor_vim_options_default(&o);
  char* ta = nullptr;
  char* tb = nullptr;
  ASSERT_EQ(mufor_importance_table(a, d, &o, 1, &ta), MUFOR_OK);
  ASSERT_EQ(mufor_importance_table(b, d, &o, 4, &tb), MUFOR_OK);
  EXPECT_EQ(take(ta), take(tb));
  std::filesystem::remove(pa);
  std::filesystem::remove(pb);
  mufor_model_free(a);
  mufor_model_free(b);
  mufor_dataset_free(d);
}

TEST(CApi, ImportanceEligibilityAndMismatch) {
  // Three-level nominal covariate with four classes plus a continuous signal.
  const auto path = temp_file("elig.csv");
  {
    std::ofstream out(path);
    out << "level,signal,y\n";
    std::mt19937_64 gen(5);
    std::normal_distribution<double> noise(0.0, 1.0);
    const char* levels[] = {"lo", "mid", "hi"};
    for (int i = 0; i < 160; ++i) {
      const int y = i % 4;
      out << levels[(y + i / 4) % 3] << ',' << y + noise(gen) << ",c" << y << '\n';
    }
  }
  mufor_dataset* d = nullptr;
  ASSERT_EQ(mufor_dataset_load(path.string().c_str(), "y", nullptr, &d), MUFOR_OK) << mufor_last_error();
  const mufor_config c = small_config(40);
  mufor_model* m = nullptr;
  ASSERT_EQ(mufor_train(d, &c, 1, &m), MUFOR_OK);
  mufor_vim_options o;
  mufor_vim_options_default(&o);
  EXPECT_EQ(o.node_permutations, 1u);
  double mc[2], disc[2], perm[2];
  ASSERT_EQ(mufor_importance(m, d, &o, 1, mc, disc, perm), MUFOR_OK);
  EXPECT_TRUE(std::isnan(mc[0]));
  EXPECT_FALSE(std::isnan(disc[0]));
  EXPECT_FALSE(std::isnan(mc[1]));
  EXPECT_GT(mc[1], 0.0);
  EXPECT_FALSE(std::isnan(perm[1]));

  o.multi_class = 0;
  o.permutation = 0;
  ASSERT_EQ(mufor_importance(m, d, &o, 1, mc, disc, perm), MUFOR_OK);
  EXPECT_TRUE(std::isnan(mc[1]));
  EXPECT_TRUE(std::isnan(perm[1]));
  EXPECT_FALSE(std::isnan(disc[1]));

  mufor_dataset* other = nullptr;
  ASSERT_EQ(mufor_dataset_simulate(4, 160, 2, &other), MUFOR_OK);
  EXPECT_EQ(mufor_importance(m, other, &o, 1, mc, disc, perm), MUFOR_ERR_SCHEMA_MISMATCH);
  EXPECT_EQ(mufor_dataset_write_roles(d, temp_file("roles.csv").string().c_str()), MUFOR_ERR_INVALID_ARGUMENT);
  std::filesystem::remove(path);
  mufor_dataset_free(other);
  mufor_model_free(m);
  mufor_dataset_free(d);
}

TEST(CApi, SimulationStudyTables) {
  const int classes[] = {4};
  const size_t sizes[] = {100};
  mufor_study_options o{classes, 1, sizes, 1, 2, "multi_class,difference", 9};
  mufor_config c = small_config(15);
  char* summary = nullptr;
  char* raw = nullptr;
  ASSERT_EQ(mufor_simstudy(&o, &c, 1, &summary, &raw, nullptr), MUFOR_OK) << mufor_last_error();
  const std::string s = take(summary);
  const std::string r = take(raw);
  // 7 comparisons by 2 measures.
  EXPECT_EQ(std::count(s.begin(), s.end(), '\n'), 1 + 14);
  EXPECT_EQ(std::count(r.begin(), r.end(), '\n'), 1 + 28);
  EXPECT_NE(s.find("difference"), std::string::npos);
  EXPECT_EQ(s.find("permutation"), std::string::npos);
  o.measures = "bogus";
  EXPECT_EQ(mufor_simstudy(&o, &c, 1, &summary, nullptr, nullptr), MUFOR_ERR_INVALID_ARGUMENT);
}

TEST(CApi, CrossValidationTables) {
  mufor_dataset* d = nullptr;
  ASSERT_EQ(mufor_dataset_simulate(4, 120, 6, &d), MUFOR_OK);
  const mufor_config c = small_config(10);
  mufor_cv_options o;
  mufor_cv_options_default(&o);
  EXPECT_EQ(o.folds, 5);
  EXPECT_EQ(o.repetitions, 5);
  o.repetitions = 2;
  const mufor_dataset* sets[] = {d};
  const char* names[] = {"sim"};
  char* folds = nullptr;
  char* summary = nullptr;
  char* tests = nullptr;
  ASSERT_EQ(mufor_crossval(sets, names, 1, &c, &o, 1, &folds, &summary, &tests), MUFOR_OK) << mufor_last_error();
  const std::string f = take(folds);
  // 2 repetitions by 5 folds by 2 methods.
  EXPECT_EQ(std::count(f.begin(), f.end(), '\n'), 1 + 20);
  EXPECT_NE(f.find("sim"), std::string::npos);
  EXPECT_GT(take(summary).size(), 0u);
  EXPECT_EQ(take(tests), "");
  mufor_dataset_free(d);
}

}  // namespace
