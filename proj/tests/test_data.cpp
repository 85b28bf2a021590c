#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <numeric>

#include "mufor/data.h"
#include "mufor/error.h"
#include "mufor/random.h"

namespace mufor {
namespace {

std::filesystem::path temp_file(const std::string& name, const std::string& content) {
  auto path = std::filesystem::temp_directory_path() / ("mufor_test_data_" + name);
  std::ofstream(path, std::ios::binary) << content;
  return path;
}

std::string error_message(const std::string& text, const LoadOptions& options = {}) {
  try {
    parse_dataset(text, options);
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

TEST(Load, DimensionBookkeeping) {
  const auto path = temp_file("dims.csv", "x1,x2,y\n1,2,a\n3,4,b\n5,6,c\n7,8,a\n");
  const Dataset d = load_dataset(path.string());
  EXPECT_EQ(d.n(), 4u);
  EXPECT_EQ(d.p(), 2u);
  EXPECT_EQ(d.n_classes(), 3);
  EXPECT_EQ(d.class_names(), (std::vector<std::string>{"a", "b", "c"}));
  EXPECT_EQ(d.value(3, 1), 8.0);
  EXPECT_EQ(d.label(3), 0);
  EXPECT_EQ(d.covariate(0).kind, CovariateKind::kContinuous);
  std::filesystem::remove(path);
}

TEST(Load, MissingValueNamesRowAndColumn) {
  const std::string msg = error_message("x1,x2,y\n1,2,a\n3,,b\n5,6,c\n");
  EXPECT_NE(msg.find("missing value at (row 2, column 2"), std::string::npos) << msg;
}

TEST(Load, StringColumnIsNominal) {
  const Dataset d = parse_dataset("colour,x,y\nred,1,a\ngreen,2,b\nred,3,c\n");
  EXPECT_EQ(d.covariate(0).kind, CovariateKind::kNominal);
  EXPECT_EQ(d.covariate(0).n_categories, 2);
  // Codes follow the sorted level names.
  EXPECT_EQ(d.covariate(0).levels, (std::vector<std::string>{"green", "red"}));
  EXPECT_EQ(d.value(0, 0), 2.0);
  EXPECT_EQ(d.value(1, 0), 1.0);
}

TEST(Load, RejectsTooFewClasses) {
  EXPECT_THROW(parse_dataset("x,y\n1,a\n2,b\n3,a\n"), Error);
}

TEST(Load, RejectsRaggedRows) {
  const std::string msg = error_message("x1,x2,y\n1,2,a\n3,b\n5,6,c\n");
  EXPECT_NE(msg.find("line 3"), std::string::npos) << msg;
}

TEST(Load, TabDelimiterAndOutcomeColumn) {
  LoadOptions options;
  options.outcome_column = "cls";
  const Dataset d = parse_dataset("cls\tx1\tx2\nu\t1\t2\nv\t3\t4\nw\t5\t6\n", options);
  EXPECT_EQ(d.p(), 2u);
  EXPECT_EQ(d.covariate(0).name, "x1");
  EXPECT_EQ(d.value(2, 1), 6.0);
  EXPECT_EQ(d.label(1), 1);
  options.outcome_column = "nope";
  EXPECT_THROW(parse_dataset("cls\tx1\nu\t1\n", options), Error);
}

TEST(Load, SchemaSidecar) {
  const auto schema_path = temp_file("schema.txt", "# kinds\ngrade: ordered\nzip: nominal\n");
  LoadOptions options;
  options.schema = load_schema(schema_path.string());
  const Dataset d = parse_dataset("grade,zip,x,y\n1,10,0.5,a\n3,20,0.7,b\n2,10,0.1,c\n", options);
  EXPECT_EQ(d.covariate(0).kind, CovariateKind::kOrderedCategorical);
  EXPECT_EQ(d.covariate(0).n_categories, 3);
  EXPECT_EQ(d.covariate(1).kind, CovariateKind::kNominal);
  EXPECT_EQ(d.covariate(1).n_categories, 2);
  EXPECT_EQ(d.covariate(2).kind, CovariateKind::kContinuous);
  options.schema = {{"x", CovariateKind::kOrderedCategorical}, {"missing", CovariateKind::kNominal}};
  EXPECT_THROW(parse_dataset("x,y\n1,a\n2,b\n3,c\n", options), Error);
  options.schema = {{"s", CovariateKind::kContinuous}};
  EXPECT_THROW(parse_dataset("s,y\nred,a\nblue,b\ngreen,c\n", options), Error);
  std::filesystem::remove(schema_path);
}

TEST(Load, WriteRoundTrip) {
  const Dataset d = parse_dataset("colour,x,y\nred,1.25,a\ngreen,-2,b\nred,3e-7,c\n");
  const auto path = std::filesystem::temp_directory_path() / "mufor_test_data_roundtrip.csv";
  write_dataset(d, path.string());
  const Dataset back = load_dataset(path.string());
  EXPECT_EQ(back.values(), d.values());
  EXPECT_EQ(back.class_names(), d.class_names());
  EXPECT_EQ(back.fingerprint(), d.fingerprint());
  std::filesystem::remove(path);
}

TEST(Load, MissingFileIsIoError) {
  try {
    load_dataset("/nonexistent/mufor/file.csv");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kIo);
  }
}

// Weighted PCA on class-proportion rows by power iteration, independent of
// the library's eigen solver.
std::vector<double> oracle_scores(const std::vector<int>& codes, const std::vector<int>& labels, int K, int C) {
  std::vector<std::vector<double>> counts(static_cast<std::size_t>(K), std::vector<double>(static_cast<std::size_t>(C)));
  for (std::size_t i = 0; i < codes.size(); ++i) counts[codes[i] - 1][labels[i]] += 1;
  std::vector<double> w(static_cast<std::size_t>(K));
  double total = 0;
  for (int k = 0; k < K; ++k) {
    for (double v : counts[k]) w[k] += v;
    total += w[k];
  }
  std::vector<double> mean(static_cast<std::size_t>(C));
  for (int k = 0; k < K; ++k) {
    for (int c = 0; c < C; ++c) {
      counts[k][c] /= w[k];
      mean[c] += w[k] * counts[k][c] / total;
    }
  }
  std::vector<std::vector<double>> cov(static_cast<std::size_t>(C), std::vector<double>(static_cast<std::size_t>(C)));
  for (int k = 0; k < K; ++k) {
    for (int a = 0; a < C; ++a) {
      for (int b = 0; b < C; ++b) cov[a][b] += w[k] * (counts[k][a] - mean[a]) * (counts[k][b] - mean[b]) / total;
    }
  }
  std::vector<double> v(static_cast<std::size_t>(C));
  for (int c = 0; c < C; ++c) v[c] = 1.0 + 0.1 * c;
  for (int it = 0; it < 5000; ++it) {
    std::vector<double> next(static_cast<std::size_t>(C));
    for (int a = 0; a < C; ++a) {
      for (int b = 0; b < C; ++b) next[a] += cov[a][b] * v[b];
    }
    double norm = 0;
    for (double x : next) norm += x * x;
    norm = std::sqrt(norm);
    for (int c = 0; c < C; ++c) v[c] = next[c] / norm;
  }
  std::vector<double> s(static_cast<std::size_t>(K));
  for (int k = 0; k < K; ++k) {
    for (int c = 0; c < C; ++c) s[k] += (counts[k][c] - mean[c]) * v[c];
  }
  return s;
}

std::vector<int> codes_by_rank(const CategoryEncoding& enc) { return enc.code_of_rank(); }

TEST(CategoryOrder, MonotoneInClassProportion) {
  // C = 2, equal counts of 10, class-1 proportions (0.1, 0.9, 0.5).
  std::vector<int> codes;
  std::vector<int> labels;
  const int ones[] = {1, 9, 5};
  for (int k = 0; k < 3; ++k) {
    for (int i = 0; i < 10; ++i) {
      codes.push_back(k + 1);
      labels.push_back(i < ones[k] ? 0 : 1);
    }
  }
  const auto enc = order_categories(codes, labels, 3, 2);
  const auto order = codes_by_rank(enc);
  const std::vector<int> forward = {1, 3, 2};
  const std::vector<int> reverse = {2, 3, 1};
  EXPECT_TRUE(order == forward || order == reverse);
  // Lowest code gets the non-positive side.
  EXPECT_EQ(order, forward);
}

TEST(CategoryOrder, IdenticalRowsFallBackToCountThenCode) {
  // Every category holds only class 0: all scores equal.
  std::vector<int> codes = {1, 2, 3, 4};
  std::vector<int> labels = {0, 0, 0, 0};
  EXPECT_EQ(codes_by_rank(order_categories(codes, labels, 4, 3)), (std::vector<int>{1, 2, 3, 4}));
  // Larger categories first among ties.
  codes = {1, 2, 2, 3, 3, 3};
  labels = {0, 0, 0, 0, 0, 0};
  EXPECT_EQ(codes_by_rank(order_categories(codes, labels, 3, 3)), (std::vector<int>{3, 2, 1}));
}

TEST(CategoryOrder, TiedPairOrderedByCountThenCode) {
  // Categories 1 and 3 share the composition (1/2, 1/2, 0); 3 is larger.
  std::vector<int> codes;
  std::vector<int> labels;
  auto add = [&](int code, int label, int times) {
    for (int i = 0; i < times; ++i) {
      codes.push_back(code);
      labels.push_back(label);
    }
  };
  add(1, 0, 2);
  add(1, 1, 2);
  add(2, 2, 5);
  add(3, 0, 4);
  add(3, 1, 4);
  add(4, 2, 3);
  add(4, 0, 1);
  const auto enc = order_categories(codes, labels, 4, 3);
  EXPECT_EQ(enc.rank(3) + 1, enc.rank(1));
  // Equal counts: lower code first.
  add(5, 0, 2);
  add(5, 1, 2);
  const auto enc5 = order_categories(codes, labels, 5, 3);
  EXPECT_EQ(enc5.rank(3) + 1, enc5.rank(1));
  EXPECT_EQ(enc5.rank(1) + 1, enc5.rank(5));
}

TEST(CategoryOrder, SingleCategoryIsIdentity) {
  std::vector<int> codes = {1, 1, 1};
  std::vector<int> labels = {0, 1, 2};
  const auto enc = order_categories(codes, labels, 1, 3);
  EXPECT_EQ(enc.rank_of_code, (std::vector<int>{1}));
}

TEST(CategoryOrder, MatchesPowerIterationOracle) {
  Rng rng(11);
  int checked = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int K = 2 + static_cast<int>(rng.uniform_index(6));
    const int C = 3 + static_cast<int>(rng.uniform_index(3));
    std::vector<int> codes;
    std::vector<int> labels;
    for (int k = 1; k <= K; ++k) {
      const int size = 5 + static_cast<int>(rng.uniform_index(20));
      for (int i = 0; i < size; ++i) {
        codes.push_back(k);
        labels.push_back(static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(C))));
      }
    }
    auto s = oracle_scores(codes, labels, K, C);
    // Skip near-ties in the oracle score, where the order is fragile.
    std::vector<double> sorted = s;
    std::sort(sorted.begin(), sorted.end());
    bool separated = true;
    for (std::size_t i = 1; i < sorted.size(); ++i) separated &= sorted[i] - sorted[i - 1] > 1e-6;
    if (!separated) continue;
    if (s[0] > 0) {
      for (double& x : s) x = -x;
    }
    std::vector<int> expected(static_cast<std::size_t>(K));
    std::iota(expected.begin(), expected.end(), 1);
    std::sort(expected.begin(), expected.end(), [&](int a, int b) { return s[a - 1] < s[b - 1]; });
    const auto enc = order_categories(codes, labels, K, C);
    EXPECT_TRUE(enc.is_bijection());
    EXPECT_EQ(codes_by_rank(enc), expected) << "trial " << trial;
    ++checked;
  }
  EXPECT_GT(checked, 100);
}

TEST(Encode, DirectSubstitution) {
  CovariateInfo info{"z", CovariateKind::kNominal, 2, {"p", "q"}};
  const Dataset d({info}, {2, 1, 2}, {0, 1, 2}, {"a", "b", "c"});
  CategoryEncoding enc;
  enc.covariate = 0;
  enc.rank_of_code = {2, 1};
  const Dataset e = encode_dataset(d, {enc});
  EXPECT_EQ(e.values(), (std::vector<double>{1, 2, 1}));
  EXPECT_EQ(e.covariate(0).kind, CovariateKind::kOrderedCategorical);
}

TEST(Encode, NoNominalIsIdentity) {
  CovariateInfo info{"x", CovariateKind::kContinuous, 0, {}};
  const Dataset d({info}, {0.1, 0.2, 0.3}, {0, 1, 2}, {"a", "b", "c"});
  const Dataset e = encode_dataset(d, {});
  EXPECT_EQ(e.fingerprint(), d.fingerprint());
}

TEST(Encode, CodeOutsideDomainThrows) {
  CovariateInfo info{"z", CovariateKind::kNominal, 3, {"p", "q", "r"}};
  const Dataset d({info}, {1, 3, 2}, {0, 1, 2}, {"a", "b", "c"});
  CategoryEncoding enc;
  enc.covariate = 0;
  enc.rank_of_code = {1, 2};
  EXPECT_THROW(encode_dataset(d, {enc}), Error);
  EXPECT_THROW(encode_dataset(d, {}), Error);
}

TEST(Encode, RoundTripAndContinuousColumnsUntouched) {
  Rng rng(12);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 30;
    const int K = 2 + static_cast<int>(rng.uniform_index(5));
    std::vector<double> values;
    std::vector<int> labels(n);
    for (std::size_t i = 0; i < n; ++i) values.push_back(rng.normal());
    for (std::size_t i = 0; i < n; ++i) {
      values.push_back(static_cast<double>(1 + rng.uniform_index(static_cast<std::uint64_t>(K))));
    }
    for (std::size_t i = 0; i < n; ++i) labels[i] = static_cast<int>(i % 3);
    std::vector<CovariateInfo> cov = {{"x", CovariateKind::kContinuous, 0, {}},
                                      {"z", CovariateKind::kNominal, K, {}}};
    const Dataset d(cov, values, labels, {"a", "b", "c"});
    const auto encs = order_all_nominal(d);
    ASSERT_EQ(encs.size(), 1u);
    EXPECT_TRUE(encs[0].is_bijection());
    const Dataset e = encode_dataset(d, encs);
    const auto inverse = encs[0].code_of_rank();
    for (std::size_t i = 0; i < n; ++i) {
      EXPECT_EQ(std::memcmp(&e.values()[i], &d.values()[i], sizeof(double)), 0);
      const int rank = static_cast<int>(e.value(i, 1));
      EXPECT_EQ(inverse[static_cast<std::size_t>(rank - 1)], static_cast<int>(d.value(i, 1)));
    }
  }
}

TEST(DatasetType, RejectsInvalidConstruction) {
  CovariateInfo info{"x", CovariateKind::kContinuous, 0, {}};
  EXPECT_THROW(Dataset({info}, {1, 2}, {0, 1, 2}, {"a", "b", "c"}), Error);
  EXPECT_THROW(Dataset({info}, {1, 2, 3}, {0, 1, 3}, {"a", "b", "c"}), Error);
  EXPECT_THROW(Dataset({info}, {1, NAN, 3}, {0, 1, 2}, {"a", "b", "c"}), Error);
  CovariateInfo nominal{"z", CovariateKind::kNominal, 2, {}};
  EXPECT_THROW(Dataset({nominal}, {1, 2, 3}, {0, 1, 2}, {"a", "b", "c"}), Error);
}

TEST(DatasetType, SubsetAndWithColumn) {
  CovariateInfo info{"x", CovariateKind::kContinuous, 0, {}};
  const Dataset d({info, info}, {1, 2, 3, 4, 5, 6}, {0, 1, 2}, {"a", "b", "c"});
  const std::vector<std::size_t> rows = {2, 0};
  const Dataset s = d.subset(rows);
  EXPECT_EQ(s.values(), (std::vector<double>{3, 1, 6, 4}));
  EXPECT_EQ(s.label(0), 2);
  const Dataset w = d.with_column(1, {9, 8, 7});
  EXPECT_EQ(w.value(0, 1), 9.0);
  EXPECT_EQ(w.value(0, 0), 1.0);
  EXPECT_NE(w.fingerprint(), d.fingerprint());
}

}  // namespace
}  // namespace mufor
