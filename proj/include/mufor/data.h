#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mufor {

enum class CovariateKind { kContinuous, kOrderedCategorical, kNominal };

const char* to_string(CovariateKind kind);
// Accepts "continuous", "ordered", "ordered_categorical", "nominal".
CovariateKind parse_covariate_kind(const std::string& text);

struct CovariateInfo {
  std::string name;
  CovariateKind kind = CovariateKind::kContinuous;
  // Number of categories for ordered/nominal covariates, 0 for continuous.
  int n_categories = 0;
  // Category labels of a nominal covariate; code k (1-based) is levels[k-1].
  std::vector<std::string> levels;
};

// Covariate matrix plus class labels. Values are stored column-major.
// Nominal covariates hold integer codes 1..n_categories. Labels are 0-based
// class indices into class_names.
class Dataset {
 public:
  Dataset() = default;
  Dataset(std::vector<CovariateInfo> covariates, std::vector<double> values,
          std::vector<int> labels, std::vector<std::string> class_names);

  std::size_t n() const { return labels_.size(); }
  std::size_t p() const { return covariates_.size(); }
  int n_classes() const { return static_cast<int>(class_names_.size()); }

  double value(std::size_t row, std::size_t col) const { return values_[col * n() + row]; }
  std::span<const double> column(std::size_t col) const {
    return {values_.data() + col * n(), n()};
  }
  int label(std::size_t row) const { return labels_[row]; }
  std::span<const int> labels() const { return labels_; }

  const CovariateInfo& covariate(std::size_t col) const { return covariates_[col]; }
  const std::vector<CovariateInfo>& covariates() const { return covariates_; }
  const std::vector<std::string>& class_names() const { return class_names_; }
  const std::vector<double>& values() const { return values_; }

  Dataset subset(std::span<const std::size_t> rows) const;
  // Copy with one column replaced; kinds and metadata unchanged.
  Dataset with_column(std::size_t col, std::vector<double> column_values) const;

  // Hex digest over names, kinds, class names, values and labels. Used to
  // reject an importance run against data the model was not trained on.
  std::string fingerprint() const;

 private:
  std::vector<CovariateInfo> covariates_;
  std::vector<double> values_;
  std::vector<int> labels_;
  std::vector<std::string> class_names_;
};

struct LoadOptions {
  // Outcome column name; the last column when empty.
  std::string outcome_column;
  // Declared kinds by column name; undeclared columns are inferred.
  std::map<std::string, CovariateKind> schema;
  // Fewer distinct outcome labels are rejected.
  int min_classes = 3;
  // When false every column is a covariate and all labels are class 0 of a
  // single placeholder class.
  bool has_outcome = true;
};

// Reads a comma- or tab-delimited file with a header row. The delimiter is
// a tab when the header line contains one, a comma otherwise.
Dataset load_dataset(const std::string& path, const LoadOptions& options = {});
Dataset parse_dataset(const std::string& text, const LoadOptions& options = {});

// Schema sidecar: one `column: kind` pair per line, '#' starts a comment.
std::map<std::string, CovariateKind> load_schema(const std::string& path);

void write_dataset(const Dataset& data, const std::string& path);

// Maps original category code (1-based) to its rank (1-based).
struct CategoryEncoding {
  std::size_t covariate = 0;
  std::vector<int> rank_of_code;

  int n_categories() const { return static_cast<int>(rank_of_code.size()); }
  int rank(int code) const { return rank_of_code.at(static_cast<std::size_t>(code - 1)); }
  std::vector<int> code_of_rank() const;
  bool is_bijection() const;
};

// Orders categories by the first principal component of their class
// composition. Rows of the n_categories x n_classes matrix are class
// proportions per category; the PCA weights each row by its category count.
// The component's sign is fixed so that the lowest-coded category with a
// nonzero score is negative; ties go to the larger category, then the
// lower code.
CategoryEncoding order_categories(std::span<const int> codes, std::span<const int> labels,
                                  int n_categories, int n_classes);
CategoryEncoding order_nominal_categories(const Dataset& data, std::size_t covariate);

// Replaces nominal columns by their ranks; those columns become ordered
// categorical. Throws when a code lies outside its encoding's domain.
Dataset encode_dataset(const Dataset& data, const std::vector<CategoryEncoding>& encodings);

// Computes encodings for every nominal covariate of `data`.
std::vector<CategoryEncoding> order_all_nominal(const Dataset& data);

}  // namespace mufor
