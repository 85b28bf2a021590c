#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "mufor/data.h"
#include "mufor/error.h"
#include "mufor/log.h"

namespace mufor {

std::vector<int> CategoryEncoding::code_of_rank() const {
  std::vector<int> inv(rank_of_code.size(), 0);
  for (std::size_t code = 0; code < rank_of_code.size(); ++code) {
    inv[static_cast<std::size_t>(rank_of_code[code] - 1)] = static_cast<int>(code) + 1;
  }
  return inv;
}

bool CategoryEncoding::is_bijection() const {
  std::vector<bool> seen(rank_of_code.size(), false);
  for (int r : rank_of_code) {
    if (r < 1 || r > n_categories() || seen[static_cast<std::size_t>(r - 1)]) return false;
    seen[static_cast<std::size_t>(r - 1)] = true;
  }
  return true;
}

CategoryEncoding order_categories(std::span<const int> codes, std::span<const int> labels,
                                  int n_categories, int n_classes) {
  if (codes.size() != labels.size()) fail(ErrorKind::kInvalidArgument, "codes/labels length mismatch");
  if (n_categories < 1 || n_classes < 1) fail(ErrorKind::kInvalidArgument, "empty category or class set");

  CategoryEncoding enc;
  enc.rank_of_code.resize(static_cast<std::size_t>(n_categories));
  std::iota(enc.rank_of_code.begin(), enc.rank_of_code.end(), 1);
  if (n_categories == 1) {
    log_warning("covariate has a single category; identity encoding used");
    return enc;
  }

  const auto K = static_cast<Eigen::Index>(n_categories);
  const auto C = static_cast<Eigen::Index>(n_classes);
  Eigen::MatrixXd counts = Eigen::MatrixXd::Zero(K, C);
  for (std::size_t i = 0; i < codes.size(); ++i) {
    int code = codes[i];
    if (code < 1 || code > n_categories) fail(ErrorKind::kInvalidArgument, "category code out of range");
    counts(code - 1, labels[i]) += 1.0;
  }
  Eigen::VectorXd weight = counts.rowwise().sum();
  const double total = weight.sum();

  Eigen::MatrixXd props = Eigen::MatrixXd::Zero(K, C);
  for (Eigen::Index k = 0; k < K; ++k) {
    if (weight(k) > 0) props.row(k) = counts.row(k) / weight(k);
  }
  Eigen::RowVectorXd mean = (weight.transpose() * props) / total;
  // Unobserved categories sit at the weighted mean and score 0.
  for (Eigen::Index k = 0; k < K; ++k) {
    if (weight(k) == 0) props.row(k) = mean;
  }
  Eigen::MatrixXd centered = props.rowwise() - mean;
  Eigen::MatrixXd cov = centered.transpose() * weight.asDiagonal() * centered / total;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  Eigen::VectorXd axis = solver.eigenvectors().col(C - 1);
  Eigen::VectorXd score = centered * axis;

  const double scale = std::max(1.0, score.cwiseAbs().maxCoeff());
  for (Eigen::Index k = 0; k < K; ++k) {
    if (std::abs(score(k)) > 1e-12 * scale) {
      if (score(k) > 0) score = -score;
      break;
    }
  }
  // Round away eigen-solver noise so that categories with identical rows
  // compare equal.
  for (Eigen::Index k = 0; k < K; ++k) {
    double s = score(k);
    score(k) = std::abs(s) <= 1e-12 * scale ? 0.0 : std::round(s * 1e12) / 1e12;
  }

  std::vector<int> order(static_cast<std::size_t>(n_categories));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    if (score(a) != score(b)) return score(a) < score(b);
    if (weight(a) != weight(b)) return weight(a) > weight(b);
    return a < b;
  });
  for (std::size_t r = 0; r < order.size(); ++r) {
    enc.rank_of_code[static_cast<std::size_t>(order[r])] = static_cast<int>(r) + 1;
  }
  return enc;
}

CategoryEncoding order_nominal_categories(const Dataset& data, std::size_t covariate) {
  const auto& info = data.covariate(covariate);
  if (info.kind != CovariateKind::kNominal) {
    fail(ErrorKind::kInvalidArgument, "covariate '" + info.name + "' is not nominal");
  }
  std::vector<int> codes(data.n());
  auto col = data.column(covariate);
  for (std::size_t i = 0; i < data.n(); ++i) codes[i] = static_cast<int>(col[i]);
  CategoryEncoding enc = order_categories(codes, data.labels(), info.n_categories, data.n_classes());
  enc.covariate = covariate;
  return enc;
}

std::vector<CategoryEncoding> order_all_nominal(const Dataset& data) {
  std::vector<CategoryEncoding> out;
  for (std::size_t j = 0; j < data.p(); ++j) {
    if (data.covariate(j).kind == CovariateKind::kNominal) out.push_back(order_nominal_categories(data, j));
  }
  return out;
}

Dataset encode_dataset(const Dataset& data, const std::vector<CategoryEncoding>& encodings) {
  std::vector<CovariateInfo> covariates = data.covariates();
  std::vector<double> values = data.values();
  const std::size_t n = data.n();
  for (std::size_t j = 0; j < data.p(); ++j) {
    if (covariates[j].kind != CovariateKind::kNominal) continue;
    auto it = std::find_if(encodings.begin(), encodings.end(),
                           [j](const CategoryEncoding& e) { return e.covariate == j; });
    if (it == encodings.end()) {
      fail(ErrorKind::kInvalidArgument, "no encoding for nominal covariate '" + covariates[j].name + "'");
    }
    for (std::size_t i = 0; i < n; ++i) {
      double v = values[j * n + i];
      if (v != std::floor(v) || v < 1 || v > it->n_categories()) {
        fail(ErrorKind::kInvalidArgument, "code " + std::to_string(v) + " of covariate '" +
                                              covariates[j].name + "' outside encoding domain");
      }
      values[j * n + i] = it->rank(static_cast<int>(v));
    }
    covariates[j].kind = CovariateKind::kOrderedCategorical;
    covariates[j].n_categories = it->n_categories();
  }
  std::vector<int> labels(data.labels().begin(), data.labels().end());
  return Dataset(std::move(covariates), std::move(values), std::move(labels), data.class_names());
}

}  // namespace mufor
