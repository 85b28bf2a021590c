#include "mufor/data.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdint>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>

#include "mufor/error.h"
#include "mufor/format.h"

namespace mufor {
namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r' || s[b] == '\n')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r' || s[e - 1] == '\n')) --e;
  return std::string(s.substr(b, e - b));
}

// Splits one line; double quotes protect delimiters, "" is an escaped quote.
std::vector<std::string> split_line(const std::string& line, char delim) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  bool was_quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char ch = line[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(ch);
      }
    } else if (ch == '"') {
      quoted = true;
      was_quoted = true;
    } else if (ch == delim) {
      fields.push_back(was_quoted ? cur : trim(cur));
      cur.clear();
      was_quoted = false;
    } else {
      cur.push_back(ch);
    }
  }
  fields.push_back(was_quoted ? cur : trim(cur));
  return fields;
}

bool is_missing(const std::string& s) { return s.empty() || s == "NA"; }

// Distinct labels in a deterministic order: numerically when every label is
// a number, lexicographically otherwise.
std::vector<std::string> ordered_levels(const std::vector<std::string>& cells) {
  std::set<std::string> distinct(cells.begin(), cells.end());
  std::vector<std::string> levels(distinct.begin(), distinct.end());
  bool numeric = std::all_of(levels.begin(), levels.end(),
                             [](const std::string& s) { return parse_double(s).has_value(); });
  if (numeric) {
    std::stable_sort(levels.begin(), levels.end(), [](const std::string& a, const std::string& b) {
      return *parse_double(a) < *parse_double(b);
    });
  }
  return levels;
}

void fnv_bytes(std::uint64_t& h, const void* data, std::size_t len) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
}

void fnv_string(std::uint64_t& h, const std::string& s) {
  std::uint64_t len = s.size();
  fnv_bytes(h, &len, sizeof(len));
  fnv_bytes(h, s.data(), s.size());
}

}  // namespace

const char* to_string(CovariateKind kind) {
  switch (kind) {
    case CovariateKind::kContinuous:
      return "continuous";
    case CovariateKind::kOrderedCategorical:
      return "ordered_categorical";
    case CovariateKind::kNominal:
      return "nominal";
  }
  return "continuous";
}

CovariateKind parse_covariate_kind(const std::string& text) {
  if (text == "continuous" || text == "numeric") return CovariateKind::kContinuous;
  if (text == "ordered" || text == "ordered_categorical") return CovariateKind::kOrderedCategorical;
  if (text == "nominal" || text == "categorical") return CovariateKind::kNominal;
  fail(ErrorKind::kParse, "unknown covariate kind '" + text + "'");
}

Dataset::Dataset(std::vector<CovariateInfo> covariates, std::vector<double> values,
                 std::vector<int> labels, std::vector<std::string> class_names)
    : covariates_(std::move(covariates)),
      values_(std::move(values)),
      labels_(std::move(labels)),
      class_names_(std::move(class_names)) {
  if (values_.size() != covariates_.size() * labels_.size()) {
    fail(ErrorKind::kInvalidArgument, "dataset values do not match n x p");
  }
  const int c = n_classes();
  for (int y : labels_) {
    if (y < 0 || y >= c) fail(ErrorKind::kInvalidArgument, "class label out of range");
  }
  for (std::size_t j = 0; j < covariates_.size(); ++j) {
    const auto& info = covariates_[j];
    for (double v : column(j)) {
      if (!std::isfinite(v)) {
        fail(ErrorKind::kInvalidArgument, "non-finite value in covariate '" + info.name + "'");
      }
      if (info.kind == CovariateKind::kNominal &&
          (v != std::floor(v) || v < 1 || v > info.n_categories)) {
        fail(ErrorKind::kInvalidArgument,
             "nominal code out of range in covariate '" + info.name + "'");
      }
    }
  }
}

Dataset Dataset::subset(std::span<const std::size_t> rows) const {
  std::vector<double> vals(rows.size() * p());
  std::vector<int> labs(rows.size());
  for (std::size_t j = 0; j < p(); ++j) {
    auto col = column(j);
    for (std::size_t i = 0; i < rows.size(); ++i) vals[j * rows.size() + i] = col[rows[i]];
  }
  for (std::size_t i = 0; i < rows.size(); ++i) labs[i] = labels_[rows[i]];
  return Dataset(covariates_, std::move(vals), std::move(labs), class_names_);
}

Dataset Dataset::with_column(std::size_t col, std::vector<double> column_values) const {
  if (column_values.size() != n()) fail(ErrorKind::kInvalidArgument, "column length mismatch");
  std::vector<double> vals = values_;
  std::copy(column_values.begin(), column_values.end(), vals.begin() + col * n());
  return Dataset(covariates_, std::move(vals), labels_, class_names_);
}

std::string Dataset::fingerprint() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& c : covariates_) {
    fnv_string(h, c.name);
    fnv_string(h, to_string(c.kind));
    for (const auto& l : c.levels) fnv_string(h, l);
  }
  for (const auto& c : class_names_) fnv_string(h, c);
  fnv_bytes(h, values_.data(), values_.size() * sizeof(double));
  fnv_bytes(h, labels_.data(), labels_.size() * sizeof(int));
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Dataset parse_dataset(const std::string& text, const LoadOptions& options) {
  std::istringstream in(text);
  std::string header_line;
  if (!std::getline(in, header_line) || trim(header_line).empty()) {
    fail(ErrorKind::kParse, "missing header row");
  }
  const char delim = header_line.find('\t') != std::string::npos ? '\t' : ',';
  std::vector<std::string> header = split_line(header_line, delim);
  const std::size_t width = header.size();

  std::vector<std::vector<std::string>> rows;
  std::string line;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto fields = split_line(line, delim);
    if (fields.size() != width) {
      fail(ErrorKind::kParse, "line " + std::to_string(line_no) + " has " +
                                  std::to_string(fields.size()) + " fields, header has " +
                                  std::to_string(width));
    }
    rows.push_back(std::move(fields));
  }
  if (rows.empty()) fail(ErrorKind::kParse, "no data rows");

  std::size_t outcome = options.has_outcome ? width - 1 : width;
  if (options.has_outcome && !options.outcome_column.empty()) {
    auto it = std::find(header.begin(), header.end(), options.outcome_column);
    if (it == header.end()) {
      fail(ErrorKind::kParse, "outcome column '" + options.outcome_column + "' not found");
    }
    outcome = static_cast<std::size_t>(it - header.begin());
  }
  for (const auto& [name, kind] : options.schema) {
    if (std::find(header.begin(), header.end(), name) == header.end()) {
      fail(ErrorKind::kParse, "schema names unknown column '" + name + "'");
    }
  }

  const std::size_t n = rows.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < width; ++j) {
      if (is_missing(rows[i][j])) {
        fail(ErrorKind::kParse, "missing value at (row " + std::to_string(i + 1) + ", column " +
                                    std::to_string(j + 1) + " '" + header[j] + "')");
      }
    }
  }

  std::vector<std::string> outcome_cells(n, "?");
  if (outcome < width) {
    for (std::size_t i = 0; i < n; ++i) outcome_cells[i] = rows[i][outcome];
  }
  std::vector<std::string> class_names = ordered_levels(outcome_cells);
  if (outcome < width && static_cast<int>(class_names.size()) < options.min_classes) {
    fail(ErrorKind::kInvalidArgument, "outcome has " + std::to_string(class_names.size()) +
                                          " distinct labels; at least " +
                                          std::to_string(options.min_classes) + " required");
  }
  std::unordered_map<std::string, int> class_index;
  for (std::size_t c = 0; c < class_names.size(); ++c) class_index[class_names[c]] = static_cast<int>(c);
  std::vector<int> labels(n);
  for (std::size_t i = 0; i < n; ++i) labels[i] = class_index.at(outcome_cells[i]);

  std::vector<CovariateInfo> covariates;
  std::vector<double> values;
  values.reserve(n * (width - 1));
  for (std::size_t j = 0; j < width; ++j) {
    if (j == outcome) continue;
    CovariateInfo info;
    info.name = header[j];
    std::vector<std::string> cells(n);
    bool numeric = true;
    for (std::size_t i = 0; i < n; ++i) {
      cells[i] = rows[i][j];
      if (numeric && !parse_double(cells[i])) numeric = false;
    }
    auto declared = options.schema.find(info.name);
    info.kind = declared != options.schema.end()
                    ? declared->second
                    : (numeric ? CovariateKind::kContinuous : CovariateKind::kNominal);
    if (info.kind != CovariateKind::kNominal && !numeric) {
      fail(ErrorKind::kParse, "column '" + info.name + "' is declared " + to_string(info.kind) +
                                  " but holds non-numeric values");
    }
    if (info.kind == CovariateKind::kNominal) {
      info.levels = ordered_levels(cells);
      info.n_categories = static_cast<int>(info.levels.size());
      std::unordered_map<std::string, int> code;
      for (std::size_t k = 0; k < info.levels.size(); ++k) code[info.levels[k]] = static_cast<int>(k) + 1;
      for (std::size_t i = 0; i < n; ++i) values.push_back(code.at(cells[i]));
    } else {
      std::set<double> distinct;
      for (std::size_t i = 0; i < n; ++i) {
        double v = *parse_double(cells[i]);
        values.push_back(v);
        if (info.kind == CovariateKind::kOrderedCategorical) distinct.insert(v);
      }
      if (info.kind == CovariateKind::kOrderedCategorical) {
        info.n_categories = static_cast<int>(distinct.size());
      }
    }
    covariates.push_back(std::move(info));
  }
  return Dataset(std::move(covariates), std::move(values), std::move(labels), std::move(class_names));
}

Dataset load_dataset(const std::string& path, const LoadOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kIo, "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_dataset(buf.str(), options);
}

std::map<std::string, CovariateKind> load_schema(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::kIo, "cannot open schema '" + path + "'");
  std::map<std::string, CovariateKind> schema;
  std::string line;
  while (std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    auto colon = line.rfind(':');
    if (colon == std::string::npos) fail(ErrorKind::kParse, "schema line without ':': " + line);
    schema[trim(line.substr(0, colon))] = parse_covariate_kind(trim(line.substr(colon + 1)));
  }
  return schema;
}

void write_dataset(const Dataset& data, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::kIo, "cannot write '" + path + "'");
  for (std::size_t j = 0; j < data.p(); ++j) out << csv_field(data.covariate(j).name) << ',';
  out << "y\n";
  for (std::size_t i = 0; i < data.n(); ++i) {
    for (std::size_t j = 0; j < data.p(); ++j) {
      const auto& info = data.covariate(j);
      double v = data.value(i, j);
      if (info.kind == CovariateKind::kNominal && !info.levels.empty()) {
        out << csv_field(info.levels[static_cast<std::size_t>(v) - 1]);
      } else {
        out << format_double(v);
      }
      out << ',';
    }
    out << csv_field(data.class_names()[static_cast<std::size_t>(data.label(i))]) << '\n';
  }
  if (!out) fail(ErrorKind::kIo, "write failed for '" + path + "'");
}

}  // namespace mufor
