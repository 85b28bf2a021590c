#include "mufor/simulation.h"

#include <fstream>
#include <sstream>

#include "mufor/error.h"
#include "mufor/random.h"

namespace mufor {

const char* to_string(CovariateRole role) {
  switch (role) {
    case CovariateRole::kNoise:
      return "noise";
    case CovariateRole::kTwoGroups:
      return "two_gr";
    case CovariateRole::kThreeGroups:
      return "thr_gr";
    case CovariateRole::kClassAssoc1:
      return "cl_as_1";
    case CovariateRole::kClassAssoc2:
      return "cl_as_2";
    case CovariateRole::kClassAssoc3:
      return "cl_as_3";
    case CovariateRole::kClassAssoc4:
      return "cl_as_4";
  }
  return "noise";
}

CovariateRole parse_role(const std::string& text) {
  for (auto r : {CovariateRole::kNoise, CovariateRole::kTwoGroups, CovariateRole::kThreeGroups,
                 CovariateRole::kClassAssoc1, CovariateRole::kClassAssoc2, CovariateRole::kClassAssoc3,
                 CovariateRole::kClassAssoc4}) {
    if (text == to_string(r)) return r;
  }
  fail(ErrorKind::kParse, "unknown covariate role '" + text + "'");
}

namespace {

void check_classes(int n_classes) {
  if (n_classes != 4 && n_classes != 6 && n_classes != 10) {
    fail(ErrorKind::kInvalidArgument, "class count must be 4, 6 or 10");
  }
}

}  // namespace

std::vector<CovariateRole> informative_roles(int n_classes) {
  check_classes(n_classes);
  std::vector<CovariateRole> roles = {CovariateRole::kTwoGroups};
  if (n_classes >= 6) roles.push_back(CovariateRole::kThreeGroups);
  roles.push_back(CovariateRole::kClassAssoc1);
  roles.push_back(CovariateRole::kClassAssoc2);
  roles.push_back(CovariateRole::kClassAssoc3);
  if (n_classes == 10) roles.push_back(CovariateRole::kClassAssoc4);
  return roles;
}

std::vector<double> role_means(CovariateRole role, int n_classes) {
  check_classes(n_classes);
  using V = std::vector<double>;
  if (role == CovariateRole::kNoise) return V(static_cast<std::size_t>(n_classes), 0.0);
  if (n_classes == 4) {
    switch (role) {
      case CovariateRole::kTwoGroups:
        return V{0, 0, 1.5, 1.5};
      case CovariateRole::kClassAssoc1:
        return V{0, 0, 0, 1};
      case CovariateRole::kClassAssoc2:
        return V{0, 0, 1, 2};
      case CovariateRole::kClassAssoc3:
        return V{0, 0.75, 1.5, 2.25};
      default:
        break;
    }
  } else if (n_classes == 6) {
    switch (role) {
      case CovariateRole::kTwoGroups:
        return V{0, 0, 0, 1.5, 1.5, 1.5};
      case CovariateRole::kThreeGroups:
        return V{0, 0, 1, 1, 2, 2};
      case CovariateRole::kClassAssoc1:
        return V{0, 0, 0, 0, 0, 1};
      case CovariateRole::kClassAssoc2:
        return V{0, 0, 0, 0, 1, 2};
      case CovariateRole::kClassAssoc3:
        return V{0, 0, 0, 0.75, 1.5, 2.25};
      default:
        break;
    }
  } else {
    switch (role) {
      case CovariateRole::kTwoGroups:
        return V{0, 0, 0, 0, 0, 1.5, 1.5, 1.5, 1.5, 1.5};
      case CovariateRole::kThreeGroups:
        return V{0, 0, 0, 0, 1, 1, 1, 2, 2, 2};
      case CovariateRole::kClassAssoc1:
        return V{0, 0, 0, 0, 0, 0, 0, 0, 0, 1};
      case CovariateRole::kClassAssoc2:
        return V{0, 0, 0, 0, 0, 0, 0, 0, 1, 2};
      case CovariateRole::kClassAssoc3:
        return V{0, 0, 0, 0, 0, 0, 0.75, 0.75, 1.5, 2.25};
      case CovariateRole::kClassAssoc4:
        return V{0, 0, 0, 0, 0.75, 0.75, 1.5, 1.5, 2.25, 3};
      default:
        break;
    }
  }
  fail(ErrorKind::kInvalidArgument,
       std::string("role ") + to_string(role) + " is absent for C = " + std::to_string(n_classes));
}

SimDataset generate(const SimSetting& setting) {
  check_classes(setting.n_classes);
  const auto C = static_cast<std::size_t>(setting.n_classes);
  const std::size_t n = setting.n;
  if (n < C) fail(ErrorKind::kInvalidArgument, "n must be at least the number of classes");

  Rng rng(derive_seed(setting.seed, {0x53494d}));
  std::vector<int> labels;
  labels.reserve(n);
  for (std::size_t c = 0; c < C; ++c) {
    const std::size_t count = n / C + (c < n % C ? 1 : 0);
    labels.insert(labels.end(), count, static_cast<int>(c));
  }
  rng.shuffle(std::span<int>(labels));

  SimDataset sim;
  std::vector<CovariateInfo> covariates;
  std::vector<std::vector<double>> means;
  for (std::size_t j = 0; j < kNoiseCovariates; ++j) {
    covariates.push_back({"X_no_" + std::to_string(j + 1), CovariateKind::kContinuous, 0, {}});
    sim.roles.push_back(CovariateRole::kNoise);
    means.push_back(role_means(CovariateRole::kNoise, setting.n_classes));
  }
  for (CovariateRole role : informative_roles(setting.n_classes)) {
    for (std::size_t k = 0; k < kCovariatesPerRole; ++k) {
      covariates.push_back(
          {std::string("X_") + to_string(role) + "_" + std::to_string(k + 1), CovariateKind::kContinuous, 0, {}});
      sim.roles.push_back(role);
      means.push_back(role_means(role, setting.n_classes));
    }
  }

  std::vector<double> values(n * covariates.size());
  for (std::size_t j = 0; j < covariates.size(); ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      values[j * n + i] = means[j][static_cast<std::size_t>(labels[i])] + rng.normal();
    }
  }
  std::vector<std::string> class_names;
  for (std::size_t c = 0; c < C; ++c) class_names.push_back(std::to_string(c + 1));
  sim.data = Dataset(std::move(covariates), std::move(values), std::move(labels), std::move(class_names));
  return sim;
}

void write_roles(const SimDataset& sim, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::kIo, "cannot write '" + path + "'");
  out << "covariate,role\n";
  for (std::size_t j = 0; j < sim.roles.size(); ++j) {
    out << sim.data.covariate(j).name << ',' << to_string(sim.roles[j]) << '\n';
  }
  if (!out) fail(ErrorKind::kIo, "write failed for '" + path + "'");
}

std::vector<CovariateRole> load_roles(const std::string& path, const Dataset& data) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::kIo, "cannot open roles '" + path + "'");
  std::string line;
  std::getline(in, line);
  std::vector<CovariateRole> roles(data.p(), CovariateRole::kNoise);
  std::vector<bool> seen(data.p(), false);
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto comma = line.find(',');
    if (comma == std::string::npos) fail(ErrorKind::kParse, "roles line without ',': " + line);
    const std::string name = line.substr(0, comma);
    std::size_t j = 0;
    while (j < data.p() && data.covariate(j).name != name) ++j;
    if (j == data.p()) fail(ErrorKind::kParse, "roles name unknown covariate '" + name + "'");
    roles[j] = parse_role(line.substr(comma + 1));
    seen[j] = true;
  }
  for (std::size_t j = 0; j < data.p(); ++j) {
    if (!seen[j]) fail(ErrorKind::kParse, "no role for covariate '" + data.covariate(j).name + "'");
  }
  return roles;
}

}  // namespace mufor
