#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "mufor/data.h"

namespace mufor {

// Covariate types of the simulation design. Group covariates separate two
// or three groups of classes; class-associated covariates (kClassAssoc1..4)
// shift one to four individual classes.
enum class CovariateRole {
  kNoise,
  kTwoGroups,
  kThreeGroups,
  kClassAssoc1,
  kClassAssoc2,
  kClassAssoc3,
  kClassAssoc4,
};

// "noise", "two_gr", "thr_gr", "cl_as_1" ... "cl_as_4".
const char* to_string(CovariateRole role);
CovariateRole parse_role(const std::string& text);

struct SimSetting {
  int n_classes = 4;  // 4, 6 or 10
  std::size_t n = 1000;
  std::uint64_t seed = 1;
};

struct SimDataset {
  Dataset data;
  std::vector<CovariateRole> roles;
};

constexpr std::size_t kNoiseCovariates = 50;
constexpr std::size_t kCovariatesPerRole = 3;

// Informative roles present for a class count, in column order.
std::vector<CovariateRole> informative_roles(int n_classes);

// Class-specific means of a role (index c is class c + 1).
std::vector<double> role_means(CovariateRole role, int n_classes);

// Balanced classes (floor(n / C) each, the remainder to the lowest classes)
// in shuffled row order. Covariates are unit-variance normals around their
// class means; noise covariates come first, then three columns per
// informative role.
SimDataset generate(const SimSetting& setting);

// Sidecar with columns covariate, role.
void write_roles(const SimDataset& sim, const std::string& path);
std::vector<CovariateRole> load_roles(const std::string& path, const Dataset& data);

}  // namespace mufor
