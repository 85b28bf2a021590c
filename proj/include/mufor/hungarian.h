#pragma once

#include <cstddef>
#include <vector>

namespace mufor {

// Dense row-major matrix of assignment weights.
struct WeightMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  WeightMatrix() = default;
  WeightMatrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}
  double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
};

// Maximum-weight injective assignment of rows to columns (rows <= cols) by
// the Hungarian method with row potentials. Among optimal assignments the
// lexicographically smallest column vector is returned, comparing
// objectives with a relative tolerance of 1e-11.
std::vector<std::size_t> max_weight_assignment(const WeightMatrix& w);

// Objective of the optimum only; skips the tie canonicalization.
double max_weight_assignment_value(const WeightMatrix& w);

double assignment_value(const WeightMatrix& w, const std::vector<std::size_t>& assignment);

}  // namespace mufor
