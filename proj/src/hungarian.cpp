#include "mufor/hungarian.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mufor/error.h"

namespace mufor {
namespace {

struct Scratch {
  std::vector<double> u, v, minv;
  std::vector<std::size_t> match, way, cols;
  std::vector<char> used;
};

// Split nodes solve many tiny problems; reusing buffers per thread avoids
// most allocations.
Scratch& scratch() {
  thread_local Scratch s;
  return s;
}

// Minimum-cost assignment for an n x m cost matrix, n <= m, given through an
// accessor. Classic O(n^2 m) shortest augmenting path with potentials.
template <typename Cost>
std::vector<std::size_t> solve_min_cost(std::size_t n, std::size_t m, Cost cost) {
  const double inf = std::numeric_limits<double>::infinity();
  Scratch& s = scratch();
  auto& u = s.u;
  auto& v = s.v;
  auto& match = s.match;
  auto& way = s.way;
  auto& minv = s.minv;
  auto& used = s.used;
  u.assign(n + 1, 0.0);
  v.assign(m + 1, 0.0);
  match.assign(m + 1, 0);
  way.assign(m + 1, 0);
  minv.resize(m + 1);
  used.resize(m + 1);
  for (std::size_t i = 1; i <= n; ++i) {
    match[0] = i;
    std::size_t j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = match[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= m; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<std::size_t> row_to_col(n, 0);
  for (std::size_t j = 1; j <= m; ++j) {
    if (match[j] != 0) row_to_col[match[j] - 1] = j - 1;
  }
  return row_to_col;
}

// Optimum over rows [first_row, rows) and the columns flagged free. The
// optimal columns are written to completion[first_row..].
double sub_optimum(const WeightMatrix& w, std::size_t first_row, const std::vector<char>& free_col,
                   std::vector<std::size_t>& completion) {
  const std::size_t n = w.rows - first_row;
  if (n == 0) return 0.0;
  std::vector<std::size_t> cols;
  for (std::size_t c = 0; c < w.cols; ++c) {
    if (free_col[c]) cols.push_back(c);
  }
  auto sol = solve_min_cost(n, cols.size(), [&](std::size_t r, std::size_t c) {
    return -w(first_row + r, cols[c]);
  });
  double total = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    completion[first_row + r] = cols[sol[r]];
    total += w(first_row + r, cols[sol[r]]);
  }
  return total;
}

}  // namespace

double assignment_value(const WeightMatrix& w, const std::vector<std::size_t>& assignment) {
  double total = 0.0;
  for (std::size_t r = 0; r < assignment.size(); ++r) total += w(r, assignment[r]);
  return total;
}

double max_weight_assignment_value(const WeightMatrix& w) {
  if (w.rows > w.cols) fail(ErrorKind::kInvalidArgument, "assignment needs rows <= cols");
  auto sol = solve_min_cost(w.rows, w.cols, [&](std::size_t r, std::size_t c) { return -w(r, c); });
  return assignment_value(w, sol);
}

std::vector<std::size_t> max_weight_assignment(const WeightMatrix& w) {
  if (w.rows > w.cols) fail(ErrorKind::kInvalidArgument, "assignment needs rows <= cols");
  if (w.rows == 0) return {};
  std::vector<std::size_t> current =
      solve_min_cost(w.rows, w.cols, [&](std::size_t r, std::size_t c) { return -w(r, c); });
  const double best = assignment_value(w, current);
  const double tol = 1e-11 * std::max(1.0, std::abs(best));

  // Greedy lexicographic refinement: fix each row to the smallest column that
  // still admits an optimal completion. `current` always holds an optimal
  // assignment agreeing with the rows fixed so far, so only columns left of
  // its choice need checking.
  std::vector<char> free_col(w.cols, 1);
  std::vector<std::size_t> trial(w.rows);
  double fixed = 0.0;
  for (std::size_t r = 0; r < w.rows; ++r) {
    for (std::size_t c = 0; c < current[r]; ++c) {
      if (!free_col[c]) continue;
      free_col[c] = 0;
      // Upper bound of the remaining rows: each takes its best free column.
      double bound = fixed + w(r, c);
      for (std::size_t rr = r + 1; rr < w.rows; ++rr) {
        double mx = -std::numeric_limits<double>::infinity();
        for (std::size_t cc = 0; cc < w.cols; ++cc) {
          if (free_col[cc]) mx = std::max(mx, w(rr, cc));
        }
        bound += mx;
      }
      if (bound >= best - tol && fixed + w(r, c) + sub_optimum(w, r + 1, free_col, trial) >= best - tol) {
        current[r] = c;
        for (std::size_t rr = r + 1; rr < w.rows; ++rr) current[rr] = trial[rr];
        free_col[c] = 1;
        break;
      }
      free_col[c] = 1;
    }
    free_col[current[r]] = 0;
    fixed += w(r, current[r]);
  }
  return current;
}

}  // namespace mufor
