#include "mufor/stats.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mufor/error.h"
#include "mufor/metrics.h"

namespace mufor {

double normal_upper_tail(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

WilcoxonResult wilcoxon_signed_rank(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) fail(ErrorKind::kInvalidArgument, "paired samples differ in length");
  std::vector<double> diff;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - y[i];
    if (d != 0.0) diff.push_back(d);
  }
  WilcoxonResult out;
  const std::size_t m = diff.size();
  out.n_nonzero = m;
  if (m == 0) return out;

  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return std::abs(diff[a]) < std::abs(diff[b]); });
  // Doubled midranks are integers, which keeps the exact distribution on an
  // integer grid.
  std::vector<std::size_t> rank2(m);
  double tie_term = 0.0;
  for (std::size_t i = 0; i < m;) {
    std::size_t j = i;
    while (j < m && std::abs(diff[order[j]]) == std::abs(diff[order[i]])) ++j;
    for (std::size_t k = i; k < j; ++k) rank2[order[k]] = i + 1 + j;
    const double t = static_cast<double>(j - i);
    tie_term += t * t * t - t;
    i = j;
  }
  std::size_t v2 = 0;
  for (std::size_t i = 0; i < m; ++i) {
    if (diff[i] > 0) v2 += rank2[i];
  }
  out.statistic = static_cast<double>(v2) / 2.0;

  const double md = static_cast<double>(m);
  const double mean = md * (md + 1.0) / 4.0;
  const double var = md * (md + 1.0) * (2.0 * md + 1.0) / 24.0 - tie_term / 48.0;
  const double sd = std::sqrt(var);
  out.z = sd > 0 ? (out.statistic - mean) / sd : 0.0;
  out.effect_size = std::abs(out.z) / std::sqrt(md);

  if (m <= 25) {
    out.exact = true;
    std::size_t total = 0;
    for (std::size_t r : rank2) total += r;
    // count[s]: number of sign patterns whose positive doubled ranks sum to s.
    std::vector<double> count(total + 1, 0.0);
    count[0] = 1.0;
    std::size_t reach = 0;
    for (std::size_t r : rank2) {
      for (std::size_t s = reach + 1; s-- > 0;) {
        if (count[s] != 0.0) count[s + r] += count[s];
      }
      reach += r;
    }
    const double patterns = std::ldexp(1.0, static_cast<int>(m));
    double lower = 0.0;
    double upper = 0.0;
    for (std::size_t s = 0; s <= total; ++s) {
      if (s <= v2) lower += count[s];
      if (s >= v2) upper += count[s];
    }
    out.p_value = std::min(1.0, 2.0 * std::min(lower, upper) / patterns);
  } else {
    const double delta = out.statistic - mean;
    const double cc = delta > 0 ? 0.5 : (delta < 0 ? -0.5 : 0.0);
    const double z = sd > 0 ? (delta - cc) / sd : 0.0;
    out.p_value = std::min(1.0, 2.0 * normal_upper_tail(std::abs(z)));
  }
  return out;
}

std::vector<double> holm_adjust(std::span<const double> p_values) {
  const std::size_t m = p_values.size();
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return p_values[a] < p_values[b]; });
  std::vector<double> out(m);
  double running = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double adj = std::min(1.0, static_cast<double>(m - i) * p_values[order[i]]);
    running = std::max(running, adj);
    out[order[i]] = running;
  }
  return out;
}

std::vector<PairedComparison> paired_wilcoxon_holm(std::span<const double> matrix, std::size_t n_datasets,
                                                   std::size_t n_methods, std::size_t baseline) {
  if (matrix.size() != n_datasets * n_methods) fail(ErrorKind::kInvalidArgument, "metric matrix size mismatch");
  if (n_datasets < 6) fail(ErrorKind::kInvalidArgument, "paired tests need at least 6 datasets");
  if (baseline >= n_methods) fail(ErrorKind::kInvalidArgument, "baseline column out of range");
  std::vector<double> base(n_datasets);
  for (std::size_t d = 0; d < n_datasets; ++d) base[d] = matrix[d * n_methods + baseline];
  std::vector<PairedComparison> out;
  std::vector<double> raw;
  for (std::size_t k = 0; k < n_methods; ++k) {
    if (k == baseline) continue;
    std::vector<double> col(n_datasets);
    std::vector<double> diff(n_datasets);
    for (std::size_t d = 0; d < n_datasets; ++d) {
      col[d] = matrix[d * n_methods + k];
      diff[d] = col[d] - base[d];
    }
    PairedComparison pc;
    pc.method = k;
    pc.test = wilcoxon_signed_rank(col, base);
    pc.median_difference = quantile(diff, 0.5);
    raw.push_back(pc.test.p_value);
    out.push_back(pc);
  }
  std::vector<double> adj = holm_adjust(raw);
  for (std::size_t i = 0; i < out.size(); ++i) out[i].adjusted_p = adj[i];
  return out;
}

}  // namespace mufor
