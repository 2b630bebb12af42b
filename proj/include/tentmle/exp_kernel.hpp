#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "tentmle/errors.hpp"

namespace tentmle::quadrature {

/// Node groups whose spread is at most this always use the Taylor series.
inline constexpr double kSeriesSpread = 1.0;

/// The recurrence step on L+1 nodes loses about log10(L / spread) digits, so
/// longer groups keep the series up to a wider spread.
inline double series_spread_limit(std::size_t order) {
  return std::min(4.0, kSeriesSpread + 0.5 * static_cast<double>(order));
}

namespace detail {

/// exp[z_0..z_L] for sorted z with z_L - z_0 <= kSeriesSpread, as
/// e^{z_0} sum_r h_r(z - z_0)/(r+L)!. All shifted nodes are nonnegative, so
/// the sum has no cancellation.
inline double exp_dd_series(const double* z, std::size_t count) {
  const std::size_t order = count - 1;
  constexpr int kMaxTerms = 80;
  // h[r] holds h_r of the shifted nodes processed so far.
  double h[kMaxTerms + 1];
  h[0] = 1.0;
  for (int r = 1; r <= kMaxTerms; ++r) h[r] = 0.0;
  for (std::size_t k = 1; k < count; ++k) {
    const double w = z[k] - z[0];
    for (int r = 1; r <= kMaxTerms; ++r) h[r] += w * h[r - 1];
  }
  double fact = 1.0;  // (r+L)!
  for (std::size_t k = 2; k <= order; ++k) fact *= static_cast<double>(k);
  double sum = 0.0;
  for (int r = 0; r <= kMaxTerms; ++r) {
    if (r > 0) fact *= static_cast<double>(r + static_cast<int>(order));
    const double term = h[r] / fact;
    sum += term;
    if (term <= 1e-17 * sum) break;
  }
  return std::exp(z[0]) * sum;
}

/// Divided difference of exp for sorted nodes with max node 0 (no overflow).
inline double exp_dd_sorted(const std::vector<double>& z) {
  const std::size_t m = z.size();
  if (m == 1) return std::exp(z[0]);
  // table[i][len]: divided difference on z[i..i+len].
  std::vector<double> prev(m), cur(m);
  for (std::size_t i = 0; i < m; ++i) prev[i] = std::exp(z[i]);
  for (std::size_t len = 1; len < m; ++len) {
    for (std::size_t i = 0; i + len < m; ++i) {
      const double spread = z[i + len] - z[i];
      if (spread <= series_spread_limit(len)) {
        cur[i] = exp_dd_series(&z[i], len + 1);
      } else {
        cur[i] = (prev[i + 1] - prev[i]) / spread;
      }
    }
    std::swap(prev, cur);
  }
  return prev[0];
}

}  // namespace detail

/// Shift applied before evaluating the kernel: the largest node.
struct ShiftedDividedDifference {
  double shift = 0.0;   // max node
  double scaled = 0.0;  // exp[y - shift], in (0, 1]
  double value() const { return std::exp(shift) * scaled; }
  double log_value() const { return shift + std::log(scaled); }
};

/// exp[y_0, ..., y_L] with the largest node factored out.
inline ShiftedDividedDifference exp_divided_difference_scaled(std::vector<double> values) {
  if (values.empty()) throw DimensionMismatch("divided difference needs at least one node");
  for (double v : values) {
    if (!std::isfinite(v)) throw DimensionMismatch("divided difference nodes must be finite");
  }
  std::sort(values.begin(), values.end());
  const double shift = values.back();
  for (double& v : values) v -= shift;
  return {shift, detail::exp_dd_sorted(values)};
}

/// Divided difference exp[y_0, ..., y_L] = sum_i e^{y_i} / prod_{j != i}(y_i - y_j),
/// extended continuously to repeated nodes. Always positive.
inline double stable_exp_divided_difference(const std::vector<double>& values) {
  return exp_divided_difference_scaled(values).value();
}

/// log exp[y_0, ..., y_L]; finite even when the value itself overflows.
inline double log_exp_divided_difference(const std::vector<double>& values) {
  return exp_divided_difference_scaled(values).log_value();
}

/// The Lagrange sum evaluated literally. Requires distinct nodes; loses
/// accuracy when nodes cluster. Kept for cross-checks.
inline double exp_divided_difference_direct(const std::vector<double>& values) {
  double sum = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    double denom = 1.0;
    for (std::size_t j = 0; j < values.size(); ++j) {
      if (j != i) denom *= values[i] - values[j];
    }
    if (denom == 0.0) throw NearSingular("direct divided difference needs distinct nodes");
    sum += std::exp(values[i]) / denom;
  }
  return sum;
}

}  // namespace tentmle::quadrature
