#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "tentmle/errors.hpp"
#include "tentmle/exp_kernel.hpp"

namespace tentmle::hfunc {

/// Gap below which the closed form is refused.
inline constexpr double kTauH = 0.05;
/// Term budget of the series.
inline constexpr int kMaxSeriesTerms = 500;

using Args = std::vector<double>;

enum class Branch { kClosed, kSeries, kDividedDifference };

inline const char* branch_name(Branch b) {
  switch (b) {
    case Branch::kClosed:
      return "closed";
    case Branch::kSeries:
      return "series";
    case Branch::kDividedDifference:
      return "divided-difference";
  }
  return "?";
}

inline void check_args(const Args& u) {
  if (u.empty()) throw DimensionMismatch("H needs at least one argument");
  for (double v : u) {
    if (!std::isfinite(v)) throw DimensionMismatch("H arguments must be finite");
  }
}

/// Smallest distance among {0, u_1, ..., u_d}.
inline double min_gap(const Args& u) {
  std::vector<double> v(u);
  v.push_back(0.0);
  std::sort(v.begin(), v.end());
  double gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < v.size(); ++i) gap = std::min(gap, v[i] - v[i - 1]);
  return gap;
}

/// h_r(u) via h_r(u_1..u_k) = h_r(u_1..u_{k-1}) + u_k h_{r-1}(u_1..u_k).
inline double complete_homogeneous(int r, const Args& u) {
  if (r < 0) return 0.0;
  std::vector<long double> h(static_cast<std::size_t>(r + 1), 0.0L);
  h[0] = 1.0L;
  for (double uk : u) {
    for (int s = 1; s <= r; ++s) h[static_cast<std::size_t>(s)] += static_cast<long double>(uk) * h[static_cast<std::size_t>(s - 1)];
  }
  return static_cast<double>(h[static_cast<std::size_t>(r)]);
}

/// The two-term closed form of H, in extended precision.
inline double h_closed(const Args& u) {
  check_args(u);
  if (min_gap(u) <= kTauH) {
    throw NearSingular("closed form of H needs arguments separated from each other and from 0 by more than 0.05");
  }
  const std::size_t d = u.size();
  long double prod = 1.0L;
  long double inv_sum = 1.0L;
  for (double v : u) {
    prod *= v;
    inv_sum += 1.0L / v;
  }
  long double value = ((d % 2 == 0) ? 1.0L : -1.0L) * inv_sum / prod;
  for (std::size_t j = 0; j < d; ++j) {
    const long double uj = u[j];
    long double denom = uj * uj;
    for (std::size_t k = 0; k < d; ++k) {
      if (k != j) denom *= uj - static_cast<long double>(u[k]);
    }
    value += std::exp(uj) / denom;
  }
  return static_cast<double>(value);
}

/// sum_r h_r(u)/(r+d+1)!, truncated once two consecutive terms fall below
/// rel_tol times the partial sum past the peak of the terms.
inline double h_series(const Args& u, double rel_tol = 1e-15) {
  check_args(u);
  const std::size_t d = u.size();
  double abs_sum = 0.0;
  for (double v : u) abs_sum += std::abs(v);
  const int r_min = static_cast<int>(std::ceil(2.0 * abs_sum));
  // prefix[k][r] = h_r(u_1..u_k), extended one degree per step.
  std::vector<std::vector<long double>> prefix(d + 1, std::vector<long double>(1, 1.0L));
  long double fact = 1.0L;
  for (std::size_t k = 2; k <= d + 1; ++k) fact *= static_cast<long double>(k);
  long double sum = 1.0L / fact;
  int small = 0;
  for (int r = 1; r <= kMaxSeriesTerms; ++r) {
    prefix[0].push_back(0.0L);
    for (std::size_t k = 1; k <= d; ++k) {
      prefix[k].push_back(prefix[k - 1][static_cast<std::size_t>(r)] +
                          static_cast<long double>(u[k - 1]) * prefix[k][static_cast<std::size_t>(r - 1)]);
    }
    fact *= static_cast<long double>(r + static_cast<int>(d) + 1);
    const long double term = prefix[d][static_cast<std::size_t>(r)] / fact;
    sum += term;
    if (r >= r_min && std::abs(term) <= rel_tol * std::abs(sum)) {
      if (++small >= 2) return static_cast<double>(sum);
    } else {
      small = 0;
    }
  }
  throw ConvergenceFailure("series for H did not converge within 500 terms");
}

/// Which evaluation h_eval uses for these arguments.
inline Branch h_eval_branch(const Args& u) {
  check_args(u);
  if (min_gap(u) > kTauH) return Branch::kClosed;
  double lo = 0.0, hi = 0.0;
  for (double v : u) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return hi - lo <= quadrature::kSeriesSpread ? Branch::kSeries : Branch::kDividedDifference;
}

/// H(u) = exp[0, 0, u_1, ..., u_d] as a divided difference of exp.
inline double h_divided_difference(const Args& u) {
  std::vector<double> nodes{0.0, 0.0};
  nodes.insert(nodes.end(), u.begin(), u.end());
  return quadrature::stable_exp_divided_difference(nodes);
}

/// log H(u); finite for arguments where H itself overflows.
inline double h_log(const Args& u) {
  check_args(u);
  std::vector<double> nodes{0.0, 0.0};
  nodes.insert(nodes.end(), u.begin(), u.end());
  return quadrature::log_exp_divided_difference(nodes);
}

/// Stable evaluation of H: closed form on well-separated arguments, otherwise
/// the series (clustered near zero) or the divided-difference kernel.
inline double h_eval(const Args& u) {
  switch (h_eval_branch(u)) {
    case Branch::kClosed: {
      double hi = 0.0;
      for (double v : u) hi = std::max(hi, v);
      // Extended-precision exp overflows far above double range; past 700 the
      // kernel keeps the result finite whenever H itself is.
      if (hi > 700.0) return h_divided_difference(u);
      return h_closed(u);
    }
    case Branch::kSeries:
      return h_series(u, 1e-15);
    case Branch::kDividedDifference:
      return h_divided_difference(u);
  }
  return 0.0;
}

/// dH/du_i = exp[0, 0, u_1, ..., u_d, u_i].
inline double h_partial(const Args& u, std::size_t i) {
  check_args(u);
  if (i >= u.size()) throw DimensionMismatch("partial derivative index out of range");
  std::vector<double> nodes{0.0, 0.0};
  nodes.insert(nodes.end(), u.begin(), u.end());
  nodes.push_back(u[i]);
  return quadrature::stable_exp_divided_difference(nodes);
}

/// Gauss-Legendre rule on [0, 1] from the Golub-Welsch eigenproblem.
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

inline GaussRule gauss_legendre_unit(int num_nodes) {
  if (num_nodes < 1) throw DimensionMismatch("quadrature needs at least one node");
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(num_nodes, num_nodes);
  for (int k = 1; k < num_nodes; ++k) {
    const double b = k / std::sqrt(4.0 * k * k - 1.0);
    jacobi(k, k - 1) = b;
    jacobi(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jacobi);
  GaussRule rule;
  for (int k = 0; k < num_nodes; ++k) {
    const double v0 = eig.eigenvectors()(0, k);
    rule.nodes.push_back(0.5 * (eig.eigenvalues()(k) + 1.0));
    rule.weights.push_back(v0 * v0);  // 2 v0^2 on [-1,1], halved on [0,1]
  }
  return rule;
}

/// Integral of (1 - sum t) exp(u·t) over the standard simplex, by a product
/// Gauss-Legendre rule in collapsed coordinates. An independent oracle for H.
inline double h_quadrature(const Args& u, int num_nodes = 32) {
  check_args(u);
  const int d = static_cast<int>(u.size());
  if (d > 4) throw DimensionMismatch("quadrature oracle supports d <= 4");
  const GaussRule rule = gauss_legendre_unit(num_nodes);
  // t_k = s_k * remaining; dt = prod remaining_k ds over the unit cube.
  std::function<double(int, double, double)> integrate = [&](int k, double remaining, double exponent) -> double {
    if (k == d) return remaining * std::exp(exponent);
    double acc = 0.0;
    for (int q = 0; q < num_nodes; ++q) {
      const double tk = rule.nodes[static_cast<std::size_t>(q)] * remaining;
      acc += rule.weights[static_cast<std::size_t>(q)] * remaining *
             integrate(k + 1, remaining - tk, exponent + u[static_cast<std::size_t>(k)] * tk);
    }
    return acc;
  };
  return integrate(0, 1.0, 0.0);
}

}  // namespace tentmle::hfunc
