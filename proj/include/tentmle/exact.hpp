#pragma once

// Exact rational arithmetic used for combinatorial decisions: orientation
// signs, barycentric coordinates and linear feasibility. Every double is
// converted to the rational number it represents, so no decision here is
// subject to rounding.

#include <gmpxx.h>

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace tentmle::exact {

using Rational = mpq_class;
using RationalMatrix = std::vector<std::vector<Rational>>;

/// The rational number whose value is exactly `value` (finite doubles only).
inline Rational to_rational(double value) {
  Rational q;
  mpq_set_d(q.get_mpq_t(), value);
  return q;
}

inline double to_double(const Rational& value) { return value.get_d(); }

inline int sign(const Rational& value) { return sgn(value); }

/// Determinant by fraction-free elimination on a copy of the square matrix.
inline Rational determinant(RationalMatrix m) {
  const std::size_t n = m.size();
  Rational det = 1;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    while (pivot < n && m[pivot][col] == 0) ++pivot;
    if (pivot == n) return 0;
    if (pivot != col) {
      std::swap(m[pivot], m[col]);
      det = -det;
    }
    det *= m[col][col];
    for (std::size_t r = col + 1; r < n; ++r) {
      if (m[r][col] == 0) continue;
      Rational factor = m[r][col] / m[col][col];
      for (std::size_t c = col; c < n; ++c) m[r][c] -= factor * m[col][c];
    }
  }
  return det;
}

/// Solves the square system a·x = b; empty optional when a is singular.
inline std::optional<std::vector<Rational>> solve(RationalMatrix a, std::vector<Rational> b) {
  const std::size_t n = a.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    while (pivot < n && a[pivot][col] == 0) ++pivot;
    if (pivot == n) return std::nullopt;
    std::swap(a[pivot], a[col]);
    std::swap(b[pivot], b[col]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col || a[r][col] == 0) continue;
      Rational factor = a[r][col] / a[col][col];
      for (std::size_t c = col; c < n; ++c) a[r][c] -= factor * a[col][c];
      b[r] -= factor * b[col];
    }
  }
  std::vector<Rational> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = b[i] / a[i][i];
  return x;
}

/// Rank of a (not necessarily square) matrix.
inline int rank(RationalMatrix m) {
  if (m.empty()) return 0;
  const std::size_t rows = m.size();
  const std::size_t cols = m[0].size();
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    std::size_t pivot = r;
    while (pivot < rows && m[pivot][c] == 0) ++pivot;
    if (pivot == rows) continue;
    std::swap(m[pivot], m[r]);
    for (std::size_t i = r + 1; i < rows; ++i) {
      if (m[i][c] == 0) continue;
      Rational factor = m[i][c] / m[r][c];
      for (std::size_t k = c; k < cols; ++k) m[i][k] -= factor * m[r][k];
    }
    ++r;
  }
  return static_cast<int>(r);
}

enum class Relation { kLessEqual, kGreaterEqual, kEqual };
enum class LpStatus { kOptimal, kInfeasible, kUnbounded };

struct LpSolution {
  LpStatus status = LpStatus::kInfeasible;
  std::vector<Rational> x;
  Rational objective;
};

/// Dense two-phase primal simplex over the rationals with Bland's rule.
///
/// Maximizes c·x subject to rows `a·x (<=|>=|=) b`. Variables are free unless
/// marked nonnegative. Intended for the small systems that arise from fold
/// inequalities and simplex intersection tests (tens of rows and columns).
class LinearProgram {
 public:
  explicit LinearProgram(int num_vars, bool nonnegative = false)
      : num_vars_(num_vars), nonnegative_(static_cast<std::size_t>(num_vars), nonnegative),
        objective_(static_cast<std::size_t>(num_vars), Rational(0)) {}

  int num_vars() const { return num_vars_; }

  void set_nonnegative(int var, bool value = true) { nonnegative_.at(static_cast<std::size_t>(var)) = value; }

  void add_constraint(std::vector<Rational> coeffs, Relation relation, Rational rhs) {
    if (coeffs.size() != static_cast<std::size_t>(num_vars_)) {
      throw std::invalid_argument("LinearProgram: coefficient row has wrong length");
    }
    rows_.push_back({std::move(coeffs), relation, std::move(rhs)});
  }

  void set_objective(std::vector<Rational> c) {
    if (c.size() != static_cast<std::size_t>(num_vars_)) {
      throw std::invalid_argument("LinearProgram: objective has wrong length");
    }
    objective_ = std::move(c);
  }

  LpSolution solve() const;

 private:
  struct Row {
    std::vector<Rational> coeffs;
    Relation relation;
    Rational rhs;
  };

  int num_vars_;
  std::vector<bool> nonnegative_;
  std::vector<Rational> objective_;
  std::vector<Row> rows_;
};

namespace detail {

class Tableau {
 public:
  // rows x (cols + 1); the last column is the right-hand side.
  Tableau(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), t_(rows, std::vector<Rational>(cols + 1)), basis_(rows, 0) {}

  Rational& at(std::size_t r, std::size_t c) { return t_[r][c]; }
  const Rational& at(std::size_t r, std::size_t c) const { return t_[r][c]; }
  Rational& rhs(std::size_t r) { return t_[r][cols_]; }
  const Rational& rhs(std::size_t r) const { return t_[r][cols_]; }
  std::size_t& basis(std::size_t r) { return basis_[r]; }
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  void pivot(std::size_t pr, std::size_t pc) {
    Rational inv = 1 / t_[pr][pc];
    for (auto& v : t_[pr]) v *= inv;
    for (std::size_t r = 0; r < rows_; ++r) {
      if (r == pr || t_[r][pc] == 0) continue;
      Rational factor = t_[r][pc];
      for (std::size_t c = 0; c <= cols_; ++c) {
        if (t_[pr][c] != 0) t_[r][c] -= factor * t_[pr][c];
      }
    }
    basis_[pr] = pc;
  }

  void remove_row(std::size_t r) {
    t_.erase(t_.begin() + static_cast<std::ptrdiff_t>(r));
    basis_.erase(basis_.begin() + static_cast<std::ptrdiff_t>(r));
    --rows_;
  }

  // Maximizes cost·x over columns allowed by `allowed`. Returns false when unbounded.
  bool maximize(const std::vector<Rational>& cost, const std::vector<bool>& allowed) {
    for (;;) {
      // Reduced profits r_j = c_j - sum_i c_B(i) t_ij; Bland: lowest eligible index enters.
      std::size_t entering = cols_;
      for (std::size_t c = 0; c < cols_ && entering == cols_; ++c) {
        if (!allowed[c]) continue;
        Rational reduced = cost[c];
        for (std::size_t r = 0; r < rows_; ++r) {
          if (t_[r][c] != 0) reduced -= cost[basis_[r]] * t_[r][c];
        }
        if (reduced > 0) entering = c;
      }
      if (entering == cols_) return true;
      std::size_t leaving = rows_;
      Rational best_ratio;
      for (std::size_t r = 0; r < rows_; ++r) {
        if (t_[r][entering] <= 0) continue;
        Rational ratio = t_[r][cols_] / t_[r][entering];
        if (leaving == rows_ || ratio < best_ratio ||
            (ratio == best_ratio && basis_[r] < basis_[leaving])) {
          leaving = r;
          best_ratio = ratio;
        }
      }
      if (leaving == rows_) return false;
      pivot(leaving, entering);
    }
  }

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<std::vector<Rational>> t_;
  std::vector<std::size_t> basis_;
};

}  // namespace detail

inline LpSolution LinearProgram::solve() const {
  // Column layout: structural columns (free variables split in two), then one
  // slack per inequality row, then one artificial per row.
  std::vector<std::size_t> pos_col(static_cast<std::size_t>(num_vars_));
  std::vector<std::ptrdiff_t> neg_col(static_cast<std::size_t>(num_vars_), -1);
  std::size_t cols = 0;
  for (std::size_t j = 0; j < static_cast<std::size_t>(num_vars_); ++j) {
    pos_col[j] = cols++;
    if (!nonnegative_[j]) neg_col[j] = static_cast<std::ptrdiff_t>(cols++);
  }
  const std::size_t structural = cols;
  std::vector<std::ptrdiff_t> slack_col(rows_.size(), -1);
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    if (rows_[i].relation != Relation::kEqual) slack_col[i] = static_cast<std::ptrdiff_t>(cols++);
  }
  const std::size_t first_artificial = cols;
  cols += rows_.size();

  detail::Tableau tab(rows_.size(), cols);
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    const Row& row = rows_[i];
    const bool flip = row.rhs < 0;
    auto put = [&](std::size_t c, const Rational& v) { tab.at(i, c) = flip ? Rational(-v) : v; };
    for (std::size_t j = 0; j < static_cast<std::size_t>(num_vars_); ++j) {
      if (row.coeffs[j] == 0) continue;
      put(pos_col[j], row.coeffs[j]);
      if (neg_col[j] >= 0) put(static_cast<std::size_t>(neg_col[j]), -row.coeffs[j]);
    }
    if (slack_col[i] >= 0) {
      put(static_cast<std::size_t>(slack_col[i]), row.relation == Relation::kLessEqual ? Rational(1) : Rational(-1));
    }
    tab.rhs(i) = flip ? Rational(-row.rhs) : row.rhs;
    tab.at(i, first_artificial + i) = 1;
    tab.basis(i) = first_artificial + i;
  }

  // Phase I: maximize minus the sum of artificials.
  std::vector<Rational> phase1(cols, Rational(0));
  for (std::size_t c = first_artificial; c < cols; ++c) phase1[c] = -1;
  std::vector<bool> allowed(cols, true);
  tab.maximize(phase1, allowed);
  Rational infeasibility = 0;
  for (std::size_t r = 0; r < tab.rows(); ++r) {
    if (tab.basis(r) >= first_artificial) infeasibility += tab.rhs(r);
  }
  LpSolution out;
  if (infeasibility != 0) {
    out.status = LpStatus::kInfeasible;
    return out;
  }
  // Drive zero-valued artificials out of the basis; drop redundant rows.
  for (std::size_t r = 0; r < tab.rows();) {
    if (tab.basis(r) < first_artificial) {
      ++r;
      continue;
    }
    std::size_t replacement = first_artificial;
    for (std::size_t c = 0; c < first_artificial; ++c) {
      if (tab.at(r, c) != 0) {
        replacement = c;
        break;
      }
    }
    if (replacement == first_artificial) {
      tab.remove_row(r);
    } else {
      tab.pivot(r, replacement);
      ++r;
    }
  }

  // Phase II.
  std::vector<Rational> phase2(cols, Rational(0));
  for (std::size_t j = 0; j < static_cast<std::size_t>(num_vars_); ++j) {
    phase2[pos_col[j]] = objective_[j];
    if (neg_col[j] >= 0) phase2[static_cast<std::size_t>(neg_col[j])] = -objective_[j];
  }
  for (std::size_t c = first_artificial; c < cols; ++c) allowed[c] = false;
  if (!tab.maximize(phase2, allowed)) {
    out.status = LpStatus::kUnbounded;
    return out;
  }
  std::vector<Rational> column_value(structural, Rational(0));
  for (std::size_t r = 0; r < tab.rows(); ++r) {
    if (tab.basis(r) < structural) column_value[tab.basis(r)] = tab.rhs(r);
  }
  out.status = LpStatus::kOptimal;
  out.x.assign(static_cast<std::size_t>(num_vars_), Rational(0));
  out.objective = 0;
  for (std::size_t j = 0; j < static_cast<std::size_t>(num_vars_); ++j) {
    out.x[j] = column_value[pos_col[j]];
    if (neg_col[j] >= 0) out.x[j] -= column_value[static_cast<std::size_t>(neg_col[j])];
    out.objective += objective_[j] * out.x[j];
  }
  return out;
}

}  // namespace tentmle::exact
