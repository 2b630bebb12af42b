#pragma once

#include <Eigen/Dense>

#include <limits>
#include <vector>

namespace tentmle {

struct NnlsResult {
  Eigen::VectorXd x;
  Eigen::VectorXd residual;  // b - A x
  int iterations = 0;
};

/// Lawson-Hanson active-set solver for min ||A x - b|| subject to x >= 0.
inline NnlsResult nnls(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, int max_iter = 0) {
  const Eigen::Index m = a.cols();
  if (max_iter <= 0) max_iter = static_cast<int>(3 * m + 30);
  NnlsResult out;
  out.x = Eigen::VectorXd::Zero(m);
  std::vector<bool> passive(static_cast<std::size_t>(m), false);
  const double tol = 1e-13 * std::max(1.0, a.cwiseAbs().maxCoeff()) * std::max(1.0, b.cwiseAbs().maxCoeff());

  auto solve_passive = [&](Eigen::VectorXd& z) {
    std::vector<Eigen::Index> idx;
    for (Eigen::Index j = 0; j < m; ++j) {
      if (passive[static_cast<std::size_t>(j)]) idx.push_back(j);
    }
    z = Eigen::VectorXd::Zero(m);
    if (idx.empty()) return;
    Eigen::MatrixXd sub(a.rows(), static_cast<Eigen::Index>(idx.size()));
    for (std::size_t k = 0; k < idx.size(); ++k) sub.col(static_cast<Eigen::Index>(k)) = a.col(idx[k]);
    const Eigen::VectorXd s = sub.completeOrthogonalDecomposition().solve(b);
    for (std::size_t k = 0; k < idx.size(); ++k) z(idx[k]) = s(static_cast<Eigen::Index>(k));
  };

  Eigen::VectorXd w = a.transpose() * (b - a * out.x);
  while (out.iterations < max_iter) {
    Eigen::Index best = -1;
    double best_w = tol;
    for (Eigen::Index j = 0; j < m; ++j) {
      if (!passive[static_cast<std::size_t>(j)] && w(j) > best_w) {
        best_w = w(j);
        best = j;
      }
    }
    if (best < 0) break;
    passive[static_cast<std::size_t>(best)] = true;
    Eigen::VectorXd z;
    for (;;) {
      ++out.iterations;
      solve_passive(z);
      bool feasible = true;
      for (Eigen::Index j = 0; j < m; ++j) {
        if (passive[static_cast<std::size_t>(j)] && z(j) <= 0.0) feasible = false;
      }
      if (feasible || out.iterations >= max_iter) break;
      double alpha = std::numeric_limits<double>::infinity();
      for (Eigen::Index j = 0; j < m; ++j) {
        if (passive[static_cast<std::size_t>(j)] && z(j) <= 0.0) alpha = std::min(alpha, out.x(j) / (out.x(j) - z(j)));
      }
      out.x += alpha * (z - out.x);
      for (Eigen::Index j = 0; j < m; ++j) {
        if (passive[static_cast<std::size_t>(j)] && out.x(j) <= 1e-15) {
          passive[static_cast<std::size_t>(j)] = false;
          out.x(j) = 0.0;
        }
      }
    }
    out.x = z.cwiseMax(0.0);
    w = a.transpose() * (b - a * out.x);
  }
  out.residual = b - a * out.x;
  return out;
}

}  // namespace tentmle
