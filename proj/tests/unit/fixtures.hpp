#pragma once

#include <Eigen/Dense>

#include <random>
#include <vector>

#include "tentmle/geometry.hpp"

namespace fixtures {

using tentmle::PointConfiguration;

inline PointConfiguration square() { return PointConfiguration::from_rows({{0, 0}, {1, 0}, {1, 1}, {0, 1}}); }

inline PointConfiguration hexagon() {
  return PointConfiguration::from_rows({{0, 0}, {1, 0}, {2, 1}, {2, 2}, {1, 2}, {0, 1}});
}

inline PointConfiguration octahedron() {
  return PointConfiguration::from_rows({{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}});
}

inline PointConfiguration six_points() {
  return PointConfiguration::from_rows({{0, 0}, {100, 0}, {0, 100}, {22, 37}, {43, 22}, {36, 41}});
}

inline PointConfiguration five_points() {
  return PointConfiguration::from_rows({{0, 0}, {40, 0}, {20, 40}, {17, 10}, {21, 15}});
}

/// n standard normal points in R^d (resampled until they span).
inline PointConfiguration random_config(std::mt19937_64& gen, int n, int d) {
  std::normal_distribution<double> normal;
  for (;;) {
    Eigen::MatrixXd m(n, d);
    for (int i = 0; i < n; ++i) {
      for (int k = 0; k < d; ++k) m(i, k) = normal(gen);
    }
    try {
      return PointConfiguration(m);
    } catch (const tentmle::InvalidConfiguration&) {
    }
  }
}

inline Eigen::VectorXd random_heights(std::mt19937_64& gen, int n, double scale = 1.0) {
  std::normal_distribution<double> normal;
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) y(i) = scale * normal(gen);
  return y;
}

inline Eigen::VectorXd random_weights(std::mt19937_64& gen, int n) {
  std::exponential_distribution<double> e;
  Eigen::VectorXd w(n);
  for (int i = 0; i < n; ++i) w(i) = e(gen) + 0.05;
  return w / w.sum();
}

/// Uniform point of the bounding box of a configuration.
inline Eigen::RowVectorXd box_sample(std::mt19937_64& gen, const PointConfiguration& c, double& box_volume) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const Eigen::RowVectorXd lo = c.points().colwise().minCoeff();
  const Eigen::RowVectorXd hi = c.points().colwise().maxCoeff();
  box_volume = (hi - lo).prod();
  Eigen::RowVectorXd t(c.dimension());
  for (int k = 0; k < c.dimension(); ++k) t(k) = lo(k) + (hi(k) - lo(k)) * u(gen);
  return t;
}

}  // namespace fixtures
