#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "tentmle/errors.hpp"
#include "tentmle/geometry.hpp"

namespace tentmle::svg {

namespace detail {

struct Frame {
  double x0, y0, scale, size, pad;
  double x(double v) const { return pad + (v - x0) * scale; }
  double y(double v) const { return pad + size - (v - y0) * scale; }
};

inline Frame frame_for(const Eigen::MatrixXd& pts, double size = 400.0, double pad = 20.0) {
  const double x0 = pts.col(0).minCoeff(), x1 = pts.col(0).maxCoeff();
  const double y0 = pts.cols() > 1 ? pts.col(1).minCoeff() : 0.0;
  const double y1 = pts.cols() > 1 ? pts.col(1).maxCoeff() : 1.0;
  const double extent = std::max({x1 - x0, y1 - y0, 1e-300});
  return Frame{x0, y0, size / extent, size, pad};
}

/// Cell vertices in counterclockwise order around the centroid.
inline std::vector<Index> polygon_order(const PointConfiguration& config, const Cell& cell) {
  Eigen::RowVector2d mid = Eigen::RowVector2d::Zero();
  for (Index v : cell) mid += config.point(v);
  mid /= static_cast<double>(cell.size());
  std::vector<Index> order(cell.begin(), cell.end());
  std::sort(order.begin(), order.end(), [&](Index a, Index b) {
    const auto pa = config.point(a) - mid, pb = config.point(b) - mid;
    return std::atan2(pa(1), pa(0)) < std::atan2(pb(1), pb(0));
  });
  return order;
}

}  // namespace detail

/// Planar figure: one shaded polygon per cell (opacity proportional to the mean
/// density at its vertices) and the sample points.
inline std::string subdivision_figure(const PointConfiguration& config, const Subdivision& subdivision,
                                      const Eigen::VectorXd& heights) {
  if (config.dimension() == 1) {
    // Profile of the log-density over the sorted sample.
    std::vector<Index> order(static_cast<std::size_t>(config.size()));
    for (Index i = 0; i < config.size(); ++i) order[static_cast<std::size_t>(i)] = i;
    std::sort(order.begin(), order.end(), [&](Index a, Index b) { return config.points()(a, 0) < config.points()(b, 0); });
    Eigen::MatrixXd prof(config.size(), 2);
    for (std::size_t k = 0; k < order.size(); ++k) {
      prof(static_cast<Eigen::Index>(k), 0) = config.points()(order[k], 0);
      prof(static_cast<Eigen::Index>(k), 1) = heights(order[k]);
    }
    const auto f = detail::frame_for(prof);
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << f.size + 2 * f.pad << "\" height=\"" << f.size + 2 * f.pad
       << "\">\n<polyline class=\"profile\" fill=\"none\" stroke=\"black\" points=\"";
    for (Eigen::Index k = 0; k < prof.rows(); ++k) os << (k ? " " : "") << f.x(prof(k, 0)) << ',' << f.y(prof(k, 1));
    os << "\"/>\n</svg>\n";
    return os.str();
  }
  if (config.dimension() != 2) throw DimensionMismatch("figures are drawn for d = 1 and d = 2 only");
  const auto f = detail::frame_for(config.points());
  std::vector<double> density;
  for (const auto& cell : subdivision.cells()) {
    double s = 0;
    for (Index v : cell) s += std::exp(heights(v));
    density.push_back(s / static_cast<double>(cell.size()));
  }
  const double top = density.empty() ? 1.0 : *std::max_element(density.begin(), density.end());
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << f.size + 2 * f.pad << "\" height=\"" << f.size + 2 * f.pad
     << "\">\n";
  for (std::size_t c = 0; c < subdivision.cells().size(); ++c) {
    os << "<polygon class=\"cell\" fill=\"steelblue\" fill-opacity=\"" << density[c] / top
       << "\" stroke=\"black\" stroke-width=\"1\" points=\"";
    bool first = true;
    for (Index v : detail::polygon_order(config, subdivision.cells()[c])) {
      os << (first ? "" : " ") << f.x(config.points()(v, 0)) << ',' << f.y(config.points()(v, 1));
      first = false;
    }
    os << "\"/>\n";
  }
  for (Index i = 0; i < config.size(); ++i) {
    os << "<circle class=\"point\" cx=\"" << f.x(config.points()(i, 0)) << "\" cy=\"" << f.y(config.points()(i, 1))
       << "\" r=\"3\" fill=\"black\"/>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace tentmle::svg
