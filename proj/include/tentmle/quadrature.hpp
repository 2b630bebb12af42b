#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <utility>
#include <vector>

#include "tentmle/errors.hpp"
#include "tentmle/exp_kernel.hpp"
#include "tentmle/geometry.hpp"

namespace tentmle::quadrature {

struct CellMass {
  Cell cell;
  double mass = 0.0;
};

/// Integral of exp(tent) over conv(X), split by cell.
struct MassResult {
  double total_mass = 0.0;
  std::vector<CellMass> per_cell;
};

/// Integral over the simplex of exp of the affine interpolant of the vertex heights:
/// vol_norm(σ) · exp[y_0, ..., y_d].
inline double exp_integral_simplex(const PointConfiguration& config, const Cell& simplex,
                                   const std::vector<double>& heights_at_vertices) {
  if (heights_at_vertices.size() != simplex.size()) {
    throw DimensionMismatch("need one height per simplex vertex");
  }
  const double vol = geometry::normalized_volume(config, simplex);
  if (!(vol > 0.0)) throw HullDegenerate("simplex is degenerate");
  return vol * stable_exp_divided_difference(heights_at_vertices);
}

namespace detail {

inline std::vector<double> vertex_heights(const Cell& simplex, const Eigen::Ref<const Eigen::VectorXd>& heights) {
  std::vector<double> v;
  v.reserve(simplex.size());
  for (Index i : simplex) v.push_back(heights(i));
  return v;
}

/// Sums simplex integrals of a triangulation, grouped by the cells of `cells`.
inline MassResult integrate_grouped(const PointConfiguration& config, const Triangulation& triangulation,
                                    const Subdivision& cells, const Eigen::Ref<const Eigen::VectorXd>& heights) {
  MassResult out;
  for (const auto& c : cells.cells()) out.per_cell.push_back({c, 0.0});
  for (const auto& s : triangulation.cells()) {
    const double m = geometry::normalized_volume(config, s) * stable_exp_divided_difference(vertex_heights(s, heights));
    for (auto& pc : out.per_cell) {
      if (::tentmle::detail::is_subset(s, pc.cell)) {
        pc.mass += m;
        break;
      }
    }
  }
  // Fixed summation order keeps results bit-stable.
  for (const auto& pc : out.per_cell) out.total_mass += pc.mass;
  return out;
}

}  // namespace detail

/// Integral of exp over conv(X) of the tent, given a triangulation in whose
/// secondary cone the heights lie.
inline MassResult exp_integral_subdivision(const PointConfiguration& config, const Triangulation& triangulation,
                                           const Eigen::Ref<const Eigen::VectorXd>& heights) {
  geometry::check_heights(config, heights);
  if (!triangulation.is_triangulation(config.dimension())) {
    throw DimensionMismatch("expected a triangulation");
  }
  if (!geometry::secondary_cone_contains(config, triangulation, heights)) {
    throw ConeViolation("heights are not in the secondary cone of the triangulation");
  }
  return detail::integrate_grouped(config, triangulation, triangulation, heights);
}

/// ∫_P exp(h_{X,y}(t)) dt with per-cell masses of the induced subdivision.
inline MassResult total_mass(const PointConfiguration& config, const Eigen::Ref<const Eigen::VectorXd>& heights) {
  const geometry::LiftedHull hull = geometry::lifted_hull(config, heights);
  return detail::integrate_grouped(config, hull.refinement, hull.subdivision, heights);
}

/// Mass of the piecewise-affine interpolant on a fixed triangulation, with its
/// gradient and Hessian in the heights. Equals the tent mass inside the
/// triangulation's secondary cone.
struct MassDerivatives {
  double mass = 0.0;
  Eigen::VectorXd gradient;
  Eigen::MatrixXd hessian;
};

inline MassDerivatives mass_derivatives(const PointConfiguration& config, const Triangulation& triangulation,
                                        const Eigen::Ref<const Eigen::VectorXd>& heights, bool with_hessian = true) {
  const int n = config.size();
  MassDerivatives out;
  out.gradient = Eigen::VectorXd::Zero(n);
  if (with_hessian) out.hessian = Eigen::MatrixXd::Zero(n, n);
  std::vector<double> nodes;
  for (const auto& s : triangulation.cells()) {
    const double vol = geometry::normalized_volume(config, s);
    const std::vector<double> ys = detail::vertex_heights(s, heights);
    out.mass += vol * stable_exp_divided_difference(ys);
    for (std::size_t a = 0; a < s.size(); ++a) {
      nodes = ys;
      nodes.push_back(ys[a]);
      out.gradient(s[a]) += vol * stable_exp_divided_difference(nodes);
      if (!with_hessian) continue;
      for (std::size_t b = a; b < s.size(); ++b) {
        nodes = ys;
        nodes.push_back(ys[a]);
        nodes.push_back(ys[b]);
        const double v = vol * stable_exp_divided_difference(nodes) * (a == b ? 2.0 : 1.0);
        out.hessian(s[a], s[b]) += v;
        if (a != b) out.hessian(s[b], s[a]) += v;
      }
    }
  }
  return out;
}

/// make_relevant followed by the shift that brings the mass to one.
inline HeightVector normalize_heights(const PointConfiguration& config, const Eigen::Ref<const Eigen::VectorXd>& heights) {
  HeightVector y = geometry::make_relevant(config, heights);
  const double m = total_mass(config, y).total_mass;
  y.array() -= std::log(m);
  return y;
}

/// Constant height giving the uniform density on conv(X).
inline double uniform_height(const PointConfiguration& config) {
  double fact = 1.0;
  for (int k = 2; k <= config.dimension(); ++k) fact *= k;
  return -std::log(config.hull_volume() / fact);
}

}  // namespace tentmle::quadrature
