#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "tentmle/errors.hpp"
#include "tentmle/exact.hpp"
#include "tentmle/geometry.hpp"
#include "tentmle/hfunc.hpp"
#include "tentmle/nnls.hpp"
#include "tentmle/quadrature.hpp"
#include "tentmle/rng.hpp"
#include "tentmle/solver.hpp"
#include "tentmle/triangulations.hpp"

namespace tentmle::duality {

/// Tolerance on |mass - 1| for heights handed to the weight formula.
inline constexpr double kUnitMassTolerance = 1e-9;

namespace detail {

/// w_k = sum over simplices σ ∋ k of vol(σ) e^{y_k} H(y_i - y_k : i in σ, i != k); no checks.
inline Eigen::VectorXd weights_kernel(const PointConfiguration& config, const Eigen::Ref<const Eigen::VectorXd>& heights,
                                      const Triangulation& triangulation) {
  Eigen::VectorXd w = Eigen::VectorXd::Zero(config.size());
  hfunc::Args u;
  for (const auto& s : triangulation.cells()) {
    const double vol = geometry::normalized_volume(config, s);
    for (Index k : s) {
      u.clear();
      for (Index i : s) {
        if (i != k) u.push_back(heights(i) - heights(k));
      }
      w(k) += vol * std::exp(heights(k)) * hfunc::h_eval(u);
    }
  }
  return w;
}

inline void require_normalized(const PointConfiguration& config, const Eigen::Ref<const Eigen::VectorXd>& heights) {
  geometry::check_heights(config, heights);
  if (!geometry::is_relevant(config, heights)) throw NotRelevant("heights are not relevant; apply normalize_heights first");
  const double m = quadrature::total_mass(config, heights).total_mass;
  if (std::abs(m - 1.0) > kUnitMassTolerance) {
    throw NotUnitMass("total mass is " + std::to_string(m) + "; apply normalize_heights first");
  }
}

}  // namespace detail

/// The weight vector (unnormalized) for which `heights` is optimal along the
/// secondary cone of `triangulation`.
inline Eigen::VectorXd weights_from_heights(const PointConfiguration& config, const Eigen::Ref<const Eigen::VectorXd>& heights,
                                            const Triangulation& triangulation) {
  detail::require_normalized(config, heights);
  if (!triangulation.is_triangulation(config.dimension())) throw DimensionMismatch("expected a triangulation");
  if (!geometry::secondary_cone_contains(config, triangulation, heights)) {
    throw ConeViolation("triangulation does not refine the induced subdivision");
  }
  return detail::weights_kernel(config, heights, triangulation);
}

struct NormalConeGenerators {
  HeightVector base_heights;
  std::vector<std::pair<Triangulation, Eigen::VectorXd>> generators;

  /// Generators as matrix columns.
  Eigen::MatrixXd matrix() const {
    Eigen::MatrixXd m(base_heights.size(), static_cast<Eigen::Index>(generators.size()));
    for (std::size_t j = 0; j < generators.size(); ++j) m.col(static_cast<Eigen::Index>(j)) = generators[j].second;
    return m;
  }
};

/// One generator per regular triangulation refining the induced subdivision.
inline NormalConeGenerators normal_cone_generators(const PointConfiguration& config,
                                                   const Eigen::Ref<const Eigen::VectorXd>& heights,
                                                   geometry::TriangulationCache* cache = nullptr) {
  detail::require_normalized(config, heights);
  NormalConeGenerators out;
  out.base_heights = heights;
  const Subdivision delta = geometry::induced_subdivision(config, heights);
  for (auto& t : geometry::refining_triangulations(config, delta, true, cache)) {
    Eigen::VectorXd w = detail::weights_kernel(config, heights, t);
    out.generators.emplace_back(std::move(t), std::move(w));
  }
  return out;
}

/// Residual of the nonnegative least-squares fit of w by the columns.
inline double cone_residual(const Eigen::VectorXd& weights, const Eigen::MatrixXd& generators) {
  return nnls(generators, weights).residual.norm();
}

/// Whether w is a nonnegative combination of the generators (residual ≤ 1e-9 |w|).
inline bool cone_membership(const Eigen::VectorXd& weights, const Eigen::MatrixXd& generators) {
  if (generators.cols() == 0) throw DimensionMismatch("cone has no generators");
  if (generators.rows() != weights.size()) throw DimensionMismatch("generator length does not match weights");
  return cone_residual(weights, generators) <= 1e-9 * weights.norm();
}

inline bool cone_membership(const Eigen::VectorXd& weights, const NormalConeGenerators& cone) {
  return cone_membership(weights, cone.matrix());
}

namespace detail {

/// Heights y0 + z in the relative interior of the subdivision's secondary cone,
/// with y0 the uniform constant: maximize the smallest fold over |z| ≤ ρ.
/// Later attempts tilt the objective randomly while keeping half the best slack.
inline HeightVector interior_heights(const PointConfiguration& config, const geometry::ConeSystem& sys, double rho,
                                     rng::Stream* tilt) {
  const int n = config.size();
  using exact::Rational;
  exact::LinearProgram lp(n + 1);
  auto row_with_t = [&](const std::vector<Rational>& r, int tcoef) {
    std::vector<Rational> out = r;
    out.push_back(Rational(tcoef));
    return out;
  };
  for (const auto& r : sys.equalities) lp.add_constraint(row_with_t(r, 0), exact::Relation::kEqual, 0);
  for (const auto& r : sys.folds) lp.add_constraint(row_with_t(r, -1), exact::Relation::kGreaterEqual, 0);
  const Rational bound = exact::to_rational(rho);
  for (int i = 0; i < n; ++i) {
    std::vector<Rational> e(static_cast<std::size_t>(n + 1), Rational(0));
    e[static_cast<std::size_t>(i)] = 1;
    lp.add_constraint(e, exact::Relation::kLessEqual, bound);
    lp.add_constraint(e, exact::Relation::kGreaterEqual, -bound);
  }
  const double c = quadrature::uniform_height(config);
  if (sys.folds.empty() && !tilt) return HeightVector::Constant(n, c);
  std::vector<Rational> t_cap(static_cast<std::size_t>(n + 1), Rational(0));
  t_cap.back() = 1;
  lp.add_constraint(t_cap, exact::Relation::kLessEqual, 1);
  std::vector<Rational> obj(static_cast<std::size_t>(n + 1), Rational(0));
  obj.back() = 1;
  lp.set_objective(obj);
  auto sol = lp.solve();
  if (sol.status != exact::LpStatus::kOptimal || !(sol.objective > 0)) {
    throw NotRegular("secondary cone of the subdivision has empty interior");
  }
  if (tilt) {
    std::vector<Rational> t_floor(static_cast<std::size_t>(n + 1), Rational(0));
    t_floor.back() = 1;
    lp.add_constraint(t_floor, exact::Relation::kGreaterEqual, sol.objective / 2);
    for (int i = 0; i < n; ++i) obj[static_cast<std::size_t>(i)] = exact::to_rational(std::round((2 * tilt->uniform() - 1) * 1024) / 1024);
    lp.set_objective(obj);
    sol = lp.solve();
    if (sol.status != exact::LpStatus::kOptimal) throw NotRegular("tilted interior-point program failed");
  }
  HeightVector y(n);
  for (int i = 0; i < n; ++i) y(i) = c + exact::to_double(sol.x[static_cast<std::size_t>(i)]);
  return y;
}

}  // namespace detail

struct Realization {
  WeightVector weights;
  HeightVector heights;  // the normalized heights the weights were built at
  int attempts = 0;
  std::size_t generator_count = 0;
};

/// Weights whose MLE induces exactly `subdivision`, verified by re-solving.
inline Realization realize_subdivision(const PointConfiguration& config, const Subdivision& subdivision,
                                       std::uint64_t seed = 0, geometry::TriangulationCache* cache = nullptr,
                                       int max_attempts = 10) {
  if (static_cast<int>(subdivision.used_points().size()) != config.size()) {
    throw NotRegular("subdivision omits points; no positive weights realize it");
  }
  const geometry::ConeSystem sys = geometry::secondary_cone_system(config, subdivision);
  const auto refinements = geometry::refining_triangulations(config, subdivision, true, cache);
  if (refinements.empty()) throw NotRegular("no regular triangulation refines the subdivision");
  rng::Stream stream = rng::Stream::substream(seed, 0, "realize");
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    HeightVector y = detail::interior_heights(config, sys, 0.5, attempt == 0 ? nullptr : &stream);
    if (!(geometry::induced_subdivision(config, y) == subdivision)) continue;
    y = quadrature::normalize_heights(config, y);
    Eigen::VectorXd w = Eigen::VectorXd::Zero(config.size());
    for (const auto& t : refinements) w += detail::weights_kernel(config, y, t);
    w /= static_cast<double>(refinements.size());
    Realization out{WeightVector(w, true), y, attempt + 1, refinements.size()};
    const auto check = solver::solve_mle(config, out.weights);
    if (check.converged && check.subdivision == subdivision) return out;
  }
  throw RealizationFailed("no verified realization after " + std::to_string(max_attempts) + " attempts");
}

struct RankSample {
  HeightVector heights;
  int rank = 0;
  std::vector<double> singular_values;
};

struct RankReport {
  Subdivision subdivision;
  int generator_count = 0;
  int cone_dimension = 0;
  int face_span = 0;  // n - dim(cone) + 1: linear span of the face's GKZ vectors
  std::vector<RankSample> samples;
};

/// Numerical rank of the generator matrix at heights spread over the secondary cone.
inline RankReport rank_probe(const PointConfiguration& config, const Subdivision& subdivision, int trials,
                             std::uint64_t seed, geometry::TriangulationCache* cache = nullptr) {
  RankReport rep;
  rep.subdivision = subdivision;
  const int n = config.size();
  const geometry::ConeSystem sys = geometry::secondary_cone_system(config, subdivision);
  const auto refinements = geometry::refining_triangulations(config, subdivision, true, cache);
  rep.generator_count = static_cast<int>(refinements.size());
  const Eigen::MatrixXd basis = geometry::stratum_basis(config, subdivision);
  rep.cone_dimension = static_cast<int>(basis.cols());
  rep.face_span = n - rep.cone_dimension + 1;

  const HeightVector center = detail::interior_heights(config, sys, 0.5, nullptr);
  const double c = quadrature::uniform_height(config);
  std::vector<Eigen::VectorXd> folds;
  for (const auto& wall : geometry::interior_walls(config, subdivision)) folds.push_back(geometry::fold_functional(config, wall));
  rng::Stream stream = rng::Stream::substream(seed, 0, "rank-probe");
  for (int trial = 0; trial < trials; ++trial) {
    HeightVector y;
    if (trial == 0 && folds.empty()) {
      y = HeightVector::Constant(n, c);
    } else {
      // Random direction inside the stratum, kept strictly inside the cone.
      Eigen::VectorXd z(basis.cols());
      for (Eigen::Index k = 0; k < z.size(); ++k) z(k) = stream.normal();
      const Eigen::VectorXd dir = basis * z;
      double step = 1.0;
      const Eigen::VectorXd base = center.array() - c;
      for (const auto& f : folds) {
        const double fd = f.dot(dir);
        if (fd < 0) step = std::min(step, 0.9 * f.dot(base) / -fd);
      }
      y = center + step * stream.uniform() * dir;
    }
    y = quadrature::normalize_heights(config, y);
    Eigen::MatrixXd m(n, static_cast<Eigen::Index>(refinements.size()));
    for (std::size_t j = 0; j < refinements.size(); ++j) {
      m.col(static_cast<Eigen::Index>(j)) = detail::weights_kernel(config, y, refinements[j]);
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    RankSample s;
    s.heights = y;
    const Eigen::VectorXd sv = svd.singularValues();
    for (Eigen::Index k = 0; k < sv.size(); ++k) {
      s.singular_values.push_back(sv(k));
      if (sv(k) > 1e-8 * sv(0)) ++s.rank;
    }
    rep.samples.push_back(std::move(s));
  }
  return rep;
}

}  // namespace tentmle::duality
