#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "tentmle/errors.hpp"
#include "tentmle/exp_kernel.hpp"
#include "tentmle/geometry.hpp"
#include "tentmle/hfunc.hpp"
#include "tentmle/nnls.hpp"
#include "tentmle/quadrature.hpp"
#include "tentmle/rng.hpp"

namespace tentmle {

/// Positive weights summing to one.
class WeightVector {
 public:
  WeightVector() = default;

  /// Validates w; with `normalize` the entries are rescaled to sum to one first.
  explicit WeightVector(Eigen::VectorXd w, bool normalize = false) : values_(std::move(w)) {
    if (values_.size() == 0) throw InvalidWeights("weight vector is empty");
    if (!values_.allFinite()) throw InvalidWeights("weights must be finite");
    for (Eigen::Index i = 0; i < values_.size(); ++i) {
      if (!(values_(i) > 0.0)) throw InvalidWeights("weight " + std::to_string(i + 1) + " is not positive");
    }
    const double s = values_.sum();
    if (normalize) {
      values_ /= s;
    } else if (std::abs(s - 1.0) > 1e-12) {
      throw InvalidWeights("weights sum to " + std::to_string(s) + ", not 1");
    }
  }

  static WeightVector unit(int n) { return WeightVector(Eigen::VectorXd::Constant(n, 1.0 / n), true); }

  const Eigen::VectorXd& values() const { return values_; }
  int size() const { return static_cast<int>(values_.size()); }
  double operator()(Index i) const { return values_(i); }

 private:
  Eigen::VectorXd values_;
};

namespace solver {

struct SolverOptions {
  double grad_tol = 1e-8;
  int max_iters = 10000;
  std::optional<HeightVector> start;
  std::uint64_t seed = 0;
  // With no explicit start, the uniform start is perturbed by this many
  // standard deviations of seeded noise (0 keeps the plain uniform start).
  double start_jitter = 0.0;

  void validate() const {
    if (!(grad_tol > 0.0)) throw InvalidWeights("grad_tol must be positive");
    if (max_iters < 1) throw InvalidWeights("max_iters must be positive");
  }
};

struct MleResult {
  HeightVector heights;
  Subdivision subdivision;
  double log_likelihood = 0.0;
  double mass = 0.0;
  int iterations = 0;
  bool converged = false;
  double grad_norm = std::numeric_limits<double>::infinity();
  std::vector<double> objective_trace;
  int certificate_size = 0;  // triangulations whose gradients certified optimality
};

/// w·y − ∫_P exp(h_{X,y}).
inline double objective(const PointConfiguration& config, const Eigen::Ref<const Eigen::VectorXd>& weights,
                        const Eigen::Ref<const Eigen::VectorXd>& heights) {
  if (weights.size() != config.size()) throw DimensionMismatch("weight vector does not match configuration");
  return weights.dot(heights) - quadrature::total_mass(config, heights).total_mass;
}

/// Gradient of the objective along the secondary cone of `triangulation`, from H.
inline Eigen::VectorXd gradient(const PointConfiguration& config, const Eigen::Ref<const Eigen::VectorXd>& weights,
                                const Eigen::Ref<const Eigen::VectorXd>& heights, const Triangulation& triangulation) {
  geometry::check_heights(config, heights);
  if (weights.size() != config.size()) throw DimensionMismatch("weight vector does not match configuration");
  if (!triangulation.is_triangulation(config.dimension())) throw DimensionMismatch("expected a triangulation");
  if (!geometry::secondary_cone_contains(config, triangulation, heights)) {
    throw ConeViolation("triangulation does not refine the induced subdivision");
  }
  Eigen::VectorXd g = weights;
  hfunc::Args u;
  for (const auto& s : triangulation.cells()) {
    const double vol = geometry::normalized_volume(config, s);
    for (Index k : s) {
      u.clear();
      for (Index i : s) {
        if (i != k) u.push_back(heights(i) - heights(k));
      }
      g(k) -= vol * std::exp(heights(k)) * hfunc::h_eval(u);
    }
  }
  return g;
}

/// Membership in the Samworth body: total mass at most one.
inline bool samworth_membership(const PointConfiguration& config, const Eigen::Ref<const Eigen::VectorXd>& heights) {
  return quadrature::total_mass(config, heights).total_mass <= 1.0 + 1e-12;
}

namespace detail {

/// Current region of linearity: the induced subdivision, an orthonormal basis of
/// the heights affine on its cells, and its fold functionals.
struct Stratum {
  Subdivision subdivision;
  Triangulation refinement;
  Eigen::MatrixXd basis;
  std::vector<Eigen::VectorXd> folds;
};

inline Stratum make_stratum(const PointConfiguration& config, const Eigen::VectorXd& y) {
  geometry::LiftedHull hull = geometry::lifted_hull(config, y);
  Stratum s;
  s.basis = geometry::stratum_basis(config, hull.subdivision);
  for (const auto& wall : geometry::interior_walls(config, hull.subdivision)) {
    s.folds.push_back(geometry::fold_functional(config, wall));
  }
  s.subdivision = std::move(hull.subdivision);
  s.refinement = std::move(hull.refinement);
  return s;
}

inline double mass_on(const PointConfiguration& config, const Triangulation& t, const Eigen::VectorXd& y) {
  double m = 0.0;
  std::vector<double> ys;
  for (const auto& s : t.cells()) {
    ys.clear();
    for (Index i : s) ys.push_back(y(i));
    m += geometry::normalized_volume(config, s) * quadrature::stable_exp_divided_difference(ys);
  }
  return m;
}

/// Triangulation in whose secondary cone y + εr lies for small ε > 0: the
/// subdivision refined cell by cell by the upper hull of r, then generically.
inline Triangulation refine_by(const PointConfiguration& config, const Subdivision& subdivision, const Eigen::VectorXd& r) {
  const int d = config.dimension();
  const double scale = r.lpNorm<Eigen::Infinity>();
  const Eigen::VectorXd rs = scale > 0 ? Eigen::VectorXd(r / scale) : r;
  std::vector<Cell> cells;
  for (const auto& c : subdivision.cells()) {
    if (static_cast<int>(c.size()) == d + 1) {
      cells.push_back(c);
      continue;
    }
    for (auto& sub : geometry::detail::upper_cells(config, c, rs)) cells.push_back(std::move(sub));
  }
  return geometry::refine_to_triangulation(config, Subdivision(std::move(cells)));
}

/// Projection of w onto the cone spanned by the mass gradients of the
/// triangulations refining the stratum. Columns are generated on demand: the
/// triangulation maximizing g_T·r over all refinements is refine_by(r), so
/// when it adds nothing the residual r is exact (up to rounding).
struct Certificate {
  Eigen::VectorXd residual;
  std::vector<Triangulation> triangulations;
  Eigen::VectorXd lambda;
};

inline Certificate certify(const PointConfiguration& config, const Stratum& st, const Eigen::VectorXd& y,
                           const Eigen::VectorXd& w, double tol) {
  Certificate c;
  std::vector<Eigen::VectorXd> cols;
  c.triangulations.push_back(st.refinement);
  cols.push_back(quadrature::mass_derivatives(config, st.refinement, y, false).gradient);
  for (int round = 0; round < 200; ++round) {
    Eigen::MatrixXd g(w.size(), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t j = 0; j < cols.size(); ++j) g.col(static_cast<Eigen::Index>(j)) = cols[j];
    NnlsResult fit = nnls(g, w);
    c.residual = fit.residual;
    c.lambda = fit.x;
    if (c.residual.lpNorm<Eigen::Infinity>() <= tol) break;
    Triangulation t = refine_by(config, st.subdivision, c.residual);
    if (std::find(c.triangulations.begin(), c.triangulations.end(), t) != c.triangulations.end()) break;
    Eigen::VectorXd col = quadrature::mass_derivatives(config, t, y, false).gradient;
    if (col.dot(c.residual) <= 1e-14 * col.norm() * c.residual.norm()) break;
    c.triangulations.push_back(std::move(t));
    cols.push_back(std::move(col));
  }
  return c;
}

}  // namespace detail

/// Maximizes w·y − ∫exp(h_{X,y}) over y. Newton steps inside the current region
/// of linearity (stepping onto any fold that would flatten), then an ascent step
/// along the min-norm supergradient when the stratum optimum is not optimal.
inline MleResult solve_mle(const PointConfiguration& config, const WeightVector& weights,
                           const SolverOptions& options = {}) {
  options.validate();
  const int n = config.size();
  if (weights.size() != n) throw InvalidWeights("expected " + std::to_string(n) + " weights");
  const Eigen::VectorXd& w = weights.values();

  HeightVector y;
  if (options.start) {
    geometry::check_heights(config, *options.start);
    y = *options.start;
  } else {
    y = HeightVector::Constant(n, quadrature::uniform_height(config));
    if (options.start_jitter > 0.0) {
      rng::Stream stream = rng::Stream::substream(options.seed, 0, "solver-start");
      for (Index i = 0; i < n; ++i) y(i) += options.start_jitter * stream.normal();
    }
  }
  y = geometry::make_relevant(config, y);

  MleResult res;
  double f = objective(config, w, y);
  res.objective_trace.push_back(f);
  double ascent_step = 1.0;
  int stalls = 0;

  auto accept = [&](HeightVector next, double fn) {
    if (fn - f <= 1e-15 * std::max(1.0, std::abs(f))) ++stalls;
    else stalls = 0;
    y = std::move(next);
    f = fn;
    res.objective_trace.push_back(f);
    ++res.iterations;
  };

  while (res.iterations < options.max_iters) {
    detail::Stratum st = detail::make_stratum(config, y);
    const Eigen::MatrixXd& b = st.basis;
    y = b * (b.transpose() * y);

    // Newton on the stratum, where the objective is smooth.
    bool hit_fold = false;
    double last_gr = std::numeric_limits<double>::infinity();
    while (res.iterations < options.max_iters) {
      const auto md = quadrature::mass_derivatives(config, st.refinement, y, true);
      const Eigen::VectorXd gr = b.transpose() * (w - md.gradient);
      const double gr_norm = gr.lpNorm<Eigen::Infinity>();
      if (gr_norm <= 1e-3 * options.grad_tol) break;
      const Eigen::MatrixXd hr = b.transpose() * md.hessian * b;
      const Eigen::VectorXd p = hr.ldlt().solve(gr);
      const double decrement = gr.dot(p);
      if (!(decrement > 0.0)) break;
      // Below this the objective change is rounding noise: pure Newton steps,
      // for as long as they keep shrinking the reduced gradient.
      const bool local = decrement < 1e-14;
      if (local && gr_norm >= 0.5 * last_gr) break;
      last_gr = gr_norm;
      const Eigen::VectorXd dir = b * p;
      double amax = std::numeric_limits<double>::infinity();
      for (const auto& fold : st.folds) {
        const double fd = fold.dot(dir);
        if (fd < 0.0) amax = std::min(amax, std::max(0.0, fold.dot(y)) / -fd);
      }
      const double phi0 = w.dot(y) - md.mass;
      double alpha = std::min(1.0, amax);
      bool ok = false;
      HeightVector yt;
      double ft = 0.0;
      for (int k = 0; k < 60; ++k) {
        yt = y + alpha * dir;
        ft = w.dot(yt) - detail::mass_on(config, st.refinement, yt);
        if (local || ft >= phi0 + 1e-4 * alpha * decrement) {
          ok = true;
          break;
        }
        alpha *= 0.5;
      }
      if (!ok) break;
      hit_fold = alpha == amax;
      accept(std::move(yt), ft);
      if (hit_fold) break;
    }
    if (hit_fold) continue;

    const detail::Certificate cert = detail::certify(config, st, y, w, options.grad_tol);
    res.grad_norm = cert.residual.lpNorm<Eigen::Infinity>();
    res.certificate_size = static_cast<int>(cert.triangulations.size());
    if (res.grad_norm <= options.grad_tol) {
      res.converged = true;
      break;
    }
    if (res.iterations >= options.max_iters) break;

    // Ascent along r: the one-sided derivative of the objective is at least |r|².
    const Eigen::VectorXd& r = cert.residual;
    const double slope = r.squaredNorm();
    auto trial = [&](double t) { return objective(config, w, y + t * r); };
    double t = ascent_step;
    double ft = trial(t);
    bool ok = ft >= f + 1e-4 * t * slope;
    if (ok) {
      for (int k = 0; k < 30; ++k) {
        const double f2 = trial(2 * t);
        if (!(f2 >= f + 1e-4 * 2 * t * slope) || f2 <= ft) break;
        t *= 2;
        ft = f2;
      }
    } else {
      for (int k = 0; k < 80 && !ok; ++k) {
        t *= 0.5;
        ft = trial(t);
        ok = ft >= f + 1e-4 * t * slope;
      }
    }
    if (ok) {
      ascent_step = t;
      HeightVector next = geometry::make_relevant(config, y + t * r);
      const double fn = objective(config, w, next);
      accept(std::move(next), fn);
    }
    if (!ok || stalls >= 20) {
      // Diminishing supergradient steps, keeping the best iterate.
      const double base = std::max(ascent_step, 1e-3) / std::max(r.norm(), 1e-300);
      bool improved = false;
      HeightVector cur = y;
      Eigen::VectorXd dir = r;
      for (int k = 1; k <= 50 && res.iterations < options.max_iters; ++k) {
        cur = geometry::make_relevant(config, cur + (base / k) * dir);
        const double fc = objective(config, w, cur);
        if (fc > f) {
          accept(cur, fc);
          improved = true;
        }
        const detail::Stratum sc = detail::make_stratum(config, cur);
        dir = w - quadrature::mass_derivatives(config, sc.refinement, cur, false).gradient;
      }
      stalls = 0;
      if (!improved) break;
    }
  }

  res.heights = quadrature::normalize_heights(config, y);
  res.subdivision = geometry::induced_subdivision(config, res.heights);
  res.mass = quadrature::total_mass(config, res.heights).total_mass;
  res.log_likelihood = w.dot(res.heights);
  return res;
}

}  // namespace solver
}  // namespace tentmle
