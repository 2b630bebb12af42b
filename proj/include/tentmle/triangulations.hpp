#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tentmle/errors.hpp"
#include "tentmle/exact.hpp"
#include "tentmle/geometry.hpp"

namespace tentmle::geometry {

/// Default size limit for combinatorial enumeration.
inline constexpr int kMaxEnumerationPoints = 9;

namespace detail {

using exact::Rational;

/// Exact geometric predicates on a configuration, with a floating-point filter.
class Predicates {
 public:
  explicit Predicates(const PointConfiguration& config) : config_(&config), d_(config.dimension()) {
    const int n = config.size();
    exact_.resize(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) {
      for (int k = 0; k < d_; ++k) exact_[static_cast<std::size_t>(i)].push_back(config.exact_coordinate(i, k));
    }
  }

  int dimension() const { return d_; }

  /// Sign of det [[1 ... 1], [x_{f_0} ... x_{f_{d-1}} p]] for a facet and a point.
  int orientation(const Cell& facet, const Eigen::RowVectorXd& p, const std::vector<Rational>& p_exact) const {
    Eigen::MatrixXd m(d_, d_);
    const Eigen::RowVectorXd base = config_->point(facet[0]);
    for (int r = 1; r < d_; ++r) m.row(r - 1) = config_->point(facet[static_cast<std::size_t>(r)]) - base;
    m.row(d_ - 1) = p - base;
    const double det = m.determinant();
    double bound = 1.0;
    for (int r = 0; r < d_; ++r) bound *= m.row(r).norm();
    if (std::abs(det) > 1e-9 * bound) return det > 0 ? 1 : -1;
    if (bound == 0.0) return 0;
    exact::RationalMatrix e(static_cast<std::size_t>(d_), std::vector<Rational>(static_cast<std::size_t>(d_)));
    const auto& b = exact_[static_cast<std::size_t>(facet[0])];
    for (int r = 0; r < d_; ++r) {
      const auto& row = (r + 1 < d_) ? exact_[static_cast<std::size_t>(facet[static_cast<std::size_t>(r + 1)])] : p_exact;
      for (int k = 0; k < d_; ++k) e[static_cast<std::size_t>(r)][static_cast<std::size_t>(k)] = row[static_cast<std::size_t>(k)] - b[static_cast<std::size_t>(k)];
    }
    return exact::sign(exact::determinant(std::move(e)));
  }

  int orientation(const Cell& facet, Index p) const {
    return orientation(facet, config_->point(p), exact_[static_cast<std::size_t>(p)]);
  }

  /// Exact test that d+1 points are affinely independent.
  bool independent(const Cell& simplex) const {
    Cell facet(simplex.begin(), simplex.end() - 1);
    return orientation(facet, simplex.back()) != 0;
  }

  /// True iff conv(a) ∩ conv(b) = conv(a ∩ b), decided exactly.
  bool properly_intersect(const Cell& a, const Cell& b) const {
    if (separated_by_facet(a, b) || separated_by_facet(b, a)) return true;
    // max sum of weights on non-shared vertices subject to a common point.
    Cell only_a, only_b;
    std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(only_a));
    std::set_difference(b.begin(), b.end(), a.begin(), a.end(), std::back_inserter(only_b));
    if (only_a.empty() || only_b.empty()) return true;
    const int na = static_cast<int>(a.size());
    const int nb = static_cast<int>(b.size());
    exact::LinearProgram lp(na + nb, true);
    std::vector<Rational> row(static_cast<std::size_t>(na + nb));
    for (int k = 0; k < d_; ++k) {
      std::fill(row.begin(), row.end(), Rational(0));
      for (int i = 0; i < na; ++i) row[static_cast<std::size_t>(i)] = exact_[static_cast<std::size_t>(a[static_cast<std::size_t>(i)])][static_cast<std::size_t>(k)];
      for (int j = 0; j < nb; ++j) row[static_cast<std::size_t>(na + j)] = -exact_[static_cast<std::size_t>(b[static_cast<std::size_t>(j)])][static_cast<std::size_t>(k)];
      lp.add_constraint(row, exact::Relation::kEqual, 0);
    }
    std::fill(row.begin(), row.end(), Rational(0));
    for (int i = 0; i < na; ++i) row[static_cast<std::size_t>(i)] = 1;
    lp.add_constraint(row, exact::Relation::kEqual, 1);
    std::fill(row.begin(), row.end(), Rational(0));
    for (int j = 0; j < nb; ++j) row[static_cast<std::size_t>(na + j)] = 1;
    lp.add_constraint(row, exact::Relation::kEqual, 1);
    std::vector<Rational> obj(static_cast<std::size_t>(na + nb), Rational(0));
    for (int i = 0; i < na; ++i) {
      if (!std::binary_search(b.begin(), b.end(), a[static_cast<std::size_t>(i)])) obj[static_cast<std::size_t>(i)] = 1;
    }
    for (int j = 0; j < nb; ++j) {
      if (!std::binary_search(a.begin(), a.end(), b[static_cast<std::size_t>(j)])) obj[static_cast<std::size_t>(na + j)] = 1;
    }
    lp.set_objective(obj);
    const auto sol = lp.solve();
    return sol.status == exact::LpStatus::kInfeasible || sol.objective == 0;
  }

  const std::vector<Rational>& exact_point(Index i) const { return exact_[static_cast<std::size_t>(i)]; }

 private:
  /// Some facet hyperplane of `a` has `b` weakly on the far side, touching only at shared vertices.
  bool separated_by_facet(const Cell& a, const Cell& b) const {
    for (std::size_t skip = 0; skip < a.size(); ++skip) {
      Cell facet;
      for (std::size_t j = 0; j < a.size(); ++j) {
        if (j != skip) facet.push_back(a[j]);
      }
      const int inside = orientation(facet, a[skip]);
      bool ok = true;
      for (Index v : b) {
        const int s = orientation(facet, v);
        if (s == inside || (s == 0 && !std::binary_search(facet.begin(), facet.end(), v))) {
          ok = false;
          break;
        }
      }
      if (ok) return true;
    }
    return false;
  }

  const PointConfiguration* config_;
  int d_;
  std::vector<std::vector<Rational>> exact_;
};

/// Depth-first enumeration of all triangulations whose simplices lie in allowed cells.
class TriangulationSearch {
 public:
  TriangulationSearch(const PointConfiguration& config, const std::vector<Cell>& allowed)
      : config_(config), pred_(config), d_(config.dimension()) {
    const int n = config.size();
    ::tentmle::detail::for_each_combination(n, d_ + 1, [&](const std::vector<Index>& s) {
      const bool inside = std::any_of(allowed.begin(), allowed.end(),
                                      [&](const Cell& c) { return ::tentmle::detail::is_subset(s, c); });
      if (inside && pred_.independent(s)) simplices_.push_back(s);
    });
    const std::size_t m = simplices_.size();
    compat_.assign(m * m, -1);
    find_boundary_facets();
    choose_generic_point();
  }

  std::vector<Triangulation> run() {
    std::vector<std::size_t> chosen;
    for (std::size_t i = 0; i < simplices_.size(); ++i) {
      if (contains_generic(simplices_[i])) {
        chosen.push_back(i);
        extend(chosen);
        chosen.pop_back();
      }
    }
    std::sort(results_.begin(), results_.end());
    return results_;
  }

 private:
  bool compatible(std::size_t i, std::size_t j) {
    const std::size_t m = simplices_.size();
    signed char& c = compat_[i * m + j];
    if (c < 0) {
      c = pred_.properly_intersect(simplices_[i], simplices_[j]) ? 1 : 0;
      compat_[j * m + i] = c;
    }
    return c == 1;
  }

  void find_boundary_facets() {
    const int n = config_.size();
    ::tentmle::detail::for_each_combination(n, d_, [&](const std::vector<Index>& f) {
      int pos = 0, neg = 0;
      bool degenerate = true;
      for (Index p = 0; p < n; ++p) {
        const int s = pred_.orientation(f, p);
        pos += s > 0;
        neg += s < 0;
        degenerate = degenerate && s == 0;
      }
      if (!degenerate && (pos == 0 || neg == 0)) boundary_.push_back(f);
    });
    std::sort(boundary_.begin(), boundary_.end());
  }

  void choose_generic_point() {
    const int n = config_.size();
    const Eigen::RowVectorXd mean = config_.points().colwise().mean();
    for (int attempt = 0; attempt < 64; ++attempt) {
      Eigen::RowVectorXd g = mean;
      const double scale = config_.length_scale() * 1e-3 / (1 << std::min(attempt, 20));
      for (int k = 0; k < d_; ++k) {
        g(k) += scale * (::tentmle::detail::jitter(static_cast<std::uint64_t>(k), static_cast<std::uint64_t>(attempt) + 101) - 0.5);
      }
      std::vector<Rational> ge;
      for (int k = 0; k < d_; ++k) ge.push_back(exact::to_rational(g(k)));
      bool generic = true;
      ::tentmle::detail::for_each_combination(n, d_, [&](const std::vector<Index>& f) {
        if (!generic) return;
        // Skip facets that do not span a hyperplane.
        bool spans = false;
        for (Index p = 0; p < n && !spans; ++p) spans = pred_.orientation(f, p) != 0;
        if (spans && pred_.orientation(f, g, ge) == 0) generic = false;
      });
      if (!generic) continue;
      generic_ = g;
      generic_exact_ = ge;
      bool covered = false;
      for (const auto& s : simplices_) covered = covered || contains_generic(s);
      if (covered) return;
    }
    throw HullDegenerate("could not place a generic interior point for enumeration");
  }

  bool contains_generic(const Cell& s) const {
    for (std::size_t skip = 0; skip < s.size(); ++skip) {
      Cell facet;
      for (std::size_t j = 0; j < s.size(); ++j) {
        if (j != skip) facet.push_back(s[j]);
      }
      if (pred_.orientation(facet, s[skip]) != pred_.orientation(facet, generic_, generic_exact_)) return false;
    }
    return true;
  }

  void extend(std::vector<std::size_t>& chosen) {
    // Count facets of the chosen simplices; an open facet appears once and is interior.
    std::map<Cell, std::pair<int, std::size_t>> facets;
    for (std::size_t id : chosen) {
      const Cell& s = simplices_[id];
      for (std::size_t skip = 0; skip < s.size(); ++skip) {
        Cell f;
        for (std::size_t j = 0; j < s.size(); ++j) {
          if (j != skip) f.push_back(s[j]);
        }
        auto& entry = facets[f];
        ++entry.first;
        entry.second = id;
      }
    }
    const Cell* open = nullptr;
    std::size_t owner = 0;
    for (const auto& [f, entry] : facets) {
      if (entry.first == 1 && !std::binary_search(boundary_.begin(), boundary_.end(), f)) {
        open = &f;
        owner = entry.second;
        break;
      }
    }
    if (open == nullptr) {
      std::vector<Cell> cells;
      for (std::size_t id : chosen) cells.push_back(simplices_[id]);
      results_.emplace_back(std::move(cells));
      return;
    }
    const Cell& owner_cell = simplices_[owner];
    Index apex = -1;
    for (Index v : owner_cell) {
      if (!std::binary_search(open->begin(), open->end(), v)) apex = v;
    }
    const int apex_side = pred_.orientation(*open, apex);
    const Cell facet = *open;
    for (std::size_t cand = 0; cand < simplices_.size(); ++cand) {
      const Cell& s = simplices_[cand];
      if (!::tentmle::detail::is_subset(facet, s)) continue;
      Index v = -1;
      for (Index u : s) {
        if (!std::binary_search(facet.begin(), facet.end(), u)) v = u;
      }
      if (pred_.orientation(facet, v) != -apex_side) continue;
      bool ok = true;
      for (std::size_t id : chosen) {
        if (id == cand || !compatible(id, cand)) {
          ok = false;
          break;
        }
      }
      if (!ok) continue;
      chosen.push_back(cand);
      extend(chosen);
      chosen.pop_back();
    }
  }

  const PointConfiguration& config_;
  Predicates pred_;
  int d_;
  std::vector<Cell> simplices_;
  std::vector<signed char> compat_;
  std::vector<Cell> boundary_;
  Eigen::RowVectorXd generic_;
  std::vector<Rational> generic_exact_;
  std::vector<Triangulation> results_;
};

inline std::vector<Rational> zeros(int n) { return std::vector<Rational>(static_cast<std::size_t>(n), Rational(0)); }

/// Index of a cell whose hull contains the point (double test with tolerance).
inline std::optional<std::size_t> containing_cell(const PointConfiguration& config, const Subdivision& s, Index p) {
  for (std::size_t c = 0; c < s.cells().size(); ++c) {
    const Triangulation t = refine_to_triangulation(config, Subdivision({s.cells()[c]}));
    for (const auto& simplex : t.cells()) {
      if (barycentric(config, simplex, config.point(p)).minCoeff() >= -1e-12) return c;
    }
  }
  return std::nullopt;
}

/// Exact fold row: sum_j lambda_j y_{base_j} - y_point, zero iff the point is on
/// the affine extension of the base's lifted facet.
inline std::vector<Rational> exact_fold_row(const PointConfiguration& config, const Cell& base, Index point) {
  auto lambda = exact_barycentric(config, base, point);
  if (!lambda) throw HullDegenerate("degenerate affine basis in fold computation");
  std::vector<Rational> row = zeros(config.size());
  for (std::size_t j = 0; j < base.size(); ++j) row[static_cast<std::size_t>(base[j])] += (*lambda)[j];
  row[static_cast<std::size_t>(point)] -= 1;
  return row;
}

/// Exact affine basis of a cell: first lexicographic independent (d+1)-subset.
inline Cell exact_affine_basis(const Predicates& pred, const Cell& cell) {
  const int d = pred.dimension();
  Cell best;
  ::tentmle::detail::for_each_combination(static_cast<int>(cell.size()), d + 1, [&](const std::vector<Index>& comb) {
    if (!best.empty()) return;
    Cell s;
    for (Index c : comb) s.push_back(cell[static_cast<std::size_t>(c)]);
    if (pred.independent(s)) best = std::move(s);
  });
  if (best.empty()) throw NotRegular("cell is not full-dimensional");
  return best;
}

}  // namespace detail

/// Linear description of the heights inducing (a coarsening of) a subdivision,
/// in exact arithmetic: coplanarity equalities, one fold row per interior wall,
/// and one row per point missing from every cell.
struct ConeSystem {
  std::vector<std::vector<exact::Rational>> equalities;  // row·y = 0
  std::vector<std::vector<exact::Rational>> folds;       // row·y > 0 on the relative interior
};

inline ConeSystem secondary_cone_system(const PointConfiguration& config, const Subdivision& subdivision) {
  const detail::Predicates pred(config);
  ConeSystem sys;
  std::vector<Cell> bases;
  for (const auto& cell : subdivision.cells()) {
    for (Index v : cell) {
      if (v < 0 || v >= config.size()) throw DimensionMismatch("subdivision index out of range");
    }
    bases.push_back(detail::exact_affine_basis(pred, cell));
    for (Index j : cell) {
      if (!std::binary_search(bases.back().begin(), bases.back().end(), j)) {
        sys.equalities.push_back(detail::exact_fold_row(config, bases.back(), j));
      }
    }
  }
  for (const Wall& w : interior_walls(config, subdivision)) {
    sys.folds.push_back(detail::exact_fold_row(config, bases[w.first], w.witness));
  }
  const Cell used = subdivision.used_points();
  for (Index p = 0; p < config.size(); ++p) {
    if (std::binary_search(used.begin(), used.end(), p)) continue;
    auto c = detail::containing_cell(config, subdivision, p);
    if (!c) throw NotRegular("point lies outside every cell");
    sys.folds.push_back(detail::exact_fold_row(config, bases[*c], p));
  }
  return sys;
}

/// Exact witness heights in the relative interior of the secondary cone of the
/// subdivision (every fold >= 1), or nullopt if the system is infeasible. The
/// witness is verified to induce exactly the subdivision.
inline std::optional<HeightVector> regular_heights(const PointConfiguration& config, const Subdivision& subdivision) {
  const ConeSystem sys = secondary_cone_system(config, subdivision);
  const int n = config.size();
  exact::LinearProgram lp(n);
  for (const auto& r : sys.equalities) lp.add_constraint(r, exact::Relation::kEqual, 0);
  for (const auto& r : sys.folds) lp.add_constraint(r, exact::Relation::kGreaterEqual, 1);
  const auto sol = lp.solve();
  if (sol.status == exact::LpStatus::kInfeasible) return std::nullopt;
  HeightVector y(n);
  for (Index i = 0; i < n; ++i) y(i) = exact::to_double(sol.x[static_cast<std::size_t>(i)]);
  if (!(induced_subdivision(config, y) == subdivision)) return std::nullopt;
  return y;
}

inline bool is_regular_subdivision(const PointConfiguration& config, const Subdivision& subdivision) {
  try {
    return regular_heights(config, subdivision).has_value();
  } catch (const NotRegular&) {
    return false;
  }
}

/// Shared memo of enumeration results, keyed by configuration and region.
class TriangulationCache {
 public:
  using Key = std::pair<std::vector<double>, std::vector<Cell>>;

  std::optional<std::vector<Triangulation>> find(const Key& key) const {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = map_.find(key);
    if (it == map_.end()) return std::nullopt;
    return it->second;
  }

  void store(const Key& key, std::vector<Triangulation> value) {
    std::lock_guard<std::mutex> lock(mutex_);
    map_.emplace(key, std::move(value));
  }

  static Key key(const PointConfiguration& config, const std::vector<Cell>& region) {
    std::vector<double> pts(config.points().data(), config.points().data() + config.points().size());
    pts.push_back(static_cast<double>(config.dimension()));
    return {std::move(pts), region};
  }

 private:
  mutable std::mutex mutex_;
  std::map<Key, std::vector<Triangulation>> map_;
};

/// All triangulations (regular or not, possibly omitting points) whose simplices
/// lie inside cells of `region`.
inline std::vector<Triangulation> enumerate_triangulations(const PointConfiguration& config, const Subdivision& region,
                                                           int max_points = kMaxEnumerationPoints) {
  if (config.size() > max_points) {
    throw TooLarge("enumeration limited to " + std::to_string(max_points) + " points, got " + std::to_string(config.size()));
  }
  return detail::TriangulationSearch(config, region.cells()).run();
}

inline Subdivision trivial_subdivision(const PointConfiguration& config) {
  Cell all(static_cast<std::size_t>(config.size()));
  std::iota(all.begin(), all.end(), 0);
  return Subdivision({all});
}

/// Regular triangulations refining the region, from the cache when available.
inline std::vector<Triangulation> regular_triangulations_within(const PointConfiguration& config, const Subdivision& region,
                                                                TriangulationCache* cache = nullptr,
                                                                int max_points = kMaxEnumerationPoints) {
  const auto key = TriangulationCache::key(config, region.cells());
  if (cache) {
    if (auto hit = cache->find(key)) return *hit;
  }
  std::vector<Triangulation> out;
  for (auto& t : enumerate_triangulations(config, region, max_points)) {
    if (regular_heights(config, t)) out.push_back(std::move(t));
  }
  if (cache) cache->store(key, out);
  return out;
}

/// All regular triangulations of the configuration, canonical order.
inline std::vector<Triangulation> enumerate_regular_triangulations(const PointConfiguration& config,
                                                                   TriangulationCache* cache = nullptr,
                                                                   int max_points = kMaxEnumerationPoints) {
  return regular_triangulations_within(config, trivial_subdivision(config), cache, max_points);
}

/// Regular triangulations refining a regular subdivision. With `use_all_points`
/// only triangulations using every point of the subdivision are kept.
inline std::vector<Triangulation> refining_triangulations(const PointConfiguration& config, const Subdivision& subdivision,
                                                          bool use_all_points = true, TriangulationCache* cache = nullptr,
                                                          int max_points = kMaxEnumerationPoints) {
  std::vector<Triangulation> all = regular_triangulations_within(config, subdivision, cache, max_points);
  if (!use_all_points) return all;
  const Cell need = subdivision.used_points();
  std::vector<Triangulation> out;
  for (auto& t : all) {
    if (t.used_points() == need) out.push_back(std::move(t));
  }
  return out;
}

/// Every regular subdivision (all faces of the secondary polytope), canonical order.
/// Each is a coarsening of a regular triangulation obtained by flattening a set of its folds.
inline std::vector<Subdivision> enumerate_regular_subdivisions(const PointConfiguration& config,
                                                               TriangulationCache* cache = nullptr,
                                                               int max_points = kMaxEnumerationPoints) {
  std::vector<Subdivision> found;
  for (const auto& t : enumerate_regular_triangulations(config, cache, max_points)) {
    const ConeSystem sys = secondary_cone_system(config, t);
    const auto walls = interior_walls(config, t);
    const std::size_t nw = walls.size();
    if (nw > 20) throw TooLarge("too many walls to enumerate coarsenings");
    for (std::uint32_t mask = 0; mask < (1u << nw); ++mask) {
      exact::LinearProgram lp(config.size());
      for (const auto& r : sys.equalities) lp.add_constraint(r, exact::Relation::kEqual, 0);
      for (std::size_t k = 0; k < sys.folds.size(); ++k) {
        const bool flat = k < nw && ((mask >> k) & 1u);
        lp.add_constraint(sys.folds[k], flat ? exact::Relation::kEqual : exact::Relation::kGreaterEqual, flat ? 0 : 1);
      }
      if (lp.solve().status == exact::LpStatus::kInfeasible) continue;
      // Merge simplices across flattened walls.
      std::vector<std::size_t> parent(t.size());
      std::iota(parent.begin(), parent.end(), 0);
      std::function<std::size_t(std::size_t)> root = [&](std::size_t x) { return parent[x] == x ? x : parent[x] = root(parent[x]); };
      for (std::size_t k = 0; k < nw; ++k) {
        if ((mask >> k) & 1u) parent[root(walls[k].first)] = root(walls[k].second);
      }
      std::map<std::size_t, Cell> groups;
      for (std::size_t s = 0; s < t.size(); ++s) {
        Cell& g = groups[root(s)];
        g.insert(g.end(), t.cells()[s].begin(), t.cells()[s].end());
      }
      std::vector<Cell> cells;
      for (auto& [r, g] : groups) cells.push_back(std::move(g));
      found.emplace_back(std::move(cells));
    }
  }
  std::sort(found.begin(), found.end());
  found.erase(std::unique(found.begin(), found.end()), found.end());
  return found;
}

}  // namespace tentmle::geometry
