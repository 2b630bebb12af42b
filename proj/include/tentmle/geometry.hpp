#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "tentmle/errors.hpp"
#include "tentmle/exact.hpp"

namespace tentmle {

/// Zero-based point index. File formats and printed keys use 1-based labels.
using Index = int;
/// Sorted list of point indices.
using Cell = std::vector<Index>;
using HeightVector = Eigen::VectorXd;

/// Coplanarity threshold for lifted facets, relative to the height scale.
inline constexpr double kFlatTolerance = 1e-9;

namespace detail {

/// Calls fn(combination) for every k-subset of {0..n-1} in lexicographic order.
template <typename Fn>
void for_each_combination(int n, int k, Fn&& fn) {
  if (k < 0 || k > n) return;
  std::vector<Index> c(static_cast<std::size_t>(k));
  std::iota(c.begin(), c.end(), 0);
  for (;;) {
    fn(static_cast<const std::vector<Index>&>(c));
    int i = k - 1;
    while (i >= 0 && c[static_cast<std::size_t>(i)] == n - k + i) --i;
    if (i < 0) return;
    ++c[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < k; ++j) c[static_cast<std::size_t>(j)] = c[static_cast<std::size_t>(j - 1)] + 1;
  }
}

inline bool is_sorted_unique(const Cell& c) {
  return std::adjacent_find(c.begin(), c.end(), std::greater_equal<>()) == c.end();
}

inline Cell set_intersection(const Cell& a, const Cell& b) {
  Cell out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

inline bool is_subset(const Cell& small, const Cell& big) {
  return std::includes(big.begin(), big.end(), small.begin(), small.end());
}

/// Deterministic pseudo-random value in [0,1) for generic perturbations.
inline double jitter(std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = a * 0x9E3779B97F4A7C15ull + b * 0xD1B54A32D192ED03ull + 0x632BE59BD9B4E019ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  z ^= z >> 31;
  return static_cast<double>(z >> 11) * 0x1.0p-53;
}

}  // namespace detail

/// Labeled distinct points x_1..x_n spanning R^d. Immutable after construction.
class PointConfiguration {
 public:
  PointConfiguration() = default;

  /// `points` is n x d, one point per row.
  explicit PointConfiguration(Eigen::MatrixXd points, std::vector<std::string> labels = {})
      : points_(std::move(points)), labels_(std::move(labels)) {
    validate();
    compute_hull_volume();
  }

  static PointConfiguration from_rows(const std::vector<std::vector<double>>& rows,
                                      std::vector<std::string> labels = {}) {
    if (rows.empty() || rows.front().empty()) throw InvalidConfiguration("configuration has no points");
    const auto d = static_cast<Eigen::Index>(rows.front().size());
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), d);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (static_cast<Eigen::Index>(rows[i].size()) != d) {
        throw InvalidConfiguration("point " + std::to_string(i + 1) + " has the wrong dimension");
      }
      for (Eigen::Index k = 0; k < d; ++k) m(static_cast<Eigen::Index>(i), k) = rows[i][static_cast<std::size_t>(k)];
    }
    return PointConfiguration(std::move(m), std::move(labels));
  }

  int size() const { return static_cast<int>(points_.rows()); }
  int dimension() const { return static_cast<int>(points_.cols()); }
  const Eigen::MatrixXd& points() const { return points_; }
  auto point(Index i) const { return points_.row(i); }
  const std::vector<std::string>& labels() const { return labels_; }

  /// Normalized volume (d! times Euclidean volume) of conv(X).
  double hull_volume() const { return hull_volume_; }
  /// Largest coordinate extent; the length scale for degeneracy thresholds.
  double length_scale() const { return length_scale_; }

  exact::Rational exact_coordinate(Index i, int k) const { return exact::to_rational(points_(i, k)); }

  /// Configuration restricted to the given indices (used for sub-configurations in tests).
  PointConfiguration subset(const Cell& indices) const {
    Eigen::MatrixXd m(static_cast<Eigen::Index>(indices.size()), points_.cols());
    for (std::size_t r = 0; r < indices.size(); ++r) m.row(static_cast<Eigen::Index>(r)) = points_.row(indices[r]);
    return PointConfiguration(std::move(m));
  }

 private:
  void validate();
  void compute_hull_volume();

  Eigen::MatrixXd points_;
  std::vector<std::string> labels_;
  double hull_volume_ = 0.0;
  double length_scale_ = 1.0;
};

/// Canonical list of cells: each cell sorted, cells sorted lexicographically.
class Subdivision {
 public:
  Subdivision() = default;
  explicit Subdivision(std::vector<Cell> cells) : cells_(std::move(cells)) { canonicalize(); }

  /// Builds from 1-based labels as written in files and in the literature.
  static Subdivision from_labels(const std::vector<std::vector<int>>& labels) {
    std::vector<Cell> cells;
    cells.reserve(labels.size());
    for (const auto& l : labels) {
      Cell c;
      for (int v : l) {
        if (v < 1) throw DimensionMismatch("subdivision labels are 1-based");
        c.push_back(v - 1);
      }
      cells.push_back(std::move(c));
    }
    return Subdivision(std::move(cells));
  }

  const std::vector<Cell>& cells() const { return cells_; }
  std::size_t size() const { return cells_.size(); }
  bool empty() const { return cells_.empty(); }

  std::vector<std::vector<int>> labels() const {
    std::vector<std::vector<int>> out;
    for (const auto& c : cells_) {
      std::vector<int> l;
      for (Index v : c) l.push_back(v + 1);
      out.push_back(std::move(l));
    }
    return out;
  }

  /// True when every cell has exactly d+1 points.
  bool is_triangulation(int d) const {
    return std::all_of(cells_.begin(), cells_.end(), [d](const Cell& c) { return static_cast<int>(c.size()) == d + 1; });
  }

  /// Sorted union of the cells.
  Cell used_points() const {
    Cell all;
    for (const auto& c : cells_) all.insert(all.end(), c.begin(), c.end());
    std::sort(all.begin(), all.end());
    all.erase(std::unique(all.begin(), all.end()), all.end());
    return all;
  }

  /// True when every cell of *this lies inside some cell of `coarser`.
  bool refines(const Subdivision& coarser) const {
    return std::all_of(cells_.begin(), cells_.end(), [&](const Cell& c) {
      return std::any_of(coarser.cells_.begin(), coarser.cells_.end(),
                         [&](const Cell& big) { return detail::is_subset(c, big); });
    });
  }

  /// Compact 1-based rendering, e.g. "124 245 235 1345" for single-digit labels.
  std::string to_string() const {
    std::ostringstream os;
    bool wide = false;
    for (const auto& c : cells_) {
      for (Index v : c) wide = wide || v + 1 >= 10;
    }
    for (std::size_t i = 0; i < cells_.size(); ++i) {
      if (i) os << ' ';
      if (wide) os << '[';
      for (std::size_t j = 0; j < cells_[i].size(); ++j) {
        if (wide && j) os << ',';
        os << cells_[i][j] + 1;
      }
      if (wide) os << ']';
    }
    return os.str();
  }

  friend bool operator==(const Subdivision& a, const Subdivision& b) { return a.cells_ == b.cells_; }
  friend bool operator<(const Subdivision& a, const Subdivision& b) { return a.cells_ < b.cells_; }

 private:
  void canonicalize() {
    for (auto& c : cells_) {
      std::sort(c.begin(), c.end());
      c.erase(std::unique(c.begin(), c.end()), c.end());
    }
    std::sort(cells_.begin(), cells_.end());
    cells_.erase(std::unique(cells_.begin(), cells_.end()), cells_.end());
  }

  std::vector<Cell> cells_;
};

/// A subdivision all of whose cells are d-simplices.
using Triangulation = Subdivision;

inline std::ostream& operator<<(std::ostream& os, const Subdivision& s) { return os << s.to_string(); }

namespace geometry {

/// |det| of the (d+1)x(d+1) matrix with a row of ones over the point columns.
inline double normalized_volume(const PointConfiguration& config, const Cell& simplex) {
  const int d = config.dimension();
  if (static_cast<int>(simplex.size()) != d + 1) {
    throw DimensionMismatch("a simplex needs d+1 vertices");
  }
  Eigen::MatrixXd m(d + 1, d + 1);
  for (int j = 0; j <= d; ++j) {
    const Index v = simplex[static_cast<std::size_t>(j)];
    if (v < 0 || v >= config.size()) throw DimensionMismatch("simplex index out of range");
    m(0, j) = 1.0;
    for (int k = 0; k < d; ++k) m(k + 1, j) = config.points()(v, k);
  }
  return std::abs(m.determinant());
}

/// Affine function t -> slope·t + offset.
struct AffineFunction {
  Eigen::VectorXd slope;
  double offset = 0.0;
  double operator()(const Eigen::Ref<const Eigen::RowVectorXd>& t) const { return t.dot(slope) + offset; }
};

namespace detail {

/// Affine interpolant of the lifted vertices of a simplex, or nullopt if degenerate.
inline std::optional<AffineFunction> affine_through(const PointConfiguration& config, const Cell& simplex,
                                                    const Eigen::Ref<const Eigen::VectorXd>& heights) {
  const int d = config.dimension();
  Eigen::MatrixXd m(d + 1, d + 1);
  Eigen::VectorXd rhs(d + 1);
  for (int r = 0; r <= d; ++r) {
    const Index v = simplex[static_cast<std::size_t>(r)];
    m.block(r, 0, 1, d) = config.point(v);
    m(r, d) = 1.0;
    rhs(r) = heights(v);
  }
  const double scale = config.length_scale();
  const double det = m.determinant();
  if (!(std::abs(det) > 1e-12 * std::pow(scale, d))) return std::nullopt;
  Eigen::VectorXd sol = m.partialPivLu().solve(rhs);
  return AffineFunction{sol.head(d), sol(d)};
}

/// Cells of the upper hull of {(x_i, h_i) : i in points}, brute force over simplices.
/// Each cell lists every point of `points` lying on the facet plane within tolerance.
inline std::vector<Cell> upper_cells(const PointConfiguration& config, const Cell& points,
                                     const Eigen::Ref<const Eigen::VectorXd>& heights) {
  const int d = config.dimension();
  double hscale = 1.0;
  for (Index i : points) hscale = std::max(hscale, std::abs(heights(i)));
  const double tol = kFlatTolerance * hscale;
  std::vector<Cell> cells;
  Cell simplex(static_cast<std::size_t>(d + 1));
  ::tentmle::detail::for_each_combination(static_cast<int>(points.size()), d + 1, [&](const std::vector<Index>& comb) {
    for (int j = 0; j <= d; ++j) simplex[static_cast<std::size_t>(j)] = points[static_cast<std::size_t>(comb[static_cast<std::size_t>(j)])];
    // Skip simplices already inside a found cell: same plane, same cell.
    for (const auto& c : cells) {
      if (::tentmle::detail::is_subset(simplex, c)) return;
    }
    auto f = affine_through(config, simplex, heights);
    if (!f) return;
    Cell on;
    for (Index j : points) {
      const double gap = heights(j) - (*f)(config.point(j));
      if (gap > tol) return;
      if (gap >= -tol) on.push_back(j);
    }
    cells.push_back(std::move(on));
  });
  std::sort(cells.begin(), cells.end());
  cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
  return cells;
}

/// Generic concave lift used to triangulate cells; `attempt` varies the tie-breaking.
inline Eigen::VectorXd generic_lift(const PointConfiguration& config, int attempt) {
  const int n = config.size();
  const Eigen::RowVectorXd center = config.points().colwise().mean();
  const double s = config.length_scale();
  Eigen::VectorXd q(n);
  for (Index i = 0; i < n; ++i) {
    q(i) = -(config.point(i) - center).squaredNorm() / (s * s) +
           1e-3 * ::tentmle::detail::jitter(static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(attempt));
  }
  return q;
}

}  // namespace detail

/// Triangulates each cell with a common generic lift, so shared faces agree.
/// The result refines `subdivision`; each cell is a d-simplex.
inline Triangulation refine_to_triangulation(const PointConfiguration& config, const Subdivision& subdivision) {
  const int d = config.dimension();
  for (int attempt = 0; attempt < 16; ++attempt) {
    const Eigen::VectorXd q = detail::generic_lift(config, attempt);
    std::vector<Cell> simplices;
    bool ok = true;
    for (const auto& cell : subdivision.cells()) {
      if (static_cast<int>(cell.size()) == d + 1) {
        simplices.push_back(cell);
        continue;
      }
      for (auto& s : detail::upper_cells(config, cell, q)) {
        if (static_cast<int>(s.size()) != d + 1) {
          ok = false;
          break;
        }
        simplices.push_back(std::move(s));
      }
      if (!ok) break;
    }
    if (ok) return Triangulation(std::move(simplices));
  }
  throw HullDegenerate("could not triangulate subdivision cells with a generic lift");
}

/// Normalized volume of conv(cell).
inline double cell_volume(const PointConfiguration& config, const Cell& cell) {
  const int d = config.dimension();
  if (static_cast<int>(cell.size()) == d + 1) return normalized_volume(config, cell);
  double v = 0.0;
  const Triangulation t = refine_to_triangulation(config, Subdivision({cell}));
  for (const auto& s : t.cells()) v += normalized_volume(config, s);
  return v;
}

}  // namespace geometry

inline void PointConfiguration::validate() {
  const int n = size();
  const int d = dimension();
  if (d < 1) throw InvalidConfiguration("dimension must be at least 1");
  if (n < d + 1) throw InvalidConfiguration("need at least d+1 points");
  if (!labels_.empty() && static_cast<int>(labels_.size()) != n) {
    throw InvalidConfiguration("label count does not match point count");
  }
  if (!points_.allFinite()) throw InvalidConfiguration("coordinates must be finite");
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      if (points_.row(i) == points_.row(j)) {
        throw InvalidConfiguration("points " + std::to_string(i + 1) + " and " + std::to_string(j + 1) + " coincide");
      }
    }
  }
  const Eigen::MatrixXd centered = points_.rowwise() - points_.colwise().mean();
  length_scale_ = std::max(centered.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
  Eigen::FullPivLU<Eigen::MatrixXd> lu(centered / length_scale_);
  lu.setThreshold(1e-10);
  if (lu.rank() != d) throw InvalidConfiguration("points do not affinely span R^d");
}

inline void PointConfiguration::compute_hull_volume() {
  Cell all(static_cast<std::size_t>(size()));
  std::iota(all.begin(), all.end(), 0);
  hull_volume_ = 0.0;
  const Triangulation t = geometry::refine_to_triangulation(*this, Subdivision({all}));
  for (const auto& s : t.cells()) {
    hull_volume_ += geometry::normalized_volume(*this, s);
  }
}

namespace geometry {

inline void check_heights(const PointConfiguration& config, const Eigen::Ref<const Eigen::VectorXd>& heights) {
  if (heights.size() != config.size()) {
    throw DimensionMismatch("height vector has " + std::to_string(heights.size()) + " entries, configuration has " +
                            std::to_string(config.size()) + " points");
  }
  if (!heights.allFinite()) throw DimensionMismatch("heights must be finite");
}

/// Regions of linearity of the tent function, with a matching triangulation.
struct LiftedHull {
  Subdivision subdivision;
  Triangulation refinement;
};

/// Upper hull of the lifted points, projected; plus a refining triangulation.
inline LiftedHull lifted_hull(const PointConfiguration& config, const Eigen::Ref<const Eigen::VectorXd>& heights) {
  check_heights(config, heights);
  Cell all(static_cast<std::size_t>(config.size()));
  std::iota(all.begin(), all.end(), 0);
  LiftedHull out;
  out.subdivision = Subdivision(detail::upper_cells(config, all, heights));
  out.refinement = refine_to_triangulation(config, out.subdivision);
  double total = 0.0;
  for (const auto& s : out.refinement.cells()) total += normalized_volume(config, s);
  if (!(std::abs(total - config.hull_volume()) <= 1e-9 * config.hull_volume())) {
    throw HullDegenerate("lifted hull cells cover volume " + std::to_string(total) + " instead of " +
                         std::to_string(config.hull_volume()));
  }
  return out;
}

/// Regular subdivision induced by the heights (coplanar facets merged).
inline Subdivision induced_subdivision(const PointConfiguration& config, const Eigen::Ref<const Eigen::VectorXd>& heights) {
  return lifted_hull(config, heights).subdivision;
}

/// Barycentric coordinates of t with respect to a simplex (may be negative outside).
inline Eigen::VectorXd barycentric(const PointConfiguration& config, const Cell& simplex,
                                   const Eigen::Ref<const Eigen::RowVectorXd>& t) {
  const int d = config.dimension();
  Eigen::MatrixXd m(d + 1, d + 1);
  Eigen::VectorXd rhs(d + 1);
  for (int j = 0; j <= d; ++j) {
    m(0, j) = 1.0;
    for (int k = 0; k < d; ++k) m(k + 1, j) = config.points()(simplex[static_cast<std::size_t>(j)], k);
  }
  rhs(0) = 1.0;
  rhs.tail(d) = t.transpose();
  return m.partialPivLu().solve(rhs);
}

/// Exact barycentric coordinates of a configuration point (or nullopt for a degenerate simplex).
inline std::optional<std::vector<exact::Rational>> exact_barycentric(const PointConfiguration& config, const Cell& simplex,
                                                                     Index point) {
  const int d = config.dimension();
  exact::RationalMatrix m(static_cast<std::size_t>(d + 1), std::vector<exact::Rational>(static_cast<std::size_t>(d + 1)));
  std::vector<exact::Rational> rhs(static_cast<std::size_t>(d + 1));
  for (int j = 0; j <= d; ++j) {
    m[0][static_cast<std::size_t>(j)] = 1;
    for (int k = 0; k < d; ++k) {
      m[static_cast<std::size_t>(k + 1)][static_cast<std::size_t>(j)] = config.exact_coordinate(simplex[static_cast<std::size_t>(j)], k);
    }
  }
  rhs[0] = 1;
  for (int k = 0; k < d; ++k) rhs[static_cast<std::size_t>(k + 1)] = config.exact_coordinate(point, k);
  return exact::solve(std::move(m), std::move(rhs));
}

/// The tent function h_{X,y} with its hull precomputed for repeated evaluation.
class Tent {
 public:
  Tent(const PointConfiguration& config, const Eigen::Ref<const Eigen::VectorXd>& heights)
      : config_(&config), heights_(heights), hull_(lifted_hull(config, heights)) {}

  /// h_{X,y}(t), or -infinity outside conv(X).
  double operator()(const Eigen::Ref<const Eigen::RowVectorXd>& t) const {
    if (t.size() != config_->dimension()) throw DimensionMismatch("query point has the wrong dimension");
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& s : hull_.refinement.cells()) {
      const Eigen::VectorXd lambda = barycentric(*config_, s, t);
      if (lambda.minCoeff() < -1e-12) continue;
      double v = 0.0;
      for (std::size_t j = 0; j < s.size(); ++j) v += lambda(static_cast<Eigen::Index>(j)) * heights_(s[j]);
      best = std::max(best, v);
    }
    return best;
  }

  const LiftedHull& hull() const { return hull_; }

 private:
  const PointConfiguration* config_;
  Eigen::VectorXd heights_;
  LiftedHull hull_;
};

/// h_{X,y}(t): the tent value, or -infinity outside conv(X).
inline double tent_value(const PointConfiguration& config, const Eigen::Ref<const Eigen::VectorXd>& heights,
                         const Eigen::Ref<const Eigen::RowVectorXd>& t) {
  return Tent(config, heights)(t);
}

/// True iff every lifted point touches the tent (within the flat tolerance).
inline bool is_relevant(const PointConfiguration& config, const Eigen::Ref<const Eigen::VectorXd>& heights) {
  return static_cast<int>(induced_subdivision(config, heights).used_points().size()) == config.size();
}

/// Raises every point below the tent onto the tent: y'_i = h_{X,y}(x_i).
inline HeightVector make_relevant(const PointConfiguration& config, const Eigen::Ref<const Eigen::VectorXd>& heights) {
  const Tent tent(config, heights);
  const Cell used = tent.hull().subdivision.used_points();
  HeightVector out = heights;
  for (Index i = 0; i < config.size(); ++i) {
    if (!std::binary_search(used.begin(), used.end(), i)) out(i) = tent(config.point(i));
  }
  return out;
}

/// z^Δ_k = sum of normalized volumes of the simplices containing point k.
inline Eigen::VectorXd gkz_vector(const PointConfiguration& config, const Triangulation& triangulation) {
  if (!triangulation.is_triangulation(config.dimension())) throw DimensionMismatch("GKZ vector needs a triangulation");
  Eigen::VectorXd z = Eigen::VectorXd::Zero(config.size());
  for (const auto& s : triangulation.cells()) {
    const double v = normalized_volume(config, s);
    for (Index k : s) z(k) += v;
  }
  return z;
}

/// Picks d+1 affinely independent points of a cell (greedy, largest volume first found).
inline Cell affine_basis(const PointConfiguration& config, const Cell& cell) {
  const int d = config.dimension();
  if (static_cast<int>(cell.size()) == d + 1) return cell;
  Cell best;
  double best_vol = 0.0;
  ::tentmle::detail::for_each_combination(static_cast<int>(cell.size()), d + 1, [&](const std::vector<Index>& comb) {
    Cell s;
    for (Index c : comb) s.push_back(cell[static_cast<std::size_t>(c)]);
    const double v = normalized_volume(config, s);
    if (v > best_vol) {
      best_vol = v;
      best = std::move(s);
    }
  });
  if (best.empty()) throw HullDegenerate("cell is not full-dimensional");
  return best;
}

/// A codimension-one face shared by two cells together with its fold functional.
///
/// fold·y is the height by which the affine piece of `first` (extended across the
/// wall) exceeds y at a point of `second`. The tent is concave across the wall iff
/// fold·y >= 0, and the wall is a genuine fold iff fold·y > 0.
struct Wall {
  std::size_t first = 0;
  std::size_t second = 0;
  Cell shared;
  Index witness = -1;  // a point of `second` not in `first`
  Cell base;           // affine basis of `first`
};

/// Affine rank of a point set (dimension of its affine hull).
inline int affine_rank(const PointConfiguration& config, const Cell& pts) {
  if (pts.size() <= 1) return 0;
  const int d = config.dimension();
  Eigen::MatrixXd m(static_cast<Eigen::Index>(pts.size() - 1), d);
  for (std::size_t r = 1; r < pts.size(); ++r) m.row(static_cast<Eigen::Index>(r - 1)) = config.point(pts[r]) - config.point(pts[0]);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(m / config.length_scale());
  lu.setThreshold(1e-10);
  return static_cast<int>(lu.rank());
}

/// Interior walls of a subdivision: pairs of cells meeting in a (d-1)-dimensional face.
inline std::vector<Wall> interior_walls(const PointConfiguration& config, const Subdivision& subdivision) {
  const int d = config.dimension();
  std::vector<Wall> walls;
  const auto& cells = subdivision.cells();
  std::vector<Cell> bases;
  for (const auto& c : cells) bases.push_back(affine_basis(config, c));
  for (std::size_t a = 0; a < cells.size(); ++a) {
    for (std::size_t b = a + 1; b < cells.size(); ++b) {
      Cell shared = ::tentmle::detail::set_intersection(cells[a], cells[b]);
      if (static_cast<int>(shared.size()) < d || affine_rank(config, shared) != d - 1) continue;
      Wall w;
      w.first = a;
      w.second = b;
      w.shared = std::move(shared);
      w.base = bases[a];
      for (Index v : cells[b]) {
        if (!std::binary_search(cells[a].begin(), cells[a].end(), v)) {
          w.witness = v;
          break;
        }
      }
      walls.push_back(std::move(w));
    }
  }
  return walls;
}

/// Dense fold functional of a wall: fold(y) = sum_j lambda_j y_{base_j} - y_witness.
inline Eigen::VectorXd fold_functional(const PointConfiguration& config, const Wall& wall) {
  Eigen::VectorXd f = Eigen::VectorXd::Zero(config.size());
  const Eigen::VectorXd lambda = barycentric(config, wall.base, config.point(wall.witness));
  for (std::size_t j = 0; j < wall.base.size(); ++j) f(wall.base[j]) += lambda(static_cast<Eigen::Index>(j));
  f(wall.witness) -= 1.0;
  return f;
}

/// Rows of the linear system whose solutions are the heights that are affine on every cell.
inline Eigen::MatrixXd coplanarity_constraints(const PointConfiguration& config, const Subdivision& subdivision) {
  std::vector<Eigen::VectorXd> rows;
  for (const auto& cell : subdivision.cells()) {
    const Cell base = affine_basis(config, cell);
    for (Index j : cell) {
      if (std::binary_search(base.begin(), base.end(), j)) continue;
      Eigen::VectorXd r = Eigen::VectorXd::Zero(config.size());
      const Eigen::VectorXd lambda = barycentric(config, base, config.point(j));
      for (std::size_t k = 0; k < base.size(); ++k) r(base[k]) += lambda(static_cast<Eigen::Index>(k));
      r(j) -= 1.0;
      rows.push_back(std::move(r));
    }
  }
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), config.size());
  for (std::size_t i = 0; i < rows.size(); ++i) m.row(static_cast<Eigen::Index>(i)) = rows[i].transpose();
  return m;
}

/// Orthonormal basis (columns) of the heights that are affine on every cell of the subdivision.
inline Eigen::MatrixXd stratum_basis(const PointConfiguration& config, const Subdivision& subdivision) {
  const Eigen::MatrixXd e = coplanarity_constraints(config, subdivision);
  const int n = config.size();
  if (e.rows() == 0) return Eigen::MatrixXd::Identity(n, n);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(e, Eigen::ComputeFullV);
  const Eigen::VectorXd sv = svd.singularValues();
  const double cutoff = 1e-10 * std::max(1.0, sv.size() ? sv(0) : 0.0);
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) rank += sv(i) > cutoff ? 1 : 0;
  return svd.matrixV().rightCols(n - rank);
}

/// True iff the tent of `heights` is affine on every cell of the triangulation.
inline bool secondary_cone_contains(const PointConfiguration& config, const Triangulation& triangulation,
                                    const Eigen::Ref<const Eigen::VectorXd>& heights) {
  return triangulation.refines(induced_subdivision(config, heights));
}

}  // namespace geometry
}  // namespace tentmle
