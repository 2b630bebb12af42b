#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "fixtures.hpp"
#include "tentmle/exact.hpp"
#include "tentmle/geometry.hpp"

using namespace tentmle;
using geometry::induced_subdivision;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

/// Tent value as the LP max{ sum l_i y_i : sum l_i x_i = t, l >= 0, sum l_i = 1 } in exact arithmetic.
double tent_by_lp(const PointConfiguration& c, const Eigen::VectorXd& y, const Eigen::RowVectorXd& t) {
  using exact::Rational;
  const int n = c.size();
  exact::LinearProgram lp(n, true);
  for (int k = 0; k < c.dimension(); ++k) {
    std::vector<Rational> row;
    for (int i = 0; i < n; ++i) row.push_back(c.exact_coordinate(i, k));
    lp.add_constraint(row, exact::Relation::kEqual, exact::to_rational(t(k)));
  }
  lp.add_constraint(std::vector<Rational>(static_cast<std::size_t>(n), Rational(1)), exact::Relation::kEqual, 1);
  std::vector<Rational> obj;
  for (int i = 0; i < n; ++i) obj.push_back(exact::to_rational(y(i)));
  lp.set_objective(obj);
  auto sol = lp.solve();
  if (sol.status != exact::LpStatus::kOptimal) return -std::numeric_limits<double>::infinity();
  return exact::to_double(sol.objective);
}

}  // namespace

TEST(Configuration, RejectsInvalidInput) {
  EXPECT_THROW(PointConfiguration::from_rows({{0, 0}, {1, 0}, {0, 0}}), InvalidConfiguration);
  EXPECT_THROW(PointConfiguration::from_rows({{0, 0}, {1, 1}, {2, 2}}), InvalidConfiguration);
  EXPECT_THROW(PointConfiguration::from_rows({{0, 0}, {1, 0}}), InvalidConfiguration);
  EXPECT_THROW(PointConfiguration::from_rows({{0, 0}, {1}}), InvalidConfiguration);
}

TEST(Volume, Examples) {
  auto tri = PointConfiguration::from_rows({{0, 0}, {1, 0}, {0, 1}});
  EXPECT_DOUBLE_EQ(geometry::normalized_volume(tri, {0, 1, 2}), 1.0);
  EXPECT_DOUBLE_EQ(geometry::normalized_volume(fixtures::hexagon(), {0, 1, 2}), 1.0);
  auto seg = PointConfiguration::from_rows({{0}, {3}});
  EXPECT_DOUBLE_EQ(geometry::normalized_volume(seg, {0, 1}), 3.0);
  // Hexagon area is 3, so normalized volume 6.
  EXPECT_NEAR(fixtures::hexagon().hull_volume(), 6.0, 1e-12);
  // Octahedron Euclidean volume 4/3, normalized 8.
  EXPECT_NEAR(fixtures::octahedron().hull_volume(), 8.0, 1e-12);
}

TEST(InducedSubdivision, ConstantHeightsGiveOneCell) {
  auto c = fixtures::six_points();
  auto s = induced_subdivision(c, Eigen::VectorXd::Constant(6, 2.5));
  ASSERT_EQ(s.size(), 1u);
  EXPECT_EQ(s.cells()[0], (Cell{0, 1, 2, 3, 4, 5}));
}

TEST(InducedSubdivision, SquareDiagonal) {
  auto s = induced_subdivision(fixtures::square(), vec({1, 0, 1, 0}));
  EXPECT_EQ(s, Subdivision::from_labels({{1, 2, 3}, {1, 3, 4}}));
  auto t = induced_subdivision(fixtures::square(), vec({0, 1, 0, 1}));
  EXPECT_EQ(t, Subdivision::from_labels({{1, 2, 4}, {2, 3, 4}}));
}

TEST(InducedSubdivision, HexagonFan) {
  auto s = induced_subdivision(fixtures::hexagon(), vec({1, 0, 0, 0, 0, 0}));
  EXPECT_EQ(s, Subdivision::from_labels({{1, 2, 3}, {1, 3, 4}, {1, 4, 5}, {1, 5, 6}}));
  // Every cell carries an affine piece that dominates all lifted points.
  auto c = fixtures::hexagon();
  Eigen::VectorXd y = vec({1, 0, 0, 0, 0, 0});
  for (const auto& cell : s.cells()) {
    auto lambda_ok = [&](Index j) {
      return geometry::tent_value(c, y, c.point(j)) >= y(j) - 1e-12;
    };
    for (Index j : cell) EXPECT_TRUE(lambda_ok(j));
  }
}

TEST(InducedSubdivision, PointsBelowTentAreDropped) {
  auto c = PointConfiguration::from_rows({{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0.5, 0.5}});
  auto s = induced_subdivision(c, vec({0, 0, 0, 0, -3}));
  EXPECT_EQ(s, Subdivision::from_labels({{1, 2, 3, 4}}));
}

TEST(InducedSubdivision, AffineInvariantAndCoversHull) {
  std::mt19937_64 gen(11);
  for (int trial = 0; trial < 60; ++trial) {
    const int d = 1 + trial % 3;
    const int n = d + 2 + trial % 5;
    auto c = fixtures::random_config(gen, n, d);
    Eigen::VectorXd y = fixtures::random_heights(gen, n);
    auto s = induced_subdivision(c, y);
    Eigen::VectorXd a = fixtures::random_heights(gen, d);
    Eigen::VectorXd shifted = y + c.points() * a + Eigen::VectorXd::Constant(n, 0.7);
    EXPECT_EQ(induced_subdivision(c, shifted), s);
    double vol = 0.0;
    for (const auto& cell : s.cells()) vol += geometry::cell_volume(c, cell);
    EXPECT_NEAR(vol, c.hull_volume(), 1e-9 * c.hull_volume());
  }
}

TEST(TentValue, Examples) {
  auto c = fixtures::square();
  Eigen::VectorXd y = vec({1, 0, 1, 0});
  Eigen::RowVectorXd t(2);
  t << 0.5, 0.5;
  EXPECT_NEAR(geometry::tent_value(c, y, t), 1.0, 1e-12);
  t << 2.0, 0.5;
  EXPECT_EQ(geometry::tent_value(c, y, t), -std::numeric_limits<double>::infinity());
  for (Index i = 0; i < 4; ++i) EXPECT_NEAR(geometry::tent_value(c, y, c.point(i)), y(i), 1e-12);
}

TEST(TentValue, MatchesExactLp) {
  std::mt19937_64 gen(5);
  for (int trial = 0; trial < 20; ++trial) {
    const int d = 1 + trial % 3;
    auto c = fixtures::random_config(gen, d + 4, d);
    Eigen::VectorXd y = fixtures::random_heights(gen, d + 4);
    for (int k = 0; k < 10; ++k) {
      double box = 0.0;
      Eigen::RowVectorXd t = fixtures::box_sample(gen, c, box);
      const double expect = tent_by_lp(c, y, t);
      const double got = geometry::tent_value(c, y, t);
      if (std::isinf(expect)) {
        EXPECT_TRUE(std::isinf(got));
      } else {
        EXPECT_NEAR(got, expect, 1e-9);
      }
    }
  }
}

TEST(Relevance, Examples) {
  auto line = PointConfiguration::from_rows({{0}, {1}, {2}});
  EXPECT_TRUE(geometry::is_relevant(line, vec({0, 1, 0})));
  EXPECT_FALSE(geometry::is_relevant(line, vec({0, -5, 0})));
  Eigen::VectorXd fixed = geometry::make_relevant(line, vec({0, -5, 0}));
  EXPECT_NEAR((fixed - vec({0, 0, 0})).cwiseAbs().maxCoeff(), 0.0, 1e-15);

  auto c = PointConfiguration::from_rows({{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0.5, 0.5}});
  EXPECT_TRUE(geometry::is_relevant(c, Eigen::VectorXd::Constant(5, 1.0)));
  Eigen::VectorXd y = vec({1, 0, 1, 0, -4});
  EXPECT_FALSE(geometry::is_relevant(c, y));
  Eigen::VectorXd r = geometry::make_relevant(c, y);
  EXPECT_NEAR(r(4), geometry::tent_value(c, y, c.point(4)), 1e-12);
  EXPECT_NEAR(r(4), 1.0, 1e-12);
  EXPECT_TRUE(geometry::is_relevant(c, r));
  EXPECT_EQ(geometry::make_relevant(c, r), r);
}

TEST(Gkz, SquareAndHexagon) {
  auto z = geometry::gkz_vector(fixtures::square(), Subdivision::from_labels({{1, 2, 3}, {1, 3, 4}}));
  EXPECT_EQ(z, vec({2, 1, 2, 1}));
  auto h = fixtures::hexagon();
  auto t = Subdivision::from_labels({{1, 2, 3}, {1, 3, 4}, {1, 4, 5}, {1, 5, 6}});
  auto zh = geometry::gkz_vector(h, t);
  auto v = [&](int a, int b, int c) { return geometry::normalized_volume(h, {a - 1, b - 1, c - 1}); };
  Eigen::VectorXd expect(6);
  expect << v(1, 2, 3) + v(1, 3, 4) + v(1, 4, 5) + v(1, 5, 6), v(1, 2, 3), v(1, 2, 3) + v(1, 3, 4),
      v(1, 3, 4) + v(1, 4, 5), v(1, 4, 5) + v(1, 5, 6), v(1, 5, 6);
  EXPECT_EQ(zh, expect);
  EXPECT_NEAR(zh.sum(), 3.0 * h.hull_volume(), 1e-12);
}

TEST(Gkz, LinearIntegralMatchesMonteCarlo) {
  // (d+1)! ∫_P h = z·y for y in the secondary cone of the triangulation.
  std::mt19937_64 gen(3);
  for (int trial = 0; trial < 6; ++trial) {
    const int d = 1 + trial % 3;
    const int n = d + 3;
    auto c = fixtures::random_config(gen, n, d);
    Eigen::VectorXd y = fixtures::random_heights(gen, n);
    auto t = geometry::refine_to_triangulation(c, induced_subdivision(c, y));
    double fact = 1.0;
    for (int k = 2; k <= d + 1; ++k) fact *= k;
    const double expect = geometry::gkz_vector(c, t).dot(y) / fact;
    const int samples = 40000;
    const geometry::Tent tent(c, y);
    double sum = 0.0, sum2 = 0.0, box = 0.0;
    for (int s = 0; s < samples; ++s) {
      Eigen::RowVectorXd p = fixtures::box_sample(gen, c, box);
      const double h = tent(p);
      const double v = std::isinf(h) ? 0.0 : h;
      sum += v;
      sum2 += v * v;
    }
    const double mean = sum / samples;
    const double se = std::sqrt((sum2 / samples - mean * mean) / samples);
    EXPECT_NEAR(mean * box, expect, 4.0 * se * box + 1e-12) << "trial " << trial;
  }
}

TEST(SecondaryCone, SquareExamples) {
  auto c = fixtures::square();
  Eigen::VectorXd y = vec({1, 0, 1, 0});
  EXPECT_TRUE(geometry::secondary_cone_contains(c, Subdivision::from_labels({{1, 2, 3}, {1, 3, 4}}), y));
  EXPECT_FALSE(geometry::secondary_cone_contains(c, Subdivision::from_labels({{1, 2, 4}, {2, 3, 4}}), y));
  EXPECT_TRUE(geometry::secondary_cone_contains(c, Subdivision::from_labels({{1, 2, 4}, {2, 3, 4}}),
                                                Eigen::VectorXd::Constant(4, -1.0)));
}

TEST(Walls, FoldSignsDetectConcavity) {
  auto c = fixtures::square();
  auto s = Subdivision::from_labels({{1, 2, 3}, {1, 3, 4}});
  auto walls = geometry::interior_walls(c, s);
  ASSERT_EQ(walls.size(), 1u);
  EXPECT_EQ(walls[0].shared, (Cell{0, 2}));
  Eigen::VectorXd f = geometry::fold_functional(c, walls[0]);
  EXPECT_GT(f.dot(vec({1, 0, 1, 0})), 0.0);
  EXPECT_LT(f.dot(vec({0, 1, 0, 1})), 0.0);
  EXPECT_NEAR(f.dot(Eigen::VectorXd::Ones(4)), 0.0, 1e-15);
  // Heights affine on both triangles form a 4-dim space (no coplanarity constraint).
  EXPECT_EQ(geometry::stratum_basis(c, s).cols(), 4);
  EXPECT_EQ(geometry::stratum_basis(c, Subdivision::from_labels({{1, 2, 3, 4}})).cols(), 3);
}
