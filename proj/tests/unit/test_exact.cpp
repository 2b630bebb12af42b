#include <gtest/gtest.h>

#include <random>

#include "tentmle/exact.hpp"

using tentmle::exact::LinearProgram;
using tentmle::exact::LpStatus;
using tentmle::exact::Rational;
using tentmle::exact::RationalMatrix;
using tentmle::exact::Relation;

TEST(Exact, DoubleToRationalIsExact) {
  const double v = 0.1;
  const Rational r = tentmle::exact::to_rational(v);
  EXPECT_EQ(r.get_den(), mpz_class(1) << 55);
  EXPECT_EQ(tentmle::exact::to_double(r), v);
}

TEST(Exact, DeterminantMatchesCofactorExpansion) {
  RationalMatrix m{{2, 0, 1}, {1, 3, 2}, {1, 1, 1}};
  // 2(3-2) - 0 + 1(1-3) = 0
  EXPECT_EQ(tentmle::exact::determinant(m), 0);
  RationalMatrix a{{Rational(1, 2), 3}, {4, 5}};
  EXPECT_EQ(tentmle::exact::determinant(a), Rational(5, 2) - 12);
}

TEST(Exact, SolveAndRank) {
  RationalMatrix a{{1, 2}, {3, 4}};
  auto x = tentmle::exact::solve(a, {5, 6});
  ASSERT_TRUE(x.has_value());
  EXPECT_EQ((*x)[0], -4);
  EXPECT_EQ((*x)[1], Rational(9, 2));
  RationalMatrix s{{1, 2}, {2, 4}};
  EXPECT_FALSE(tentmle::exact::solve(s, {1, 1}).has_value());
  EXPECT_EQ(tentmle::exact::rank(s), 1);
}

TEST(Exact, LpOptimumAtVertex) {
  // max x + y s.t. x + 2y <= 4, 3x + y <= 6, x,y >= 0 -> (8/5, 6/5).
  LinearProgram lp(2, true);
  lp.add_constraint({1, 2}, Relation::kLessEqual, 4);
  lp.add_constraint({3, 1}, Relation::kLessEqual, 6);
  lp.set_objective({1, 1});
  auto sol = lp.solve();
  ASSERT_EQ(sol.status, LpStatus::kOptimal);
  EXPECT_EQ(sol.x[0], Rational(8, 5));
  EXPECT_EQ(sol.x[1], Rational(6, 5));
  EXPECT_EQ(sol.objective, Rational(14, 5));
}

TEST(Exact, LpInfeasibleAndUnbounded) {
  LinearProgram bad(1);
  bad.add_constraint({1}, Relation::kGreaterEqual, 2);
  bad.add_constraint({1}, Relation::kLessEqual, 1);
  EXPECT_EQ(bad.solve().status, LpStatus::kInfeasible);

  LinearProgram open(2);
  open.add_constraint({1, -1}, Relation::kEqual, 0);
  open.set_objective({1, 0});
  EXPECT_EQ(open.solve().status, LpStatus::kUnbounded);
}

TEST(Exact, LpMatchesVertexEnumeration) {
  // Random bounded 2-variable LPs; oracle: best objective over all pairwise
  // constraint intersections that are feasible.
  std::mt19937 gen(7);
  std::uniform_int_distribution<int> coef(-5, 5);
  for (int trial = 0; trial < 40; ++trial) {
    std::vector<std::array<int, 3>> rows;  // a x + b y <= c
    rows.push_back({1, 0, 10});
    rows.push_back({-1, 0, 10});
    rows.push_back({0, 1, 10});
    rows.push_back({0, -1, 10});
    for (int k = 0; k < 3; ++k) rows.push_back({coef(gen), coef(gen), coef(gen) + 6});
    const int cx = coef(gen), cy = coef(gen);
    LinearProgram lp(2);
    for (auto& r : rows) lp.add_constraint({r[0], r[1]}, Relation::kLessEqual, r[2]);
    lp.set_objective({cx, cy});
    auto sol = lp.solve();

    bool any = false;
    Rational best;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      for (std::size_t j = i + 1; j < rows.size(); ++j) {
        auto p = tentmle::exact::solve({{rows[i][0], rows[i][1]}, {rows[j][0], rows[j][1]}}, {rows[i][2], rows[j][2]});
        if (!p) continue;
        bool feasible = true;
        for (auto& r : rows) feasible = feasible && r[0] * (*p)[0] + r[1] * (*p)[1] <= r[2];
        if (!feasible) continue;
        Rational v = cx * (*p)[0] + cy * (*p)[1];
        if (!any || v > best) best = v;
        any = true;
      }
    }
    if (!any) {
      EXPECT_EQ(sol.status, LpStatus::kInfeasible);
    } else {
      ASSERT_EQ(sol.status, LpStatus::kOptimal);
      EXPECT_EQ(sol.objective, best);
    }
  }
}
