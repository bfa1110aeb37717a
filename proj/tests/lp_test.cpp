#include <gtest/gtest.h>

#include "support.hpp"

using namespace troploc;
using tsupport::Gen;

TEST(Simplex, SingleBound) {
  // min t s.t. t >= 1, written as -t <= -1 on a free variable.
  LinearProgram lp(1, VarBound::free());
  lp.objective = {1.0};
  lp.add_le({-1.0}, -1.0);
  const auto s = simplex_solve(lp);
  EXPECT_NEAR(s.value, 1.0, 1e-12);
  EXPECT_NEAR(s.x[0], 1.0, 1e-12);
}

TEST(Simplex, Infeasible) {
  LinearProgram lp(1);
  lp.objective = {1.0};
  lp.add_le({1.0}, -1.0);
  EXPECT_THROW(simplex_solve(lp), LpInfeasible);
}

TEST(Simplex, Unbounded) {
  LinearProgram lp(2);
  lp.objective = {-1.0, 0.0};
  lp.add_le({-1.0, 1.0}, 1.0);
  EXPECT_THROW(simplex_solve(lp), LpUnbounded);
}

TEST(Simplex, EqualitiesBoundsAndRedundantRows) {
  // min x + 2y s.t. x + y = 3, 2x + 2y = 6, 1 <= x <= 2, y free.
  LinearProgram lp(2, VarBound::free());
  lp.bounds[0] = {1.0, 2.0};
  lp.objective = {1.0, 2.0};
  lp.add_eq({1.0, 1.0}, 3.0);
  lp.add_eq({2.0, 2.0}, 6.0);
  const auto s = simplex_solve(lp);
  EXPECT_NEAR(s.value, 4.0, 1e-9);
  EXPECT_NEAR(s.x[0], 2.0, 1e-9);
  EXPECT_NEAR(s.x[1], 1.0, 1e-9);
}

TEST(Simplex, UpperBoundOnlyVariable) {
  // max x (min -x) with x <= 5 and no lower bound, plus x >= -3 as a row.
  LinearProgram lp(1, VarBound{-kInf, 5.0});
  lp.objective = {-1.0};
  lp.add_le({-1.0}, 3.0);
  EXPECT_NEAR(simplex_solve(lp).x[0], 5.0, 1e-12);
}

TEST(Simplex, RejectsMalformed) {
  LinearProgram lp(2);
  lp.add_le({1.0}, 1.0);
  EXPECT_THROW(simplex_solve(lp), InputError);
}

TEST(Simplex, CenterProgramOnExample) {
  const auto lp = center_program(tsupport::example_v());
  const auto s = simplex_solve(lp);
  const TorusPoint x(std::vector<double>(s.x.begin(), s.x.begin() + 3));
  EXPECT_TRUE(equivalent(x, TorusPoint{1, 1, 0}, 1e-9));
}

TEST(Simplex, MatchesVertexEnumeration) {
  Gen g(41);
  int solved = 0;
  for (int t = 0; t < 300; ++t) {
    const std::size_t n = static_cast<std::size_t>(g.integer(2, 4));
    const std::size_t m = static_cast<std::size_t>(g.integer(2, 5));
    std::vector<double> c(n);
    for (double& v : c) v = g.integer(-5, 5);
    std::vector<std::vector<double>> A;
    std::vector<double> b;
    for (std::size_t i = 0; i < m; ++i) {
      std::vector<double> row(n);
      for (double& v : row) v = g.integer(-4, 6);
      A.push_back(row);
      b.push_back(g.integer(-3, 12));
    }
    // A box row keeps the feasible region bounded.
    A.push_back(std::vector<double>(n, 1.0));
    b.push_back(10.0);
    const auto oracle = tsupport::vertex_enumeration(c, A, b);
    LinearProgram lp(n);
    lp.objective = c;
    for (std::size_t i = 0; i < A.size(); ++i) lp.add_le(A[i], b[i]);
    if (!oracle) {
      EXPECT_THROW(simplex_solve(lp), LpInfeasible);
      continue;
    }
    const auto s = simplex_solve(lp);
    EXPECT_NEAR(s.value, *oracle, 1e-7) << "instance " << t;
    for (std::size_t i = 0; i < A.size(); ++i) {
      double lhs = 0.0;
      for (std::size_t j = 0; j < n; ++j) lhs += A[i][j] * s.x[j];
      EXPECT_LE(lhs, b[i] + 1e-7);
    }
    for (double v : s.x) EXPECT_GE(v, -1e-9);
    ++solved;
  }
  EXPECT_GT(solved, 100);
}

TEST(Simplex, DegenerateDoesNotCycle) {
  // A classic cycling example for the largest-coefficient rule.
  LinearProgram lp(4);
  lp.objective = {-0.75, 150.0, -0.02, 6.0};
  lp.add_le({0.25, -60.0, -0.04, 9.0}, 0.0);
  lp.add_le({0.5, -90.0, -0.02, 3.0}, 0.0);
  lp.add_le({0.0, 0.0, 1.0, 0.0}, 1.0);
  const auto s = simplex_solve(lp);
  EXPECT_NEAR(s.value, -0.05, 1e-9);
}
