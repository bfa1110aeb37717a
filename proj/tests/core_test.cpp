#include <gtest/gtest.h>

#include "support.hpp"

using namespace troploc;
using tsupport::Gen;

namespace {

void expect_coords(const TorusPoint& p, std::vector<double> want, double tol = 1e-12) {
  ASSERT_EQ(p.dim(), want.size());
  for (std::size_t i = 0; i < want.size(); ++i) EXPECT_NEAR(p[i], want[i], tol) << "coordinate " << i;
}

}  // namespace

TEST(TorusPoint, RejectsDimensionOne) {
  EXPECT_THROW(TorusPoint({1.0}), InputError);
  EXPECT_THROW(TorusPoint(std::vector<double>{}), InputError);
}

TEST(TorusPoint, RejectsNonFinite) { EXPECT_THROW((TorusPoint{1.0, INFINITY}), InputError); }

TEST(Canonical, Examples) {
  expect_coords(canonical(TorusPoint{3, 1, 2}), {2, 0, 1});
  expect_coords(canonical(TorusPoint{0, 0, 0}), {0, 0, 0});
  expect_coords(canonical(TorusPoint{-1, -1, 5}), {0, 0, 6});
}

TEST(HNormalize, Examples) {
  expect_coords(h_normalize(TorusPoint{0, 1, 1}), {-2.0 / 3, 1.0 / 3, 1.0 / 3}, 1e-15);
  expect_coords(h_normalize(TorusPoint{0, 0, 0}), {0, 0, 0});
  expect_coords(h_normalize(TorusPoint{3, 2, 0}), {4.0 / 3, 1.0 / 3, -5.0 / 3}, 1e-15);
}

TEST(Canonical, SameClassAndMinZero) {
  Gen g(11);
  for (int t = 0; t < 200; ++t) {
    const auto x = g.point(static_cast<std::size_t>(g.integer(2, 6)));
    const auto c = canonical(x);
    EXPECT_EQ(detail::min_entry(c.coords()), 0.0);
    EXPECT_TRUE(equivalent(c, x));
    const auto h = h_normalize(x);
    double s = 0.0;
    for (double v : h) s += v;
    EXPECT_NEAR(s, 0.0, 1e-12);
    EXPECT_TRUE(equivalent(h, x));
  }
}

TEST(Equivalent, ConstantShift) {
  EXPECT_TRUE(equivalent(TorusPoint{1, 2, 3}, TorusPoint{11, 12, 13}));
  EXPECT_FALSE(equivalent(TorusPoint{1, 2, 3}, TorusPoint{1, 2, 4}));
}

TEST(ArgminSet, ReturnsAllTies) {
  const std::vector<double> v = {1.0, 0.0, 0.0, 3.0, 1e-12};
  EXPECT_EQ(argmin_set(v), (std::vector<std::size_t>{1, 2, 4}));
  EXPECT_EQ(argmax_set(v), (std::vector<std::size_t>{3}));
}

TEST(DAsym, Examples) {
  EXPECT_EQ(d_asym(TorusPoint{0, 0, 0}, TorusPoint{0, 0, 0}), 0.0);
  EXPECT_DOUBLE_EQ(d_asym(TorusPoint{0, 0, 0}, TorusPoint{0, 1, 2}), 3.0);
  EXPECT_DOUBLE_EQ(d_asym(TorusPoint{0, 1, 2}, TorusPoint{0, 0, 0}), 3.0);
  EXPECT_DOUBLE_EQ(d_asym(TorusPoint{0, 0, 1}, TorusPoint{0, 0, 0}), 2.0);
  EXPECT_DOUBLE_EQ(d_asym(TorusPoint{0, 0, 0}, TorusPoint{0, 0, 1}), 1.0);
}

TEST(DAsym, DimensionMismatch) { EXPECT_THROW(d_asym(TorusPoint{0, 0}, TorusPoint{0, 0, 0}), InputError); }

TEST(DSym, Examples) {
  EXPECT_EQ(d_sym(TorusPoint{4, 1, 2}, TorusPoint{4, 1, 2}), 0.0);
  EXPECT_DOUBLE_EQ(d_sym(TorusPoint{0, 0, 0}, TorusPoint{0, 1, 2}), 2.0);
  EXPECT_DOUBLE_EQ(d_sym(TorusPoint{0, 1, 1}, TorusPoint{1, 0, 1}), 2.0);
}

TEST(Distances, RepresentativeInvarianceAndTriangle) {
  Gen g(12);
  for (int t = 0; t < 300; ++t) {
    const std::size_t n = static_cast<std::size_t>(g.integer(2, 6));
    const auto a = g.point(n), b = g.point(n), c = g.point(n);
    const double s = g.uniform(-10, 10);
    std::vector<double> shifted(a.begin(), a.end());
    for (double& v : shifted) v += s;
    const TorusPoint as(shifted);
    EXPECT_NEAR(d_asym(as, b), d_asym(a, b), 1e-9);
    EXPECT_NEAR(d_asym(b, as), d_asym(b, a), 1e-9);
    EXPECT_NEAR(d_sym(as, b), d_sym(a, b), 1e-9);
    EXPECT_NEAR(d_sym(a, b), d_sym(b, a), 1e-12);
    EXPECT_LE(d_asym(a, c), d_asym(a, b) + d_asym(b, c) + 1e-9);
    EXPECT_GE(d_asym(a, b), 0.0);
    EXPECT_NEAR(d_asym(a, as), 0.0, 1e-9);
    if (!equivalent(a, b, 1e-6)) {
      EXPECT_GT(d_asym(a, b), 0.0);
    }
  }
}

TEST(InHull, Examples) {
  const auto V = tsupport::example_v();
  EXPECT_TRUE(in_hull_max(V, TorusPoint{1, 1, 0}));
  EXPECT_TRUE(in_hull_max(PointCloud{{2, 7, 1}}, TorusPoint{2, 7, 1}));
  EXPECT_FALSE(in_hull_max(V, TorusPoint{-5, 0, 0}));
  EXPECT_EQ(descent_set(V, TorusPoint{-5, 0, 0}), (std::vector<std::size_t>{1, 2}));
  EXPECT_THROW(in_hull_max(PointCloud(), TorusPoint{0, 0, 0}), InputError);
}

// Oracle: x is in the hull iff x equals max_i (v_i + min_j (x_j - v_ij)),
// the largest max-combination below x.
TEST(InHull, AgreesWithProjectionOracle) {
  Gen g(13);
  int inside = 0;
  for (int t = 0; t < 500; ++t) {
    const std::size_t n = static_cast<std::size_t>(g.integer(2, 5));
    const auto cloud = g.int_cloud(static_cast<std::size_t>(g.integer(1, 5)), n, 0, 4);
    const auto x = g.int_point(n, 0, 4);
    std::vector<double> best(n, -kInf);
    for (const auto& v : cloud) {
      double lo = kInf;
      for (std::size_t j = 0; j < n; ++j) lo = std::min(lo, x[j] - v[j]);
      for (std::size_t j = 0; j < n; ++j) best[j] = std::max(best[j], v[j] + lo);
    }
    bool oracle = true;
    for (std::size_t j = 0; j < n; ++j) oracle = oracle && std::abs(best[j] - x[j]) < 1e-9;
    EXPECT_EQ(in_hull_max(cloud, x), oracle);
    inside += oracle;
  }
  EXPECT_GT(inside, 20);
}

TEST(InHull, GeneratorsAndCenterAndCombinations) {
  Gen g(14);
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = static_cast<std::size_t>(g.integer(2, 6));
    const std::size_t m = static_cast<std::size_t>(g.integer(1, 6));
    const auto cloud = g.cloud(m, n);
    for (const auto& v : cloud) EXPECT_TRUE(in_hull_max(cloud, v));
    std::vector<double> top(n, -kInf);
    for (const auto& v : cloud) {
      const auto h = h_normalize(v);
      for (std::size_t j = 0; j < n; ++j) top[j] = std::max(top[j], h[j]);
    }
    EXPECT_TRUE(in_hull_max(cloud, TorusPoint(top)));
    const auto mu = g.mu(m);
    EXPECT_TRUE(in_hull_max(cloud, max_combination(cloud, mu)));
  }
}

TEST(Geodesic, Examples) {
  const TorusPoint a{0, 0, 0}, b{0, 1, 2};
  EXPECT_TRUE(geodesic_contains(a, b, a));
  EXPECT_TRUE(geodesic_contains(a, b, b));
  EXPECT_TRUE(geodesic_contains(a, b, TorusPoint{0, 1, 1}));
  EXPECT_FALSE(geodesic_contains(a, b, TorusPoint{5, 0, 0}));
}

TEST(SegmentVertices, Examples) {
  const auto vs = segment_vertices(TorusPoint{0, 0, 0}, TorusPoint{0, 1, 2});
  ASSERT_EQ(vs.size(), 3u);
  expect_coords(vs[0], {0, 1, 2});
  expect_coords(vs[1], {0, 0, 2});
  expect_coords(vs[2], {0, 1, 0});
  for (const auto& v : segment_vertices(TorusPoint{1, 4, 2}, TorusPoint{1, 4, 2})) {
    EXPECT_TRUE(equivalent(v, TorusPoint{1, 4, 2}));
  }
}

TEST(SegmentVertices, AllOnGeodesic) {
  Gen g(15);
  for (int t = 0; t < 300; ++t) {
    const std::size_t n = static_cast<std::size_t>(g.integer(2, 6));
    const auto a = g.point(n), b = g.point(n);
    for (const auto& v : segment_vertices(a, b)) EXPECT_TRUE(geodesic_contains(a, b, v, 1e-9));
  }
}

TEST(Combinations, Examples) {
  const TorusPoint a{0, 0, 0}, b{0, 1, 2};
  expect_coords(min_combination(a, b, 0, 0), {0, 0, 0});
  expect_coords(min_combination(a, b, 0, -1), {-1, 0, 0});
  expect_coords(min_combination(a, b, -10, 0), {-10, -10, -10});
  expect_coords(max_combination(a, b, 0, 0), {0, 1, 2});
}

// Samples of the min-tropical segment [a,b] lie on a geodesic from any c to a or to b.
TEST(Combinations, SegmentSandwich) {
  Gen g(16);
  for (int t = 0; t < 300; ++t) {
    const std::size_t n = static_cast<std::size_t>(g.integer(2, 5));
    const auto a = g.point(n), b = g.point(n), c = g.point(n);
    const auto s = min_combination(a, b, g.uniform(-6, 6), g.uniform(-6, 6));
    EXPECT_TRUE(geodesic_contains(c, a, s, 1e-9) || geodesic_contains(c, b, s, 1e-9));
  }
}

TEST(Combinations, OrdinaryMidpointOnGeodesic) {
  Gen g(17);
  for (int t = 0; t < 300; ++t) {
    const std::size_t n = static_cast<std::size_t>(g.integer(2, 6));
    const auto a = g.point(n), b0 = g.point(n);
    // Representative of b with min_j (b_j - a_j) = 0.
    const double lo = detail::min_entry(difference(b0, a));
    std::vector<double> b(b0.begin(), b0.end()), mid(n);
    for (std::size_t j = 0; j < n; ++j) {
      b[j] -= lo;
      mid[j] = (a[j] + b[j]) / 2.0;
    }
    EXPECT_TRUE(geodesic_contains(a, TorusPoint(b), TorusPoint(mid), 1e-9));
  }
}

TEST(PointCloud, Validation) {
  EXPECT_THROW(PointCloud(std::vector<TorusPoint>{}), InputError);
  EXPECT_THROW((PointCloud{{0, 0}, {0, 0, 0}}), InputError);
}
