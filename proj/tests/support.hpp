#pragma once

// Random generators and brute-force oracles shared by the tests.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "troploc/troploc.hpp"

namespace tsupport {

using namespace troploc;

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  bool coin(double p = 0.5) { return uniform(0.0, 1.0) < p; }

  TorusPoint point(std::size_t n, double lo = -5.0, double hi = 5.0) {
    std::vector<double> x(n);
    for (double& v : x) v = uniform(lo, hi);
    return TorusPoint(std::move(x));
  }

  TorusPoint int_point(std::size_t n, int lo = 0, int hi = 6) {
    std::vector<double> x(n);
    for (double& v : x) v = integer(lo, hi);
    return TorusPoint(std::move(x));
  }

  PointCloud cloud(std::size_t m, std::size_t n, double lo = -5.0, double hi = 5.0) {
    std::vector<TorusPoint> pts;
    for (std::size_t i = 0; i < m; ++i) pts.push_back(point(n, lo, hi));
    return PointCloud(std::move(pts));
  }

  PointCloud int_cloud(std::size_t m, std::size_t n, int lo = 0, int hi = 6) {
    std::vector<TorusPoint> pts;
    for (std::size_t i = 0; i < m; ++i) pts.push_back(int_point(n, lo, hi));
    return PointCloud(std::move(pts));
  }

  std::vector<double> positive(std::size_t n, double lo = 0.2, double hi = 3.0) {
    std::vector<double> w(n);
    for (double& v : w) v = uniform(lo, hi);
    return w;
  }

  /// Random coefficients for a max-combination that keeps every generator in play.
  std::vector<double> mu(std::size_t m, double spread = 5.0) {
    std::vector<double> c(m);
    for (double& v : c) v = uniform(-spread, 0.0);
    return c;
  }

  /// TropLp with p in {1, 2, 3.5, inf} or a random simplex gauge.
  GaugeShape convex_shape(std::size_t n) {
    switch (integer(0, 4)) {
      case 0: return TropLp{1.0};
      case 1: return TropLp{2.0};
      case 2: return TropLp{3.5};
      case 3: return TropLp{kInf};
      default: return SimplexGauge{positive(n)};
    }
  }

  /// Strictly increasing kinds: TropLp(p < inf) or simplex.
  GaugeShape strict_shape(std::size_t n) {
    switch (integer(0, 3)) {
      case 0: return TropLp{1.0};
      case 1: return TropLp{2.0};
      case 2: return TropLp{1.0 + uniform(0.0, 5.0)};
      default: return SimplexGauge{positive(n)};
    }
  }

  /// Random equidistant tree with integer merge heights, possibly with polytomies.
  PhyloTree equidistant_tree(std::size_t n_taxa, double polytomy = 0.2) {
    struct Cluster {
      int node;
      int height;
    };
    std::vector<PhyloNode> nodes;
    std::vector<Cluster> live;
    std::vector<int> height;
    for (std::size_t i = 0; i < n_taxa; ++i) {
      nodes.push_back({"t" + std::to_string(i), 0.0, -1, {}});
      height.push_back(0);
      live.push_back({static_cast<int>(i), 0});
    }
    while (live.size() > 1) {
      std::shuffle(live.begin(), live.end(), rng_);
      std::size_t k = 2;
      while (k < live.size() && coin(polytomy)) ++k;
      int h = 0;
      for (std::size_t i = 0; i < k; ++i) h = std::max(h, live[i].height);
      h += integer(1, 3);
      const int id = static_cast<int>(nodes.size());
      nodes.push_back({"", 0.0, -1, {}});
      height.push_back(h);
      for (std::size_t i = 0; i < k; ++i) {
        nodes[live[i].node].parent = id;
        nodes[live[i].node].length = h - live[i].height;
        nodes[id].children.push_back(live[i].node);
      }
      live.erase(live.begin(), live.begin() + static_cast<std::ptrdiff_t>(k));
      live.push_back({id, h});
    }
    // Re-index breadth first from the root.
    PhyloTree t;
    std::vector<std::pair<int, int>> queue = {{live.front().node, -1}};
    for (std::size_t q = 0; q < queue.size(); ++q) {
      const auto [old, parent] = queue[q];
      const int id = static_cast<int>(t.nodes.size());
      t.nodes.push_back({nodes[old].label, parent == -1 ? 0.0 : nodes[old].length, parent, {}});
      if (parent != -1) t.nodes[parent].children.push_back(id);
      for (int c : nodes[old].children) queue.emplace_back(c, id);
    }
    return t;
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

/// The site matrix of the worked example, one site per row.
// Smallest gap between distinct sorted coordinates; kinks of the polyhedral
// gauges sit where this vanishes.
inline double min_gap(std::span<const double> y) {
  std::vector<double> s(y.begin(), y.end());
  std::sort(s.begin(), s.end());
  double gap = kInf;
  for (std::size_t i = 1; i < s.size(); ++i) gap = std::min(gap, s[i] - s[i - 1]);
  return gap;
}

inline PointCloud example_v() { return PointCloud{{0, 1, 1}, {1, 0, 1}, {3, 2, 0}, {2, 3, 0}}; }

/// Minimum of f over the chart grid (a, b, 0) covering the sites' box plus a margin.
inline double grid_min3(const PointCloud& sites, const std::function<double(const TorusPoint&)>& f, double step = 0.05,
                        double margin = 1.0, TorusPoint* argmin = nullptr) {
  double a0 = kInf, a1 = -kInf, b0 = kInf, b1 = -kInf;
  for (const auto& v : sites) {
    a0 = std::min(a0, v[0] - v[2]);
    a1 = std::max(a1, v[0] - v[2]);
    b0 = std::min(b0, v[1] - v[2]);
    b1 = std::max(b1, v[1] - v[2]);
  }
  a0 = std::floor((a0 - margin) / step) * step;
  b0 = std::floor((b0 - margin) / step) * step;
  const int na = static_cast<int>(std::ceil((a1 + margin - a0) / step));
  const int nb = static_cast<int>(std::ceil((b1 + margin - b0) / step));
  double best = kInf;
  for (int i = 0; i <= na; ++i) {
    for (int j = 0; j <= nb; ++j) {
      const TorusPoint x{a0 + i * step, b0 + j * step, 0.0};
      const double v = f(x);
      if (v < best) {
        best = v;
        if (argmin) *argmin = x;
      }
    }
  }
  return best;
}

/// Solves a square system by Gaussian elimination with partial pivoting; empty if singular.
inline std::vector<double> solve_square(std::vector<std::vector<double>> A, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    for (std::size_t r = c + 1; r < n; ++r) {
      if (std::abs(A[r][c]) > std::abs(A[p][c])) p = r;
    }
    if (std::abs(A[p][c]) < 1e-10) return {};
    std::swap(A[p], A[c]);
    std::swap(b[p], b[c]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c) continue;
      const double f = A[r][c] / A[c][c];
      for (std::size_t k = c; k < n; ++k) A[r][k] -= f * A[c][k];
      b[r] -= f * b[c];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = b[i] / A[i][i];
  return x;
}

/// Optimum of min c.x s.t. A x <= b, x >= 0 by enumerating every vertex.
inline std::optional<double> vertex_enumeration(const std::vector<double>& c, const std::vector<std::vector<double>>& A,
                                                const std::vector<double>& b) {
  const std::size_t n = c.size();
  std::vector<std::vector<double>> rows = A;
  std::vector<double> rhs = b;
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<double> r(n, 0.0);
    r[j] = -1.0;
    rows.push_back(r);
    rhs.push_back(0.0);
  }
  const std::size_t total = rows.size();
  std::optional<double> best;
  std::vector<std::size_t> pick(n);
  std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t start, std::size_t depth) {
    if (depth == n) {
      std::vector<std::vector<double>> M;
      std::vector<double> r;
      for (auto i : pick) {
        M.push_back(rows[i]);
        r.push_back(rhs[i]);
      }
      const auto x = solve_square(M, r);
      if (x.empty()) return;
      for (std::size_t i = 0; i < total; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) s += rows[i][j] * x[j];
        if (s > rhs[i] + 1e-7) return;
      }
      double v = 0.0;
      for (std::size_t j = 0; j < n; ++j) v += c[j] * x[j];
      if (!best || v < *best) best = v;
      return;
    }
    for (std::size_t i = start; i < total; ++i) {
      pick[depth] = i;
      rec(i + 1, depth + 1);
    }
  };
  rec(0, 0);
  return best;
}

/// Random nesting A < B over the given taxa.
inline Nesting random_nesting(Gen& g, const std::vector<std::string>& taxa) {
  auto shuffled = taxa;
  std::shuffle(shuffled.begin(), shuffled.end(), g.engine());
  const int a = g.integer(1, static_cast<int>(taxa.size()) - 1);
  const int b = g.integer(1, static_cast<int>(taxa.size()) - a);
  Nesting nest;
  nest.A.assign(shuffled.begin(), shuffled.begin() + a);
  nest.B.assign(shuffled.begin() + a, shuffled.begin() + a + b);
  return nest;
}

}  // namespace tsupport
