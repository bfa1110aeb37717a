#pragma once

// Finitely generated max-tropically convex sets, the tropical projection onto
// them, and location problems whose sites are such sets.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "troploc/core.hpp"
#include "troploc/gauges.hpp"
#include "troploc/solve.hpp"

namespace troploc {

/// Max-tropical convex hull of a nonempty generator list.
class TropicalSet {
 public:
  TropicalSet() = default;
  explicit TropicalSet(PointCloud generators) : generators_(std::move(generators)) {
    if (generators_.empty()) throw InputError("tropical set needs at least one generator");
  }

  const PointCloud& generators() const { return generators_; }
  std::size_t dim() const { return generators_.dim(); }

 private:
  PointCloud generators_;
};

/// pi_A(x)_i = max_a (a_i + min_j (x_j - a_j)), with the representative the formula produces.
/// This representative is <= x coordinatewise and monotone in x.
inline std::vector<double> project_raw(const TropicalSet& set, std::span<const double> x) {
  if (x.size() != set.dim()) throw InputError("dimension mismatch between set and point");
  std::vector<double> out(x.size(), -kInf);
  for (const auto& a : set.generators()) {
    double lo = kInf;
    for (std::size_t j = 0; j < x.size(); ++j) lo = std::min(lo, x[j] - a[j]);
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = std::max(out[i], a[i] + lo);
  }
  return out;
}

/// Tropical projection, canonical representative.
inline TorusPoint project(const TropicalSet& set, const TorusPoint& x) {
  return canonical(TorusPoint(project_raw(set, x.coords())));
}

/// inf over y in A of gamma-hat(x - y), attained at the projection.
inline double dist_to_set(const TropicalSet& set, const TorusPoint& x, const GaugeShape& shape) {
  const auto p = project_raw(set, x.coords());
  std::vector<double> d(x.dim());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = x[i] - p[i];
  return shape_value(shape, d);
}

/// Union of all generators; the hull of this cloud is the hull of the union of the sets.
inline PointCloud union_generators(const std::vector<TropicalSet>& sets) {
  std::vector<TorusPoint> pts;
  for (const auto& s : sets) {
    for (const auto& a : s.generators()) pts.push_back(a);
  }
  return PointCloud(std::move(pts));
}

/// h(x) = g(d(A_1, x), ..., d(A_m, x)) for a common gauge shape.
struct SetLocationProblem {
  std::vector<TropicalSet> sets;
  Aggregator aggregator = Aggregator::sum();
  GaugeShape shape = TropLp{1.0};

  void validate() const {
    if (sets.empty()) throw InputError("set location problem needs at least one set");
    for (const auto& s : sets) {
      if (s.dim() != sets.front().dim()) throw InputError("sets have mixed dimensions");
    }
    if (!aggregator.weights().empty() && aggregator.weights().size() != sets.size()) {
      throw InputError("one aggregator weight per set required");
    }
  }

  std::size_t dim() const { return sets.front().dim(); }

  std::vector<double> distances(const TorusPoint& x) const {
    std::vector<double> f(sets.size());
    for (std::size_t i = 0; i < sets.size(); ++i) f[i] = dist_to_set(sets[i], x, shape);
    return f;
  }

  double objective(const TorusPoint& x) const { return aggregator.apply(distances(x)); }

  // Gauge subgradients at x - pi_i(x), treating each projection as locally fixed.
  std::vector<double> direction(const TorusPoint& x) const {
    const auto f = distances(x);
    const auto c = aggregator.multipliers(f);
    std::vector<double> g(x.dim(), 0.0);
    for (std::size_t i = 0; i < sets.size(); ++i) {
      if (c[i] == 0.0) continue;
      const auto p = project_raw(sets[i], x.coords());
      std::vector<double> d(x.dim());
      for (std::size_t j = 0; j < d.size(); ++j) d[j] = x[j] - p[j];
      const auto gi = shape_subgradient(shape, d);
      for (std::size_t j = 0; j < g.size(); ++j) g[j] += c[i] * gi[j];
    }
    return g;
  }
};

struct SetSolveOptions {
  std::size_t subgradient_iters = 5000;
  double min_step = 1e-10;
};

/// Result of the set-site hull descent; `projections_fixed` records that every
/// step left all projections unchanged.
struct SetDescentResult {
  DescentResult descent;
  bool projections_fixed = true;
};

/// Descent into the hull of the union of the sets. The step along -e_l is the
/// largest one keeping min_j (x_j - a_j) fixed for every generator a, hence every
/// projection is unchanged while x - pi_i(x) decreases in coordinate l.
inline SetDescentResult descend_sets_to_hull(const SetLocationProblem& problem, const TorusPoint& x) {
  const auto cloud = union_generators(problem.sets);
  SetDescentResult out;
  out.descent = descend_to_hull(x, cloud);
  // Replay the trace and confirm the projection invariance.
  std::vector<double> cur(x.begin(), x.end());
  for (const auto& step : out.descent.trace) {
    std::vector<std::vector<double>> before;
    for (const auto& s : problem.sets) before.push_back(project_raw(s, cur));
    cur[step.coordinate] -= step.step;
    for (std::size_t i = 0; i < problem.sets.size(); ++i) {
      const auto after = project_raw(problem.sets[i], cur);
      for (std::size_t j = 0; j < after.size(); ++j) {
        if (std::abs(after[j] - before[i][j]) > 1e-9 * std::max(1.0, std::abs(before[i][j]))) {
          out.projections_fixed = false;
        }
      }
    }
  }
  return out;
}

/// Minimizes the set-site objective: subgradient steps on the gauge terms,
/// a compass search, then descent into the hull of the union of the generators.
inline SolveReport solve_set_sites(const SetLocationProblem& problem, const SetSolveOptions& opt = {}) {
  problem.validate();
  const std::size_t n = problem.dim();
  const auto cloud = union_generators(problem.sets);
  double c = site_spread(cloud);
  if (!(c > 0.0)) c = 1.0;

  std::vector<double> x = h_normalize(solve_center(cloud).optimum).vec();
  std::vector<double> best = x;
  double best_val = problem.objective(TorusPoint(x));
  double gmax = 0.0;
  std::size_t iters = 0;
  for (std::size_t t = 1; t <= opt.subgradient_iters; ++t, ++iters) {
    const auto g = problem.direction(TorusPoint(x));
    double gn = 0.0;
    for (double v : g) gn += v * v;
    gn = std::sqrt(gn);
    if (gn <= 1e-15) break;
    gmax = std::max(gmax, gn);
    const double alpha = c / (std::sqrt(static_cast<double>(t)) * gmax);
    for (std::size_t j = 0; j < n; ++j) x[j] -= alpha * g[j];
    const double v = problem.objective(TorusPoint(x));
    if (v < best_val) {
      best_val = v;
      best = x;
    }
  }

  x = best;
  iters += detail::pattern_search([&](const TorusPoint& y) { return problem.objective(y); }, x, best_val, c / 4.0,
                                  opt.min_step);

  auto descent = descend_sets_to_hull(problem, TorusPoint(x));
  SolveReport r;
  r.optimum = descent.descent.point;
  r.objective = problem.objective(r.optimum);
  r.in_hull = in_hull_max(cloud, r.optimum);
  r.iterations = iters;
  r.method = Method::SetSites;
  r.converged = descent.projections_fixed;
  r.descent_trace = std::move(descent.descent.trace);
  if (!r.in_hull) throw NumericError("set-site solver output failed the hull check");
  return r;
}

}  // namespace troploc
