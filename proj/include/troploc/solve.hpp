#pragma once

// Location problems h(x) = g(f_1(x), ..., f_m(x)) [+ lambda f_{m+1}(x)] over the
// tropical projective torus, and solvers whose outputs are pushed into the
// max-tropical convex hull of the sites.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "troploc/core.hpp"
#include "troploc/gauges.hpp"
#include "troploc/lp.hpp"

namespace troploc {

/// Extra strictly increasing term lambda * f(x) anchored inside the hull.
struct Regularizer {
  Gauge gauge;
  double lambda = 0.5;
};

struct LocationProblem {
  PointCloud sites;
  std::vector<Gauge> gauges;  // gauges[i].kernel == sites[i]
  Aggregator aggregator = Aggregator::sum();
  std::optional<Regularizer> regularizer;

  /// One gauge of the given shape per site, kernel at the site.
  static LocationProblem uniform(PointCloud sites, const GaugeShape& shape, Aggregator g) {
    LocationProblem p;
    for (const auto& v : sites) p.gauges.push_back(Gauge{shape, v});
    p.sites = std::move(sites);
    p.aggregator = std::move(g);
    p.validate();
    return p;
  }

  void validate() const {
    if (sites.empty()) throw InputError("location problem needs at least one site");
    if (gauges.size() != sites.size()) throw InputError("location problem needs one gauge per site");
    for (std::size_t i = 0; i < sites.size(); ++i) {
      if (gauges[i].kernel.dim() != sites.dim() || !equivalent(gauges[i].kernel, sites[i])) {
        throw InputError("gauge kernels must equal the sites");
      }
    }
    if (!aggregator.weights().empty() && aggregator.weights().size() != sites.size()) {
      throw InputError("one aggregator weight per site required");
    }
    if (regularizer) {
      if (!(regularizer->lambda > 0.0)) throw InputError("regularization weight must be positive");
      if (!in_hull_max(sites, regularizer->gauge.kernel)) {
        throw InputError("regularizer kernel must lie in the max-tropical hull of the sites");
      }
    }
  }

  std::size_t dim() const { return sites.dim(); }

  std::vector<double> site_values(const TorusPoint& x) const {
    std::vector<double> f(gauges.size());
    for (std::size_t i = 0; i < gauges.size(); ++i) f[i] = eval(gauges[i], x);
    return f;
  }

  double objective(const TorusPoint& x) const {
    double h = aggregator.apply(site_values(x));
    if (regularizer) h += regularizer->lambda * eval(regularizer->gauge, x);
    return h;
  }

  /// Objective without the regularization term.
  double base_objective(const TorusPoint& x) const { return aggregator.apply(site_values(x)); }

  std::vector<double> subgradient(const TorusPoint& x) const {
    const auto f = site_values(x);
    const auto c = aggregator.multipliers(f);
    std::vector<double> g(dim(), 0.0);
    for (std::size_t i = 0; i < gauges.size(); ++i) {
      if (c[i] == 0.0) continue;
      const auto gi = troploc::subgradient(gauges[i], x);
      for (std::size_t j = 0; j < g.size(); ++j) g[j] += c[i] * gi[j];
    }
    if (regularizer) {
      const auto gr = troploc::subgradient(regularizer->gauge, x);
      for (std::size_t j = 0; j < g.size(); ++j) g[j] += regularizer->lambda * gr[j];
    }
    return g;
  }

  /// Sites used by the descent step: the regularizer kernel lies in their
  /// hull, so including it changes no hull but keeps its term monotone too.
  PointCloud descent_sites() const {
    if (!regularizer) return sites;
    auto pts = sites.points();
    pts.push_back(regularizer->gauge.kernel);
    return PointCloud(std::move(pts));
  }

  bool convex() const {
    for (const auto& g : gauges) {
      if (!is_convex(g.shape)) return false;
    }
    return !regularizer || is_convex(regularizer->gauge.shape);
  }

  bool piecewise_linear() const {
    if (aggregator.kind() == Aggregator::Kind::SumSquares) return false;
    for (const auto& g : gauges) {
      if (!is_piecewise_linear(g.shape)) return false;
    }
    return !regularizer || is_piecewise_linear(regularizer->gauge.shape);
  }
};

enum class Method { Center, CenterLp, FwSimplex, PolyhedralLp, Subgradient, HyperplaneL1, HyperplaneLinf, SetSites };

inline std::string method_name(Method m) {
  switch (m) {
    case Method::Center: return "center";
    case Method::CenterLp: return "center_lp";
    case Method::FwSimplex: return "fw_simplex";
    case Method::PolyhedralLp: return "polyhedral_lp";
    case Method::Subgradient: return "subgradient";
    case Method::HyperplaneL1: return "hyperplane_l1";
    case Method::HyperplaneLinf: return "hyperplane_linf";
    case Method::SetSites: return "set_sites";
  }
  return "";
}

struct DescentStep {
  std::size_t coordinate = 0;
  double step = 0.0;
};

struct SolveReport {
  TorusPoint optimum;
  double objective = 0.0;
  bool in_hull = false;
  std::size_t iterations = 0;
  Method method = Method::Center;
  bool converged = true;
  std::vector<DescentStep> descent_trace;
};

struct DescentResult {
  TorusPoint point;  // canonical
  std::vector<DescentStep> trace;
};

/// Moves x along -e_k, k the smallest index of the descent set, by the largest
/// step keeping every site's argmin set, until the descent set is empty. Each
/// step strictly shrinks the descent set, so at most n steps are taken, and no
/// increasing gauge anchored at a site grows along the way.
inline DescentResult descend_to_hull(const TorusPoint& x, const PointCloud& sites, double eps = kEps) {
  if (sites.dim() != x.dim()) throw InputError("dimension mismatch between sites and point");
  std::vector<double> cur(x.begin(), x.end());
  DescentResult out;
  for (std::size_t iter = 0; iter <= x.dim(); ++iter) {
    const TorusPoint p(cur);
    const auto dset = descent_set(sites, p, eps);
    if (dset.empty()) break;
    const std::size_t k = dset.front();
    double delta = kInf;
    for (const auto& v : sites) {
      double lo = kInf;
      for (std::size_t j = 0; j < cur.size(); ++j) lo = std::min(lo, cur[j] - v[j]);
      delta = std::min(delta, cur[k] - v[k] - lo);
    }
    cur[k] -= delta;
    out.trace.push_back({k, delta});
  }
  out.point = canonical(TorusPoint(std::move(cur)));
  return out;
}

inline DescentResult descend_to_hull(const TorusPoint& x, const LocationProblem& problem) {
  return descend_to_hull(x, problem.descent_sites());
}

namespace detail {

inline SolveReport finish(const LocationProblem& problem, const TorusPoint& x, Method method, std::size_t iterations,
                          bool converged) {
  auto d = descend_to_hull(x, problem);
  SolveReport r;
  r.optimum = d.point;
  r.objective = problem.objective(r.optimum);
  r.in_hull = in_hull_max(problem.sites, r.optimum);
  r.iterations = iterations;
  r.method = method;
  r.converged = converged;
  r.descent_trace = std::move(d.trace);
  if (!r.in_hull) throw NumericError("solver output failed the hull check after descent");
  return r;
}

inline TorusPoint point_from(std::span<const double> x, std::size_t n) {
  return TorusPoint(std::vector<double>(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(n)));
}

inline double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

// Search directions: +-(e_j - e_k) and, for n <= 12, +-1_J for every proper
// subset J. Moving a tied block of coordinates together follows the kinks of
// the min in canonical coordinates.
inline std::vector<std::vector<double>> pattern_directions(std::size_t n) {
  std::vector<std::vector<double>> dirs;
  auto push = [&](std::vector<double> d) {
    dirs.push_back(d);
    for (double& v : d) v = -v;
    dirs.push_back(std::move(d));
  };
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = j + 1; k < n; ++k) {
      std::vector<double> d(n, 0.0);
      d[j] = 1.0;
      d[k] = -1.0;
      push(std::move(d));
    }
  }
  if (n <= 12) {
    // 1_J and -1_{complement of J} agree on the torus, so J skips index 0.
    for (std::size_t mask = 2; mask + 1 < (std::size_t{1} << n); mask += 2) {
      std::vector<double> d(n);
      for (std::size_t j = 0; j < n; ++j) d[j] = static_cast<double>((mask >> j) & 1);
      push(std::move(d));
    }
  } else {
    for (std::size_t j = 0; j < n; ++j) {
      std::vector<double> d(n, 0.0);
      d[j] = 1.0;
      push(std::move(d));
    }
  }
  return dirs;
}

// Compass search from x with step halving; returns the number of accepted moves.
inline std::size_t pattern_search(const std::function<double(const TorusPoint&)>& f, std::vector<double>& x,
                                  double& best_val, double step, double min_step) {
  const std::size_t n = x.size();
  const auto dirs = pattern_directions(n);
  std::size_t moves = 0;
  std::vector<double> y(n);
  while (step >= min_step) {
    bool moved = false;
    for (const auto& d : dirs) {
      for (std::size_t j = 0; j < n; ++j) y[j] = x[j] + step * d[j];
      const double v = f(TorusPoint(y));
      if (v < best_val - 1e-15 * std::max(1.0, std::abs(best_val))) {
        best_val = v;
        x = y;
        moved = true;
        ++moves;
      }
    }
    if (!moved) step /= 2.0;
  }
  return moves;
}

}  // namespace detail

/// Tropical center: coordinatewise max of the sum-zero representatives.
inline SolveReport solve_center(const PointCloud& sites) {
  if (sites.empty()) throw InputError("center needs at least one site");
  // n times the sum-zero representatives, divided by n only after
  // canonicalizing, so integer sites give exact results.
  const double n = static_cast<double>(sites.dim());
  std::vector<double> top(sites.dim(), -kInf);
  for (const auto& v : sites) {
    const double total = std::accumulate(v.begin(), v.end(), 0.0);
    for (std::size_t j = 0; j < top.size(); ++j) top[j] = std::max(top[j], n * v[j] - total);
  }
  top = canonical_coords(top);
  for (double& t : top) t /= n;
  const auto problem = LocationProblem::uniform(sites, TropLp{1.0}, Aggregator::max());
  SolveReport r;
  r.optimum = TorusPoint(std::move(top));
  r.objective = problem.objective(r.optimum);
  r.in_hull = in_hull_max(sites, r.optimum);
  r.method = Method::Center;
  return r;
}

/// The center as the program min n*t s.t. v_ij - x_j <= t, sum x = 0 (sites sum-zero normalized).
inline LinearProgram center_program(const PointCloud& sites) {
  const std::size_t n = sites.dim();
  LinearProgram lp(n + 1, VarBound::free());
  lp.objective[n] = static_cast<double>(n);
  for (const auto& v : sites) {
    const auto h = h_normalize(v);
    for (std::size_t j = 0; j < n; ++j) {
      std::vector<double> row(n + 1, 0.0);
      row[j] = -1.0;
      row[n] = -1.0;
      lp.add_le(std::move(row), -h[j]);
    }
  }
  std::vector<double> sum(n + 1, 1.0);
  sum[n] = 0.0;
  lp.add_eq(std::move(sum), 0.0);
  return lp;
}

inline SolveReport solve_center_lp(const PointCloud& sites) {
  const auto sol = simplex_solve(center_program(sites));
  const auto problem = LocationProblem::uniform(sites, TropLp{1.0}, Aggregator::max());
  auto r = detail::finish(problem, detail::point_from(sol.x, sites.dim()), Method::CenterLp, sol.pivots, true);
  return r;
}

/// Weighted Fermat-Weber under the simplex gauge (a transportation problem):
/// min sum_i w_i (sum_j lambda_j (x_j - v_ij) - Lambda s_i), s_i <= x_j - v_ij, sum x = 0.
inline SolveReport solve_fw_simplex_gauge(const PointCloud& sites, std::vector<double> weights,
                                          std::vector<double> lambda) {
  const std::size_t n = sites.dim();
  const std::size_t m = sites.size();
  if (weights.empty()) weights.assign(m, 1.0);
  if (lambda.empty()) lambda.assign(n, 1.0);
  if (weights.size() != m) throw InputError("one weight per site required");
  if (lambda.size() != n) throw InputError("simplex weights must match the dimension");
  auto problem = LocationProblem::uniform(sites, SimplexGauge{lambda}, Aggregator::weighted_sum(weights));

  const double total = std::accumulate(lambda.begin(), lambda.end(), 0.0);
  const double wsum = std::accumulate(weights.begin(), weights.end(), 0.0);
  LinearProgram lp(n + m, VarBound::free());
  for (std::size_t j = 0; j < n; ++j) lp.objective[j] = wsum * lambda[j];
  for (std::size_t i = 0; i < m; ++i) lp.objective[n + i] = -weights[i] * total;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      std::vector<double> row(n + m, 0.0);
      row[n + i] = 1.0;
      row[j] = -1.0;
      lp.add_le(std::move(row), -sites[i][j]);
    }
  }
  std::vector<double> sum(n + m, 0.0);
  std::fill(sum.begin(), sum.begin() + static_cast<std::ptrdiff_t>(n), 1.0);
  lp.add_eq(std::move(sum), 0.0);

  const auto sol = simplex_solve(lp);
  return detail::finish(problem, detail::point_from(sol.x, n), Method::FwSimplex, sol.pivots, true);
}

/// Exact LP for problems built from tropical L^1, L^inf and simplex gauges
/// under Sum, WeightedSum or Max, including a regularizer of those kinds.
inline SolveReport solve_polyhedral(const LocationProblem& problem) {
  problem.validate();
  const std::size_t n = problem.dim();
  const std::size_t m = problem.sites.size();
  const bool reg = problem.regularizer.has_value();
  const bool is_max = problem.aggregator.kind() == Aggregator::Kind::Max;
  if (problem.aggregator.kind() == Aggregator::Kind::SumSquares) {
    throw InputError("sum of squares is not polyhedral; use the subgradient solver");
  }
  auto is_linf = [](const Gauge& g) {
    const auto* l = std::get_if<TropLp>(&g.shape);
    return l && l->p == kInf;
  };
  std::size_t n_linf = 0;
  for (const auto& g : problem.gauges) n_linf += is_linf(g);
  if (reg) n_linf += is_linf(problem.regularizer->gauge);
  // Columns: x (n), t_i (m), [t_reg], [T], then (u, l) per L^inf gauge.
  const std::size_t col_reg = n + m;
  const std::size_t col_max = n + m + (reg ? 1 : 0);
  std::size_t next_aux = col_max + (is_max ? 1 : 0);
  const std::size_t cols = next_aux + 2 * n_linf;
  LinearProgram lp(cols, VarBound::free());

  auto add_epigraph = [&](const Gauge& g, std::size_t tcol) {
    const auto& v = g.kernel;
    if (is_linf(g)) {
      // x_j - v_j <= u, l <= x_j - v_j, u - l <= t: 2n + 1 rows instead of n(n-1).
      const std::size_t u = next_aux++, l = next_aux++;
      for (std::size_t j = 0; j < n; ++j) {
        std::vector<double> up(cols, 0.0), lo(cols, 0.0);
        up[j] = 1.0;
        up[u] = -1.0;
        lp.add_le(std::move(up), v[j]);
        lo[j] = -1.0;
        lo[l] = 1.0;
        lp.add_le(std::move(lo), -v[j]);
      }
      std::vector<double> row(cols, 0.0);
      row[u] = 1.0;
      row[l] = -1.0;
      row[tcol] = -1.0;
      lp.add_le(std::move(row), 0.0);
      return;
    }
    std::vector<double> lam(n, 1.0);
    if (const auto* s = std::get_if<SimplexGauge>(&g.shape)) {
      lam = s->lambda;
    } else if (const auto* l1 = std::get_if<TropLp>(&g.shape); !(l1 && l1->p == 1.0)) {
      throw InputError("polyhedral solver supports lp(1), lp(inf) and simplex gauges only, got " + describe(g.shape));
    }
    const double total = std::accumulate(lam.begin(), lam.end(), 0.0);
    for (std::size_t k = 0; k < n; ++k) {
      // sum_j lam_j (x_j - v_j) - total (x_k - v_k) <= t
      std::vector<double> row(cols, 0.0);
      double rhs = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        row[j] += lam[j];
        rhs += lam[j] * v[j];
      }
      row[k] -= total;
      rhs -= total * v[k];
      row[tcol] = -1.0;
      lp.add_le(std::move(row), rhs);
    }
  };

  for (std::size_t i = 0; i < m; ++i) add_epigraph(problem.gauges[i], n + i);
  if (reg) {
    add_epigraph(problem.regularizer->gauge, col_reg);
    lp.objective[col_reg] = problem.regularizer->lambda;
  }
  if (is_max) {
    for (std::size_t i = 0; i < m; ++i) {
      std::vector<double> row(cols, 0.0);
      row[n + i] = 1.0;
      row[col_max] = -1.0;
      lp.add_le(std::move(row), 0.0);
    }
    lp.objective[col_max] = 1.0;
  } else {
    const auto& w = problem.aggregator.weights();
    for (std::size_t i = 0; i < m; ++i) lp.objective[n + i] = w.empty() ? 1.0 : w[i];
  }
  std::vector<double> sum(cols, 0.0);
  std::fill(sum.begin(), sum.begin() + static_cast<std::ptrdiff_t>(n), 1.0);
  lp.add_eq(std::move(sum), 0.0);

  const auto sol = simplex_solve(lp);
  return detail::finish(problem, detail::point_from(sol.x, n), Method::PolyhedralLp, sol.pivots, true);
}

struct SubgradientOptions {
  std::size_t max_iter = 50000;
  std::size_t stall_window = 200;
  double stall_tol = 1e-9;                 // relative progress over one window
  double step_scale = 0.0;                 // c in c/sqrt(t); 0 picks the max pairwise d_sym of the sites
  std::optional<double> known_optimum;     // enables Polyak steps
  bool polish = true;                      // compass search from the best iterate
};

inline double site_spread(const PointCloud& sites) {
  double c = 0.0;
  for (std::size_t i = 0; i < sites.size(); ++i) {
    for (std::size_t k = i + 1; k < sites.size(); ++k) c = std::max(c, d_sym(sites[i], sites[k]));
  }
  return c;
}

/// Projected subgradient method on the sum-zero hyperplane.
///
/// Steps are (c / sqrt(t)) * g / G where G is the largest subgradient norm seen
/// so far: bounded by c / sqrt(t), proportional to g near smooth minima. The
/// best iterate is polished by a compass search and descended into the hull,
/// so the reported objective never exceeds the objective at x0.
inline SolveReport solve_subgradient(const LocationProblem& problem, const TorusPoint& x0,
                                     const SubgradientOptions& opt = {}) {
  problem.validate();
  if (x0.dim() != problem.dim()) throw InputError("start point has the wrong dimension");
  const std::size_t n = problem.dim();
  double c = opt.step_scale > 0.0 ? opt.step_scale : site_spread(problem.sites);
  if (!(c > 0.0)) c = 1.0;

  std::vector<double> x = h_normalize(x0).vec();
  double best_val = problem.objective(TorusPoint(x));
  std::vector<double> best = x;
  double window_best = best_val;
  double gmax = 0.0;
  bool converged = false;
  std::size_t t = 1;
  for (; t <= opt.max_iter; ++t) {
    const TorusPoint p(x);
    const double val = problem.objective(p);
    if (val < best_val) {
      best_val = val;
      best = x;
    }
    auto g = problem.subgradient(p);
    const double gn = detail::norm2(g);
    if (gn <= 1e-15) {
      converged = true;
      break;
    }
    gmax = std::max(gmax, gn);
    double alpha;
    if (opt.known_optimum) {
      alpha = std::max(val - *opt.known_optimum, 0.0) / (gn * gn);
    } else {
      alpha = c / (std::sqrt(static_cast<double>(t)) * gmax);
    }
    for (std::size_t j = 0; j < n; ++j) x[j] -= alpha * g[j];
    const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
    for (double& v : x) v -= mean;
    if (t % opt.stall_window == 0) {
      if (window_best - best_val <= opt.stall_tol * std::abs(best_val)) {
        converged = true;
        break;
      }
      window_best = best_val;
    }
  }
  std::size_t iters = std::min(t, opt.max_iter);
  if (opt.polish) {
    iters += detail::pattern_search([&](const TorusPoint& y) { return problem.objective(y); }, best, best_val, c / 4.0,
                                    1e-10 * c);
  }
  return detail::finish(problem, TorusPoint(best), Method::Subgradient, iters, converged);
}

namespace detail {

// Points where two coordinates of x + t d - v coincide, for every anchor v.
inline std::vector<double> breakpoints_along(const LocationProblem& problem, std::span<const double> x,
                                             std::span<const double> d) {
  std::vector<double> ts;
  auto add_anchor = [&](const TorusPoint& v) {
    for (std::size_t j = 0; j < x.size(); ++j) {
      for (std::size_t k = j + 1; k < x.size(); ++k) {
        const double dd = d[j] - d[k];
        if (std::abs(dd) < 1e-15) continue;
        ts.push_back(-((x[j] - v[j]) - (x[k] - v[k])) / dd);
      }
    }
  };
  for (const auto& g : problem.gauges) add_anchor(g.kernel);
  if (problem.regularizer) add_anchor(problem.regularizer->gauge.kernel);
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
  return ts;
}

inline TorusPoint along(std::span<const double> x, std::span<const double> d, double t) {
  std::vector<double> y(x.size());
  for (std::size_t j = 0; j < y.size(); ++j) y[j] = x[j] + t * d[j];
  return TorusPoint(std::move(y));
}

}  // namespace detail

/// Exact minimization of a piecewise-linear objective along x + t d.
///
/// Between consecutive breakpoints every site term is affine, so the minimum is
/// at a breakpoint or, for the max aggregator, where two affine terms cross.
/// Returns the minimizing t (ties go to the smallest |t|, so 0 when nothing improves).
inline double line_minimize(const LocationProblem& problem, std::span<const double> x, std::span<const double> d) {
  auto ts = detail::breakpoints_along(problem, x, d);
  std::vector<double> cand = {0.0};
  cand.insert(cand.end(), ts.begin(), ts.end());
  if (problem.aggregator.kind() == Aggregator::Kind::Max) {
    std::vector<double> knots;
    if (ts.empty()) {
      knots = {-1.0, 1.0};
    } else {
      knots.push_back(ts.front() - 1.0);
      knots.insert(knots.end(), ts.begin(), ts.end());
      knots.push_back(ts.back() + 1.0);
    }
    auto values = [&](double t) { return problem.site_values(detail::along(x, d, t)); };
    for (std::size_t s = 0; s + 1 < knots.size(); ++s) {
      const double a = knots[s];
      const double b = knots[s + 1];
      const auto fa = values(a);
      const auto fb = values(b);
      const bool first = s == 0;
      const bool last = s + 2 == knots.size();
      for (std::size_t i = 0; i < fa.size(); ++i) {
        for (std::size_t k = i + 1; k < fa.size(); ++k) {
          const double da = fa[i] - fa[k];
          const double db = fb[i] - fb[k];
          if (da == db) continue;
          const double t = a + (b - a) * da / (da - db);
          // The outer pieces extend affinely past the sentinels.
          if ((t >= a || first) && (t <= b || last)) cand.push_back(t);
        }
      }
    }
  }
  double best_t = 0.0;
  double best_v = problem.objective(detail::along(x, d, 0.0));
  for (double t : cand) {
    const double v = problem.objective(detail::along(x, d, t));
    if (v < best_v - 1e-13 * std::max(1.0, std::abs(best_v)) ||
        (std::abs(v - best_v) <= 1e-13 * std::max(1.0, std::abs(best_v)) && std::abs(t) < std::abs(best_t))) {
      best_v = v;
      best_t = t;
    }
  }
  return best_t;
}

/// Cyclic exact line searches along e_j and e_j - e_k until no direction helps.
inline std::pair<TorusPoint, std::size_t> local_descent(const LocationProblem& problem, const TorusPoint& start,
                                                        std::size_t max_sweeps = 1000) {
  const std::size_t n = problem.dim();
  std::vector<std::vector<double>> dirs;
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<double> e(n, 0.0);
    e[j] = 1.0;
    dirs.push_back(std::move(e));
  }
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = j + 1; k < n; ++k) {
      std::vector<double> e(n, 0.0);
      e[j] = 1.0;
      e[k] = -1.0;
      dirs.push_back(std::move(e));
    }
  }
  std::vector<double> x = canonical(start).vec();
  double val = problem.objective(TorusPoint(x));
  std::size_t sweeps = 0;
  for (; sweeps < max_sweeps; ++sweeps) {
    bool improved = false;
    for (const auto& d : dirs) {
      const double t = line_minimize(problem, x, d);
      if (t == 0.0) continue;
      auto y = detail::along(x, d, t);
      const double v = problem.objective(y);
      if (v < val - 1e-12 * std::max(1.0, std::abs(val))) {
        x = canonical(y).vec();
        val = v;
        improved = true;
      }
    }
    if (!improved) break;
  }
  return {TorusPoint(x), sweeps};
}

enum class HyperplaneError { L1, Linf };

/// Best-fit max-tropical hyperplane: minimizes the sum (L1) or max (Linf) of
/// the order-statistic distances over the apex. The objective is not convex;
/// every site and the tropical center seed a local descent and the best
/// result wins (earlier seeds win ties).
inline SolveReport solve_best_fit_hyperplane(const PointCloud& sites, HyperplaneError error) {
  if (sites.empty()) throw InputError("hyperplane fit needs at least one site");
  const auto agg = error == HyperplaneError::L1 ? Aggregator::sum() : Aggregator::max();
  const auto problem = LocationProblem::uniform(sites, HyperplaneOrderStat{}, agg);
  std::vector<TorusPoint> starts = {solve_center(sites).optimum};
  for (const auto& v : sites) starts.push_back(canonical(v));
  std::optional<TorusPoint> best;
  double best_val = kInf;
  std::size_t total_sweeps = 0;
  for (const auto& s : starts) {
    auto [x, sweeps] = local_descent(problem, s);
    total_sweeps += sweeps;
    const double v = problem.objective(x);
    if (!best || v < best_val - 1e-12 * std::max(1.0, best_val)) {
      best_val = v;
      best = x;
    }
  }
  return detail::finish(problem, *best, error == HyperplaneError::L1 ? Method::HyperplaneL1 : Method::HyperplaneLinf,
                        total_sweeps, true);
}

/// Adds lambda * d_asym(kernel, x); the kernel defaults to the tropical center.
inline LocationProblem regularize(LocationProblem problem, double lambda,
                                  const std::optional<TorusPoint>& kernel = std::nullopt) {
  if (!(lambda > 0.0)) throw InputError("regularization weight must be positive");
  TorusPoint k = kernel ? *kernel : solve_center(problem.sites).optimum;
  if (k.dim() != problem.dim()) throw InputError("regularizer kernel has the wrong dimension");
  if (!in_hull_max(problem.sites, k)) throw InputError("regularizer kernel lies outside the max-tropical hull");
  problem.regularizer = Regularizer{Gauge{TropLp{1.0}, std::move(k)}, lambda};
  problem.validate();
  return problem;
}

}  // namespace troploc
