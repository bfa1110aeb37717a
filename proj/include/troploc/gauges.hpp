#pragma once

// Delta-star-quasiconvex dissimilarities: f(x) = gamma(canonical(x - v)) for an
// increasing gamma on the nonnegative orthant, plus the aggregators g that
// combine per-site values into a location objective.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "troploc/core.hpp"

namespace troploc {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Tropical L^p norm; p == kInf gives max - min.
struct TropLp {
  double p = 1.0;
};

/// Gauge of the simplex with vertices e_i / lambda_i (transportation gauge).
struct SimplexGauge {
  std::vector<double> lambda;
};

/// Second-smallest minus smallest entry: symmetric tropical distance from a
/// site to the max-tropical hyperplane whose apex is the argument.
struct HyperplaneOrderStat {};

/// User-supplied increasing gamma on canonical coordinates. `gradient`, when
/// present, returns a (sub)gradient of gamma itself in the same coordinates.
struct CustomGamma {
  std::function<double(std::span<const double>)> gamma;
  std::function<std::vector<double>(std::span<const double>)> gradient;
  bool convex = false;
  bool strictly_increasing = false;
};

using GaugeShape = std::variant<TropLp, SimplexGauge, HyperplaneOrderStat, CustomGamma>;

namespace detail {

inline void check_p(double p) {
  if (!(p >= 1.0)) throw InputError("tropical L^p needs p >= 1 (or infinity), got " + std::to_string(p));
}

inline void check_lambda(std::span<const double> lambda) {
  for (double l : lambda) {
    if (!(l > 0.0) || !std::isfinite(l)) throw InputError("simplex gauge weights must be positive");
  }
}

// Inputs are canonical (min 0, all >= 0).
inline double lp_of_canonical(std::span<const double> z, double p) {
  if (p == kInf) return *std::max_element(z.begin(), z.end());
  if (p == 1.0) return std::accumulate(z.begin(), z.end(), 0.0);
  const double scale = *std::max_element(z.begin(), z.end());
  if (scale == 0.0) return 0.0;
  double s = 0.0;
  for (double v : z) s += std::pow(v / scale, p);
  return scale * std::pow(s, 1.0 / p);
}

inline double order_stat_gap(std::span<const double> y) {
  std::vector<double> s(y.begin(), y.end());
  std::partial_sort(s.begin(), s.begin() + 2, s.end());
  return s[1] - s[0];
}

// Weight 1/|T| on each index of the tie set T.
inline std::vector<double> uniform_on(const std::vector<std::size_t>& ties, std::size_t n) {
  std::vector<double> u(n, 0.0);
  for (std::size_t k : ties) u[k] = 1.0 / static_cast<double>(ties.size());
  return u;
}

inline void center_sum_zero(std::vector<double>& g) {
  const double mean = std::accumulate(g.begin(), g.end(), 0.0) / static_cast<double>(g.size());
  for (double& v : g) v -= mean;
}

}  // namespace detail

/// Tropical L^p norm of the class of x.
inline double gamma_p(const TorusPoint& x, double p) {
  detail::check_p(p);
  return detail::lp_of_canonical(canonical_coords(x.coords()), p);
}

/// sum_i lambda_i x_i - (sum lambda) min_j x_j.
inline double gamma_simplex(const TorusPoint& x, std::span<const double> lambda) {
  if (lambda.size() != x.dim()) throw InputError("simplex gauge weights must match the dimension");
  detail::check_lambda(lambda);
  const auto z = canonical_coords(x.coords());
  double s = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) s += lambda[i] * z[i];
  return s;
}

/// Symmetric tropical distance from a to the max-tropical hyperplane with the given apex.
inline double hyperplane_dist(const TorusPoint& a, const TorusPoint& apex) {
  return detail::order_stat_gap(difference(apex, a));
}

/// gamma~(x) = max_i gamma(x with entry i zeroed) + prod_i x_i. Agrees with the
/// boundary function on the boundary of the orthant and stays (strictly)
/// increasing when the boundary function is.
inline std::function<double(std::span<const double>)> extend_monotone(
    std::function<double(std::span<const double>)> boundary) {
  return [boundary = std::move(boundary)](std::span<const double> x) {
    std::vector<double> probe(x.begin(), x.end());
    double best = -kInf;
    double prod = 1.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double keep = probe[i];
      probe[i] = 0.0;
      best = std::max(best, boundary(probe));
      probe[i] = keep;
      prod *= x[i];
    }
    return best + prod;
  };
}

/// Dual gauge of the tropical L^1 norm: gamma_1(-x) / n.
inline double dual_gamma1(const TorusPoint& x) {
  std::vector<double> neg(x.begin(), x.end());
  for (double& v : neg) v = -v;
  return gamma_p(TorusPoint(std::move(neg)), 1.0) / static_cast<double>(x.dim());
}

/// gamma-hat of an arbitrary representative y (canonicalized here).
inline double shape_value(const GaugeShape& shape, std::span<const double> y) {
  return std::visit(
      [&](const auto& s) -> double {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, TropLp>) {
          detail::check_p(s.p);
          return detail::lp_of_canonical(canonical_coords(y), s.p);
        } else if constexpr (std::is_same_v<S, SimplexGauge>) {
          if (s.lambda.size() != y.size()) throw InputError("simplex gauge weights must match the dimension");
          const auto z = canonical_coords(y);
          double v = 0.0;
          for (std::size_t i = 0; i < z.size(); ++i) v += s.lambda[i] * z[i];
          return v;
        } else if constexpr (std::is_same_v<S, HyperplaneOrderStat>) {
          return detail::order_stat_gap(y);
        } else {
          if (!s.gamma) throw InputError("custom gauge without gamma");
          const auto z = canonical_coords(y);
          return s.gamma(z);
        }
      },
      shape);
}

/// One subgradient of y -> gamma-hat(y) in the sum-zero hyperplane.
///
/// Ties in argmin/argmax get uniform weight. For the order-statistic gauge the
/// result is a generalized gradient of the active piece: that function is not
/// convex, so solvers may only use it as a local descent direction.
inline std::vector<double> shape_subgradient(const GaugeShape& shape, std::span<const double> y) {
  const std::size_t n = y.size();
  const auto z = canonical_coords(y);
  const bool at_kernel = *std::max_element(z.begin(), z.end()) <= kEps;
  if (at_kernel) return std::vector<double>(n, 0.0);

  std::vector<double> g = std::visit(
      [&](const auto& s) -> std::vector<double> {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, TropLp>) {
          detail::check_p(s.p);
          if (s.p == kInf) {
            auto hi = detail::uniform_on(argmax_set(z), n);
            const auto lo = detail::uniform_on(argmin_set(z), n);
            for (std::size_t i = 0; i < n; ++i) hi[i] -= lo[i];
            return hi;
          }
          std::vector<double> grad(n, 1.0);
          if (s.p != 1.0) {
            const double norm = detail::lp_of_canonical(z, s.p);
            for (std::size_t i = 0; i < n; ++i) grad[i] = std::pow(z[i] / norm, s.p - 1.0);
          }
          const double total = std::accumulate(grad.begin(), grad.end(), 0.0);
          const auto u = detail::uniform_on(argmin_set(z), n);
          for (std::size_t i = 0; i < n; ++i) grad[i] -= total * u[i];
          return grad;
        } else if constexpr (std::is_same_v<S, SimplexGauge>) {
          detail::check_lambda(s.lambda);
          std::vector<double> grad(s.lambda);
          const double total = std::accumulate(grad.begin(), grad.end(), 0.0);
          const auto u = detail::uniform_on(argmin_set(z), n);
          for (std::size_t i = 0; i < n; ++i) grad[i] -= total * u[i];
          return grad;
        } else if constexpr (std::is_same_v<S, HyperplaneOrderStat>) {
          const auto lows = argmin_set(z);
          if (lows.size() >= 2) return std::vector<double>(n, 0.0);
          std::vector<double> rest(z);
          rest[lows.front()] = kInf;
          auto grad = detail::uniform_on(argmin_set(rest), n);
          grad[lows.front()] -= 1.0;
          return grad;
        } else {
          if (!s.gradient) throw InputError("custom gauge has no subgradient; use derivative-free methods");
          auto grad = s.gradient(z);
          if (grad.size() != n) throw InputError("custom gauge gradient has the wrong dimension");
          const double total = std::accumulate(grad.begin(), grad.end(), 0.0);
          const auto u = detail::uniform_on(argmin_set(z), n);
          for (std::size_t i = 0; i < n; ++i) grad[i] -= total * u[i];
          return grad;
        }
      },
      shape);
  detail::center_sum_zero(g);
  return g;
}

inline bool is_convex(const GaugeShape& shape) {
  if (const auto* c = std::get_if<CustomGamma>(&shape)) return c->convex;
  return !std::holds_alternative<HyperplaneOrderStat>(shape);
}

inline bool is_strictly_increasing(const GaugeShape& shape) {
  if (const auto* lp = std::get_if<TropLp>(&shape)) return lp->p != kInf;
  if (const auto* c = std::get_if<CustomGamma>(&shape)) return c->strictly_increasing;
  return std::holds_alternative<SimplexGauge>(shape);
}

/// True when gamma-hat is piecewise linear with kinks only where two
/// coordinates of x - v coincide.
inline bool is_piecewise_linear(const GaugeShape& shape) {
  if (const auto* lp = std::get_if<TropLp>(&shape)) return lp->p == 1.0 || lp->p == kInf;
  return std::holds_alternative<SimplexGauge>(shape) || std::holds_alternative<HyperplaneOrderStat>(shape);
}

inline std::string describe(const GaugeShape& shape) {
  return std::visit(
      [](const auto& s) -> std::string {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, TropLp>) {
          return s.p == kInf ? "lp(inf)" : "lp(" + std::to_string(s.p) + ")";
        } else if constexpr (std::is_same_v<S, SimplexGauge>) {
          return "simplex";
        } else if constexpr (std::is_same_v<S, HyperplaneOrderStat>) {
          return "hyperplane";
        } else {
          return "custom";
        }
      },
      shape);
}

/// A dissimilarity anchored at a kernel point: f(x) = gamma-hat(x - kernel).
struct Gauge {
  GaugeShape shape;
  TorusPoint kernel;
};

inline double eval(const Gauge& g, const TorusPoint& x) { return shape_value(g.shape, difference(x, g.kernel)); }

inline std::vector<double> subgradient(const Gauge& g, const TorusPoint& x) {
  return shape_subgradient(g.shape, difference(x, g.kernel));
}

/// Increasing function g combining per-site dissimilarities.
class Aggregator {
 public:
  enum class Kind { Sum, WeightedSum, SumSquares, Max };

  static Aggregator sum() { return Aggregator(Kind::Sum, {}); }
  /// Sum of w_i f_i^2; empty weights mean all ones.
  static Aggregator sum_squares(std::vector<double> w = {}) {
    check_weights(w);
    return Aggregator(Kind::SumSquares, std::move(w));
  }
  static Aggregator max() { return Aggregator(Kind::Max, {}); }
  static Aggregator weighted_sum(std::vector<double> w) {
    check_weights(w);
    return Aggregator(Kind::WeightedSum, std::move(w));
  }

  Kind kind() const { return kind_; }
  const std::vector<double>& weights() const { return weights_; }
  bool strictly_increasing() const { return kind_ != Kind::Max; }
  bool convex() const { return true; }

  double apply(std::span<const double> f) const {
    check_size(f.size());
    switch (kind_) {
      case Kind::Sum:
        return std::accumulate(f.begin(), f.end(), 0.0);
      case Kind::WeightedSum: {
        double s = 0.0;
        for (std::size_t i = 0; i < f.size(); ++i) s += weights_[i] * f[i];
        return s;
      }
      case Kind::SumSquares: {
        double s = 0.0;
        for (std::size_t i = 0; i < f.size(); ++i) s += (weights_.empty() ? 1.0 : weights_[i]) * f[i] * f[i];
        return s;
      }
      case Kind::Max:
        return *std::max_element(f.begin(), f.end());
    }
    return 0.0;
  }

  /// Multipliers c_i with sum_i c_i * subgrad(f_i) a subgradient of g(f(x)).
  std::vector<double> multipliers(std::span<const double> f) const {
    check_size(f.size());
    switch (kind_) {
      case Kind::Sum:
        return std::vector<double>(f.size(), 1.0);
      case Kind::WeightedSum:
        return weights_;
      case Kind::SumSquares: {
        std::vector<double> c(f.begin(), f.end());
        for (std::size_t i = 0; i < c.size(); ++i) c[i] *= 2.0 * (weights_.empty() ? 1.0 : weights_[i]);
        return c;
      }
      case Kind::Max:
        return detail::uniform_on(argmax_set(f), f.size());
    }
    return {};
  }

  std::string name() const {
    switch (kind_) {
      case Kind::Sum: return "sum";
      case Kind::WeightedSum: return "weighted_sum";
      case Kind::SumSquares: return "sum_squares";
      case Kind::Max: return "max";
    }
    return "";
  }

 private:
  Aggregator(Kind kind, std::vector<double> w) : kind_(kind), weights_(std::move(w)) {}

  static void check_weights(const std::vector<double>& w) {
    for (double v : w) {
      if (!(v > 0.0) || !std::isfinite(v)) throw InputError("aggregator weights must be positive");
    }
  }

  void check_size(std::size_t m) const {
    if ((kind_ == Kind::WeightedSum || !weights_.empty()) && m != weights_.size()) {
      throw InputError("aggregator has " + std::to_string(weights_.size()) + " weights for " + std::to_string(m) +
                       " sites");
    }
    if (m == 0) throw InputError("aggregator needs at least one value");
  }

  Kind kind_ = Kind::Sum;
  std::vector<double> weights_;
};

}  // namespace troploc
