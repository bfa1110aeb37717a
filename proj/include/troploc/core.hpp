#pragma once

// Arithmetic and geometry of the tropical projective torus R^n / R1.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace troploc {

/// Absolute tolerance for equality and argmin tests on canonical representatives.
inline constexpr double kEps = 1e-9;

/// Raised for malformed input: dimension mismatches, empty clouds, bad parameters.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a numeric procedure cannot deliver a valid answer.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A point of the tropical projective torus, stored through one representative.
///
/// Any representative is accepted; operations that return points hand back the
/// canonical one (minimum entry 0) unless documented otherwise. The torus of
/// dimension 1 is a single point, so n >= 2 is enforced.
class TorusPoint {
 public:
  TorusPoint() = default;

  explicit TorusPoint(std::vector<double> coords) : coords_(std::move(coords)) {
    if (coords_.size() < 2) {
      throw InputError("torus points need dimension n >= 2, got " + std::to_string(coords_.size()));
    }
    for (double c : coords_) {
      if (!std::isfinite(c)) throw InputError("torus point coordinates must be finite");
    }
  }

  TorusPoint(std::initializer_list<double> coords) : TorusPoint(std::vector<double>(coords)) {}

  std::size_t dim() const { return coords_.size(); }
  double operator[](std::size_t i) const { return coords_[i]; }
  double& operator[](std::size_t i) { return coords_[i]; }

  std::span<const double> coords() const { return coords_; }
  const std::vector<double>& vec() const { return coords_; }

  auto begin() const { return coords_.begin(); }
  auto end() const { return coords_.end(); }

 private:
  std::vector<double> coords_;
};

namespace detail {

inline void require_same_dim(const TorusPoint& a, const TorusPoint& b) {
  if (a.dim() != b.dim()) {
    throw InputError("dimension mismatch: " + std::to_string(a.dim()) + " vs " + std::to_string(b.dim()));
  }
}

inline double min_entry(std::span<const double> v) { return *std::min_element(v.begin(), v.end()); }
inline double max_entry(std::span<const double> v) { return *std::max_element(v.begin(), v.end()); }

}  // namespace detail

/// Componentwise b - a as a plain vector.
inline std::vector<double> difference(const TorusPoint& b, const TorusPoint& a) {
  detail::require_same_dim(a, b);
  std::vector<double> d(a.dim());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = b[i] - a[i];
  return d;
}

/// Subtracts the minimum so that every entry is >= 0 and one is exactly 0.
inline std::vector<double> canonical_coords(std::span<const double> x) {
  const double lo = detail::min_entry(x);
  std::vector<double> out(x.begin(), x.end());
  for (double& v : out) v -= lo;
  return out;
}

inline TorusPoint canonical(const TorusPoint& x) { return TorusPoint(canonical_coords(x.coords())); }

/// Representative in the sum-zero hyperplane.
inline TorusPoint h_normalize(const TorusPoint& x) {
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.dim());
  std::vector<double> out(x.begin(), x.end());
  for (double& v : out) v -= mean;
  return TorusPoint(std::move(out));
}

/// Same class within `eps`, compared on canonical representatives.
inline bool equivalent(const TorusPoint& a, const TorusPoint& b, double eps = kEps) {
  detail::require_same_dim(a, b);
  const auto d = difference(b, a);
  return detail::max_entry(d) - detail::min_entry(d) <= eps;
}

/// All indices within `eps` of the minimum entry, in increasing order.
inline std::vector<std::size_t> argmin_set(std::span<const double> v, double eps = kEps) {
  const double lo = detail::min_entry(v);
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] - lo <= eps) out.push_back(i);
  }
  return out;
}

inline std::vector<std::size_t> argmax_set(std::span<const double> v, double eps = kEps) {
  const double hi = detail::max_entry(v);
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (hi - v[i] <= eps) out.push_back(i);
  }
  return out;
}

/// Asymmetric tropical distance: sum(b - a) - n * min(b - a).
inline double d_asym(const TorusPoint& a, const TorusPoint& b) {
  const auto d = difference(b, a);
  const double lo = detail::min_entry(d);
  double s = 0.0;
  for (double v : d) s += v - lo;
  return s;
}

/// Symmetric tropical distance: max(b - a) - min(b - a).
inline double d_sym(const TorusPoint& a, const TorusPoint& b) {
  const auto d = difference(b, a);
  return detail::max_entry(d) - detail::min_entry(d);
}

/// Ordered, nonempty list of points sharing one dimension.
class PointCloud {
 public:
  PointCloud() = default;

  explicit PointCloud(std::vector<TorusPoint> points) : points_(std::move(points)) {
    if (points_.empty()) throw InputError("point cloud must contain at least one point");
    for (const auto& p : points_) {
      if (p.dim() != points_.front().dim()) throw InputError("point cloud has mixed dimensions");
    }
  }

  PointCloud(std::initializer_list<TorusPoint> points) : PointCloud(std::vector<TorusPoint>(points)) {}

  std::size_t size() const { return points_.size(); }
  std::size_t dim() const { return points_.empty() ? 0 : points_.front().dim(); }
  bool empty() const { return points_.empty(); }
  const TorusPoint& operator[](std::size_t i) const { return points_[i]; }
  const std::vector<TorusPoint>& points() const { return points_; }

  auto begin() const { return points_.begin(); }
  auto end() const { return points_.end(); }

 private:
  std::vector<TorusPoint> points_;
};

/// Coordinates k such that no site attains its minimum of (x - v_i) at k.
///
/// Moving x along -e_k for k in this set decreases every increasing gauge
/// anchored at the sites; it is empty exactly on the max-tropical hull.
inline std::vector<std::size_t> descent_set(const PointCloud& cloud, const TorusPoint& x, double eps = kEps) {
  if (cloud.empty()) throw InputError("empty point cloud");
  if (cloud.dim() != x.dim()) throw InputError("dimension mismatch between cloud and point");
  std::vector<bool> covered(x.dim(), false);
  for (const auto& v : cloud) {
    for (std::size_t k : argmin_set(difference(x, v), eps)) covered[k] = true;
  }
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < covered.size(); ++k) {
    if (!covered[k]) out.push_back(k);
  }
  return out;
}

/// Membership in the max-tropical convex hull of the cloud, by the sector criterion.
inline bool in_hull_max(const PointCloud& cloud, const TorusPoint& x, double eps = kEps) {
  return descent_set(cloud, x, eps).empty();
}

/// d(a,x) + d(x,b) == d(a,b) under the asymmetric distance.
inline bool geodesic_contains(const TorusPoint& a, const TorusPoint& b, const TorusPoint& x, double eps = kEps) {
  detail::require_same_dim(a, b);
  detail::require_same_dim(a, x);
  const double lhs = d_asym(a, x) + d_asym(x, b);
  const double rhs = d_asym(a, b);
  return std::abs(lhs - rhs) <= eps * std::max(1.0, std::abs(rhs));
}

/// The n min-tropical vertices of the geodesic box [a,b]: v_j lowers coordinate j of b
/// until it reaches the minimal level of b - a.
inline std::vector<TorusPoint> segment_vertices(const TorusPoint& a, const TorusPoint& b) {
  const auto d = difference(b, a);
  const double lo = detail::min_entry(d);
  std::vector<TorusPoint> out;
  out.reserve(a.dim());
  for (std::size_t j = 0; j < a.dim(); ++j) {
    std::vector<double> v(b.begin(), b.end());
    v[j] -= d[j] - lo;
    out.push_back(canonical(TorusPoint(std::move(v))));
  }
  return out;
}

/// Coordinatewise min of a + lambda*1 and b + mu*1; not canonicalized, so the
/// result is usable as a sample of the min-tropical segment in R^n.
inline TorusPoint min_combination(const TorusPoint& a, const TorusPoint& b, double lambda, double mu) {
  detail::require_same_dim(a, b);
  std::vector<double> out(a.dim());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::min(a[i] + lambda, b[i] + mu);
  return TorusPoint(std::move(out));
}

inline TorusPoint max_combination(const TorusPoint& a, const TorusPoint& b, double lambda, double mu) {
  detail::require_same_dim(a, b);
  std::vector<double> out(a.dim());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::max(a[i] + lambda, b[i] + mu);
  return TorusPoint(std::move(out));
}

/// max_i (v_i + mu_i) over the whole cloud.
inline TorusPoint max_combination(const PointCloud& cloud, std::span<const double> mu) {
  if (mu.size() != cloud.size()) throw InputError("one coefficient per point required");
  std::vector<double> out(cloud.dim(), -INFINITY);
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    for (std::size_t j = 0; j < out.size(); ++j) out[j] = std::max(out[j], cloud[i][j] + mu[i]);
  }
  return TorusPoint(std::move(out));
}

}  // namespace troploc
