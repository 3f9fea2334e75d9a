#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace lanetopo {

/// A point in the ego frame, meters.
struct Point3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend bool operator==(const Point3&, const Point3&) = default;
};

using Polyline3 = std::vector<Point3>;

inline constexpr std::size_t kLanePoints = 11;
inline constexpr std::size_t kBezierControlPoints = 5;

double distance(const Point3& a, const Point3& b);

/// Axis-aligned perception volume used to map lane coordinates to [0,1].
struct DetectionRange {
  double x_min = -50.0, x_max = 50.0;
  double y_min = -25.0, y_max = 25.0;
  double z_min = -3.0, z_max = 3.0;

  /// Throws std::invalid_argument unless min < max on every axis.
  void validate() const;

  friend bool operator==(const DetectionRange&, const DetectionRange&) = default;
};

/// Degree-4 curve; the alternative lane encoding to the 11-point form.
struct BezierCurve {
  std::array<Point3, kBezierControlPoints> control_points;
};

/// Samples `n` points equally spaced in chord length along `line`. The first
/// and last samples are the input endpoints, bit for bit.
///
/// Throws std::invalid_argument on fewer than 2 points, n < 2, or a polyline
/// whose total length is zero ("degenerate polyline").
Polyline3 resample_polyline(std::span<const Point3> line, std::size_t n);

/// Evaluates the Bernstein form at t = k/(n-1), k = 0..n-1.
Polyline3 bezier_to_polyline(const BezierCurve& curve, std::size_t n);

Polyline3 normalize_points(std::span<const Point3> line, const DetectionRange& range);
Polyline3 denormalize_points(std::span<const Point3> line, const DetectionRange& range);
Point3 normalize_point(const Point3& p, const DetectionRange& range);

/// Discrete Frechet distance between two point sequences (O(|a||b|) DP).
double discrete_frechet(std::span<const Point3> a, std::span<const Point3> b);

/// Distance from the last point of `from` to the first point of `to`.
/// Directed: a small gap means `to` can continue `from`.
double successor_gap(std::span<const Point3> from, std::span<const Point3> to);

}  // namespace lanetopo
