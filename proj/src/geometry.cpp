#include "lanetopo/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lanetopo {

double distance(const Point3& a, const Point3& b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  const double dz = a.z - b.z;
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

void DetectionRange::validate() const {
  if (!(x_min < x_max) || !(y_min < y_max) || !(z_min < z_max)) {
    throw std::invalid_argument("detection range requires min < max on every axis");
  }
}

Polyline3 resample_polyline(std::span<const Point3> line, std::size_t n) {
  if (line.size() < 2) throw std::invalid_argument("polyline needs at least 2 points");
  if (n < 2) throw std::invalid_argument("resample count must be at least 2");

  std::vector<double> cumulative(line.size(), 0.0);
  for (std::size_t i = 1; i < line.size(); ++i) {
    cumulative[i] = cumulative[i - 1] + distance(line[i - 1], line[i]);
  }
  const double total = cumulative.back();
  if (!(total > 0.0)) throw std::invalid_argument("degenerate polyline");

  Polyline3 out;
  out.reserve(n);
  out.push_back(line.front());
  std::size_t seg = 1;
  for (std::size_t k = 1; k + 1 < n; ++k) {
    const double target = total * static_cast<double>(k) / static_cast<double>(n - 1);
    while (seg + 1 < line.size() && cumulative[seg] < target) ++seg;
    const double seg_len = cumulative[seg] - cumulative[seg - 1];
    const Point3& a = line[seg - 1];
    const Point3& b = line[seg];
    if (seg_len <= 0.0) {
      out.push_back(b);
      continue;
    }
    const double t = std::clamp((target - cumulative[seg - 1]) / seg_len, 0.0, 1.0);
    out.push_back({a.x + t * (b.x - a.x), a.y + t * (b.y - a.y), a.z + t * (b.z - a.z)});
  }
  out.push_back(line.back());
  return out;
}

Polyline3 bezier_to_polyline(const BezierCurve& curve, std::size_t n) {
  if (n < 2) throw std::invalid_argument("sample count must be at least 2");
  constexpr std::array<double, kBezierControlPoints> binom{1.0, 4.0, 6.0, 4.0, 1.0};
  const auto& cp = curve.control_points;

  Polyline3 out;
  out.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double t = static_cast<double>(k) / static_cast<double>(n - 1);
    const double s = 1.0 - t;
    Point3 p;
    for (std::size_t i = 0; i < kBezierControlPoints; ++i) {
      const double w = binom[i] * std::pow(t, static_cast<double>(i)) *
                       std::pow(s, static_cast<double>(kBezierControlPoints - 1 - i));
      p.x += w * cp[i].x;
      p.y += w * cp[i].y;
      p.z += w * cp[i].z;
    }
    out.push_back(p);
  }
  return out;
}

Point3 normalize_point(const Point3& p, const DetectionRange& r) {
  return {(p.x - r.x_min) / (r.x_max - r.x_min), (p.y - r.y_min) / (r.y_max - r.y_min),
          (p.z - r.z_min) / (r.z_max - r.z_min)};
}

Polyline3 normalize_points(std::span<const Point3> line, const DetectionRange& range) {
  range.validate();
  Polyline3 out;
  out.reserve(line.size());
  for (const auto& p : line) out.push_back(normalize_point(p, range));
  return out;
}

Polyline3 denormalize_points(std::span<const Point3> line, const DetectionRange& r) {
  r.validate();
  Polyline3 out;
  out.reserve(line.size());
  for (const auto& u : line) {
    out.push_back({r.x_min + u.x * (r.x_max - r.x_min), r.y_min + u.y * (r.y_max - r.y_min),
                   r.z_min + u.z * (r.z_max - r.z_min)});
  }
  return out;
}

double discrete_frechet(std::span<const Point3> a, std::span<const Point3> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("discrete_frechet: empty polyline");

  // Rolling row of the coupling table: row[j] = F(i, j).
  std::vector<double> row(b.size());
  row[0] = distance(a[0], b[0]);
  for (std::size_t j = 1; j < b.size(); ++j) row[j] = std::max(row[j - 1], distance(a[0], b[j]));

  for (std::size_t i = 1; i < a.size(); ++i) {
    double diag = row[0];
    row[0] = std::max(row[0], distance(a[i], b[0]));
    for (std::size_t j = 1; j < b.size(); ++j) {
      const double up = row[j];
      const double best = std::min({diag, up, row[j - 1]});
      row[j] = std::max(best, distance(a[i], b[j]));
      diag = up;
    }
  }
  return row.back();
}

double successor_gap(std::span<const Point3> from, std::span<const Point3> to) {
  if (from.empty() || to.empty()) throw std::invalid_argument("successor_gap: empty polyline");
  return distance(from.back(), to.front());
}

}  // namespace lanetopo
