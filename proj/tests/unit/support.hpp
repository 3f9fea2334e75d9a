#pragma once

#include <random>
#include <vector>

#include "lanetopo/geometry.hpp"
#include "lanetopo/scene.hpp"

namespace lanetopo::test {

inline Point3 random_point(std::mt19937_64& rng, double scale = 10.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  return {u(rng), u(rng), u(rng)};
}

inline Polyline3 random_polyline(std::mt19937_64& rng, std::size_t n, double scale = 10.0) {
  Polyline3 line;
  for (std::size_t i = 0; i < n; ++i) line.push_back(random_point(rng, scale));
  return line;
}

inline Polyline3 straight(Point3 a, Point3 b, std::size_t n = kLanePoints) {
  Polyline3 line;
  for (std::size_t k = 0; k < n; ++k) {
    const double t = static_cast<double>(k) / static_cast<double>(n - 1);
    line.push_back({a.x + t * (b.x - a.x), a.y + t * (b.y - a.y), a.z + t * (b.z - a.z)});
  }
  return line;
}

inline LaneCenterline lane(Polyline3 pts, double confidence = 1.0,
                           LaneClass cls = LaneClass::normal) {
  LaneCenterline l;
  l.points = std::move(pts);
  l.confidence = confidence;
  l.lane_class = cls;
  return l;
}

}  // namespace lanetopo::test
