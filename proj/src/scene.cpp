#include "lanetopo/scene.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "lanetopo/errors.hpp"

namespace lanetopo {

std::string_view to_string(LaneClass c) {
  switch (c) {
    case LaneClass::normal:
      return "normal";
    case LaneClass::intersection_virtual:
      return "intersection_virtual";
  }
  return "normal";
}

LaneClass lane_class_from_string(std::string_view name) {
  if (name == "normal") return LaneClass::normal;
  if (name == "intersection_virtual") return LaneClass::intersection_virtual;
  throw std::invalid_argument("unknown lane_class '" + std::string(name) + "'");
}

double iou(const Box2& a, const Box2& b) {
  const double w = std::min(a.x2, b.x2) - std::max(a.x1, b.x1);
  const double h = std::min(a.y2, b.y2) - std::max(a.y1, b.y1);
  if (w <= 0.0 || h <= 0.0) return 0.0;
  const double inter = w * h;
  return inter / (a.area() + b.area() - inter);
}

double successor_gap(const LaneCenterline& from, const LaneCenterline& to) {
  return successor_gap(std::span<const Point3>(from.points), std::span<const Point3>(to.points));
}

namespace {

[[noreturn]] void fail(const SceneFrame& f, const std::string& path, const std::string& what) {
  throw SchemaError("frame '" + f.frame_id + "': " + path + ": " + what);
}

bool finite(const Point3& p) {
  return std::isfinite(p.x) && std::isfinite(p.y) && std::isfinite(p.z);
}

void check_confidence(const SceneFrame& f, const std::string& path, double c) {
  if (!(c >= 0.0 && c <= 1.0)) fail(f, path, "confidence must be in [0,1]");
}

}  // namespace

void validate_frame(const SceneFrame& f) {
  const auto n_lanes = f.lanes.size();
  const auto n_tes = f.traffic_elements.size();
  for (std::size_t i = 0; i < n_lanes; ++i) {
    const auto& lane = f.lanes[i];
    const std::string path = "lanes[" + std::to_string(i) + "]";
    if (lane.points.size() != kLanePoints) {
      fail(f, path + ".points",
           "lane must have exactly 11 points (got " + std::to_string(lane.points.size()) + ")");
    }
    if (!std::all_of(lane.points.begin(), lane.points.end(), finite)) {
      fail(f, path + ".points", "non-finite coordinate");
    }
    check_confidence(f, path + ".confidence", lane.confidence);
  }
  for (std::size_t i = 0; i < n_tes; ++i) {
    const auto& te = f.traffic_elements[i];
    const std::string path = "traffic_elements[" + std::to_string(i) + "]";
    if (!(te.bbox.x1 < te.bbox.x2) || !(te.bbox.y1 < te.bbox.y2)) {
      fail(f, path + ".bbox", "box must satisfy x1 < x2 and y1 < y2");
    }
    check_confidence(f, path + ".confidence", te.confidence);
  }
  auto check_shape = [&](const auto& g, std::size_t rows, std::size_t cols, const char* name) {
    if (g.rows() != rows || g.cols() != cols) {
      fail(f, name,
           "expected " + std::to_string(rows) + "x" + std::to_string(cols) + " matrix, got " +
               std::to_string(g.rows()) + "x" + std::to_string(g.cols()));
    }
  };
  check_shape(f.lane_lane, n_lanes, n_lanes, "lane_lane");
  check_shape(f.lane_te, n_lanes, n_tes, "lane_te");
  if (f.lane_lane_confidence) {
    check_shape(*f.lane_lane_confidence, n_lanes, n_lanes, "lane_lane_confidence");
  }
  if (f.lane_te_confidence) check_shape(*f.lane_te_confidence, n_lanes, n_tes, "lane_te_confidence");
}

}  // namespace lanetopo
