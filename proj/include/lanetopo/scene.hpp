#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lanetopo/geometry.hpp"
#include "lanetopo/grid.hpp"

namespace lanetopo {

enum class LaneClass { normal, intersection_virtual };

inline constexpr std::array<LaneClass, 2> kLaneClasses{LaneClass::normal,
                                                       LaneClass::intersection_virtual};

std::string_view to_string(LaneClass c);
/// Throws std::invalid_argument on an unknown name.
LaneClass lane_class_from_string(std::string_view name);

struct LaneCenterline {
  Polyline3 points;  // kLanePoints entries once validated
  double confidence = 1.0;
  LaneClass lane_class = LaneClass::normal;
  std::optional<std::vector<double>> feature;

  friend bool operator==(const LaneCenterline&, const LaneCenterline&) = default;
};

/// Front-view box in pixels, x1 < x2 and y1 < y2.
struct Box2 {
  double x1 = 0.0, y1 = 0.0, x2 = 0.0, y2 = 0.0;

  double area() const { return (x2 - x1) * (y2 - y1); }
  friend bool operator==(const Box2&, const Box2&) = default;
};

double iou(const Box2& a, const Box2& b);

struct TrafficElement {
  Box2 bbox;
  std::string category;
  double confidence = 1.0;
  std::optional<std::vector<double>> feature;

  friend bool operator==(const TrafficElement&, const TrafficElement&) = default;
};

/// One annotated (or predicted) frame. Edge matrices are booleans; the
/// optional confidence grids carry scores for predicted relationships.
/// When a confidence grid is absent, an edge counts with confidence 1.
struct SceneFrame {
  std::string frame_id;
  std::vector<LaneCenterline> lanes;
  std::vector<TrafficElement> traffic_elements;
  BoolGrid lane_lane;
  BoolGrid lane_te;
  std::optional<RealGrid> lane_lane_confidence;
  std::optional<RealGrid> lane_te_confidence;

  friend bool operator==(const SceneFrame&, const SceneFrame&) = default;
};

double successor_gap(const LaneCenterline& from, const LaneCenterline& to);

/// Checks lane point counts, confidence ranges, box ordering and matrix
/// shapes. Throws SchemaError with the frame id and a field path.
void validate_frame(const SceneFrame& frame);

}  // namespace lanetopo
