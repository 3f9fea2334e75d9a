#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "lanetopo/geometry.hpp"
#include "lanetopo/grid.hpp"
#include "lanetopo/scene.hpp"

namespace lanetopo {

/// Fully connected layer; weights are (out x in), row-major.
struct DenseLayer {
  std::vector<std::vector<double>> weights;
  std::vector<double> bias;

  std::size_t in_width() const { return weights.empty() ? 0 : weights.front().size(); }
  std::size_t out_width() const { return weights.size(); }

  friend bool operator==(const DenseLayer&, const DenseLayer&) = default;
};

/// Relationship classifier: ReLU between layers, sigmoid on the single output.
struct MlpParams {
  std::vector<DenseLayer> layers;

  std::size_t input_width() const { return layers.empty() ? 0 : layers.front().in_width(); }

  /// Throws std::invalid_argument on incompatible widths, a final width other
  /// than 1, or non-finite values.
  void validate() const;

  static MlpParams zeros(std::size_t input, std::span<const std::size_t> hidden);
  /// Uniform(-scale, scale) weights from a seeded engine; for tests and demos.
  static MlpParams random(std::size_t input, std::span<const std::size_t> hidden,
                          std::uint64_t seed, double scale = 0.5);

  friend bool operator==(const MlpParams&, const MlpParams&) = default;
};

double sigmoid(double x);

/// Forward pass followed by the logistic function.
double mlp_score(const MlpParams& params, std::span<const double> x);

/// Indices (in input order) of the confidences strictly above `tau`.
std::vector<std::size_t> filter_by_prior(std::span<const double> confidences, double tau);

template <typename Instance>
struct Gated {
  std::vector<Instance> items;
  std::vector<std::size_t> original_index;
};

template <typename Instance>
Gated<Instance> gate_instances(std::span<const Instance> instances, double tau) {
  std::vector<double> conf;
  conf.reserve(instances.size());
  for (const auto& inst : instances) conf.push_back(inst.confidence);
  Gated<Instance> out;
  out.original_index = filter_by_prior(conf, tau);
  for (auto i : out.original_index) out.items.push_back(instances[i]);
  return out;
}

/// Entry (i, j) scores concat(source[i], target[j]).
RealGrid pairwise_confidences(std::span<const std::vector<double>> source,
                              std::span<const std::vector<double>> target,
                              const MlpParams& params);

/// Edge iff confidence > 0.5.
BoolGrid apply_threshold(const RealGrid& confidences);

/// ORs in every pair whose directed successor gap is below `gap_limit`.
/// The diagonal is never forced.
BoolGrid geometric_override(const BoolGrid& edges, std::span<const LaneCenterline> lanes,
                            double gap_limit = 3.0);

struct TopologyMatrix {
  RealGrid confidence;
  BoolGrid edges;
  BoolGrid forced;  // edges that exist only because of the gap rule
};

struct TopologyConfig {
  double tau = 0.3;
  double gap_limit = 3.0;
  bool geometric_override = true;
  DetectionRange range;
};

/// Indices into the gated lane / traffic-element lists, with the map back to
/// the caller's original order.
struct LaneGraph {
  TopologyMatrix lane_lane;
  TopologyMatrix lane_te;
  std::vector<std::size_t> lane_index;
  std::vector<std::size_t> te_index;
};

/// LC query augmented with the normalized start and end points.
std::vector<double> lane_pair_feature(const LaneCenterline& lane, const DetectionRange& range);

/// Gating, pairwise scoring, thresholding and the lane-lane gap override.
/// Throws std::invalid_argument if a gated instance carries no feature.
LaneGraph infer_lane_graph(std::span<const LaneCenterline> lanes,
                           std::span<const TrafficElement> traffic_elements,
                           const MlpParams& lane_params, const MlpParams& te_params,
                           const TopologyConfig& config);

}  // namespace lanetopo
