#include "lanetopo/topology.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

#include "lanetopo/query_kernels.hpp"

namespace lanetopo {

void MlpParams::validate() const {
  if (layers.empty()) throw std::invalid_argument("mlp: no layers");
  std::size_t width = input_width();
  if (width == 0) throw std::invalid_argument("mlp: zero input width");
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const auto& layer = layers[l];
    const std::string where = "mlp layer " + std::to_string(l) + ": ";
    if (layer.weights.empty()) throw std::invalid_argument(where + "empty weights");
    if (layer.bias.size() != layer.out_width()) {
      throw std::invalid_argument(where + "bias length does not match weight rows");
    }
    for (const auto& row : layer.weights) {
      if (row.size() != width) {
        throw std::invalid_argument(where + "expected input width " + std::to_string(width));
      }
      for (double w : row) {
        if (!std::isfinite(w)) throw std::invalid_argument(where + "non-finite weight");
      }
    }
    for (double b : layer.bias) {
      if (!std::isfinite(b)) throw std::invalid_argument(where + "non-finite bias");
    }
    width = layer.out_width();
  }
  if (width != 1) throw std::invalid_argument("mlp: output width must be 1");
}

namespace {

template <typename Fill>
MlpParams build(std::size_t input, std::span<const std::size_t> hidden, Fill&& fill) {
  MlpParams p;
  std::size_t in = input;
  auto add = [&](std::size_t out) {
    DenseLayer layer;
    layer.weights.assign(out, std::vector<double>(in));
    layer.bias.assign(out, 0.0);
    for (auto& row : layer.weights)
      for (auto& w : row) w = fill();
    for (auto& b : layer.bias) b = fill();
    p.layers.push_back(std::move(layer));
    in = out;
  };
  for (auto h : hidden) add(h);
  add(1);
  return p;
}

}  // namespace

MlpParams MlpParams::zeros(std::size_t input, std::span<const std::size_t> hidden) {
  return build(input, hidden, [] { return 0.0; });
}

MlpParams MlpParams::random(std::size_t input, std::span<const std::size_t> hidden,
                            std::uint64_t seed, double scale) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-scale, scale);
  return build(input, hidden, [&] { return dist(rng); });
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double mlp_score(const MlpParams& params, std::span<const double> x) {
  if (x.size() != params.input_width()) {
    throw std::invalid_argument("mlp_score: input width " + std::to_string(x.size()) +
                                " != expected " + std::to_string(params.input_width()));
  }
  std::vector<double> act(x.begin(), x.end());
  std::vector<double> next;
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    const auto& layer = params.layers[l];
    if (layer.in_width() != act.size()) throw std::invalid_argument("mlp_score: layer width mismatch");
    next.assign(layer.out_width(), 0.0);
    for (std::size_t o = 0; o < layer.out_width(); ++o) {
      double s = layer.bias[o];
      const auto& w = layer.weights[o];
      for (std::size_t i = 0; i < act.size(); ++i) s += w[i] * act[i];
      const bool hidden = l + 1 < params.layers.size();
      next[o] = hidden ? std::max(0.0, s) : s;
    }
    act.swap(next);
  }
  if (act.size() != 1) throw std::invalid_argument("mlp_score: output width must be 1");
  return sigmoid(act[0]);
}

std::vector<std::size_t> filter_by_prior(std::span<const double> confidences, double tau) {
  if (!(tau >= 0.0 && tau <= 1.0)) throw std::invalid_argument("prior threshold must be in [0,1]");
  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < confidences.size(); ++i) {
    if (confidences[i] > tau) kept.push_back(i);
  }
  return kept;
}

RealGrid pairwise_confidences(std::span<const std::vector<double>> source,
                              std::span<const std::vector<double>> target,
                              const MlpParams& params) {
  RealGrid out(source.size(), target.size(), 0.0);
  std::vector<double> pair;
  for (std::size_t i = 0; i < source.size(); ++i) {
    for (std::size_t j = 0; j < target.size(); ++j) {
      pair.assign(source[i].begin(), source[i].end());
      pair.insert(pair.end(), target[j].begin(), target[j].end());
      out(i, j) = mlp_score(params, pair);
    }
  }
  return out;
}

BoolGrid apply_threshold(const RealGrid& confidences) {
  BoolGrid edges(confidences.rows(), confidences.cols(), false);
  for (std::size_t i = 0; i < confidences.rows(); ++i)
    for (std::size_t j = 0; j < confidences.cols(); ++j) edges(i, j) = confidences(i, j) > 0.5;
  return edges;
}

BoolGrid geometric_override(const BoolGrid& edges, std::span<const LaneCenterline> lanes,
                            double gap_limit) {
  if (edges.rows() != lanes.size() || edges.cols() != lanes.size()) {
    throw std::invalid_argument("geometric_override: edge matrix is " +
                                std::to_string(edges.rows()) + "x" + std::to_string(edges.cols()) +
                                " but there are " + std::to_string(lanes.size()) + " lanes");
  }
  BoolGrid out = edges;
  for (std::size_t i = 0; i < lanes.size(); ++i) {
    for (std::size_t j = 0; j < lanes.size(); ++j) {
      if (i == j || out(i, j)) continue;
      if (successor_gap(lanes[i], lanes[j]) < gap_limit) out(i, j) = true;
    }
  }
  return out;
}

std::vector<double> lane_pair_feature(const LaneCenterline& lane, const DetectionRange& range) {
  if (!lane.feature) throw std::invalid_argument("lane has no feature (LC query) for topology inference");
  if (lane.points.empty()) throw std::invalid_argument("lane has no points");
  return augment_with_endpoints(*lane.feature, normalize_point(lane.points.front(), range),
                                normalize_point(lane.points.back(), range));
}

namespace {

TopologyMatrix to_matrix(RealGrid confidence) {
  TopologyMatrix m;
  m.edges = apply_threshold(confidence);
  m.forced = BoolGrid(confidence.rows(), confidence.cols(), false);
  m.confidence = std::move(confidence);
  return m;
}

}  // namespace

LaneGraph infer_lane_graph(std::span<const LaneCenterline> lanes,
                           std::span<const TrafficElement> traffic_elements,
                           const MlpParams& lane_params, const MlpParams& te_params,
                           const TopologyConfig& config) {
  config.range.validate();
  const auto gated_lanes = gate_instances(lanes, config.tau);
  const auto gated_tes = gate_instances(traffic_elements, config.tau);

  std::vector<std::vector<double>> lane_feats;
  for (const auto& lane : gated_lanes.items) lane_feats.push_back(lane_pair_feature(lane, config.range));
  std::vector<std::vector<double>> te_feats;
  for (const auto& te : gated_tes.items) {
    if (!te.feature) throw std::invalid_argument("traffic element has no feature (TE query) for topology inference");
    te_feats.push_back(*te.feature);
  }

  LaneGraph g;
  g.lane_index = gated_lanes.original_index;
  g.te_index = gated_tes.original_index;
  g.lane_lane = to_matrix(pairwise_confidences(lane_feats, lane_feats, lane_params));
  g.lane_te = to_matrix(pairwise_confidences(lane_feats, te_feats, te_params));

  // A lane never succeeds itself, whatever the classifier says.
  for (std::size_t i = 0; i < g.lane_lane.edges.rows(); ++i) g.lane_lane.edges(i, i) = false;

  if (config.geometric_override) {
    const BoolGrid overridden =
        geometric_override(g.lane_lane.edges, gated_lanes.items, config.gap_limit);
    for (std::size_t i = 0; i < overridden.rows(); ++i)
      for (std::size_t j = 0; j < overridden.cols(); ++j)
        g.lane_lane.forced(i, j) = overridden(i, j) && !g.lane_lane.edges(i, j);
    g.lane_lane.edges = overridden;
  }
  return g;
}

}  // namespace lanetopo
