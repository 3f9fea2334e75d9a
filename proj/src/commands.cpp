#include "lanetopo/commands.hpp"

#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <thread>

#include "lanetopo/errors.hpp"
#include "lanetopo/io.hpp"
#include "lanetopo/metrics.hpp"
#include "lanetopo/scenesim.hpp"

namespace lanetopo::commands {

unsigned threads_from_env() {
  for (const char* name : {"LANETOPO_THREADS", "TOOL_THREADS"}) {
    const char* raw = std::getenv(name);
    if (!raw || !*raw) continue;
    const std::string_view text(raw);
    unsigned value = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size() || value == 0) {
      throw ConfigError(std::string(name) + " must be a positive integer, got '" + raw + "'");
    }
    return value;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::string evaluate(const std::filesystem::path& gt, const std::filesystem::path& pred,
                     const ToolConfig& config, unsigned threads) {
  const auto gt_frames = io::load_frames(gt);
  const auto pred_frames = io::load_frames(pred);
  EvalConfig eval = config.eval;
  eval.threads = threads;
  EvalReport report;
  try {
    report = lanetopo::evaluate(pred_frames, gt_frames, eval);
  } catch (const std::invalid_argument& e) {
    throw SchemaError(e.what());
  }
  return io::report_to_json(report).dump(2) + "\n";
}

void generate(const ToolConfig& config, const std::filesystem::path& out_gt,
              const std::filesystem::path& out_pred) {
  const auto& g = config.generate;
  std::vector<SceneFrame> gt, pred;
  gt.reserve(g.frames);
  pred.reserve(g.frames);
  for (std::size_t i = 0; i < g.frames; ++i) {
    char id[32];
    std::snprintf(id, sizeof id, "frame_%04zu", i);
    SceneSpec spec;
    spec.seed = g.seed + i;
    spec.n_lanes = g.n_lanes;
    spec.n_tes = g.n_tes;
    spec.layout = g.layout;
    spec.feature_dim = g.feature_dim;
    spec.frame_id = id;
    gt.push_back(generate_scene(spec));
    pred.push_back(perturb_scene(gt.back(), config.perturbation));
  }
  io::save_frames(out_gt, gt);
  io::save_frames(out_pred, pred);
}

std::vector<SceneFrame> infer(std::vector<SceneFrame> frames, const MlpParams& lane_mlp,
                              const MlpParams& te_mlp, const ToolConfig& config) {
  const TopologyConfig topo = config.topology();
  for (auto& f : frames) {
    LaneGraph g;
    try {
      g = infer_lane_graph(f.lanes, f.traffic_elements, lane_mlp, te_mlp, topo);
    } catch (const std::invalid_argument& e) {
      throw SchemaError("frame '" + f.frame_id + "': infer requires lane and traffic-element " +
                        "features and matching MLP widths: " + e.what());
    }
    const std::size_t L = f.lanes.size();
    const std::size_t T = f.traffic_elements.size();
    f.lane_lane = BoolGrid(L, L, false);
    f.lane_te = BoolGrid(L, T, false);
    RealGrid ll_conf(L, L, 0.0), lt_conf(L, T, 0.0);
    for (std::size_t i = 0; i < g.lane_index.size(); ++i) {
      const auto oi = g.lane_index[i];
      for (std::size_t j = 0; j < g.lane_index.size(); ++j) {
        const auto oj = g.lane_index[j];
        f.lane_lane(oi, oj) = g.lane_lane.edges(i, j);
        ll_conf(oi, oj) = g.lane_lane.confidence(i, j);
      }
      for (std::size_t t = 0; t < g.te_index.size(); ++t) {
        const auto ot = g.te_index[t];
        f.lane_te(oi, ot) = g.lane_te.edges(i, t);
        lt_conf(oi, ot) = g.lane_te.confidence(i, t);
      }
    }
    f.lane_lane_confidence = std::move(ll_conf);
    f.lane_te_confidence = std::move(lt_conf);
  }
  return frames;
}

ConvertMode convert_mode_from_string(std::string_view name) {
  if (name == "bezier5_to_points11") return ConvertMode::bezier5_to_points11;
  if (name == "resample11") return ConvertMode::resample11;
  throw ConfigError("unknown convert mode '" + std::string(name) +
                    "' (expected bezier5_to_points11 or resample11)");
}

std::vector<SceneFrame> convert(const std::filesystem::path& in, ConvertMode mode) {
  const auto rule = mode == ConvertMode::bezier5_to_points11 ? io::PointRule::bezier_controls
                                                              : io::PointRule::at_least_two;
  auto frames = io::load_frames(in, rule);
  // Dense evaluation before the chord-length resample keeps the output equally
  // spaced for any control polygon.
  constexpr std::size_t kDenseSamples = 201;
  for (auto& f : frames) {
    for (std::size_t i = 0; i < f.lanes.size(); ++i) {
      auto& lane = f.lanes[i];
      try {
        if (mode == ConvertMode::bezier5_to_points11) {
          BezierCurve curve;
          std::copy(lane.points.begin(), lane.points.end(), curve.control_points.begin());
          Polyline3 dense = bezier_to_polyline(curve, kDenseSamples);
          dense.front() = curve.control_points.front();
          dense.back() = curve.control_points.back();
          lane.points = resample_polyline(dense, kLanePoints);
        } else {
          lane.points = resample_polyline(lane.points, kLanePoints);
        }
      } catch (const std::invalid_argument& e) {
        throw SchemaError("frame '" + f.frame_id + "': lanes[" + std::to_string(i) +
                          "].points: " + e.what());
      }
    }
    validate_frame(f);
  }
  return frames;
}

MlpParams init_mlp(const ToolConfig& config, MlpKind kind, std::size_t dim, bool zero) {
  if (dim == 0) throw ConfigError("feature dimension must be positive");
  const std::size_t lane_width = dim + 6;
  const std::size_t input = kind == MlpKind::lane_lane ? 2 * lane_width : lane_width + dim;
  const auto hidden = hidden_widths(config.mlp, dim);
  if (zero) return MlpParams::zeros(input, hidden);
  const std::uint64_t seed = config.mlp.seed + (kind == MlpKind::lane_te ? 1 : 0);
  return MlpParams::random(input, hidden, seed);
}

}  // namespace lanetopo::commands
