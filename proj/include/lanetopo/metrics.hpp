#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lanetopo/grid.hpp"
#include "lanetopo/scene.hpp"

namespace lanetopo {

struct MatchEntry {
  double confidence = 0.0;
  std::optional<std::size_t> gt;  // matched ground-truth index, if any

  friend bool operator==(const MatchEntry&, const MatchEntry&) = default;
};

/// Per-prediction match outcome. Entries keep the caller's prediction order;
/// average_precision ranks them by confidence.
struct MatchResult {
  std::vector<MatchEntry> predictions;
  std::size_t num_gt = 0;
  double threshold = 0.0;

  /// Concatenates `other`, shifting its GT indices past this result's GTs so
  /// that each pooled GT is still matched at most once.
  void append(const MatchResult& other);

  friend bool operator==(const MatchResult&, const MatchResult&) = default;
};

/// Greedy matching. Predictions are visited by descending confidence (ties
/// by lower prediction index); each takes the nearest unmatched GT whose
/// distance is <= threshold, ties to the lower GT index.
/// `distances` is (num_predictions x num_gt).
MatchResult match_instances(std::span<const double> confidences, const RealGrid& distances,
                            double threshold);

template <typename Pred, typename Gt, typename DistanceFn>
MatchResult match_instances(std::span<const Pred> preds, std::span<const Gt> gts,
                            DistanceFn&& distance_fn, double threshold) {
  RealGrid d(preds.size(), gts.size());
  std::vector<double> conf;
  conf.reserve(preds.size());
  for (std::size_t i = 0; i < preds.size(); ++i) {
    conf.push_back(preds[i].confidence);
    for (std::size_t j = 0; j < gts.size(); ++j) d(i, j) = distance_fn(preds[i], gts[j]);
  }
  return match_instances(conf, d, threshold);
}

double lane_distance(const LaneCenterline& a, const LaneCenterline& b);  // discrete Frechet
double box_distance(const TrafficElement& a, const TrafficElement& b);   // 1 - IoU

/// All-point interpolated AP: area under the monotone precision envelope.
/// With no GT: 1 if there are also no predictions, else 0.
double average_precision(const MatchResult& match);

/// Mean AP over Frechet thresholds; each threshold's AP is the mean over the
/// lane classes present in the ground truth.
double det_l(std::span<const LaneCenterline> pred, std::span<const LaneCenterline> gt,
             std::span<const double> frechet_thresholds);

/// Mean AP over the traffic-element categories present in the ground truth.
double det_t(std::span<const TrafficElement> pred, std::span<const TrafficElement> gt,
             double iou_threshold);

/// Relationship edges of one graph side: which edges exist and how confident
/// they are. `confidence` may be null, in which case edges score 1.
struct EdgeView {
  const BoolGrid* edges = nullptr;
  const RealGrid* confidence = nullptr;
};

/// Edge-level matches: each predicted edge (i, j) is a true positive iff both
/// endpoints are matched and the GT has the edge between their matches.
/// num_gt counts every GT edge, so edges on unmatched vertices are misses.
MatchResult edge_matches(EdgeView pred, const BoolGrid& gt_edges,
                         std::span<const std::optional<std::size_t>> row_match,
                         std::span<const std::optional<std::size_t>> col_match);

/// TOP for one relationship type: AP over edge_matches.
double top_score(EdgeView pred, const BoolGrid& gt_edges,
                 std::span<const std::optional<std::size_t>> row_match,
                 std::span<const std::optional<std::size_t>> col_match);

/// Per-prediction GT index, as used by edge_matches.
std::vector<std::optional<std::size_t>> vertex_assignment(const MatchResult& match);

enum class ScaleFunction { sqrt, identity };

std::string_view to_string(ScaleFunction f);
ScaleFunction scale_function_from_string(std::string_view name);

/// Rescales a TOP score before it enters OLS. Throws outside [0,1].
double f_scale(double x, ScaleFunction fn = ScaleFunction::sqrt);

/// 1/4 * (det_l + det_t + f(top_ll) + f(top_lt)). Throws outside [0,1].
double ols(double det_l, double det_t, double top_ll, double top_lt,
           ScaleFunction fn = ScaleFunction::sqrt);

struct EvalConfig {
  std::vector<double> frechet_thresholds{1.0, 2.0, 3.0};
  double iou_threshold = 0.75;
  double top_lane_match_threshold = 1.5;  // Frechet, meters
  double top_te_match_iou = 0.75;
  ScaleFunction scale = ScaleFunction::sqrt;
  unsigned threads = 1;

  void validate() const;  // std::invalid_argument
};

struct EdgeCounts {
  std::size_t gt_edges = 0;
  std::size_t pred_edges = 0;
  std::size_t true_positives = 0;
};

struct EvalReport {
  double det_l = 0.0;
  double det_t = 0.0;
  double top_ll = 0.0;
  double top_lt = 0.0;
  double ols = 0.0;

  struct Breakdowns {
    std::size_t frames = 0;
    std::vector<std::pair<double, double>> det_l_per_threshold;  // (meters, AP)
    std::map<std::string, double> det_l_per_class;               // mean over thresholds
    std::map<std::string, double> det_t_per_category;
    EdgeCounts top_ll;
    EdgeCounts top_lt;
  } breakdowns;
};

/// Dataset-level evaluation: matches are computed per frame (in parallel when
/// config.threads > 1) and pooled before any AP is taken. Frames are paired
/// by frame_id; the result does not depend on the thread count.
/// Throws std::invalid_argument listing ids present on one side only.
EvalReport evaluate(std::span<const SceneFrame> pred_frames, std::span<const SceneFrame> gt_frames,
                    const EvalConfig& config);

}  // namespace lanetopo
