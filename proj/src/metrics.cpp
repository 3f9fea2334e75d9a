#include "lanetopo/metrics.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <thread>
#include <unordered_map>

namespace lanetopo {

void MatchResult::append(const MatchResult& other) {
  for (const auto& e : other.predictions) {
    MatchEntry shifted = e;
    if (shifted.gt) *shifted.gt += num_gt;
    predictions.push_back(shifted);
  }
  num_gt += other.num_gt;
}

namespace {

std::vector<std::size_t> by_descending_confidence(std::span<const double> confidences) {
  std::vector<std::size_t> order(confidences.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return confidences[a] > confidences[b];
  });
  return order;
}

}  // namespace

MatchResult match_instances(std::span<const double> confidences, const RealGrid& distances,
                            double threshold) {
  if (distances.rows() != confidences.size()) {
    throw std::invalid_argument("match_instances: distance rows must equal prediction count");
  }
  MatchResult result;
  result.num_gt = distances.cols();
  result.threshold = threshold;
  result.predictions.resize(confidences.size());
  std::vector<bool> taken(distances.cols(), false);

  for (std::size_t p : by_descending_confidence(confidences)) {
    result.predictions[p].confidence = confidences[p];
    std::optional<std::size_t> best;
    double best_d = 0.0;
    for (std::size_t g = 0; g < distances.cols(); ++g) {
      const double d = distances(p, g);
      if (taken[g] || !(d <= threshold)) continue;
      if (!best || d < best_d) {
        best = g;
        best_d = d;
      }
    }
    if (best) taken[*best] = true;
    result.predictions[p].gt = best;
  }
  return result;
}

double lane_distance(const LaneCenterline& a, const LaneCenterline& b) {
  return discrete_frechet(a.points, b.points);
}

double box_distance(const TrafficElement& a, const TrafficElement& b) {
  return 1.0 - iou(a.bbox, b.bbox);
}

double average_precision(const MatchResult& match) {
  const auto& preds = match.predictions;
  if (match.num_gt == 0) return preds.empty() ? 1.0 : 0.0;
  if (preds.empty()) return 0.0;

  std::vector<double> conf;
  conf.reserve(preds.size());
  for (const auto& e : preds) conf.push_back(e.confidence);
  const auto order = by_descending_confidence(conf);

  std::vector<double> precision(order.size());
  std::vector<bool> is_tp(order.size());
  std::size_t tp = 0;
  for (std::size_t k = 0; k < order.size(); ++k) {
    is_tp[k] = preds[order[k]].gt.has_value();
    if (is_tp[k]) ++tp;
    precision[k] = static_cast<double>(tp) / static_cast<double>(k + 1);
  }
  // Precision envelope: best precision at this rank or any deeper one.
  for (std::size_t k = order.size() - 1; k-- > 0;) {
    precision[k] = std::max(precision[k], precision[k + 1]);
  }
  // Each TP advances recall by 1/num_gt.
  double area = 0.0;
  for (std::size_t k = 0; k < order.size(); ++k) {
    if (is_tp[k]) area += precision[k];
  }
  return area / static_cast<double>(match.num_gt);
}

namespace {

double mean_ap_over_present(const std::map<std::string, MatchResult>& by_label,
                            std::map<std::string, double>* per_label = nullptr) {
  double sum = 0.0;
  std::size_t present = 0;
  bool any_pred = false;
  for (const auto& [label, m] : by_label) {
    any_pred = any_pred || !m.predictions.empty();
    if (m.num_gt == 0) continue;
    const double ap = average_precision(m);
    if (per_label) (*per_label)[label] = ap;
    sum += ap;
    ++present;
  }
  if (present == 0) return any_pred ? 0.0 : 1.0;
  return sum / static_cast<double>(present);
}

std::map<std::string, MatchResult> lane_matches_by_class(std::span<const LaneCenterline> pred,
                                                         std::span<const LaneCenterline> gt,
                                                         double threshold) {
  std::map<std::string, MatchResult> out;
  for (LaneClass c : kLaneClasses) {
    std::vector<LaneCenterline> p, g;
    for (const auto& l : pred)
      if (l.lane_class == c) p.push_back(l);
    for (const auto& l : gt)
      if (l.lane_class == c) g.push_back(l);
    out[std::string(to_string(c))] = match_instances(std::span<const LaneCenterline>(p),
                                                     std::span<const LaneCenterline>(g),
                                                     lane_distance, threshold);
  }
  return out;
}

std::map<std::string, MatchResult> te_matches_by_category(std::span<const TrafficElement> pred,
                                                          std::span<const TrafficElement> gt,
                                                          double iou_threshold) {
  std::map<std::string, std::pair<std::vector<TrafficElement>, std::vector<TrafficElement>>> split;
  for (const auto& t : pred) split[t.category].first.push_back(t);
  for (const auto& t : gt) split[t.category].second.push_back(t);
  std::map<std::string, MatchResult> out;
  for (const auto& [cat, pg] : split) {
    out[cat] = match_instances(std::span<const TrafficElement>(pg.first),
                               std::span<const TrafficElement>(pg.second), box_distance,
                               1.0 - iou_threshold);
  }
  return out;
}

void pool_into(std::map<std::string, MatchResult>& acc,
               const std::map<std::string, MatchResult>& frame) {
  for (const auto& [label, m] : frame) acc[label].append(m);
}

void check_unit(double x, const char* name) {
  if (!(x >= 0.0 && x <= 1.0)) {
    throw std::invalid_argument(std::string(name) + " must be in [0,1]");
  }
}

}  // namespace

double det_l(std::span<const LaneCenterline> pred, std::span<const LaneCenterline> gt,
             std::span<const double> frechet_thresholds) {
  if (frechet_thresholds.empty()) throw std::invalid_argument("det_l: no Frechet thresholds");
  double sum = 0.0;
  for (double t : frechet_thresholds) sum += mean_ap_over_present(lane_matches_by_class(pred, gt, t));
  return sum / static_cast<double>(frechet_thresholds.size());
}

double det_t(std::span<const TrafficElement> pred, std::span<const TrafficElement> gt,
             double iou_threshold) {
  return mean_ap_over_present(te_matches_by_category(pred, gt, iou_threshold));
}

std::vector<std::optional<std::size_t>> vertex_assignment(const MatchResult& match) {
  std::vector<std::optional<std::size_t>> out;
  out.reserve(match.predictions.size());
  for (const auto& e : match.predictions) out.push_back(e.gt);
  return out;
}

MatchResult edge_matches(EdgeView pred, const BoolGrid& gt_edges,
                         std::span<const std::optional<std::size_t>> row_match,
                         std::span<const std::optional<std::size_t>> col_match) {
  if (!pred.edges) throw std::invalid_argument("edge_matches: missing predicted edges");
  const BoolGrid& edges = *pred.edges;
  if (edges.rows() != row_match.size() || edges.cols() != col_match.size()) {
    throw std::invalid_argument("edge_matches: vertex assignment does not match edge matrix shape");
  }
  if (pred.confidence &&
      (pred.confidence->rows() != edges.rows() || pred.confidence->cols() != edges.cols())) {
    throw std::invalid_argument("edge_matches: confidence matrix shape mismatch");
  }

  MatchResult result;
  for (bool e : gt_edges.values()) result.num_gt += e ? 1 : 0;
  for (std::size_t i = 0; i < edges.rows(); ++i) {
    for (std::size_t j = 0; j < edges.cols(); ++j) {
      if (!edges(i, j)) continue;
      MatchEntry entry;
      entry.confidence = pred.confidence ? (*pred.confidence)(i, j) : 1.0;
      const auto& gi = row_match[i];
      const auto& gj = col_match[j];
      if (gi && gj && *gi < gt_edges.rows() && *gj < gt_edges.cols() && gt_edges(*gi, *gj)) {
        entry.gt = *gi * gt_edges.cols() + *gj;
      }
      result.predictions.push_back(entry);
    }
  }
  return result;
}

double top_score(EdgeView pred, const BoolGrid& gt_edges,
                 std::span<const std::optional<std::size_t>> row_match,
                 std::span<const std::optional<std::size_t>> col_match) {
  return average_precision(edge_matches(pred, gt_edges, row_match, col_match));
}

std::string_view to_string(ScaleFunction f) {
  return f == ScaleFunction::sqrt ? "sqrt" : "identity";
}

ScaleFunction scale_function_from_string(std::string_view name) {
  if (name == "sqrt") return ScaleFunction::sqrt;
  if (name == "identity") return ScaleFunction::identity;
  throw std::invalid_argument("unknown scale function '" + std::string(name) + "'");
}

double f_scale(double x, ScaleFunction fn) {
  check_unit(x, "f_scale argument");
  return fn == ScaleFunction::sqrt ? std::sqrt(x) : x;
}

double ols(double det_l, double det_t, double top_ll, double top_lt, ScaleFunction fn) {
  check_unit(det_l, "det_l");
  check_unit(det_t, "det_t");
  check_unit(top_ll, "top_ll");
  check_unit(top_lt, "top_lt");
  return 0.25 * (det_l + det_t + f_scale(top_ll, fn) + f_scale(top_lt, fn));
}

void EvalConfig::validate() const {
  if (frechet_thresholds.empty()) throw std::invalid_argument("frechet_thresholds must not be empty");
  for (double t : frechet_thresholds) {
    if (!(t > 0.0)) throw std::invalid_argument("frechet_thresholds must be positive");
  }
  if (!(iou_threshold > 0.0 && iou_threshold <= 1.0)) {
    throw std::invalid_argument("iou_threshold must be in (0,1]");
  }
  if (!(top_te_match_iou > 0.0 && top_te_match_iou <= 1.0)) {
    throw std::invalid_argument("top_te_match_iou must be in (0,1]");
  }
  if (!(top_lane_match_threshold > 0.0)) {
    throw std::invalid_argument("top_lane_match_threshold must be positive");
  }
}

namespace {

struct FrameMatches {
  std::vector<std::map<std::string, MatchResult>> lanes;  // one per Frechet threshold
  std::map<std::string, MatchResult> tes;
  MatchResult top_ll;
  MatchResult top_lt;
};

FrameMatches match_frame(const SceneFrame& pred, const SceneFrame& gt, const EvalConfig& cfg) {
  FrameMatches fm;
  for (double t : cfg.frechet_thresholds) fm.lanes.push_back(lane_matches_by_class(pred.lanes, gt.lanes, t));
  fm.tes = te_matches_by_category(pred.traffic_elements, gt.traffic_elements, cfg.iou_threshold);

  // Topology vertices are matched without regard to lane class or TE category.
  const auto lane_match = vertex_assignment(match_instances(
      std::span<const LaneCenterline>(pred.lanes), std::span<const LaneCenterline>(gt.lanes),
      lane_distance, cfg.top_lane_match_threshold));
  const auto te_match = vertex_assignment(match_instances(
      std::span<const TrafficElement>(pred.traffic_elements),
      std::span<const TrafficElement>(gt.traffic_elements), box_distance,
      1.0 - cfg.top_te_match_iou));

  const RealGrid* ll_conf = pred.lane_lane_confidence ? &*pred.lane_lane_confidence : nullptr;
  const RealGrid* lt_conf = pred.lane_te_confidence ? &*pred.lane_te_confidence : nullptr;
  fm.top_ll = edge_matches({&pred.lane_lane, ll_conf}, gt.lane_lane, lane_match, lane_match);
  fm.top_lt = edge_matches({&pred.lane_te, lt_conf}, gt.lane_te, lane_match, te_match);
  return fm;
}

std::string join_ids(const std::vector<std::string>& ids) {
  std::string out;
  for (const auto& id : ids) out += (out.empty() ? "" : ", ") + id;
  return out;
}

EdgeCounts count_edges(const MatchResult& m) {
  EdgeCounts c;
  c.gt_edges = m.num_gt;
  c.pred_edges = m.predictions.size();
  for (const auto& e : m.predictions) c.true_positives += e.gt ? 1 : 0;
  return c;
}

}  // namespace

EvalReport evaluate(std::span<const SceneFrame> pred_frames, std::span<const SceneFrame> gt_frames,
                    const EvalConfig& config) {
  config.validate();

  std::unordered_map<std::string, std::size_t> pred_by_id;
  for (std::size_t i = 0; i < pred_frames.size(); ++i) {
    if (!pred_by_id.emplace(pred_frames[i].frame_id, i).second) {
      throw std::invalid_argument("duplicate prediction frame id '" + pred_frames[i].frame_id + "'");
    }
  }
  std::vector<std::string> missing_pred, missing_gt;
  std::vector<std::size_t> pairing;
  std::unordered_map<std::string, bool> gt_ids;
  for (const auto& g : gt_frames) {
    if (!gt_ids.emplace(g.frame_id, true).second) {
      throw std::invalid_argument("duplicate ground-truth frame id '" + g.frame_id + "'");
    }
    auto it = pred_by_id.find(g.frame_id);
    if (it == pred_by_id.end()) {
      missing_pred.push_back(g.frame_id);
    } else {
      pairing.push_back(it->second);
    }
  }
  for (const auto& p : pred_frames) {
    if (!gt_ids.contains(p.frame_id)) missing_gt.push_back(p.frame_id);
  }
  if (!missing_pred.empty() || !missing_gt.empty()) {
    std::string msg = "frame ids do not align;";
    if (!missing_pred.empty()) msg += " missing from predictions: " + join_ids(missing_pred) + ";";
    if (!missing_gt.empty()) msg += " missing from ground truth: " + join_ids(missing_gt) + ";";
    throw std::invalid_argument(msg);
  }

  const std::size_t n = gt_frames.size();
  std::vector<FrameMatches> per_frame(n);
  const unsigned workers =
      static_cast<unsigned>(std::min<std::size_t>(std::max(1u, config.threads), std::max<std::size_t>(n, 1)));
  if (workers <= 1) {
    for (std::size_t f = 0; f < n; ++f) per_frame[f] = match_frame(pred_frames[pairing[f]], gt_frames[f], config);
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::atomic<bool> failed{false};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    std::mutex error_mutex;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t f = next++; f < n && !failed; f = next++) {
          try {
            per_frame[f] = match_frame(pred_frames[pairing[f]], gt_frames[f], config);
          } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!error) error = std::current_exception();
            failed = true;
          }
        }
      });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
  }

  // Reduction in frame order keeps the pooled rankings schedule-independent.
  std::vector<std::map<std::string, MatchResult>> lanes(config.frechet_thresholds.size());
  std::map<std::string, MatchResult> tes;
  MatchResult top_ll, top_lt;
  for (const auto& fm : per_frame) {
    for (std::size_t t = 0; t < lanes.size(); ++t) pool_into(lanes[t], fm.lanes[t]);
    pool_into(tes, fm.tes);
    top_ll.append(fm.top_ll);
    top_lt.append(fm.top_lt);
  }

  EvalReport report;
  auto& bd = report.breakdowns;
  bd.frames = n;
  double det_l_sum = 0.0;
  std::map<std::string, double> class_sum;
  for (std::size_t t = 0; t < lanes.size(); ++t) {
    std::map<std::string, double> per_class;
    const double ap = mean_ap_over_present(lanes[t], &per_class);
    bd.det_l_per_threshold.emplace_back(config.frechet_thresholds[t], ap);
    for (const auto& [c, v] : per_class) class_sum[c] += v;
    det_l_sum += ap;
  }
  for (const auto& [c, v] : class_sum) {
    bd.det_l_per_class[c] = v / static_cast<double>(lanes.size());
  }
  report.det_l = det_l_sum / static_cast<double>(lanes.size());
  report.det_t = mean_ap_over_present(tes, &bd.det_t_per_category);
  report.top_ll = average_precision(top_ll);
  report.top_lt = average_precision(top_lt);
  bd.top_ll = count_edges(top_ll);
  bd.top_lt = count_edges(top_lt);
  report.ols = ols(report.det_l, report.det_t, report.top_ll, report.top_lt, config.scale);
  return report;
}

}  // namespace lanetopo
