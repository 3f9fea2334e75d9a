#include "lanetopo/io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "lanetopo/errors.hpp"

namespace lanetopo::io {

namespace {

/// Schema reader bound to one frame; every failure names the frame and path.
class FieldReader {
 public:
  explicit FieldReader(std::string label) : label_(std::move(label)) {}

  [[noreturn]] void fail(const std::string& path, const std::string& what) const {
    throw SchemaError(label_ + ": " + path + ": " + what);
  }

  const Json& member(const Json& obj, const char* key, const std::string& path) const {
    auto it = obj.find(key);
    if (it == obj.end()) fail(path.empty() ? key : path + "." + key, "missing field");
    return *it;
  }

  const Json& array(const Json& v, const std::string& path) const {
    if (!v.is_array()) fail(path, "expected an array");
    return v;
  }

  double number(const Json& v, const std::string& path) const {
    if (!v.is_number()) fail(path, "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) fail(path, "expected a finite number");
    return x;
  }

  double unit(const Json& v, const std::string& path) const {
    const double x = number(v, path);
    if (!(x >= 0.0 && x <= 1.0)) fail(path, "must be in [0,1]");
    return x;
  }

  std::string string(const Json& v, const std::string& path) const {
    if (!v.is_string()) fail(path, "expected a string");
    return v.get<std::string>();
  }

  std::vector<double> vector(const Json& v, const std::string& path) const {
    array(v, path);
    std::vector<double> out;
    out.reserve(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(number(v[i], path + "[" + std::to_string(i) + "]"));
    return out;
  }

  template <typename T, typename Cell>
  Grid<T> grid(const Json& v, std::size_t rows, std::size_t cols, const std::string& path,
               Cell&& cell) const {
    array(v, path);
    if (v.size() != rows) {
      fail(path, "expected " + std::to_string(rows) + " rows to match instance count, got " +
                     std::to_string(v.size()));
    }
    Grid<T> g(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
      const std::string rp = path + "[" + std::to_string(i) + "]";
      array(v[i], rp);
      if (v[i].size() != cols) {
        fail(rp, "expected " + std::to_string(cols) + " columns to match instance count, got " +
                     std::to_string(v[i].size()));
      }
      for (std::size_t j = 0; j < cols; ++j) g(i, j) = cell(v[i][j], rp + "[" + std::to_string(j) + "]");
    }
    return g;
  }

 private:
  std::string label_;
};

std::string idx(const char* name, std::size_t i) { return std::string(name) + "[" + std::to_string(i) + "]"; }

void check_point_count(const FieldReader& r, const std::string& path, std::size_t n, PointRule rule) {
  switch (rule) {
    case PointRule::eleven:
      if (n != kLanePoints) {
        r.fail(path, "lane must have exactly 11 points (got " + std::to_string(n) + ")");
      }
      break;
    case PointRule::bezier_controls:
      if (n != kBezierControlPoints) {
        r.fail(path, "Bezier lane must have exactly 5 control points (got " + std::to_string(n) + ")");
      }
      break;
    case PointRule::at_least_two:
      if (n < 2) r.fail(path, "lane must have at least 2 points (got " + std::to_string(n) + ")");
      break;
  }
}

OrderedJson grid_json(const BoolGrid& g) {
  OrderedJson rows = OrderedJson::array();
  for (std::size_t i = 0; i < g.rows(); ++i) {
    OrderedJson row = OrderedJson::array();
    for (std::size_t j = 0; j < g.cols(); ++j) row.push_back(static_cast<bool>(g(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

OrderedJson grid_json(const RealGrid& g) {
  OrderedJson rows = OrderedJson::array();
  for (std::size_t i = 0; i < g.rows(); ++i) {
    OrderedJson row = OrderedJson::array();
    for (std::size_t j = 0; j < g.cols(); ++j) row.push_back(g(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

OrderedJson frame_to_json(const SceneFrame& f) {
  OrderedJson doc;
  doc["frame_id"] = f.frame_id;
  OrderedJson lanes = OrderedJson::array();
  for (const auto& lane : f.lanes) {
    OrderedJson l;
    OrderedJson pts = OrderedJson::array();
    for (const auto& p : lane.points) pts.push_back({p.x, p.y, p.z});
    l["points"] = std::move(pts);
    l["confidence"] = lane.confidence;
    l["lane_class"] = std::string(to_string(lane.lane_class));
    if (lane.feature) l["feature"] = *lane.feature;
    lanes.push_back(std::move(l));
  }
  doc["lanes"] = std::move(lanes);
  OrderedJson tes = OrderedJson::array();
  for (const auto& te : f.traffic_elements) {
    OrderedJson t;
    t["bbox"] = {te.bbox.x1, te.bbox.y1, te.bbox.x2, te.bbox.y2};
    t["category"] = te.category;
    t["confidence"] = te.confidence;
    if (te.feature) t["feature"] = *te.feature;
    tes.push_back(std::move(t));
  }
  doc["traffic_elements"] = std::move(tes);
  doc["lane_lane"] = grid_json(f.lane_lane);
  doc["lane_te"] = grid_json(f.lane_te);
  if (f.lane_lane_confidence) doc["lane_lane_confidence"] = grid_json(*f.lane_lane_confidence);
  if (f.lane_te_confidence) doc["lane_te_confidence"] = grid_json(*f.lane_te_confidence);
  return doc;
}

SceneFrame frame_from_json(const Json& doc, PointRule rule, std::size_t index) {
  std::string label = "frame #" + std::to_string(index);
  if (doc.is_object()) {
    auto id = doc.find("frame_id");
    if (id != doc.end() && id->is_string()) label = "frame '" + id->get<std::string>() + "'";
  }
  const FieldReader r(label);
  if (!doc.is_object()) r.fail("", "expected an object");

  SceneFrame f;
  f.frame_id = r.string(r.member(doc, "frame_id", ""), "frame_id");

  const Json& lanes = r.array(r.member(doc, "lanes", ""), "lanes");
  for (std::size_t i = 0; i < lanes.size(); ++i) {
    const std::string path = idx("lanes", i);
    const Json& l = lanes[i];
    if (!l.is_object()) r.fail(path, "expected an object");
    LaneCenterline lane;
    const Json& pts = r.array(r.member(l, "points", path), path + ".points");
    check_point_count(r, path + ".points", pts.size(), rule);
    for (std::size_t k = 0; k < pts.size(); ++k) {
      const std::string pp = path + ".points[" + std::to_string(k) + "]";
      const Json& p = r.array(pts[k], pp);
      if (p.size() != 3) r.fail(pp, "expected [x, y, z]");
      lane.points.push_back({r.number(p[0], pp + "[0]"), r.number(p[1], pp + "[1]"), r.number(p[2], pp + "[2]")});
    }
    lane.confidence = r.unit(r.member(l, "confidence", path), path + ".confidence");
    const std::string cls = r.string(r.member(l, "lane_class", path), path + ".lane_class");
    try {
      lane.lane_class = lane_class_from_string(cls);
    } catch (const std::invalid_argument& e) {
      r.fail(path + ".lane_class", e.what());
    }
    if (auto it = l.find("feature"); it != l.end() && !it->is_null()) {
      lane.feature = r.vector(*it, path + ".feature");
    }
    f.lanes.push_back(std::move(lane));
  }

  const Json& tes = r.array(r.member(doc, "traffic_elements", ""), "traffic_elements");
  for (std::size_t i = 0; i < tes.size(); ++i) {
    const std::string path = idx("traffic_elements", i);
    const Json& t = tes[i];
    if (!t.is_object()) r.fail(path, "expected an object");
    TrafficElement te;
    const auto box = r.vector(r.member(t, "bbox", path), path + ".bbox");
    if (box.size() != 4) r.fail(path + ".bbox", "expected [x1, y1, x2, y2]");
    te.bbox = {box[0], box[1], box[2], box[3]};
    if (!(te.bbox.x1 < te.bbox.x2) || !(te.bbox.y1 < te.bbox.y2)) {
      r.fail(path + ".bbox", "box must satisfy x1 < x2 and y1 < y2");
    }
    te.category = r.string(r.member(t, "category", path), path + ".category");
    te.confidence = r.unit(r.member(t, "confidence", path), path + ".confidence");
    if (auto it = t.find("feature"); it != t.end() && !it->is_null()) {
      te.feature = r.vector(*it, path + ".feature");
    }
    f.traffic_elements.push_back(std::move(te));
  }

  const std::size_t L = f.lanes.size();
  const std::size_t T = f.traffic_elements.size();
  auto as_bool = [&](const Json& v, const std::string& p) {
    if (!v.is_boolean()) r.fail(p, "expected a boolean");
    return v.get<bool>();
  };
  auto as_unit = [&](const Json& v, const std::string& p) { return r.unit(v, p); };
  f.lane_lane = r.grid<bool>(r.member(doc, "lane_lane", ""), L, L, "lane_lane", as_bool);
  f.lane_te = r.grid<bool>(r.member(doc, "lane_te", ""), L, T, "lane_te", as_bool);
  if (auto it = doc.find("lane_lane_confidence"); it != doc.end() && !it->is_null()) {
    f.lane_lane_confidence = r.grid<double>(*it, L, L, "lane_lane_confidence", as_unit);
  }
  if (auto it = doc.find("lane_te_confidence"); it != doc.end() && !it->is_null()) {
    f.lane_te_confidence = r.grid<double>(*it, L, T, "lane_te_confidence", as_unit);
  }
  if (rule == PointRule::eleven) validate_frame(f);
  return f;
}

OrderedJson frames_to_json(std::span<const SceneFrame> frames) {
  OrderedJson arr = OrderedJson::array();
  for (const auto& f : frames) arr.push_back(frame_to_json(f));
  OrderedJson doc;
  doc["frames"] = std::move(arr);
  return doc;
}

std::vector<SceneFrame> frames_from_json(const Json& doc, PointRule rule) {
  if (!doc.is_object() || !doc.contains("frames") || !doc["frames"].is_array()) {
    throw SchemaError("dataset: expected an object with a \"frames\" array");
  }
  std::vector<SceneFrame> out;
  const Json& frames = doc["frames"];
  out.reserve(frames.size());
  for (std::size_t i = 0; i < frames.size(); ++i) out.push_back(frame_from_json(frames[i], rule, i));
  return out;
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("cannot read '" + path.string() + "'");
  try {
    return Json::parse(buf.str());
  } catch (const Json::parse_error& e) {
    throw SchemaError("'" + path.string() + "': malformed JSON: " + e.what());
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out) throw IoError("cannot write '" + path.string() + "'");
}

std::vector<SceneFrame> load_frames(const std::filesystem::path& path, PointRule rule) {
  return frames_from_json(read_json_file(path), rule);
}

void save_frames(const std::filesystem::path& path, std::span<const SceneFrame> frames) {
  write_text_file(path, frames_to_json(frames).dump(1) + "\n");
}

OrderedJson mlp_to_json(const MlpParams& params) {
  OrderedJson layers = OrderedJson::array();
  for (const auto& layer : params.layers) {
    OrderedJson l;
    l["weights"] = layer.weights;
    l["bias"] = layer.bias;
    layers.push_back(std::move(l));
  }
  OrderedJson doc;
  doc["layers"] = std::move(layers);
  return doc;
}

MlpParams mlp_from_json(const Json& doc) {
  const FieldReader r("mlp");
  if (!doc.is_object()) r.fail("", "expected an object");
  const Json& layers = r.array(r.member(doc, "layers", ""), "layers");
  MlpParams p;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const std::string path = idx("layers", i);
    DenseLayer layer;
    const Json& w = r.array(r.member(layers[i], "weights", path), path + ".weights");
    for (std::size_t o = 0; o < w.size(); ++o) {
      layer.weights.push_back(r.vector(w[o], path + ".weights[" + std::to_string(o) + "]"));
    }
    layer.bias = r.vector(r.member(layers[i], "bias", path), path + ".bias");
    p.layers.push_back(std::move(layer));
  }
  try {
    p.validate();
  } catch (const std::invalid_argument& e) {
    r.fail("layers", e.what());
  }
  return p;
}

MlpParams load_mlp(const std::filesystem::path& path) {
  try {
    return mlp_from_json(read_json_file(path));
  } catch (const SchemaError& e) {
    throw SchemaError("'" + path.string() + "': " + e.what());
  }
}

void save_mlp(const std::filesystem::path& path, const MlpParams& params) {
  write_text_file(path, mlp_to_json(params).dump(1) + "\n");
}

namespace {

OrderedJson counts_json(const EdgeCounts& c) {
  OrderedJson j;
  j["gt_edges"] = c.gt_edges;
  j["pred_edges"] = c.pred_edges;
  j["true_positives"] = c.true_positives;
  return j;
}

}  // namespace

OrderedJson report_to_json(const EvalReport& report) {
  const auto& b = report.breakdowns;
  OrderedJson per_threshold = OrderedJson::array();
  for (const auto& [t, ap] : b.det_l_per_threshold) {
    per_threshold.push_back({{"threshold", t}, {"ap", ap}});
  }
  OrderedJson breakdowns;
  breakdowns["frames"] = b.frames;
  breakdowns["det_l"] = {{"per_threshold", per_threshold}, {"per_class", b.det_l_per_class}};
  breakdowns["det_t"] = {{"per_category", b.det_t_per_category}};
  breakdowns["top_ll"] = counts_json(b.top_ll);
  breakdowns["top_lt"] = counts_json(b.top_lt);

  OrderedJson doc;
  doc["det_l"] = report.det_l;
  doc["det_t"] = report.det_t;
  doc["top_ll"] = report.top_ll;
  doc["top_lt"] = report.top_lt;
  doc["ols"] = report.ols;
  doc["breakdowns"] = std::move(breakdowns);
  return doc;
}

}  // namespace lanetopo::io
