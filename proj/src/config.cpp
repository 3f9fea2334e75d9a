#include "lanetopo/config.hpp"

#include <set>

#include "lanetopo/errors.hpp"
#include "lanetopo/io.hpp"

namespace lanetopo {

using nlohmann::json;
using nlohmann::ordered_json;

void ToolConfig::validate() const {
  try {
    range.validate();
    eval.validate();
    perturbation.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (!(tau >= 0.0 && tau <= 1.0)) throw ConfigError("tau must be in [0,1]");
  if (!(gap_limit >= 0.0)) throw ConfigError("gap_limit must be >= 0");
  for (auto h : mlp.hidden) {
    if (h == 0) throw ConfigError("mlp.hidden widths must be positive");
  }
}

ordered_json config_to_json(const ToolConfig& c) {
  ordered_json j;
  j["detection_range"] = {{"x_min", c.range.x_min}, {"x_max", c.range.x_max},
                          {"y_min", c.range.y_min}, {"y_max", c.range.y_max},
                          {"z_min", c.range.z_min}, {"z_max", c.range.z_max}};
  j["frechet_thresholds"] = c.eval.frechet_thresholds;
  j["iou_threshold"] = c.eval.iou_threshold;
  j["top_lane_match_threshold"] = c.eval.top_lane_match_threshold;
  j["top_te_match_iou"] = c.eval.top_te_match_iou;
  j["f_scale"] = std::string(to_string(c.eval.scale));
  j["tau"] = c.tau;
  j["gap_limit"] = c.gap_limit;
  j["geometric_override"] = c.geometric_override;
  j["mlp"] = {{"hidden", c.mlp.hidden}, {"seed", c.mlp.seed}};
  j["generate"] = {{"seed", c.generate.seed},         {"frames", c.generate.frames},
                   {"n_lanes", c.generate.n_lanes},   {"n_tes", c.generate.n_tes},
                   {"layout", std::string(to_string(c.generate.layout))},
                   {"feature_dim", c.generate.feature_dim}};
  j["perturbation"] = {{"point_noise_sigma", c.perturbation.point_noise_sigma},
                       {"confidence_noise_sigma", c.perturbation.confidence_noise_sigma},
                       {"drop_rate", c.perturbation.drop_rate},
                       {"spurious_rate", c.perturbation.spurious_rate},
                       {"edge_flip_rate", c.perturbation.edge_flip_rate},
                       {"seed", c.perturbation.seed}};
  return j;
}

namespace {

class ConfigReader {
 public:
  ConfigReader(const json& obj, std::string prefix) : obj_(obj), prefix_(std::move(prefix)) {
    if (!obj_.is_object()) throw ConfigError(where("") + "expected an object");
  }

  /// Rejects keys that were never read.
  void finish() const {
    for (auto it = obj_.begin(); it != obj_.end(); ++it) {
      if (!seen_.contains(it.key())) throw ConfigError("unknown config key '" + prefix_ + it.key() + "'");
    }
  }

  const json* get(const std::string& key) {
    seen_.insert(key);
    auto it = obj_.find(key);
    return it == obj_.end() ? nullptr : &*it;
  }

  void number(const std::string& key, double& out) {
    if (const json* v = get(key)) {
      if (!v->is_number()) throw ConfigError(where(key) + "expected a number");
      out = v->get<double>();
    }
  }

  template <typename Int>
  void count(const std::string& key, Int& out) {
    if (const json* v = get(key)) {
      if (!v->is_number_unsigned()) throw ConfigError(where(key) + "expected a non-negative integer");
      out = v->get<Int>();
    }
  }

  void boolean(const std::string& key, bool& out) {
    if (const json* v = get(key)) {
      if (!v->is_boolean()) throw ConfigError(where(key) + "expected true or false");
      out = v->get<bool>();
    }
  }

  template <typename Parse>
  void label(const std::string& key, Parse&& parse) {
    if (const json* v = get(key)) {
      if (!v->is_string()) throw ConfigError(where(key) + "expected a string");
      try {
        parse(v->get<std::string>());
      } catch (const std::invalid_argument& e) {
        throw ConfigError(where(key) + e.what());
      }
    }
  }

  std::string where(const std::string& key) const { return "config '" + prefix_ + key + "': "; }

 private:
  const json& obj_;
  std::string prefix_;
  std::set<std::string> seen_;
};

}  // namespace

ToolConfig config_from_json(const json& doc) {
  ToolConfig c;
  ConfigReader r(doc, "");
  if (const json* v = r.get("detection_range")) {
    ConfigReader d(*v, "detection_range.");
    d.number("x_min", c.range.x_min);
    d.number("x_max", c.range.x_max);
    d.number("y_min", c.range.y_min);
    d.number("y_max", c.range.y_max);
    d.number("z_min", c.range.z_min);
    d.number("z_max", c.range.z_max);
    d.finish();
  }
  if (const json* v = r.get("frechet_thresholds")) {
    if (!v->is_array()) throw ConfigError(r.where("frechet_thresholds") + "expected an array");
    c.eval.frechet_thresholds.clear();
    for (const auto& t : *v) {
      if (!t.is_number()) throw ConfigError(r.where("frechet_thresholds") + "expected numbers");
      c.eval.frechet_thresholds.push_back(t.get<double>());
    }
  }
  r.number("iou_threshold", c.eval.iou_threshold);
  r.number("top_lane_match_threshold", c.eval.top_lane_match_threshold);
  r.number("top_te_match_iou", c.eval.top_te_match_iou);
  r.label("f_scale", [&](const std::string& s) { c.eval.scale = scale_function_from_string(s); });
  r.number("tau", c.tau);
  r.number("gap_limit", c.gap_limit);
  r.boolean("geometric_override", c.geometric_override);
  if (const json* v = r.get("mlp")) {
    ConfigReader m(*v, "mlp.");
    if (const json* h = m.get("hidden")) {
      if (!h->is_array()) throw ConfigError(m.where("hidden") + "expected an array");
      c.mlp.hidden.clear();
      for (const auto& w : *h) {
        if (!w.is_number_unsigned()) throw ConfigError(m.where("hidden") + "expected positive integers");
        c.mlp.hidden.push_back(w.get<std::size_t>());
      }
    }
    m.count("seed", c.mlp.seed);
    m.finish();
  }
  if (const json* v = r.get("generate")) {
    ConfigReader g(*v, "generate.");
    g.count("seed", c.generate.seed);
    g.count("frames", c.generate.frames);
    g.count("n_lanes", c.generate.n_lanes);
    g.count("n_tes", c.generate.n_tes);
    g.label("layout", [&](const std::string& s) { c.generate.layout = layout_from_string(s); });
    g.count("feature_dim", c.generate.feature_dim);
    g.finish();
  }
  if (const json* v = r.get("perturbation")) {
    ConfigReader p(*v, "perturbation.");
    p.number("point_noise_sigma", c.perturbation.point_noise_sigma);
    p.number("confidence_noise_sigma", c.perturbation.confidence_noise_sigma);
    p.number("drop_rate", c.perturbation.drop_rate);
    p.number("spurious_rate", c.perturbation.spurious_rate);
    p.number("edge_flip_rate", c.perturbation.edge_flip_rate);
    p.count("seed", c.perturbation.seed);
    p.finish();
  }
  r.finish();
  c.validate();
  return c;
}

void apply_override(json& doc, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos || eq == 0) {
    throw ConfigError("override '" + std::string(assignment) + "' is not key=value");
  }
  const std::string key(assignment.substr(0, eq));
  const std::string text(assignment.substr(eq + 1));
  json value = json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (value.is_discarded()) value = text;

  json* node = &doc;
  std::size_t start = 0;
  while (true) {
    const auto dot = key.find('.', start);
    const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (part.empty()) throw ConfigError("override key '" + key + "' has an empty component");
    if (!node->is_object()) throw ConfigError("override key '" + key + "' descends into a non-object");
    if (dot == std::string::npos) {
      (*node)[part] = std::move(value);
      return;
    }
    node = &(*node)[part];
    if (node->is_null()) *node = json::object();
    start = dot + 1;
  }
}

ToolConfig load_config(const std::optional<std::filesystem::path>& path,
                       std::span<const std::string> overrides) {
  json doc = json::object();
  if (path) {
    try {
      doc = io::read_json_file(*path);
    } catch (const SchemaError& e) {
      throw ConfigError(e.what());
    }
  }
  for (const auto& o : overrides) apply_override(doc, o);
  return config_from_json(doc);
}

std::vector<std::size_t> hidden_widths(const MlpConfig& mlp, std::size_t dim) {
  if (!mlp.hidden.empty()) return mlp.hidden;
  return {dim, dim};
}

}  // namespace lanetopo
