#include <array>
#include <optional>
#include <string>
#include <vector>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "lanetopo/commands.hpp"
#include "lanetopo/config.hpp"
#include "lanetopo/errors.hpp"
#include "lanetopo/geometry.hpp"
#include "lanetopo/io.hpp"
#include "lanetopo/metrics.hpp"
#include "lanetopo/query_kernels.hpp"
#include "lanetopo/scenesim.hpp"
#include "lanetopo/topology.hpp"

namespace py = pybind11;
using namespace lanetopo;

namespace {

using Xyz = std::array<double, 3>;
using Rows = std::vector<std::vector<double>>;

Polyline3 to_polyline(const std::vector<Xyz>& pts) {
  Polyline3 out;
  out.reserve(pts.size());
  for (const auto& p : pts) out.push_back({p[0], p[1], p[2]});
  return out;
}

std::vector<Xyz> from_polyline(const Polyline3& pts) {
  std::vector<Xyz> out;
  out.reserve(pts.size());
  for (const auto& p : pts) out.push_back({p.x, p.y, p.z});
  return out;
}

// Python objects cross the boundary as JSON text.
nlohmann::json to_json(const py::object& obj) {
  const auto text = py::module_::import("json").attr("dumps")(obj).cast<std::string>();
  return nlohmann::json::parse(text);
}

template <typename Json>
py::object to_python(const Json& doc) {
  return py::module_::import("json").attr("loads")(doc.dump());
}

ToolConfig tool_config(const std::optional<py::object>& config) {
  ToolConfig c = config && !config->is_none() ? config_from_json(to_json(*config)) : ToolConfig{};
  c.validate();
  return c;
}

DetectionRange range_of(const std::optional<py::object>& config) { return tool_config(config).range; }

EmbeddingMatrix to_matrix(const Rows& rows) {
  const std::size_t dim = rows.empty() ? 0 : rows.front().size();
  std::vector<double> values;
  values.reserve(rows.size() * dim);
  for (const auto& r : rows) {
    if (r.size() != dim) throw std::invalid_argument("rows must have equal length");
    values.insert(values.end(), r.begin(), r.end());
  }
  return EmbeddingMatrix(rows.size(), dim, std::move(values));
}

Rows from_matrix(const EmbeddingMatrix& m) {
  Rows out;
  for (std::size_t i = 0; i < m.rows(); ++i) out.emplace_back(m.row(i).begin(), m.row(i).end());
  return out;
}

std::vector<SceneFrame> frames_of(const py::object& doc) { return io::frames_from_json(to_json(doc)); }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Lane topology geometry, metrics and synthetic scenes.";

  py::register_exception<SchemaError>(m, "SchemaError", PyExc_ValueError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<IoError>(m, "IoError", PyExc_OSError);

  m.def(
      "resample_polyline",
      [](const std::vector<Xyz>& pts, std::size_t n) { return from_polyline(resample_polyline(to_polyline(pts), n)); },
      py::arg("points"), py::arg("n") = kLanePoints);
  m.def(
      "bezier_to_polyline",
      [](const std::vector<Xyz>& controls, std::size_t n) {
        if (controls.size() != kBezierControlPoints)
          throw std::invalid_argument("expected 5 control points");
        BezierCurve c;
        for (std::size_t i = 0; i < kBezierControlPoints; ++i)
          c.control_points[i] = {controls[i][0], controls[i][1], controls[i][2]};
        return from_polyline(bezier_to_polyline(c, n));
      },
      py::arg("controls"), py::arg("n") = kLanePoints);
  m.def(
      "normalize_points",
      [](const std::vector<Xyz>& pts, std::optional<py::object> config) {
        return from_polyline(normalize_points(to_polyline(pts), range_of(config)));
      },
      py::arg("points"), py::arg("config") = py::none());
  m.def(
      "denormalize_points",
      [](const std::vector<Xyz>& pts, std::optional<py::object> config) {
        return from_polyline(denormalize_points(to_polyline(pts), range_of(config)));
      },
      py::arg("points"), py::arg("config") = py::none());
  m.def(
      "discrete_frechet",
      [](const std::vector<Xyz>& a, const std::vector<Xyz>& b) {
        return discrete_frechet(to_polyline(a), to_polyline(b));
      },
      py::arg("a"), py::arg("b"));
  m.def(
      "successor_gap",
      [](const std::vector<Xyz>& from, const std::vector<Xyz>& to) {
        return successor_gap(to_polyline(from), to_polyline(to));
      },
      py::arg("source"), py::arg("target"));

  m.def("point_pooling", [](const Rows& q) { return point_pooling(to_matrix(q)); }, py::arg("point_queries"));
  m.def(
      "assemble_lc_queries",
      [](const Rows& qi, const std::vector<double>& pooled) {
        return from_matrix(assemble_lc_queries(to_matrix(qi), pooled));
      },
      py::arg("instance_queries"), py::arg("pooled"));
  m.def(
      "augment_with_endpoints",
      [](const std::vector<double>& q, const Xyz& s, const Xyz& e) {
        return augment_with_endpoints(q, {s[0], s[1], s[2]}, {e[0], e[1], e[2]});
      },
      py::arg("query"), py::arg("start"), py::arg("end"));

  m.def(
      "average_precision",
      [](const std::vector<std::pair<double, std::optional<std::size_t>>>& preds, std::size_t num_gt) {
        MatchResult r;
        r.num_gt = num_gt;
        for (const auto& [conf, gt] : preds) r.predictions.push_back({conf, gt});
        return average_precision(r);
      },
      py::arg("predictions"), py::arg("num_gt"));
  m.def(
      "f_scale",
      [](double x, const std::string& fn) { return f_scale(x, scale_function_from_string(fn)); },
      py::arg("x"), py::arg("fn") = "sqrt");
  m.def(
      "ols",
      [](double dl, double dt, double tll, double tlt, const std::string& fn) {
        return ols(dl, dt, tll, tlt, scale_function_from_string(fn));
      },
      py::arg("det_l"), py::arg("det_t"), py::arg("top_ll"), py::arg("top_lt"), py::arg("fn") = "sqrt");

  m.def(
      "evaluate",
      [](const py::object& gt, const py::object& pred, std::optional<py::object> config, unsigned threads) {
        const auto g = frames_of(gt);
        const auto p = frames_of(pred);
        EvalConfig cfg = tool_config(config).eval;
        cfg.threads = threads;
        EvalReport report;
        {
          py::gil_scoped_release release;
          report = evaluate(p, g, cfg);
        }
        return to_python(io::report_to_json(report));
      },
      py::arg("gt"), py::arg("pred"), py::arg("config") = py::none(), py::arg("threads") = 1,
      "Scores prediction frames against ground truth; both are {\"frames\": [...]} documents.");
  m.def(
      "evaluate_files",
      [](const std::string& gt, const std::string& pred, std::optional<py::object> config, unsigned threads) {
        const ToolConfig cfg = tool_config(config);
        std::string out;
        {
          py::gil_scoped_release release;
          out = commands::evaluate(gt, pred, cfg, threads);
        }
        return py::module_::import("json").attr("loads")(out);
      },
      py::arg("gt_path"), py::arg("pred_path"), py::arg("config") = py::none(), py::arg("threads") = 1);

  m.def(
      "generate_scene",
      [](std::uint64_t seed, std::size_t n_lanes, std::size_t n_tes, const std::string& layout,
         std::size_t feature_dim, const std::string& frame_id) {
        return to_python(io::frame_to_json(
            generate_scene({seed, n_lanes, n_tes, layout_from_string(layout), feature_dim, frame_id})));
      },
      py::arg("seed"), py::arg("n_lanes"), py::arg("n_tes"), py::arg("layout") = "chain",
      py::arg("feature_dim") = 0, py::arg("frame_id") = "frame_0000");
  m.def(
      "perturb_scene",
      [](const py::object& frame, double point_noise_sigma, double confidence_noise_sigma, double drop_rate,
         double spurious_rate, double edge_flip_rate, std::uint64_t seed) {
        const PerturbationConfig pc{point_noise_sigma, confidence_noise_sigma, drop_rate,
                                    spurious_rate,     edge_flip_rate,         seed};
        return to_python(io::frame_to_json(perturb_scene(io::frame_from_json(to_json(frame)), pc)));
      },
      py::arg("frame"), py::arg("point_noise_sigma") = 0.0, py::arg("confidence_noise_sigma") = 0.0,
      py::arg("drop_rate") = 0.0, py::arg("spurious_rate") = 0.0, py::arg("edge_flip_rate") = 0.0,
      py::arg("seed") = 0);

  m.def(
      "init_mlp",
      [](const std::string& kind, std::size_t dim, bool zero, std::optional<py::object> config) {
        commands::MlpKind k;
        if (kind == "lane_lane") k = commands::MlpKind::lane_lane;
        else if (kind == "lane_te") k = commands::MlpKind::lane_te;
        else throw std::invalid_argument("unknown MLP kind '" + kind + "'");
        return to_python(io::mlp_to_json(commands::init_mlp(tool_config(config), k, dim, zero)));
      },
      py::arg("kind"), py::arg("dim"), py::arg("zero") = false, py::arg("config") = py::none());
  m.def(
      "infer",
      [](const py::object& frames, const py::object& lane_mlp, const py::object& te_mlp,
         std::optional<py::object> config) {
        auto out = commands::infer(frames_of(frames), io::mlp_from_json(to_json(lane_mlp)),
                                   io::mlp_from_json(to_json(te_mlp)), tool_config(config));
        return to_python(io::frames_to_json(out));
      },
      py::arg("frames"), py::arg("lane_mlp"), py::arg("te_mlp"), py::arg("config") = py::none());
}
