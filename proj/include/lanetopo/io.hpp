#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "lanetopo/metrics.hpp"
#include "lanetopo/scene.hpp"
#include "lanetopo/topology.hpp"

namespace lanetopo::io {

using Json = nlohmann::json;
using OrderedJson = nlohmann::ordered_json;

/// How many points each lane must carry when a frame document is parsed.
/// Only the converter accepts anything other than the 11-point form.
enum class PointRule { eleven, bezier_controls, at_least_two };

/// Frame documents. Parse errors throw SchemaError naming the frame and the
/// offending field path, e.g. "frame 'f3': lanes[2].points: ...".
OrderedJson frame_to_json(const SceneFrame& frame);
SceneFrame frame_from_json(const Json& doc, PointRule rule = PointRule::eleven,
                           std::size_t index = 0);

/// Dataset files are {"frames": [...]}.
OrderedJson frames_to_json(std::span<const SceneFrame> frames);
std::vector<SceneFrame> frames_from_json(const Json& doc, PointRule rule = PointRule::eleven);

std::vector<SceneFrame> load_frames(const std::filesystem::path& path,
                                    PointRule rule = PointRule::eleven);
void save_frames(const std::filesystem::path& path, std::span<const SceneFrame> frames);

/// {"layers": [{"weights": [[...]], "bias": [...]}, ...]}
OrderedJson mlp_to_json(const MlpParams& params);
MlpParams mlp_from_json(const Json& doc);
MlpParams load_mlp(const std::filesystem::path& path);
void save_mlp(const std::filesystem::path& path, const MlpParams& params);

/// Keys: det_l, det_t, top_ll, top_lt, ols, breakdowns.
OrderedJson report_to_json(const EvalReport& report);

/// Reads and parses a JSON file; IoError if unreadable, SchemaError if the
/// text is not JSON.
Json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace lanetopo::io
