#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lanetopo/config.hpp"
#include "lanetopo/scene.hpp"
#include "lanetopo/topology.hpp"

// Implementations behind the `lanetopo` subcommands. They throw IoError,
// SchemaError or ConfigError; the executable maps those to exit codes.
namespace lanetopo::commands {

inline constexpr int kExitIo = 2;
inline constexpr int kExitSchema = 3;
inline constexpr int kExitConfig = 4;

/// Worker cap from LANETOPO_THREADS (or TOOL_THREADS); hardware concurrency
/// when neither is set. ConfigError on a malformed value.
unsigned threads_from_env();

/// Report JSON (pretty-printed, trailing newline), byte-identical for any
/// thread count.
std::string evaluate(const std::filesystem::path& gt, const std::filesystem::path& pred,
                     const ToolConfig& config, unsigned threads);

/// Writes generated ground truth and a perturbed copy as predictions.
void generate(const ToolConfig& config, const std::filesystem::path& out_gt,
              const std::filesystem::path& out_pred);

/// Frames with lane_lane / lane_te (and their confidence grids) replaced by
/// inferred topology over the full, ungated instance lists.
std::vector<SceneFrame> infer(std::vector<SceneFrame> frames, const MlpParams& lane_mlp,
                              const MlpParams& te_mlp, const ToolConfig& config);

enum class ConvertMode { bezier5_to_points11, resample11 };
ConvertMode convert_mode_from_string(std::string_view name);

/// Loads frames with free point counts and rewrites every lane as 11
/// equally spaced points.
std::vector<SceneFrame> convert(const std::filesystem::path& in, ConvertMode mode);

enum class MlpKind { lane_lane, lane_te };

/// Parameters sized for features of width `dim`: lane-lane pairs take
/// 2*(dim+6) inputs, lane-TE pairs (dim+6)+dim.
MlpParams init_mlp(const ToolConfig& config, MlpKind kind, std::size_t dim, bool zero);

}  // namespace lanetopo::commands
