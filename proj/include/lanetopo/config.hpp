#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "lanetopo/geometry.hpp"
#include "lanetopo/metrics.hpp"
#include "lanetopo/scenesim.hpp"
#include "lanetopo/topology.hpp"

namespace lanetopo {

struct GenerateConfig {
  std::uint64_t seed = 0;
  std::size_t frames = 20;
  std::size_t n_lanes = 6;
  std::size_t n_tes = 4;
  Layout layout = Layout::chain;
  std::size_t feature_dim = 0;
};

struct MlpConfig {
  /// Hidden widths. Empty means two hidden layers as wide as the embedding.
  std::vector<std::size_t> hidden;
  std::uint64_t seed = 0;
};

/// Everything the command-line tool can be configured with. One JSON
/// document; absent keys keep their defaults, unknown keys are rejected.
struct ToolConfig {
  DetectionRange range;
  EvalConfig eval;
  double tau = 0.3;
  double gap_limit = 3.0;
  bool geometric_override = true;
  MlpConfig mlp;
  GenerateConfig generate;
  PerturbationConfig perturbation;

  TopologyConfig topology() const { return {tau, gap_limit, geometric_override, range}; }
  void validate() const;  // ConfigError
};

nlohmann::ordered_json config_to_json(const ToolConfig& config);
/// Throws ConfigError naming the offending key.
ToolConfig config_from_json(const nlohmann::json& doc);

/// Applies "dotted.key=value" to a config document. The value is parsed as
/// JSON when possible and taken as a string otherwise.
void apply_override(nlohmann::json& doc, std::string_view assignment);

/// Defaults, then the optional file, then the overrides in order.
ToolConfig load_config(const std::optional<std::filesystem::path>& path,
                       std::span<const std::string> overrides = {});

/// Hidden widths to use for an embedding of width `dim`.
std::vector<std::size_t> hidden_widths(const MlpConfig& mlp, std::size_t dim);

}  // namespace lanetopo
