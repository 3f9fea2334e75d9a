#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "lanetopo/geometry.hpp"
#include "lanetopo/scene.hpp"

namespace lanetopo {

enum class Layout { grid, chain, intersection };

std::string_view to_string(Layout layout);
Layout layout_from_string(std::string_view name);

/// Largest lane count a layout can place inside the default range; larger
/// requests are clamped to it.
std::size_t layout_capacity(Layout layout);
inline constexpr std::size_t kMaxTrafficElements = 32;

/// Label set used for synthetic traffic elements.
const std::vector<std::string>& synthetic_te_categories();

struct SceneSpec {
  std::uint64_t seed = 0;
  std::size_t n_lanes = 0;
  std::size_t n_tes = 0;
  Layout layout = Layout::chain;
  std::size_t feature_dim = 0;  // 0: no query features attached
  std::string frame_id = "frame_0000";
};

/// Ground-truth frame whose lane_lane edges are exactly the directed pairs
/// sharing an end/start point. Pure function of `spec`.
SceneFrame generate_scene(const SceneSpec& spec);

struct PerturbationConfig {
  double point_noise_sigma = 0.0;       // meters
  double confidence_noise_sigma = 0.0;  // unitless
  double drop_rate = 0.0;
  double spurious_rate = 0.0;
  double edge_flip_rate = 0.0;
  std::uint64_t seed = 0;

  void validate() const;  // std::invalid_argument
};

/// Noisy "prediction" derived from a frame. The random stream depends only
/// on (config.seed, frame.frame_id). An all-zero config returns the input.
SceneFrame perturb_scene(const SceneFrame& frame, const PerturbationConfig& config);

}  // namespace lanetopo
