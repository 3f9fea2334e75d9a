#include "lanetopo/scenesim.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace lanetopo {

std::string_view to_string(Layout layout) {
  switch (layout) {
    case Layout::grid:
      return "grid";
    case Layout::chain:
      return "chain";
    case Layout::intersection:
      return "intersection";
  }
  return "chain";
}

Layout layout_from_string(std::string_view name) {
  if (name == "grid") return Layout::grid;
  if (name == "chain") return Layout::chain;
  if (name == "intersection") return Layout::intersection;
  throw std::invalid_argument("unknown layout '" + std::string(name) + "'");
}

namespace {

// Chain rows: up to 4 lanes per row, rows 4 m apart.
constexpr std::size_t kChainRows = 12;
constexpr std::size_t kChainPerRow = 4;
constexpr double kChainRowSpacing = 4.0;
constexpr double kChainHalfLength = 40.0;

constexpr std::array<double, 5> kGridX{-40.0, -20.0, 0.0, 20.0, 40.0};
constexpr std::array<double, 4> kGridY{-18.0, -6.0, 6.0, 18.0};

constexpr double kIntersectionHalf = 8.0;
constexpr double kIntersectionLaneOffset = 2.0;

constexpr double kImageWidth = 2048.0;
constexpr double kImageHeight = 1550.0;

using Rng = std::mt19937_64;

double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

double gaussian(Rng& rng, double sigma) { return std::normal_distribution<double>(0.0, sigma)(rng); }

bool bernoulli(Rng& rng, double p) { return std::bernoulli_distribution(p)(rng); }

/// Gently bowed lane from `a` to `b`, resampled to 11 equally spaced points.
/// The endpoints are reproduced exactly so shared nodes give zero gaps.
Polyline3 lane_between(const Point3& a, const Point3& b, double bow, double z_wave) {
  constexpr std::size_t dense = 41;
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  const double len = std::hypot(dx, dy);
  const double nx = len > 0.0 ? -dy / len : 0.0;
  const double ny = len > 0.0 ? dx / len : 0.0;
  Polyline3 pts;
  pts.reserve(dense);
  for (std::size_t k = 0; k < dense; ++k) {
    const double s = static_cast<double>(k) / static_cast<double>(dense - 1);
    const double hump = std::sin(std::numbers::pi * s);
    pts.push_back({a.x + s * dx + bow * hump * nx, a.y + s * dy + bow * hump * ny,
                   a.z + s * (b.z - a.z) + z_wave * hump});
  }
  pts.front() = a;
  pts.back() = b;
  return resample_polyline(pts, kLanePoints);
}

std::vector<double> random_feature(Rng& rng, std::size_t dim) {
  std::vector<double> f(dim);
  for (auto& v : f) v = gaussian(rng, 1.0);
  return f;
}

struct LaneDraft {
  Polyline3 points;
  LaneClass lane_class = LaneClass::normal;
  int start_node = -1;
  int end_node = -1;
};

std::vector<LaneDraft> chain_lanes(Rng& rng, std::size_t n) {
  std::vector<LaneDraft> out;
  int node = 0;
  for (std::size_t row = 0; row < kChainRows && out.size() < n; ++row) {
    const std::size_t count = std::min(kChainPerRow, n - out.size());
    const double y = -22.0 + kChainRowSpacing * static_cast<double>(row);
    std::vector<Point3> nodes;
    for (std::size_t k = 0; k <= count; ++k) {
      const double x = -kChainHalfLength + 2.0 * kChainHalfLength * static_cast<double>(k) /
                                                static_cast<double>(count);
      nodes.push_back({x, y + uniform(rng, -0.5, 0.5), uniform(rng, -0.4, 0.4)});
    }
    for (std::size_t k = 0; k < count; ++k) {
      LaneDraft d;
      d.points = lane_between(nodes[k], nodes[k + 1], uniform(rng, -0.8, 0.8), uniform(rng, -0.1, 0.1));
      d.start_node = node + static_cast<int>(k);
      d.end_node = node + static_cast<int>(k) + 1;
      out.push_back(std::move(d));
    }
    node += static_cast<int>(count) + 1;
  }
  return out;
}

std::vector<LaneDraft> grid_lanes(Rng& rng, std::size_t n) {
  const std::size_t nx = kGridX.size();
  const std::size_t ny = kGridY.size();
  std::vector<Point3> nodes;
  for (std::size_t j = 0; j < ny; ++j)
    for (std::size_t i = 0; i < nx; ++i)
      nodes.push_back({kGridX[i] + uniform(rng, -1.0, 1.0), kGridY[j] + uniform(rng, -1.0, 1.0),
                       uniform(rng, -0.4, 0.4)});
  auto id = [&](std::size_t i, std::size_t j) { return static_cast<int>(j * nx + i); };

  // Eastbound and northbound links only: a DAG without U-turn pairs.
  std::vector<std::pair<int, int>> links;
  for (std::size_t j = 0; j < ny; ++j)
    for (std::size_t i = 0; i + 1 < nx; ++i) links.emplace_back(id(i, j), id(i + 1, j));
  for (std::size_t j = 0; j + 1 < ny; ++j)
    for (std::size_t i = 0; i < nx; ++i) links.emplace_back(id(i, j), id(i, j + 1));
  std::shuffle(links.begin(), links.end(), rng);
  links.resize(std::min(n, links.size()));

  std::vector<LaneDraft> out;
  for (auto [s, e] : links) {
    LaneDraft d;
    d.points = lane_between(nodes[static_cast<std::size_t>(s)], nodes[static_cast<std::size_t>(e)],
                            uniform(rng, -0.6, 0.6), uniform(rng, -0.1, 0.1));
    d.start_node = s;
    d.end_node = e;
    out.push_back(std::move(d));
  }
  return out;
}

std::vector<LaneDraft> intersection_lanes(Rng& rng, std::size_t n) {
  const DetectionRange range;
  constexpr std::array<std::array<double, 2>, 4> dirs{{{1, 0}, {0, 1}, {-1, 0}, {0, -1}}};
  const double h = kIntersectionHalf;
  const double w = kIntersectionLaneOffset;

  // Nodes 0..3: entries, 4..7: exits, 8..11: incoming starts, 12..15: outgoing ends.
  std::array<Point3, 16> nodes;
  for (std::size_t a = 0; a < 4; ++a) {
    const double dx = dirs[a][0], dy = dirs[a][1];
    const double rx = dy, ry = -dx;
    const double reach = dx != 0.0 ? range.x_max - 12.0 : range.y_max - 3.0;
    nodes[a] = {h * dx + w * rx, h * dy + w * ry, uniform(rng, -0.2, 0.2)};
    nodes[4 + a] = {h * dx - w * rx, h * dy - w * ry, uniform(rng, -0.2, 0.2)};
    nodes[8 + a] = {reach * dx + w * rx, reach * dy + w * ry, uniform(rng, -0.4, 0.4)};
    nodes[12 + a] = {reach * dx - w * rx, reach * dy - w * ry, uniform(rng, -0.4, 0.4)};
  }

  auto connector = [&](std::size_t a, std::size_t b) {
    const Point3& p0 = nodes[a];
    const Point3& p4 = nodes[4 + b];
    const double k = 3.0;
    const Point3 p1{p0.x - k * dirs[a][0], p0.y - k * dirs[a][1], p0.z};
    const Point3 p3{p4.x - k * dirs[b][0], p4.y - k * dirs[b][1], p4.z};
    const Point3 p2{0.5 * (p1.x + p3.x), 0.5 * (p1.y + p3.y), 0.5 * (p1.z + p3.z)};
    Polyline3 dense = bezier_to_polyline(BezierCurve{{p0, p1, p2, p3, p4}}, 41);
    dense.front() = p0;
    dense.back() = p4;
    return resample_polyline(dense, kLanePoints);
  };

  std::vector<std::pair<std::size_t, std::size_t>> routes;
  for (std::size_t a = 0; a < 4; ++a)
    for (std::size_t b = 0; b < 4; ++b)
      if (a != b) routes.emplace_back(a, b);
  std::shuffle(routes.begin(), routes.end(), rng);

  std::vector<LaneDraft> out;
  std::array<bool, 4> have_in{}, have_out{};
  auto push = [&](LaneDraft d) {
    if (out.size() < n) out.push_back(std::move(d));
  };
  for (auto [a, b] : routes) {
    if (!have_in[a]) {
      have_in[a] = true;
      push({lane_between(nodes[8 + a], nodes[a], uniform(rng, -0.4, 0.4), 0.0), LaneClass::normal,
            static_cast<int>(8 + a), static_cast<int>(a)});
    }
    push({connector(a, b), LaneClass::intersection_virtual, static_cast<int>(a),
          static_cast<int>(4 + b)});
    if (!have_out[b]) {
      have_out[b] = true;
      push({lane_between(nodes[4 + b], nodes[12 + b], uniform(rng, -0.4, 0.4), 0.0),
            LaneClass::normal, static_cast<int>(4 + b), static_cast<int>(12 + b)});
    }
  }
  return out;
}

std::vector<TrafficElement> traffic_elements(Rng& rng, std::size_t n) {
  const auto& cats = synthetic_te_categories();
  std::vector<TrafficElement> out;
  const std::size_t per_row = 16;
  const double slot_w = kImageWidth / static_cast<double>(per_row);
  for (std::size_t t = 0; t < n; ++t) {
    const double x0 = slot_w * static_cast<double>(t % per_row);
    const double y0 = (t / per_row == 0) ? 200.0 : 700.0;
    const double bw = uniform(rng, 40.0, slot_w - 16.0);
    const double bh = uniform(rng, 40.0, 300.0);
    const double bx = x0 + uniform(rng, 4.0, slot_w - bw - 4.0);
    const double by = y0 + uniform(rng, 0.0, 150.0);
    TrafficElement te;
    te.bbox = {bx, by, bx + bw, by + bh};
    te.category = cats[std::uniform_int_distribution<std::size_t>(0, cats.size() - 1)(rng)];
    out.push_back(std::move(te));
  }
  return out;
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace

std::size_t layout_capacity(Layout layout) {
  switch (layout) {
    case Layout::chain:
      return kChainRows * kChainPerRow;
    case Layout::grid:
      return kGridY.size() * (kGridX.size() - 1) + (kGridY.size() - 1) * kGridX.size();
    case Layout::intersection:
      return 4 + 4 + 12;
  }
  return 0;
}

const std::vector<std::string>& synthetic_te_categories() {
  static const std::vector<std::string> cats{
      "unknown",      "red",           "green",   "yellow",    "go_straight",
      "turn_left",    "turn_right",    "no_left_turn", "no_right_turn", "u_turn",
      "no_u_turn",    "slight_left",   "slight_right"};
  return cats;
}

SceneFrame generate_scene(const SceneSpec& spec) {
  Rng rng(spec.seed);
  const std::size_t n_lanes = std::min(spec.n_lanes, layout_capacity(spec.layout));
  const std::size_t n_tes = std::min(spec.n_tes, kMaxTrafficElements);

  std::vector<LaneDraft> drafts;
  switch (spec.layout) {
    case Layout::chain:
      drafts = chain_lanes(rng, n_lanes);
      break;
    case Layout::grid:
      drafts = grid_lanes(rng, n_lanes);
      break;
    case Layout::intersection:
      drafts = intersection_lanes(rng, n_lanes);
      break;
  }

  SceneFrame f;
  f.frame_id = spec.frame_id;
  for (auto& d : drafts) {
    LaneCenterline lane;
    lane.points = std::move(d.points);
    lane.lane_class = d.lane_class;
    f.lanes.push_back(std::move(lane));
  }
  f.traffic_elements = traffic_elements(rng, n_tes);

  const std::size_t L = f.lanes.size();
  const std::size_t T = f.traffic_elements.size();
  f.lane_lane = BoolGrid(L, L, false);
  for (std::size_t i = 0; i < L; ++i)
    for (std::size_t j = 0; j < L; ++j)
      f.lane_lane(i, j) = i != j && drafts[i].end_node == drafts[j].start_node;

  // Each TE controls a random subset of the normal lanes, at least one.
  f.lane_te = BoolGrid(L, T, false);
  std::vector<std::size_t> controllable;
  for (std::size_t i = 0; i < L; ++i)
    if (f.lanes[i].lane_class == LaneClass::normal) controllable.push_back(i);
  if (controllable.empty())
    for (std::size_t i = 0; i < L; ++i) controllable.push_back(i);
  for (std::size_t t = 0; t < T && !controllable.empty(); ++t) {
    bool any = false;
    for (auto i : controllable) {
      if (bernoulli(rng, 0.3)) {
        f.lane_te(i, t) = true;
        any = true;
      }
    }
    if (!any) {
      const auto pick = std::uniform_int_distribution<std::size_t>(0, controllable.size() - 1)(rng);
      f.lane_te(controllable[pick], t) = true;
    }
  }

  if (spec.feature_dim > 0) {
    for (auto& lane : f.lanes) lane.feature = random_feature(rng, spec.feature_dim);
    for (auto& te : f.traffic_elements) te.feature = random_feature(rng, spec.feature_dim);
  }
  return f;
}

void PerturbationConfig::validate() const {
  auto rate = [](double r, const char* name) {
    if (!(r >= 0.0 && r <= 1.0)) throw std::invalid_argument(std::string(name) + " must be in [0,1]");
  };
  rate(drop_rate, "drop_rate");
  rate(spurious_rate, "spurious_rate");
  rate(edge_flip_rate, "edge_flip_rate");
  if (!(point_noise_sigma >= 0.0)) throw std::invalid_argument("point_noise_sigma must be >= 0");
  if (!(confidence_noise_sigma >= 0.0)) {
    throw std::invalid_argument("confidence_noise_sigma must be >= 0");
  }
}

namespace {

template <typename T>
std::vector<T> select(const std::vector<T>& xs, const std::vector<std::size_t>& idx) {
  std::vector<T> out;
  out.reserve(idx.size());
  for (auto i : idx) out.push_back(xs[i]);
  return out;
}

std::optional<std::size_t> feature_dim(const auto& instances) {
  for (const auto& x : instances)
    if (x.feature) return x.feature->size();
  return std::nullopt;
}

}  // namespace

SceneFrame perturb_scene(const SceneFrame& frame, const PerturbationConfig& config) {
  config.validate();
  Rng rng(config.seed ^ fnv1a(frame.frame_id));
  const DetectionRange range;

  // Drop.
  std::vector<std::size_t> lane_keep, te_keep;
  for (std::size_t i = 0; i < frame.lanes.size(); ++i)
    if (config.drop_rate == 0.0 || !bernoulli(rng, config.drop_rate)) lane_keep.push_back(i);
  for (std::size_t t = 0; t < frame.traffic_elements.size(); ++t)
    if (config.drop_rate == 0.0 || !bernoulli(rng, config.drop_rate)) te_keep.push_back(t);

  SceneFrame out;
  out.frame_id = frame.frame_id;
  out.lanes = select(frame.lanes, lane_keep);
  out.traffic_elements = select(frame.traffic_elements, te_keep);
  const std::size_t kept_l = lane_keep.size();
  const std::size_t kept_t = te_keep.size();

  // Spurious instances, one Bernoulli trial per original instance.
  const auto lane_dim = feature_dim(frame.lanes);
  const auto te_dim = feature_dim(frame.traffic_elements);
  if (config.spurious_rate > 0.0) {
    for (std::size_t i = 0; i < frame.lanes.size(); ++i) {
      if (!bernoulli(rng, config.spurious_rate)) continue;
      const Point3 a{uniform(rng, 0.8 * range.x_min, 0.8 * range.x_max),
                     uniform(rng, 0.8 * range.y_min, 0.8 * range.y_max), uniform(rng, -0.5, 0.5)};
      const double heading = uniform(rng, -std::numbers::pi, std::numbers::pi);
      const double len = uniform(rng, 10.0, 30.0);
      const Point3 b{a.x + len * std::cos(heading), a.y + len * std::sin(heading),
                     uniform(rng, -0.5, 0.5)};
      LaneCenterline lane;
      lane.points = lane_between(a, b, uniform(rng, -1.0, 1.0), 0.0);
      lane.confidence = uniform(rng, 0.0, 0.5);
      lane.lane_class = bernoulli(rng, 0.8) ? LaneClass::normal : LaneClass::intersection_virtual;
      if (lane_dim) lane.feature = random_feature(rng, *lane_dim);
      out.lanes.push_back(std::move(lane));
    }
    const auto& cats = synthetic_te_categories();
    for (std::size_t t = 0; t < frame.traffic_elements.size(); ++t) {
      if (!bernoulli(rng, config.spurious_rate)) continue;
      const double x1 = uniform(rng, 0.0, kImageWidth - 200.0);
      const double y1 = uniform(rng, 0.0, kImageHeight - 300.0);
      TrafficElement te;
      te.bbox = {x1, y1, x1 + uniform(rng, 30.0, 200.0), y1 + uniform(rng, 30.0, 300.0)};
      te.category = cats[std::uniform_int_distribution<std::size_t>(0, cats.size() - 1)(rng)];
      te.confidence = uniform(rng, 0.0, 0.5);
      if (te_dim) te.feature = random_feature(rng, *te_dim);
      out.traffic_elements.push_back(std::move(te));
    }
  }

  if (config.point_noise_sigma > 0.0) {
    for (auto& lane : out.lanes) {
      for (auto& p : lane.points) {
        p.x += gaussian(rng, config.point_noise_sigma);
        p.y += gaussian(rng, config.point_noise_sigma);
        p.z += gaussian(rng, config.point_noise_sigma);
      }
    }
  }
  if (config.confidence_noise_sigma > 0.0) {
    auto jitter = [&](double c) {
      return std::clamp(c + gaussian(rng, config.confidence_noise_sigma), 0.0, 1.0);
    };
    for (auto& lane : out.lanes) lane.confidence = jitter(lane.confidence);
    for (auto& te : out.traffic_elements) te.confidence = jitter(te.confidence);
  }

  // Topology: carry over kept rows/cols, spurious instances start unconnected.
  const std::size_t L = out.lanes.size();
  const std::size_t T = out.traffic_elements.size();
  out.lane_lane = BoolGrid(L, L, false);
  out.lane_te = BoolGrid(L, T, false);
  for (std::size_t i = 0; i < kept_l; ++i) {
    for (std::size_t j = 0; j < kept_l; ++j) out.lane_lane(i, j) = frame.lane_lane(lane_keep[i], lane_keep[j]);
    for (std::size_t t = 0; t < kept_t; ++t) out.lane_te(i, t) = frame.lane_te(lane_keep[i], te_keep[t]);
  }
  if (config.edge_flip_rate > 0.0) {
    for (std::size_t i = 0; i < L; ++i)
      for (std::size_t j = 0; j < L; ++j)
        if (i != j && bernoulli(rng, config.edge_flip_rate)) out.lane_lane(i, j) = !out.lane_lane(i, j);
    for (std::size_t i = 0; i < L; ++i)
      for (std::size_t t = 0; t < T; ++t)
        if (bernoulli(rng, config.edge_flip_rate)) out.lane_te(i, t) = !out.lane_te(i, t);
  }

  if (frame.lane_lane_confidence || frame.lane_te_confidence) {
    // Confidence grids follow the kept instances; new rows/cols score 0.
    auto carry = [&](const std::optional<RealGrid>& src, std::size_t cols,
                     const std::vector<std::size_t>& col_keep) -> std::optional<RealGrid> {
      if (!src) return std::nullopt;
      RealGrid g(L, cols, 0.0);
      for (std::size_t i = 0; i < kept_l; ++i)
        for (std::size_t j = 0; j < col_keep.size(); ++j) g(i, j) = (*src)(lane_keep[i], col_keep[j]);
      return g;
    };
    out.lane_lane_confidence = carry(frame.lane_lane_confidence, L, lane_keep);
    out.lane_te_confidence = carry(frame.lane_te_confidence, T, te_keep);
  }
  return out;
}

}  // namespace lanetopo
