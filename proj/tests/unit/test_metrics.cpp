#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <random>

#include "lanetopo/metrics.hpp"
#include "lanetopo/oracles.hpp"
#include "lanetopo/scenesim.hpp"
#include "support.hpp"

using namespace lanetopo;

namespace {

// Exhaustive search over every injective partial assignment; keeps the one
// that is lexicographically best when predictions are read in confidence
// order (matched before unmatched, then smaller distance, then lower GT).
std::vector<std::optional<std::size_t>> brute_force_match(const std::vector<double>& conf,
                                                          const RealGrid& d, double thr) {
  const std::size_t P = conf.size(), G = d.cols();
  std::vector<std::size_t> order(P);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return conf[a] > conf[b]; });

  using Key = std::vector<std::tuple<int, double, std::size_t>>;
  std::optional<Key> best_key;
  std::vector<std::optional<std::size_t>> best, cur(P);
  std::vector<bool> used(G, false);
  std::function<void(std::size_t)> rec = [&](std::size_t k) {
    if (k == P) {
      Key key;
      for (auto p : order) key.emplace_back(cur[p] ? 0 : 1, cur[p] ? d(p, *cur[p]) : 0.0, cur[p].value_or(0));
      if (!best_key || key < *best_key) {
        best_key = key;
        best = cur;
      }
      return;
    }
    const auto p = order[k];
    cur[p].reset();
    rec(k + 1);
    for (std::size_t g = 0; g < G; ++g) {
      if (used[g] || !(d(p, g) <= thr)) continue;
      used[g] = true;
      cur[p] = g;
      rec(k + 1);
      used[g] = false;
      cur[p].reset();
    }
  };
  rec(0);
  return best;
}

MatchResult ranked(std::initializer_list<bool> tps, std::size_t num_gt) {
  MatchResult m;
  m.num_gt = num_gt;
  double c = 1.0;
  std::size_t g = 0;
  for (bool tp : tps) {
    MatchEntry e;
    e.confidence = c;
    c -= 0.1;
    if (tp) e.gt = g++;
    m.predictions.push_back(e);
  }
  return m;
}

MatchResult random_match(std::mt19937_64& rng, std::size_t max_preds) {
  std::uniform_int_distribution<std::size_t> np(0, max_preds), ng(0, 6);
  std::uniform_int_distribution<int> level(0, 4);
  MatchResult m;
  m.num_gt = ng(rng);
  const auto n = np(rng);
  std::size_t next_gt = 0;
  std::bernoulli_distribution coin(0.5);
  for (std::size_t i = 0; i < n; ++i) {
    MatchEntry e;
    e.confidence = 0.2 * level(rng);  // deliberate ties
    if (next_gt < m.num_gt && coin(rng)) e.gt = next_gt++;
    m.predictions.push_back(e);
  }
  return m;
}

}  // namespace

TEST_CASE("match_instances: trivial cases") {
  const auto gt = test::lane(test::straight({0, 0, 0}, {10, 0, 0}));
  const std::vector<LaneCenterline> preds{gt}, gts{gt};
  const auto m = match_instances(std::span<const LaneCenterline>(preds),
                                 std::span<const LaneCenterline>(gts), lane_distance, 1.0);
  REQUIRE(m.predictions.size() == 1);
  CHECK(m.predictions[0].gt == std::optional<std::size_t>(0));

  const std::vector<LaneCenterline> none;
  const auto empty = match_instances(std::span<const LaneCenterline>(none),
                                     std::span<const LaneCenterline>(gts), lane_distance, 1.0);
  CHECK(empty.predictions.empty());
  CHECK(empty.num_gt == 1);
}

TEST_CASE("match_instances: confidence order decides contested GTs") {
  RealGrid d(2, 1);
  d(0, 0) = 0.2;
  d(1, 0) = 0.1;
  const std::vector<double> conf{0.4, 0.9};
  const auto m = match_instances(conf, d, 1.0);
  CHECK_FALSE(m.predictions[0].gt);
  CHECK(m.predictions[1].gt == std::optional<std::size_t>(0));

  RealGrid tie(1, 2, 0.5);
  const std::vector<double> one{1.0};
  CHECK(match_instances(one, tie, 1.0).predictions[0].gt == std::optional<std::size_t>(0));
}

TEST_CASE("match_instances equals the exhaustive assignment oracle") {
  std::mt19937_64 rng(53);
  std::uniform_real_distribution<double> u(0.0, 2.0);
  std::uniform_int_distribution<int> lv(0, 3);
  for (int trial = 0; trial < 400; ++trial) {
    const std::size_t P = 1 + trial % 4, G = 1 + (trial / 4) % 3;
    std::vector<double> conf(P);
    for (auto& c : conf) c = 0.25 * lv(rng);
    RealGrid d(P, G);
    for (std::size_t i = 0; i < P; ++i)
      for (std::size_t j = 0; j < G; ++j) d(i, j) = std::round(u(rng) * 4) / 4;  // ties
    const auto m = match_instances(conf, d, 1.0);
    const auto ref = brute_force_match(conf, d, 1.0);
    for (std::size_t p = 0; p < P; ++p) CHECK(m.predictions[p].gt == ref[p]);

    std::vector<bool> seen(G, false);
    for (const auto& e : m.predictions) {
      if (!e.gt) continue;
      CHECK_FALSE(seen[*e.gt]);
      seen[*e.gt] = true;
    }
  }
}

TEST_CASE("average_precision: hand-checked rankings") {
  CHECK(average_precision(ranked({true, true}, 2)) == 1.0);
  CHECK(average_precision(ranked({false, false}, 2)) == 0.0);
  CHECK(average_precision(ranked({true, false, true}, 2)) == doctest::Approx(5.0 / 6.0).epsilon(1e-12));
  CHECK(average_precision(ranked({}, 0)) == 1.0);
  CHECK(average_precision(ranked({false}, 0)) == 0.0);
  CHECK(average_precision(ranked({true}, 4)) == doctest::Approx(0.25));
}

TEST_CASE("average_precision equals the envelope oracle") {
  std::mt19937_64 rng(59);
  for (int trial = 0; trial < 500; ++trial) {
    const auto m = random_match(rng, 8);
    CHECK(average_precision(m) == oracle::oracle_ap(m));
  }
}

TEST_CASE("average_precision: bounded, FP at bottom never helps, TP on top never hurts") {
  std::mt19937_64 rng(61);
  for (int trial = 0; trial < 300; ++trial) {
    const auto m = random_match(rng, 10);
    const double ap = average_precision(m);
    CHECK(ap >= 0.0);
    CHECK(ap <= 1.0);

    auto with_fp = m;
    with_fp.predictions.push_back({-1.0, std::nullopt});
    CHECK(average_precision(with_fp) <= ap + 1e-15);

    auto with_tp = m;
    with_tp.num_gt += 1;
    with_tp.predictions.push_back({2.0, with_tp.num_gt - 1});
    if (m.num_gt > 0) CHECK(average_precision(with_tp) >= ap - 1e-15);
  }
}

TEST_CASE("det_l: identity, empty and a 1.5 m offset") {
  const std::vector<LaneCenterline> gt{test::lane(test::straight({0, 0, 0}, {20, 0, 0})),
                                       test::lane(test::straight({0, 5, 0}, {20, 9, 0}),
                                                  1.0, LaneClass::intersection_virtual)};
  const std::vector<double> thr{1.0, 2.0, 3.0};
  CHECK(det_l(gt, gt, thr) == 1.0);
  CHECK(det_l({}, gt, thr) == 0.0);

  const std::vector<LaneCenterline> one{gt[0]};
  const std::vector<LaneCenterline> shifted{test::lane(test::straight({0, 1.5, 0}, {20, 1.5, 0}))};
  CHECK(lane_distance(shifted[0], one[0]) == doctest::Approx(1.5));
  CHECK(det_l(shifted, one, thr) == doctest::Approx(2.0 / 3.0));

  // Class mismatch never matches.
  std::vector<LaneCenterline> wrong_class = one;
  wrong_class[0].lane_class = LaneClass::intersection_virtual;
  CHECK(det_l(wrong_class, one, thr) == 0.0);
}

TEST_CASE("det_l and det_t ignore prediction list order") {
  std::mt19937_64 rng(67);
  for (int trial = 0; trial < 20; ++trial) {
    SceneSpec spec{static_cast<std::uint64_t>(trial), 10, 6, Layout::grid, 0, "f"};
    const auto gt = generate_scene(spec);
    PerturbationConfig pc;
    pc.point_noise_sigma = 0.4;
    pc.spurious_rate = 0.5;
    pc.seed = 5;
    const auto pred = perturb_scene(gt, pc);
    auto lanes = pred.lanes;
    auto tes = pred.traffic_elements;
    // Distinct confidences: with ties, list order legitimately breaks them.
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (auto& l : lanes) l.confidence = u(rng);
    for (auto& t : tes) t.confidence = u(rng);
    const std::vector<double> thr{1.0, 2.0, 3.0};
    const double dl = det_l(lanes, gt.lanes, thr);
    const double dt = det_t(tes, gt.traffic_elements, 0.75);
    std::reverse(lanes.begin(), lanes.end());
    std::shuffle(tes.begin(), tes.end(), rng);
    CHECK(det_l(lanes, gt.lanes, thr) == doctest::Approx(dl).epsilon(1e-12));
    CHECK(det_t(tes, gt.traffic_elements, 0.75) == doctest::Approx(dt).epsilon(1e-12));
  }
}

TEST_CASE("det_t: identical, disjoint and a nested box at IoU 0.8") {
  TrafficElement g;
  g.bbox = {0, 0, 100, 100};
  g.category = "red";
  const std::vector<TrafficElement> gt{g};
  CHECK(det_t(gt, gt, 0.75) == 1.0);

  TrafficElement far = g;
  far.bbox = {200, 200, 300, 300};
  CHECK(det_t(std::vector<TrafficElement>{far}, gt, 0.75) == 0.0);

  const double side = 100.0 * std::sqrt(0.8);
  const double off = (100.0 - side) / 2.0;
  TrafficElement inner = g;
  inner.bbox = {off, off, off + side, off + side};
  CHECK(iou(inner.bbox, g.bbox) == doctest::Approx(0.8));
  CHECK(det_t(std::vector<TrafficElement>{inner}, gt, 0.75) == 1.0);
  CHECK(det_t(std::vector<TrafficElement>{inner}, gt, 0.85) == 0.0);

  TrafficElement other_cat = g;
  other_cat.category = "green";
  CHECK(det_t(std::vector<TrafficElement>{other_cat}, gt, 0.75) == 0.0);
}

TEST_CASE("top_score: perfect, empty and half-recovered chain") {
  BoolGrid gt(3, 3, false);
  gt(0, 1) = true;
  gt(1, 2) = true;
  const std::vector<std::optional<std::size_t>> ident{0, 1, 2};

  CHECK(top_score({&gt, nullptr}, gt, ident, ident) == 1.0);

  const BoolGrid none(3, 3, false);
  CHECK(top_score({&none, nullptr}, gt, ident, ident) == 0.0);

  BoolGrid half(3, 3, false);
  half(0, 1) = true;
  RealGrid conf(3, 3, 0.0);
  conf(0, 1) = 0.9;
  CHECK(top_score({&half, &conf}, gt, ident, ident) == doctest::Approx(0.5));

  // Edges on unmatched vertices are false positives; their GT edges are misses.
  const std::vector<std::optional<std::size_t>> lost{0, std::nullopt, 2};
  CHECK(top_score({&gt, nullptr}, gt, lost, lost) == 0.0);
}

TEST_CASE("top_score is invariant under relabeling with fixed matching") {
  std::mt19937_64 rng(71);
  std::bernoulli_distribution coin(0.35);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + trial % 6;
    BoolGrid gt(n, n, false), pred(n, n, false);
    RealGrid conf(n, n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        gt(i, j) = coin(rng);
        pred(i, j) = coin(rng);
        conf(i, j) = u(rng);
      }
    }
    std::vector<std::optional<std::size_t>> match(n);
    std::vector<std::size_t> gts(n);
    std::iota(gts.begin(), gts.end(), std::size_t{0});
    std::shuffle(gts.begin(), gts.end(), rng);
    for (std::size_t i = 0; i < n; ++i)
      if (coin(rng) || i % 2 == 0) match[i] = gts[i];
    const double base = top_score({&pred, &conf}, gt, match, match);

    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::shuffle(perm.begin(), perm.end(), rng);
    BoolGrid p2(n, n);
    RealGrid c2(n, n);
    std::vector<std::optional<std::size_t>> m2(n);
    for (std::size_t i = 0; i < n; ++i) {
      m2[i] = match[perm[i]];
      for (std::size_t j = 0; j < n; ++j) {
        p2(i, j) = pred(perm[i], perm[j]);
        c2(i, j) = conf(perm[i], perm[j]);
      }
    }
    CHECK(top_score({&p2, &c2}, gt, m2, m2) == doctest::Approx(base).epsilon(1e-12));
  }
}

TEST_CASE("f_scale and ols") {
  CHECK(f_scale(0.0) == 0.0);
  CHECK(f_scale(1.0) == 1.0);
  CHECK(f_scale(0.0092) == doctest::Approx(0.0959).epsilon(5e-4));
  CHECK(f_scale(0.1146) == doctest::Approx(0.3385).epsilon(5e-4));
  CHECK(f_scale(0.1537) == doctest::Approx(0.3920).epsilon(5e-4));
  CHECK(f_scale(0.2181) == doctest::Approx(0.4670).epsilon(5e-4));
  CHECK(f_scale(0.25, ScaleFunction::identity) == 0.25);
  CHECK_THROWS_AS(f_scale(-0.01), std::invalid_argument);
  CHECK_THROWS_AS(f_scale(1.01), std::invalid_argument);

  CHECK(std::abs(ols(0.0957, 0.4589, 0.0092, 0.1146) - 0.2473) <= 5e-4);
  CHECK(ols(1, 1, 1, 1) == 1.0);
  CHECK(std::abs(ols(0.22, 0.72, 0.13, 0.23) - 0.4450) <= 5e-4);
  CHECK_THROWS_AS(ols(1.2, 0, 0, 0), std::invalid_argument);
}

TEST_CASE("ols: monotone in each argument, quarter-Lipschitz in the DET terms") {
  std::mt19937_64 rng(73);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 500; ++trial) {
    std::array<double, 4> x{u(rng), u(rng), u(rng), u(rng)};
    const double base = ols(x[0], x[1], x[2], x[3]);
    for (std::size_t k = 0; k < 4; ++k) {
      auto y = x;
      y[k] = x[k] + (1.0 - x[k]) * u(rng);
      const double up = ols(y[0], y[1], y[2], y[3]);
      CHECK(up >= base);
      if (k < 2) CHECK(up - base <= 0.25 * (y[k] - x[k]) + 1e-15);
    }
  }
}

TEST_CASE("evaluate: identity, empty predictions and misaligned ids") {
  std::vector<SceneFrame> gt;
  for (int i = 0; i < 5; ++i) {
    gt.push_back(generate_scene({static_cast<std::uint64_t>(i), 8, 4, Layout::intersection, 0,
                                 "f" + std::to_string(i)}));
  }
  const auto same = evaluate(gt, gt, {});
  CHECK(same.det_l == 1.0);
  CHECK(same.det_t == 1.0);
  CHECK(same.top_ll == 1.0);
  CHECK(same.top_lt == 1.0);
  CHECK(same.ols == 1.0);
  CHECK(same.breakdowns.frames == 5);
  CHECK(same.breakdowns.det_l_per_threshold.size() == 3);

  std::vector<SceneFrame> empty;
  for (const auto& f : gt) {
    SceneFrame e;
    e.frame_id = f.frame_id;
    empty.push_back(e);
  }
  const auto zero = evaluate(empty, gt, {});
  CHECK(zero.det_l == 0.0);
  CHECK(zero.det_t == 0.0);
  CHECK(zero.top_ll == 0.0);
  CHECK(zero.top_lt == 0.0);
  CHECK(zero.ols == 0.0);

  auto renamed = gt;
  renamed[2].frame_id = "zzz";
  try {
    evaluate(renamed, gt, {});
    FAIL("expected an error");
  } catch (const std::invalid_argument& e) {
    const std::string msg = e.what();
    CHECK(msg.find("f2") != std::string::npos);
    CHECK(msg.find("zzz") != std::string::npos);
  }
}

TEST_CASE("evaluate: pooled result is independent of thread count") {
  std::vector<SceneFrame> gt, pred;
  PerturbationConfig pc;
  pc.point_noise_sigma = 0.3;
  pc.confidence_noise_sigma = 0.2;
  pc.drop_rate = 0.1;
  pc.spurious_rate = 0.2;
  pc.edge_flip_rate = 0.05;
  pc.seed = 17;
  for (int i = 0; i < 20; ++i) {
    gt.push_back(generate_scene({static_cast<std::uint64_t>(100 + i), 12, 5,
                                 static_cast<Layout>(i % 3), 0, "frame" + std::to_string(i)}));
    pred.push_back(perturb_scene(gt.back(), pc));
  }
  EvalConfig cfg;
  const auto ref = evaluate(pred, gt, cfg);
  for (unsigned t : {2u, 3u, 8u, 64u}) {
    cfg.threads = t;
    const auto r = evaluate(pred, gt, cfg);
    CHECK(r.det_l == ref.det_l);
    CHECK(r.det_t == ref.det_t);
    CHECK(r.top_ll == ref.top_ll);
    CHECK(r.top_lt == ref.top_lt);
    CHECK(r.ols == ref.ols);
    CHECK(r.breakdowns.det_t_per_category == ref.breakdowns.det_t_per_category);
  }
  CHECK(ref.ols > 0.0);
  CHECK(ref.ols < 1.0);
}
