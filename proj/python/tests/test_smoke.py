import json
import math

import pytest

import lanetopo as lt


def test_resample_and_bezier():
    pts = lt.resample_polyline([(0, 0, 0), (10, 0, 0)])
    assert len(pts) == 11
    assert pts[3] == pytest.approx((3.0, 0.0, 0.0))
    curve = lt.bezier_to_polyline([(0, 0, 0), (1, 0, 0), (2, 0, 0), (3, 0, 0), (4, 0, 0)])
    assert [p[0] for p in curve] == pytest.approx([0.4 * k for k in range(11)])
    with pytest.raises(ValueError, match="degenerate"):
        lt.resample_polyline([(1, 1, 1), (1, 1, 1)])


def test_normalize_round_trip():
    pts = [(0, 0, 0), (50, 25, 3), (-80, 10, 1)]
    norm = lt.normalize_points(pts)
    assert norm[0] == pytest.approx((0.5, 0.5, 0.5))
    assert norm[1] == pytest.approx((1.0, 1.0, 1.0))
    back = lt.denormalize_points(norm)
    assert [c for p in back for c in p] == pytest.approx([c for p in pts for c in p])
    custom = lt.normalize_points([(0, 0, 0)], config={"detection_range": {"x_min": 0, "x_max": 10}})
    assert custom[0][0] == 0.0


def test_frechet_and_gap():
    a = [(0, 0, 0), (1, 0, 0)]
    b = [(0, 1, 0), (1, 1, 0)]
    assert lt.discrete_frechet(a, b) == pytest.approx(1.0)
    assert lt.successor_gap(a, [(3, 0, 0), (4, 0, 0)]) == pytest.approx(2.0)


def test_query_kernels():
    pooled = lt.point_pooling([[1, 2], [3, 4], [0, 0]])
    assert pooled == [4, 6]
    assert lt.assemble_lc_queries([[1, 1]], pooled) == [[5, 7]]
    assert lt.augment_with_endpoints([0.5], (1, 2, 3), (4, 5, 6)) == [0.5, 1, 2, 3, 4, 5, 6]


def test_scores():
    assert lt.ols(0.0957, 0.4589, 0.0092, 0.1146) == pytest.approx(0.2472, abs=5e-4)
    assert lt.ols(0.5, 0.5, 0.25, 0.25, fn="identity") == pytest.approx(0.375)
    assert lt.f_scale(0.25) == 0.5
    assert lt.average_precision([(0.9, 0), (0.8, None), (0.7, 1)], 2) == pytest.approx(5 / 6)
    assert lt.average_precision([], 0) == 1.0
    with pytest.raises(ValueError):
        lt.f_scale(1.5)


def test_generate_perturb_evaluate():
    frames = [lt.generate_scene(seed, 10, 4, "intersection", frame_id=f"f{seed}") for seed in range(5)]
    gt = {"frames": frames}
    report = lt.evaluate(gt, gt)
    assert list(report)[:5] == ["det_l", "det_t", "top_ll", "top_lt", "ols"]
    assert report["ols"] == 1.0

    noisy = {"frames": [lt.perturb_scene(f, point_noise_sigma=1.0, seed=3) for f in frames]}
    worse = lt.evaluate(gt, noisy, threads=4)
    assert worse["ols"] < 1.0
    assert worse == lt.evaluate(gt, noisy, threads=1)


def test_infer_with_zero_mlp_recovers_chain():
    frames = {"frames": [lt.generate_scene(s, 6, 2, "chain", feature_dim=4, frame_id=str(s)) for s in range(3)]}
    lane_mlp = lt.init_mlp("lane_lane", 4, zero=True)
    te_mlp = lt.init_mlp("lane_te", 4, zero=True)
    assert len(lane_mlp["layers"][0]["weights"][0]) == 20
    inferred = lt.infer(frames, lane_mlp, te_mlp)
    assert lt.evaluate(frames, inferred)["top_ll"] == 1.0
    off = lt.infer(frames, lane_mlp, te_mlp, config={"geometric_override": False})
    assert lt.evaluate(frames, off)["top_ll"] == 0.0


def test_errors(tmp_path):
    frame = lt.generate_scene(0, 3, 1)
    frame["lanes"][0]["points"].pop()
    with pytest.raises(lt.SchemaError, match=r"lanes\[0\]\.points"):
        lt.evaluate({"frames": [frame]}, {"frames": [frame]})
    with pytest.raises(lt.ConfigError):
        lt.evaluate({"frames": []}, {"frames": []}, config={"tua": 1})
    with pytest.raises(lt.IoError):
        lt.evaluate_files(str(tmp_path / "a.json"), str(tmp_path / "b.json"))


def test_evaluate_files(tmp_path):
    doc = {"frames": [lt.generate_scene(1, 8, 3, "grid")]}
    path = tmp_path / "gt.json"
    path.write_text(json.dumps(doc))
    report = lt.evaluate_files(str(path), str(path), threads=2)
    assert report["ols"] == 1.0
    assert report["breakdowns"]["frames"] == 1
    assert not math.isnan(report["det_t"])
