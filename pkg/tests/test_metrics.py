import math
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dexfocus.detections import Resolution
from dexfocus.errors import MismatchError
from dexfocus.focus import Trajectory
from dexfocus.geometry import CropConfig, CropPlan, CropWindow, build_plan
from dexfocus.metrics import coverage, stats_report, trajectory_stats
from dexfocus.stabilize import SmoothingConfig, make_kernel, smooth_trajectory

R = Resolution(448, 448)


def loop_stats(xs, ys, flags):
    n = len(xs)
    speeds = [math.sqrt((xs[i + 1] - xs[i]) ** 2 + (ys[i + 1] - ys[i]) ** 2) for i in range(n - 1)]
    accels = [math.sqrt((xs[i + 2] - 2 * xs[i + 1] + xs[i]) ** 2 + (ys[i + 2] - 2 * ys[i + 1] + ys[i]) ** 2)
              for i in range(n - 2)]
    return (sum(speeds) / len(speeds) if speeds else 0.0,
            sum(accels) / len(accels) if accels else 0.0,
            max(speeds) if speeds else 0.0,
            sum(flags) / n)


def loop_coverage(raw, plan):
    considered = covered = 0
    for p, w in zip(raw.points, plan.windows):
        if p.is_fallback:
            continue
        considered += 1
        px, py = p.x * plan.resolution.width, p.y * plan.resolution.height
        covered += (w.x0 <= px < w.x0 + w.side) and (w.y0 <= py < w.y0 + w.side)
    return (covered / considered if considered else 1.0), considered


def test_constant_trajectory_stats():
    s = trajectory_stats(Trajectory.from_coords([0.3] * 10, [0.6] * 10, 30.0))
    assert s.mean_speed == 0.0 and s.mean_accel == 0.0 and s.max_speed == 0.0


def test_linear_x_stats():
    s = trajectory_stats(Trajectory.from_coords([0.0, 0.1, 0.2], [0.5] * 3, 30.0))
    assert s.mean_speed == pytest.approx(0.1, abs=1e-15)
    assert s.mean_accel == pytest.approx(0.0, abs=1e-15)


def test_short_trajectories():
    s = trajectory_stats(Trajectory.from_coords([0.2], [0.2], 30.0, [True]))
    assert (s.mean_speed, s.mean_accel, s.max_speed, s.fallback_fraction) == (0.0, 0.0, 0.0, 1.0)
    s = trajectory_stats(Trajectory.from_coords([0.2, 0.5], [0.2, 0.6], 30.0))
    assert s.mean_speed == pytest.approx(0.5) and s.mean_accel == 0.0


@pytest.mark.parametrize("seed", range(20))
def test_random_stats_match_loop_reference(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 300)
    xs = [rng.random() for _ in range(n)]
    ys = [rng.random() for _ in range(n)]
    flags = [rng.random() < 0.2 for _ in range(n)]
    s = trajectory_stats(Trajectory.from_coords(xs, ys, 30.0, flags))
    ref = loop_stats(xs, ys, flags)
    for got, want in zip((s.mean_speed, s.mean_accel, s.max_speed, s.fallback_fraction), ref):
        assert abs(got - want) <= 1e-12


@given(x0=st.floats(0, 0.5), y0=st.floats(0, 0.5), vx=st.floats(-5e-4, 5e-4), vy=st.floats(-5e-4, 5e-4),
       n=st.integers(3, 500))
def test_linear_motion_has_zero_accel(x0, y0, vx, vy, n):
    xs = [x0 + 0.25 + vx * i for i in range(n)]
    ys = [y0 + 0.25 + vy * i for i in range(n)]
    assert trajectory_stats(Trajectory.from_coords(xs, ys, 30.0)).mean_accel <= 1e-12


def test_identity_plan_covers_every_frame():
    rng = random.Random(4)
    xs = [rng.uniform(0.3, 0.7) for _ in range(50)]
    ys = [rng.uniform(0.3, 0.7) for _ in range(50)]
    raw = Trajectory.from_coords(xs, ys, 30.0)
    smoothed = smooth_trajectory(raw, make_kernel(SmoothingConfig("identity"), 30.0))
    rep = coverage(raw, build_plan(smoothed, R, CropConfig(0.25, 224)))
    assert (rep.coverage, rep.n_frames_considered) == (1.0, 50)


def test_far_corner_window_is_uncovered():
    raw = Trajectory.from_coords([0.0], [0.0], 30.0)
    plan = CropPlan(R, 224, (CropWindow(0, 224, 224, 224),))
    assert coverage(raw, plan).coverage == 0.0


def test_fallback_frames_excluded():
    raw = Trajectory.from_coords([0.0, 0.5], [0.0, 1.0], 30.0, [True, True])
    plan = CropPlan(R, 224, (CropWindow(0, 224, 224, 224), CropWindow(1, 224, 224, 224)))
    rep = coverage(raw, plan)
    assert (rep.coverage, rep.n_frames_considered) == (1.0, 0)


def test_heavy_smoothing_on_zigzag_loses_coverage():
    n = 120
    xs = [0.1 if (i // 10) % 2 == 0 else 0.9 for i in range(n)]
    ys = [0.5] * n
    raw = Trajectory.from_coords(xs, ys, 30.0)
    smoothed = smooth_trajectory(raw, make_kernel(SmoothingConfig("gaussian", sigma_seconds=2.0), 30.0))
    plan = build_plan(smoothed, R, CropConfig(0.1, 224))
    rep = coverage(raw, plan)
    assert rep.coverage < 1.0
    assert (rep.coverage, rep.n_frames_considered) == loop_coverage(raw, plan)


def test_coverage_frame_count_mismatch():
    raw = Trajectory.from_coords([0.5, 0.5], [0.5, 0.5], 30.0)
    with pytest.raises(MismatchError):
        coverage(raw, CropPlan(R, 224, (CropWindow(0, 0, 0, 224),)))


@pytest.mark.parametrize("seed", range(10))
def test_coverage_permutation_invariant(seed):
    rng = random.Random(seed)
    n = 40
    raw = Trajectory.from_coords([rng.random() for _ in range(n)], [rng.random() for _ in range(n)], 30.0,
                                 [rng.random() < 0.2 for _ in range(n)])
    plan = build_plan(Trajectory.from_coords([rng.random() for _ in range(n)], [rng.random() for _ in range(n)], 30.0),
                      R, CropConfig(0.25, 224))
    perm = list(range(n))
    rng.shuffle(perm)
    raw_p = Trajectory.from_coords([raw.xs[i] for i in perm], [raw.ys[i] for i in perm], 30.0,
                                   [raw.fallback_flags[i] for i in perm])
    plan_p = CropPlan(R, 224, tuple(CropWindow(k, plan.windows[i].x0, plan.windows[i].y0, plan.side)
                                    for k, i in enumerate(perm)))
    assert coverage(raw, plan) == coverage(raw_p, plan_p)


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 10**6), kind=st.sampled_from(["gaussian", "box"]), width=st.floats(0.01, 1.0))
def test_smoothing_does_not_increase_mean_accel(seed, kind, width):
    # empirical property, not a theorem
    rng = np.random.default_rng(seed)
    n = int(rng.integers(3, 400))
    raw = Trajectory.from_coords(rng.random(n), rng.random(n), 30.0)
    cfg = SmoothingConfig(kind, sigma_seconds=width, radius_frames=int(width * 30))
    smoothed = smooth_trajectory(raw, make_kernel(cfg, 30.0))
    assert trajectory_stats(smoothed).mean_accel <= trajectory_stats(raw).mean_accel + 1e-12


def test_stats_report_shape():
    raw = Trajectory.from_coords([0.5, 0.6], [0.5, 0.6], 30.0)
    plan = build_plan(raw, R)
    rep = stats_report(raw, plan, raw)
    assert list(rep) == ["raw", "smoothed", "coverage"]
    assert list(rep["coverage"]) == ["coverage", "n_frames_considered"]
