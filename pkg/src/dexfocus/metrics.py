"""Smoothness and hand-coverage diagnostics for trajectories and plans.

Speeds and accelerations are in normalized frame units per frame, so they
compare across resolutions. That smoothing lowers ``mean_accel`` is checked
empirically in the test suite; it is not proven here.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from dexfocus.errors import MismatchError
from dexfocus.focus import Trajectory
from dexfocus.geometry import CropPlan


@dataclass(frozen=True)
class TrajectoryStats:
    mean_speed: float
    mean_accel: float
    max_speed: float
    fallback_fraction: float

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class CoverageReport:
    coverage: float
    n_frames_considered: int

    def to_dict(self) -> dict:
        return asdict(self)


def trajectory_stats(traj: Trajectory) -> TrajectoryStats:
    p = np.column_stack([traj.xs, traj.ys]).astype(np.float64)
    n = len(p)
    if n >= 2:
        speed = np.hypot(*(p[1:] - p[:-1]).T)
        mean_speed, max_speed = float(speed.mean()), float(speed.max())
    else:
        mean_speed = max_speed = 0.0
    if n >= 3:
        second = p[2:] - 2.0 * p[1:-1] + p[:-2]
        mean_accel = float(np.hypot(*second.T).mean())
    else:
        mean_accel = 0.0
    fallback = sum(traj.fallback_flags) / n
    return TrajectoryStats(mean_speed, mean_accel, max_speed, fallback)


def coverage(raw: Trajectory, plan: CropPlan) -> CoverageReport:
    """Fraction of detected (non-fallback) frames whose raw point is inside the crop."""
    if raw.n_frames != plan.n_frames:
        raise MismatchError(f"trajectory has {raw.n_frames} frames, plan has {plan.n_frames}")
    w, h = plan.resolution.width, plan.resolution.height
    considered = covered = 0
    for p, win in zip(raw.points, plan.windows):
        if p.is_fallback:
            continue
        considered += 1
        px, py = p.x * w, p.y * h
        if win.x0 <= px < win.x0 + win.side and win.y0 <= py < win.y0 + win.side:
            covered += 1
    if considered == 0:
        return CoverageReport(1.0, 0)
    return CoverageReport(covered / considered, considered)


def stats_report(raw: Trajectory, plan: CropPlan, smoothed: Trajectory | None = None) -> dict:
    report = {"raw": trajectory_stats(raw).to_dict()}
    if smoothed is not None:
        report["smoothed"] = trajectory_stats(smoothed).to_dict()
    report["coverage"] = coverage(raw, plan).to_dict()
    return report


CSV_COLUMNS = (
    "raw_mean_speed", "raw_mean_accel", "raw_max_speed", "raw_fallback_fraction",
    "smoothed_mean_speed", "smoothed_mean_accel", "smoothed_max_speed", "smoothed_fallback_fraction",
    "coverage", "n_frames_considered",
)


def report_csv_row(report: dict) -> list:
    row = []
    for prefix in ("raw", "smoothed"):
        part = report.get(prefix, {})
        row += [part.get(k, "") for k in ("mean_speed", "mean_accel", "max_speed", "fallback_fraction")]
    row += [report["coverage"]["coverage"], report["coverage"]["n_frames_considered"]]
    return row
