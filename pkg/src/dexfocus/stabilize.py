"""Trajectory smoothing with a normalized, symmetric 1-D kernel.

x and y are convolved independently. Indices beyond either end are clamped
to the first/last sample, so the kernel never needs renormalizing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from dexfocus import kernels
from dexfocus.focus import FocusPoint, Trajectory

KERNEL_KINDS = ("gaussian", "box", "identity")


@dataclass(frozen=True)
class SmoothingConfig:
    kernel_kind: str = "gaussian"
    sigma_seconds: float = 0.5
    radius_frames: int = 7
    truncation: float = 3.0

    def __post_init__(self):
        if self.kernel_kind not in KERNEL_KINDS:
            raise ValueError(f"kernel must be one of {KERNEL_KINDS}, got {self.kernel_kind!r}")
        if self.kernel_kind == "gaussian":
            if not self.sigma_seconds > 0:
                raise ValueError("gaussian smoothing needs sigma_seconds > 0")
            if not self.truncation > 0:
                raise ValueError("truncation must be positive")
        if self.kernel_kind == "box" and self.radius_frames < 0:
            raise ValueError("box smoothing needs radius_frames >= 0")


@dataclass(frozen=True)
class Kernel:
    weights: tuple[float, ...]

    def __post_init__(self):
        if len(self.weights) % 2 != 1:
            raise ValueError("kernel length must be odd")
        if any(w < 0 for w in self.weights):
            raise ValueError("kernel weights must be nonnegative")
        if abs(math.fsum(self.weights) - 1.0) > 1e-12:
            raise ValueError("kernel weights must sum to 1")

    @property
    def radius(self) -> int:
        return len(self.weights) // 2


def make_kernel(cfg: SmoothingConfig, fps: float) -> Kernel:
    if not fps > 0:
        raise ValueError("fps must be positive")
    if cfg.kernel_kind == "identity":
        return Kernel((1.0,))
    if cfg.kernel_kind == "box":
        m = 2 * cfg.radius_frames + 1
        return Kernel((1.0 / m,) * m)
    sigma = cfg.sigma_seconds * fps
    r = math.ceil(cfg.truncation * sigma)
    k = np.arange(-r, r + 1, dtype=np.float64)
    w = np.exp(-(k * k) / (2.0 * sigma * sigma))
    w /= w.sum()
    return Kernel(tuple(float(v) for v in w))


def smooth_signal(values, kernel: Kernel) -> np.ndarray:
    """Edge-replicated convolution of a 1-D sequence (no clamping to [0, 1])."""
    x = np.ascontiguousarray(values, dtype=np.float64)
    w = np.asarray(kernel.weights, dtype=np.float64)
    return np.asarray(kernels.convolve_edge(x, w))


def smooth_trajectory(traj: Trajectory, kernel: Kernel) -> Trajectory:
    xs = np.clip(smooth_signal(traj.xs, kernel), 0.0, 1.0)
    ys = np.clip(smooth_signal(traj.ys, kernel), 0.0, 1.0)
    points = tuple(
        FocusPoint(i, float(x), float(y), p.is_fallback)
        for i, (x, y, p) in enumerate(zip(xs, ys, traj.points))
    )
    return Trajectory(points, traj.n_frames, traj.fps)
