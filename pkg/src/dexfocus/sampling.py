"""Fixed-count frame sampling with time warping for short clips.

Long clips get ``num_samples`` frames spaced ``base_dt_frames`` apart,
centered in the clip. Clips shorter than ``num_samples * base_dt_frames``
are sped up: the spacing shrinks to ``n_frames / num_samples``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from dexfocus.geometry import round_half_away


@dataclass(frozen=True)
class SampleSpec:
    num_samples: int = 8
    base_dt_frames: float = 32.0

    def __post_init__(self):
        if self.num_samples < 1:
            raise ValueError("num_samples must be positive")
        if not self.base_dt_frames > 0:
            raise ValueError("base_dt_frames must be positive")


def warp_dt(n_frames: int, spec: SampleSpec = SampleSpec()) -> float:
    if n_frames < 1:
        raise ValueError("n_frames must be positive")
    if n_frames >= spec.num_samples * spec.base_dt_frames:
        return float(spec.base_dt_frames)
    return n_frames / spec.num_samples


def sample_indices(n_frames: int, spec: SampleSpec = SampleSpec()) -> list[int]:
    dt = warp_dt(n_frames, spec)
    span = (spec.num_samples - 1) * dt
    start = max(0, math.floor((n_frames - 1 - span) / 2))
    last = n_frames - 1
    return [min(max(round_half_away(start + k * dt), 0), last) for k in range(spec.num_samples)]
