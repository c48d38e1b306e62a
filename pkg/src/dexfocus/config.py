"""Pipeline configuration and its flat ``key = value`` file format.

Example file::

    # dexfocus config
    min_confidence = 0.5
    kernel = gaussian
    sigma = 0.5

Unlisted keys keep their defaults. Precedence is defaults < file < flags.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from dexfocus.detections import FilterConfig
from dexfocus.errors import FormatError
from dexfocus.focus import DEFAULT_FALLBACK
from dexfocus.geometry import CropConfig
from dexfocus.render import INTERP_MODES
from dexfocus.sampling import SampleSpec
from dexfocus.stabilize import SmoothingConfig

CONFIG_SCHEMA_VERSION = 1

# key -> parser; order here is the order of dumps and manifest headers
KEYS = {
    "min_confidence": float,
    "min_area_fraction": float,
    "max_hands": int,
    "fallback_x": float,
    "fallback_y": float,
    "kernel": str,
    "sigma": float,
    "radius": int,
    "truncation": float,
    "area_fraction": float,
    "out_size": int,
    "align": int,
    "interp": str,
    "num_samples": int,
    "base_dt": float,
}


@dataclass(frozen=True)
class PipelineConfig:
    filter: FilterConfig = field(default_factory=FilterConfig)
    fallback: tuple[float, float] = DEFAULT_FALLBACK
    smoothing: SmoothingConfig = field(default_factory=SmoothingConfig)
    crop: CropConfig = field(default_factory=CropConfig)
    interp: str = "bilinear"
    sampling: SampleSpec = field(default_factory=SampleSpec)
    # crop origins/side are snapped to this multiple (2 suits 4:2:0 video)
    align: int = 2

    def __post_init__(self):
        if self.interp not in INTERP_MODES:
            raise ValueError(f"interp must be one of {INTERP_MODES}")
        if self.align < 1:
            raise ValueError("align must be positive")
        if not all(0.0 <= v <= 1.0 for v in self.fallback):
            raise ValueError("fallback coordinates must lie in [0, 1]")

    def to_flat(self) -> dict:
        return {
            "min_confidence": float(self.filter.min_confidence),
            "min_area_fraction": float(self.filter.min_area_fraction),
            "max_hands": self.filter.max_hands,
            "fallback_x": float(self.fallback[0]),
            "fallback_y": float(self.fallback[1]),
            "kernel": self.smoothing.kernel_kind,
            "sigma": float(self.smoothing.sigma_seconds),
            "radius": self.smoothing.radius_frames,
            "truncation": float(self.smoothing.truncation),
            "area_fraction": float(self.crop.area_fraction),
            "out_size": self.crop.out_size,
            "align": self.align,
            "interp": self.interp,
            "num_samples": self.sampling.num_samples,
            "base_dt": float(self.sampling.base_dt_frames),
        }

    @classmethod
    def from_flat(cls, values: dict) -> "PipelineConfig":
        unknown = set(values) - set(KEYS)
        if unknown:
            raise ValueError(f"unknown config keys: {', '.join(sorted(unknown))}")
        v = {**cls().to_flat(), **values}
        return cls(
            filter=FilterConfig(v["min_confidence"], v["min_area_fraction"], v["max_hands"]),
            fallback=(v["fallback_x"], v["fallback_y"]),
            smoothing=SmoothingConfig(v["kernel"], v["sigma"], v["radius"], v["truncation"]),
            crop=CropConfig(v["area_fraction"], v["out_size"]),
            interp=v["interp"],
            sampling=SampleSpec(v["num_samples"], v["base_dt"]),
            align=v["align"],
        )


def parse_config_text(lines: Iterable[str]) -> dict:
    values = {}
    for lineno, line in enumerate(lines, start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, raw = line.partition("=")
        key, raw = key.strip(), raw.strip()
        if not sep or not key:
            raise FormatError("expected 'key = value'", lineno)
        if key not in KEYS:
            raise FormatError(f"unknown config key {key!r}", lineno)
        try:
            values[key] = KEYS[key](raw)
        except ValueError:
            raise FormatError(f"bad value for {key}: {raw!r}", lineno) from None
    return values


def dump_config_text(cfg: PipelineConfig) -> str:
    lines = [f"# dexfocus config (schema {CONFIG_SCHEMA_VERSION})"]
    for key, value in cfg.to_flat().items():
        lines.append(f"{key} = {value!r}" if isinstance(value, float) else f"{key} = {value}")
    return "\n".join(lines) + "\n"
