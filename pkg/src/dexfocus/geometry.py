"""Square crop windows that follow a trajectory, and the crop manifest.

The manifest is JSON Lines: a header, then one ``{"frame","x0","y0"}``
record per frame. All windows of a plan share one side length.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import IO, Iterable, Iterator

from dexfocus.detections import Resolution
from dexfocus.errors import FormatError
from dexfocus.focus import FocusPoint, Trajectory


def round_half_away(v: float) -> int:
    """Nearest integer; exact halves go away from zero."""
    r = math.floor(abs(v) + 0.5)
    return int(r) if v >= 0 else -int(r)


@dataclass(frozen=True)
class CropConfig:
    area_fraction: float = 0.25
    out_size: int = 224

    def __post_init__(self):
        if not 0.0 < self.area_fraction <= 1.0:
            raise ValueError("area_fraction must lie in (0, 1]")
        if self.out_size < 1:
            raise ValueError("out_size must be positive")


@dataclass(frozen=True)
class CropWindow:
    frame_index: int
    x0: int
    y0: int
    side: int

    def fits(self, res: Resolution) -> bool:
        return (self.x0 >= 0 and self.y0 >= 0 and self.side >= 1
                and self.x0 + self.side <= res.width and self.y0 + self.side <= res.height)


@dataclass(frozen=True)
class CropPlan:
    resolution: Resolution
    out_size: int
    windows: tuple[CropWindow, ...]
    config: dict | None = field(default=None, hash=False)

    def __post_init__(self):
        if not self.windows:
            raise ValueError("a plan needs at least one window")
        side = self.windows[0].side
        for i, w in enumerate(self.windows):
            if w.frame_index != i:
                raise ValueError(f"window {i} has frame_index {w.frame_index}")
            if w.side != side:
                raise ValueError("all windows of a plan must share one side")
            if not w.fits(self.resolution):
                raise ValueError(f"window {w} does not fit {self.resolution}")
        if self.out_size < 1:
            raise ValueError("out_size must be positive")

    @property
    def side(self) -> int:
        return self.windows[0].side

    @property
    def n_frames(self) -> int:
        return len(self.windows)


def crop_side(res: Resolution, area_fraction: float) -> int:
    side = round_half_away(math.sqrt(area_fraction * res.width * res.height))
    return max(1, min(side, res.width, res.height))


def crop_window(point: FocusPoint, res: Resolution, side: int) -> CropWindow:
    if side < 1 or side > min(res.width, res.height):
        raise ValueError(f"crop side {side} does not fit a {res.width}x{res.height} frame")
    x0 = round_half_away(point.x * res.width - side / 2.0)
    y0 = round_half_away(point.y * res.height - side / 2.0)
    x0 = min(max(x0, 0), res.width - side)
    y0 = min(max(y0, 0), res.height - side)
    return CropWindow(point.frame_index, x0, y0, side)


def build_plan(traj: Trajectory, res: Resolution, cfg: CropConfig | None = None) -> CropPlan:
    cfg = cfg or CropConfig()
    side = crop_side(res, cfg.area_fraction)
    windows = tuple(crop_window(p, res, side) for p in traj.points)
    return CropPlan(res, cfg.out_size, windows)


def _align_axis(start: int, side: int, extent: int, step: int) -> int:
    start -= start % step
    limit = extent - side
    if start > limit:
        start = limit - limit % step
    return start


def align_plan(plan: CropPlan, step: int = 2) -> CropPlan:
    """Snap window origins down and the side up to multiples of ``step``.

    4:2:0 video needs step 2 so chroma planes crop on whole samples. The side
    is rounded down instead when rounding up would not fit the frame.
    """
    if step <= 1:
        return plan
    res = plan.resolution
    side = plan.side
    if side % step:
        side += step - side % step
        if side > min(res.width, res.height):
            side -= step
    if side < step:
        raise ValueError(f"frame {res.width}x{res.height} too small for {step}-aligned crops")
    windows = tuple(
        CropWindow(w.frame_index,
                   _align_axis(w.x0, side, res.width, step),
                   _align_axis(w.y0, side, res.height, step),
                   side)
        for w in plan.windows
    )
    return CropPlan(res, plan.out_size, windows, plan.config)


# --- JSON Lines I/O ---------------------------------------------------------

def iter_manifest_lines(plan: CropPlan) -> Iterator[str]:
    header = {
        "type": "header",
        "width": plan.resolution.width,
        "height": plan.resolution.height,
        "n_frames": plan.n_frames,
        "side": plan.side,
        "out_size": plan.out_size,
    }
    if plan.config is not None:
        header["config"] = plan.config
    yield json.dumps(header, separators=(",", ":")) + "\n"
    for w in plan.windows:
        yield json.dumps({"frame": w.frame_index, "x0": w.x0, "y0": w.y0}, separators=(",", ":")) + "\n"


def serialize_plan(plan: CropPlan) -> str:
    return "".join(iter_manifest_lines(plan))


def write_plan(plan: CropPlan, fp: IO[str]) -> None:
    for line in iter_manifest_lines(plan):
        fp.write(line)


def parse_plan(stream: Iterable[str]) -> CropPlan:
    header = None
    windows: list[CropWindow] = []
    for lineno, line in enumerate(stream, start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise FormatError(f"malformed JSON ({exc.msg})", lineno) from None
        if not isinstance(obj, dict):
            raise FormatError("record is not an object", lineno)
        try:
            if header is None:
                if obj.get("type") != "header":
                    raise FormatError("missing header record", lineno)
                header = obj
                res = Resolution(int(obj["width"]), int(obj["height"]))
                side = int(obj["side"])
                continue
            frame = int(obj["frame"])
            if frame != len(windows):
                raise FormatError(f"expected frame {len(windows)}, got {frame}", lineno)
            windows.append(CropWindow(frame, int(obj["x0"]), int(obj["y0"]), side))
        except FormatError:
            raise
        except (KeyError, TypeError, ValueError) as exc:
            raise FormatError(f"bad manifest record ({exc})", lineno) from None
    if header is None:
        raise FormatError("missing header record")
    if len(windows) != header.get("n_frames"):
        raise FormatError(f"manifest declares {header.get('n_frames')} frames but lists {len(windows)}")
    try:
        return CropPlan(res, int(header["out_size"]), tuple(windows), header.get("config"))
    except (KeyError, ValueError) as exc:
        raise FormatError(f"invalid manifest ({exc})") from None
