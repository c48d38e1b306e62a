"""Per-frame focal points and the trajectory file format."""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import IO, Iterable, Iterator

from dexfocus.detections import DetectionTrack, FilterConfig, FrameDetections, filter_frame
from dexfocus.errors import FormatError

# Bottom center of the frame, where hands sit on average.
DEFAULT_FALLBACK = (0.5, 1.0)


@dataclass(frozen=True)
class FocusPoint:
    frame_index: int
    x: float
    y: float
    is_fallback: bool = False

    def __post_init__(self):
        if not (0.0 <= self.x <= 1.0 and 0.0 <= self.y <= 1.0):
            raise ValueError(f"focus point ({self.x!r}, {self.y!r}) outside [0, 1]")


@dataclass(frozen=True)
class Trajectory:
    points: tuple[FocusPoint, ...]
    n_frames: int
    fps: float

    def __post_init__(self):
        if self.n_frames < 1:
            raise ValueError("n_frames must be positive")
        if not self.fps > 0:
            raise ValueError("fps must be positive")
        if len(self.points) != self.n_frames:
            raise ValueError(f"expected {self.n_frames} points, got {len(self.points)}")
        for i, p in enumerate(self.points):
            if p.frame_index != i:
                raise ValueError(f"point {i} has frame_index {p.frame_index}")

    @property
    def xs(self) -> list[float]:
        return [p.x for p in self.points]

    @property
    def ys(self) -> list[float]:
        return [p.y for p in self.points]

    @property
    def fallback_flags(self) -> list[bool]:
        return [p.is_fallback for p in self.points]

    @classmethod
    def from_coords(cls, xs, ys, fps: float, fallback=None) -> "Trajectory":
        xs, ys = list(xs), list(ys)
        flags = list(fallback) if fallback is not None else [False] * len(xs)
        points = tuple(
            FocusPoint(i, float(x), float(y), bool(f))
            for i, (x, y, f) in enumerate(zip(xs, ys, flags, strict=True))
        )
        return cls(points, len(points), float(fps))


def select_focus(frame: FrameDetections, fallback: tuple[float, float] = DEFAULT_FALLBACK) -> FocusPoint:
    """Mean of the box centers, or the fallback point when there are none."""
    if not frame.detections:
        return FocusPoint(frame.frame_index, fallback[0], fallback[1], True)
    cx = cy = 0.0
    for d in frame.detections:
        x, y = d.bbox.center
        cx += x
        cy += y
    n = len(frame.detections)
    # Clamp guards against the mean drifting past 1.0 by an ulp.
    return FocusPoint(frame.frame_index, min(max(cx / n, 0.0), 1.0), min(max(cy / n, 0.0), 1.0), False)


def build_trajectory(
    track: DetectionTrack,
    cfg: FilterConfig | None = None,
    fallback: tuple[float, float] = DEFAULT_FALLBACK,
) -> Trajectory:
    cfg = cfg or FilterConfig()
    points = tuple(
        select_focus(filter_frame(f, track.resolution, cfg), fallback) for f in track.dense()
    )
    return Trajectory(points, track.n_frames, track.fps)


# --- JSON Lines I/O ---------------------------------------------------------

def iter_trajectory_lines(traj: Trajectory) -> Iterator[str]:
    yield json.dumps({"type": "header", "n_frames": traj.n_frames, "fps": float(traj.fps)},
                     separators=(",", ":")) + "\n"
    for p in traj.points:
        yield json.dumps({"frame": p.frame_index, "x": p.x, "y": p.y, "fallback": p.is_fallback},
                         separators=(",", ":")) + "\n"


def serialize_trajectory(traj: Trajectory) -> str:
    return "".join(iter_trajectory_lines(traj))


def write_trajectory(traj: Trajectory, fp: IO[str]) -> None:
    for line in iter_trajectory_lines(traj):
        fp.write(line)


def parse_trajectory(stream: Iterable[str]) -> Trajectory:
    header = None
    points: list[FocusPoint] = []
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
                header = (int(obj["n_frames"]), float(obj["fps"]))
                continue
            frame = obj["frame"]
            if frame != len(points):
                raise FormatError(f"expected frame {len(points)}, got {frame}", lineno)
            fb = obj["fallback"]
            if not isinstance(fb, bool):
                raise FormatError("fallback must be a boolean", lineno)
            points.append(FocusPoint(frame, float(obj["x"]), float(obj["y"]), fb))
        except FormatError:
            raise
        except (KeyError, TypeError, ValueError) as exc:
            raise FormatError(f"bad trajectory record ({exc})", lineno) from None
    if header is None:
        raise FormatError("missing header record")
    try:
        return Trajectory(tuple(points), header[0], header[1])
    except ValueError as exc:
        raise FormatError(str(exc)) from None
