"""Hand-detection streams: parsing, serialization and per-frame filtering.

Detections arrive as JSON Lines, one header record followed by one record
per frame that had output from the detector::

    {"type":"header","n_frames":3,"width":448,"height":448,"fps":30.0}
    {"type":"frame","frame":1,"hands":[{"box":[0.2,0.2,0.4,0.4],"conf":0.9}]}

Box coordinates are normalized to [0, 1] with y pointing down. Frames with
no record have no detections.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import IO, Iterable, Iterator

from dexfocus.errors import FormatError

SIDES = ("left", "right", "unknown")


@dataclass(frozen=True)
class Resolution:
    width: int
    height: int

    def __post_init__(self):
        if int(self.width) < 1 or int(self.height) < 1:
            raise ValueError(f"resolution must be positive, got {self.width}x{self.height}")


@dataclass(frozen=True)
class BBox:
    x_min: float
    y_min: float
    x_max: float
    y_max: float

    def __post_init__(self):
        for v in (self.x_min, self.y_min, self.x_max, self.y_max):
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"box coordinate {v!r} outside [0, 1]")
        if not (self.x_min < self.x_max and self.y_min < self.y_max):
            raise ValueError(f"degenerate box {self}")

    @property
    def area(self) -> float:
        return (self.x_max - self.x_min) * (self.y_max - self.y_min)

    @property
    def center(self) -> tuple[float, float]:
        return (self.x_min + self.x_max) / 2.0, (self.y_min + self.y_max) / 2.0


@dataclass(frozen=True)
class HandDetection:
    bbox: BBox
    confidence: float
    side: str | None = None

    def __post_init__(self):
        if not 0.0 <= self.confidence <= 1.0:
            raise ValueError(f"confidence {self.confidence!r} outside [0, 1]")
        if self.side is not None and self.side not in SIDES:
            raise ValueError(f"unknown hand side {self.side!r}")


@dataclass(frozen=True)
class FrameDetections:
    frame_index: int
    detections: tuple[HandDetection, ...] = ()


@dataclass(frozen=True)
class DetectionTrack:
    resolution: Resolution
    fps: float
    n_frames: int
    frames: tuple[FrameDetections, ...] = ()

    def __post_init__(self):
        if self.n_frames < 1:
            raise ValueError("n_frames must be positive")
        if not self.fps > 0:
            raise ValueError("fps must be positive")
        prev = -1
        for f in self.frames:
            if not 0 <= f.frame_index < self.n_frames:
                raise ValueError(f"frame index {f.frame_index} out of range")
            if f.frame_index <= prev:
                raise ValueError("frames must be unique and sorted by index")
            prev = f.frame_index

    def dense(self) -> list[FrameDetections]:
        """One entry per frame index, empty where the track has no record."""
        out = [FrameDetections(i) for i in range(self.n_frames)]
        for f in self.frames:
            out[f.frame_index] = f
        return out


@dataclass(frozen=True)
class FilterConfig:
    min_confidence: float = 0.5
    min_area_fraction: float = 0.005
    max_hands: int = 2

    def __post_init__(self):
        if not 0.0 <= self.min_confidence <= 1.0:
            raise ValueError("min_confidence must lie in [0, 1]")
        if not 0.0 <= self.min_area_fraction <= 1.0:
            raise ValueError("min_area_fraction must lie in [0, 1]")
        if self.max_hands < 1:
            raise ValueError("max_hands must be positive")


def filter_frame(frame: FrameDetections, res: Resolution | None, cfg: FilterConfig) -> FrameDetections:
    """Drop low-confidence and small boxes, then cap the count at ``max_hands``.

    When too many boxes survive, the largest are kept (ties go to higher
    confidence, then to earlier input position). Survivors keep their input
    order. Areas are normalized, so ``res`` does not change the result.
    """
    passing = [
        i for i, d in enumerate(frame.detections)
        if d.confidence >= cfg.min_confidence and d.bbox.area >= cfg.min_area_fraction
    ]
    if len(passing) > cfg.max_hands:
        ranked = sorted(
            passing,
            key=lambda i: (-frame.detections[i].bbox.area, -frame.detections[i].confidence, i),
        )
        passing = sorted(ranked[:cfg.max_hands])
    return FrameDetections(frame.frame_index, tuple(frame.detections[i] for i in passing))


# --- JSON Lines I/O ---------------------------------------------------------

def _require(obj: dict, key: str, kind, lineno: int):
    if key not in obj:
        raise FormatError(f"missing key {key!r}", lineno)
    value = obj[key]
    if kind is int:
        ok = isinstance(value, int) and not isinstance(value, bool)
    elif kind is float:
        ok = isinstance(value, (int, float)) and not isinstance(value, bool)
    else:
        ok = isinstance(value, kind)
    if not ok:
        raise FormatError(f"key {key!r} has wrong type", lineno)
    return value


def _parse_hand(raw, lineno: int) -> HandDetection:
    if not isinstance(raw, dict):
        raise FormatError("hand entry is not an object", lineno)
    box = _require(raw, "box", list, lineno)
    if len(box) != 4 or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in box):
        raise FormatError("box must be four numbers", lineno)
    conf = float(_require(raw, "conf", float, lineno))
    side = raw.get("side")
    try:
        return HandDetection(BBox(*(float(v) for v in box)), conf, side)
    except ValueError as exc:
        raise FormatError(str(exc), lineno) from None


def parse_track(stream: Iterable[str]) -> DetectionTrack:
    """Parse a detection JSON Lines stream.

    Frame records may arrive in any order; they are sorted by index. Raises
    :class:`FormatError` with the offending line number on bad input.
    """
    header = None
    frames: dict[int, FrameDetections] = {}
    for lineno, line in enumerate(stream, start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise FormatError(f"malformed JSON ({exc.msg})", lineno) from None
        if not isinstance(obj, dict):
            raise FormatError("record is not an object", lineno)
        if header is None:
            if obj.get("type") != "header":
                raise FormatError("missing header record", lineno)
            n_frames = _require(obj, "n_frames", int, lineno)
            width = _require(obj, "width", int, lineno)
            height = _require(obj, "height", int, lineno)
            fps = float(_require(obj, "fps", float, lineno))
            if n_frames < 1 or width < 1 or height < 1 or not fps > 0:
                raise FormatError("header values must be positive", lineno)
            header = (n_frames, Resolution(width, height), fps)
            continue
        if obj.get("type") != "frame":
            raise FormatError(f"unexpected record type {obj.get('type')!r}", lineno)
        index = _require(obj, "frame", int, lineno)
        if not 0 <= index < header[0]:
            raise FormatError(f"frame index out of range: {index} (n_frames={header[0]})", lineno)
        if index in frames:
            raise FormatError(f"duplicate frame index {index}", lineno)
        hands = _require(obj, "hands", list, lineno)
        frames[index] = FrameDetections(index, tuple(_parse_hand(h, lineno) for h in hands))
    if header is None:
        raise FormatError("missing header record")
    n_frames, res, fps = header
    return DetectionTrack(res, fps, n_frames, tuple(frames[i] for i in sorted(frames)))


def _dumps(obj) -> str:
    return json.dumps(obj, separators=(",", ":"))


def iter_track_lines(track: DetectionTrack) -> Iterator[str]:
    yield _dumps({
        "type": "header",
        "n_frames": track.n_frames,
        "width": track.resolution.width,
        "height": track.resolution.height,
        "fps": float(track.fps),
    }) + "\n"
    for f in track.frames:
        hands = []
        for d in f.detections:
            b = d.bbox
            hand = {"box": [b.x_min, b.y_min, b.x_max, b.y_max], "conf": d.confidence}
            if d.side is not None:
                hand["side"] = d.side
            hands.append(hand)
        yield _dumps({"type": "frame", "frame": f.frame_index, "hands": hands}) + "\n"


def serialize_track(track: DetectionTrack) -> str:
    return "".join(iter_track_lines(track))


def write_track(track: DetectionTrack, fp: IO[str]) -> None:
    for line in iter_track_lines(track):
        fp.write(line)
