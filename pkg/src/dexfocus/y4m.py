"""Minimal YUV4MPEG2 reader/writer for 8-bit 4:2:0 and mono streams."""

from __future__ import annotations

from dataclasses import dataclass
from typing import BinaryIO, Iterator

import numpy as np

from dexfocus.errors import FormatError, MismatchError

MAGIC = b"YUV4MPEG2"
COLORSPACES_420 = ("420", "420jpeg", "420paldv", "420mpeg2")
COLORSPACES = COLORSPACES_420 + ("mono",)


@dataclass(frozen=True)
class Frame:
    """One picture as a tuple of 2-D uint8 planes.

    ``layout`` is ``"420"`` (Y, Cb, Cr with half-size chroma), ``"mono"``
    (Y only) or ``"rgb"`` (three full-size planes).
    """

    layout: str
    width: int
    height: int
    planes: tuple[np.ndarray, ...]

    def __post_init__(self):
        expected = plane_shapes(self.layout, self.width, self.height)
        if tuple(p.shape for p in self.planes) != expected:
            raise ValueError(f"{self.layout} frame {self.width}x{self.height} expects planes {expected}")

    def tobytes(self) -> bytes:
        return b"".join(np.ascontiguousarray(p).tobytes() for p in self.planes)


def plane_shapes(layout: str, width: int, height: int) -> tuple[tuple[int, int], ...]:
    if layout == "420":
        cw, ch = (width + 1) // 2, (height + 1) // 2
        return ((height, width), (ch, cw), (ch, cw))
    if layout == "mono":
        return ((height, width),)
    if layout == "rgb":
        return ((height, width),) * 3
    raise ValueError(f"unknown frame layout {layout!r}")


@dataclass(frozen=True)
class Y4MHeader:
    width: int
    height: int
    tags: tuple[str, ...]  # every tag except W/H, in input order

    @property
    def colorspace(self) -> str:
        for t in self.tags:
            if t.startswith("C"):
                return t[1:]
        return "420jpeg"

    @property
    def layout(self) -> str:
        return "mono" if self.colorspace == "mono" else "420"

    @property
    def frame_rate(self) -> str | None:
        for t in self.tags:
            if t.startswith("F"):
                return t[1:]
        return None

    def resized(self, width: int, height: int) -> "Y4MHeader":
        return Y4MHeader(width, height, self.tags)

    def encode(self) -> bytes:
        parts = [MAGIC.decode(), f"W{self.width}", f"H{self.height}", *self.tags]
        return (" ".join(parts) + "\n").encode("ascii")


def parse_header(line: bytes) -> Y4MHeader:
    if not line.endswith(b"\n"):
        raise FormatError("truncated Y4M header")
    fields = line[:-1].decode("ascii", errors="replace").split(" ")
    if fields[0] != MAGIC.decode():
        raise FormatError("not a YUV4MPEG2 stream")
    width = height = None
    tags = []
    for f in fields[1:]:
        if not f:
            continue
        try:
            if f[0] == "W":
                width = int(f[1:])
            elif f[0] == "H":
                height = int(f[1:])
            else:
                tags.append(f)
        except ValueError:
            raise FormatError(f"bad Y4M header tag {f!r}") from None
    if not width or not height or width < 1 or height < 1:
        raise FormatError("Y4M header lacks valid W/H")
    header = Y4MHeader(width, height, tuple(tags))
    if header.colorspace not in COLORSPACES:
        raise FormatError(f"unsupported Y4M colorspace C{header.colorspace}")
    return header


class Y4MReader:
    def __init__(self, fp: BinaryIO):
        self.fp = fp
        self.header = parse_header(fp.readline())
        self._shapes = plane_shapes(self.header.layout, self.header.width, self.header.height)
        self.frame_size = sum(h * w for h, w in self._shapes)

    def read_frame(self) -> Frame | None:
        """Next frame, or ``None`` at a clean end of stream."""
        tag = self.fp.readline()
        if not tag:
            return None
        if not tag.startswith(b"FRAME"):
            raise FormatError("expected FRAME marker in Y4M stream")
        data = self.fp.read(self.frame_size)
        if len(data) != self.frame_size:
            raise MismatchError("Y4M stream ended inside a frame")
        buf = np.frombuffer(data, dtype=np.uint8)
        planes, off = [], 0
        for h, w in self._shapes:
            planes.append(buf[off:off + h * w].reshape(h, w))
            off += h * w
        return Frame(self.header.layout, self.header.width, self.header.height, tuple(planes))

    def __iter__(self) -> Iterator[Frame]:
        while (frame := self.read_frame()) is not None:
            yield frame


class Y4MWriter:
    def __init__(self, fp: BinaryIO, header: Y4MHeader):
        self.fp = fp
        self.header = header
        fp.write(header.encode())

    def write_frame(self, frame: Frame) -> None:
        if (frame.width, frame.height) != (self.header.width, self.header.height):
            raise MismatchError("frame size does not match Y4M header")
        self.fp.write(b"FRAME\n")
        self.fp.write(frame.tobytes())
