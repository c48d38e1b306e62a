"""Crop and resize video frames according to a crop plan."""

from __future__ import annotations

import glob
import os
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from typing import Iterable, Iterator

import numpy as np

from dexfocus import kernels
from dexfocus.errors import MismatchError
from dexfocus.geometry import CropPlan, CropWindow, align_plan
from dexfocus.y4m import Frame

INTERP_MODES = ("bilinear", "nearest")


def crop_frame(frame: Frame, window: CropWindow) -> Frame:
    x0, y0, side = window.x0, window.y0, window.side
    if x0 < 0 or y0 < 0 or side < 1 or x0 + side > frame.width or y0 + side > frame.height:
        raise MismatchError(
            f"frame {window.frame_index}: window ({x0},{y0},{side}) outside {frame.width}x{frame.height} frame"
        )
    if frame.layout == "420":
        if x0 % 2 or y0 % 2 or side % 2:
            raise ValueError("4:2:0 crops need even x0, y0 and side")
        luma = frame.planes[0][y0:y0 + side, x0:x0 + side]
        cx, cy, cs = x0 // 2, y0 // 2, side // 2
        chroma = tuple(p[cy:cy + cs, cx:cx + cs] for p in frame.planes[1:])
        planes = (luma,) + chroma
    else:
        planes = tuple(p[y0:y0 + side, x0:x0 + side] for p in frame.planes)
    return Frame(frame.layout, side, side, planes)


def nearest_taps(n_in: int, n_out: int) -> np.ndarray:
    # floor((i + 0.5) * n_in / n_out) in exact integer arithmetic
    i = np.arange(n_out, dtype=np.intp)
    return ((2 * i + 1) * n_in) // (2 * n_out)


def bilinear_taps(n_in: int, n_out: int):
    """Half-pixel aligned source positions, clamped to the edge samples."""
    i = np.arange(n_out, dtype=np.float64)
    src = (i + 0.5) * (n_in / n_out) - 0.5
    src = np.clip(src, 0.0, n_in - 1)
    lo = np.floor(src).astype(np.intp)
    hi = np.minimum(lo + 1, n_in - 1)
    frac = src - lo
    return lo, hi, 1.0 - frac, frac


def resize_plane(plane: np.ndarray, out_h: int, out_w: int, mode: str = "bilinear") -> np.ndarray:
    h, w = plane.shape
    if (h, w) == (out_h, out_w):
        return np.array(plane, dtype=np.uint8, copy=True)
    src = np.ascontiguousarray(plane, dtype=np.uint8)
    if mode == "nearest":
        return kernels.gather_nearest(src, nearest_taps(h, out_h), nearest_taps(w, out_w))
    if mode == "bilinear":
        r0, r1, wy0, wy1 = bilinear_taps(h, out_h)
        c0, c1, wx0, wx1 = bilinear_taps(w, out_w)
        return kernels.gather_bilinear(src, r0, r1, wy0, wy1, c0, c1, wx0, wx1)
    raise ValueError(f"unknown interpolation {mode!r}")


def resize_frame(frame: Frame, out_size: int, mode: str = "bilinear") -> Frame:
    if frame.width != frame.height:
        raise ValueError("resize_frame expects a square frame")
    shapes = _plane_targets(frame.layout, out_size)
    planes = tuple(
        np.asarray(resize_plane(p, h, w, mode)) for p, (h, w) in zip(frame.planes, shapes)
    )
    return Frame(frame.layout, out_size, out_size, planes)


def _plane_targets(layout: str, size: int):
    if layout == "420":
        c = (size + 1) // 2
        return ((size, size), (c, c), (c, c))
    return ((size, size),) * (1 if layout == "mono" else 3)


def prepare_plan(plan: CropPlan, layout: str) -> CropPlan:
    """Even-align the plan for 4:2:0 input; other layouts pass through."""
    return align_plan(plan, 2) if layout == "420" else plan


def render_stream(
    frames: Iterable[Frame],
    plan: CropPlan,
    mode: str = "bilinear",
    workers: int = 1,
) -> Iterator[Frame]:
    """Yield ``resize(crop(frame_i, window_i))`` for every window in the plan.

    With ``workers > 1`` frames are processed on a thread pool with a bounded
    number in flight; results are still yielded strictly in input order.
    Frames beyond the plan length are not read.
    """
    if mode not in INTERP_MODES:
        raise ValueError(f"unknown interpolation {mode!r}")
    res = plan.resolution
    it = iter(frames)

    def next_frame(i: int) -> Frame:
        frame = next(it, None)
        if frame is None:
            raise MismatchError(f"video ended at frame {i}, plan has {plan.n_frames} frames")
        if (frame.width, frame.height) != (res.width, res.height):
            raise MismatchError(
                f"frame {i} is {frame.width}x{frame.height}, plan expects {res.width}x{res.height}"
            )
        return frame

    def work(frame: Frame, window: CropWindow) -> Frame:
        return resize_frame(crop_frame(frame, window), plan.out_size, mode)

    if workers <= 1:
        for i, window in enumerate(plan.windows):
            yield work(next_frame(i), window)
        return

    with ThreadPoolExecutor(max_workers=workers) as pool:
        pending: deque = deque()
        for i, window in enumerate(plan.windows):
            pending.append(pool.submit(work, next_frame(i), window))
            if len(pending) >= 2 * workers:
                yield pending.popleft().result()
        while pending:
            yield pending.popleft().result()


# --- image-sequence mode ----------------------------------------------------

def read_png_frames(pattern: str) -> Iterator[Frame]:
    from PIL import Image

    for path in sorted(glob.glob(pattern)):
        with Image.open(path) as img:
            rgb = np.asarray(img.convert("RGB"))
        h, w, _ = rgb.shape
        yield Frame("rgb", w, h, tuple(np.ascontiguousarray(rgb[:, :, c]) for c in range(3)))


def write_png_frame(frame: Frame, directory: str, index: int) -> str:
    from PIL import Image

    if frame.layout == "rgb":
        img = Image.fromarray(np.dstack(frame.planes))
    else:
        img = Image.fromarray(np.ascontiguousarray(frame.planes[0]))
    path = os.path.join(directory, f"frame_{index:06d}.png")
    img.save(path)
    return path
