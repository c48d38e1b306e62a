import random
from pathlib import Path

import pytest

from dexfocus import kernels
from dexfocus.detections import BBox, DetectionTrack, FrameDetections, HandDetection, Resolution

DATA = Path(__file__).parent / "data"


@pytest.fixture(params=kernels.available_backends())
def backend(request):
    return kernels.get_backend(request.param)


def random_box(rng: random.Random, max_side: float = 0.4) -> BBox:
    w = rng.uniform(0.01, max_side)
    h = rng.uniform(0.01, max_side)
    x = rng.uniform(0.0, 1.0 - w)
    y = rng.uniform(0.0, 1.0 - h)
    return BBox(x, y, x + w, y + h)


def random_frame(rng: random.Random, index: int, max_dets: int = 5) -> FrameDetections:
    dets = tuple(
        HandDetection(random_box(rng), rng.random(), rng.choice([None, "left", "right", "unknown"]))
        for _ in range(rng.randint(0, max_dets))
    )
    return FrameDetections(index, dets)


def random_track(rng: random.Random, n_frames: int | None = None, density: float = 0.7) -> DetectionTrack:
    n = n_frames or rng.randint(1, 60)
    frames = tuple(random_frame(rng, i) for i in range(n) if rng.random() < density)
    res = Resolution(rng.choice([224, 448, 640, 1920]), rng.choice([224, 448, 480, 1080]))
    return DetectionTrack(res, rng.choice([15.0, 29.97, 30.0, 60.0]), n, frames)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for name in sorted(results):
            terminalreporter.write_line(results[name])
