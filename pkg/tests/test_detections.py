import io
import itertools
import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_frame, random_track
from dexfocus.detections import (
    BBox,
    FilterConfig,
    FrameDetections,
    HandDetection,
    Resolution,
    filter_frame,
    parse_track,
    serialize_track,
)
from dexfocus.errors import FormatError

RES = Resolution(448, 448)
HEADER = '{"type":"header","n_frames":3,"width":448,"height":448,"fps":30.0}\n'


def det(area: float, conf: float) -> HandDetection:
    # square box at the origin with the requested normalized area
    s = area ** 0.5
    return HandDetection(BBox(0.0, 0.0, s, s), conf)


def brute_force_filter(frame: FrameDetections, cfg: FilterConfig) -> tuple:
    """Reference: threshold, then pick by trying every ordering of survivors."""
    dets = frame.detections
    passing = [i for i, d in enumerate(dets)
               if d.confidence >= cfg.min_confidence and d.bbox.area >= cfg.min_area_fraction]
    if len(passing) <= cfg.max_hands:
        return tuple(dets[i] for i in passing)

    def before(a, b):
        da, db = dets[a], dets[b]
        if da.bbox.area != db.bbox.area:
            return da.bbox.area > db.bbox.area
        if da.confidence != db.confidence:
            return da.confidence > db.confidence
        return a < b

    for perm in itertools.permutations(passing):
        if all(before(perm[k], perm[k + 1]) for k in range(len(perm) - 1)):
            keep = sorted(perm[:cfg.max_hands])
            return tuple(dets[i] for i in keep)
    raise AssertionError("no total order found")


# --- parsing ----------------------------------------------------------------

def test_parse_minimal_track():
    text = HEADER + '{"type":"frame","frame":1,"hands":[{"box":[0.2,0.2,0.4,0.4],"conf":0.9}]}\n'
    track = parse_track(io.StringIO(text))
    assert track.n_frames == 3
    assert track.resolution == RES
    assert track.fps == 30.0
    assert len(track.frames) == 1
    assert track.frames[0].frame_index == 1
    dense = track.dense()
    assert [len(f.detections) for f in dense] == [0, 1, 0]


def test_parse_rejects_out_of_range_frame():
    text = HEADER + '{"type":"frame","frame":5,"hands":[]}\n'
    with pytest.raises(FormatError, match="frame index out of range"):
        parse_track(io.StringIO(text))


@pytest.mark.parametrize("body, match", [
    ('{"type":"frame","frame":1,"hands":[]\n', "line 2: malformed JSON"),
    ('{"type":"frame","frame":1,"hands":[]}\n{"type":"frame","frame":1,"hands":[]}\n', "line 3: duplicate"),
    ('{"type":"frame","frame":0,"hands":[{"box":[0.2,0.2,1.4,0.4],"conf":0.9}]}\n', "outside"),
    ('{"type":"frame","frame":0,"hands":[{"box":[0.4,0.2,0.2,0.4],"conf":0.9}]}\n', "degenerate"),
    ('{"type":"frame","frame":0,"hands":[{"box":[0.2,0.2,0.4,0.4],"conf":1.5}]}\n', "confidence"),
    ('{"type":"frame","frame":0,"hands":[{"box":[0.2,0.2,0.4],"conf":0.5}]}\n', "four numbers"),
    ('{"type":"frame","frame":-1,"hands":[]}\n', "out of range"),
])
def test_parse_errors(body, match):
    with pytest.raises(FormatError, match=match):
        parse_track(io.StringIO(HEADER + body))


def test_parse_missing_header():
    with pytest.raises(FormatError, match="missing header"):
        parse_track(io.StringIO('{"type":"frame","frame":0,"hands":[]}\n'))
    with pytest.raises(FormatError, match="missing header"):
        parse_track(io.StringIO(""))


def test_parse_sorts_out_of_order_frames_and_ignores_unknown_keys():
    text = (HEADER
            + '{"type":"frame","frame":2,"hands":[],"extra":1}\n'
            + '{"type":"frame","frame":0,"hands":[{"box":[0.1,0.1,0.2,0.2],"conf":0.7,"id":9}]}\n')
    track = parse_track(io.StringIO(text))
    assert [f.frame_index for f in track.frames] == [0, 2]


def test_three_frame_file_round_trips_byte_identically():
    lines = [HEADER.rstrip("\n")]
    for i in range(3):
        lines.append(json.dumps({"type": "frame", "frame": i,
                                 "hands": [{"box": [0.2, 0.2, 0.4, 0.4], "conf": 0.9}]},
                                separators=(",", ":")))
    text = "\n".join(lines) + "\n"
    assert serialize_track(parse_track(io.StringIO(text))) == text


@pytest.mark.parametrize("seed", range(25))
def test_round_trip_random_tracks(seed):
    track = random_track(random.Random(seed))
    text = serialize_track(track)
    parsed = parse_track(io.StringIO(text))
    assert parsed == track
    assert serialize_track(parsed) == text


# --- filtering --------------------------------------------------------------

def test_filter_confidence_threshold():
    f = FrameDetections(0, (det(0.04, 0.9), det(0.04, 0.3)))
    out = filter_frame(f, RES, FilterConfig(min_confidence=0.5, min_area_fraction=0.0))
    assert out.detections == (f.detections[0],)


def test_filter_area_threshold():
    f = FrameDetections(0, (det(0.002, 0.9),))
    out = filter_frame(f, RES, FilterConfig(min_confidence=0.0, min_area_fraction=0.005))
    assert out.detections == ()


def test_filter_max_hands_tie_breaks():
    areas = [0.03, 0.01, 0.02, 0.03]
    confs = [0.6, 0.9, 0.9, 0.8]
    dets = tuple(HandDetection(BBox(0.0, 0.0, a / 0.5, 0.5), c) for a, c in zip(areas, confs))
    f = FrameDetections(4, dets)
    cfg = FilterConfig(min_confidence=0.5, min_area_fraction=0.0, max_hands=2)
    out = filter_frame(f, RES, cfg)
    assert out.detections == (dets[0], dets[3])
    assert out.frame_index == 4
    assert out.detections == brute_force_filter(f, cfg)


def test_filter_tie_on_area_and_confidence_keeps_earlier():
    dets = (det(0.04, 0.7), det(0.04, 0.7), det(0.04, 0.7))
    out = filter_frame(FrameDetections(0, dets), RES, FilterConfig(0.0, 0.0, 2))
    assert out.detections == dets[:2]


@pytest.mark.parametrize("seed", range(200))
def test_filter_matches_brute_force(seed):
    rng = random.Random(seed)
    frame = random_frame(rng, 0, max_dets=5)
    # coarse values so area/confidence ties actually occur
    frame = FrameDetections(0, tuple(
        HandDetection(BBox(0.0, 0.0, rng.choice([0.1, 0.2, 0.3]), 0.5), rng.choice([0.4, 0.6, 0.8]))
        for _ in frame.detections
    ))
    cfg = FilterConfig(rng.choice([0.0, 0.5, 0.7]), rng.choice([0.0, 0.06, 0.1]), rng.randint(1, 4))
    assert filter_frame(frame, RES, cfg).detections == brute_force_filter(frame, cfg)


confidences = st.floats(0.0, 1.0)
areas = st.floats(0.0, 1.0)


@settings(max_examples=200, deadline=None)
@given(seed=st.integers(0, 10**6), c1=confidences, c2=confidences, a1=areas, a2=areas,
       max_hands=st.integers(1, 4))
def test_filter_monotone_idempotent_subset(seed, c1, c2, a1, a2, max_hands):
    frame = random_frame(random.Random(seed), 0, max_dets=6)
    lo = FilterConfig(min(c1, c2), min(a1, a2), max_hands)
    hi = FilterConfig(max(c1, c2), max(a1, a2), max_hands)
    out_lo = filter_frame(frame, RES, lo)
    out_hi = filter_frame(frame, RES, hi)
    assert len(out_hi.detections) <= len(out_lo.detections)
    assert filter_frame(out_lo, RES, lo) == out_lo
    for d in out_lo.detections:
        assert any(d is src for src in frame.detections)
