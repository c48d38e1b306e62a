"""Command-line interface.

Subcommands: focus, smooth, plan, render, sample, stats, pipeline.
Exit codes: 0 ok, 2 usage, 3 bad input format, 4 stream/plan mismatch.
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import itertools
import json
import logging
import os
import sys

from dexfocus import __version__
from dexfocus.kernels import BACKEND
from dexfocus.config import CONFIG_SCHEMA_VERSION, PipelineConfig, dump_config_text, parse_config_text
from dexfocus.detections import Resolution, parse_track
from dexfocus.errors import DexFocusError, FormatError, MismatchError
from dexfocus.focus import build_trajectory, parse_trajectory, write_trajectory
from dexfocus.geometry import CropPlan, align_plan, build_plan, parse_plan, write_plan
from dexfocus.metrics import CSV_COLUMNS, report_csv_row, stats_report
from dexfocus.render import prepare_plan, read_png_frames, render_stream, write_png_frame
from dexfocus.sampling import sample_indices
from dexfocus.stabilize import make_kernel, smooth_trajectory
from dexfocus.y4m import Y4MReader, Y4MWriter

log = logging.getLogger("dexfocus")

# flag dest -> config key
_FLAG_KEYS = {
    "min_confidence": "min_confidence",
    "min_area": "min_area_fraction",
    "max_hands": "max_hands",
    "fallback_x": "fallback_x",
    "fallback_y": "fallback_y",
    "kernel": "kernel",
    "sigma": "sigma",
    "radius": "radius",
    "truncation": "truncation",
    "area_fraction": "area_fraction",
    "out_size": "out_size",
    "align": "align",
    "interp": "interp",
    "num": "num_samples",
    "dt": "base_dt",
}


class StageError(Exception):
    def __init__(self, stage: str, error: Exception):
        super().__init__(f"[{stage}] {error}")
        self.stage = stage
        self.error = error


@contextlib.contextmanager
def stage(name: str):
    try:
        yield
    except StageError:
        raise
    except (DexFocusError, ValueError, OSError) as exc:
        raise StageError(name, exc) from exc


# --- file helpers -----------------------------------------------------------

@contextlib.contextmanager
def open_input(path: str, binary: bool = False):
    if path == "-":
        yield sys.stdin.buffer if binary else sys.stdin
    else:
        with open(path, "rb" if binary else "r", encoding=None if binary else "utf-8") as fp:
            yield fp


class Outputs:
    """Output files written under ``.partial`` names, renamed on commit.

    On failure every partial file is removed.
    """

    def __init__(self):
        self._files = []
        self.inputs = contextlib.ExitStack()

    def open(self, path: str, binary: bool = False):
        if path == "-":
            return sys.stdout.buffer if binary else sys.stdout
        partial = path + ".partial"
        fp = open(partial, "wb" if binary else "w", encoding=None if binary else "utf-8", newline=None if binary else "\n")
        self._files.append((fp, partial, path))
        return fp

    def commit(self):
        self.inputs.close()
        for fp, partial, path in self._files:
            fp.close()
            os.replace(partial, path)
        self._files = []

    def abort(self):
        self.inputs.close()
        for fp, partial, _ in self._files:
            fp.close()
            with contextlib.suppress(OSError):
                os.remove(partial)
        self._files = []


# --- argument parsing -------------------------------------------------------

def _add_config_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("configuration")
    g.add_argument("--config", help="flat key = value config file")
    g.add_argument("--dump-config", metavar="FILE", help="write the resolved config to FILE ('-' for stdout) and exit")
    g.add_argument("--min-confidence", type=float)
    g.add_argument("--min-area", type=float, help="minimum box area as a fraction of the frame")
    g.add_argument("--max-hands", type=int)
    g.add_argument("--fallback-x", type=float)
    g.add_argument("--fallback-y", type=float)
    g.add_argument("--kernel", choices=("gaussian", "box", "identity"))
    g.add_argument("--sigma", type=float, help="gaussian sigma in seconds")
    g.add_argument("--radius", type=int, help="box radius in frames")
    g.add_argument("--truncation", type=float, help="gaussian support in multiples of sigma")
    g.add_argument("--area-fraction", type=float, help="crop area as a fraction of the frame")
    g.add_argument("--out-size", type=int)
    g.add_argument("--align", type=int, help="snap crop origin and side to this multiple")
    g.add_argument("--interp", choices=("bilinear", "nearest"))
    g.add_argument("--num", type=int, help="frames per sampled clip")
    g.add_argument("--dt", type=float, help="base spacing between sampled frames")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dexfocus", description=__doc__.splitlines()[0] if __doc__ else None)
    parser.add_argument("--version", action="version",
                        version=f"dexfocus {__version__} (config schema {CONFIG_SCHEMA_VERSION})")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("focus", help="detections -> raw trajectory")
    p.add_argument("--detections", "--in", dest="detections", default="-")
    p.add_argument("--out", default="-")
    _add_config_flags(p)

    p = sub.add_parser("smooth", help="trajectory -> smoothed trajectory")
    p.add_argument("--in", dest="input", default="-")
    p.add_argument("--out", default="-")
    _add_config_flags(p)

    p = sub.add_parser("plan", help="smoothed trajectory -> crop manifest")
    p.add_argument("--in", dest="input", default="-")
    p.add_argument("--out", default="-")
    p.add_argument("--width", type=int, required=True)
    p.add_argument("--height", type=int, required=True)
    _add_config_flags(p)

    p = sub.add_parser("render", help="apply a crop manifest to a video")
    p.add_argument("--plan", required=True)
    p.add_argument("--in", dest="input", default="-")
    p.add_argument("--out", default="-")
    p.add_argument("--mode", choices=("y4m", "png"), default="y4m")
    p.add_argument("--workers", type=int, default=1)
    _add_config_flags(p)

    p = sub.add_parser("sample", help="print sampled frame indices for a clip")
    p.add_argument("--frames", type=int, required=True)
    _add_config_flags(p)

    p = sub.add_parser("stats", help="trajectory smoothness and crop coverage")
    p.add_argument("--raw", required=True, help="raw trajectory JSONL")
    p.add_argument("--plan", required=True, help="crop manifest JSONL")
    p.add_argument("--smoothed", help="smoothed trajectory JSONL")
    p.add_argument("--csv", action="store_true", help="emit one CSV row instead of JSON")
    p.add_argument("--csv-header", action="store_true", help="with --csv, print the column names first")
    _add_config_flags(p)

    p = sub.add_parser("pipeline", help="detections + video -> hand-focused video, manifest, stats")
    p.add_argument("--detections", required=True)
    p.add_argument("--in", dest="input", default="-")
    p.add_argument("--out", default="-")
    p.add_argument("--manifest", required=True)
    p.add_argument("--stats")
    p.add_argument("--trajectory", help="also write the raw trajectory here")
    p.add_argument("--mode", choices=("y4m", "png"), default="y4m")
    p.add_argument("--workers", type=int, default=1)
    _add_config_flags(p)
    return parser


def resolve_config(args: argparse.Namespace) -> PipelineConfig:
    values = {}
    if args.config:
        with open(args.config, encoding="utf-8") as fp:
            values.update(parse_config_text(fp))
    for dest, key in _FLAG_KEYS.items():
        v = getattr(args, dest, None)
        if v is not None:
            values[key] = v
    return PipelineConfig.from_flat(values)


# --- commands ---------------------------------------------------------------

def cmd_focus(args, cfg: PipelineConfig, out: Outputs) -> None:
    with stage("parse"), open_input(args.detections) as fp:
        track = parse_track(fp)
    with stage("focus"):
        traj = build_trajectory(track, cfg.filter, cfg.fallback)
    write_trajectory(traj, out.open(args.out))


def cmd_smooth(args, cfg: PipelineConfig, out: Outputs) -> None:
    with stage("parse"), open_input(args.input) as fp:
        traj = parse_trajectory(fp)
    with stage("smooth"):
        smoothed = smooth_trajectory(traj, make_kernel(cfg.smoothing, traj.fps))
    write_trajectory(smoothed, out.open(args.out))


def _make_plan(traj, res: Resolution, cfg: PipelineConfig):
    return align_plan(build_plan(traj, res, cfg.crop), cfg.align)


def _with_config(plan, cfg: PipelineConfig):
    return CropPlan(plan.resolution, plan.out_size, plan.windows, cfg.to_flat())


def cmd_plan(args, cfg: PipelineConfig, out: Outputs) -> None:
    with stage("parse"), open_input(args.input) as fp:
        traj = parse_trajectory(fp)
    with stage("plan"):
        plan = _with_config(_make_plan(traj, Resolution(args.width, args.height), cfg), cfg)
    write_plan(plan, out.open(args.out))


def _open_frames(args, out: Outputs):
    """Frame iterator, stream layout/resolution, and a per-frame sink."""
    if args.mode == "y4m":
        fp = out.inputs.enter_context(open_input(args.input, binary=True))
        reader = Y4MReader(fp)
        header = reader.header

        def make_sink(out_size: int):
            writer = Y4MWriter(out.open(args.out, binary=True), header.resized(out_size, out_size))
            return lambda i, frame: writer.write_frame(frame)

        return iter(reader), header.layout, Resolution(header.width, header.height), make_sink

    frames = read_png_frames(args.input)
    first = next(frames, None)
    if first is None:
        raise FormatError(f"no images match {args.input!r}")
    if args.out != "-":
        os.makedirs(args.out, exist_ok=True)

    def make_sink(out_size: int):
        return lambda i, frame: write_png_frame(frame, args.out, i)

    return itertools.chain([first], frames), "rgb", Resolution(first.width, first.height), make_sink


def _render(args, plan, cfg: PipelineConfig, frames, make_sink) -> None:
    sink = make_sink(plan.out_size)
    for i, frame in enumerate(render_stream(frames, plan, cfg.interp, args.workers)):
        sink(i, frame)


def cmd_render(args, cfg: PipelineConfig, out: Outputs) -> None:
    with stage("parse"):
        with open_input(args.plan) as fp:
            plan = parse_plan(fp)
        frames, layout, res, make_sink = _open_frames(args, out)
    with stage("render"):
        if res != plan.resolution:
            raise MismatchError(f"video is {res.width}x{res.height}, plan expects "
                                f"{plan.resolution.width}x{plan.resolution.height}")
        _render(args, prepare_plan(plan, layout), cfg, frames, make_sink)


def cmd_sample(args, cfg: PipelineConfig, out: Outputs) -> None:
    with stage("parse"):
        if args.frames < 1:
            raise ValueError("--frames must be positive")
    print(",".join(str(i) for i in sample_indices(args.frames, cfg.sampling)))


def _write_report(report: dict, fp, as_csv: bool = False, header: bool = False) -> None:
    if as_csv:
        w = csv.writer(fp, lineterminator="\n")
        if header:
            w.writerow(CSV_COLUMNS)
        w.writerow(report_csv_row(report))
    else:
        fp.write(json.dumps(report, separators=(",", ":")) + "\n")


def cmd_stats(args, cfg: PipelineConfig, out: Outputs) -> None:
    with stage("parse"):
        with open_input(args.raw) as fp:
            raw = parse_trajectory(fp)
        with open_input(args.plan) as fp:
            plan = parse_plan(fp)
        smoothed = None
        if args.smoothed:
            with open_input(args.smoothed) as fp:
                smoothed = parse_trajectory(fp)
    report = stats_report(raw, plan, smoothed)
    _write_report(report, sys.stdout, args.csv, args.csv_header)


def cmd_pipeline(args, cfg: PipelineConfig, out: Outputs) -> None:
    with stage("parse"):
        with open_input(args.detections) as fp:
            track = parse_track(fp)
        frames, layout, res, make_sink = _open_frames(args, out)
        if res != track.resolution:
            raise MismatchError(f"video is {res.width}x{res.height}, detections are for "
                                f"{track.resolution.width}x{track.resolution.height}")
    with stage("focus"):
        raw = build_trajectory(track, cfg.filter, cfg.fallback)
    with stage("smooth"):
        smoothed = smooth_trajectory(raw, make_kernel(cfg.smoothing, raw.fps))
    with stage("plan"):
        plan = _with_config(prepare_plan(_make_plan(smoothed, res, cfg), layout), cfg)
    with stage("render"):
        _render(args, plan, cfg, frames, make_sink)
    write_plan(plan, out.open(args.manifest))
    if args.trajectory:
        write_trajectory(raw, out.open(args.trajectory))
    if args.stats:
        _write_report(stats_report(raw, plan, smoothed), out.open(args.stats))


COMMANDS = {
    "focus": cmd_focus,
    "smooth": cmd_smooth,
    "plan": cmd_plan,
    "render": cmd_render,
    "sample": cmd_sample,
    "stats": cmd_stats,
    "pipeline": cmd_pipeline,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s")
    log.debug("kernel backend: %s", BACKEND)
    try:
        cfg = resolve_config(args)
    except FormatError as exc:
        print(f"dexfocus: error [config]: {exc}", file=sys.stderr)
        return exc.exit_code
    except (ValueError, OSError) as exc:
        print(f"dexfocus: error [config]: {exc}", file=sys.stderr)
        return 2

    if args.dump_config:
        text = dump_config_text(cfg)
        if args.dump_config == "-":
            sys.stdout.write(text)
        else:
            with open(args.dump_config, "w", encoding="utf-8") as fp:
                fp.write(text)
        return 0

    out = Outputs()
    try:
        COMMANDS[args.command](args, cfg, out)
        out.commit()
    except StageError as exc:
        out.abort()
        err = exc.error
        code = err.exit_code if isinstance(err, DexFocusError) else 3
        print(f"dexfocus: error {exc}", file=sys.stderr)
        return code
    except BaseException:
        out.abort()
        raise
    sys.stdout.flush()
    return 0


if __name__ == "__main__":
    sys.exit(main())
