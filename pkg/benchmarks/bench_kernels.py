"""Compare the compiled and numpy kernel backends.

    python benchmarks/bench_kernels.py [--repeat 5]

Reports the best-of-N wall time per workload and backend.
"""

import argparse
import timeit

import numpy as np

from dexfocus import kernels
from dexfocus.render import bilinear_taps, nearest_taps
from dexfocus.stabilize import SmoothingConfig, make_kernel


def workloads(rng):
    # 10 minutes of 60 fps trajectory, sigma 0.5 s
    x = rng.random(36_000)
    w = np.asarray(make_kernel(SmoothingConfig("gaussian", sigma_seconds=0.5), 60.0).weights)
    yield "smooth 36k frames, 181 taps", lambda k: k.convolve_edge(x, w)

    # 25% crop of a 1080p luma plane (720x720 view) down to 224
    frame = rng.integers(0, 256, (1080, 1920), dtype=np.uint8)
    view = frame[180:900, 600:1320]
    bt = bilinear_taps(720, 224)
    yield "bilinear 720->224 luma", lambda k: k.gather_bilinear(view, *bt, *bt)
    nt = nearest_taps(720, 224)
    yield "nearest 720->224 luma", lambda k: k.gather_nearest(view, nt, nt)

    # 448p crop upscaled, the benchmark's 448 -> 224 path inverted
    small = frame[:224, :224]
    up = bilinear_taps(224, 448)
    yield "bilinear 224->448 luma", lambda k: k.gather_bilinear(small, *up, *up)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--number", type=int, default=10)
    args = ap.parse_args()

    backends = kernels.available_backends()
    rng = np.random.default_rng(0)
    print(f"{'workload':32s}" + "".join(f"{b:>14s}" for b in backends) + ("     speedup" if len(backends) > 1 else ""))
    for name, fn in workloads(rng):
        times = []
        for b in backends:
            mod = kernels.get_backend(b)
            best = min(timeit.repeat(lambda: fn(mod), number=args.number, repeat=args.repeat)) / args.number
            times.append(best)
        row = f"{name:32s}" + "".join(f"{t * 1e3:11.3f} ms" for t in times)
        if len(times) > 1:
            row += f"{times[1] / times[0]:11.1f}x"
        print(row)
    if len(backends) == 1:
        print("compiled kernels not built; only the numpy fallback was timed")


if __name__ == "__main__":
    main()
