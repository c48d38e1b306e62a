"""Pure numpy implementations of the hot loops in ``_ckernels``.

Operation order mirrors the compiled version so both produce identical bits.
"""

import numpy as np


def convolve_edge(x, w):
    x = np.ascontiguousarray(x, dtype=np.float64)
    w = np.ascontiguousarray(w, dtype=np.float64)
    n = x.shape[0]
    r = w.shape[0] // 2
    if n == 0:
        return np.empty(0, dtype=np.float64)
    padded = np.concatenate([np.full(r, x[0]), x, np.full(r, x[-1])])
    acc = np.zeros(n, dtype=np.float64)
    for k in range(w.shape[0]):
        acc = acc + w[k] * padded[k:k + n]
    return acc


def gather_nearest(src, rows, cols):
    return np.ascontiguousarray(src[np.asarray(rows)[:, None], np.asarray(cols)[None, :]])


def gather_bilinear(src, r0, r1, wy0, wy1, c0, c1, wx0, wx1):
    src = np.asarray(src)
    r0 = np.asarray(r0)[:, None]
    r1 = np.asarray(r1)[:, None]
    c0 = np.asarray(c0)[None, :]
    c1 = np.asarray(c1)[None, :]
    wx0 = np.asarray(wx0)[None, :]
    wx1 = np.asarray(wx1)[None, :]
    wy0 = np.asarray(wy0)[:, None]
    wy1 = np.asarray(wy1)[:, None]
    f = np.float64
    top = wx0 * src[r0, c0].astype(f) + wx1 * src[r0, c1].astype(f)
    bot = wx0 * src[r1, c0].astype(f) + wx1 * src[r1, c1].astype(f)
    v = np.floor(wy0 * top + wy1 * bot + 0.5)
    return np.clip(v, 0.0, 255.0).astype(np.uint8)
