"""Backend selection for the hot loops.

The compiled extension is used when it imports; otherwise the numpy
fallback. Set ``DEXFOCUS_BACKEND=python`` to force the fallback.
"""

import os
from types import ModuleType

from dexfocus import _pykernels


def _load_compiled() -> ModuleType | None:
    try:
        from dexfocus import _ckernels
    except ImportError:
        return None
    return _ckernels


_compiled = _load_compiled()


def available_backends() -> list[str]:
    names = ["python"]
    if _compiled is not None:
        names.insert(0, "cython")
    return names


def get_backend(name: str) -> ModuleType:
    if name == "python":
        return _pykernels
    if name == "cython":
        if _compiled is None:
            raise ImportError("compiled kernels are not built")
        return _compiled
    raise ValueError(f"unknown kernel backend {name!r}")


if os.environ.get("DEXFOCUS_BACKEND", "").lower() == "python" or _compiled is None:
    BACKEND = "python"
else:
    BACKEND = "cython"

_impl = get_backend(BACKEND)

convolve_edge = _impl.convolve_edge
gather_nearest = _impl.gather_nearest
gather_bilinear = _impl.gather_bilinear
