"""Backend selection for the hot kernels.

The compiled extension is used when it imports; otherwise the numpy
fallback is used. :func:`use_backend` switches at runtime (tests and the
benchmark use it to compare the two).
"""
import numpy as np

from . import _pykernels

try:
    from . import _ckernels
except ImportError:  # extension not built
    _ckernels = None

_active = _ckernels if _ckernels is not None else _pykernels


def available_backends():
    return ["cython", "python"] if _ckernels is not None else ["python"]


def backend():
    return "cython" if _active is _ckernels and _ckernels is not None else "python"


def use_backend(name):
    """Select ``"cython"`` or ``"python"``; returns the previous backend name."""
    global _active
    previous = backend()
    if name == "cython":
        if _ckernels is None:
            raise RuntimeError("compiled kernels are not built")
        _active = _ckernels
    elif name == "python":
        _active = _pykernels
    else:
        raise ValueError(f"unknown backend {name!r}")
    return previous


def break_lines(advances, kinds, max_width):
    return _active.break_lines(
        np.ascontiguousarray(advances, dtype=np.float64),
        np.ascontiguousarray(kinds, dtype=np.int8),
        float(max_width),
    )


def rasterize(x0, x1, y0, y1, ink, width, height):
    f = lambda a: np.ascontiguousarray(a, dtype=np.float64)  # noqa: E731
    return _active.rasterize(f(x0), f(x1), f(y0), f(y1), f(ink), int(width), int(height))


def cell_stats(raster, cell):
    return _active.cell_stats(np.ascontiguousarray(raster, dtype=np.float64), int(cell))


def lcs_length(a, b):
    return int(
        _active.lcs_length(
            np.ascontiguousarray(a, dtype=np.int64), np.ascontiguousarray(b, dtype=np.int64)
        )
    )
