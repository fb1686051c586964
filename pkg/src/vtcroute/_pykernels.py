"""Pure-Python/numpy implementations of the hot kernels.

Every function here has a twin in ``_ckernels.pyx`` with the same signature
and the same floating-point operation order, so both backends agree exactly
on layout and to rounding on the reductions.
"""
import math

import numpy as np

GLYPH = 0
SPACE = 1
NEWLINE = 2
ZERO_WIDTH = 3


def break_lines(advances, kinds, max_width):
    """Greedy word wrap.

    Returns ``(x0, x1, line)`` per character: horizontal extent relative to
    the content box and the 0-based line index.
    """
    n = len(advances)
    x0 = np.zeros(n, dtype=np.float64)
    x1 = np.zeros(n, dtype=np.float64)
    line = np.zeros(n, dtype=np.int64)
    cur = 0
    x = 0.0
    line_has = False
    i = 0
    while i < n:
        k = kinds[i]
        if k == NEWLINE:
            pos = x if x < max_width else max_width
            x0[i] = pos
            x1[i] = pos
            line[i] = cur
            cur += 1
            x = 0.0
            line_has = False
            i += 1
            continue
        if k == SPACE:
            a = advances[i]
            line[i] = cur
            if x + a <= max_width:
                x0[i] = x
                x1[i] = x + a
                x += a
                line_has = True
            else:
                # hanging space: clipped to the content edge, then wrap
                x0[i] = x if x < max_width else max_width
                x1[i] = max_width
                cur += 1
                x = 0.0
                line_has = False
            i += 1
            continue
        j = i
        w = 0.0
        while j < n and (kinds[j] == GLYPH or kinds[j] == ZERO_WIDTH):
            w += advances[j]
            j += 1
        if x + w > max_width and line_has:
            cur += 1
            x = 0.0
            line_has = False
        for t in range(i, j):
            a = advances[t]
            if x + a > max_width and line_has:
                cur += 1
                x = 0.0
                line_has = False
            x0[t] = x
            x1[t] = x + a
            x += a
            line[t] = cur
            line_has = True
        i = j
    return x0, x1, line


def rasterize(x0, x1, y0, y1, ink, width, height):
    """Fill each character box with its ink value (pixel-centre sampling)."""
    out = np.zeros((height, width), dtype=np.float64)
    for i in range(len(x0)):
        c_lo = max(0, math.ceil(x0[i] - 0.5))
        c_hi = min(width, math.ceil(x1[i] - 0.5))
        r_lo = max(0, math.ceil(y0[i] - 0.5))
        r_hi = min(height, math.ceil(y1[i] - 0.5))
        if c_hi > c_lo and r_hi > r_lo:
            out[r_lo:r_hi, c_lo:c_hi] = ink[i]
    return out


def cell_stats(raster, cell):
    """Per-cell mean and population variance of a raster whose dims are multiples of ``cell``."""
    h, w = raster.shape
    gh, gw = h // cell, w // cell
    blocks = raster[: gh * cell, : gw * cell].reshape(gh, cell, gw, cell)
    mean = blocks.mean(axis=(1, 3))
    var = ((blocks - mean[:, None, :, None]) ** 2).mean(axis=(1, 3))
    return mean, var


def lcs_length(a, b):
    """Length of the longest common subsequence of two integer sequences."""
    if len(a) < len(b):
        a, b = b, a
    m = len(b)
    if m == 0:
        return 0
    prev = [0] * (m + 1)
    for x in a:
        cur = [0] * (m + 1)
        for j in range(1, m + 1):
            if x == b[j - 1]:
                cur[j] = prev[j - 1] + 1
            else:
                cur[j] = prev[j] if prev[j] >= cur[j - 1] else cur[j - 1]
        prev = cur
    return prev[m]
