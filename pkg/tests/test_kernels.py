import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from vtcroute import _pykernels, kernels
from vtcroute._pykernels import GLYPH, NEWLINE, SPACE, ZERO_WIDTH

try:
    from vtcroute import _ckernels
except ImportError:
    _ckernels = None

needs_ext = pytest.mark.skipif(_ckernels is None, reason="compiled kernels not built")


def lcs_brute(a, b):
    """Longest common subsequence by enumerating subsequences of the shorter input."""
    if len(a) > len(b):
        a, b = b, a
    for size in range(len(a), 0, -1):
        for idx in itertools.combinations(range(len(a)), size):
            sub = [a[i] for i in idx]
            it = iter(b)
            if all(any(x == y for y in it) for x in sub):
                return size
    return 0


def test_lcs_known(backend):
    assert kernels.lcs_length([1, 2, 3, 4], [2, 4]) == 2
    assert kernels.lcs_length([], [1, 2]) == 0
    assert kernels.lcs_length([5, 5, 5], [5, 5]) == 2


@settings(max_examples=150, deadline=None)
@given(st.lists(st.integers(0, 3), max_size=7), st.lists(st.integers(0, 3), max_size=7))
def test_lcs_matches_brute_force(a, b):
    assert kernels.lcs_length(a, b) == lcs_brute(a, b)


def test_break_lines_wraps_at_word_boundary(backend):
    # "ab cd" with 10px glyphs in a 25px line: "cd" must move to line 1
    adv = [10, 10, 5, 10, 10]
    kinds = [GLYPH, GLYPH, SPACE, GLYPH, GLYPH]
    x0, x1, line = kernels.break_lines(adv, kinds, 25.0)
    assert line.tolist() == [0, 0, 0, 1, 1]
    assert x0[3] == 0.0 and x1[4] == 20.0


def test_break_lines_forces_break_in_long_word(backend):
    adv = [10.0] * 7
    x0, x1, line = kernels.break_lines(adv, [GLYPH] * 7, 25.0)
    assert line.tolist() == [0, 0, 1, 1, 2, 2, 3]
    assert (x1 <= 25.0).all()


def test_break_lines_newline_starts_line(backend):
    adv = [10, 0, 10]
    x0, x1, line = kernels.break_lines(adv, [GLYPH, NEWLINE, GLYPH], 100.0)
    assert line.tolist() == [0, 0, 1]
    assert x0[1] == x1[1] == 10.0


def test_rasterize_pixel_centres(backend):
    r = kernels.rasterize([0.4], [2.6], [0.0], [1.6], [0.5], 4, 3)
    # columns whose centres (c + 0.5) lie in [0.4, 2.6): 0, 1, 2; rows with centres in [0, 1.6): 0, 1
    expect = np.zeros((3, 4))
    expect[0:2, 0:3] = 0.5
    assert np.array_equal(r, expect)


def test_cell_stats_matches_loops(backend):
    rng = np.random.default_rng(0)
    raster = rng.random((64, 96))
    mean, var = kernels.cell_stats(raster, 32)
    for r in range(2):
        for c in range(3):
            block = raster[r * 32 : (r + 1) * 32, c * 32 : (c + 1) * 32]
            assert mean[r, c] == pytest.approx(block.mean(), abs=1e-12)
            assert var[r, c] == pytest.approx(block.var(), abs=1e-12)


def _random_layout_input(rng, n):
    kinds = rng.choice([GLYPH, GLYPH, GLYPH, GLYPH, SPACE, NEWLINE, ZERO_WIDTH], size=n).astype(np.int8)
    adv = rng.uniform(3, 15, size=n)
    adv[kinds == NEWLINE] = 0
    adv[kinds == ZERO_WIDTH] = 0
    return adv, kinds


@needs_ext
@pytest.mark.parametrize("seed", range(20))
def test_backend_parity(seed):
    rng = np.random.default_rng(seed)
    adv, kinds = _random_layout_input(rng, 500)
    out_py = _pykernels.break_lines(adv, kinds, 120.0)
    out_c = _ckernels.break_lines(adv, kinds, 120.0)
    for a, b in zip(out_py, out_c):
        assert np.array_equal(np.asarray(a), np.asarray(b))

    x0, x1 = np.sort(rng.uniform(0, 60, (2, 40)), axis=0)
    y0 = rng.uniform(0, 30, 40)
    y1 = y0 + rng.uniform(0, 20, 40)
    ink = rng.random(40)
    r_py = _pykernels.rasterize(x0, x1, y0, y1, ink, 64, 64)
    r_c = _ckernels.rasterize(x0, x1, y0, y1, ink, 64, 64)
    assert np.array_equal(np.asarray(r_py), np.asarray(r_c))

    m_py, v_py = _pykernels.cell_stats(r_py, 32)
    m_c, v_c = _ckernels.cell_stats(r_py, 32)
    assert np.allclose(m_py, m_c, atol=1e-12, rtol=0) and np.allclose(v_py, v_c, atol=1e-12, rtol=0)

    a = rng.integers(0, 5, 60)
    b = rng.integers(0, 5, 45)
    assert _pykernels.lcs_length(a, b) == _ckernels.lcs_length(a, b)


def test_use_backend_rejects_unknown():
    with pytest.raises(ValueError):
        kernels.use_backend("fortran")


def test_benchmark_script_runs(capsys):
    import importlib.util
    from pathlib import Path

    path = Path(__file__).resolve().parents[1] / "benchmarks" / "bench_kernels.py"
    spec = importlib.util.spec_from_file_location("bench_kernels", path)
    mod = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(mod)
    previous = kernels.backend()
    try:
        mod.run(repeat=1, chars=2000, seed=1)
    finally:
        kernels.use_backend(previous)
    out = capsys.readouterr().out
    assert "pipeline" in out
    if len(kernels.available_backends()) > 1:
        assert "outputs agree across backends: True" in out
