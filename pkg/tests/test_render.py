import random

import numpy as np
import pytest

from vtcroute.errors import ConfigError
from vtcroute.render import (
    RenderConfig,
    build_alignment,
    count_visual_tokens,
    layout_document,
    rasterize_page,
)

LOREM = (
    "Lorem ipsum dolor sit amet, consectetur adipiscing elit, sed do eiusmod tempor incididunt ut "
    "labore et dolore magna aliqua. Ut enim ad minim veniam, quis nostrud exercitation ullamco "
    "laboris nisi ut aliquip ex ea commodo consequat. "
)


def corpus(n=10, seed=0):
    rng = random.Random(seed)
    words = LOREM.split() + ["supercalifragilisticexpialidocious", "x", "12345", "\n", "naïve", "café"]
    docs = []
    for _ in range(n):
        k = rng.randint(200, 900)
        docs.append(" ".join(rng.choice(words) for _ in range(k)))
    return docs


def brute_cells(doc):
    cell = doc.config.token_cell_px
    total = 0
    for p in doc.pages:
        for _y in range(0, p.height_px, cell):
            for _x in range(0, p.width_px, cell):
                total += 1
    return total


def test_empty_and_control_only():
    for text in ("", "\x00\x01​"):
        doc = layout_document(text)
        assert doc.pages == () and doc.m == 0


def test_determinism():
    text = corpus(1)[0]
    assert layout_document(text).to_json() == layout_document(text).to_json()


@pytest.mark.parametrize("pt", [10, 12, 14])
def test_grid_snapping_and_token_formula(pt):
    cfg = RenderConfig(font_size_pt=pt)
    for text in corpus(4, seed=pt):
        doc = layout_document(text, cfg)
        for p in doc.pages:
            assert p.width_px % 32 == 0 and p.height_px % 32 == 0
            assert 0 < p.width_px <= 928 and 0 < p.height_px <= 928
            assert p.grid_w == p.width_px // 32 and p.grid_h == p.height_px // 32
        assert doc.m == count_visual_tokens(doc) == brute_cells(doc)


def test_every_char_on_exactly_one_page():
    text = LOREM * 80
    doc = layout_document(text)
    assert len(doc.pages) > 1
    seen = np.zeros(len(text), dtype=int)
    for p in doc.pages:
        seen[p.start : p.end] += 1
        assert p.text == text[p.start : p.end]
        for ln in p.lines:
            assert p.start <= ln.start <= ln.end <= p.end
    assert (seen == 1).all()


def test_boxes_inside_content_area_and_disjoint_per_line():
    cfg = RenderConfig()
    doc = layout_document(" ".join(corpus(2)), cfg)
    m = cfg.margin_px
    for p in doc.pages:
        x0, x1, y0, y1 = p.char_boxes()
        assert (x0 >= m).all() and (x1 <= m + cfg.content_width_px + 1e-9).all()
        assert (y0 >= m).all() and (y1 <= p.height_px).all()
        for k in range(len(p.lines)):
            sel = np.flatnonzero(p.line_of == k)
            assert (x0[sel][1:] >= x1[sel][:-1] - 1e-9).all()


def test_long_word_is_force_broken():
    doc = layout_document("W" * 400)
    page = doc.pages[0]
    assert len(page.lines) > 1
    assert float(page.x1.max()) <= 8 + RenderConfig().content_width_px + 1e-9


def test_token_monotonicity_across_font_sizes():
    text = (LOREM * 30)[:5000]
    ms = [layout_document(text, RenderConfig(font_size_pt=pt)).m for pt in (10, 12, 14)]
    assert ms[0] <= ms[1] <= ms[2]


def test_unfit_font_size_is_config_error():
    with pytest.raises(ConfigError):
        RenderConfig(font_size_pt=900)
    with pytest.raises(ConfigError):
        RenderConfig(page_cap_px=900)


def brute_alignment(page, cell):
    x0, x1, y0, y1 = page.char_boxes()
    out = {}
    for r in range(page.grid_h):
        for c in range(page.grid_w):
            hits = []
            for i in range(len(x0)):
                def overlaps(a, b, lo):
                    hi = lo + cell
                    return (a < hi and b > lo) if b > a else lo <= a < hi
                if overlaps(x0[i], x1[i], c * cell) and overlaps(y0[i], y1[i], r * cell):
                    hits.append(page.start + i)
            if hits:
                out[(r, c)] = set(hits)
    return out


def test_alignment_matches_brute_force():
    doc = layout_document(LOREM * 3 + "\nshort\n\nend")
    al = build_alignment(doc)
    for page, pa in zip(doc.pages, al.pages):
        expect = brute_alignment(page, 32)
        got = {k: {i for a, b in spans for i in range(a, b)} for k, spans in pa.cells.items()}
        assert got == expect
        covered = set().union(*got.values())
        assert covered == set(range(page.start, page.end))


def test_raster_shape_and_range():
    cfg = RenderConfig()
    doc = layout_document(LOREM, cfg)
    r = rasterize_page(doc.pages[0], cfg)
    assert r.shape == (doc.pages[0].height_px, doc.pages[0].width_px)
    assert r.min() >= 0 and r.max() <= 1 and r.max() > 0
