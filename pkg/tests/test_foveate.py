import math
import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from vtcroute.cost import PRESETS, CostParams
from vtcroute.errors import ConfigError
from vtcroute.features import relevance_distribution, bm25_scores, segment_text
from vtcroute.foveate import (
    FovConfig,
    PageCostGrid,
    PatchCostMap,
    foveation_trigger,
    hot_region_present,
    patch_cost_map,
    post_foveation_te,
    select_regions,
    to_pgm,
    to_svg,
)
from vtcroute.render import build_alignment, layout_document

P4 = PRESETS["4b"]


def grid_map(c, page=0):
    c = np.asarray(c, dtype=float)
    z = np.zeros_like(c)
    return PatchCostMap((PageCostGrid(page, z, z, z, c),))


def zero_provider(page, cfg):
    return np.zeros((page.grid_h, page.grid_w))


def test_fov_config_validation():
    FovConfig()
    with pytest.raises(ConfigError):
        FovConfig(budget_fraction=0)
    with pytest.raises(ConfigError):
        FovConfig(budget_fraction=1.5)
    with pytest.raises(ConfigError):
        FovConfig(hot_ratio=0)


def test_blank_page_map_is_zero():
    doc = layout_document("   \n   ")
    cmap = patch_cost_map(doc, build_alignment(doc), None, P4)
    for g in cmap.pages:
        assert (g.W == 0).all() and (g.C == 0).all()
    assert not hot_region_present(cmap)


def test_empty_doc_gives_empty_map():
    doc = layout_document("")
    cmap = patch_cost_map(doc, build_alignment(doc), "x", P4)
    assert cmap.pages == () and cmap.mean == 0 and cmap.max == 0


def test_cell_cost_arithmetic():
    doc = layout_document("abc")
    al = build_alignment(doc)
    cmap = patch_cost_map(doc, al, None, P4, provider=lambda page, cfg: np.ones((page.grid_h, page.grid_w)))
    g = cmap.pages[0]
    assert np.allclose(g.C, P4.alpha * g.W + P4.beta * g.L * (1 - g.TRR), atol=1e-15)
    assert P4.alpha * 1 + P4.beta * 0.2 * (1 - 0) == pytest.approx(0.3384, abs=1e-12)


def test_single_segment_relevance_on_one_line():
    text = "zebra stripes here"
    doc = layout_document(text)
    cmap = patch_cost_map(doc, build_alignment(doc), "zebra", P4)
    g = cmap.pages[0]
    assert g.L.sum() == pytest.approx(1.0, abs=1e-9)
    rows = np.flatnonzero(g.L.sum(axis=1) > 0)
    line = doc.pages[0].lines[0]
    assert set(rows) <= set(range(int(line.top // 32), int(math.ceil(line.bottom / 32))))


def brute_lq(doc, question):
    """Per-cell L_q from scratch: segment relevance over its visible chars, then per char over touched cells."""
    segs = segment_text(doc.text)
    p = relevance_distribution(bm25_scores(question, segs)) if question else None
    if p is None:
        worded = [1.0 if s.tokens else 0.0 for s in segs]
        p = [w / sum(worded) for w in worded]
    char_mass = {i: 0.0 for i in range(len(doc.text))}
    for s, share in zip(segs, p):
        visible = [i for i in range(s.start, s.end) if not doc.text[i].isspace()]
        for i in visible:
            char_mass[i] = share / len(visible)
    out = []
    for page in doc.pages:
        lq = np.zeros((page.grid_h, page.grid_w))
        x0, x1, y0, y1 = page.char_boxes()
        for i in range(page.end - page.start):
            cols = range(int(x0[i] // 32), max(int(x0[i] // 32) + 1, math.ceil(x1[i] / 32)))
            rows = range(int(y0[i] // 32), max(int(y0[i] // 32) + 1, math.ceil(y1[i] / 32)))
            cells = [(r, c) for r in rows for c in cols]
            for r, c in cells:
                lq[r, c] += char_mass[page.start + i] / len(cells)
        out.append(lq)
    return out


def test_lq_matches_brute_force_and_conserves_mass():
    rng = random.Random(0)
    words = ["alpha", "beta", "gamma", "delta", "needle"]
    text = " ".join(rng.choice(words) for _ in range(2500))
    doc = layout_document(text)
    assert len(doc.pages) > 1
    cmap = patch_cost_map(doc, build_alignment(doc), "needle", P4, provider=zero_provider)
    total = 0.0
    for g, expect in zip(cmap.pages, brute_lq(doc, "needle")):
        assert np.allclose(g.L, expect, atol=1e-12)
        total += g.L.sum()
    assert total == pytest.approx(1.0, abs=1e-9)


def test_small_cells_inherit_line_trr():
    doc = layout_document("ab " * 10)
    cmap = patch_cost_map(doc, build_alignment(doc), None, P4)
    g = cmap.pages[0]
    assert ((g.TRR >= 0) & (g.TRR <= 1)).all()
    assert (g.C >= 0).all()


def test_hot_region_examples():
    assert not hot_region_present(grid_map(np.ones((4, 4))))
    c = np.ones(100)
    c[0] = 10
    assert hot_region_present(grid_map(c.reshape(10, 10)))
    assert not hot_region_present(grid_map(np.zeros((3, 3))))


def test_trigger_examples():
    assert foveation_trigger(0.2, 0.9, 20, 100)
    assert not foveation_trigger(0.0, 0.9, 4, 100)
    assert not foveation_trigger(0.2, 1.0, 20, 100)  # equality is not enough
    assert not foveation_trigger(0.2, 0.0, 4, 100)
    assert not foveation_trigger(0.2, 0.9, 4, 0)


def test_post_te_examples():
    assert post_foveation_te(0.9, 0.0, 1000, 400, 0) == pytest.approx(0.9 * 1000 / 400)
    assert post_foveation_te(0.9, 0.2, 1000, 400, 36) == pytest.approx(1.1 * 1000 / 436, abs=1e-12)
    with pytest.raises(ValueError):
        post_foveation_te(0.9, 0.1, 10, 0, 0)


def hot_grid(shape=(20, 20), seed_cell=(10, 10), total=0.4):
    c = np.full(shape, 1e-4)
    r, k = seed_cell
    c[r - 1 : r + 2, k - 1 : k + 2] = total / 9
    return c


def test_single_hot_cell_plan():
    c = hot_grid()
    c[10, 10] += 1e-3  # make the centre the top seed
    plan = select_regions(grid_map(c), FovConfig(), isr=0.9, n_v=400, n_t=1000)
    assert plan.triggered and len(plan.regions) == 1
    r = plan.regions[0]
    assert r.seed == (10, 10) and len(r.cells) == 9 and r.n_c == 36 and plan.n_c == 36
    assert plan.sum_dc == pytest.approx(0.4 + 1e-3, abs=1e-12)
    assert plan.te_fov == pytest.approx(post_foveation_te(0.9, plan.sum_dc, 1000, 400, 36))


def test_diffuse_map_skips():
    plan = select_regions(grid_map(np.ones((10, 10))), FovConfig(), isr=0.9, n_v=400)
    assert not plan.triggered and plan.regions == [] and plan.reason == "no hot region"


def test_budget_too_small():
    plan = select_regions(grid_map(hot_grid()), FovConfig(), isr=0.9, n_v=100)
    assert not plan.triggered and plan.regions == [] and plan.n_c == 0


def test_nonpositive_isr_disables():
    plan = select_regions(grid_map(hot_grid()), FovConfig(), isr=0.0, n_v=400)
    assert not plan.triggered and "ISR" in plan.reason


def test_tie_break_order():
    c = np.full((12, 12), 1e-4)
    c[2, 8] = c[8, 2] = c[2, 2] = 1.0
    plan = select_regions(grid_map(c), FovConfig(), isr=0.9, n_v=400)
    assert [r.seed for r in plan.regions] == [(2, 2)]
    c[2, 2] = 1e-4
    plan = select_regions(grid_map(c), FovConfig(), isr=0.9, n_v=400)
    assert [r.seed for r in plan.regions] == [(2, 8)]
    two_pages = PatchCostMap((grid_map(c, page=0).pages[0], grid_map(c.T, page=1).pages[0]))
    assert select_regions(two_pages, FovConfig(), isr=0.9, n_v=800).regions[0].page == 0


def test_greedy_accumulates_until_trigger():
    c = np.full((20, 20), 0.0)
    c[2:5, 11:14] = 0.19
    c[3, 3], c[3, 12] = 0.3, 0.2
    # each region adds 36 tokens; with n_v = 1000 the trigger needs sum_dc/isr > 0.036 * k:
    # 0.3/10 fails after the first region, (0.3 + 0.2 + 8 * 0.19)/10 passes after the second
    plan = select_regions(grid_map(c), FovConfig(), isr=10.0, n_v=1000)
    assert [r.seed for r in plan.regions] == [(3, 3), (3, 12)]
    assert plan.triggered and plan.n_c == 72
    assert plan.sum_dc == pytest.approx(2.02)


def plan_is_legal(plan, cfg, n_v):
    assert plan.n_c <= math.floor(cfg.budget_fraction * n_v)
    assert plan.n_c == sum(r.n_c for r in plan.regions)
    seen = set()
    for i, a in enumerate(plan.regions):
        assert a.delta_c >= 0 and a.n_c > 0
        for b in plan.regions[i + 1 :]:
            if a.page == b.page:
                assert max(abs(a.seed[0] - b.seed[0]), abs(a.seed[1] - b.seed[1])) > cfg.nms_radius_cells
        cells = {(a.page, *cell) for cell in a.cells}
        assert not cells & seen
        seen |= cells


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10_000), st.floats(0.05, 2.0), st.integers(50, 3000))
def test_random_maps_yield_legal_plans(seed, isr, n_v):
    rng = np.random.default_rng(seed)
    c = rng.exponential(0.01, size=(rng.integers(3, 15), rng.integers(3, 15)))
    c[rng.integers(0, c.shape[0]), rng.integers(0, c.shape[1])] += rng.uniform(0, 1)
    cfg = FovConfig()
    plan = select_regions(grid_map(c), cfg, isr, n_v)
    plan_is_legal(plan, cfg, n_v)
    assert plan.triggered == (bool(plan.regions) and foveation_trigger(plan.sum_dc, isr, plan.n_c, n_v))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000), st.floats(1.0, 4.0), st.floats(1.0, 4.0))
def test_lowering_hot_ratio_keeps_trigger(seed, r1, r2):
    lo, hi = sorted((r1, r2))
    rng = np.random.default_rng(seed)
    c = rng.exponential(0.01, size=(10, 10))
    c[3, 3] += rng.uniform(0, 0.5)
    m = grid_map(c)
    if select_regions(m, FovConfig(hot_ratio=hi), 0.9, 800).triggered:
        assert select_regions(m, FovConfig(hot_ratio=lo), 0.9, 800).triggered


def test_determinism_and_json():
    text = "the code is 7781 " * 200
    doc = layout_document(text)
    a = select_regions(patch_cost_map(doc, build_alignment(doc), "code", P4), FovConfig(), 0.8, doc.m, 900)
    b = select_regions(patch_cost_map(doc, build_alignment(doc), "code", P4), FovConfig(), 0.8, doc.m, 900)
    assert a.to_json() == b.to_json()


def test_exports():
    c = np.arange(6, dtype=float).reshape(2, 3)
    pgm = to_pgm(grid_map(c).pages[0])
    assert pgm.startswith(b"P5\n3 2\n255\n")
    assert list(pgm[-6:]) == [0, 51, 102, 153, 204, 255]
    plan = select_regions(grid_map(hot_grid()), FovConfig(), 0.9, 400)
    svg = to_svg(grid_map(hot_grid()).pages[0], 32, plan)
    assert svg.startswith("<svg") and svg.count('stroke="blue"') == len(plan.regions) == 1
