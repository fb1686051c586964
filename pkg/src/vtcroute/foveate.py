"""Patch-level cost maps and greedy foveation planning.

The global cost is spatialised per visual token cell with the same
(alpha, beta) weights, a hot-region gate decides whether refinement is
considered at all, and regions are then added greedily (highest cell cost
first, non-maximum suppression on seeds) until the foveation trigger fires
or the extra-token budget runs out.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np

from . import kernels
from .cost import CostParams
from .errors import ConfigError
from .features import bm25_scores, redundancy, relevance_distribution, segment_text
from .render import AlignmentIndex, RenderConfig, RenderedDocument, RenderedPage, rasterize_page

SMALL_CELL_CHARS = 16


@dataclass(frozen=True)
class FovConfig:
    hot_ratio: float = 2.5
    nms_radius_cells: int = 2
    region_side_cells: int = 3
    budget_fraction: float = 0.25
    upsample_factor: int = 2
    recovery_fraction: float = 1.0

    def __post_init__(self):
        for name in ("hot_ratio", "nms_radius_cells", "region_side_cells", "upsample_factor", "recovery_fraction"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"FovConfig.{name} must be positive")
        if not 0 < self.budget_fraction <= 1:
            raise ConfigError("FovConfig.budget_fraction must lie in (0, 1]")


@dataclass(frozen=True, eq=False)
class PageCostGrid:
    page: int
    W: np.ndarray
    L: np.ndarray
    TRR: np.ndarray
    C: np.ndarray


@dataclass(frozen=True, eq=False)
class PatchCostMap:
    pages: tuple

    @property
    def n_cells(self):
        return sum(g.C.size for g in self.pages)

    @property
    def max(self):
        return max((float(g.C.max()) for g in self.pages if g.C.size), default=0.0)

    @property
    def mean(self):
        n = self.n_cells
        return sum(float(g.C.sum()) for g in self.pages) / n if n else 0.0


def ink_variance(page: RenderedPage, cfg: RenderConfig) -> np.ndarray:
    """Default per-cell feature provider: ink variance inside each token cell, scaled by the page max."""
    raster = rasterize_page(page, cfg)
    _, var = kernels.cell_stats(raster, cfg.token_cell_px)
    top = var.max() if var.size else 0.0
    return var / top if top > 0 else np.zeros_like(var)


def _char_relevance_mass(text, question):
    """Per-character share of the segment relevance distribution.

    A segment's share is spread evenly over its non-whitespace characters.
    Without usable relevance scores the mass is uniform over segments that
    contain at least one word token; whitespace-only text carries no mass.
    """
    mass = np.zeros(len(text), dtype=np.float64)
    segments = segment_text(text)
    if not segments:
        return mass
    p = relevance_distribution(bm25_scores(question, segments)) if question else None
    if p is None:
        has_words = np.array([bool(s.tokens) for s in segments], dtype=np.float64)
        if not has_words.any():
            return mass
        p = has_words / has_words.sum()
    ink = np.fromiter((not ch.isspace() for ch in text), dtype=bool, count=len(text))
    for seg, share in zip(segments, p):
        if share <= 0:
            continue
        idx = np.flatnonzero(ink[seg.start : seg.end]) + seg.start
        mass[idx] = share / idx.size
    return mass


def patch_cost_map(
    doc: RenderedDocument,
    alignment: AlignmentIndex,
    question: str | None,
    params: CostParams,
    provider: Callable[[RenderedPage, RenderConfig], np.ndarray] = ink_variance,
) -> PatchCostMap:
    cfg = doc.config
    mass = _char_relevance_mass(doc.text, question)
    grids = []
    for page, al in zip(doc.pages, alignment.pages):
        shape = (page.grid_h, page.grid_w)
        w = np.clip(np.asarray(provider(page, cfg), dtype=np.float64), 0.0, 1.0)
        if w.shape != shape:
            raise ConfigError(f"feature provider returned {w.shape}, expected {shape}")

        # spread each character's mass evenly over the cells its box touches
        local = mass[page.start : page.end]
        k = (al.row_hi - al.row_lo) * (al.col_hi - al.col_lo)
        share = local / k
        lq = np.zeros(shape, dtype=np.float64)
        for dr in range(int((al.row_hi - al.row_lo).max(initial=0))):
            for dc in range(int((al.col_hi - al.col_lo).max(initial=0))):
                sel = (al.row_lo + dr < al.row_hi) & (al.col_lo + dc < al.col_hi)
                np.add.at(lq, (al.row_lo[sel] + dr, al.col_lo[sel] + dc), share[sel])

        line_trr = np.array(
            [redundancy(doc.text[ln.start : ln.end]) for ln in page.lines], dtype=np.float64
        )
        trr = np.zeros(shape, dtype=np.float64)
        for (r, c), spans in al.cells.items():
            cell_text = "".join(doc.text[a:b] for a, b in spans)
            if len(cell_text) >= SMALL_CELL_CHARS:
                trr[r, c] = redundancy(cell_text)
            else:
                idx = np.concatenate([np.arange(a, b) for a, b in spans]) - page.start
                trr[r, c] = line_trr[page.line_of[idx]].mean()

        cq = params.alpha * w + params.beta * lq * (1.0 - trr)
        grids.append(PageCostGrid(page.index, w, lq, trr, cq))
    return PatchCostMap(tuple(grids))


def hot_region_present(cmap: PatchCostMap, hot_ratio: float = 2.5) -> bool:
    mean = cmap.mean
    return mean > 0 and cmap.max / mean > hot_ratio


def foveation_trigger(sum_dc: float, isr: float, n_c: int, n_v: int) -> bool:
    """Recovered fraction of surviving information must exceed the relative token overhead."""
    if isr <= 0 or n_v <= 0:
        return False
    return sum_dc / isr > n_c / n_v


def post_foveation_te(isr: float, sum_dc: float, n_t: int, n_v: int, n_c: int) -> float:
    if n_v + n_c <= 0:
        raise ValueError("post-foveation TE needs n_v + n_c > 0")
    return (isr + sum_dc) * n_t / (n_v + n_c)


@dataclass(frozen=True)
class CropRegion:
    page: int
    seed: tuple
    cells: tuple
    delta_c: float
    n_c: int


@dataclass
class FoveationPlan:
    regions: list = field(default_factory=list)
    sum_dc: float = 0.0
    n_c: int = 0
    n_v: int = 0
    triggered: bool = False
    te_base: float | None = None
    te_fov: float | None = None
    reason: str | None = None

    def to_dict(self):
        d = asdict(self)
        d["regions"] = [
            {"page": r.page, "seed": list(r.seed), "cells": [list(c) for c in r.cells], "delta_c": r.delta_c, "n_c": r.n_c}
            for r in self.regions
        ]
        return d

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)


def _region_cells(seed, side, shape):
    r0, c0 = seed
    half = side // 2
    rows = range(max(0, r0 - half), min(shape[0], r0 - half + side))
    cols = range(max(0, c0 - half), min(shape[1], c0 - half + side))
    return [(r, c) for r in rows for c in cols]


def select_regions(
    cmap: PatchCostMap, cfg: FovConfig, isr: float, n_v: int, n_t: int | None = None
) -> FoveationPlan:
    """Greedy NMS region selection under the token budget.

    Returns an empty, untriggered plan when the map has no hot region, when
    ISR <= 0, or when the budget runs out before the trigger fires.
    """
    te_base = isr * n_t / n_v if (n_t is not None and n_v > 0) else None
    skipped = FoveationPlan(n_v=n_v, te_base=te_base, te_fov=te_base)
    if isr <= 0:
        skipped.reason = "foveation disabled: ISR <= 0"
        return skipped
    if n_v <= 0:
        skipped.reason = "no visual tokens"
        return skipped
    if not hot_region_present(cmap, cfg.hot_ratio):
        skipped.reason = "no hot region"
        return skipped

    budget = math.floor(cfg.budget_fraction * n_v)
    per_cell = cfg.upsample_factor**2
    seeds = [
        (-float(g.C[r, c]), g.page, r, c)
        for g in cmap.pages
        for r in range(g.C.shape[0])
        for c in range(g.C.shape[1])
    ]
    seeds.sort()
    grids = {g.page: g for g in cmap.pages}
    accepted: list = []
    covered: set = set()
    regions, sum_dc, n_c = [], 0.0, 0
    for neg_c, page, r, c in seeds:
        if -neg_c <= 0:
            break
        if any(p == page and max(abs(r - ar), abs(c - ac)) <= cfg.nms_radius_cells for p, ar, ac in accepted):
            continue
        grid = grids[page]
        new = [cell for cell in _region_cells((r, c), cfg.region_side_cells, grid.C.shape) if (page, *cell) not in covered]
        if not new:
            continue
        cost = per_cell * len(new)
        if n_c + cost > budget:
            break
        dc = cfg.recovery_fraction * float(sum(grid.C[cell] for cell in new))
        accepted.append((page, r, c))
        covered.update((page, *cell) for cell in new)
        regions.append(CropRegion(page, (r, c), tuple(new), dc, cost))
        sum_dc += dc
        n_c += cost
        if foveation_trigger(sum_dc, isr, n_c, n_v):
            te_fov = post_foveation_te(isr, sum_dc, n_t, n_v, n_c) if n_t is not None else None
            return FoveationPlan(regions, sum_dc, n_c, n_v, True, te_base, te_fov)
    skipped.reason = "budget exhausted before trigger"
    return skipped


def to_pgm(grid: PageCostGrid) -> bytes:
    """Binary PGM (P5) of one page's cost grid, scaled to the page max."""
    c = grid.C
    top = c.max() if c.size else 0.0
    scaled = np.zeros_like(c) if top <= 0 else c / top
    pixels = np.round(scaled * 255).astype(np.uint8)
    h, w = pixels.shape
    return f"P5\n{w} {h}\n255\n".encode("ascii") + pixels.tobytes(order="C")


def to_svg(grid: PageCostGrid, cell_px: int, plan: FoveationPlan | None = None) -> str:
    """Heatmap of one page's cost grid with crop rectangles from ``plan``."""
    c = grid.C
    h, w = c.shape
    top = c.max() if c.size else 0.0
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{w * cell_px}" height="{h * cell_px}" '
        f'viewBox="0 0 {w * cell_px} {h * cell_px}">'
    ]
    for r in range(h):
        for col in range(w):
            v = 0.0 if top <= 0 else c[r, col] / top
            shade = 255 - int(round(v * 255))
            parts.append(
                f'<rect x="{col * cell_px}" y="{r * cell_px}" width="{cell_px}" height="{cell_px}" '
                f'fill="rgb(255,{shade},{shade})"/>'
            )
    for region in (plan.regions if plan else []):
        if region.page != grid.page:
            continue
        rows = [rc[0] for rc in region.cells]
        cols = [rc[1] for rc in region.cells]
        x, y = min(cols) * cell_px, min(rows) * cell_px
        parts.append(
            f'<rect x="{x}" y="{y}" width="{(max(cols) - min(cols) + 1) * cell_px}" '
            f'height="{(max(rows) - min(rows) + 1) * cell_px}" fill="none" stroke="blue" stroke-width="2"/>'
        )
    parts.append("</svg>")
    return "\n".join(parts)
