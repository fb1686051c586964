"""Deterministic text layout on the encoder patch grid.

Text is wrapped into a single column, paginated, and every page is snapped
up to a multiple of the visual token cell (raw patch size times the spatial
merge factor). Glyph geometry comes from a bundled advance-width table and
ink coverage from the same file; no font engine is involved.
"""
from __future__ import annotations

import json
import math
import unicodedata
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from pathlib import Path

import numpy as np

from . import kernels
from ._pykernels import GLYPH, NEWLINE, SPACE, ZERO_WIDTH
from .errors import ConfigError

PX_PER_PT = 96.0 / 72.0
FALLBACK_ADVANCE = 500.0  # 1/1000 em
FALLBACK_INK = 0.15
TAB_SPACES = 4


@dataclass(frozen=True)
class GlyphMetrics:
    """Per-codepoint advance widths (1/1000 em) and ink coverage fractions."""

    advance: dict
    ink: dict
    version: str = "v1"
    fallback_advance: float = FALLBACK_ADVANCE
    fallback_ink: float = FALLBACK_INK

    @classmethod
    def from_file(cls, path, version=None):
        advance, ink = {}, {}
        text = Path(path).read_text(encoding="utf-8")
        for lineno, raw in enumerate(text.splitlines(), 1):
            raw = raw.strip()
            if not raw or raw.startswith("#") or raw.startswith("codepoint"):
                continue
            parts = raw.split("\t")
            if len(parts) != 3:
                raise ConfigError(f"{path}:{lineno}: expected 3 tab-separated columns")
            cp, adv, cov = int(parts[0]), float(parts[1]), float(parts[2])
            if adv < 0 or not 0.0 <= cov <= 1.0:
                raise ConfigError(f"{path}:{lineno}: advance must be >= 0 and ink in [0, 1]")
            advance[cp] = adv
            ink[cp] = cov
        return cls(advance=advance, ink=ink, version=version or Path(path).stem)

    def max_advance(self):
        return max([self.fallback_advance, *self.advance.values()])

    def encode(self, text):
        """Return ``(advances, kinds, inks)`` arrays for ``text`` (advances in 1/1000 em)."""
        n = len(text)
        adv = np.empty(n, dtype=np.float64)
        kinds = np.empty(n, dtype=np.int8)
        inks = np.empty(n, dtype=np.float64)
        space_adv = self.advance.get(32, self.fallback_advance)
        for i, ch in enumerate(text):
            kind = char_kind(ch)
            kinds[i] = kind
            if kind == NEWLINE or kind == ZERO_WIDTH:
                adv[i] = 0.0
                inks[i] = 0.0
            elif ch == "\t":
                adv[i] = TAB_SPACES * space_adv
                inks[i] = 0.0
            elif kind == SPACE:
                adv[i] = self.advance.get(ord(ch), space_adv)
                inks[i] = 0.0
            else:
                cp = ord(ch)
                adv[i] = self.advance.get(cp, self.fallback_advance)
                inks[i] = self.ink.get(cp, self.fallback_ink)
        return adv, kinds, inks


@lru_cache(maxsize=None)
def default_metrics():
    ref = resources.files("vtcroute") / "data" / "metrics_v1.tsv"
    with resources.as_file(ref) as path:
        return GlyphMetrics.from_file(path, version="v1")


def char_kind(ch):
    if ch in "\n\u2028\u2029\x0b\x0c\x85":
        return NEWLINE
    cat = unicodedata.category(ch)
    if ch == "\t" or (cat == "Zs" and ch != " "):
        return SPACE
    if cat in ("Cc", "Cf"):
        return ZERO_WIDTH
    return GLYPH


def is_control(ch):
    return unicodedata.category(ch) in ("Cc", "Cf")


@dataclass(frozen=True)
class RenderConfig:
    font_size_pt: float = 12
    line_spacing: float = 1.0
    page_cap_px: int = 928
    raw_patch_px: int = 16
    merge_factor: int = 2
    margin_px: int = 8
    metrics: GlyphMetrics = field(default_factory=default_metrics, compare=False)

    def __post_init__(self):
        if self.raw_patch_px <= 0 or self.merge_factor <= 0:
            raise ConfigError("raw_patch_px and merge_factor must be positive")
        if self.page_cap_px <= 0 or self.page_cap_px % self.token_cell_px:
            raise ConfigError(
                f"token cell {self.token_cell_px}px must divide page cap {self.page_cap_px}px"
            )
        if self.font_size_pt <= 0 or self.line_spacing <= 0 or self.margin_px < 0:
            raise ConfigError("font size and line spacing must be positive, margin non-negative")
        if self.content_width_px < self.font_px * self.metrics.max_advance() / 1000.0:
            raise ConfigError(f"font size {self.font_size_pt}pt: widest glyph does not fit the page")
        if self.content_height_px < self.line_height_px:
            raise ConfigError(f"font size {self.font_size_pt}pt: a single line does not fit the page")

    @property
    def token_cell_px(self):
        return self.raw_patch_px * self.merge_factor

    @property
    def font_px(self):
        return self.font_size_pt * PX_PER_PT

    @property
    def line_height_px(self):
        return self.font_px * self.line_spacing

    @property
    def content_width_px(self):
        return self.page_cap_px - 2 * self.margin_px

    @property
    def content_height_px(self):
        return self.page_cap_px - 2 * self.margin_px

    @property
    def lines_per_page(self):
        return max(1, int(math.floor(self.content_height_px / self.line_height_px + 1e-9)))

    def snap(self, px):
        cell = self.token_cell_px
        cells = max(1, math.ceil(px / cell - 1e-9))
        return min(self.page_cap_px, cells * cell)

    def to_dict(self):
        return {
            "font_size_pt": self.font_size_pt,
            "line_spacing": self.line_spacing,
            "page_cap_px": self.page_cap_px,
            "raw_patch_px": self.raw_patch_px,
            "merge_factor": self.merge_factor,
            "margin_px": self.margin_px,
            "metrics_version": self.metrics.version,
        }


@dataclass(frozen=True)
class Line:
    start: int
    end: int
    top: float
    bottom: float


@dataclass(frozen=True, eq=False)
class RenderedPage:
    index: int
    width_px: int
    height_px: int
    grid_w: int
    grid_h: int
    start: int
    end: int
    text: str
    lines: tuple
    x0: np.ndarray
    x1: np.ndarray
    line_of: np.ndarray

    def char_boxes(self):
        """Absolute page-pixel boxes ``(x0, x1, y0, y1)`` of every character on the page."""
        tops = np.array([ln.top for ln in self.lines], dtype=np.float64)
        bottoms = np.array([ln.bottom for ln in self.lines], dtype=np.float64)
        return self.x0, self.x1, tops[self.line_of], bottoms[self.line_of]

    def to_dict(self):
        return {
            "index": self.index,
            "width_px": self.width_px,
            "height_px": self.height_px,
            "grid_w": self.grid_w,
            "grid_h": self.grid_h,
            "span": [self.start, self.end],
            "lines": [[ln.start, ln.end, ln.top, ln.bottom] for ln in self.lines],
        }


@dataclass(frozen=True, eq=False)
class RenderedDocument:
    pages: tuple
    visual_token_count: int
    source_len: int
    text: str = field(repr=False)
    config: RenderConfig = field(repr=False)

    @property
    def m(self):
        return self.visual_token_count

    def to_dict(self):
        return {
            "source_len": self.source_len,
            "visual_token_count": self.visual_token_count,
            "pages": [p.to_dict() for p in self.pages],
        }

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)


def layout_document(text: str, cfg: RenderConfig | None = None) -> RenderedDocument:
    """Wrap, paginate and grid-snap ``text``."""
    cfg = cfg or RenderConfig()
    if not text or all(is_control(ch) for ch in text):
        return RenderedDocument((), 0, len(text), text, cfg)

    adv_em, kinds, _ = cfg.metrics.encode(text)
    adv_px = adv_em * (cfg.font_px / 1000.0)
    x0, x1, line = kernels.break_lines(adv_px, kinds, cfg.content_width_px)

    n_lines = int(line[-1]) + 1
    idx = np.arange(n_lines)
    line_start = np.searchsorted(line, idx, side="left")
    line_end = np.searchsorted(line, idx, side="right")

    margin = cfg.margin_px
    lh = cfg.line_height_px
    per_page = cfg.lines_per_page
    pages = []
    for p, first in enumerate(range(0, n_lines, per_page)):
        last = min(first + per_page, n_lines)
        c0, c1 = int(line_start[first]), int(line_end[last - 1])
        lines = tuple(
            Line(int(line_start[k]), int(line_end[k]), margin + (k - first) * lh, margin + (k - first + 1) * lh)
            for k in range(first, last)
        )
        width = cfg.snap(2 * margin + float(x1[c0:c1].max()))
        height = cfg.snap(2 * margin + (last - first) * lh)
        cell = cfg.token_cell_px
        pages.append(
            RenderedPage(
                index=p,
                width_px=width,
                height_px=height,
                grid_w=width // cell,
                grid_h=height // cell,
                start=c0,
                end=c1,
                text=text[c0:c1],
                lines=lines,
                x0=x0[c0:c1] + margin,
                x1=x1[c0:c1] + margin,
                line_of=(line[c0:c1] - first).astype(np.int64),
            )
        )
    m = sum(pg.grid_w * pg.grid_h for pg in pages)
    return RenderedDocument(tuple(pages), m, len(text), text, cfg)


def count_visual_tokens(doc: RenderedDocument) -> int:
    cell = doc.config.token_cell_px
    return sum((p.width_px // cell) * (p.height_px // cell) for p in doc.pages)


@dataclass(frozen=True, eq=False)
class PageAlignment:
    """Cell attribution for one page.

    ``row_lo``/``row_hi``/``col_lo``/``col_hi`` give, per character on the page,
    the half-open range of token cells its box touches; ``cells`` maps each
    touched ``(row, col)`` to merged absolute char-offset spans.
    """

    page: int
    row_lo: np.ndarray
    row_hi: np.ndarray
    col_lo: np.ndarray
    col_hi: np.ndarray
    cells: dict


@dataclass(frozen=True, eq=False)
class AlignmentIndex:
    pages: tuple

    def spans(self, page, row, col):
        return self.pages[page].cells.get((row, col), ())


def _char_cell_ranges(x0, x1, y0, y1, cell):
    col_lo = np.floor(x0 / cell).astype(np.int64)
    col_hi = np.maximum(col_lo + 1, np.ceil(x1 / cell).astype(np.int64))
    row_lo = np.floor(y0 / cell).astype(np.int64)
    row_hi = np.maximum(row_lo + 1, np.ceil(y1 / cell).astype(np.int64))
    return row_lo, row_hi, col_lo, col_hi


def build_alignment(doc: RenderedDocument) -> AlignmentIndex:
    """Attribute every character to every token cell its box intersects."""
    cell = doc.config.token_cell_px
    out = []
    for page in doc.pages:
        row_lo, row_hi, col_lo, col_hi = _char_cell_ranges(*page.char_boxes(), cell)
        cells: dict = {}
        for i in range(page.end - page.start):
            off = page.start + i
            for r in range(row_lo[i], row_hi[i]):
                for c in range(col_lo[i], col_hi[i]):
                    spans = cells.setdefault((int(r), int(c)), [])
                    if spans and spans[-1][1] == off:
                        spans[-1][1] = off + 1
                    else:
                        spans.append([off, off + 1])
        frozen = {k: tuple((a, b) for a, b in v) for k, v in sorted(cells.items())}
        out.append(PageAlignment(page.index, row_lo, row_hi, col_lo, col_hi, frozen))
    return AlignmentIndex(tuple(out))


def page_inks(page: RenderedPage, cfg: RenderConfig) -> np.ndarray:
    return cfg.metrics.encode(page.text)[2]


def rasterize_page(page: RenderedPage, cfg: RenderConfig | None = None) -> np.ndarray:
    """Grayscale ink grid ``(height_px, width_px)`` with values in [0, 1]."""
    cfg = cfg or RenderConfig()
    x0, x1, y0, y1 = page.char_boxes()
    return kernels.rasterize(x0, x1, y0, y1, page_inks(page, cfg), page.width_px, page.height_px)
