"""Paired evaluation statistics: gaps, quantile buckets, rank correlation, joint grid, oracle matching, tau sweep."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np
from scipy.stats import rankdata

from .cost import TEXT, VISUAL

# oracle label for exact score ties: either decision counts as a match
TIE = "tie"


def paired_gap(s_text: float | None, s_vis: float | None):
    """(delta, advantage) with delta = s_text - s_vis; ``None`` when a score is missing."""
    if s_text is None or s_vis is None:
        return None
    delta = float(s_text) - float(s_vis)
    return delta, -delta


def quantile_assign(values, k: int):
    """Bucket index per value from 'lower' quantile edges; values equal to an edge go to the lower bucket."""
    values = np.asarray(values, dtype=np.float64)
    if k < 2:
        raise ValueError("need k >= 2 buckets")
    if values.size < k:
        raise ValueError(f"need at least {k} values for {k} buckets, got {values.size}")
    # 'lower' quantile edges with exact integer indexing: sorted[floor((n - 1) * j / k)]
    ordered = np.sort(values)
    n = values.size
    edges = ordered[[((n - 1) * j) // k for j in range(1, k)]]
    return np.searchsorted(edges, values, side="left"), edges


@dataclass(frozen=True)
class Bucket:
    index: int
    lo: float | None
    hi: float | None
    n: int
    mean_a: float | None
    win_rate: float | None


@dataclass(frozen=True)
class BucketResult:
    buckets: tuple
    edges: tuple
    degenerate: bool


def quantile_buckets(c_values, advantages, k: int = 4) -> BucketResult:
    c = np.asarray(c_values, dtype=np.float64)
    a = np.asarray(advantages, dtype=np.float64)
    if c.shape != a.shape:
        raise ValueError("c_values and advantages differ in length")
    idx, edges = quantile_assign(c, k)
    out = []
    for b in range(k):
        sel = idx == b
        n = int(sel.sum())
        if n:
            out.append(Bucket(b, float(c[sel].min()), float(c[sel].max()), n, float(a[sel].mean()), float((a[sel] > 0).mean())))
        else:
            out.append(Bucket(b, None, None, 0, None, None))
    return BucketResult(tuple(out), tuple(float(e) for e in edges), any(b.n == 0 for b in out))


def spearman(xs, ys) -> float:
    """Spearman rho with average ranks for ties; NaN when either series is constant."""
    x = np.asarray(xs, dtype=np.float64)
    y = np.asarray(ys, dtype=np.float64)
    if x.shape != y.shape:
        raise ValueError("spearman: length mismatch")
    if x.size < 2:
        raise ValueError("spearman needs at least two pairs")
    rx = rankdata(x) - (x.size + 1) / 2
    ry = rankdata(y) - (y.size + 1) / 2
    denom = math.sqrt(float((rx * rx).sum()) * float((ry * ry).sum()))
    if denom == 0:
        return math.nan
    return float((rx * ry).sum()) / denom


@dataclass(frozen=True)
class GridCell:
    row: int
    col: int
    n: int
    mean_a: float | None


@dataclass(frozen=True)
class JointGrid:
    cells: tuple
    row_edges: tuple
    col_edges: tuple
    degenerate: bool

    def mean_matrix(self):
        m = np.full((3, 3), np.nan)
        for cell in self.cells:
            if cell.mean_a is not None:
                m[cell.row, cell.col] = cell.mean_a
        return m

    def count_matrix(self):
        m = np.zeros((3, 3), dtype=np.int64)
        for cell in self.cells:
            m[cell.row, cell.col] = cell.n
        return m


def joint_grid(vcr_values, c_values, advantages) -> JointGrid:
    """3x3 mean advantage over VCR tertiles (rows) and cost tertiles (columns)."""
    v = np.asarray(vcr_values, dtype=np.float64)
    c = np.asarray(c_values, dtype=np.float64)
    a = np.asarray(advantages, dtype=np.float64)
    if not v.shape == c.shape == a.shape:
        raise ValueError("joint_grid inputs differ in length")
    if v.size < 9:
        raise ValueError("joint_grid needs at least 9 samples")
    ri, re = quantile_assign(v, 3)
    ci, ce = quantile_assign(c, 3)
    cells = []
    for r in range(3):
        for col in range(3):
            sel = (ri == r) & (ci == col)
            n = int(sel.sum())
            cells.append(GridCell(r, col, n, float(a[sel].mean()) if n else None))
    degenerate = any(cell.n == 0 for cell in cells)
    return JointGrid(tuple(cells), tuple(map(float, re)), tuple(map(float, ce)), degenerate)


def oracle_label(s_text: float, s_vis: float, s_fov: float | None = None) -> str:
    best_visual = s_vis if s_fov is None else max(s_vis, s_fov)
    if best_visual > s_text:
        return VISUAL
    if best_visual < s_text:
        return TEXT
    return TIE


@dataclass(frozen=True)
class OracleResult:
    matches: int
    total: int
    per_dataset: dict

    @property
    def accuracy(self):
        return self.matches / self.total if self.total else math.nan


def oracle_accuracy(decisions: Mapping[str, str], scores: Mapping[str, Sequence]) -> OracleResult:
    """``scores[ds]`` is (s_text, s_vis) or (s_text, s_vis, s_fov)."""
    per = {}
    for ds in sorted(decisions):
        if ds not in scores:
            continue
        label = oracle_label(*scores[ds])
        per[ds] = {"decision": decisions[ds], "oracle": label, "match": label == TIE or label == decisions[ds]}
    return OracleResult(sum(r["match"] for r in per.values()), len(per), per)


def tau_grid(lo: float = 0.90, hi: float = 1.40, step: float = 0.01):
    n = int(round((hi - lo) / step))
    return [round(lo + i * step, 10) for i in range(n + 1)]


@dataclass(frozen=True)
class SweepResult:
    taus: tuple
    accuracy: tuple
    plateaus: tuple  # (tau_lo, tau_hi, accuracy) maximal runs of constant accuracy

    def best(self):
        top = max(self.accuracy)
        return [p for p in self.plateaus if p[2] == top]


def tau_sweep(te_values, labels, lo: float = 0.90, hi: float = 1.40, step: float = 0.01) -> SweepResult:
    """Routing accuracy against oracle labels at every tau of the grid (visual iff TE >= tau)."""
    te = np.asarray(te_values, dtype=np.float64)
    labels = list(labels)
    if te.size != len(labels):
        raise ValueError("tau_sweep: TE and labels differ in length")
    taus = tau_grid(lo, hi, step)
    acc = []
    for tau in taus:
        hits = sum(
            1 for t, lab in zip(te, labels) if lab == TIE or (lab == VISUAL) == (t >= tau)
        )
        acc.append(hits / len(labels) if labels else math.nan)
    plateaus = []
    start = 0
    for i in range(1, len(taus) + 1):
        if i == len(taus) or acc[i] != acc[start]:
            plateaus.append((taus[start], taus[i - 1], acc[start]))
            start = i
    return SweepResult(tuple(taus), tuple(acc), tuple(plateaus))


@dataclass(frozen=True)
class TriggerStat:
    dataset: str
    triggered: int
    total: int
    rate: float
    delta_fov: float | None


def trigger_stats(plans: Mapping[str, Sequence], delta_fov: Mapping[str, float] | None = None) -> dict:
    """Per-dataset trigger rate; datasets that never trigger report delta_fov = 0.0 exactly."""
    delta_fov = delta_fov or {}
    out = {}
    for ds in sorted(plans):
        flags = [bool(getattr(p, "triggered", p)) for p in plans[ds]]
        total = len(flags)
        hit = sum(flags)
        rate = hit / total if total else 0.0
        d = 0.0 if hit == 0 else delta_fov.get(ds)
        out[ds] = TriggerStat(ds, hit, total, rate, d)
    return out
