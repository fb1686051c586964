"""Dataset ingestion, the render -> features -> cost -> foveate pipeline, and report emission."""
from __future__ import annotations

import csv
import json
import logging
import math
import os
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np

from . import stats
from .cost import TEXT, VISUAL, CostParams, route
from .errors import DataValidationError
from .features import SegmentPolicy, TaskSpec, Tokenizer, extract_features
from .foveate import FovConfig, hot_region_present, patch_cost_map, select_regions, to_pgm, to_svg
from .render import RenderConfig, build_alignment, layout_document

log = logging.getLogger(__name__)

OUT_DIR_ENV = "VTCROUTE_OUT_DIR"
DEFAULT_SCALE = 100.0
SCORE_KEYS = ("text", "vis", "fov")


@dataclass(frozen=True)
class SampleRecord:
    id: str
    dataset: str
    text: str
    task: TaskSpec
    s_text: float | None = None
    s_vis: float | None = None
    s_fov: float | None = None
    scale: float = DEFAULT_SCALE
    out_of_scale: bool = False


def _parse_record(obj, lineno):
    def fail(msg):
        raise DataValidationError(f"line {lineno}: {msg}")

    if not isinstance(obj, dict):
        fail("record must be a JSON object")
    for key in ("id", "dataset", "text", "task"):
        if key not in obj:
            fail(f"missing required field {key!r}")
    if not isinstance(obj["text"], str):
        fail("field 'text' must be a string")
    task_obj = obj["task"]
    if not isinstance(task_obj, dict) or "answer_format" not in task_obj:
        fail("field 'task' needs an 'answer_format'")
    try:
        task = TaskSpec(task_obj["answer_format"], task_obj.get("w_override"), obj.get("question"))
    except Exception as exc:
        fail(f"invalid task: {exc}")
    scale = float(obj.get("scale", DEFAULT_SCALE))
    scores = obj.get("scores") or {}
    values = {}
    flagged = False
    for key in SCORE_KEYS:
        v = scores.get(key)
        if v is None:
            values[key] = None
            continue
        if not isinstance(v, (int, float)) or isinstance(v, bool) or not math.isfinite(v):
            fail(f"score {key!r} must be a finite number")
        if not 0 <= v <= scale:
            log.warning("line %d: score %s=%s outside [0, %s]; kept and flagged", lineno, key, v, scale)
            flagged = True
        values[key] = float(v)
    return SampleRecord(
        id=str(obj["id"]),
        dataset=str(obj["dataset"]),
        text=obj["text"],
        task=task,
        s_text=values["text"],
        s_vis=values["vis"],
        s_fov=values["fov"],
        scale=scale,
        out_of_scale=flagged,
    )


def parse_samples(lines: Iterable[str]) -> list[SampleRecord]:
    records, seen = [], {}
    for lineno, line in enumerate(lines, 1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise DataValidationError(f"line {lineno}: malformed JSON ({exc.msg})") from None
        rec = _parse_record(obj, lineno)
        if rec.id in seen:
            raise DataValidationError(f"line {lineno}: duplicate id {rec.id!r} (first seen on line {seen[rec.id]})")
        seen[rec.id] = lineno
        records.append(rec)
    return records


def load_samples(path) -> list[SampleRecord]:
    with open(path, encoding="utf-8") as fh:
        return parse_samples(fh)


def resolve_out_dir(out=None) -> Path:
    return Path(out or os.environ.get(OUT_DIR_ENV) or ".")


@dataclass
class EvalReport:
    rows: list
    datasets: dict
    aggregates: dict
    config: dict
    timestamp: str = ""
    heatmaps: dict = field(default_factory=dict, repr=False)

    def to_dict(self):
        return {
            "config": self.config,
            "rows": self.rows,
            "datasets": self.datasets,
            "aggregates": self.aggregates,
            "generated_at": self.timestamp,
        }


def _clean(obj):
    """JSON-safe copy: NaN/inf become null, numpy scalars become Python numbers."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.generic):
        obj = obj.item()
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    return obj


@dataclass(frozen=True)
class MacroFeatures:
    W: float
    L: float
    TRR: float
    VCR: float | None


def _mean(xs):
    xs = [x for x in xs if x is not None]
    return float(np.mean(xs)) if xs else None


def evaluate(
    samples: list[SampleRecord],
    params: CostParams,
    render_cfg: RenderConfig | None = None,
    fov_cfg: FovConfig | None = None,
    w_table: Mapping | None = None,
    policy: SegmentPolicy | None = None,
    tokenizer: Tokenizer | None = None,
    per_sample: bool = False,
    n_buckets: int = 4,
    sweep: tuple = (0.90, 1.40, 0.01),
    keep_maps: bool = False,
) -> EvalReport:
    """Run every sample through the pipeline and aggregate paired statistics.

    Routing is per dataset from macro-averaged features unless ``per_sample``.
    """
    render_cfg = render_cfg or RenderConfig()
    fov_cfg = fov_cfg or FovConfig()
    rows, heatmaps = [], {}
    for rec in sorted(samples, key=lambda r: r.id):
        doc = layout_document(rec.text, render_cfg)
        fv = extract_features(rec.text, rec.task, doc, w_table, policy, tokenizer)
        dec = route(fv, params)
        cmap = patch_cost_map(doc, build_alignment(doc), rec.task.query, params)
        plan = select_regions(cmap, fov_cfg, dec.isr, doc.m, n_t=fv.n)
        if keep_maps:
            heatmaps[rec.id] = (cmap, plan)
        gap = stats.paired_gap(rec.s_text, rec.s_vis)
        rows.append(
            {
                "id": rec.id,
                "dataset": rec.dataset,
                "W": fv.W,
                "L": fv.L,
                "TRR": fv.TRR,
                "n": fv.n,
                "m": fv.m,
                "VCR": fv.VCR,
                "C_intra": dec.breakdown.intra,
                "C_inter": dec.breakdown.inter,
                "C": dec.breakdown.total,
                "ISR": dec.isr,
                "TE": dec.te,
                "path": dec.path,
                "hot": hot_region_present(cmap, fov_cfg.hot_ratio),
                "triggered": plan.triggered,
                "n_c": plan.n_c,
                "sum_dc": plan.sum_dc,
                "TE_fov": plan.te_fov,
                "s_text": rec.s_text,
                "s_vis": rec.s_vis,
                "s_fov": rec.s_fov,
                "delta": gap[0] if gap else None,
                "A": gap[1] if gap else None,
                "flagged": rec.out_of_scale,
            }
        )
    missing = sum(1 for r in rows if r["delta"] is None)
    if missing:
        log.info("%d samples without paired scores skipped in gap statistics", missing)

    by_ds: dict = {}
    for row in rows:
        by_ds.setdefault(row["dataset"], []).append(row)

    datasets, decisions, ds_scores, plans, dfov = {}, {}, {}, {}, {}
    for ds in sorted(by_ds):
        rs = by_ds[ds]
        macro = MacroFeatures(
            W=_mean(r["W"] for r in rs),
            L=_mean(r["L"] for r in rs),
            TRR=_mean(r["TRR"] for r in rs),
            VCR=_mean(r["VCR"] for r in rs),
        )
        dec = route(macro, params)
        if per_sample:
            n_vis = sum(r["path"] == VISUAL for r in rs)
            path = VISUAL if n_vis > len(rs) - n_vis else TEXT
        else:
            path = dec.path
        decisions[ds] = path
        st, sv, sf = (_mean(r[k] for r in rs) for k in ("s_text", "s_vis", "s_fov"))
        if st is not None and sv is not None:
            ds_scores[ds] = (st, sv) if sf is None else (st, sv, sf)
        plans[ds] = [r["triggered"] for r in rs]
        fov_pairs = [r["s_fov"] - r["s_vis"] for r in rs if r["s_fov"] is not None and r["s_vis"] is not None]
        if fov_pairs:
            dfov[ds] = float(np.mean(fov_pairs))
        datasets[ds] = {
            "n_samples": len(rs),
            "W": macro.W,
            "L": macro.L,
            "TRR": macro.TRR,
            "VCR": macro.VCR,
            "C": dec.breakdown.total,
            "ISR": dec.isr,
            "TE": dec.te,
            "decision": path,
            "s_text": st,
            "s_vis": sv,
            "s_fov": sf,
        }

    trig = stats.trigger_stats(plans, dfov)
    for ds, t in trig.items():
        datasets[ds].update(trigger_rate=t.rate, delta_fov=t.delta_fov)
    oracle = stats.oracle_accuracy(decisions, ds_scores)
    for ds, info in oracle.per_dataset.items():
        datasets[ds].update(oracle=info["oracle"], match=info["match"])

    aggregates: dict = {
        "n_samples": len(rows),
        "n_paired": len(rows) - missing,
        "oracle_matches": oracle.matches,
        "oracle_total": oracle.total,
    }
    paired = [r for r in rows if r["A"] is not None]
    if len(paired) >= 2:
        aggregates["spearman_C_A"] = stats.spearman([r["C"] for r in paired], [r["A"] for r in paired])
    if len(paired) >= n_buckets:
        b = stats.quantile_buckets([r["C"] for r in paired], [r["A"] for r in paired], n_buckets)
        aggregates["buckets"] = {
            "edges": list(b.edges),
            "degenerate": b.degenerate,
            "rows": [vars(x) for x in b.buckets],
        }
    grid_rows = [r for r in paired if r["VCR"] is not None]
    if len(grid_rows) >= 9:
        g = stats.joint_grid([r["VCR"] for r in grid_rows], [r["C"] for r in grid_rows], [r["A"] for r in grid_rows])
        aggregates["joint_grid"] = {
            "mean_A": g.mean_matrix().tolist(),
            "n": g.count_matrix().tolist(),
            "degenerate": g.degenerate,
        }
    swept = [ds for ds in oracle.per_dataset if datasets[ds]["TE"] is not None]
    if swept:
        s = stats.tau_sweep(
            [datasets[ds]["TE"] for ds in swept], [oracle.per_dataset[ds]["oracle"] for ds in swept], *sweep
        )
        aggregates["tau_sweep"] = {
            "tau": list(s.taus),
            "accuracy": list(s.accuracy),
            "plateaus": [list(p) for p in s.plateaus],
        }

    config = {
        "params": params.to_dict(),
        "render": render_cfg.to_dict(),
        "fov": vars(fov_cfg).copy(),
        "per_sample": per_sample,
        "n_buckets": n_buckets,
        "sweep": list(sweep),
    }
    return EvalReport(
        rows=rows,
        datasets=datasets,
        aggregates=aggregates,
        config=config,
        timestamp=datetime.now(timezone.utc).isoformat(timespec="seconds"),
        heatmaps=heatmaps,
    )


CSV_FIELDS = (
    "id", "dataset", "W", "L", "TRR", "n", "m", "VCR", "C_intra", "C_inter", "C", "ISR", "TE", "path",
    "hot", "triggered", "n_c", "sum_dc", "TE_fov", "s_text", "s_vis", "s_fov", "delta", "A", "flagged",
)


def report_json(report: EvalReport) -> str:
    return json.dumps(_clean(report.to_dict()), sort_keys=True, indent=2, allow_nan=False)


def emit_report(report: EvalReport, out_dir=None, formats=("json", "csv")) -> list[Path]:
    """Write report.json / rows.csv (and per-sample heatmaps for pgm/svg) into ``out_dir``."""
    out = resolve_out_dir(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    if "json" in formats:
        p = out / "report.json"
        p.write_text(report_json(report) + "\n", encoding="utf-8")
        written.append(p)
    if "csv" in formats:
        p = out / "rows.csv"
        with p.open("w", newline="", encoding="utf-8") as fh:
            w = csv.DictWriter(fh, fieldnames=CSV_FIELDS, lineterminator="\n")
            w.writeheader()
            for row in report.rows:
                w.writerow({k: ("" if row[k] is None else row[k]) for k in CSV_FIELDS})
        written.append(p)
    cell_px = report.config["render"]["raw_patch_px"] * report.config["render"]["merge_factor"]
    for sid, (cmap, plan) in sorted(report.heatmaps.items()):
        for grid in cmap.pages:
            stem = f"{sid}_p{grid.page}"
            if "pgm" in formats:
                p = out / f"{stem}.pgm"
                p.write_bytes(to_pgm(grid))
                written.append(p)
            if "svg" in formats:
                p = out / f"{stem}.svg"
                p.write_text(to_svg(grid, cell_px, plan), encoding="utf-8")
                written.append(p)
    return written
