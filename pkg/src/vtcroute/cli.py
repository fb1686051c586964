"""Command-line entry point: ``vtcroute <subcommand> ...``."""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from pathlib import Path

from . import kernels
from .calibrate import run_calibration
from .calibrate.probes import export_jsonl, generate_all
from .calibrate.scorers import MockScorer, ReplayScorer
from .config import RunConfig, load_config
from .cost import route
from .errors import ConfigError, DataValidationError, VtcError
from .features import FeatureVector, TaskSpec, extract_features
from .foveate import patch_cost_map, select_regions, to_pgm, to_svg
from .harness import emit_report, evaluate, load_samples, parse_samples, resolve_out_dir
from .render import build_alignment, layout_document

log = logging.getLogger("vtcroute")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _read_text(path):
    try:
        if path == "-":
            return sys.stdin.read()
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise DataValidationError(f"cannot read {path}: {exc.strerror}") from None


def _samples(path):
    if path == "-":
        return parse_samples(sys.stdin)
    try:
        return load_samples(path)
    except OSError as exc:
        raise DataValidationError(f"cannot read {path}: {exc.strerror}") from None


def _emit(text: str | bytes, out):
    if out is None:
        if isinstance(text, bytes):
            sys.stdout.buffer.write(text)
        else:
            sys.stdout.write(text if text.endswith("\n") else text + "\n")
        return
    path = Path(out)
    if path.parent != Path("."):
        path.parent.mkdir(parents=True, exist_ok=True)
    if isinstance(text, bytes):
        path.write_bytes(text)
    else:
        path.write_text(text if text.endswith("\n") else text + "\n", encoding="utf-8")


def _dump(obj):
    return json.dumps(obj, sort_keys=True, indent=2)


def _jsonl(objs):
    return "".join(json.dumps(o, sort_keys=True) + "\n" for o in objs)


def _csv(rows, fieldnames):
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=fieldnames, lineterminator="\n")
    w.writeheader()
    for row in rows:
        w.writerow({k: ("" if row.get(k) is None else row.get(k)) for k in fieldnames})
    return buf.getvalue()


def _check_format(args, allowed):
    if args.format not in allowed:
        raise ConfigError(f"{args.command}: --format {args.format} not supported (use {', '.join(allowed)})")


def cmd_render(args, cfg: RunConfig):
    _check_format(args, ("json",))
    doc = layout_document(_read_text(args.input), cfg.render)
    summary = {
        "m": doc.m,
        "source_len": doc.source_len,
        "config": cfg.render.to_dict(),
        "pages": [
            {"index": p.index, "width_px": p.width_px, "height_px": p.height_px, "grid_w": p.grid_w,
             "grid_h": p.grid_h, "start": p.start, "end": p.end, "lines": len(p.lines)}
            for p in doc.pages
        ],
    }
    _emit(doc.to_json() if args.full else _dump(summary), args.out)


def _feature_rows(samples, cfg):
    for rec in sorted(samples, key=lambda r: r.id):
        doc = layout_document(rec.text, cfg.render)
        fv = extract_features(rec.text, rec.task, doc, cfg.w_table, cfg.segment, cfg.tokenizer)
        yield rec, fv


FEATURE_FIELDS = ("id", "dataset", "W", "L", "TRR", "n", "m", "VCR")


def cmd_features(args, cfg):
    _check_format(args, ("json", "csv"))
    rows = [{"id": r.id, "dataset": r.dataset, **fv.to_dict()} for r, fv in _feature_rows(_samples(args.input), cfg)]
    _emit(_jsonl(rows) if args.format == "json" else _csv(rows, FEATURE_FIELDS), args.out)


def _fv_from_record(obj, lineno):
    try:
        return FeatureVector(float(obj["W"]), float(obj["L"]), float(obj["TRR"]), int(obj["n"]), int(obj["m"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise DataValidationError(f"line {lineno}: bad feature record ({exc})") from None


DECISION_FIELDS = ("id", "dataset", "path", "te", "isr", "vcr_used", "cost", "variant", "reason")


def cmd_route(args, cfg):
    _check_format(args, ("json", "csv"))
    text = _read_text(args.input)
    first = next((ln for ln in text.splitlines() if ln.strip()), "")
    is_features = False
    if first:
        try:
            is_features = "W" in json.loads(first)
        except json.JSONDecodeError:
            raise DataValidationError("line 1: malformed JSON") from None
    pairs = []
    if is_features:
        for lineno, line in enumerate(text.splitlines(), 1):
            if line.strip():
                obj = json.loads(line)
                pairs.append((obj.get("id", str(lineno)), obj.get("dataset"), _fv_from_record(obj, lineno)))
    else:
        pairs = [(r.id, r.dataset, fv) for r, fv in _feature_rows(parse_samples(text.splitlines()), cfg)]
    rows = []
    for sid, ds, fv in pairs:
        d = route(fv, cfg.params)
        rows.append({"id": sid, "dataset": ds, "path": d.path, "te": d.te, "isr": d.isr, "vcr_used": d.vcr_used,
                     "cost": d.breakdown.total, "variant": d.variant, "reason": d.reason})
    _emit(_jsonl(rows) if args.format == "json" else _csv(rows, DECISION_FIELDS), args.out)


def cmd_foveate(args, cfg):
    _check_format(args, ("json", "pgm", "svg"))
    text = _read_text(args.input)
    task = TaskSpec(args.answer_format, None, args.question)
    doc = layout_document(text, cfg.render)
    fv = extract_features(text, task, doc, cfg.w_table, cfg.segment, cfg.tokenizer)
    dec = route(fv, cfg.params)
    cmap = patch_cost_map(doc, build_alignment(doc), args.question, cfg.params)
    plan = select_regions(cmap, cfg.fov, dec.isr, doc.m, n_t=fv.n)
    if args.format == "json":
        _emit(_dump({"decision": dec.to_dict(), "features": fv.to_dict(), "plan": plan.to_dict(),
                     "map": {"max": cmap.max, "mean": cmap.mean, "cells": cmap.n_cells}}), args.out)
        return
    if not cmap.pages:
        raise DataValidationError("empty document: no page to draw")
    if not 0 <= args.page < len(cmap.pages):
        raise ConfigError(f"--page {args.page} out of range (document has {len(cmap.pages)} pages)")
    grid = cmap.pages[args.page]
    _emit(to_pgm(grid) if args.format == "pgm" else to_svg(grid, cfg.render.token_cell_px, plan), args.out)


def cmd_calibrate(args, cfg):
    _check_format(args, ("json",))
    if args.export_probes:
        export_jsonl(generate_all(args.seed), args.export_probes)
    if args.replay:
        try:
            scorer = ReplayScorer.from_jsonl(args.replay)
        except OSError as exc:
            raise DataValidationError(f"cannot read {args.replay}: {exc.strerror}") from None
    else:
        scorer = MockScorer({"vlm": args.vlm_acc, "llm": args.llm_acc}, seed=args.seed)
    report = run_calibration(scorer, seed=args.seed, tau=cfg.params.tau, vcr_cap=cfg.params.vcr_cap)
    _emit(report.to_json(), args.out)


def _load_eval_samples(args, cfg):
    if args.synthetic:
        from .synthetic import build_samples

        return build_samples(cfg.params, seed=args.seed, render_cfg=cfg.render, fov_cfg=cfg.fov)
    if not args.input:
        raise ConfigError(f"{args.command}: give an input JSONL or --synthetic")
    return _samples(args.input)


def _evaluate(args, cfg, keep_maps=False):
    h = cfg.harness
    return evaluate(
        _load_eval_samples(args, cfg), cfg.params, cfg.render, cfg.fov, cfg.w_table, cfg.segment, cfg.tokenizer,
        per_sample=h.per_sample or getattr(args, "per_sample", False), n_buckets=h.buckets, sweep=h.sweep,
        keep_maps=keep_maps,
    )


def cmd_evaluate(args, cfg):
    formats = tuple(args.format.split(",")) if args.format else ("json", "csv")
    bad = set(formats) - {"json", "csv", "pgm", "svg"}
    if bad:
        raise ConfigError(f"evaluate: unsupported formats {sorted(bad)}")
    report = _evaluate(args, cfg, keep_maps=bool({"pgm", "svg"} & set(formats)))
    for path in emit_report(report, resolve_out_dir(args.out), formats):
        print(path)


def cmd_sweep(args, cfg):
    _check_format(args, ("json", "csv"))
    report = _evaluate(args, cfg)
    sweep = report.aggregates.get("tau_sweep")
    if sweep is None:
        raise DataValidationError("sweep needs datasets with paired text/visual scores")
    if args.format == "json":
        _emit(_dump(sweep), args.out)
    else:
        rows = [{"tau": t, "accuracy": a} for t, a in zip(sweep["tau"], sweep["accuracy"])]
        _emit(_csv(rows, ("tau", "accuracy")), args.out)


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON or TOML run configuration")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--preset", choices=("4b", "8b", "32b"))
    common.add_argument("--out", help="output file (directory for evaluate)")
    common.add_argument("--format", default=None, help="json, csv, pgm or svg (comma list for evaluate)")
    common.add_argument("-v", "--verbose", action="store_true")

    p = _Parser(prog="vtcroute", description="Label-free text-vs-visual routing and foveation planning.")
    p.add_argument("--backend", choices=kernels.available_backends(), help="kernel implementation")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("render", parents=[common], help="lay out text and report page/token stats")
    s.add_argument("input", help="text file or - for stdin")
    s.add_argument("--full", action="store_true", help="emit every page, line and character box")
    s.set_defaults(func=cmd_render)

    s = sub.add_parser("features", parents=[common], help="feature vectors for a sample JSONL")
    s.add_argument("input")
    s.set_defaults(func=cmd_features)

    s = sub.add_parser("route", parents=[common], help="routing decisions for samples or feature records")
    s.add_argument("input")
    s.set_defaults(func=cmd_route)

    s = sub.add_parser("foveate", parents=[common], help="patch cost map and crop plan for one text")
    s.add_argument("input")
    s.add_argument("--question", default=None)
    s.add_argument("--answer-format", default="short-span")
    s.add_argument("--page", type=int, default=0, help="page to draw for pgm/svg")
    s.set_defaults(func=cmd_foveate)

    s = sub.add_parser("calibrate", parents=[common], help="fit alpha, beta, gamma from probe responses")
    s.add_argument("--replay", help="recorded responses JSONL (id, path, response)")
    s.add_argument("--vlm-acc", type=float, default=0.9, help="mock scorer visual-path accuracy")
    s.add_argument("--llm-acc", type=float, default=1.0, help="mock scorer text-path accuracy")
    s.add_argument("--export-probes", help="also write the probe items as JSONL")
    s.set_defaults(func=cmd_calibrate)

    for name, func, helptext in (
        ("evaluate", cmd_evaluate, "full pipeline with paired statistics"),
        ("sweep", cmd_sweep, "routing accuracy across the tau grid"),
    ):
        s = sub.add_parser(name, parents=[common], help=helptext)
        s.add_argument("input", nargs="?")
        s.add_argument("--synthetic", action="store_true", help="use the built-in planted synthetic suite")
        s.add_argument("--per-sample", action="store_true", help="route each sample instead of each dataset")
        s.set_defaults(func=func)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    if args.command != "evaluate" and args.format is None:
        args.format = "json"
    try:
        if args.backend:
            kernels.use_backend(args.backend)
        cfg = load_config(args.config, args.preset)
        args.func(args, cfg)
    except VtcError as exc:
        print(f"vtcroute: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"vtcroute: I/O error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # pragma: no cover - last-resort guard
        print(f"vtcroute: internal error: {exc!r}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
