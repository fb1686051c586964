"""Run configuration from JSON or TOML files."""
from __future__ import annotations

import json
import sys
from dataclasses import dataclass, field, fields
from pathlib import Path

from .cost import CostParams, get_preset
from .errors import ConfigError
from .features import SegmentPolicy, get_tokenizer, load_w_table
from .foveate import FovConfig
from .render import GlyphMetrics, RenderConfig

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

DEFAULT_PRESET = "4b"
SECTIONS = ("preset", "params", "render", "features", "fov", "harness")


@dataclass
class HarnessConfig:
    buckets: int = 4
    sweep_lo: float = 0.90
    sweep_hi: float = 1.40
    sweep_step: float = 0.01
    per_sample: bool = False

    def __post_init__(self):
        if self.buckets < 2:
            raise ConfigError("[harness] buckets must be >= 2")
        if not self.sweep_step > 0 or self.sweep_hi < self.sweep_lo:
            raise ConfigError("[harness] sweep needs step > 0 and hi >= lo")

    @property
    def sweep(self):
        return (self.sweep_lo, self.sweep_hi, self.sweep_step)


@dataclass
class RunConfig:
    params: CostParams
    render: RenderConfig = field(default_factory=RenderConfig)
    w_table: dict = field(default_factory=load_w_table)
    segment: SegmentPolicy = field(default_factory=SegmentPolicy)
    tokenizer_name: str = "heuristic"
    fov: FovConfig = field(default_factory=FovConfig)
    harness: HarnessConfig = field(default_factory=HarnessConfig)

    @property
    def tokenizer(self):
        return get_tokenizer(self.tokenizer_name)


def _build(cls, block, where):
    if not isinstance(block, dict):
        raise ConfigError(f"[{where}] must be a table/object")
    known = {f.name for f in fields(cls)}
    unknown = set(block) - known
    if unknown:
        raise ConfigError(f"[{where}] unknown keys: {sorted(unknown)}")
    try:
        return cls(**block)
    except TypeError as exc:
        raise ConfigError(f"[{where}] {exc}") from None


def read_config_file(path) -> dict:
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    try:
        if path.suffix.lower() == ".toml":
            return tomllib.loads(raw.decode("utf-8"))
        return json.loads(raw)
    except (ValueError, tomllib.TOMLDecodeError) as exc:
        raise ConfigError(f"cannot parse config {path}: {exc}") from None


def build_config(data: dict | None = None, preset: str | None = None) -> RunConfig:
    """``preset`` (e.g. from the command line) overrides the file's preset; explicit params override both."""
    data = dict(data or {})
    unknown = set(data) - set(SECTIONS)
    if unknown:
        raise ConfigError(f"unknown config sections: {sorted(unknown)}")
    base = get_preset(preset or data.get("preset") or DEFAULT_PRESET)
    overrides = data.get("params") or {}
    if overrides:
        merged = {**base.to_dict(), **overrides}
        base = _build(CostParams, merged, "params")

    render_block = dict(data.get("render") or {})
    metrics_file = render_block.pop("metrics_file", None)
    if metrics_file:
        try:
            render_block["metrics"] = GlyphMetrics.from_file(metrics_file)
        except OSError as exc:
            raise ConfigError(f"cannot read metrics file {metrics_file}: {exc.strerror}") from None
    render = _build(RenderConfig, render_block, "render")

    feat = dict(data.get("features") or {})
    unknown = set(feat) - {"w_table", "segment", "tokenizer"}
    if unknown:
        raise ConfigError(f"[features] unknown keys: {sorted(unknown)}")
    segment = _build(SegmentPolicy, feat.get("segment") or {}, "features.segment")
    tokenizer_name = feat.get("tokenizer", "heuristic")
    get_tokenizer(tokenizer_name)

    return RunConfig(
        params=base,
        render=render,
        w_table=load_w_table(feat.get("w_table")),
        segment=segment,
        tokenizer_name=tokenizer_name,
        fov=_build(FovConfig, data.get("fov") or {}, "fov"),
        harness=_build(HarnessConfig, data.get("harness") or {}, "harness"),
    )


def load_config(path=None, preset: str | None = None) -> RunConfig:
    return build_config(read_config_file(path) if path else None, preset)
