"""Synthetic datasets with planted (W, L, TRR, VCR) and a cost-driven mock scorer.

Text knobs: word length and vocabulary size set redundancy and tokens per
rendered cell, uppercase widens glyphs (lower VCR), and a query keyword
planted in one segment or in every segment pins coverage near 0 or 1.
"""
from __future__ import annotations

import random
import string
from dataclasses import dataclass

from .cost import VISUAL, TEXT, CostParams, route
from .features import AnswerFormat, TaskSpec, extract_features
from .foveate import FovConfig, patch_cost_map, select_regions
from .harness import SampleRecord
from .render import RenderConfig, build_alignment, layout_document

KEYWORD = "beacon"
TEXT_CHARS = 4000
BASE_SCORE = 0.60
SCORE_SPREAD = 0.05


@dataclass(frozen=True)
class TextKnobs:
    word_len: int
    vocab: int | None  # None: fresh random word every time
    upper: bool
    vcr: float  # nominal tokens per visual token for these knobs
    trr: float  # nominal redundancy


DENSE = TextKnobs(1, 4, False, vcr=5.0, trr=0.79)
SHORT = TextKnobs(2, 4, False, vcr=3.0, trr=0.84)
MIXED = TextKnobs(3, 64, False, vcr=2.05, trr=0.61)
RANDOM = TextKnobs(8, None, False, vcr=1.70, trr=0.38)
WIDE = TextKnobs(8, None, True, vcr=1.33, trr=0.38)


@dataclass(frozen=True)
class PlantedDataset:
    name: str
    answer_format: AnswerFormat
    W: float
    L: float  # 0: keyword in a single segment, 1: keyword in every segment
    knobs: TextKnobs

    @property
    def TRR(self):
        return self.knobs.trr

    @property
    def VCR(self):
        return self.knobs.vcr

    def planted_cost(self, p: CostParams):
        return p.alpha * self.W + p.beta * self.L * (1.0 - self.TRR)

    def planted_te(self, p: CostParams):
        return (1.0 + p.gamma - self.planted_cost(p)) * self.VCR

    def planted_oracle(self, p: CostParams):
        return VISUAL if self.planted_te(p) > p.tau else TEXT


F = AnswerFormat
SUITE = (
    PlantedDataset("syn01", F.CATEGORY_NAME, 0.10, 0.0, DENSE),
    PlantedDataset("syn02", F.NUMBER_SPAN_DATE, 0.75, 1.0, WIDE),
    PlantedDataset("syn03", F.CATEGORY_NAME, 0.10, 0.0, RANDOM),
    PlantedDataset("syn04", F.CANDIDATE_ENTITY, 0.75, 1.0, RANDOM),
    PlantedDataset("syn05", F.FREE_SUMMARY, 0.35, 1.0, SHORT),
    PlantedDataset("syn06", F.INTEGER_RATING, 0.35, 1.0, WIDE),
    PlantedDataset("syn07", F.RATIONALE_LABEL, 0.35, 0.0, MIXED),
    PlantedDataset("syn08", F.SHORT_SPAN, 0.65, 1.0, DENSE),
    PlantedDataset("syn09", F.LETTER_CHOICE, 0.65, 1.0, WIDE),
    PlantedDataset("syn10", F.CATEGORY_NAME, 0.10, 1.0, WIDE),
    PlantedDataset("syn11", F.CATEGORY_NAME, 0.10, 1.0, SHORT),
    PlantedDataset("syn12", F.YES_NO, 0.55, 1.0, RANDOM),
)


def generate_text(ds: PlantedDataset, rng: random.Random, chars: int = TEXT_CHARS) -> str:
    k = ds.knobs
    alphabet = string.ascii_uppercase if k.upper else string.ascii_lowercase

    def word():
        return "".join(rng.choice(alphabet) for _ in range(k.word_len))

    vocab = [word() for _ in range(k.vocab)] if k.vocab else None
    words, total = [], 0
    while total < chars:
        w = rng.choice(vocab) if vocab else word()
        words.append(w)
        total += len(w) + 1
    n_slots = 1 if ds.L == 0 else max(1, chars // 250)
    for i in range(n_slots):
        words[int((i + 0.5) * len(words) / n_slots)] = KEYWORD
    return " ".join(words)


def build_samples(
    params: CostParams,
    seed: int = 0,
    per_dataset: int = 6,
    k: float = 0.5,
    noise: float = 0.01,
    suite=SUITE,
    render_cfg: RenderConfig | None = None,
    fov_cfg: FovConfig | None = None,
) -> list[SampleRecord]:
    """Samples with mock paired scores on a 0-100 scale.

    s_vis = s_text - k * (C(x) - c_ref) + noise, where c_ref = 1 + gamma - tau / VCR_planted
    places the break-even cost on the planted decision contour, so the
    visual arm wins on average exactly when the planted TE clears tau.
    A triggered plan recovers the share of C(x) equal to its share of the
    total map cost, so the foveated arm gains k * C(x) * sum_dc / sum(C_q);
    untriggered samples differ from s_vis by incidental noise alone.
    """
    render_cfg = render_cfg or RenderConfig()
    fov_cfg = fov_cfg or FovConfig()
    out = []
    for ds in suite:
        rng = random.Random(f"synthetic-{ds.name}-{seed}")
        c_ref = 1.0 + params.gamma - params.tau / ds.VCR
        for i in range(per_dataset):
            text = generate_text(ds, rng)
            task = TaskSpec(ds.answer_format, None, KEYWORD)
            doc = layout_document(text, render_cfg)
            fv = extract_features(text, task, doc)
            dec = route(fv, params)
            cmap = patch_cost_map(doc, build_alignment(doc), KEYWORD, params)
            plan = select_regions(cmap, fov_cfg, dec.isr, doc.m, n_t=fv.n)
            s_text = BASE_SCORE + rng.uniform(-SCORE_SPREAD, SCORE_SPREAD)
            s_vis = s_text - k * (dec.breakdown.total - c_ref) + rng.uniform(-noise, noise)
            if plan.triggered:
                recovered = dec.breakdown.total * plan.sum_dc / (cmap.mean * cmap.n_cells)
                s_fov = s_vis + k * recovered
            else:
                s_fov = s_vis + rng.uniform(-noise, noise)
            clip = lambda v: round(100.0 * min(1.0, max(0.0, v)), 6)
            out.append(
                SampleRecord(
                    id=f"{ds.name}-{i:02d}",
                    dataset=ds.name,
                    text=text,
                    task=task,
                    s_text=clip(s_text),
                    s_vis=clip(s_vis),
                    s_fov=clip(s_fov),
                )
            )
    return out


def to_jsonl_records(samples):
    for s in samples:
        yield {
            "id": s.id,
            "dataset": s.dataset,
            "text": s.text,
            "question": s.task.query,
            "task": {"answer_format": s.task.answer_format.value, "w_override": s.task.w_override},
            "scores": {"text": s.s_text, "vis": s.s_vis, "fov": s.s_fov},
        }
