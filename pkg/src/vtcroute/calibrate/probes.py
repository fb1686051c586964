"""Synthetic probe sets for fitting the intra-patch, inter-patch and structure weights."""
from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from pathlib import Path

from .wordlists import AWARD_KINDS, AWARD_NAMES, CITIES, FILLER, FIRST_NAMES, LAST_NAMES

ALPHA, BETA, GAMMA = "alpha", "beta", "gamma"
ALPHA_TIERS = (0.10, 0.35, 0.65)
BETA_TIERS = (0.10, 0.40, 0.70)
HAYSTACK_LENGTHS = (1000, 4000)
STRUCTURED, FLAT = "structured", "flat"
HIGH_TIER_FRACTIONS = (0.10, 0.30, 0.50, 0.70, 0.90)

N_NEEDLES = 80
N_BETA_TASKS = 60
N_GAMMA_SETS = 60

EXACT_SUBSTRING = "exact-substring"
ROUGE_L = "rouge-l"
NUMERIC_TOLERANCE = "numeric-tolerance"
NAME_MATCH = "name-match"

NEEDLE_TEMPLATE = (
    "{first} {last} graduated from the University of {city} in {year} and later "
    "received the {award} {kind} for outstanding research."
)


@dataclass(frozen=True)
class ProbeItem:
    id: str
    kind: str
    tier_value: float | None
    format: str | None
    haystack_len: int
    prompt_text: str
    gold: str
    scoring_mode: str
    slot: int
    cell_size: int
    # word index of each planted fact and the haystack word count (beta only)
    planted_words: tuple = field(default=())
    haystack_words: int = 0

    @property
    def cell(self):
        return (self.kind, self.tier_value, self.format)

    def to_record(self):
        return {
            "id": self.id,
            "kind": self.kind,
            "tier": self.tier_value,
            "format": self.format,
            "haystack_len": self.haystack_len,
            "prompt": self.prompt_text,
            "gold": self.gold,
            "mode": self.scoring_mode,
            "slot": self.slot,
            "cell_size": self.cell_size,
        }


def _filler_for_chars(rng, chars):
    words, total = [], 0
    while total < chars:
        w = rng.choice(FILLER)
        words.append(w)
        total += len(w) + 1
    return words


def _embed(rng, block, haystack_len):
    """Insert ``block`` at a random word boundary of filler sized to ``haystack_len``."""
    words = _filler_for_chars(rng, max(0, haystack_len - len(block) - 1))
    pos = rng.randint(0, len(words))
    return " ".join(words[:pos] + [block] + words[pos:])


def _place_facts(rng, facts, fractions, haystack_len):
    """Lay out ``facts`` (word lists) so fact i starts at word round(fractions[i] * T)."""
    fact_words = sum(len(f) for f in facts)
    fact_chars = sum(len(" ".join(f)) + 1 for f in facts)
    filler = []
    total = fact_chars
    while total < haystack_len:
        w = rng.choice(FILLER)
        filler.append(w)
        total += len(w) + 1
    n_filler = len(filler)
    t = n_filler + fact_words
    out, starts, fi = [], [], 0
    for frac, fact in sorted(zip(fractions, facts), key=lambda p: p[0]):
        s = max(len(out), round(frac * t))
        while len(out) < s:
            out.append(filler[fi])
            fi += 1
        starts.append(len(out))
        out.extend(fact)
    out.extend(filler[fi:])
    return " ".join(out), tuple(starts), len(out)


def _prompt(haystack, question):
    return f"{haystack}\n\nQuestion: {question}"


def generate_alpha_probe(seed: int = 0) -> list[ProbeItem]:
    """80 needles x 3 output tiers x 2 haystack lengths."""
    rng = random.Random(f"alpha-probe-{seed}")
    people = rng.sample([(f, l) for f in FIRST_NAMES for l in LAST_NAMES], N_NEEDLES)
    items = []
    for k, (first, last) in enumerate(people):
        award = rng.choice(AWARD_NAMES)
        needle = NEEDLE_TEMPLATE.format(
            first=first,
            last=last,
            city=rng.choice(CITIES),
            year=rng.randint(1950, 2020),
            award=award,
            kind=rng.choice(AWARD_KINDS),
        )
        questions = {
            0.10: (f"Which award did {first} {last} receive? Reply with a single keyword.", award, EXACT_SUBSTRING),
            0.35: (f"Summarize what the document says about {first} {last} in one sentence.", needle, ROUGE_L),
            0.65: (f"Restate the full fact about {first} {last} in roughly 50 words.", needle, ROUGE_L),
        }
        for li, length in enumerate(HAYSTACK_LENGTHS):
            haystack = _embed(rng, needle, length)
            for tier in ALPHA_TIERS:
                question, gold, mode = questions[tier]
                items.append(
                    ProbeItem(
                        id=f"alpha-{k:03d}-w{tier:.2f}-h{length}",
                        kind=ALPHA,
                        tier_value=tier,
                        format=None,
                        haystack_len=length,
                        prompt_text=_prompt(haystack, question),
                        gold=gold,
                        scoring_mode=mode,
                        slot=2 * k + li,
                        cell_size=2 * N_NEEDLES,
                    )
                )
    return items


def _temperatures(rng, n):
    while True:
        temps = rng.sample(range(5, 46), n)
        top = sorted(temps, reverse=True)
        if n == 1 or top[0] - top[1] >= 2:
            return temps


def _temp_fact(city, temp):
    return f"In {city} the recorded high temperature was {temp} degrees.".split()


def generate_beta_probe(seed: int = 0) -> list[ProbeItem]:
    """60 aggregation tasks x 3 locality tiers x 2 haystack lengths."""
    rng = random.Random(f"beta-probe-{seed}")
    items = []
    for k in range(N_BETA_TASKS):
        for li, length in enumerate(HAYSTACK_LENGTHS):
            for tier in BETA_TIERS:
                if tier == 0.10:
                    n_facts, fractions = 1, [rng.uniform(0.1, 0.9)]
                elif tier == 0.40:
                    # one fact per third of the document
                    n_facts = 3
                    fractions = [rng.uniform(lo, lo + 0.25) for lo in (0.05, 0.35, 0.65)]
                else:
                    n_facts, fractions = 5, list(HIGH_TIER_FRACTIONS)
                cities = rng.sample(CITIES, n_facts)
                temps = _temperatures(rng, n_facts)
                facts = [_temp_fact(c, t) for c, t in zip(cities, temps)]
                haystack, starts, n_words = _place_facts(rng, facts, fractions, length)
                if n_facts == 1:
                    question = f"What was the recorded high temperature in {cities[0]}? Answer with a number."
                    gold, mode = str(temps[0]), NUMERIC_TOLERANCE
                else:
                    question = "Which listed city recorded the highest temperature? Answer with the city name."
                    gold, mode = cities[temps.index(max(temps))], NAME_MATCH
                items.append(
                    ProbeItem(
                        id=f"beta-{k:03d}-l{tier:.2f}-h{length}",
                        kind=BETA,
                        tier_value=tier,
                        format=None,
                        haystack_len=length,
                        prompt_text=_prompt(haystack, question),
                        gold=gold,
                        scoring_mode=mode,
                        slot=2 * k + li,
                        cell_size=2 * N_BETA_TASKS,
                        planted_words=starts,
                        haystack_words=n_words,
                    )
                )
    return items


def _award_table(rows):
    lines = ["| Name | Award | Year |", "| --- | --- | --- |"]
    lines += [f"| {name} | {award} | {year} |" for name, award, year in rows]
    return "\n" + "\n".join(lines) + "\n"


def _award_paragraph(rows):
    return " ".join(f"{name} received the {award} in {year}." for name, award, year in rows)


def generate_gamma_probe(seed: int = 0) -> list[ProbeItem]:
    """60 fact sets, each as a Markdown table and as a flat paragraph, x 2 haystack lengths."""
    rng = random.Random(f"gamma-probe-{seed}")
    question = "Who received their award most recently? Answer with the person's name."
    items = []
    for k in range(N_GAMMA_SETS):
        names = [f"{f} {l}" for f, l in zip(rng.sample(FIRST_NAMES, 3), rng.sample(LAST_NAMES, 3))]
        years = rng.sample(range(1960, 2024), 3)
        awards = [f"{rng.choice(AWARD_NAMES)} {rng.choice(AWARD_KINDS)}" for _ in range(3)]
        rows = list(zip(names, awards, years))
        gold = names[years.index(max(years))]
        blocks = {STRUCTURED: _award_table(rows), FLAT: _award_paragraph(rows)}
        for li, length in enumerate(HAYSTACK_LENGTHS):
            for fmt in (STRUCTURED, FLAT):
                items.append(
                    ProbeItem(
                        id=f"gamma-{k:03d}-{fmt}-h{length}",
                        kind=GAMMA,
                        tier_value=None,
                        format=fmt,
                        haystack_len=length,
                        prompt_text=_prompt(_embed(rng, blocks[fmt], length), question),
                        gold=gold,
                        scoring_mode=NAME_MATCH,
                        slot=2 * k + li,
                        cell_size=2 * N_GAMMA_SETS,
                    )
                )
    return items


def generate_all(seed: int = 0) -> list[ProbeItem]:
    return generate_alpha_probe(seed) + generate_beta_probe(seed) + generate_gamma_probe(seed)


def export_jsonl(items, path):
    path = Path(path)
    with path.open("w", encoding="utf-8") as fh:
        for item in items:
            fh.write(json.dumps(item.to_record(), sort_keys=True) + "\n")
    return path
