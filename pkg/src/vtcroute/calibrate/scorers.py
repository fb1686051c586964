"""Response sources for probe items.

A scorer answers ``respond(item, path)`` with a response string for path
``"vlm"`` or ``"llm"``. Real model endpoints are out of scope: the mock
synthesises responses that realise target accuracies, the replay scorer
reads recorded responses, and the remote scorer is a placeholder.
"""
from __future__ import annotations

import json
import random
from pathlib import Path
from typing import Callable, Protocol

from ..features import tokenize
from .probes import NAME_MATCH, NUMERIC_TOLERANCE, ROUGE_L

VLM, LLM = "vlm", "llm"
PATHS = (VLM, LLM)


class ScorerError(RuntimeError):
    pass


class Scorer(Protocol):
    def respond(self, item, path: str) -> str: ...


def _wrong_answer(item):
    if item.scoring_mode == NUMERIC_TOLERANCE:
        return f"It was {float(item.gold) * 2 + 10:g} degrees."
    if item.scoring_mode == NAME_MATCH:
        return "The answer is Nobody."
    return "unknown"


class MockScorer:
    """Deterministic responses that realise a target mean accuracy per probe cell.

    ``accuracy(item, path)`` gives the target mean for the item's cell
    (kind, tier, format). Within a cell the credit is spread over slots in a
    seeded order: binary modes hand out whole correct answers, ROUGE-L modes
    hand out token-level partial credit by corrupting the tail of the gold
    text. The realised cell mean is the target rounded to the cell's
    granularity (1/N for binary, 1/(N*G) for ROUGE-L with G gold tokens).
    """

    def __init__(self, accuracy: Callable | float | dict, seed: int = 0):
        if isinstance(accuracy, (int, float)):
            value = float(accuracy)
            accuracy = lambda item, path: value  # noqa: E731
        elif isinstance(accuracy, dict):
            table = accuracy
            accuracy = lambda item, path: table[path]  # noqa: E731
        self.accuracy = accuracy
        self.seed = seed
        self._orders: dict = {}

    def _rank(self, item, path):
        key = (item.cell, path, item.cell_size)
        order = self._orders.get(key)
        if order is None:
            order = list(range(item.cell_size))
            random.Random(f"{self.seed}-{key}").shuffle(order)
            order = {slot: r for r, slot in enumerate(order)}
            self._orders[key] = order
        return order[item.slot]

    def respond(self, item, path):
        if path not in PATHS:
            raise ScorerError(f"unknown path {path!r}")
        acc = min(1.0, max(0.0, float(self.accuracy(item, path))))
        n = item.cell_size
        g = len(tokenize(item.gold)) if item.scoring_mode == ROUGE_L else 1
        total = round(acc * n * g)
        r = self._rank(item, path)
        units = (r + 1) * total // n - r * total // n
        if item.scoring_mode == ROUGE_L:
            gold = list(tokenize(item.gold))
            keep = min(units, len(gold))
            return " ".join(gold[:keep] + [f"zq{j}" for j in range(len(gold) - keep)])
        if units >= 1:
            return f"The answer is {item.gold}."
        return _wrong_answer(item)


class ReplayScorer:
    """Serves recorded responses from a JSONL file of ``{"id", "path", "response"}`` records."""

    def __init__(self, responses: dict):
        self.responses = responses

    @classmethod
    def from_jsonl(cls, path):
        responses = {}
        with Path(path).open(encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, 1):
                if not line.strip():
                    continue
                try:
                    rec = json.loads(line)
                    responses[(rec["id"], rec["path"])] = rec["response"]
                except (json.JSONDecodeError, KeyError) as exc:
                    raise ScorerError(f"{path}:{lineno}: malformed replay record ({exc})") from None
        return cls(responses)

    def respond(self, item, path):
        try:
            return self.responses[(item.id, path)]
        except KeyError:
            raise ScorerError(f"no recorded {path} response for {item.id}") from None


class RemoteScorer:
    """Placeholder for a model-backed scorer; always fails."""

    def __init__(self, endpoint: str | None = None):
        self.endpoint = endpoint

    def respond(self, item, path):
        raise ScorerError("remote scoring is not available in this build")


def record_responses(scorer, items, path):
    """Write every (item, path) response of ``scorer`` as replay JSONL."""
    path = Path(path)
    with path.open("w", encoding="utf-8") as fh:
        for item in items:
            for p in PATHS:
                rec = {"id": item.id, "path": p, "response": scorer.respond(item, p)}
                fh.write(json.dumps(rec, sort_keys=True) + "\n")
    return path
