"""Per-trial scoring of probe responses."""
from __future__ import annotations

import re

from .. import kernels
from ..features import tokenize
from .probes import EXACT_SUBSTRING, NAME_MATCH, NUMERIC_TOLERANCE, ROUGE_L

NUMERIC_TOLERANCE_FRACTION = 0.15
_NUMBER = re.compile(r"-?\d+(?:\.\d+)?")


def _ids(a_tokens, b_tokens):
    vocab: dict = {}
    a = [vocab.setdefault(t, len(vocab)) for t in a_tokens]
    b = [vocab.setdefault(t, len(vocab)) for t in b_tokens]
    return a, b


def rouge_l_f1(pred: str, gold: str) -> float:
    """LCS-based F1 over lowercase word tokens. Both empty scores 1, one empty scores 0."""
    p_tok, g_tok = tokenize(pred), tokenize(gold)
    if not p_tok and not g_tok:
        return 1.0
    if not p_tok or not g_tok:
        return 0.0
    a, b = _ids(p_tok, g_tok)
    lcs = kernels.lcs_length(a, b)
    if lcs == 0:
        return 0.0
    precision = lcs / len(p_tok)
    recall = lcs / len(g_tok)
    return 2 * precision * recall / (precision + recall)


def parse_number(text: str) -> float | None:
    m = _NUMBER.search(text.replace(",", ""))
    return float(m.group()) if m else None


def numeric_match(pred: str, gold: str, tol: float = NUMERIC_TOLERANCE_FRACTION) -> float:
    p, g = parse_number(pred), parse_number(gold)
    if p is None or g is None:
        return 0.0
    if g == 0:
        return 1.0 if p == 0 else 0.0
    return 1.0 if abs(p - g) / abs(g) <= tol + 1e-12 else 0.0


def score_response(item, response: str) -> float:
    mode = item.scoring_mode
    if mode == EXACT_SUBSTRING or mode == NAME_MATCH:
        return 1.0 if item.gold.lower() in response.lower() else 0.0
    if mode == NUMERIC_TOLERANCE:
        return numeric_match(response, item.gold)
    if mode == ROUGE_L:
        return rouge_l_f1(response, item.gold)
    raise ValueError(f"unknown scoring mode {mode!r}")
