"""Label-free input features: precision W, coverage L, redundancy TRR, token counts and VCR."""
from __future__ import annotations

import enum
import math
import re
import zlib
from collections import Counter
from dataclasses import asdict, dataclass
from typing import Mapping, Protocol, Sequence

import numpy as np

from .render import is_control
from .errors import ConfigError, DegenerateInputError, InvariantError

WORD_RE = re.compile(r"\w+")
DEFLATE_LEVEL = 9
K_REF = 8
BM25_K1 = 1.2
BM25_B = 0.75


class AnswerFormat(str, enum.Enum):
    LETTER_CHOICE = "letter-choice"
    YES_NO = "yes-no"
    CATEGORY_NAME = "category-name"
    INTEGER_RATING = "integer-rating"
    SHORT_SPAN = "short-span"
    CANDIDATE_ENTITY = "candidate-entity"
    NUMBER_SPAN_DATE = "number-span-date"
    FREE_SUMMARY = "free-summary"
    RATIONALE_LABEL = "rationale-label"


# Probe tiers: keyword extraction 0.10, one-sentence summary 0.35, full restatement 0.65.
W_LOW, W_MEDIUM, W_HIGH = 0.10, 0.35, 0.65

DEFAULT_W_TABLE = {
    AnswerFormat.CATEGORY_NAME: 0.10,
    AnswerFormat.INTEGER_RATING: 0.35,
    AnswerFormat.FREE_SUMMARY: 0.35,
    AnswerFormat.RATIONALE_LABEL: 0.35,
    AnswerFormat.YES_NO: 0.55,
    AnswerFormat.LETTER_CHOICE: 0.65,
    AnswerFormat.SHORT_SPAN: 0.65,
    AnswerFormat.CANDIDATE_ENTITY: 0.75,
    AnswerFormat.NUMBER_SPAN_DATE: 0.75,
}


@dataclass(frozen=True)
class TaskSpec:
    answer_format: AnswerFormat
    w_override: float | None = None
    query: str | None = None

    def __post_init__(self):
        try:
            fmt = AnswerFormat(self.answer_format)
        except ValueError:
            raise ConfigError(f"unknown answer format {self.answer_format!r}") from None
        object.__setattr__(self, "answer_format", fmt)
        if self.w_override is not None and not 0.0 <= self.w_override <= 1.0:
            raise ConfigError(f"w_override must lie in [0, 1], got {self.w_override}")


@dataclass(frozen=True)
class FeatureVector:
    W: float
    L: float
    TRR: float
    n: int
    m: int

    @property
    def VCR(self):
        """n/m, or ``None`` when there are no visual tokens."""
        return self.n / self.m if self.m > 0 else None

    def to_dict(self):
        d = asdict(self)
        d["VCR"] = self.VCR
        return d


@dataclass(frozen=True)
class Segment:
    start: int
    end: int
    tokens: tuple


def load_w_table(mapping: Mapping[str, float] | None = None):
    """Default W table with optional overrides keyed by format name."""
    table = dict(DEFAULT_W_TABLE)
    for key, value in (mapping or {}).items():
        try:
            fmt = AnswerFormat(key)
        except ValueError:
            raise ConfigError(f"W table: unknown answer format {key!r}") from None
        if not 0.0 <= float(value) <= 1.0:
            raise ConfigError(f"W table: value for {key} outside [0, 1]")
        table[fmt] = float(value)
    return table


def precision_weight(task: TaskSpec, table: Mapping | None = None) -> float:
    if task.w_override is not None:
        return float(task.w_override)
    table = DEFAULT_W_TABLE if table is None else table
    return float(table[task.answer_format])


def tokenize(text):
    return tuple(WORD_RE.findall(text.lower()))


@dataclass(frozen=True)
class SegmentPolicy:
    window: int = 256
    max_extend: int = 32


def segment_text(text: str, policy: SegmentPolicy | None = None) -> list[Segment]:
    """Split into fixed windows, each extended forward to the next whitespace.

    A window whose extension would run past ``max_extend`` characters is cut
    at exactly ``window`` characters instead (long unbroken tokens).
    """
    policy = policy or SegmentPolicy()
    n = len(text)
    segments = []
    start = 0
    while start < n:
        end = start + policy.window
        if end >= n:
            end = n
        else:
            limit = min(n, end + policy.max_extend)
            j = end
            while j < limit and not text[j].isspace():
                j += 1
            if j < n and j == limit and not text[j].isspace():
                j = end
            end = j
        segments.append(Segment(start, end, tokenize(text[start:end])))
        start = end
    return segments


def bm25_scores(query: str | None, segments: Sequence[Segment], k1=BM25_K1, b=BM25_B) -> np.ndarray:
    """Okapi BM25 of ``query`` against each segment (non-negative idf variant)."""
    if not segments:
        raise DegenerateInputError("bm25 needs at least one segment")
    n_docs = len(segments)
    scores = np.zeros(n_docs, dtype=np.float64)
    q = tokenize(query or "")
    if not q:
        return scores
    tfs = [Counter(s.tokens) for s in segments]
    lens = np.array([len(s.tokens) for s in segments], dtype=np.float64)
    avgdl = lens.mean()
    df = Counter()
    for tf in tfs:
        df.update(tf.keys())
    for i, tf in enumerate(tfs):
        norm = k1 * (1.0 - b + b * lens[i] / avgdl) if avgdl > 0 else k1
        s = 0.0
        for term in q:
            f = tf.get(term, 0)
            if not f:
                continue
            idf = math.log(1.0 + (n_docs - df[term] + 0.5) / (df[term] + 0.5))
            s += idf * f * (k1 + 1.0) / (f + norm)
        scores[i] = s
    return scores


def relevance_distribution(scores) -> np.ndarray | None:
    scores = np.asarray(scores, dtype=np.float64)
    total = scores.sum()
    if total <= 0:
        return None
    return scores / total


def coverage(scores, k: int | None = None, k_ref: int = K_REF) -> float:
    """Normalised entropy of relevance mass, or a segment-count proxy without relevance.

    ``scores`` may be ``None`` (no query); ``k`` defaults to ``len(scores)``.
    """
    if k is None:
        k = 0 if scores is None else len(scores)
    if k <= 0:
        raise DegenerateInputError("coverage is undefined for zero segments")
    p = None if scores is None else relevance_distribution(scores)
    if p is None:
        return min(1.0, k / k_ref)
    if k == 1:
        return 0.0
    nz = p[p > 0]
    h = float(-(nz * np.log(nz)).sum())
    return min(1.0, max(0.0, h / math.log(k)))


def redundancy(text: str) -> float:
    """1 - deflated/raw byte length, clamped to [0, 1]."""
    raw = text.encode("utf-8")
    if not raw:
        return 0.0
    comp = zlib.compressobj(DEFLATE_LEVEL, zlib.DEFLATED, -15)
    packed = comp.compress(raw) + comp.flush()
    return min(1.0, max(0.0, 1.0 - len(packed) / len(raw)))


class Tokenizer(Protocol):
    def count(self, text: str) -> int: ...


class HeuristicTokenizer:
    """Approximate subword count: ceil(len/4) per word run (min 1), 1 per punctuation mark."""

    name = "heuristic"
    _piece = re.compile(r"\w+|[^\w\s]")

    def count(self, text: str) -> int:
        n = 0
        for piece in self._piece.findall(text):
            if piece[0].isalnum() or piece[0] == "_":
                n += max(1, math.ceil(len(piece) / 4))
            else:
                n += 1
        return n


class WhitespaceTokenizer:
    name = "whitespace"

    def count(self, text: str) -> int:
        return len(text.split())


TOKENIZERS = {"heuristic": HeuristicTokenizer, "whitespace": WhitespaceTokenizer}


def get_tokenizer(name: str = "heuristic") -> Tokenizer:
    try:
        return TOKENIZERS[name]()
    except KeyError:
        raise ConfigError(f"unknown tokenizer {name!r}") from None


def count_text_tokens(text: str, tokenizer: Tokenizer | None = None) -> int:
    tokenizer = tokenizer or HeuristicTokenizer()
    return int(tokenizer.count(text))


def extract_features(
    text: str,
    task: TaskSpec,
    doc,
    w_table: Mapping | None = None,
    policy: SegmentPolicy | None = None,
    tokenizer: Tokenizer | None = None,
) -> FeatureVector:
    """Compose W, L, TRR, n and m for one input; ``doc`` must be rendered from ``text``."""
    if doc.source_len != len(text):
        raise InvariantError("rendered document does not match the input text")
    w = precision_weight(task, w_table)
    if not text or all(is_control(ch) for ch in text):
        return FeatureVector(W=w, L=0.0, TRR=0.0, n=0, m=doc.m)
    n = count_text_tokens(text, tokenizer)
    if doc.m == 0:
        raise InvariantError("non-empty text rendered to zero visual tokens")
    segments = segment_text(text, policy)
    scores = bm25_scores(task.query, segments) if task.query else None
    return FeatureVector(
        W=w,
        L=coverage(scores, len(segments)),
        TRR=redundancy(text),
        n=n,
        m=doc.m,
    )
