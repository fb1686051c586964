"""Tier gaps, the no-intercept least-squares fit, and the structured-format bonus."""
from __future__ import annotations

from dataclasses import dataclass

from ..errors import CalibrationError


@dataclass(frozen=True)
class TierStats:
    tier_value: float
    vlm_mean: float
    llm_mean: float
    n: int = 0

    @property
    def gap(self):
        """``max(0, 1 - vlm/llm)``; ``None`` when the LLM mean is zero."""
        if self.llm_mean <= 0:
            return None
        return tier_gap(self.vlm_mean, self.llm_mean)


@dataclass(frozen=True)
class Fit:
    value: float
    r2: float | None


def tier_gap(vlm_mean: float, llm_mean: float) -> float:
    if not llm_mean > 0:
        raise CalibrationError("tier gap undefined: LLM mean accuracy is zero")
    return max(0.0, 1.0 - vlm_mean / llm_mean)


def fit_no_intercept(xs, gaps) -> Fit:
    """Least-squares slope through the origin; tiers whose gap is ``None`` are skipped.

    R^2 is measured against the uncentred total ``sum(g^2)`` and is ``None``
    when every gap is zero.
    """
    pairs = [(float(x), float(g)) for x, g in zip(xs, gaps) if g is not None]
    if not pairs:
        raise CalibrationError("no tier with a defined gap")
    sxx = sum(x * x for x, _ in pairs)
    if sxx <= 0:
        raise CalibrationError("tier values must not all be zero")
    value = sum(x * g for x, g in pairs) / sxx
    sgg = sum(g * g for _, g in pairs)
    if sgg == 0:
        return Fit(value, None)
    resid = sum((g - value * x) ** 2 for x, g in pairs)
    return Fit(value, 1.0 - resid / sgg)


def fit_structured_bonus(r_struct: float, r_flat: float) -> float:
    if r_struct < 0 or r_flat < 0:
        raise CalibrationError("format ratios must be non-negative")
    return max(0.0, r_struct - r_flat)
