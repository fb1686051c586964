"""Probe-based calibration of the cost weights (alpha, beta) and the structure bonus (gamma)."""
from __future__ import annotations

import json
import logging
from collections import defaultdict
from dataclasses import asdict, dataclass

from ..cost import CostParams
from ..errors import CalibrationError
from .fit import Fit, TierStats, fit_no_intercept, fit_structured_bonus, tier_gap
from .probes import (
    ALPHA,
    BETA,
    FLAT,
    GAMMA,
    STRUCTURED,
    ProbeItem,
    export_jsonl,
    generate_all,
    generate_alpha_probe,
    generate_beta_probe,
    generate_gamma_probe,
)
from .scorers import LLM, VLM, MockScorer, ReplayScorer, RemoteScorer, ScorerError, record_responses
from .scoring import rouge_l_f1, score_response

log = logging.getLogger(__name__)

__all__ = [
    "CalibrationReport",
    "Fit",
    "MockScorer",
    "ProbeItem",
    "RemoteScorer",
    "ReplayScorer",
    "TierStats",
    "export_jsonl",
    "fit_no_intercept",
    "fit_structured_bonus",
    "generate_all",
    "generate_alpha_probe",
    "generate_beta_probe",
    "generate_gamma_probe",
    "record_responses",
    "rouge_l_f1",
    "run_calibration",
    "score_response",
    "tier_gap",
]


@dataclass
class CalibrationReport:
    params: CostParams
    alpha_tiers: list
    beta_tiers: list
    alpha_fit: Fit
    beta_fit: Fit
    r_struct: float
    r_flat: float
    excluded_tiers: list

    def to_dict(self):
        def tiers(ts):
            return [dict(asdict(t), gap=t.gap) for t in ts]

        return {
            "params": self.params.to_dict(),
            "alpha": {"tiers": tiers(self.alpha_tiers), "fit": asdict(self.alpha_fit)},
            "beta": {"tiers": tiers(self.beta_tiers), "fit": asdict(self.beta_fit)},
            "gamma": {"r_struct": self.r_struct, "r_flat": self.r_flat, "value": self.params.gamma},
            "excluded_tiers": self.excluded_tiers,
        }

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)


def _score_all(scorer, items):
    sums = defaultdict(lambda: [0.0, 0.0, 0])
    for item in items:
        key = item.tier_value if item.kind != GAMMA else item.format
        acc = sums[(item.kind, key)]
        for i, path in enumerate((VLM, LLM)):
            try:
                response = scorer.respond(item, path)
            except Exception as exc:
                raise CalibrationError(f"partial calibration: scorer failed on {item.id} ({path}): {exc}") from exc
            acc[i] += score_response(item, response)
        acc[2] += 1
    return {k: (v[0] / v[2], v[1] / v[2], v[2]) for k, v in sums.items()}


def _fit_kind(means, kind, excluded):
    tiers = sorted(
        (TierStats(key, vlm, llm, n) for (k, key), (vlm, llm, n) in means.items() if k == kind),
        key=lambda t: t.tier_value,
    )
    for t in tiers:
        if t.gap is None:
            log.warning("%s tier %.2f excluded from fit: LLM mean accuracy is zero", kind, t.tier_value)
            excluded.append({"kind": kind, "tier": t.tier_value})
    fit = fit_no_intercept([t.tier_value for t in tiers], [t.gap for t in tiers])
    return tiers, fit


def run_calibration(scorer, seed: int = 0, tau: float = 1.28, vcr_cap: float | None = None) -> CalibrationReport:
    """Generate all probes, score both paths, and fit (alpha, beta, gamma).

    ``tau`` (and the optional VCR cap) are not calibrated; they are passed
    through into the returned parameters.
    """
    means = _score_all(scorer, generate_all(seed))
    excluded: list = []
    alpha_tiers, alpha_fit = _fit_kind(means, ALPHA, excluded)
    beta_tiers, beta_fit = _fit_kind(means, BETA, excluded)
    ratios = {}
    for fmt in (STRUCTURED, FLAT):
        vlm, llm, _ = means[(GAMMA, fmt)]
        if llm <= 0:
            raise CalibrationError(f"gamma probe: LLM accuracy is zero on the {fmt} format")
        ratios[fmt] = vlm / llm
    gamma = fit_structured_bonus(ratios[STRUCTURED], ratios[FLAT])
    params = CostParams(alpha=alpha_fit.value, beta=beta_fit.value, gamma=gamma, tau=tau, vcr_cap=vcr_cap)
    return CalibrationReport(
        params, alpha_tiers, beta_tiers, alpha_fit, beta_fit, ratios[STRUCTURED], ratios[FLAT], excluded
    )
