"""Transport-cost proxy, information survival, transport efficiency and the routing rule."""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, replace

from .errors import ConfigError, DegenerateInputError

STANDARD = "standard"
BOUNDED = "bounded"
VISUAL = "visual"
TEXT = "text"


@dataclass(frozen=True)
class CostParams:
    alpha: float
    beta: float
    gamma: float = 0.0
    tau: float = 1.28
    vcr_cap: float | None = None

    def __post_init__(self):
        for name in ("alpha", "beta", "gamma"):
            v = getattr(self, name)
            if not math.isfinite(v) or v < 0:
                raise ConfigError(f"{name} must be a finite value >= 0, got {v}")
        if not self.tau > 0:
            raise ConfigError(f"tau must be > 0, got {self.tau}")
        if self.vcr_cap is not None and not self.vcr_cap > 0:
            raise ConfigError(f"vcr_cap must be > 0, got {self.vcr_cap}")

    @property
    def default_variant(self):
        return BOUNDED if self.vcr_cap is not None else STANDARD

    def with_tau(self, tau):
        return replace(self, tau=tau)

    def to_dict(self):
        return asdict(self)


# Probe-calibrated triplets per backbone scale; 32B runs the bounded-benefit rule.
PRESETS = {
    "4b": CostParams(alpha=0.213, beta=0.627, gamma=0.069, tau=1.28),
    "8b": CostParams(alpha=0.455, beta=0.061, gamma=0.000, tau=1.28),
    "32b": CostParams(alpha=0.053, beta=0.233, gamma=0.241, tau=1.55, vcr_cap=0.30),
}


def get_preset(name: str) -> CostParams:
    try:
        return PRESETS[name.lower()]
    except KeyError:
        raise ConfigError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None


@dataclass(frozen=True)
class CostBreakdown:
    intra: float
    inter: float
    total: float


@dataclass(frozen=True)
class Decision:
    path: str
    te: float | None
    isr: float
    vcr_used: float | None
    breakdown: CostBreakdown
    variant: str = STANDARD
    reason: str | None = None

    def to_dict(self):
        d = asdict(self)
        d["breakdown"] = asdict(self.breakdown)
        return d

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)


def transport_cost(fv, p: CostParams) -> CostBreakdown:
    """C = alpha*W + beta*L*(1 - TRR)."""
    intra = p.alpha * fv.W
    inter = p.beta * fv.L * (1.0 - fv.TRR)
    return CostBreakdown(intra=intra, inter=inter, total=intra + inter)


def information_survival(c: float, gamma: float) -> float:
    return 1.0 + gamma - c


def transport_efficiency(isr: float, vcr: float | None) -> float:
    if vcr is None or not math.isfinite(vcr):
        raise DegenerateInputError("VCR undefined: document has no visual tokens")
    return isr * vcr


def effective_vcr(vcr: float, cap: float) -> float:
    if not cap > 0:
        raise ConfigError("vcr cap must be > 0")
    return 1.0 + min(vcr - 1.0, cap)


def route(fv, p: CostParams, variant: str | None = None) -> Decision:
    """Visual path iff TE >= tau; degenerate inputs (no visual tokens) go to text."""
    variant = variant or p.default_variant
    if variant not in (STANDARD, BOUNDED):
        raise ConfigError(f"unknown routing variant {variant!r}")
    if variant == BOUNDED and p.vcr_cap is None:
        raise ConfigError("bounded variant needs vcr_cap")
    breakdown = transport_cost(fv, p)
    isr = information_survival(breakdown.total, p.gamma)
    vcr = fv.VCR
    if vcr is None:
        return Decision(TEXT, None, isr, None, breakdown, variant, reason="degenerate: zero visual tokens")
    vcr_used = effective_vcr(vcr, p.vcr_cap) if variant == BOUNDED else vcr
    te = transport_efficiency(isr, vcr_used)
    return Decision(VISUAL if te >= p.tau else TEXT, te, isr, vcr_used, breakdown, variant)


def decision_contour(tau: float, vcr: float) -> float:
    """ISR on the TE = tau hyperbola at the given VCR."""
    if not vcr > 0:
        raise ValueError(f"decision contour needs vcr > 0, got {vcr}")
    return tau / vcr
