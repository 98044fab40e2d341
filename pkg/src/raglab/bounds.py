"""Information-theoretic calculators for noise impact and filtering limits.

All operations are pure evaluations over user-supplied information
quantities; nothing here estimates entropies from data.  Entropies and
mutual informations are in bits.  The constants c1, c2 and the Fano
denominator C absorb unspecified sample-size factors and default to
normalized units (c1=1, c2=0, C=1).

Conventions: lower-bound expressions derived from Fano's inequality can go
negative for uninformative inputs; calculators report the raw value next to
a [0, 1]-clamped one and flag vacuous results rather than hiding them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

from raglab.errors import ParameterDomainError


@dataclass(frozen=True)
class BoundInputs:
    """Inputs shared by the noise-impact and feed-forward failure bounds.

    H_w / I_wz: relevance-information entropy and its mutual information
    with the post-transformer embedding; H_w_given_z is derived (H_w - I_wz)
    so the defining identity cannot be violated by construction.
    H_Zr: entropy of the relevant-token embeddings actually used downstream.
    H_v / I_sv: total inference information and the inference share carried
    by the feed-forward input.  H_what / I_what_v: same pair for the
    aggregated relevance information.  delta: relevant fraction in (0, 1].
    """

    H_w: float = 1.0
    I_wz: float = 0.0
    H_Zr: float = 0.0
    delta: float = 1.0
    H_v: float = 0.0
    I_sv: float = 0.0
    H_what: float = 1.0
    I_what_v: float = 0.0
    c1: float = 1.0
    c2: float = 0.0
    C: float = 1.0

    def __post_init__(self):
        for name in ("H_w", "H_Zr", "H_v", "I_sv", "H_what"):
            if getattr(self, name) < 0.0:
                raise ParameterDomainError(f"{name} must be >= 0")
        if not 0.0 <= self.I_wz <= self.H_w:
            raise ParameterDomainError(
                f"I_wz must lie in [0, H_w]=[0, {self.H_w}], got {self.I_wz}"
            )
        # delta = 0 is permitted at the type so the feed-forward bound's
        # no-filtering case is expressible; operations that divide by delta
        # demand delta > 0 themselves.
        if not 0.0 <= self.delta <= 1.0:
            raise ParameterDomainError(f"delta must be in [0, 1], got {self.delta}")

    @property
    def H_w_given_z(self) -> float:
        return self.H_w - self.I_wz

    @property
    def H_what_given_v(self) -> float:
        return self.H_what - self.I_what_v


class FanoBound(NamedTuple):
    value: float
    raw: float


class MlpFailureBound(NamedTuple):
    raw: float
    clamped: float
    t_prime: float
    vacuous: bool


def fano_error_lower(H_w: float, I_wz: float) -> FanoBound:
    """Fano lower bound on the relevance-classification error rate.

    raw = (H_w - I_wz - 1) / H_w; value clamps raw into [0, 1] (a negative
    raw simply means the bound is vacuous).
    """
    if H_w <= 0.0:
        raise ParameterDomainError(f"H_w must be > 0, got {H_w}")
    if not 0.0 <= I_wz <= H_w:
        raise ParameterDomainError(f"I_wz must be in [0, H_w], got {I_wz}")
    raw = (H_w - I_wz - 1.0) / H_w
    return FanoBound(value=max(0.0, min(1.0, raw)), raw=raw)


def distraction_fraction(delta: float, p_e: float) -> float:
    """Fraction of post-filter tokens that are distractions.

    alpha = (1-delta) p_e / ((1-delta) p_e + delta (1-p_e)).  delta = 1
    (no distractors exist) gives 0 even when the denominator vanishes.
    """
    if not 0.0 < delta <= 1.0:
        raise ParameterDomainError(f"delta must be in (0, 1], got {delta}")
    if not 0.0 <= p_e <= 1.0:
        raise ParameterDomainError(f"p_e must be in [0, 1], got {p_e}")
    if delta == 1.0:
        return 0.0
    numerator = (1.0 - delta) * p_e
    denominator = numerator + delta * (1.0 - p_e)
    if denominator == 0.0:
        raise ParameterDomainError(
            f"distraction fraction undefined for delta={delta}, p_e={p_e}"
        )
    return numerator / denominator


def noise_impact_bound(inputs: BoundInputs) -> float:
    """Loss-gap upper bound from diluting the context with distractions.

    c1 * sqrt( (1-delta) H(w|z) / (delta (I(w;z)+1)) * H(Z_r) ) + c2.
    Strictly decreasing in delta and in I_wz while the radical is positive;
    delta = 1 or H_Zr = 0 collapse it to c2.
    """
    if inputs.delta == 0.0:
        raise ParameterDomainError("noise impact bound requires delta > 0")
    radicand = (
        (1.0 - inputs.delta)
        * inputs.H_w_given_z
        / (inputs.delta * (inputs.I_wz + 1.0))
        * inputs.H_Zr
    )
    return inputs.c1 * math.sqrt(radicand) + inputs.c2


def lora_spread_budget(epsilon: float) -> float:
    """Largest score-offset spread over relevant pairs compatible with an
    epsilon-approximation of the noise-masked attention: ln(1/(1-epsilon))."""
    if not 0.0 <= epsilon < 1.0:
        raise ParameterDomainError(f"epsilon must be in [0, 1), got {epsilon}")
    return math.log(1.0 / (1.0 - epsilon))


def lora_noise_gap(delta_spread: float, epsilon: float, n_tokens: int) -> float:
    """Required gap between noise-pair and relevant-pair offsets:
    delta_spread + ln(epsilon^2 n).  May be negative; reported raw."""
    if epsilon <= 0.0:
        raise ParameterDomainError(f"epsilon must be > 0, got {epsilon}")
    if n_tokens < 1:
        raise ParameterDomainError(f"n_tokens must be >= 1, got {n_tokens}")
    return delta_spread + math.log(epsilon * epsilon * n_tokens)


def mlp_failure_bound(inputs: BoundInputs, t_base: float = 0.0) -> MlpFailureBound:
    """Lower bound on the feed-forward network's failure probability.

    raw = (1/C) (H(v) - delta (I(what;v)+1)/H(what) * I(s;v)); the deviation
    threshold is t' = t_base + c1 sqrt((1-delta) (H(what|v)-1)/H(what) * I(s;v)) + c2.
    The radicand is floored at 0 (its (H(what|v)-1) factor is a Fano-style
    error term that loses meaning below zero).  Bounds outside (0, 1) are
    flagged vacuous and reported both raw and clamped.
    """
    if inputs.C <= 0.0:
        raise ParameterDomainError(f"C must be > 0, got {inputs.C}")
    if inputs.H_what <= 0.0:
        raise ParameterDomainError(f"H_what must be > 0, got {inputs.H_what}")
    raw = (
        inputs.H_v
        - inputs.delta * (inputs.I_what_v + 1.0) / inputs.H_what * inputs.I_sv
    ) / inputs.C
    radicand = (
        (1.0 - inputs.delta)
        * (inputs.H_what_given_v - 1.0)
        / inputs.H_what
        * inputs.I_sv
    )
    t_prime = t_base + inputs.c1 * math.sqrt(max(0.0, radicand)) + inputs.c2
    return MlpFailureBound(
        raw=raw,
        clamped=max(0.0, min(1.0, raw)),
        t_prime=t_prime,
        vacuous=raw <= 0.0 or raw >= 1.0,
    )
