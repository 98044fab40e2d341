"""Closed-form analysis of the erasure-fraction recurrence.

A layer whose parent layer has erased fraction t sees its own expected erased
fraction given by

    f(t) = (1 - p) * q^n * (q^(-n*t) - 1 + t) + p

where p is the layer's retrieval probability, q its per-edge non-connection
probability, and n the node count of the layer above.  The growth function
g(t) = f(t) - t controls whether the cascade sustains: it has an interior
zero t_hat (where the cascade stabilises) exactly when p lies below the
threshold h(q, n) = 1 - 1/(q^n - n*ln(q)).

This module evaluates f, g, g', the critical point of g, the threshold, the
first zero, the whole-layer erasure requirement, and the parameter sweeps
behind the f-vs-t and threshold-by-layer figures.  Everything here is pure
and deterministic; the Monte Carlo counterpart lives in raglab.fission.tree.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from raglab.errors import NumericFailureError, ParameterDomainError

# Bisection defaults: derivative-free and robust; the bracket [0, t*] is
# sign-changing whenever an interior zero exists.
BISECT_TOL = 1e-10
BISECT_MAX_ITER = 200

# Interior grid points used to verify g < 0 on (t_hat, 1).
_SIGN_GRID_POINTS = 100
# Values this close to zero are treated as boundary noise, not violations.
_SIGN_SLACK = 1e-12


@dataclass(frozen=True)
class RecurrenceParams:
    """Parameters of one recurrence step: p in [0,1), q in (0,1), n >= 1."""

    p: float
    q: float
    n: int

    def __post_init__(self):
        if not 0.0 <= self.p < 1.0:
            raise ParameterDomainError(f"p must be in [0, 1), got {self.p}")
        if not 0.0 < self.q < 1.0:
            raise ParameterDomainError(f"q must be in (0, 1), got {self.q}")
        if self.n < 1 or self.n != int(self.n):
            raise ParameterDomainError(f"n must be a positive integer, got {self.n}")
        # q^n and q^(-n*t) must stay finite in double precision.
        if self.n * abs(math.log(self.q)) > 700.0:
            raise ParameterDomainError(
                f"q^n underflows for q={self.q}, n={self.n}; shrink n or raise q"
            )


@dataclass(frozen=True)
class FixedPointReport:
    """Outcome of the fixed-point search for one parameter triple.

    When has_fixed_point is true and the point is not degenerate,
    0 < t_hat < critical_t < 1 and |g(t_hat)| <= the search tolerance.
    p = 0 yields the degenerate fixed point t_hat = 0 (g(0) = 0 exactly).
    """

    params: RecurrenceParams
    threshold_h: float
    has_fixed_point: bool
    critical_t: float | None
    t_hat: float | None
    residual: float | None
    degenerate: bool = False


@dataclass(frozen=True)
class LayerErasureRequirement:
    """Retrieval probability needed to erase a whole layer with probability delta."""

    delta: float
    q: float
    n: int
    epsilon: float
    p_exact: float
    p_approx: float


@dataclass(frozen=True)
class DepthBudget:
    """Extraction-cost accounting: lam*l + t_filter layers to use a document
    about a depth-l node, versus l layers of direct reasoning."""

    lam: float
    t_filter: float

    def __post_init__(self):
        if not 0.0 < self.lam < 1.0:
            raise ParameterDomainError(f"lam must be in (0, 1), got {self.lam}")
        if self.t_filter < 0:
            raise ParameterDomainError(f"t_filter must be >= 0, got {self.t_filter}")

    @property
    def cutoff_layer(self) -> float:
        """Depth below which extraction cannot beat direct reasoning."""
        return self.t_filter / (1.0 - self.lam)

    def extract_depth(self, layer: float) -> float:
        return self.lam * layer + self.t_filter


@dataclass(frozen=True)
class DepthBudgetEval:
    budget: DepthBudget
    layer: float
    extract_depth: float
    cutoff_layer: float
    extraction_beats_direct: bool
    tie: bool


def _check_t(t: float) -> None:
    if not 0.0 <= t <= 1.0:
        raise ParameterDomainError(f"t must be in [0, 1], got {t}")


def eval_f(t: float, params: RecurrenceParams) -> float:
    """Expected child-layer erased fraction given parent fraction t.

    f(0) = p exactly; f(1) = 1 up to rounding.
    """
    _check_t(t)
    lq = math.log(params.q)
    qn = math.exp(params.n * lq)
    return (1.0 - params.p) * qn * (math.exp(-params.n * t * lq) - 1.0 + t) + params.p


def eval_g(t: float, params: RecurrenceParams) -> float:
    """Growth g(t) = f(t) - t; negative means the cascade shrinks."""
    return eval_f(t, params) - t


def eval_g_prime(t: float, params: RecurrenceParams) -> float:
    """Analytic derivative g'(t) = (1-p) q^n (-n q^(-nt) ln q + 1) - 1."""
    _check_t(t)
    lq = math.log(params.q)
    qn = math.exp(params.n * lq)
    return (1.0 - params.p) * qn * (-params.n * math.exp(-params.n * t * lq) * lq + 1.0) - 1.0


def threshold_h(q: float, n: int) -> float:
    """Fission threshold h(q, n) = 1 - 1/(q^n - n ln q).

    An interior fixed point exists iff p < h(q, n).  As q -> 1 the value
    tends to 0 (reported, not an error).
    """
    if not 0.0 < q < 1.0:
        raise ParameterDomainError(f"q must be in (0, 1), got {q}")
    if n < 1 or n != int(n):
        raise ParameterDomainError(f"n must be a positive integer, got {n}")
    lq = math.log(q)
    if n * abs(lq) > 700.0:
        raise ParameterDomainError(f"q^n underflows for q={q}, n={n}")
    return 1.0 - 1.0 / (math.exp(n * lq) - n * lq)


def critical_point(params: RecurrenceParams) -> float | None:
    """Location t* in (0, 1) where g'(t*) = 0, or None when t* >= 1.

    Closed form: t* = 1 + ln((p-1) n ln q / (1 - (1-p) q^n)) / (n ln q).
    g is convex, so t* is its unique minimum; t* < 1 exactly when
    p < h(q, n).  t* > 0 always holds on the valid domain.
    """
    lq = math.log(params.q)
    qn = math.exp(params.n * lq)
    numerator = (params.p - 1.0) * params.n * lq  # > 0 for p < 1, q < 1
    denominator = 1.0 - (1.0 - params.p) * qn  # > 0 since (1-p) q^n < 1
    t_star = 1.0 + math.log(numerator / denominator) / (params.n * lq)
    if not 0.0 < t_star < 1.0:
        return None
    return t_star


def _bisect(func, lo: float, hi: float, tol: float, max_iter: int) -> float:
    """Bisection on [lo, hi] with func(lo) > 0 > func(hi); returns x with
    |func(x)| <= tol."""
    f_lo = func(lo)
    f_hi = func(hi)
    if f_lo <= 0.0 or f_hi >= 0.0:
        raise NumericFailureError(
            f"bracket [{lo}, {hi}] does not change sign: f(lo)={f_lo}, f(hi)={f_hi}"
        )
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        f_mid = func(mid)
        if abs(f_mid) <= tol:
            return mid
        if f_mid > 0.0:
            lo = mid
        else:
            hi = mid
    raise NumericFailureError(
        f"bisection did not reach |f| <= {tol} within {max_iter} iterations"
    )


def first_zero(params: RecurrenceParams, tol: float = BISECT_TOL) -> FixedPointReport:
    """First zero t_hat of g in (0, 1), when p < h(q, n).

    Bisects on [0, t*] (g(0) = p > 0, g(t*) < 0) and then verifies that g
    stays negative on an interior grid of (t_hat, 1).  For p >= h no interior
    fixed point exists; for p = 0 the fixed point degenerates to t_hat = 0.
    """
    if tol <= 0.0:
        raise ParameterDomainError(f"tol must be > 0, got {tol}")
    h = threshold_h(params.q, params.n)
    t_star = critical_point(params)

    if params.p == 0.0:
        return FixedPointReport(
            params=params,
            threshold_h=h,
            has_fixed_point=True,
            critical_t=t_star,
            t_hat=0.0,
            residual=0.0,
            degenerate=True,
        )
    if params.p >= h or t_star is None:
        return FixedPointReport(
            params=params,
            threshold_h=h,
            has_fixed_point=False,
            critical_t=t_star,
            t_hat=None,
            residual=None,
        )

    t_hat = _bisect(lambda t: eval_g(t, params), 0.0, t_star, tol, BISECT_MAX_ITER)
    # g must stay negative strictly inside (t_hat, 1); convexity makes any
    # sizeable positive value there a genuine failure.
    step = (1.0 - t_hat) / (_SIGN_GRID_POINTS + 1)
    for k in range(1, _SIGN_GRID_POINTS + 1):
        t = t_hat + k * step
        g_t = eval_g(t, params)
        if g_t >= _SIGN_SLACK:
            raise NumericFailureError(
                f"g({t}) = {g_t} >= 0 past the fixed point t_hat={t_hat}"
            )
    return FixedPointReport(
        params=params,
        threshold_h=h,
        has_fixed_point=True,
        critical_t=t_star,
        t_hat=t_hat,
        residual=abs(eval_g(t_hat, params)),
    )


def erase_layer_requirement(delta: float, q: float, n: int) -> LayerErasureRequirement:
    """Retrieval probability required to erase a whole n-node layer w.p. delta.

    Exact form:  p = (z - xi) / (1 - xi) with z = delta^(1/n) and
    xi = q^(n - n z) + q^n z - q^n.  The approximate form drops the
    epsilon * q^n term: p ~ 1 - epsilon / (1 - q^(epsilon n)), epsilon = 1 - z.

    As delta -> 1 both forms tend to the fission threshold h(q, n), the
    retrieval level at which the cascade just sustains to t_hat -> 1.
    """
    if not 0.0 < delta < 1.0:
        raise ParameterDomainError(f"delta must be in (0, 1), got {delta}")
    if not 0.0 < q < 1.0:
        raise ParameterDomainError(f"q must be in (0, 1), got {q}")
    if n < 1 or n != int(n):
        raise ParameterDomainError(f"n must be a positive integer, got {n}")
    lq = math.log(q)
    if n * abs(lq) > 700.0:
        raise ParameterDomainError(f"q^n underflows for q={q}, n={n}")

    z = delta ** (1.0 / n)
    epsilon = 1.0 - z
    qn = math.exp(n * lq)
    xi = math.exp(n * (1.0 - z) * lq) + qn * z - qn
    p_exact = (z - xi) / (1.0 - xi)
    p_approx = 1.0 - epsilon / (1.0 - math.exp(epsilon * n * lq))
    return LayerErasureRequirement(
        delta=delta, q=q, n=n, epsilon=epsilon, p_exact=p_exact, p_approx=p_approx
    )


def coupled_grid(
    q_lo: float = 0.1,
    q_hi: float = 0.8,
    n_lo: int = 2,
    n_hi: int = 16,
    steps: int = 15,
) -> list[tuple[float, int]]:
    """(q, n) pairs on the linear coupling q(n) = q_lo + (q_hi-q_lo)(n-n_lo)/(n_hi-n_lo).

    n runs over `steps` evenly spaced integers from n_lo to n_hi; q is
    computed from the rounded n so the coupling holds exactly.
    """
    if steps < 2:
        raise ParameterDomainError(f"steps must be >= 2, got {steps}")
    if n_hi <= n_lo:
        raise ParameterDomainError("n_hi must exceed n_lo")
    slope = (q_hi - q_lo) / (n_hi - n_lo)
    pairs = []
    for i in range(steps):
        n = round(n_lo + (n_hi - n_lo) * i / (steps - 1))
        q = q_lo + slope * (n - n_lo)
        pairs.append((q, int(n)))
    return pairs


def figure_curves(kind: str, config: dict) -> list[dict]:
    """Tables behind the two analysis figures.

    kind="f_vs_t": samples (t, f(t), t) for one parameter triple; config keys
    p, q, n, and optional points (default 101).

    kind="threshold_by_layer": per-layer whole-layer-erasure requirements on
    the coupled (q, n) grid; config keys deltas (list), optional steps,
    q_lo/q_hi/n_lo/n_hi.  Layer 0 is the bottom of the tree (largest n).
    """
    if kind == "f_vs_t":
        params = RecurrenceParams(p=config["p"], q=config["q"], n=int(config["n"]))
        points = int(config.get("points", 101))
        if points < 2:
            raise ParameterDomainError(f"points must be >= 2, got {points}")
        rows = []
        for i in range(points):
            t = i / (points - 1)
            rows.append({"t": t, "f_t": eval_f(t, params), "identity": t})
        return rows

    if kind == "threshold_by_layer":
        deltas = config.get("deltas", [0.5, 0.7, 0.9])
        grid = coupled_grid(
            q_lo=config.get("q_lo", 0.1),
            q_hi=config.get("q_hi", 0.8),
            n_lo=int(config.get("n_lo", 2)),
            n_hi=int(config.get("n_hi", 16)),
            steps=int(config.get("steps", 15)),
        )
        # Bottom layers are wide: layer index 0 maps to the largest-n grid point.
        rows = []
        for layer, (q, n) in enumerate(reversed(grid)):
            for delta in deltas:
                req = erase_layer_requirement(delta, q, n)
                rows.append(
                    {
                        "layer": layer,
                        "q": q,
                        "n": n,
                        "delta": delta,
                        "p_exact": req.p_exact,
                        "p_approx": req.p_approx,
                    }
                )
        return rows

    raise ParameterDomainError(f"unknown curve kind: {kind!r}")


def depth_budget(lam: float, t_filter: float, layer: float) -> DepthBudgetEval:
    """Evaluate whether document extraction beats direct reasoning at `layer`.

    Extraction costs lam*layer + t_filter layers; it wins exactly when the
    node sits above the cutoff t_filter/(1-lam).
    """
    if layer < 0:
        raise ParameterDomainError(f"layer must be >= 0, got {layer}")
    budget = DepthBudget(lam=lam, t_filter=t_filter)
    extract = budget.extract_depth(layer)
    return DepthBudgetEval(
        budget=budget,
        layer=layer,
        extract_depth=extract,
        cutoff_layer=budget.cutoff_layer,
        extraction_beats_direct=extract < layer,
        tie=extract == layer,
    )
