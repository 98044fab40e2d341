"""Random layered reasoning trees and the retrieval-erasure cascade.

A tree has layers 0..L-1 from bottom to top; the top layer holds a single
node.  Each node in layer l connects to each node of layer l+1 independently
with probability 1 - q_l; nodes left isolated are repaired with one uniformly
random parent.  Retrieval marks nodes independently with the layer's p.
Erasure sweeps top-down: a node is erased when it is marked, or when every
parent is erased (a cascade).  The Monte Carlo driver estimates the per-layer
erased fractions t_l that raglab.fission.analysis predicts in closed form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from raglab.errors import ParameterDomainError
from raglab.fission.analysis import RecurrenceParams, first_zero

CAUSE_NONE = 0
CAUSE_RETRIEVED = 1
CAUSE_CASCADED = 2

# Appendix-style parameter draws are clamped into this open box so the
# closed-form expressions stay finite.
CLAMP_LO = 0.01
CLAMP_HI = 0.99


@dataclass(frozen=True)
class LayerParams:
    """Per-layer generative parameters.

    p: probability a node is directly replaced by a retrieved document.
    q: probability a (node, parent) pair is NOT connected.
    n_nodes: node count of the layer.
    """

    p: float
    q: float
    n_nodes: int

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise ParameterDomainError(f"p must be in [0, 1], got {self.p}")
        if not 0.0 < self.q < 1.0:
            raise ParameterDomainError(f"q must be in (0, 1), got {self.q}")
        if self.n_nodes < 1 or self.n_nodes != int(self.n_nodes):
            raise ParameterDomainError(
                f"n_nodes must be a positive integer, got {self.n_nodes}"
            )


@dataclass(frozen=True, eq=False)
class TreeTopology:
    """Explicit layered DAG: edges[l][i, j] connects node (l, i) to parent (l+1, j)."""

    layer_sizes: tuple[int, ...]
    edges: tuple[np.ndarray, ...]

    def __post_init__(self):
        if not self.layer_sizes:
            raise ParameterDomainError("tree needs at least one layer")
        if self.layer_sizes[-1] != 1:
            raise ParameterDomainError(
                f"top layer must have exactly 1 node, got {self.layer_sizes[-1]}"
            )
        if len(self.edges) != len(self.layer_sizes) - 1:
            raise ParameterDomainError("need one edge matrix per consecutive layer pair")
        for l, adj in enumerate(self.edges):
            expected = (self.layer_sizes[l], self.layer_sizes[l + 1])
            if adj.shape != expected:
                raise ParameterDomainError(
                    f"edges[{l}] has shape {adj.shape}, expected {expected}"
                )
            if not adj.any(axis=1).all():
                raise ParameterDomainError(
                    f"layer {l} contains nodes without parents (repair missing)"
                )

    @property
    def num_layers(self) -> int:
        return len(self.layer_sizes)

    def parents(self, layer: int, index: int) -> np.ndarray:
        """Parent indices of node (layer, index) in layer+1."""
        return np.flatnonzero(self.edges[layer][index])


@dataclass(frozen=True, eq=False)
class RetrievalMark:
    """Per-node retrieval flags, one boolean array per layer."""

    retrieved: tuple[np.ndarray, ...]


@dataclass(frozen=True, eq=False)
class ErasureState:
    """Erasure outcome: flags, per-node causes, and per-layer erased fractions."""

    erased: tuple[np.ndarray, ...]
    cause: tuple[np.ndarray, ...]
    t_per_layer: tuple[float, ...]


@dataclass(frozen=True)
class FissionRunResult:
    """Aggregated Monte Carlo estimate of per-layer erased fractions.

    Fields are plain tuples so two results from identical seeds compare equal
    bit-for-bit.  std_t uses the sample standard deviation (ddof=1) and is
    reported as 0.0 with single_replicate=True when replicates == 1.
    """

    params: tuple[LayerParams, ...]
    replicates: int
    seed: int
    mean_t: tuple[float, ...]
    std_t: tuple[float, ...]
    t_samples: tuple[tuple[float, ...], ...]
    single_replicate: bool


def _check_params(params: list[LayerParams] | tuple[LayerParams, ...]) -> None:
    if not params:
        raise ParameterDomainError("params must be non-empty")
    if params[-1].n_nodes != 1:
        raise ParameterDomainError("last layer must have n_nodes = 1")


def build_tree(params: list[LayerParams], rng: np.random.Generator) -> TreeTopology:
    """Draw a random topology; q is taken from the child layer of each pair."""
    _check_params(params)
    sizes = tuple(lp.n_nodes for lp in params)
    edges = []
    for l in range(len(params) - 1):
        n_child, n_parent = sizes[l], sizes[l + 1]
        adj = rng.random((n_child, n_parent)) < (1.0 - params[l].q)
        isolated = np.flatnonzero(~adj.any(axis=1))
        if isolated.size:
            adj[isolated, rng.integers(0, n_parent, size=isolated.size)] = True
        edges.append(adj)
    return TreeTopology(layer_sizes=sizes, edges=tuple(edges))


def apply_retrieval(
    tree: TreeTopology, params: list[LayerParams], rng: np.random.Generator
) -> RetrievalMark:
    """Mark each node independently with its layer's retrieval probability."""
    if len(params) != tree.num_layers:
        raise ParameterDomainError(
            f"got {len(params)} layer params for {tree.num_layers} layers"
        )
    marks = tuple(
        rng.random(tree.layer_sizes[l]) < params[l].p for l in range(tree.num_layers)
    )
    return RetrievalMark(retrieved=marks)


def propagate_fission(tree: TreeTopology, marks: RetrievalMark) -> ErasureState:
    """Top-down erasure sweep.

    The top node is erased only if marked (it has no parents); every other
    node is erased when marked (cause Retrieved) or when all its parents are
    erased (cause Cascaded).  Marking takes precedence in the cause tag.
    """
    if len(marks.retrieved) != tree.num_layers:
        raise ParameterDomainError("marks do not match tree layers")
    for l, flags in enumerate(marks.retrieved):
        if flags.shape != (tree.layer_sizes[l],):
            raise ParameterDomainError(f"marks for layer {l} have wrong shape")

    top = tree.num_layers - 1
    erased: list[np.ndarray] = [None] * tree.num_layers  # type: ignore[list-item]
    cause: list[np.ndarray] = [None] * tree.num_layers  # type: ignore[list-item]

    erased[top] = marks.retrieved[top].copy()
    cause[top] = np.where(erased[top], CAUSE_RETRIEVED, CAUSE_NONE).astype(np.int8)

    for l in range(top - 1, -1, -1):
        live_parent = (tree.edges[l] & ~erased[l + 1][None, :]).any(axis=1)
        cascaded = ~live_parent
        marked = marks.retrieved[l]
        erased[l] = marked | cascaded
        c = np.full(tree.layer_sizes[l], CAUSE_NONE, dtype=np.int8)
        c[cascaded] = CAUSE_CASCADED
        c[marked] = CAUSE_RETRIEVED
        cause[l] = c

    fractions = tuple(
        float(np.count_nonzero(e)) / size for e, size in zip(erased, tree.layer_sizes)
    )
    return ErasureState(erased=tuple(erased), cause=tuple(cause), t_per_layer=fractions)


def effective_depth(state: ErasureState) -> int:
    """Remaining reasoning depth once fully erased layers (and everything
    below the highest one) are dropped."""
    full = [l for l, t in enumerate(state.t_per_layer) if t == 1.0]
    if not full:
        return len(state.t_per_layer)
    return len(state.t_per_layer) - (max(full) + 1)


def run_monte_carlo(
    params: list[LayerParams], replicates: int, seed: int
) -> FissionRunResult:
    """Estimate per-layer erased fractions over independent replicates.

    Each replicate draws a fresh tree and fresh marks from its own stream
    keyed by (seed, replicate index), so results do not depend on execution
    order and repeat bit-for-bit under the same seed.
    """
    _check_params(params)
    if replicates < 1:
        raise ParameterDomainError(f"replicates must be >= 1, got {replicates}")
    if seed < 0:
        raise ParameterDomainError(f"seed must be >= 0, got {seed}")

    samples = np.empty((replicates, len(params)))
    for rep in range(replicates):
        rng = np.random.default_rng((seed, rep))
        tree = build_tree(params, rng)
        marks = apply_retrieval(tree, params, rng)
        samples[rep] = propagate_fission(tree, marks).t_per_layer

    single = replicates == 1
    mean_t = tuple(float(x) for x in samples.mean(axis=0))
    std_t = tuple(
        0.0 if single else float(x) for x in samples.std(axis=0, ddof=0 if single else 1)
    )
    return FissionRunResult(
        params=tuple(params),
        replicates=replicates,
        seed=seed,
        mean_t=mean_t,
        std_t=std_t,
        t_samples=tuple(tuple(float(x) for x in row) for row in samples),
        single_replicate=single,
    )


def single_transition_mc(
    t_parent: float,
    p: float,
    q: float,
    parent_n: int,
    child_n: int,
    replicates: int,
    seed: int,
) -> tuple[float, int]:
    """Empirical child-layer erased fraction with the parent fraction pinned.

    Exercises the real build/propagate machinery on a [child, parent, root]
    tree: the parent layer's marks are forced so that exactly
    round(t_parent * parent_n) of its nodes are erased (which nodes is
    irrelevant; edges are exchangeable), the root is never erased, and the
    child layer is marked at rate p.  Returns (erased fraction, node samples).
    """
    if not 0.0 <= t_parent <= 1.0:
        raise ParameterDomainError(f"t_parent must be in [0, 1], got {t_parent}")
    if replicates < 1:
        raise ParameterDomainError(f"replicates must be >= 1, got {replicates}")
    params = [
        LayerParams(p=p, q=q, n_nodes=child_n),
        LayerParams(p=0.0, q=q, n_nodes=parent_n),
        LayerParams(p=0.0, q=q, n_nodes=1),
    ]
    r = round(t_parent * parent_n)
    parent_marks = np.zeros(parent_n, dtype=bool)
    parent_marks[:r] = True

    erased_total = 0
    for rep in range(replicates):
        rng = np.random.default_rng((seed, rep))
        tree = build_tree(params, rng)
        child_marks = rng.random(child_n) < p
        marks = RetrievalMark(
            retrieved=(child_marks, parent_marks.copy(), np.zeros(1, dtype=bool))
        )
        state = propagate_fission(tree, marks)
        erased_total += int(np.count_nonzero(state.erased[0]))
    total = replicates * child_n
    return erased_total / total, total


def _appendix_layer_draws(
    layers: int, sigma: float, rng: np.random.Generator
) -> tuple[list[LayerParams], list[str]]:
    """Draw the appendix parameter schedule, clamping degenerate values.

    Layer 0 is the bottom: means p = q = 0.8 - 0.06*l and n = 16 - 1.4*l
    shrink toward the top.  p and q are drawn independently (the source
    protocol does not say whether they share a draw; flagged, not guessed).
    """
    params = []
    flags = []
    for l in range(layers):
        p_raw = rng.normal(0.8 - 0.06 * l, sigma)
        q_raw = rng.normal(0.8 - 0.06 * l, sigma)
        n_raw = rng.normal(16.0 - 1.4 * l, sigma)
        p = min(max(p_raw, CLAMP_LO), CLAMP_HI)
        q = min(max(q_raw, CLAMP_LO), CLAMP_HI)
        n = max(1, round(n_raw))
        layer_flags = []
        if p != p_raw:
            layer_flags.append("p")
        if q != q_raw:
            layer_flags.append("q")
        if round(n_raw) < 1:  # clamped, not merely rounded
            layer_flags.append("n")
        params.append(LayerParams(p=p, q=q, n_nodes=n))
        flags.append(";".join(layer_flags))
    return params, flags


def analytic_first_zero(p: float, q: float, n_above: int) -> float:
    """Per-layer analytic target t_hat.

    The first zero of g in (0, 1] given the layer's p, q and the node count
    of the layer above: the interior fixed point when p < h(q, n), otherwise
    1.0 (the cascade consumes the whole layer; g's first zero is at 1).
    """
    report = first_zero(RecurrenceParams(p=p, q=q, n=n_above))
    if report.has_fixed_point:
        return report.t_hat  # type: ignore[return-value]
    return 1.0


def replicate_appendix_sim(
    layers: int = 10,
    replicates: int = 10,
    seed: int = 0,
    sigma: float = 0.1,
) -> list[dict]:
    """Simulated vs analytic erased fractions under the appendix schedule.

    Draws one parameter schedule (seeded), runs the Monte Carlo over a tree
    capped by a never-retrieved virtual root (so the top real layer's
    erasure reduces to its retrieval rate), and attaches the analytic t_hat
    per layer.  For the top real layer t_hat is its retrieval probability
    p (the recurrence base case).  Rows are ordered bottom layer first.

    sigma is the standard deviation of the parameter draws; the protocol's
    "0.01" is read as a variance (sigma = 0.1) and overridable here.
    """
    if layers < 2:
        raise ParameterDomainError(f"layers must be >= 2, got {layers}")
    if replicates < 1:
        raise ParameterDomainError(f"replicates must be >= 1, got {replicates}")
    if seed < 0:
        raise ParameterDomainError(f"seed must be >= 0, got {seed}")

    words = np.random.SeedSequence(seed).generate_state(2)
    draw_rng = np.random.default_rng(int(words[0]))
    mc_seed = int(words[1])

    layer_params, clamp_flags = _appendix_layer_draws(layers, sigma, draw_rng)
    # Virtual root: never retrieved, so the top real layer follows the
    # recurrence base case t = p.  Its q is unused (no layer above it).
    sim_params = layer_params + [LayerParams(p=0.0, q=0.5, n_nodes=1)]
    result = run_monte_carlo(sim_params, replicates, mc_seed)

    rows = []
    for l in range(layers):
        lp = layer_params[l]
        if l < layers - 1:
            t_hat = analytic_first_zero(lp.p, lp.q, layer_params[l + 1].n_nodes)
        else:
            t_hat = lp.p
        flags = clamp_flags[l]
        if result.single_replicate:
            flags = ";".join(filter(None, [flags, "std_undefined"]))
        rows.append(
            {
                "layer": l,
                "p": lp.p,
                "q": lp.q,
                "n": lp.n_nodes,
                "mean_t": result.mean_t[l],
                "std_t": result.std_t[l],
                "t_hat": t_hat,
                "clamped_flags": flags,
            }
        )
    return rows


def figure_one_example() -> tuple[TreeTopology, RetrievalMark]:
    """Hand-built 4-layer instance of the worked erasure example.

    The prose fixes the sole-child relations (one node under the first
    top-level document, two under the third) and which nodes are retrieved;
    the remaining adjacency and the bottom width (2) are fixture choices,
    not ground truth.  Layers are bottom-up: sizes (2, 4, 3, 1); retrieval
    marks the outer nodes of layer 2 and the second node of layer 1.
    """

    def adj(n_child, n_parent, pairs):
        m = np.zeros((n_child, n_parent), dtype=bool)
        for i, j in pairs:
            m[i, j] = True
        return m

    edges = (
        adj(2, 4, [(0, 0), (1, 1)]),
        adj(4, 3, [(0, 0), (1, 1), (2, 2), (3, 2)]),
        adj(3, 1, [(0, 0), (1, 0), (2, 0)]),
    )
    tree = TreeTopology(layer_sizes=(2, 4, 3, 1), edges=edges)
    marks = RetrievalMark(
        retrieved=(
            np.array([False, False]),
            np.array([False, True, False, False]),
            np.array([True, False, True]),
            np.array([False]),
        )
    )
    return tree, marks
