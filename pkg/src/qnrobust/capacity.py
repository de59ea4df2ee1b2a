"""End-to-end capacity: s-t min-cut on the capacity-weighted graph, ensemble averages and bounds.

Any object exposing ``n_nodes``, ``edges`` (an (m, 2) int array) and
``edge_capacities`` (length m) works as a graph here; :class:`GeoGraph` derives
the capacities from geometry, :class:`WeightedGraph` takes them verbatim.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Protocol, Sequence

import igraph
import numpy as np

from .errors import DataError
from .geo_channel import ChannelParams, edge_capacity, pairwise_distance
from .netgen import ScaleFreeParams, SeedLike, WaxmanParams, make_rng, seed_sequence


class CapacityGraph(Protocol):
    n_nodes: int
    edges: np.ndarray
    edge_capacities: np.ndarray


class WeightedGraph(NamedTuple):
    """Plain undirected graph with explicit edge capacities."""

    n_nodes: int
    edges: np.ndarray
    edge_capacities: np.ndarray

    @classmethod
    def from_edges(cls, n_nodes: int, weighted_edges: Sequence[tuple[int, int, float]]) -> WeightedGraph:
        e = np.array([(u, v) for u, v, _ in weighted_edges], dtype=np.int64).reshape(-1, 2)
        c = np.array([w for _, _, w in weighted_edges], dtype=float)
        return cls(n_nodes, e, c)


@dataclass(frozen=True)
class CapacityEstimate:
    mean: float
    stderr: float
    n_pairs: int
    n_graphs: int


class FlowSolver:
    """Reusable max-flow engine for many s-t queries on one graph.

    Undirected edges act as two opposing arcs sharing one capacity; igraph's
    push-relabel solver works on real-valued capacities directly.
    """

    def __init__(self, g: CapacityGraph):
        self.n_nodes = int(g.n_nodes)
        self.capacities = np.asarray(g.edge_capacities, dtype=float)
        self._graph = igraph.Graph(n=self.n_nodes, edges=np.asarray(g.edges).tolist(), directed=False)
        self._graph.es["capacity"] = self.capacities.tolist()

    def _check(self, s: int, t: int) -> None:
        if s == t:
            raise DataError("source and sink must differ")
        for x in (s, t):
            if not 0 <= x < self.n_nodes:
                raise DataError(f"node {x} is not in the graph")

    def value(self, s: int, t: int) -> float:
        self._check(s, t)
        return self._graph.maxflow_value(int(s), int(t), "capacity")

    def cut(self, s: int, t: int) -> tuple[float, frozenset[int], float]:
        """Flow value, source side of a minimum cut, and that cut's summed capacity."""
        self._check(s, t)
        c = self._graph.mincut(int(s), int(t), "capacity")
        side = frozenset(c.partition[0]) if s in c.partition[0] else frozenset(c.partition[1])
        cut_capacity = float(self.capacities[list(c.cut)].sum()) if len(c.cut) else 0.0
        return float(c.value), side, cut_capacity


def min_cut(g: CapacityGraph, s: int, t: int) -> float:
    """End-to-end capacity between ``s`` and ``t``; zero when they are disconnected."""
    return FlowSolver(g).value(s, t)


def node_capacity(g: CapacityGraph, x: int) -> float:
    if not 0 <= x < g.n_nodes:
        raise DataError(f"node {x} is not in the graph")
    e = np.asarray(g.edges)
    touches = (e[:, 0] == x) | (e[:, 1] == x) if len(e) else np.zeros(0, dtype=bool)
    return float(np.asarray(g.edge_capacities)[touches].sum())


def unrank_pairs(n: int, ranks: np.ndarray) -> np.ndarray:
    """Map ranks in ``[0, C(n,2))`` to pairs ``(i, j)``, ``i < j``, in row-major order."""
    i = np.arange(n)
    row_start = i * n - i * (i + 1) // 2
    rows = np.searchsorted(row_start, ranks, side="right") - 1
    cols = ranks - row_start[rows] + rows + 1
    return np.column_stack((rows, cols))


def sample_pairs(n: int, n_pairs: int, rng: np.random.Generator) -> np.ndarray:
    """Distinct unordered node pairs drawn uniformly without replacement.

    When fewer than ``n_pairs`` pairs exist, all of them are returned.
    """
    total = n * (n - 1) // 2
    if total <= n_pairs:
        return unrank_pairs(n, np.arange(total))
    return unrank_pairs(n, np.sort(rng.choice(total, size=n_pairs, replace=False)))


def pair_capacities(g: CapacityGraph, pairs: np.ndarray, solver: FlowSolver | None = None) -> np.ndarray:
    solver = solver or FlowSolver(g)
    return np.array([solver.value(int(s), int(t)) for s, t in pairs], dtype=float)


def graph_capacity(g: CapacityGraph, n_pairs: int, seed: SeedLike = None) -> tuple[float, float, int]:
    """Mean pair capacity of one graph, its pair-level standard error, and the pair count."""
    if g.n_nodes < 2:
        raise DataError("capacity needs at least two nodes")
    values = pair_capacities(g, sample_pairs(g.n_nodes, n_pairs, make_rng(seed)))
    se = float(values.std(ddof=1) / math.sqrt(len(values))) if len(values) > 1 else 0.0
    return float(values.mean()), se, len(values)


def ensemble_capacity(graphs: Sequence[CapacityGraph], n_pairs: int, seed: SeedLike = None) -> CapacityEstimate:
    """Average pair capacity over graphs; stderr over per-graph means.

    With a single graph the pair-level standard error is reported instead.
    """
    if not graphs:
        raise DataError("no graphs given")
    for g in graphs:
        if g.n_nodes < 2:
            raise DataError("every graph needs at least two nodes")
    seeds = seed_sequence(seed).spawn(len(graphs))
    per_graph = [graph_capacity(g, n_pairs, s) for g, s in zip(graphs, seeds)]
    means = np.array([m for m, _, _ in per_graph])
    used = sum(k for _, _, k in per_graph)
    if len(graphs) == 1:
        se = per_graph[0][1]
    else:
        se = float(means.std(ddof=1) / math.sqrt(len(means)))
    return CapacityEstimate(float(means.mean()), se, used, len(graphs))


class GiantRelation(NamedTuple):
    """Pair-capacity sums over all pairs (``lhs``) and over giant-component pairs (``rhs``)."""

    lhs: float
    rhs: float

    @property
    def relative_gap(self) -> float:
        return (self.lhs - self.rhs) / self.lhs if self.lhs > 0 else 0.0


def giant_capacity_relation(g: CapacityGraph, n_pairs: int, seed: SeedLike = None) -> GiantRelation:
    """Estimate ``<C> * C(N,2)`` and ``<C_G> * C(N_G,2)``.

    Pairs straddling two components have zero capacity, so the all-pairs sum
    is stratified by component: each component with at most ``n_pairs``
    internal pairs is enumerated, larger ones get ``n_pairs`` sampled pairs.
    The giant stratum's sample is shared by both sides, hence ``lhs >= rhs``
    holds exactly and the gap is the small-component contribution.
    """
    from .analytics import component_labels

    _, labels = component_labels(g)
    sizes = np.bincount(labels)
    giant = int(np.argmax(sizes))
    if sizes[giant] < 2:
        raise DataError("giant component has fewer than two nodes")
    rng = make_rng(seed)
    solver = FlowSolver(g)
    rhs = 0.0
    lhs = 0.0
    # giant first so its sample does not depend on how many small clusters exist
    order = [giant] + [c for c in np.argsort(-sizes, kind="stable") if c != giant and sizes[c] >= 2]
    for c in order:
        members = np.flatnonzero(labels == c)
        local = sample_pairs(len(members), n_pairs, rng)
        vals = pair_capacities(g, members[local], solver)
        total = vals.mean() * math.comb(len(members), 2)
        lhs += total
        if c == giant:
            rhs = total
    return GiantRelation(float(lhs), float(rhs))


@dataclass(frozen=True)
class ZetaEstimate:
    value: float
    stderr: float


def _stratified_pair_distances(R: float, n_samples: int, rng: np.random.Generator) -> tuple[np.ndarray, int]:
    """Pair distances with the first point stratified on a k-by-k grid, two draws per cell."""
    k = max(1, math.isqrt(n_samples // 2))
    cell = 2.0 * R / k
    ix, iy = np.meshgrid(np.arange(k), np.arange(k), indexing="ij")
    corners = np.column_stack((ix.ravel(), iy.ravel())).repeat(2, axis=0) * cell - R
    first = corners + rng.random(corners.shape) * cell
    second = rng.uniform(-R, R, size=first.shape)
    return pairwise_distance(first, second), k * k


def _stratified_mean(values: np.ndarray, n_strata: int) -> tuple[float, float]:
    v = values.reshape(n_strata, -1)
    stratum_means = v.mean(axis=1)
    var = v.var(axis=1, ddof=1) / v.shape[1]
    return float(stratum_means.mean()), float(math.sqrt(var.sum()) / n_strata)


def zeta_waxman(
    params: WaxmanParams, channel: ChannelParams = ChannelParams(), n_samples: int = 2_000_000, seed: SeedLike = 0
) -> ZetaEstimate:
    """Monte Carlo estimate of ``(1/|Omega|) * double-integral of connection prob * edge capacity``.

    Result is in capacity * km^2; multiplying by a node density gives the mean
    node capacity.
    """
    if n_samples < 10_000:
        raise ValueError("n_samples must be at least 1e4")
    d, strata = _stratified_pair_distances(params.R, n_samples, make_rng(seed))
    integrand = params.beta * np.exp(-d / params.alpha_L) * edge_capacity(d, channel)
    mean, se = _stratified_mean(integrand, strata)
    area = 4.0 * params.R**2
    return ZetaEstimate(area * mean, area * se)


def zeta_scale_free(
    params: ScaleFreeParams, channel: ChannelParams = ChannelParams(), n_samples: int = 2_000_000, seed: SeedLike = 0
) -> ZetaEstimate:
    """Mean edge capacity when edge lengths are drawn with weight ``1/d`` over uniform pairs.

    Ratio of the pair averages of ``C_E(d)/d`` and ``1/d``, with ``d`` floored at
    the channel's ``min_distance``. Independent of ``m0``.
    """
    if n_samples < 10_000:
        raise ValueError("n_samples must be at least 1e4")
    d, strata = _stratified_pair_distances(params.R, n_samples, make_rng(seed))
    d = np.maximum(d, channel.min_distance)
    inv = 1.0 / d
    weighted = edge_capacity(d, channel) * inv
    num, _ = _stratified_mean(weighted, strata)
    den, _ = _stratified_mean(inv, strata)
    ratio = num / den
    _, resid_se = _stratified_mean(weighted - ratio * inv, strata)
    return ZetaEstimate(ratio, resid_se / den)


@dataclass(frozen=True)
class BoundInputs:
    """Inputs to the analytic capacity bounds. ``p`` is the effective error probability."""

    zeta: float
    p: float = 0.0
    rho0: float = 0.0
    beta0: float = 1.0
    m0: int = 0
    giant_fraction: float = 1.0

    def __post_init__(self):
        if min(self.zeta, self.p, self.rho0, self.beta0, self.m0, self.giant_fraction) < 0:
            raise ValueError("bound inputs must be non-negative")
        if self.p > 1:
            raise ValueError("p must not exceed 1")


def bound_waxman(inputs: BoundInputs) -> float:
    """Mean node capacity ``(1 - p) * zeta_W * rho0``, an upper bound on ``<C>``."""
    return (1.0 - inputs.p) * inputs.zeta * inputs.rho0


def bound_scale_free(inputs: BoundInputs, n_nodes: int, giant_size: int) -> float:
    """``2 m0 (1 - p) zeta_SF C(N_G, 2) / C(N, 2)``."""
    if n_nodes < 2:
        raise DataError("bound needs at least two nodes")
    share = math.comb(giant_size, 2) / math.comb(n_nodes, 2) if giant_size >= 2 else 0.0
    return 2.0 * inputs.m0 * (1.0 - inputs.p) * inputs.zeta * share
