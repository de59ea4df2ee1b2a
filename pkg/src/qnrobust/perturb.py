"""Random breakdowns and targeted attacks on a :class:`GeoGraph`."""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import DataError
from .netgen import GeoGraph, SeedLike, make_rng, seed_descriptor


class ErrorKind(str, enum.Enum):
    NODE_BREAKDOWN = "node_breakdown"
    EDGE_BREAKDOWN = "edge_breakdown"
    ATTACK_BY_DEGREE = "attack_by_degree"
    ATTACK_BY_CAPACITY = "attack_by_capacity"

    @property
    def is_attack(self) -> bool:
        return self in (ErrorKind.ATTACK_BY_DEGREE, ErrorKind.ATTACK_BY_CAPACITY)

    @property
    def removes_nodes(self) -> bool:
        return self is not ErrorKind.EDGE_BREAKDOWN


class Mode(str, enum.Enum):
    BERNOULLI = "bernoulli"
    EXACT_COUNT = "exact_count"


@dataclass(frozen=True)
class Perturbation:
    """An error model with strength ``p``.

    ``mode`` only matters for breakdowns; attacks always remove an exact
    count. ``adaptive`` re-ranks after every removal (attacks only; off for
    all acceptance runs).
    """

    kind: ErrorKind
    p: float
    mode: Mode = Mode.BERNOULLI
    adaptive: bool = False

    def __post_init__(self):
        object.__setattr__(self, "kind", ErrorKind(self.kind))
        object.__setattr__(self, "mode", Mode(self.mode))
        _check_p(self.p)
        if self.kind.is_attack:
            object.__setattr__(self, "mode", Mode.EXACT_COUNT)

    def apply(self, g: GeoGraph, seed: SeedLike = None) -> GeoGraph:
        if self.kind is ErrorKind.NODE_BREAKDOWN:
            return random_node_breakdown(g, self.p, self.mode, seed)
        if self.kind is ErrorKind.EDGE_BREAKDOWN:
            return random_edge_breakdown(g, self.p, self.mode, seed)
        if self.kind is ErrorKind.ATTACK_BY_DEGREE:
            return attack_by_degree(g, self.p, adaptive=self.adaptive)
        return attack_by_capacity(g, self.p, adaptive=self.adaptive)


def _check_p(p: float) -> None:
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")


def _doomed(n: int, p: float, mode: Mode, rng: np.random.Generator) -> np.ndarray:
    """Boolean mask of the items to remove."""
    if Mode(mode) is Mode.BERNOULLI:
        return rng.random(n) < p
    mask = np.zeros(n, dtype=bool)
    mask[rng.choice(n, size=round(p * n), replace=False)] = True
    return mask


def random_node_breakdown(g: GeoGraph, p: float, mode: Mode = Mode.BERNOULLI, seed: SeedLike = None) -> GeoGraph:
    _check_p(p)
    gone = _doomed(g.n_nodes, p, mode, make_rng(seed))
    step = {"kind": ErrorKind.NODE_BREAKDOWN.value, "p": p, "mode": Mode(mode).value, "seed": seed_descriptor(seed)}
    return g.keep_nodes(~gone, step)


def random_edge_breakdown(g: GeoGraph, p: float, mode: Mode = Mode.BERNOULLI, seed: SeedLike = None) -> GeoGraph:
    _check_p(p)
    gone = _doomed(g.n_edges, p, mode, make_rng(seed))
    step = {"kind": ErrorKind.EDGE_BREAKDOWN.value, "p": p, "mode": Mode(mode).value, "seed": seed_descriptor(seed)}
    return g.keep_edges(~gone, step)


def _top_ranked(score: np.ndarray, k: int) -> np.ndarray:
    # stable sort on -score: ties keep ascending node id
    return np.argsort(-score, kind="stable")[:k]


def _adaptive_targets(g: GeoGraph, k: int, by_capacity: bool) -> np.ndarray:
    weight = g.edge_capacities if by_capacity else np.ones(g.n_edges)
    score = g.node_capacities.copy() if by_capacity else g.degrees.astype(float)
    alive_edge = np.ones(g.n_edges, dtype=bool)
    removed = np.zeros(g.n_nodes, dtype=bool)
    targets = []
    for _ in range(k):
        masked = np.where(removed, -np.inf, score)
        x = int(np.argmax(masked))  # argmax returns the first, i.e. smallest id, on ties
        targets.append(x)
        removed[x] = True
        hit = alive_edge & ((g.edges[:, 0] == x) | (g.edges[:, 1] == x))
        for e in np.flatnonzero(hit):
            u, v = g.edges[e]
            score[u if v == x else v] -= weight[e]
        alive_edge &= ~hit
    return np.asarray(targets, dtype=np.int64)


def _attack(g: GeoGraph, p: float, by_capacity: bool, adaptive: bool) -> GeoGraph:
    _check_p(p)
    k = round(p * g.n_nodes)
    if adaptive:
        targets = _adaptive_targets(g, k, by_capacity)
    else:
        score = g.node_capacities if by_capacity else g.degrees.astype(float)
        targets = _top_ranked(score, k)
    keep = np.ones(g.n_nodes, dtype=bool)
    keep[targets] = False
    kind = ErrorKind.ATTACK_BY_CAPACITY if by_capacity else ErrorKind.ATTACK_BY_DEGREE
    return g.keep_nodes(keep, {"kind": kind.value, "p": p, "adaptive": adaptive})


def attack_by_degree(g: GeoGraph, p: float, adaptive: bool = False) -> GeoGraph:
    """Remove the ``round(p*N)`` highest-degree nodes; ties go to the smaller id."""
    return _attack(g, p, by_capacity=False, adaptive=adaptive)


def attack_by_capacity(g: GeoGraph, p: float, adaptive: bool = False) -> GeoGraph:
    """Like :func:`attack_by_degree`, ranked by the summed capacity of incident edges."""
    return _attack(g, p, by_capacity=True, adaptive=adaptive)


def effective_edge_fraction(g0: GeoGraph, g_attacked: GeoGraph) -> float:
    """Fraction of the original edges lost, ``1 - |E| / |E0|``."""
    if g0.n_edges == 0:
        raise DataError("effective edge fraction is undefined for a graph without edges")
    return 1.0 - g_attacked.n_edges / g0.n_edges
