"""Geometric network container and the Waxman / distance-weighted scale-free generators."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from functools import cached_property
from typing import Any, Iterator, Mapping

import numpy as np

from .errors import DataError
from .geo_channel import ChannelParams, NodeSite, edge_capacity, pairwise_distance

# Distance scale of the US fiber backbone; fixes R once alpha is chosen.
US_FIBER_ALPHA_L = 226.0

SeedLike = int | np.random.SeedSequence | np.random.Generator | None


def make_rng(seed: SeedLike) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def seed_sequence(seed: SeedLike) -> np.random.SeedSequence:
    if isinstance(seed, np.random.SeedSequence):
        return seed
    if isinstance(seed, np.random.Generator):
        return np.random.SeedSequence(int(seed.integers(2**63)))
    return np.random.SeedSequence(seed)


def seed_descriptor(seed: SeedLike) -> Any:
    """JSON-friendly description of a seed, stored in graph provenance."""
    if isinstance(seed, (int, np.integer)):
        return int(seed)
    if isinstance(seed, np.random.SeedSequence):
        return {"entropy": int(seed.entropy), "spawn_key": [int(k) for k in seed.spawn_key]}
    return None


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class GeoGraph:
    """Immutable snapshot of a geometric network.

    ``coords`` is an (n, 2) array in km; ``edges`` is an (m, 2) array of node
    indices with ``u < v``, sorted lexicographically. ``origin_ids[i]`` is the
    index node ``i`` had in the originally generated graph, so node removals
    keep the mapping back to the source network.
    """

    coords: np.ndarray
    edges: np.ndarray
    region_half_width: float
    channel: ChannelParams = ChannelParams()
    provenance: Mapping[str, Any] = field(default_factory=dict)
    origin_ids: np.ndarray | None = None

    def __post_init__(self):
        coords = np.array(self.coords, dtype=np.float64).reshape(-1, 2)
        n = len(coords)
        edges = np.array(self.edges, dtype=np.int64).reshape(-1, 2)
        R = float(self.region_half_width)
        if np.any(np.abs(coords) > R):
            raise DataError(f"node coordinates exceed the region half-width {R}")
        if len(edges):
            if edges.min() < 0 or edges.max() >= n:
                bad = edges[(edges < 0) | (edges >= n)][0]
                raise DataError(f"edge references unknown node id {int(bad)}")
            if np.any(edges[:, 0] == edges[:, 1]):
                raise DataError("self-loops are not allowed")
            edges = np.sort(edges, axis=1)
            edges = edges[np.lexsort((edges[:, 1], edges[:, 0]))]
            if np.any(np.all(edges[1:] == edges[:-1], axis=1)):
                raise DataError("duplicate edges are not allowed")
        origin = np.arange(n, dtype=np.int64) if self.origin_ids is None else np.array(
            self.origin_ids, dtype=np.int64
        )
        if origin.shape != (n,):
            raise DataError("origin_ids must have one entry per node")
        object.__setattr__(self, "coords", _frozen(coords))
        object.__setattr__(self, "edges", _frozen(edges))
        object.__setattr__(self, "region_half_width", R)
        object.__setattr__(self, "origin_ids", _frozen(origin))
        object.__setattr__(self, "provenance", dict(self.provenance))

    @property
    def n_nodes(self) -> int:
        return len(self.coords)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def sites(self) -> list[NodeSite]:
        return [NodeSite(i, float(x), float(y)) for i, (x, y) in enumerate(self.coords)]

    @cached_property
    def edge_lengths(self) -> np.ndarray:
        return _frozen(pairwise_distance(self.coords[self.edges[:, 0]], self.coords[self.edges[:, 1]]))

    @cached_property
    def edge_capacities(self) -> np.ndarray:
        return _frozen(np.asarray(edge_capacity(self.edge_lengths, self.channel), dtype=float).reshape(-1))

    @cached_property
    def degrees(self) -> np.ndarray:
        return _frozen(np.bincount(self.edges.reshape(-1), minlength=self.n_nodes))

    @cached_property
    def node_capacities(self) -> np.ndarray:
        caps = np.zeros(self.n_nodes)
        np.add.at(caps, self.edges[:, 0], self.edge_capacities)
        np.add.at(caps, self.edges[:, 1], self.edge_capacities)
        return _frozen(caps)

    def iter_edges(self) -> Iterator[tuple[int, int]]:
        for u, v in self.edges:
            yield int(u), int(v)

    def _derive(self, step: Mapping[str, Any], **changes) -> GeoGraph:
        prov = dict(self.provenance)
        prov["history"] = list(prov.get("history", [])) + [dict(step)]
        return GeoGraph(
            coords=changes.get("coords", self.coords),
            edges=changes.get("edges", self.edges),
            region_half_width=self.region_half_width,
            channel=self.channel,
            provenance=prov,
            origin_ids=changes.get("origin_ids", self.origin_ids),
        )

    def keep_nodes(self, keep: np.ndarray, step: Mapping[str, Any]) -> GeoGraph:
        """Induced subgraph on the nodes where ``keep`` is true, re-indexed contiguously."""
        keep = np.asarray(keep, dtype=bool)
        new_index = np.cumsum(keep) - 1
        e = self.edges
        alive = keep[e[:, 0]] & keep[e[:, 1]] if len(e) else np.zeros(0, dtype=bool)
        return self._derive(
            step,
            coords=self.coords[keep],
            edges=new_index[e[alive]],
            origin_ids=self.origin_ids[keep],
        )

    def keep_edges(self, keep: np.ndarray, step: Mapping[str, Any]) -> GeoGraph:
        return self._derive(step, edges=self.edges[np.asarray(keep, dtype=bool)])

    def same_network(self, other: GeoGraph) -> bool:
        """Equal sites, edges, origin ids and channel; provenance is ignored."""
        return (
            self.region_half_width == other.region_half_width
            and self.channel == other.channel
            and np.array_equal(self.coords, other.coords)
            and np.array_equal(self.edges, other.edges)
            and np.array_equal(self.origin_ids, other.origin_ids)
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GeoGraph):
            return NotImplemented
        return self.same_network(other) and self.provenance == other.provenance

    __hash__ = object.__hash__


@dataclass(frozen=True)
class WaxmanParams:
    """Waxman model on the square [-R, R]^2.

    Pairs at distance ``d`` connect with probability ``beta * exp(-d / alpha_L)``
    where ``alpha_L = alpha * L`` and ``L = 2*sqrt(2)*R`` is the square's diagonal.
    """

    n_nodes: int
    R: float
    alpha: float
    beta: float = 1.0

    def __post_init__(self):
        if self.n_nodes < 0:
            raise ValueError("n_nodes must be non-negative")
        if not (self.R > 0 and self.alpha > 0):
            raise ValueError("R and alpha must be positive")
        if not 0.0 <= self.beta <= 1.0:
            raise ValueError(f"beta must lie in [0, 1], got {self.beta}")

    @property
    def alpha_L(self) -> float:
        return self.alpha * 2.0 * math.sqrt(2.0) * self.R

    @property
    def density(self) -> float:
        return self.n_nodes / (4.0 * self.R**2)

    @classmethod
    def at_density(
        cls, rho: float, alpha: float, beta: float = 1.0, alpha_L: float = US_FIBER_ALPHA_L
    ) -> WaxmanParams:
        """Params with ``alpha * L`` pinned to ``alpha_L`` and ``floor(rho * 4R^2)`` nodes."""
        R = alpha_L / (2.0 * math.sqrt(2.0) * alpha)
        return cls(n_nodes=math.floor(rho * 4.0 * R * R), R=R, alpha=alpha, beta=beta)


@dataclass(frozen=True)
class ScaleFreeParams:
    """Growth model where a newcomer links to ``m0`` earlier nodes with weight degree/distance.

    ``attachment`` selects how the ``m0`` targets are drawn:
    ``"sequential"`` draws one at a time and renormalizes the weights over the
    remaining candidates after each draw; ``"systematic"`` normalizes once per
    insertion and uses systematic PPS sampling so each candidate's inclusion
    probability is exactly ``m0 * weight / total`` (capped at one).
    """

    n_nodes: int
    R: float
    m0: int = 3
    attachment: str = "sequential"

    def __post_init__(self):
        if self.m0 < 1:
            raise ValueError("m0 must be at least 1")
        if self.n_nodes < self.m0 + 1:
            raise ValueError(f"n_nodes must be at least m0 + 1 = {self.m0 + 1}")
        if not self.R > 0:
            raise ValueError("R must be positive")
        if self.attachment not in ("sequential", "systematic"):
            raise ValueError(f"unknown attachment rule {self.attachment!r}")


def uniform_sites(n: int, R: float, rng: np.random.Generator) -> np.ndarray:
    return rng.uniform(-R, R, size=(n, 2))


def generate_waxman(
    params: WaxmanParams,
    seed: SeedLike = None,
    channel: ChannelParams = ChannelParams(),
    coords: np.ndarray | None = None,
) -> GeoGraph:
    """Sample a Waxman graph. ``coords`` pins the node positions (test hook)."""
    rng = make_rng(seed)
    n = params.n_nodes
    xy = uniform_sites(n, params.R, rng) if coords is None else np.asarray(coords, dtype=float).reshape(n, 2)
    blocks = []
    # row blocks keep memory bounded; the uniform stream is consumed in triu order
    step = max(1, 2_000_000 // max(n, 1))
    for start in range(0, max(n - 1, 0), step):
        rows = np.arange(start, min(start + step, n - 1))
        iu = np.repeat(rows, n - 1 - rows)
        ju = np.concatenate([np.arange(i + 1, n) for i in rows])
        d = pairwise_distance(xy[iu], xy[ju])
        hit = rng.random(d.size) < params.beta * np.exp(-d / params.alpha_L)
        blocks.append(np.column_stack((iu[hit], ju[hit])))
    edges = np.concatenate(blocks) if blocks else np.zeros((0, 2), dtype=np.int64)
    return GeoGraph(
        coords=xy,
        edges=edges,
        region_half_width=params.R,
        channel=channel,
        provenance={"model": "waxman", "params": asdict(params), "seed": seed_descriptor(seed)},
    )


def _sequential_targets(w: np.ndarray, m0: int, rng: np.random.Generator) -> list[int]:
    w = w.copy()
    chosen = []
    for _ in range(m0):
        cum = np.cumsum(w)
        t = int(np.searchsorted(cum, rng.random() * cum[-1], side="right"))
        t = min(t, len(w) - 1)
        while w[t] == 0:  # guards the u*total == cum[t] edge case
            t -= 1
        chosen.append(t)
        w[t] = 0.0
    return chosen


def _inclusion_probabilities(w: np.ndarray, m0: int) -> np.ndarray:
    pi = np.zeros_like(w)
    capped = np.zeros(len(w), dtype=bool)
    while True:
        free = ~capped
        pi[free] = (m0 - capped.sum()) * w[free] / w[free].sum()
        over = free & (pi >= 1.0)
        if not over.any():
            break
        capped |= over
        pi[capped] = 1.0
    return pi


def _systematic_targets(w: np.ndarray, m0: int, rng: np.random.Generator) -> list[int]:
    order = rng.permutation(len(w))
    cum = np.cumsum(_inclusion_probabilities(w, m0)[order])
    cum *= m0 / cum[-1]
    points = rng.random() + np.arange(m0)
    picks = np.searchsorted(cum, points, side="right")
    return [int(order[min(i, len(w) - 1)]) for i in picks]


def generate_scale_free(
    params: ScaleFreeParams,
    seed: SeedLike = None,
    channel: ChannelParams = ChannelParams(),
    coords: np.ndarray | None = None,
) -> GeoGraph:
    """Grow a distance-weighted preferential-attachment graph.

    All sites are placed first; node ``v`` then arrives in index order and links
    to ``m0`` of the nodes ``0..v-1``. The first ``m0 + 1`` nodes form a clique.
    Degrees in the attachment weights are those at the newcomer's arrival.
    """
    rng = make_rng(seed)
    n, m0 = params.n_nodes, params.m0
    xy = uniform_sites(n, params.R, rng) if coords is None else np.asarray(coords, dtype=float).reshape(n, 2)
    pick = _sequential_targets if params.attachment == "sequential" else _systematic_targets

    seed_nodes = m0 + 1
    n_edges = m0 * (m0 + 1) // 2 + (n - seed_nodes) * m0
    edges = np.empty((n_edges, 2), dtype=np.int64)
    k = 0
    for i in range(seed_nodes):
        for j in range(i + 1, seed_nodes):
            edges[k] = (i, j)
            k += 1
    deg = np.zeros(n)
    deg[:seed_nodes] = m0
    for v in range(seed_nodes, n):
        d = np.maximum(pairwise_distance(xy[:v], xy[v]), channel.min_distance)
        for t in pick(deg[:v] / d, m0, rng):
            edges[k] = (t, v)
            k += 1
            deg[t] += 1
        deg[v] = m0
    return GeoGraph(
        coords=xy,
        edges=edges,
        region_half_width=params.R,
        channel=channel,
        provenance={"model": "scale_free", "params": asdict(params), "seed": seed_descriptor(seed)},
    )


def reparam_waxman_nodes(params: WaxmanParams, p: float) -> WaxmanParams:
    """Waxman model equivalent to breaking each node with probability ``p``."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    return WaxmanParams(round(params.n_nodes * (1.0 - p)), params.R, params.alpha, params.beta)


def reparam_waxman_edges(params: WaxmanParams, p: float) -> WaxmanParams:
    """Waxman model equivalent to breaking each edge with probability ``p``."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    return WaxmanParams(params.n_nodes, params.R, params.alpha, params.beta * (1.0 - p))
