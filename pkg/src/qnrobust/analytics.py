"""Structural observables: degrees, components, percolation threshold, tail exponent."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np
from scipy import sparse, stats
from scipy.sparse.csgraph import connected_components

from .errors import DataError, NumericalError
from .netgen import GeoGraph


@dataclass(frozen=True)
class DegreeHistogram:
    counts: Mapping[int, int]
    n_nodes: int

    def __post_init__(self):
        counts = {int(k): int(c) for k, c in sorted(self.counts.items()) if c}
        if any(k < 0 for k in counts):
            raise DataError("degrees must be non-negative")
        if sum(counts.values()) != self.n_nodes:
            raise DataError("histogram counts do not sum to n_nodes")
        object.__setattr__(self, "counts", counts)

    @classmethod
    def pooled(cls, hists: Iterable[DegreeHistogram]) -> DegreeHistogram:
        """Sum of several histograms, e.g. over an ensemble of graphs."""
        total: Counter[int] = Counter()
        n = 0
        for h in hists:
            total.update(h.counts)
            n += h.n_nodes
        return cls(dict(total), n)

    def as_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        return np.array(list(self.counts), dtype=np.int64), np.array(list(self.counts.values()), dtype=np.int64)


@dataclass(frozen=True)
class ComponentDecomposition:
    component_sizes: tuple[int, ...]
    giant_fraction: float
    mean_small_size: float

    @property
    def n_nodes(self) -> int:
        return sum(self.component_sizes)

    @property
    def giant_size(self) -> int:
        return self.component_sizes[0] if self.component_sizes else 0


def degree_histogram(g: GeoGraph) -> DegreeHistogram:
    ks, cs = np.unique(g.degrees, return_counts=True)
    return DegreeHistogram(dict(zip(ks.tolist(), cs.tolist())), g.n_nodes)


def degree_moments(h: DegreeHistogram) -> tuple[float, float]:
    if h.n_nodes == 0:
        raise DataError("degree moments of an empty node set are undefined")
    k, c = h.as_arrays()
    k = k.astype(float)
    return float(np.dot(k, c) / h.n_nodes), float(np.dot(k * k, c) / h.n_nodes)


def critical_probability(h: DegreeHistogram) -> float:
    """Random-breakdown threshold ``1 - 1/(<k^2>/<k> - 1)``.

    A ratio in (1, 2) yields a negative value, meaning the network has no
    giant component to begin with; it is returned as is.
    """
    mean, second = degree_moments(h)
    if mean == 0 or second / mean <= 1.0:
        raise NumericalError(
            f"critical probability undefined: <k^2>/<k> = {second / mean if mean else float('nan'):.6g} <= 1"
        )
    return 1.0 - 1.0 / (second / mean - 1.0)


def component_labels(g: GeoGraph) -> tuple[int, np.ndarray]:
    n = g.n_nodes
    e = g.edges
    adj = sparse.coo_matrix((np.ones(len(e)), (e[:, 0], e[:, 1])), shape=(n, n))
    return connected_components(adj, directed=False)


def components(g: GeoGraph) -> ComponentDecomposition:
    if g.n_nodes == 0:
        return ComponentDecomposition((), 0.0, 0.0)
    _, labels = component_labels(g)
    sizes = tuple(sorted(np.bincount(labels).tolist(), reverse=True))
    small = sizes[1:]
    return ComponentDecomposition(
        component_sizes=sizes,
        giant_fraction=sizes[0] / g.n_nodes,
        mean_small_size=float(np.mean(small)) if small else 0.0,
    )


def power_law_fit(h: DegreeHistogram, k_min: int = 1, bin_factor: float = 1.5) -> float:
    """Tail exponent ``nu`` of ``P(k) ~ k^-nu`` over degrees ``>= k_min``.

    Degrees are pooled into logarithmic bins ``[k_min*f^j, k_min*f^(j+1))``;
    each bin's density is its count divided by the number of integer degrees it
    spans (within the observed support) and is placed at the mean log-degree of
    those integers. ``nu`` is minus the least-squares slope in log-log space.
    """
    if k_min < 1:
        raise DataError("k_min must be at least 1")
    k, c = h.as_arrays()
    tail = (k >= k_min) & (c > 0)
    if tail.sum() < 5:
        raise DataError(f"need at least 5 distinct degrees >= {k_min}, have {int(tail.sum())}")
    k, c = k[tail], c[tail]
    support = np.arange(k_min, k.max() + 1)
    # small epsilon guards exact bin boundaries against log rounding
    bin_of = np.floor(np.log(support / k_min) / math.log(bin_factor) + 1e-12).astype(int)
    counts = np.zeros(bin_of.max() + 1)
    np.add.at(counts, bin_of[k - k_min], c)
    width = np.bincount(bin_of)
    center = np.bincount(bin_of, weights=np.log(support)) / width
    used = counts > 0
    if used.sum() < 2:
        raise DataError("tail spans fewer than two logarithmic bins")
    density = counts[used] / width[used] / h.n_nodes
    slope, _ = np.polyfit(center[used], np.log(density), 1)
    return float(-slope)


def compare_histograms(a: DegreeHistogram, b: DegreeHistogram, min_expected: float = 5.0) -> tuple[float, int, float]:
    """Two-sample chi-square homogeneity test of two degree histograms.

    Degrees whose expected count falls below ``min_expected`` in either sample
    are pooled into one bin. Returns ``(statistic, dof, p_value)``.
    """
    ks = sorted(set(a.counts) | set(b.counts))
    table = np.array([[a.counts.get(k, 0) for k in ks], [b.counts.get(k, 0) for k in ks]], dtype=float)
    col = table.sum(axis=0)
    row_share = table.sum(axis=1) / table.sum()
    expected_min = np.outer(row_share, col).min(axis=0)
    rare = expected_min < min_expected
    if rare.any():
        table = np.column_stack([table[:, ~rare], table[:, rare].sum(axis=1)])
        if table[:, -1].sum() == 0:
            table = table[:, :-1]
    if table.shape[1] < 2:
        return 0.0, 0, 1.0
    stat, p_value, dof, _ = stats.chi2_contingency(table, correction=False)
    return float(stat), int(dof), float(p_value)
