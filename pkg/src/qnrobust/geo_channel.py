"""Node geometry and the pure-loss fiber capacity model.

Distances are in km. A link of length ``d`` has transmissivity
``10**(-gamma * d)`` and carries at most ``-log2(1 - eta)`` qubits per use.
All functions accept scalars or numpy arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

DEFAULT_GAMMA = 0.02
DEFAULT_MIN_DISTANCE = 1e-3


@dataclass(frozen=True)
class NodeSite:
    id: int
    x: float
    y: float


@dataclass(frozen=True)
class ChannelParams:
    """Fiber loss rate (base-10 exponent per km) and the pair-distance floor."""

    gamma: float = DEFAULT_GAMMA
    min_distance: float = DEFAULT_MIN_DISTANCE

    def __post_init__(self):
        if not self.gamma > 0:
            raise ValueError(f"gamma must be positive, got {self.gamma}")
        if not self.min_distance > 0:
            raise ValueError(f"min_distance must be positive, got {self.min_distance}")


def distance(a: NodeSite, b: NodeSite) -> float:
    # hypot is symmetric in its arguments and exact in the sign of the deltas
    return math.hypot(a.x - b.x, a.y - b.y)


def pairwise_distance(xy_a: np.ndarray, xy_b: np.ndarray) -> np.ndarray:
    """Row-wise Euclidean distance between two (n, 2) coordinate arrays."""
    delta = np.asarray(xy_a, dtype=float) - np.asarray(xy_b, dtype=float)
    return np.hypot(delta[..., 0], delta[..., 1])


def _check_nonnegative(d):
    if np.any(np.asarray(d) < 0):
        raise ValueError("distance must be non-negative")


def transmissivity(d, params: ChannelParams = ChannelParams()):
    _check_nonnegative(d)
    d = np.maximum(d, params.min_distance)
    out = np.power(10.0, -params.gamma * d)
    return float(out) if np.ndim(out) == 0 else out


def edge_capacity(d, params: ChannelParams = ChannelParams()):
    """Two-way assisted quantum capacity of a pure-loss link of length ``d``.

    ``-log2(1 - eta)`` is evaluated as ``-log1p(-eta)/ln 2`` so that long links
    (eta -> 0) keep full relative precision.
    """
    eta = transmissivity(d, params)
    out = -np.log1p(-np.asarray(eta)) / math.log(2.0)
    return float(out) if np.ndim(out) == 0 else out
