"""Parameter sweeps over error strength with deterministic, scheduling-independent seeding.

Every random stream is a :class:`numpy.random.SeedSequence` keyed by the
master seed plus structural indices (stream tag, realization, error kind,
grid position), so a cell's result never depends on which worker ran it or
in what order.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields, replace
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .. import analytics, capacity, netgen
from ..errors import QNRobustError
from ..netgen import GeoGraph, ScaleFreeParams, WaxmanParams
from ..perturb import ErrorKind, Mode, effective_edge_fraction, random_edge_breakdown
from .config import SweepConfig

WORKERS_ENV = "QNROBUST_WORKERS"

# stream tags
GRAPH, PERTURB, PAIRS, REPARAM, PEFF, GIANT, ZETA = range(7)
KIND_INDEX = {k: i for i, k in enumerate(ErrorKind)}

REPARAM_SUFFIX = ":reparam"
PEFF_SUFFIX = ":peff_edge"


def derive_seed(master: int, *keys: int) -> np.random.SeedSequence:
    return np.random.SeedSequence(master, spawn_key=tuple(int(k) for k in keys))


@dataclass
class SweepRecord:
    model: str
    error_kind: str
    p: float
    realization: int
    n_nodes: int
    n_edges: int
    mean_capacity: float
    capacity_stderr: float
    normalized_capacity: float
    giant_fraction: float
    mean_degree: float
    p_eff: float | None = None
    bound_value: float | None = None
    giant_lhs: float | None = None
    giant_rhs: float | None = None
    error: str = ""

    @classmethod
    def columns(cls) -> list[str]:
        return [f.name for f in fields(cls)]


@lru_cache(maxsize=4)
def intact_graph(cfg: SweepConfig, realization: int) -> GeoGraph:
    """The unperturbed graph a sweep uses for ``realization``."""
    seed = derive_seed(cfg.master_seed, GRAPH, realization)
    return _generate(cfg, cfg.model, seed)


def _generate(cfg: SweepConfig, params, seed) -> GeoGraph:
    if isinstance(params, WaxmanParams):
        return netgen.generate_waxman(params, seed, cfg.channel)
    return netgen.generate_scale_free(params, seed, cfg.channel)


@lru_cache(maxsize=8)
def _zeta(cfg: SweepConfig) -> float:
    seed = derive_seed(cfg.master_seed, ZETA)
    if isinstance(cfg.model, WaxmanParams):
        return capacity.zeta_waxman(cfg.model, cfg.channel, cfg.zeta_samples, seed).value
    return capacity.zeta_scale_free(cfg.model, cfg.channel, cfg.zeta_samples, seed).value


def _bound(cfg: SweepConfig, g: GeoGraph, p_effective: float, giant_size: int) -> float | None:
    if not cfg.comparators.bounds:
        return None
    zeta = _zeta(cfg)
    if isinstance(cfg.model, WaxmanParams):
        return capacity.bound_waxman(capacity.BoundInputs(zeta=zeta, p=p_effective, rho0=cfg.model.density))
    if g.n_nodes < 2:
        return None
    inputs = capacity.BoundInputs(zeta=zeta, p=p_effective, m0=cfg.model.m0)
    return capacity.bound_scale_free(inputs, g.n_nodes, giant_size)


def _measure(
    cfg: SweepConfig,
    g: GeoGraph,
    *,
    model: str,
    kind: str,
    p: float,
    realization: int,
    pair_seed,
    giant_seed,
    p_eff: float | None = None,
    bound_p: float | None = None,
) -> SweepRecord:
    comp = analytics.components(g)
    record = SweepRecord(
        model=model,
        error_kind=kind,
        p=p,
        realization=realization,
        n_nodes=g.n_nodes,
        n_edges=g.n_edges,
        mean_capacity=math.nan,
        capacity_stderr=math.nan,
        normalized_capacity=math.nan,
        giant_fraction=comp.giant_fraction,
        mean_degree=2.0 * g.n_edges / g.n_nodes if g.n_nodes else 0.0,
        p_eff=p_eff,
    )
    try:
        record.bound_value = _bound(cfg, g, p if bound_p is None else bound_p, comp.giant_size)
        record.mean_capacity, record.capacity_stderr, _ = capacity.graph_capacity(g, cfg.n_pairs, pair_seed)
        if cfg.comparators.giant_relation and comp.giant_size >= 2:
            rel = capacity.giant_capacity_relation(g, cfg.n_pairs, giant_seed)
            record.giant_lhs, record.giant_rhs = rel.lhs, rel.rhs
    except (QNRobustError, ValueError, ArithmeticError) as exc:
        record.error = f"{type(exc).__name__}: {exc}"
    return record


def _baseline_task(cfg: SweepConfig, realization: int) -> list[SweepRecord]:
    g = intact_graph(cfg, realization)
    rec = _measure(
        cfg,
        g,
        model=cfg.model_tag,
        kind="none",
        p=0.0,
        realization=realization,
        pair_seed=derive_seed(cfg.master_seed, PAIRS, realization),
        giant_seed=derive_seed(cfg.master_seed, GIANT, realization),
        p_eff=None,
    )
    return [rec]


def _cell_task(cfg: SweepConfig, realization: int, kind_pos: int, p_index: int) -> list[SweepRecord]:
    spec = cfg.perturbations[kind_pos]
    kind = spec.kind
    p = cfg.p_grid[p_index]
    ki = KIND_INDEX[kind]
    g0 = intact_graph(cfg, realization)
    g = spec.at(p).apply(g0, derive_seed(cfg.master_seed, PERTURB, realization, p_index))
    p_eff = effective_edge_fraction(g0, g) if kind.is_attack and g0.n_edges else None
    out = [
        _measure(
            cfg,
            g,
            model=cfg.model_tag,
            kind=kind.value,
            p=p,
            realization=realization,
            pair_seed=derive_seed(cfg.master_seed, PAIRS, realization, ki, p_index),
            giant_seed=derive_seed(cfg.master_seed, GIANT, realization, ki, p_index),
            p_eff=p_eff,
            bound_p=p_eff if (kind.is_attack and isinstance(cfg.model, ScaleFreeParams)) else p,
        )
    ]
    if kind.is_attack and p_eff is not None and cfg.comparators.peff_edge_breakdown:
        twin = random_edge_breakdown(g0, p_eff, Mode.BERNOULLI, derive_seed(cfg.master_seed, PEFF, realization, ki, p_index))
        out.append(
            _measure(
                cfg,
                twin,
                model=cfg.model_tag + PEFF_SUFFIX,
                kind=kind.value,
                p=p,
                realization=realization,
                pair_seed=derive_seed(cfg.master_seed, PAIRS, realization, ki, p_index, PEFF),
                giant_seed=derive_seed(cfg.master_seed, GIANT, realization, ki, p_index, PEFF),
                p_eff=p_eff,
                bound_p=p_eff,
            )
        )
    return out


def _reparam_task(cfg: SweepConfig, realization: int, which: ErrorKind, p_index: int) -> list[SweepRecord]:
    p = cfg.p_grid[p_index]
    ki = KIND_INDEX[which]
    if which is ErrorKind.EDGE_BREAKDOWN:
        params = netgen.reparam_waxman_edges(cfg.model, p)
    else:
        params = netgen.reparam_waxman_nodes(cfg.model, p)
    g = _generate(cfg, params, derive_seed(cfg.master_seed, REPARAM, realization, ki, p_index))
    return [
        _measure(
            cfg,
            g,
            model=cfg.model_tag + REPARAM_SUFFIX,
            kind=which.value,
            p=p,
            realization=realization,
            pair_seed=derive_seed(cfg.master_seed, PAIRS, realization, ki, p_index, REPARAM),
            giant_seed=derive_seed(cfg.master_seed, GIANT, realization, ki, p_index, REPARAM),
        )
    ]


def _run_task(task: tuple) -> list[SweepRecord]:
    fn = {"baseline": _baseline_task, "cell": _cell_task, "reparam": _reparam_task}[task[0]]
    return fn(*task[1:])


def _tasks(cfg: SweepConfig) -> tuple[list[tuple], list[tuple]]:
    baseline = [("baseline", cfg, r) for r in range(cfg.n_graphs)]
    cells = []
    kinds = {s.kind for s in cfg.perturbations}
    reparam_kinds = []
    if cfg.comparators.reparam and isinstance(cfg.model, WaxmanParams):
        if kinds & {ErrorKind.NODE_BREAKDOWN, ErrorKind.ATTACK_BY_CAPACITY, ErrorKind.ATTACK_BY_DEGREE}:
            reparam_kinds.append(ErrorKind.NODE_BREAKDOWN)
        if ErrorKind.EDGE_BREAKDOWN in kinds:
            reparam_kinds.append(ErrorKind.EDGE_BREAKDOWN)
    for r in range(cfg.n_graphs):
        for pi, p in enumerate(cfg.p_grid):
            for pos in range(len(cfg.perturbations)):
                if p > 0:
                    cells.append(("cell", cfg, r, pos, pi))
            for which in reparam_kinds:
                cells.append(("reparam", cfg, r, which, pi))
    return baseline, cells


def resolve_workers(workers: int | None) -> int:
    if workers is None:
        env = os.environ.get(WORKERS_ENV)
        workers = int(env) if env else (os.cpu_count() or 1)
    return max(1, workers)


def _execute(tasks: Sequence[tuple], workers: int) -> list[list[SweepRecord]]:
    if workers == 1 or len(tasks) <= 1:
        return [_run_task(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_run_task, tasks, chunksize=1))


def run_sweep(cfg: SweepConfig, workers: int | None = None) -> list[SweepRecord]:
    """Evaluate every (error kind, p, realization) cell of ``cfg``.

    Cells at ``p = 0`` reuse the realization's intact-graph evaluation, which
    is also the baseline each record is normalized against. Records come back
    sorted by model, error kind, grid position and realization.
    """
    workers = resolve_workers(workers)
    baseline_tasks, cell_tasks = _tasks(cfg)
    results = _execute(baseline_tasks + cell_tasks, workers)
    baselines = [res[0] for res in results[: len(baseline_tasks)]]
    records = [rec for res in results[len(baseline_tasks) :] for rec in res]
    if 0.0 in cfg.p_grid:
        for spec in cfg.perturbations:
            for base in baselines:
                records.append(replace(base, error_kind=spec.kind.value, p_eff=0.0 if spec.kind.is_attack else None))
    for rec in records:
        c0 = baselines[rec.realization].mean_capacity
        rec.normalized_capacity = rec.mean_capacity / c0 if c0 > 0 else math.nan
    kind_order = {s.kind.value: i for i, s in enumerate(cfg.perturbations)}
    records.sort(key=lambda r: (r.model, kind_order.get(r.error_kind, -1), r.p, r.realization))
    return records


@dataclass(frozen=True)
class EnsemblePoint:
    """Ensemble summary of one (model, error kind, p) group of records."""

    model: str
    error_kind: str
    p: float
    n_graphs: int
    mean_capacity: float
    stderr: float
    normalized: float
    normalized_stderr: float
    giant_fraction: float
    mean_degree: float
    mean_degree_stderr: float
    p_eff: float | None
    bound_value: float | None


def _se(x: np.ndarray) -> float:
    return float(x.std(ddof=1) / math.sqrt(len(x))) if len(x) > 1 else 0.0


def aggregate(records: Iterable[SweepRecord]) -> list[EnsemblePoint]:
    """Average records over realizations.

    ``normalized`` is the ratio of ensemble means ``<C>/<C_0>``, where ``<C_0>``
    comes from the base model's ``p = 0`` records of the same realizations.
    Records carrying an error are skipped.
    """
    records = [r for r in records if not r.error]
    base: dict[tuple[str, int], float] = {}
    for r in records:
        if r.p == 0.0 and ":" not in r.model:
            base[(r.model, r.realization)] = r.mean_capacity
    groups: dict[tuple[str, str, float], list[SweepRecord]] = {}
    for r in records:
        groups.setdefault((r.model, r.error_kind, r.p), []).append(r)
    points = []
    for (model, kind, p), rs in groups.items():
        caps = np.array([r.mean_capacity for r in rs])
        degs = np.array([r.mean_degree for r in rs])
        c0 = [base.get((model.split(":")[0], r.realization)) for r in rs]
        c0_mean = float(np.mean(c0)) if all(v is not None for v in c0) else math.nan
        p_effs = [r.p_eff for r in rs if r.p_eff is not None]
        bounds = [r.bound_value for r in rs if r.bound_value is not None]
        points.append(
            EnsemblePoint(
                model=model,
                error_kind=kind,
                p=p,
                n_graphs=len(rs),
                mean_capacity=float(caps.mean()),
                stderr=_se(caps),
                normalized=float(caps.mean() / c0_mean) if c0_mean > 0 else math.nan,
                normalized_stderr=_se(caps) / c0_mean if c0_mean > 0 else math.nan,
                giant_fraction=float(np.mean([r.giant_fraction for r in rs])),
                mean_degree=float(degs.mean()),
                mean_degree_stderr=_se(degs),
                p_eff=float(np.mean(p_effs)) if p_effs else None,
                bound_value=float(np.mean(bounds)) if bounds else None,
            )
        )
    points.sort(key=lambda e: (e.model, e.error_kind, e.p))
    return points
