"""Sweep configuration and its JSON representation."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any

import jsonschema

from ..errors import ConfigError
from ..geo_channel import ChannelParams
from ..netgen import ScaleFreeParams, WaxmanParams
from ..perturb import ErrorKind, Mode, Perturbation

SCHEMA = json.loads(resources.files(__package__).joinpath("sweep_config.schema.json").read_text())

DEFAULT_P_GRID = tuple(round(0.05 * i, 2) for i in range(20)) + (0.99,)


@dataclass(frozen=True)
class ErrorSpec:
    kind: ErrorKind
    mode: Mode = Mode.BERNOULLI
    adaptive: bool = False

    def __post_init__(self):
        object.__setattr__(self, "kind", ErrorKind(self.kind))
        object.__setattr__(self, "mode", Mode(self.mode))

    def at(self, p: float) -> Perturbation:
        return Perturbation(self.kind, p, self.mode, self.adaptive)


@dataclass(frozen=True)
class Comparators:
    """Extra observables evaluated alongside each sweep cell.

    ``reparam``: Waxman graphs re-generated with N(1-p) nodes or beta(1-p).
    ``bounds``: analytic upper bound per record.
    ``peff_edge_breakdown``: for attacks, random edge breakdown of the intact
    graph at the attack's effective edge fraction.
    ``giant_relation``: all-pairs versus giant-pairs capacity sums.
    """

    reparam: bool = False
    bounds: bool = True
    peff_edge_breakdown: bool = False
    giant_relation: bool = False


@dataclass(frozen=True)
class SweepConfig:
    model: WaxmanParams | ScaleFreeParams
    perturbations: tuple[ErrorSpec, ...]
    p_grid: tuple[float, ...] = DEFAULT_P_GRID
    channel: ChannelParams = ChannelParams()
    n_graphs: int = 10
    n_pairs: int = 200
    master_seed: int = 0
    zeta_samples: int = 2_000_000
    comparators: Comparators = field(default_factory=Comparators)

    def __post_init__(self):
        object.__setattr__(self, "perturbations", tuple(self.perturbations))
        object.__setattr__(self, "p_grid", tuple(float(p) for p in self.p_grid))
        if not self.p_grid:
            raise ConfigError("p_grid must not be empty")
        if any(not 0.0 <= p <= 1.0 for p in self.p_grid):
            raise ConfigError("p_grid values must lie in [0, 1]")
        if any(b <= a for a, b in zip(self.p_grid, self.p_grid[1:])):
            raise ConfigError("p_grid must be strictly increasing")
        if self.n_graphs < 1 or self.n_pairs < 1:
            raise ConfigError("n_graphs and n_pairs must be positive")
        if not self.perturbations:
            raise ConfigError("at least one perturbation kind is required")

    @property
    def model_tag(self) -> str:
        return "waxman" if isinstance(self.model, WaxmanParams) else "scale_free"

    def to_dict(self) -> dict[str, Any]:
        model = {"type": self.model_tag, **asdict(self.model)}
        return {
            "model": model,
            "channel": asdict(self.channel),
            "perturbations": [
                {"kind": s.kind.value, "mode": s.mode.value, "adaptive": s.adaptive} for s in self.perturbations
            ],
            "p_grid": list(self.p_grid),
            "n_graphs": self.n_graphs,
            "n_pairs": self.n_pairs,
            "master_seed": self.master_seed,
            "zeta_samples": self.zeta_samples,
            "comparators": asdict(self.comparators),
        }

    @classmethod
    def from_dict(cls, doc: dict[str, Any]) -> SweepConfig:
        try:
            jsonschema.validate(doc, SCHEMA)
        except jsonschema.ValidationError as exc:
            where = "/".join(str(x) for x in exc.absolute_path) or "<root>"
            raise ConfigError(f"{where}: {exc.message}") from None
        model_doc = dict(doc["model"])
        kind = model_doc.pop("type")
        try:
            model = WaxmanParams(**model_doc) if kind == "waxman" else ScaleFreeParams(**model_doc)
            channel = ChannelParams(**doc.get("channel", {}))
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        extra = {k: doc[k] for k in ("n_graphs", "n_pairs", "master_seed", "zeta_samples") if k in doc}
        return cls(
            model=model,
            perturbations=tuple(ErrorSpec(**p) for p in doc["perturbations"]),
            p_grid=tuple(doc["p_grid"]),
            channel=channel,
            comparators=Comparators(**doc.get("comparators", {})),
            **extra,
        )


def load_config(path: str | Path) -> SweepConfig:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: line {exc.lineno}: {exc.msg}") from None
    return SweepConfig.from_dict(doc)
