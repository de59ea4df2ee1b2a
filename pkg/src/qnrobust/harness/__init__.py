"""Sweep orchestration, persistence and the command line."""

from .config import Comparators, ErrorSpec, SweepConfig, load_config
from .io import dumps_graph, dumps_records, load_graph, loads_graph, read_records, save_graph, write_records
from .sweep import EnsemblePoint, SweepRecord, aggregate, intact_graph, run_sweep

__all__ = [
    "Comparators",
    "EnsemblePoint",
    "ErrorSpec",
    "SweepConfig",
    "SweepRecord",
    "aggregate",
    "dumps_graph",
    "dumps_records",
    "intact_graph",
    "load_config",
    "load_graph",
    "loads_graph",
    "read_records",
    "run_sweep",
    "save_graph",
    "write_records",
]
