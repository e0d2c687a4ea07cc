"""Tavis-Cummings dark-state simulator."""

from ._core import (
    GraphNotEven,
    NumericalError,
    basis_labels,
    collective_kernel,
    config,
    converge,
    dark_dimension,
    experiments,
    graph_dark_state,
    run,
    spectrum,
)

__all__ = [
    "GraphNotEven",
    "NumericalError",
    "basis_labels",
    "collective_kernel",
    "config",
    "converge",
    "dark_dimension",
    "experiments",
    "graph_dark_state",
    "run",
    "spectrum",
]
