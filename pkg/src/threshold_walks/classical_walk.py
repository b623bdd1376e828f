"""Continuous-time random walk ``exp(-t L)`` for comparison with the quantum walk.

Uses the same spectral decomposition and block closed form as the quantum
walk with ``i t`` replaced by ``-t``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .errors import PreconditionError
from .graph_model import HiddenVariableConfig, ThresholdGraph, generate, is_connected
from .quantum_walk import closed_form_column, spectral_column
from .spectral import SpectralDecomposition, decompose

__all__ = [
    "ClassicalDistribution",
    "classical_evolve",
    "classical_time_average",
    "classical_spread_check",
]

log = logging.getLogger(__name__)

NEGATIVE_MASS_TOL = 1e-14


@dataclass(frozen=True)
class ClassicalDistribution:
    masses: np.ndarray
    time: float

    @property
    def total(self) -> float:
        return float(self.masses.sum())


def _clamp(masses: np.ndarray) -> np.ndarray:
    low = masses.min()
    if low < -NEGATIVE_MASS_TOL:
        log.warning("classical masses dipped to %.3e; clamping to zero", low)
    return np.maximum(masses, 0.0)


def classical_evolve(graph: ThresholdGraph, start: int, t: float, method: str = "spectral",
                     dec: SpectralDecomposition | None = None) -> ClassicalDistribution:
    """Distribution ``exp(-t L) e_start`` at time ``t >= 0``."""
    if t < 0:
        raise ValueError("the random walk is only defined for t >= 0")
    if method == "spectral":
        col = spectral_column(graph, start, -t, dec)
    elif method == "closed-form":
        col = closed_form_column(graph, start, -t)
    else:
        raise ValueError(f"unknown method {method!r}")
    return ClassicalDistribution(_clamp(col.real), float(t))


def classical_time_average(graph: ThresholdGraph, start: int,
                           dec: SpectralDecomposition | None = None) -> ClassicalDistribution:
    """Long-time average: every positive eigenvalue decays, leaving ``E_0 e_start``."""
    if not is_connected(graph):
        raise PreconditionError("time average needs a connected graph")
    dec = decompose(graph) if dec is None else dec
    return ClassicalDistribution(dec.projector_column(0, start), float("inf"))


def classical_spread_check(p: float, t: float, n_list: Iterable[int], seeds: Iterable[int] = (0,),
                           theta: float = 0.5, start: str = "v1") -> list[dict]:
    """Rows ``{n, seed, quantity, value}`` with ``max_y |n P_t(y) - 1|`` on binary
    samples, starting from the top clique vertex (``v1``) or a null vertex (``v0``)."""
    rows = []
    for n in n_list:
        for seed in seeds:
            graph = generate(HiddenVariableConfig.bernoulli(n, p, theta, seed))
            if not is_connected(graph):
                continue
            if start == "v1":
                v = graph.top_vertex()
            elif graph.m == 2:
                v = graph.bottom_null_vertex()
            else:
                continue
            masses = classical_evolve(graph, v, t, method="closed-form").masses
            rows.append({"n": n, "seed": seed, "quantity": "max_spread_deviation",
                         "value": float(np.abs(n * masses - 1).max())})
    return rows
