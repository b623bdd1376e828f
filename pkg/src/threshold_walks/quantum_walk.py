"""Continuous-time quantum walk ``U_t = exp(i t L)`` on threshold graphs.

Three evaluators are available:

* the block closed form, O(n + m) per column: each propagator entry depends
  only on the blocks of its two vertices and on whether they coincide;
* the complete-split-graph closed form for binary graphs;
* spectral synthesis ``sum_lam exp(i t lam) E_lam`` from
  :mod:`threshold_walks.spectral`, the authoritative general path.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .errors import CoverageError, PreconditionError
from .graph_model import HiddenVariableConfig, ThresholdGraph, generate, is_connected
from .spectral import SpectralDecomposition, decompose

__all__ = [
    "AmplitudeVector",
    "ProbabilityDistribution",
    "propagator_entry_binary",
    "propagator_entry_general",
    "covers",
    "closed_form_column",
    "binary_column",
    "spectral_column",
    "evolve",
    "probability",
    "propagator_matrix",
    "time_averaged",
    "localization_rates",
]

METHODS = ("closed-form", "spectral", "binary")


@dataclass(frozen=True)
class AmplitudeVector:
    entries: np.ndarray
    time: float
    start: int

    @property
    def norm(self) -> float:
        return float(np.sum(np.abs(self.entries) ** 2))

    def probabilities(self) -> "ProbabilityDistribution":
        e = self.entries
        return ProbabilityDistribution(e.real**2 + e.imag**2, "instant")


@dataclass(frozen=True)
class ProbabilityDistribution:
    masses: np.ndarray
    kind: str

    @property
    def total(self) -> float:
        return float(self.masses.sum())


def _require_connected(graph: ThresholdGraph) -> None:
    if not is_connected(graph):
        raise PreconditionError("walk evaluation needs a connected graph")


def _require_vertex(graph: ThresholdGraph, v: int) -> None:
    if not 0 <= v < graph.n:
        raise ValueError(f"vertex {v} out of range for n={graph.n}")


# ---- complete split graphs -------------------------------------------------------


def propagator_entry_binary(graph: ThresholdGraph, v: int, w: int, t: float) -> complex:
    """Entry ``(v, w)`` of ``U_t`` on a complete split graph, clique block first."""
    if not graph.is_binary():
        raise PreconditionError("graph is not a binary threshold graph")
    _require_vertex(graph, v)
    _require_vertex(graph, w)
    n = graph.n
    k, l = graph.binary_split()
    e_n, e_k = np.exp(1j * n * t), np.exp(1j * k * t)
    same = 1.0 if v == w else 0.0
    if v < k and w < k:
        return complex(e_n * same + (1 - e_n) / n)
    if v < k or w < k:
        return complex((1 - e_n) / n)
    return complex(e_k * same + 1 / n + k * e_n / (n * l) - e_k / l)


def binary_column(graph: ThresholdGraph, start: int, t: float) -> np.ndarray:
    """Column ``U_t e_start`` of a complete split graph in O(n)."""
    if not graph.is_binary():
        raise PreconditionError("graph is not a binary threshold graph")
    _require_vertex(graph, start)
    n = graph.n
    k, l = graph.binary_split()
    e_n, e_k = np.exp(1j * n * t), np.exp(1j * k * t)
    col = np.empty(n, dtype=complex)
    if start < k:
        col[:] = (1 - e_n) / n
        col[start] += e_n
    else:
        col[:k] = (1 - e_n) / n
        col[k:] = 1 / n + k * e_n / (n * l) - e_k / l
        col[start] += e_k
    return col


# ---- general threshold graphs ----------------------------------------------------


def covers(graph: ThresholdGraph, v: int, w: int) -> bool:
    """Whether the block closed form states entry ``(v, w)`` directly.

    Clique rows cover clique columns at the same or lower levels and null
    columns strictly below; null rows cover every column at the same or
    lower levels.
    """
    iv, pv = graph.level_of(v)
    iw, pw = graph.level_of(w)
    if pv == 1:
        return iw <= iv if pw == 1 else iw <= iv - 1
    return iw <= iv


def propagator_entry_general(graph: ThresholdGraph, v: int, w: int, t: float, z: complex | None = None) -> complex:
    """Entry ``(v, w)`` of ``exp(z L)`` from the level-degree closed form.

    ``z`` defaults to ``1j * t``.  Raises :class:`CoverageError` when the pair
    is outside the formula's index range; the transpose pair is then covered.
    """
    _require_connected(graph)
    _require_vertex(graph, v)
    _require_vertex(graph, w)
    if not covers(graph, v, w):
        raise CoverageError(f"entry ({v}, {w}) is not covered; use ({w}, {v})")
    z = 1j * t if z is None else z
    b = graph.blocks
    m, n = b.m, graph.n

    def dk(j: int) -> int:
        return b.degrees_k[j - 1]

    def dl(j: int) -> int:
        return b.degrees_l[j - 1]

    def ph(lam: float) -> complex:
        return np.exp(z * lam)

    def clique_term(j: int) -> complex:
        return (dl(j - 1) - dl(j)) * ph(dk(j) + 1) / ((dk(j) - dl(j - 1) + 1) * (dk(j) - dl(j) + 1))

    def null_term(j: int) -> complex:
        return (dk(j + 1) - dk(j)) * ph(dl(j)) / ((dk(j) - dl(j) + 1) * (dk(j + 1) - dl(j) + 1))

    i, part = graph.level_of(v)
    same = 1.0 if v == w else 0.0
    if part == 1:
        val = (same - 1 / (dk(i) - dl(i) + 1)) * ph(dk(i) + 1)
        val += sum(clique_term(j) for j in range(i + 1, m + 1))
        val += sum(null_term(j) for j in range(i, m))
    else:
        val = (same - 1 / (dk(i + 1) - dl(i) + 1)) * ph(dl(i))
        val += sum(clique_term(j) for j in range(i + 1, m + 1))
        val += sum(null_term(j) for j in range(i + 1, m))
    return complex(val + 1 / n)


def _level_coefficients(graph: ThresholdGraph, z: complex):
    """Per-level diagonal phase, own-block coefficient and suffix sums."""
    b = graph.blocks
    m, n = b.m, graph.n
    dk = np.asarray(b.degrees_k, dtype=float)
    dl = np.asarray(b.degrees_l, dtype=float)
    k = np.asarray(b.k, dtype=float)
    l = np.asarray(b.l, dtype=float)
    d = np.asarray(b.offsets_below(), dtype=float)
    # clique_terms[j]: level j+1 >= 2; null_terms[j]: level j+1 <= m-1
    clique_terms = np.zeros(m, dtype=complex)
    if m > 1:
        clique_terms[1:] = k[1:] / (d[1:] * (k[1:] + d[1:])) * np.exp(z * (dk[1:] + 1))
    null_terms = np.zeros(m, dtype=complex)
    # level 1 with k_1 = 0 has no balanced null-block vector
    below = k[:-1] + d[:-1]
    below_safe = np.where(below > 0, below, 1.0)
    null_terms[:-1] = np.where(
        below > 0, l[:-1] / (below_safe * (below + l[:-1])) * np.exp(z * dl[:-1]), 0.0
    )
    suffix_c = np.concatenate([np.cumsum(clique_terms[::-1])[::-1], [0]])
    suffix_n = np.concatenate([np.cumsum(null_terms[::-1])[::-1], [0]])
    clique_den = np.where(k + d > 0, k + d, 1.0)
    null_den = d + k + l
    clique_phase = np.exp(z * (dk + 1))
    null_phase = np.exp(z * dl)
    idx = np.arange(m)
    clique_off = -clique_phase / clique_den + suffix_c[idx + 1] + suffix_n[idx] + 1 / n
    null_off = -null_phase / null_den + suffix_c[idx + 1] + suffix_n[idx + 1] + 1 / n
    return clique_phase, null_phase, clique_off, null_off


def closed_form_column(graph: ThresholdGraph, start: int, z: complex) -> np.ndarray:
    """Column ``exp(z L) e_start`` from the block closed form, filling pairs the
    formula does not state by symmetry of ``exp(z L)``."""
    _require_connected(graph)
    _require_vertex(graph, start)
    clique_phase, null_phase, clique_off, null_off = _level_coefficients(graph, complex(z))
    table = graph.block_table()
    levels = np.array([i for i, _, _, _ in table]) - 1
    parts = np.array([p for _, p, _, _ in table])
    sizes = np.array([s for _, _, _, s in table])
    own = np.where(parts == 1, clique_off[levels], null_off[levels])

    i_s, p_s = graph.level_of(start)
    if p_s == 1:
        covered = np.where(parts == 1, levels <= i_s - 1, levels <= i_s - 2)
        s_val, s_phase = clique_off[i_s - 1], clique_phase[i_s - 1]
    else:
        covered = levels <= i_s - 1
        s_val, s_phase = null_off[i_s - 1], null_phase[i_s - 1]
    col = np.repeat(np.where(covered, s_val, own), sizes)
    col[start] += s_phase
    return col


def spectral_column(graph: ThresholdGraph, start: int, z: complex, dec: SpectralDecomposition | None = None) -> np.ndarray:
    """Column ``exp(z L) e_start`` as ``sum_lam exp(z lam) E_lam e_start``."""
    _require_connected(graph)
    _require_vertex(graph, start)
    dec = decompose(graph) if dec is None else dec
    col = np.zeros(graph.n, dtype=complex)
    for lam in dec.eigenvalues:
        col += np.exp(z * lam) * dec.projector_column(lam, start)
    return col


def evolve(graph: ThresholdGraph, start: int, t: float, method: str = "closed-form",
           dec: SpectralDecomposition | None = None) -> AmplitudeVector:
    """Amplitudes ``U_t e_start``.  Negative ``t`` runs the walk backwards."""
    if method == "closed-form":
        col = closed_form_column(graph, start, 1j * t)
    elif method == "spectral":
        col = spectral_column(graph, start, 1j * t, dec)
    elif method == "binary":
        _require_connected(graph)
        col = binary_column(graph, start, t)
    else:
        raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")
    return AmplitudeVector(col, float(t), int(start))


def probability(graph: ThresholdGraph, start: int, t: float, method: str = "closed-form",
                dec: SpectralDecomposition | None = None) -> ProbabilityDistribution:
    return evolve(graph, start, t, method, dec).probabilities()


def propagator_matrix(graph: ThresholdGraph, t: float, method: str = "closed-form") -> np.ndarray:
    """Full ``U_t``, column by column; meant for verification at small n."""
    dec = decompose(graph) if method == "spectral" else None
    return np.column_stack([evolve(graph, s, t, method, dec).entries for s in range(graph.n)])


def time_averaged(graph: ThresholdGraph, start: int, dec: SpectralDecomposition | None = None) -> ProbabilityDistribution:
    """Long-time average of ``P_t``: ``sum_lam |E_lam e_start|^2`` (cross terms of
    distinct eigenvalues average out)."""
    _require_connected(graph)
    _require_vertex(graph, start)
    dec = decompose(graph) if dec is None else dec
    masses = np.zeros(graph.n)
    for lam in dec.eigenvalues:
        masses += dec.projector_column(lam, start) ** 2
    return ProbabilityDistribution(masses, "time-averaged")


def localization_rates(p: float, n_list: Iterable[int], seeds: Iterable[int] = (0,),
                       theta: float = 0.5) -> list[dict]:
    """Rows ``{n, seed, quantity, value}`` of ``n (1 - Pbar(start))`` for a start in
    the clique (``rate_v1``) and in the independent set (``rate_v0``) of binary
    samples.  Samples lacking a vertex class skip that row."""
    rows = []
    for n in n_list:
        for seed in seeds:
            graph = generate(HiddenVariableConfig.bernoulli(n, p, theta, seed))
            if not is_connected(graph):
                continue
            dec = decompose(graph, check=False)
            starts = [("rate_v1", graph.top_vertex())]
            if graph.m == 2:
                starts.append(("rate_v0", graph.bottom_null_vertex()))
            for name, v in starts:
                pbar = time_averaged(graph, v, dec).masses[v]
                rows.append({"n": n, "seed": seed, "quantity": name, "value": n * (1 - pbar)})
    return rows
