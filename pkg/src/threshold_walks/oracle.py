"""Dense brute-force reference routines, O(n^3).

Nothing here uses block structure: matrices come from the raw edge rule and
are exponentiated or diagonalized generically.  These are the arbiters for
the closed forms elsewhere in the package, and are capped at
``MAX_ORACLE_N`` vertices.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import OracleSizeError
from .graph_model import ThresholdGraph, raw_adjacency

__all__ = [
    "MAX_ORACLE_N",
    "dense_laplacian",
    "expm",
    "sym_eigen",
    "expm_via_eigen",
    "numeric_time_average",
]

MAX_ORACLE_N = 512
EXTENDED_PRECISION_N = 128


def _check_size(a: np.ndarray) -> None:
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("expected a square matrix")
    if a.shape[0] > MAX_ORACLE_N:
        raise OracleSizeError(f"oracle is limited to n <= {MAX_ORACLE_N}, got {a.shape[0]}")


def dense_laplacian(graph: ThresholdGraph) -> np.ndarray:
    """Laplacian from the raw ``X_u + X_w > theta`` rule, canonical order."""
    if graph.n > MAX_ORACLE_N:
        raise OracleSizeError(f"oracle is limited to n <= {MAX_ORACLE_N}, got {graph.n}")
    a = raw_adjacency(graph)
    return np.diag(a.sum(axis=1)) - a


def expm(a: np.ndarray, scale: complex = 1.0) -> np.ndarray:
    """``exp(scale * a)`` by scaling and squaring of a truncated Taylor series.

    Each squaring doubles the rounding error, so matrices up to
    ``EXTENDED_PRECISION_N`` are exponentiated in ``longdouble``.
    """
    a = np.asarray(a)
    _check_size(a)
    n = a.shape[0]
    is_complex = np.iscomplexobj(scale) or np.iscomplexobj(a)
    if n <= EXTENDED_PRECISION_N:
        dtype, out_dtype = (np.clongdouble, complex) if is_complex else (np.longdouble, float)
    else:
        dtype = out_dtype = complex if is_complex else float
    x = a.astype(dtype) * np.asarray(scale, dtype=dtype)
    norm = float(np.abs(x).sum(axis=0).max()) if x.size else 0.0
    squarings = max(0, math.ceil(math.log2(norm / 0.25))) if norm > 0.25 else 0
    x = x / dtype(2) ** squarings
    eps = np.finfo(np.abs(x).dtype).eps
    result = np.eye(n, dtype=dtype)
    term = np.eye(n, dtype=dtype)
    for k in range(1, 40):
        term = term @ x / k
        result = result + term
        if np.abs(term).max() <= eps * 1e-2:
            break
    for _ in range(squarings):
        result = result @ result
    return result.astype(out_dtype)


def _round_robin(n: int) -> list[tuple[np.ndarray, np.ndarray]]:
    # each round pairs every index once; a padding index n is dropped
    players = list(range(n + (n % 2)))
    size = len(players)
    rounds = []
    for _ in range(size - 1):
        pairs = [(players[i], players[size - 1 - i]) for i in range(size // 2)]
        pairs = [(min(p, q), max(p, q)) for p, q in pairs if q < n and p < n]
        if pairs:
            p, q = np.array(pairs).T
            rounds.append((p, q))
        players = [players[0], players[-1]] + players[1:-1]
    return rounds


def sym_eigen(a: np.ndarray, tol: float = 1e-13, max_sweeps: int = 60) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (ascending) and orthonormal eigenvectors (columns) of a real
    symmetric matrix by cyclic Jacobi rotations in round-robin order.

    Each round applies n/2 disjoint rotations at once.  Iteration stops when
    the off-diagonal Frobenius norm is at most ``tol``.
    """
    a = np.array(a, dtype=float)
    _check_size(a)
    if not np.allclose(a, a.T, rtol=0, atol=1e-12 * max(1.0, np.abs(a).max())):
        raise ValueError("sym_eigen needs a symmetric matrix")
    a = (a + a.T) / 2
    n = a.shape[0]
    v = np.eye(n)
    if n == 1:
        return a.diagonal().copy(), v
    bound = tol
    rounds = _round_robin(n)
    for _ in range(max_sweeps):
        off = np.linalg.norm(a - np.diag(a.diagonal()))
        if off <= bound:
            break
        for p, q in rounds:
            apq = a[p, q]
            active = apq != 0.0
            if not active.any():
                continue
            p, q, apq = p[active], q[active], apq[active]
            tau = (a[q, q] - a[p, p]) / (2.0 * apq)
            t = np.where(tau >= 0, 1.0, -1.0) / (np.abs(tau) + np.hypot(1.0, tau))
            c = 1.0 / np.sqrt(1.0 + t * t)
            s = t * c
            rp, rq = a[p, :].copy(), a[q, :].copy()
            a[p, :] = c[:, None] * rp - s[:, None] * rq
            a[q, :] = s[:, None] * rp + c[:, None] * rq
            cp, cq = a[:, p].copy(), a[:, q].copy()
            a[:, p] = cp * c - cq * s
            a[:, q] = cp * s + cq * c
            a[p, q] = 0.0
            a[q, p] = 0.0
            vp, vq = v[:, p].copy(), v[:, q].copy()
            v[:, p] = vp * c - vq * s
            v[:, q] = vp * s + vq * c
    else:
        raise RuntimeError("Jacobi iteration did not converge")
    w = a.diagonal().copy()
    idx = np.argsort(w, kind="stable")
    return w[idx], v[:, idx]


def expm_via_eigen(a: np.ndarray, scale: complex = 1.0) -> np.ndarray:
    """Second, independent route to ``exp(scale * a)`` for symmetric ``a``."""
    w, v = sym_eigen(a)
    return (v * np.exp(scale * w)) @ v.T


def numeric_time_average(graph: ThresholdGraph, start: int, T: float, steps: int, chunk: int = 4096) -> np.ndarray:
    """Trapezoidal average of the quantum-walk distribution over ``[0, T]``.

    ``steps`` is the number of intervals; amplitudes come from a dense
    Jacobi eigendecomposition of the raw-rule Laplacian.
    """
    if T <= 0:
        raise ValueError("T must be positive")
    if steps < 1000:
        raise ValueError("steps must be at least 1000")
    w, v = sym_eigen(dense_laplacian(graph))
    coef = v[start, :]
    times = np.linspace(0.0, T, steps + 1)
    weights = np.full(steps + 1, 1.0)
    weights[[0, -1]] = 0.5
    acc = np.zeros(graph.n)
    for lo in range(0, steps + 1, chunk):
        ts = times[lo:lo + chunk]
        phases = np.exp(1j * np.outer(ts, w)) * coef        # (chunk, n)
        amps = phases @ v.T
        acc += weights[lo:lo + chunk] @ (amps.real**2 + amps.imag**2)
    return acc / steps
