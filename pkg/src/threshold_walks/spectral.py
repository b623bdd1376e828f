"""Exact Laplacian eigendecomposition of a connected threshold graph.

Every eigenvector is one of three shapes laid over a contiguous slice of the
canonical order:

* ``helmert``  -- the ``size - 1`` vectors ``(1, ..., 1, -j, 0, ...)/sqrt(j(j+1))``
  spanning the zero-sum vectors of one block of twin vertices;
* ``balanced`` -- ``(b * 1_a, -a * 1_b)/sqrt(ab(a+b))`` over two adjacent slices;
* ``constant`` -- ``1/sqrt(n)``.

Eigenvalues are integers, so eigenspaces are keyed by ``int``.  Projectors
work on the implicit form for any n; dense vectors are materialized only up
to ``DENSE_LIMIT``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import PreconditionError, SpectralConsistencyError
from .graph_model import ThresholdGraph, is_connected, laplacian_matrix

__all__ = [
    "DENSE_LIMIT",
    "CHECK_LIMIT",
    "Piece",
    "SpectralDecomposition",
    "decompose",
    "projector_apply",
]

DENSE_LIMIT = 4096
CHECK_LIMIT = 512


@dataclass(frozen=True)
class Piece:
    kind: str
    start: int
    a: int
    b: int = 0

    @property
    def dim(self) -> int:
        return self.a - 1 if self.kind == "helmert" else 1

    @property
    def stop(self) -> int:
        return self.start + self.a + self.b

    def contains(self, v: int) -> bool:
        return self.start <= v < self.stop

    def project(self, psi: np.ndarray, out: np.ndarray) -> None:
        """Add the orthogonal projection of ``psi`` onto this piece to ``out``."""
        s, a, b = self.start, self.a, self.b
        if self.kind == "helmert":
            seg = psi[s:s + a]
            out[s:s + a] += seg - seg.mean(axis=0)
        elif self.kind == "balanced":
            norm2 = a * b * (a + b)
            coef = (b * psi[s:s + a].sum(axis=0) - a * psi[s + a:s + a + b].sum(axis=0)) / norm2
            out[s:s + a] += b * coef
            out[s + a:s + a + b] -= a * coef
        else:
            out += psi.mean(axis=0)

    def dense(self, n: int) -> np.ndarray:
        """Columns of this piece's eigenvectors, shape (n, dim)."""
        s, a, b = self.start, self.a, self.b
        if self.kind == "helmert":
            out = np.zeros((n, a - 1))
            for j in range(1, a):
                out[s:s + j, j - 1] = 1.0
                out[s + j, j - 1] = -float(j)
                out[:, j - 1] /= np.sqrt(j * (j + 1.0))
            return out
        out = np.zeros((n, 1))
        if self.kind == "balanced":
            out[s:s + a, 0] = b
            out[s + a:s + a + b, 0] = -a
            out /= np.sqrt(a * b * (a + b))
        else:
            out[:, 0] = 1.0 / np.sqrt(n)
        return out


@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigenspaces keyed by integer eigenvalue, plus the level offsets used to
    place them (``u[i-1]`` vertices above level i, ``d[i-1]`` below)."""

    n: int
    eigenspaces: dict[int, tuple[Piece, ...]]
    u: tuple[int, ...]
    d: tuple[int, ...]

    @property
    def eigenvalues(self) -> list[int]:
        return sorted(self.eigenspaces, reverse=True)

    def multiplicity(self, lam: int) -> int:
        return sum(p.dim for p in self.eigenspaces[lam])

    def multiplicities(self) -> dict[int, int]:
        return {lam: self.multiplicity(lam) for lam in self.eigenvalues}

    def vectors(self, lam: int) -> np.ndarray:
        if self.n > DENSE_LIMIT:
            raise ValueError(f"dense eigenvectors are only built for n <= {DENSE_LIMIT}")
        cols = [p.dense(self.n) for p in self._space(lam)]
        return np.hstack(cols) if cols else np.zeros((self.n, 0))

    @property
    def eigenpairs(self) -> list[tuple[int, np.ndarray]]:
        return [(lam, self.vectors(lam)) for lam in self.eigenvalues]

    def dense(self) -> tuple[np.ndarray, np.ndarray]:
        """All eigenvalues and the orthogonal matrix of eigenvectors (columns)."""
        lams, cols = [], []
        for lam, vecs in self.eigenpairs:
            lams += [lam] * vecs.shape[1]
            cols.append(vecs)
        return np.asarray(lams, dtype=float), np.hstack(cols)

    def _space(self, lam) -> tuple[Piece, ...]:
        key = int(round(lam)) if float(lam).is_integer() else None
        if key not in self.eigenspaces:
            raise ValueError(f"{lam} is not an eigenvalue")
        return self.eigenspaces[key]

    def projector_apply(self, lam, psi: np.ndarray) -> np.ndarray:
        psi = np.asarray(psi)
        out = np.zeros_like(psi, dtype=np.result_type(psi.dtype, float))
        for piece in self._space(lam):
            piece.project(psi, out)
        return out

    def projector_column(self, lam, v: int) -> np.ndarray:
        """``E_lam e_v`` without touching pieces that miss ``v``."""
        out = np.zeros(self.n)
        delta = np.zeros(self.n)
        delta[v] = 1.0
        for piece in self._space(lam):
            if piece.contains(v):
                piece.project(delta, out)
        return out


def projector_apply(dec: SpectralDecomposition, lam, psi: np.ndarray) -> np.ndarray:
    """Orthogonal projection of ``psi`` onto the ``lam`` eigenspace."""
    return dec.projector_apply(lam, psi)


def decompose(graph: ThresholdGraph, check: bool | None = None) -> SpectralDecomposition:
    """Eigendecomposition of the Laplacian of a connected threshold graph.

    With ``check`` (default: on for n <= ``CHECK_LIMIT``) every eigenpair is
    verified against the dense Laplacian: residual and Gram deviation must be
    at most 1e-10.
    """
    if not is_connected(graph):
        raise PreconditionError("spectral decomposition needs a connected graph")
    b = graph.blocks
    n, m = graph.n, b.m
    u, d = b.offsets_above(), b.offsets_below()
    spaces: dict[int, list[Piece]] = {}

    def add(lam: int, piece: Piece) -> None:
        if piece.dim > 0:
            spaces.setdefault(int(lam), []).append(piece)

    for i in range(m):
        ki, li = b.k[i], b.l[i]
        clique_start = u[i] + li
        if ki:
            lam = b.degrees_k[i] + 1
            add(lam, Piece("helmert", clique_start, ki))
            if d[i]:
                add(lam, Piece("balanced", clique_start, ki, d[i]))
        if li:
            lam = b.degrees_l[i]
            add(lam, Piece("helmert", u[i], li))
            if ki + d[i]:
                add(lam, Piece("balanced", u[i], li, ki + d[i]))
    add(0, Piece("constant", 0, n))
    dec = SpectralDecomposition(n, {k: tuple(v) for k, v in spaces.items()}, tuple(u), tuple(d))

    if sum(dec.multiplicities().values()) != n:
        raise SpectralConsistencyError("eigenvector count does not equal n")
    if check is None:
        check = n <= CHECK_LIMIT
    if check:
        _verify(graph, dec)
    return dec


def _verify(graph: ThresholdGraph, dec: SpectralDecomposition, tol: float = 1e-10) -> None:
    lap = laplacian_matrix(graph)
    lams, vecs = dec.dense()
    residual = np.abs(lap @ vecs - vecs * lams).max()
    if residual > tol:
        raise SpectralConsistencyError(f"eigen-residual {residual:.3e} exceeds {tol}")
    gram = np.abs(vecs.T @ vecs - np.eye(graph.n)).max()
    if gram > tol:
        raise SpectralConsistencyError(f"Gram deviation {gram:.3e} exceeds {tol}")
