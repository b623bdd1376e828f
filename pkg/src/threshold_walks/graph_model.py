"""Threshold network model: sampling, creation sequences and block structure.

Vertices of a :class:`ThresholdGraph` are addressed by *canonical index*.
The canonical order lists levels from the top level ``m`` down to level 1,
and inside each level the null block ``V_i^(0)`` precedes the clique block
``V_i^(1)``.  This is the reverse of creation-sequence order, so the
eigenvector patterns in :mod:`threshold_walks.spectral` are contiguous
slices.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import groupby
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import ConfigurationError

__all__ = [
    "HiddenVariableConfig",
    "BlockStructure",
    "ThresholdGraph",
    "generate",
    "creation_sequence",
    "blocks_from_sequence",
    "block_degrees",
    "realize_creation_sequence",
    "is_connected",
    "edge_list",
    "adjacency_matrix",
    "raw_adjacency",
    "laplacian_matrix",
    "laplacian_apply",
    "graph_to_json",
    "graph_from_json",
    "write_graph",
    "read_graph",
    "write_edge_list",
]

_DISTRIBUTIONS = ("bernoulli", "uniform", "explicit")


@dataclass(frozen=True)
class HiddenVariableConfig:
    """Parameters of a threshold network model sample.

    ``params`` holds ``(p,)`` for bernoulli, ``(a, b)`` for uniform and the
    sample values themselves for explicit.
    """

    n: int
    distribution: str
    params: tuple[float, ...]
    theta: float
    seed: int = 0

    def __post_init__(self) -> None:
        if self.distribution not in _DISTRIBUTIONS:
            raise ConfigurationError(f"unknown distribution {self.distribution!r}")
        if int(self.n) != self.n or self.n < 2:
            raise ConfigurationError(f"n must be an integer >= 2, got {self.n}")
        if not 0 <= self.seed < 2**64:
            raise ConfigurationError("seed must be a 64-bit unsigned integer")
        if not np.isfinite(self.theta):
            raise ConfigurationError("theta must be finite")
        if self.distribution == "bernoulli":
            if len(self.params) != 1 or not 0.0 < self.params[0] < 1.0:
                raise ConfigurationError("bernoulli needs a single p in (0, 1)")
            # the binary model is only defined for thresholds in [0, 1)
            if not 0.0 <= self.theta < 1.0:
                raise ConfigurationError("bernoulli model needs theta in [0, 1)")
        elif self.distribution == "uniform":
            if len(self.params) != 2 or not self.params[0] < self.params[1]:
                raise ConfigurationError("uniform needs bounds a < b")
        elif len(self.params) != self.n:
            raise ConfigurationError(
                f"explicit sample has {len(self.params)} values, expected n={self.n}"
            )

    @classmethod
    def bernoulli(cls, n: int, p: float, theta: float = 0.5, seed: int = 0):
        return cls(n, "bernoulli", (float(p),), float(theta), int(seed))

    @classmethod
    def uniform(cls, n: int, a: float, b: float, theta: float, seed: int = 0):
        return cls(n, "uniform", (float(a), float(b)), float(theta), int(seed))

    @classmethod
    def explicit(cls, values: Sequence[float], theta: float):
        values = tuple(float(v) for v in values)
        return cls(len(values), "explicit", values, float(theta), 0)

    @classmethod
    def parse(cls, n: int | None, spec: str, theta: float, seed: int = 0):
        """Build a config from a ``kind:args`` string such as ``bernoulli:0.5``,
        ``uniform:0,1`` or ``explicit:1,2,-3``."""
        kind, _, rest = spec.partition(":")
        try:
            args = [float(a) for a in rest.split(",")] if rest else []
        except ValueError as exc:
            raise ConfigurationError(f"bad distribution arguments in {spec!r}") from exc
        if kind == "explicit":
            if n is not None and n != len(args):
                raise ConfigurationError("--n disagrees with explicit sample length")
            return cls.explicit(args, theta)
        if n is None:
            raise ConfigurationError(f"{kind} distribution needs n")
        return cls(n, kind, tuple(args), float(theta), int(seed))

    def sample(self) -> np.ndarray:
        if self.distribution == "explicit":
            return np.asarray(self.params, dtype=float)
        rng = np.random.default_rng(self.seed)
        if self.distribution == "bernoulli":
            return (rng.random(self.n) < self.params[0]).astype(float)
        return rng.uniform(self.params[0], self.params[1], size=self.n)

    def to_dict(self) -> dict:
        out = {"distribution": self.distribution, "theta": self.theta, "seed": self.seed}
        if self.distribution != "explicit":
            out["params"] = list(self.params)
        return out


@dataclass(frozen=True)
class BlockStructure:
    """Run lengths ``k_i`` (ones) and ``l_i`` (zeros) of a creation sequence."""

    k: tuple[int, ...]
    l: tuple[int, ...]
    degrees_k: tuple[int, ...] = field(init=False)
    degrees_l: tuple[int, ...] = field(init=False)

    def __post_init__(self) -> None:
        k, l = tuple(int(v) for v in self.k), tuple(int(v) for v in self.l)
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "l", l)
        m = len(k)
        if m < 1 or len(l) != m:
            raise ConfigurationError("k and l must be non-empty and of equal length")
        if any(v < 0 for v in k + l):
            raise ConfigurationError("run lengths must be nonnegative")
        if any(v < 1 for v in k[1:]) or any(v < 1 for v in l[:-1]):
            raise ConfigurationError("k_2..k_m and l_1..l_{m-1} must be positive")
        if k[0] == 0:
            if l[0] < 2:
                raise ConfigurationError("k_1 = 0 requires l_1 >= 2")
        elif k[0] < 2:
            raise ConfigurationError("k_1 must be 0 or at least 2")
        dk, dl = block_degrees(k, l)
        object.__setattr__(self, "degrees_k", dk)
        object.__setattr__(self, "degrees_l", dl)

    @property
    def m(self) -> int:
        return len(self.k)

    @property
    def n(self) -> int:
        return sum(self.k) + sum(self.l)

    def sequence(self) -> list[int]:
        bits: list[int] = []
        for ki, li in zip(self.k, self.l):
            bits += [1] * ki + [0] * li
        return bits

    def offsets_below(self) -> list[int]:
        """``d_i``: number of vertices in levels strictly below level i."""
        out, acc = [], 0
        for ki, li in zip(self.k, self.l):
            out.append(acc)
            acc += ki + li
        return out

    def offsets_above(self) -> list[int]:
        """``u_i``: number of vertices in levels strictly above level i."""
        n = self.n
        return [n - d - ki - li for d, ki, li in zip(self.offsets_below(), self.k, self.l)]


def block_degrees(k: Sequence[int], l: Sequence[int]) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Common degree of each clique block and each null block.

    A clique vertex at level i sees every other clique vertex plus the null
    blocks of lower levels; a null vertex at level i sees only the clique
    blocks of higher levels.
    """
    total_k = sum(k)
    dk, dl = [], []
    lower_l, upper_k = 0, total_k
    for ki, li in zip(k, l):
        dk.append(total_k - 1 + lower_l)
        lower_l += li
        upper_k -= ki
        dl.append(upper_k)
    return tuple(dk), tuple(dl)


def creation_sequence(x: Sequence[float], theta: float) -> list[int]:
    """Creation sequence ``s_1..s_n`` of the threshold graph on values ``x``."""
    return _creation(np.asarray(x, dtype=float), float(theta))[0]


def _creation(x: np.ndarray, theta: float) -> tuple[list[int], np.ndarray]:
    # returns the bits and, per original vertex, its 1-based creation position
    n = len(x)
    if n < 2:
        raise ValueError("creation sequence needs at least two values")
    idx = np.argsort(x, kind="stable")
    xs = x[idx]
    bits = [0] * (n + 1)
    pos = np.empty(n, dtype=np.int64)
    lo, hi = 0, n - 1
    for j in range(n, 1, -1):
        if xs[lo] + xs[hi] > theta:
            bits[j] = 1
            pos[idx[hi]] = j
            hi -= 1
        else:
            pos[idx[lo]] = j
            lo += 1
    pos[idx[lo]] = 1
    bits[1] = bits[2]
    return bits[1:], pos


def blocks_from_sequence(bits: Sequence[int]) -> BlockStructure:
    runs = [(b, len(list(g))) for b, g in groupby(int(b) for b in bits)]
    if not runs or any(b not in (0, 1) for b, _ in runs):
        raise ConfigurationError("creation sequence must be a non-empty 0/1 sequence")
    k, l = [], []
    if runs[0][0] == 0:
        k.append(0)
        l.append(runs.pop(0)[1])
    for b, length in runs:
        if b == 1:
            k.append(length)
            l.append(0)
        else:
            l[-1] = length
    return BlockStructure(tuple(k), tuple(l))


def realize_creation_sequence(bits: Sequence[int]) -> tuple[list[float], float]:
    """Hidden values and threshold whose creation sequence is ``bits``.

    Vertex j (1-based, creation order) gets ``+j`` if ``s_j = 1`` and ``-j``
    otherwise, with threshold 0.
    """
    bits = [int(b) for b in bits]
    if len(bits) < 2 or bits[0] != bits[1]:
        raise ConfigurationError("a creation sequence has s_1 == s_2 and length >= 2")
    return [float(j if b else -j) for j, b in enumerate(bits, start=1)], 0.0


@dataclass(frozen=True, eq=False)
class ThresholdGraph:
    """A realized threshold graph.

    ``order[v]`` is the canonical index of original vertex ``v``;
    ``levels`` and ``parts`` are indexed by canonical index.
    """

    n: int
    config: HiddenVariableConfig
    x: np.ndarray
    blocks: BlockStructure
    order: np.ndarray
    levels: np.ndarray
    parts: np.ndarray

    @classmethod
    def from_values(cls, x: Sequence[float], theta: float, config: HiddenVariableConfig | None = None):
        x = np.asarray(x, dtype=float)
        if config is None:
            config = HiddenVariableConfig.explicit(x, theta)
        bits, pos = _creation(x, float(theta))
        blocks = blocks_from_sequence(bits)
        n = len(x)
        order = n - pos
        levels = np.empty(n, dtype=np.int64)
        parts = np.empty(n, dtype=np.int64)
        # creation position j -> canonical n - j, so walk creation order backwards
        seq_levels, seq_parts = [], []
        for i, (ki, li) in enumerate(zip(blocks.k, blocks.l), start=1):
            seq_levels += [i] * (ki + li)
            seq_parts += [1] * ki + [0] * li
        levels[:] = seq_levels[::-1]
        parts[:] = seq_parts[::-1]
        for arr in (x, order, levels, parts):
            arr.setflags(write=False)
        graph = cls(n, config, x, blocks, order, levels, parts)
        graph._check_degrees()
        return graph

    @classmethod
    def from_creation_sequence(cls, bits: Sequence[int]):
        x, theta = realize_creation_sequence(bits)
        return cls.from_values(x, theta)

    def _check_degrees(self) -> None:
        # block degree formula against raw-rule degrees, O(n log n)
        xs = np.sort(self.x)
        theta, n = self.config.theta, len(xs)
        cut = np.searchsorted(xs, theta - self.x, side="right")
        # the subtraction can round across the boundary; settle on the sum rule
        while True:
            down = (cut > 0) & (xs[np.maximum(cut - 1, 0)] + self.x > theta)
            up = (cut < n) & ~(xs[np.minimum(cut, n - 1)] + self.x > theta)
            if not (down.any() or up.any()):
                break
            cut = cut - down + up
        raw = n - cut - (self.x + self.x > theta).astype(np.int64)
        canon = np.empty(self.n, dtype=np.int64)
        canon[self.order] = raw
        if not np.array_equal(canon, self.degrees()):
            raise ConfigurationError("block degrees disagree with the edge rule")

    # ---- block bookkeeping ------------------------------------------------

    @property
    def m(self) -> int:
        return self.blocks.m

    @property
    def theta(self) -> float:
        return self.config.theta

    def level_of(self, v: int) -> tuple[int, int]:
        """(level, part) of canonical vertex ``v``."""
        return int(self.levels[v]), int(self.parts[v])

    def block_table(self) -> list[tuple[int, int, int, int]]:
        """Non-empty blocks as ``(level, part, start, size)`` in canonical order."""
        out, start = [], 0
        for i in range(self.m, 0, -1):
            for part, size in ((0, self.blocks.l[i - 1]), (1, self.blocks.k[i - 1])):
                if size:
                    out.append((i, part, start, size))
                    start += size
        return out

    def block_start(self, level: int, part: int) -> int:
        for i, p, start, _ in self.block_table():
            if (i, p) == (level, part):
                return start
        raise KeyError((level, part))

    def degrees(self) -> np.ndarray:
        dk = np.asarray(self.blocks.degrees_k)
        dl = np.asarray(self.blocks.degrees_l)
        return np.where(self.parts == 1, dk[self.levels - 1], dl[self.levels - 1])

    def is_binary(self) -> bool:
        """Complete split graph: one clique joined to one independent set."""
        b = self.blocks
        return (b.m == 2 and b.k[0] == 0 and b.l[1] == 0) or (b.m == 1 and b.l[0] == 0)

    def binary_split(self) -> tuple[int, int]:
        """``(k_G, l_G)`` for a binary graph; a complete graph reads as ``(n, 0)``."""
        if not self.is_binary():
            raise ValueError("graph is not a complete split graph")
        if self.m == 1:
            return self.n, 0
        return self.blocks.k[1], self.blocks.l[0]

    def top_vertex(self) -> int:
        """First vertex of ``V_m^(1)`` (a vertex of degree n-1 when connected)."""
        if self.blocks.k[-1] == 0:
            raise ValueError("top level has no clique vertices")
        return self.block_start(self.m, 1)

    def bottom_null_vertex(self) -> int:
        """First vertex of ``V_1^(0)``."""
        if self.blocks.l[0] == 0:
            raise ValueError("level 1 has no null vertices")
        return self.block_start(1, 0)


def generate(config: HiddenVariableConfig) -> ThresholdGraph:
    """Sample a threshold graph; deterministic in ``config.seed``."""
    return ThresholdGraph.from_values(config.sample(), config.theta, config)


def is_connected(graph: ThresholdGraph) -> bool:
    # the top level must end with a dominating vertex
    return graph.n >= 2 and graph.blocks.l[-1] == 0 and graph.blocks.k[-1] >= 1


def adjacency_matrix(graph: ThresholdGraph) -> np.ndarray:
    """Dense 0/1 adjacency in canonical order, from the block rules."""
    lv, pt = graph.levels, graph.parts
    both_clique = (pt[:, None] == 1) & (pt[None, :] == 1)
    clique_over_null = ((pt[:, None] == 1) & (pt[None, :] == 0) & (lv[None, :] < lv[:, None]))
    a = both_clique | clique_over_null | clique_over_null.T
    np.fill_diagonal(a, False)
    return a.astype(float)


def raw_adjacency(graph: ThresholdGraph) -> np.ndarray:
    """Dense adjacency in canonical order straight from ``X_u + X_w > theta``."""
    xc = np.empty(graph.n)
    xc[graph.order] = graph.x
    a = (xc[:, None] + xc[None, :]) > graph.theta
    np.fill_diagonal(a, False)
    return a.astype(float)


def laplacian_matrix(graph: ThresholdGraph) -> np.ndarray:
    a = adjacency_matrix(graph)
    return np.diag(a.sum(axis=1)) - a


def laplacian_apply(graph: ThresholdGraph, vec: np.ndarray) -> np.ndarray:
    """``L @ vec`` in O(n) per column using block sums; ``vec`` is (n,) or (n, c)."""
    vec = np.asarray(vec)
    m = graph.m
    lv = graph.levels - 1
    clique = graph.parts == 1
    shape = (m,) + vec.shape[1:]
    s1 = np.zeros(shape, dtype=vec.dtype)
    s0 = np.zeros(shape, dtype=vec.dtype)
    np.add.at(s1, lv[clique], vec[clique])
    np.add.at(s0, lv[~clique], vec[~clique])
    total1 = s1.sum(axis=0)
    null_below = np.cumsum(s0, axis=0) - s0          # sum of s0 over levels < i
    clique_above = np.cumsum(s1[::-1], axis=0)[::-1] - s1  # sum of s1 over levels > i
    nbr = np.where(
        clique.reshape((-1,) + (1,) * (vec.ndim - 1)),
        total1 - vec + null_below[lv],
        clique_above[lv],
    )
    deg = graph.degrees().reshape((-1,) + (1,) * (vec.ndim - 1))
    return deg * vec - nbr


def edge_list(graph: ThresholdGraph) -> list[tuple[int, int]]:
    a = adjacency_matrix(graph)
    u, w = np.nonzero(np.triu(a, 1))
    return [(int(i), int(j)) for i, j in zip(u, w)]


# ---- serialization ------------------------------------------------------------


def graph_to_json(graph: ThresholdGraph) -> dict:
    return {
        "n": graph.n,
        "theta": graph.theta,
        "x": [float(v) for v in graph.x],
        "blocks": {"k": list(graph.blocks.k), "l": list(graph.blocks.l)},
        "order": [int(v) for v in graph.order],
        "edges": [list(e) for e in edge_list(graph)],
        "config": graph.config.to_dict(),
    }


def graph_from_json(data: dict) -> ThresholdGraph:
    """Rebuild a graph from its JSON form; blocks, order and edges are re-derived
    from ``x`` and ``theta`` and must agree with the stored copies."""
    try:
        x, theta = data["x"], float(data["theta"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigurationError("graph JSON needs 'x' and 'theta'") from exc
    cfg = data.get("config", {})
    if cfg.get("distribution") in ("bernoulli", "uniform"):
        config = HiddenVariableConfig(
            len(x), cfg["distribution"], tuple(cfg["params"]), theta, int(cfg.get("seed", 0))
        )
    else:
        config = HiddenVariableConfig.explicit(x, theta)
    graph = ThresholdGraph.from_values(x, theta, config)
    stored = data.get("blocks")
    if stored is not None and (list(graph.blocks.k), list(graph.blocks.l)) != (stored["k"], stored["l"]):
        raise ConfigurationError("stored blocks disagree with x/theta")
    if "order" in data and list(data["order"]) != [int(v) for v in graph.order]:
        raise ConfigurationError("stored order disagrees with x/theta")
    if "edges" in data and [tuple(e) for e in data["edges"]] != edge_list(graph):
        raise ConfigurationError("stored edges disagree with x/theta")
    return graph


def write_graph(graph: ThresholdGraph, path: str | Path) -> None:
    Path(path).write_text(json.dumps(graph_to_json(graph), indent=1) + "\n", encoding="utf-8")


def read_graph(path: str | Path) -> ThresholdGraph:
    return graph_from_json(json.loads(Path(path).read_text(encoding="utf-8")))


def write_edge_list(graph: ThresholdGraph, path: str | Path) -> None:
    lines = "".join(f"{u} {w}\n" for u, w in edge_list(graph))
    Path(path).write_text(lines, encoding="utf-8")
