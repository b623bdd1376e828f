import numpy as np
import pytest

from threshold_walks.graph_model import HiddenVariableConfig, ThresholdGraph, generate, is_connected

ACCEPTANCE_LINES: list[str] = []


def record(criterion: str, ok: bool, detail: str) -> None:
    ACCEPTANCE_LINES.append(f"[{'PASS' if ok else 'FAIL'}] {criterion}: {detail}")
    print(ACCEPTANCE_LINES[-1])


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def random_sequence(rng: np.random.Generator, n: int, connected: bool = True) -> list[int]:
    bits = list(rng.integers(0, 2, size=n))
    bits[1] = bits[0]
    if connected:
        bits[-1] = 1
    return [int(b) for b in bits]


def connected_general(seed: int, n: int) -> ThresholdGraph:
    """Connected sample from uniform hidden values; reseeds until connected."""
    for attempt in range(1000):
        g = generate(HiddenVariableConfig.uniform(n, 0.0, 1.0, 1.0, seed + 7919 * attempt))
        if is_connected(g):
            return g
    raise RuntimeError("no connected sample")


def connected_binary(seed: int, n: int, p: float = 0.5) -> ThresholdGraph:
    for attempt in range(1000):
        g = generate(HiddenVariableConfig.bernoulli(n, p, 0.5, seed + 7919 * attempt))
        if is_connected(g) and g.m == 2:
            return g
    raise RuntimeError("no connected binary sample")


@pytest.fixture
def binary5() -> ThresholdGraph:
    """k_G = 3 clique vertices joined to l_G = 2 independent vertices."""
    return ThresholdGraph.from_values([1, 1, 1, 0, 0], 0.5)


@pytest.fixture
def fig1() -> ThresholdGraph:
    return ThresholdGraph.from_creation_sequence([1, 1, 0, 0, 1, 0, 1, 0])
