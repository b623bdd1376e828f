"""One test per acceptance criterion; each prints a PASS/FAIL line that is
repeated in the terminal summary."""

import hashlib
import math
import subprocess
import sys
import time

import numpy as np
from threshold_walks.classical_walk import classical_evolve, classical_spread_check, classical_time_average
from threshold_walks.errors import OracleSizeError
from threshold_walks.graph_model import HiddenVariableConfig, ThresholdGraph, generate
from threshold_walks.oracle import MAX_ORACLE_N, dense_laplacian, expm, numeric_time_average, sym_eigen
from threshold_walks.quantum_walk import (
    covers,
    localization_rates,
    probability,
    propagator_entry_binary,
    propagator_entry_general,
    propagator_matrix,
    time_averaged,
)
from threshold_walks.spectral import decompose

from conftest import connected_binary, connected_general, random_sequence, record

TIMES = [0.0, 0.37, 1.0, math.pi, 10.0]


def test_oracle_equivalence():
    rng = np.random.default_rng(2024)
    sizes = rng.integers(4, 65, size=100)
    graphs = [connected_binary(s, int(n)) for s, n in enumerate(sizes[:50])]
    graphs += [connected_general(s, int(n)) for s, n in enumerate(sizes[50:])]
    began = time.perf_counter()
    worst = 0.0
    for g in graphs:
        lap = dense_laplacian(g)
        for t in TIMES:
            worst = max(worst, np.abs(propagator_matrix(g, t) - expm(lap, 1j * t)).max())
    elapsed = time.perf_counter() - began
    ok = worst <= 1e-9 and elapsed < 180
    record("1 oracle equivalence", ok, f"max |U - U_oracle| = {worst:.2e} over 100 graphs x 5 t in {elapsed:.1f}s")
    assert ok


def test_general_formula_reduces_to_binary():
    worst, pairs = 0.0, 0
    for seed in range(20):
        g = connected_binary(seed, 4 + 3 * seed)
        for t in TIMES:
            for v in range(g.n):
                for w in range(g.n):
                    if covers(g, v, w):
                        worst = max(worst, abs(propagator_entry_general(g, v, w, t) - propagator_entry_binary(g, v, w, t)))
                        pairs += 1
    ok = worst <= 1e-12
    record("2 general vs binary closed form", ok, f"max deviation {worst:.2e} over {pairs} entries")
    assert ok


def test_spectral_tables():
    rng = np.random.default_rng(7)
    residual = gram = 0.0
    branches = set()
    counts_ok = True
    for i in range(100):
        n = int(rng.integers(3, 201))
        bits = random_sequence(rng, n)
        bits[0] = bits[1] = i % 2
        g = ThresholdGraph.from_creation_sequence(bits)
        branches.add(g.blocks.k[0] == 0)
        dec = decompose(g, check=False)
        counts_ok &= sum(dec.multiplicities().values()) == n
        lams, vecs = dec.dense()
        lap = dense_laplacian(g)
        residual = max(residual, np.abs(lap @ vecs - vecs * lams).max())
        gram = max(gram, np.abs(vecs.T @ vecs - np.eye(n)).max())
    ok = residual <= 1e-10 and gram <= 1e-10 and counts_ok and branches == {True, False}
    record("3 spectral tables", ok,
           f"residual {residual:.2e}, Gram {gram:.2e}, counts sum to n: {counts_ok}, both level-1 branches: {branches == {True, False}}")
    assert ok


def test_time_averages():
    worst = 0.0
    for n in range(4, 65):
        g = connected_binary(n, n)
        k, l = g.binary_split()
        v1 = g.top_vertex()
        top = time_averaged(g, v1).masses
        expected = np.full(n, 2 / n**2)
        expected[v1] = (1 - 1 / n) ** 2 + 1 / n**2
        worst = max(worst, np.abs(top - expected).max())
        if l >= 1:
            v0 = g.bottom_null_vertex()
            tail = (k / (n * l)) ** 2 + 1 / n**2
            expected = np.full(n, 2 / n**2)
            expected[k:] = 1 / l**2 + tail
            expected[v0] = (1 - 1 / l) ** 2 + tail
            worst = max(worst, np.abs(time_averaged(g, v0).masses - expected).max())
    numeric = 0.0
    for g in (ThresholdGraph.from_values([1, 1, 1, 0, 0], 0.5), connected_general(3, 9)):
        for v in (0, g.n - 1):
            avg = numeric_time_average(g, v, T=2000.0, steps=200_000)
            numeric = max(numeric, np.abs(avg - time_averaged(g, v).masses).max())
    ok = worst <= 1e-12 and numeric <= 5e-3
    record("4 time averages", ok, f"closed-form deviation {worst:.2e}, numeric T=2000 deviation {numeric:.2e}")
    assert ok


def test_rates():
    rows = localization_rates(0.5, [16, 256, 4096], seeds=range(20))
    v1 = max(abs(r["value"] - (2 - 2 / r["n"])) for r in rows if r["quantity"] == "rate_v1")
    v0 = [r["value"] for r in rows if r["quantity"] == "rate_v0" and r["n"] == 4096]
    median = float(np.median(v0))
    ok = v1 <= 1e-12 and len(v0) == 20 and abs(median - 4) <= 0.05 * 4
    record("5 localization rates", ok, f"v1 deviation from 2-2/n {v1:.2e}; v0 median at n=4096 {median:.4f} (target 4 +/- 5%)")
    assert ok


def test_localization_contrast():
    n, seeds = 1024, range(20)
    q_min, c_max, uniform = 1.0, 0.0, 0.0
    for seed in seeds:
        g = generate(HiddenVariableConfig.bernoulli(n, 0.5, 0.5, seed))
        v = g.top_vertex()
        q_min = min(q_min, probability(g, v, 1.0).masses[v])
        c_max = max(c_max, classical_evolve(g, v, 1.0, method="closed-form").masses[v])
        uniform = max(uniform, np.abs(classical_time_average(g, v).masses - 1 / n).max())
    spread = [r["value"] for r in classical_spread_check(0.5, 1.0, [n], seeds)]
    spread_med = float(np.median(spread))
    ok = q_min >= 0.99 and c_max <= 0.01 and spread_med <= 0.1 and uniform <= 1e-12
    record("6 quantum/classical contrast", ok,
           f"min quantum P(start) {q_min:.5f}, max classical P(start) {c_max:.2e}, "
           f"median max|nP-1| {spread_med:.3e} (max {max(spread):.3e}), classical average deviation {uniform:.1e}")
    assert ok


def test_modulus_identity():
    g = ThresholdGraph.from_values([1, 1, 1, 1, 0, 0, 0], 0.5)
    n = g.n
    lap = dense_laplacian(g)
    corrected = printed = 0.0
    for t in (0.3, 1.1, 2.5):
        cross = abs(expm(lap, 1j * t)[0, n - 1]) ** 2
        corrected = max(corrected, abs(cross - (2 - 2 * math.cos(n * t)) / n**2))
        printed = min(printed if printed else 1.0, abs(cross - (2 - math.cos(n * t)) / n**2))
    ok = corrected <= 1e-10 and printed > 1e-10
    record("7 cross-block modulus", ok, f"(2-2cos nt)/n^2 deviation {corrected:.2e}; (2-cos nt)/n^2 misses by >= {printed:.2e}")
    assert ok


def test_performance_and_oracle_bound():
    g = generate(HiddenVariableConfig.bernoulli(100_000, 0.5, 0.5, 0))
    v = g.top_vertex()
    began = time.perf_counter()
    masses = probability(g, v, 1.0).masses
    elapsed = time.perf_counter() - began
    bounded = True
    for call in (lambda a: expm(a, 1j), sym_eigen):
        try:
            call(np.zeros((MAX_ORACLE_N + 1, MAX_ORACLE_N + 1)))
            bounded = False
        except OracleSizeError:
            pass
    ok = elapsed < 1.0 and bounded and abs(masses.sum() - 1) <= 1e-12
    record("8 performance", ok, f"n=1e5 distribution in {elapsed * 1e3:.1f} ms; oracle refuses n={MAX_ORACLE_N + 1}: {bounded}")
    assert ok


def test_cli_determinism(tmp_path):
    specs = [
        ["generate", "--n", "50", "--p", "0.5", "--seed", "9"],
        ["evolve", "--n", "50", "--p", "0.5", "--seed", "9", "--start-part", "v0", "--t0", "0", "--t1", "3",
         "--steps", "6", "--amplitudes"],
        ["time-average", "--n", "40", "--dist", "uniform:0,1", "--theta", "1", "--seed", "1", "--format", "json"],
        ["sweep", "--kind", "rates", "--n-list", "64,256", "--seeds", "0-5"],
    ]
    identical = True
    for i, spec in enumerate(specs):
        digests = []
        for run in range(2):
            out = tmp_path / f"{i}-{run}"
            proc = subprocess.run([sys.executable, "-m", "threshold_walks", *spec, "--out", str(out)],
                                  capture_output=True, text=True)
            assert proc.returncode == 0, proc.stderr
            digests.append(hashlib.sha256(out.read_bytes()).hexdigest())
        identical &= digests[0] == digests[1]
    record("9 CLI determinism", identical, f"{len(specs)} subcommands, two runs each, byte-identical: {identical}")
    assert identical
