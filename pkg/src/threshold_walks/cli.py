"""Command-line front end.

Examples::

    threshold-walks generate --dist explicit:1,2,-3,-4,5,-6,7,-8 --theta 0
    threshold-walks evolve --n 16 --p 0.5 --seed 7 --start-part v1 --t 1
    threshold-walks verify --n 16 --p 0.5 --seed 7 --t 1
    threshold-walks sweep --kind rates --p 0.5 --n-list 256,1024,4096 --seeds 0-19

Exit status: 0 success, 2 bad arguments, 3 precondition violation (for
example a disconnected graph), 4 verification above tolerance.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import statistics
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import classical_walk, oracle, quantum_walk
from .errors import ConfigurationError, CoverageError, OracleSizeError, PreconditionError
from .graph_model import (
    HiddenVariableConfig,
    ThresholdGraph,
    generate,
    graph_to_json,
    is_connected,
    read_graph,
    write_edge_list,
)
from .spectral import DENSE_LIMIT, decompose

EXIT_USAGE = 2
EXIT_PRECONDITION = 3
EXIT_VERIFY = 4

THREADS_ENV = "THRESHOLD_WALKS_THREADS"


class UsageError(Exception):
    pass


def _fmt(x) -> str:
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    return str(x)


def _write_csv(header: list[str], rows: list[list], out: str | None) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    _emit(buf.getvalue(), out)


def _write_json(obj, out: str | None) -> None:
    _emit(json.dumps(obj, indent=1, sort_keys=True) + "\n", out)


def _emit(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def _parse_int_list(text: str) -> list[int]:
    """``"0-3,7"`` -> ``[0, 1, 2, 3, 7]``."""
    out: list[int] = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        lo, sep, hi = part.partition("-")
        try:
            out += list(range(int(lo), int(hi) + 1)) if sep else [int(lo)]
        except ValueError as exc:
            raise UsageError(f"bad integer list {text!r}") from exc
    return out


# ---- argument plumbing --------------------------------------------------------


def _add_graph_args(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("graph source")
    g.add_argument("--graph", help="graph JSON written by `generate`")
    g.add_argument("--n", type=int, help="vertex count")
    g.add_argument("--dist", help="bernoulli:P | uniform:A,B | explicit:X1,X2,...")
    g.add_argument("--p", type=float, help="shorthand for --dist bernoulli:P")
    g.add_argument("--theta", type=float, help="threshold (default 0.5)")
    g.add_argument("--seed", type=int, default=0)


def _add_start_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--walk", choices=("quantum", "classical"), default="quantum")
    s = p.add_mutually_exclusive_group()
    s.add_argument("--start", type=int, help="canonical start vertex")
    s.add_argument("--start-part", choices=("v1", "v0"),
                   help="v1: first vertex of the top clique block; v0: first vertex of the level-1 null block")


def _graph_from_args(args) -> ThresholdGraph:
    if args.graph:
        if args.dist or args.p is not None:
            raise UsageError("use either --graph or a generator config, not both")
        return read_graph(args.graph)
    if args.dist and args.p is not None:
        raise UsageError("use either --dist or --p")
    spec = args.dist or (f"bernoulli:{args.p!r}" if args.p is not None else None)
    if spec is None:
        raise UsageError("need --graph, --dist or --p")
    theta = 0.5 if args.theta is None else args.theta
    return generate(HiddenVariableConfig.parse(args.n, spec, theta, args.seed))


def _start_from_args(graph: ThresholdGraph, args) -> int:
    if args.start_part == "v1":
        return graph.top_vertex()
    if args.start_part == "v0":
        return graph.bottom_null_vertex()
    start = 0 if args.start is None else args.start
    if not 0 <= start < graph.n:
        raise UsageError(f"--start {start} out of range for n={graph.n}")
    return start


def _time_grid(args) -> list[float]:
    if args.t is not None:
        if args.t0 is not None or args.t1 is not None:
            raise UsageError("use either --t or --t0/--t1/--steps")
        return [args.t]
    if args.t0 is None or args.t1 is None:
        raise UsageError("need --t or --t0 and --t1")
    if args.steps < 1 or args.t1 < args.t0:
        raise UsageError("time grid needs steps >= 1 and t1 >= t0")
    return [float(t) for t in np.linspace(args.t0, args.t1, args.steps + 1)]


# ---- subcommands ----------------------------------------------------------------


def cmd_generate(args) -> int:
    graph = _graph_from_args(args)
    if args.edges:
        write_edge_list(graph, args.edges)
    _write_json(graph_to_json(graph), args.out)
    return 0


def cmd_spectrum(args) -> int:
    graph = _graph_from_args(args)
    dec = decompose(graph)
    _write_json([{"eigenvalue": lam, "multiplicity": mult} for lam, mult in dec.multiplicities().items()], args.out)
    if args.vectors:
        if graph.n > DENSE_LIMIT:
            raise UsageError(f"--vectors needs n <= {DENSE_LIMIT}")
        rows = [[lam] + list(col) for lam, vecs in dec.eigenpairs for col in vecs.T]
        _write_csv(["eigenvalue"] + [f"x{j}" for j in range(graph.n)], rows, args.vectors)
    return 0


def _vertex_cols(graph: ThresholdGraph, v: int) -> list:
    level, part = graph.level_of(v)
    return [v, level, part]


def cmd_evolve(args) -> int:
    graph = _graph_from_args(args)
    start = _start_from_args(graph, args)
    times = _time_grid(args)
    if args.walk == "classical" and args.amplitudes:
        raise UsageError("--amplitudes applies to the quantum walk only")
    header = ["t", "vertex", "level", "part", "mass"] + (["amp_re", "amp_im"] if args.amplitudes else [])
    rows = []
    dec = decompose(graph, check=False) if args.method == "spectral" else None
    for t in times:
        if args.walk == "quantum":
            amp = quantum_walk.evolve(graph, start, t, args.method, dec)
            masses = amp.probabilities().masses
        else:
            masses = classical_walk.classical_evolve(graph, start, t, args.method, dec).masses
        for v in range(graph.n):
            row = [float(t)] + _vertex_cols(graph, v) + [float(masses[v])]
            if args.amplitudes:
                row += [float(amp.entries[v].real), float(amp.entries[v].imag)]
            rows.append(row)
    _output_table(header, rows, args)
    return 0


def cmd_time_average(args) -> int:
    graph = _graph_from_args(args)
    start = _start_from_args(graph, args)
    if args.walk == "quantum":
        masses = quantum_walk.time_averaged(graph, start).masses
    else:
        masses = classical_walk.classical_time_average(graph, start).masses
    rows = [_vertex_cols(graph, v) + [float(masses[v])] for v in range(graph.n)]
    _output_table(["vertex", "level", "part", "mass"], rows, args)
    return 0


def _output_table(header, rows, args) -> None:
    if args.format == "json":
        _write_json([dict(zip(header, r)) for r in rows], args.out)
    else:
        _write_csv(header, rows, args.out)


def cmd_verify(args) -> int:
    graph = _graph_from_args(args)
    if not is_connected(graph):
        raise PreconditionError("verification needs a connected graph")
    lap = oracle.dense_laplacian(graph)
    report = {"n": graph.n, "m": graph.m, "tolerance": args.tol, "checks": []}
    ok = True
    for t in args.t:
        ref = oracle.expm(lap, 1j * t)
        devs = {
            "closed_form": np.abs(quantum_walk.propagator_matrix(graph, t, "closed-form") - ref).max(),
            "spectral": np.abs(quantum_walk.propagator_matrix(graph, t, "spectral") - ref).max(),
            "oracle_eigen": np.abs(oracle.expm_via_eigen(lap, 1j * t) - ref).max(),
            "classical": np.abs(
                np.column_stack([classical_walk.classical_evolve(graph, s, t).masses for s in range(graph.n)])
                - oracle.expm(lap, -t)
            ).max(),
        }
        if graph.is_binary():
            devs["binary"] = np.abs(quantum_walk.propagator_matrix(graph, t, "binary") - ref).max()
        for name, dev in sorted(devs.items()):
            passed = bool(dev <= args.tol)
            ok &= passed
            report["checks"].append({"t": t, "check": name, "max_deviation": float(dev), "pass": passed})
    report["pass"] = ok
    _write_json(report, args.out)
    return 0 if ok else EXIT_VERIFY


def _sweep_one(kind: str, n: int, seed: int, args) -> list[dict]:
    if kind == "rates":
        return quantum_walk.localization_rates(args.p, [n], [seed], args.theta)
    if kind == "spread":
        return classical_walk.classical_spread_check(args.p, args.t, [n], [seed], args.theta)
    graph = generate(HiddenVariableConfig.bernoulli(n, args.p, args.theta, seed))
    if not is_connected(graph):
        return []
    v = graph.top_vertex()
    q = quantum_walk.probability(graph, v, args.t).masses[v]
    c = classical_walk.classical_evolve(graph, v, args.t, method="closed-form").masses[v]
    return [
        {"n": n, "seed": seed, "quantity": "quantum_return", "value": float(q)},
        {"n": n, "seed": seed, "quantity": "classical_return", "value": float(c)},
    ]


def sweep_report(rows: list[dict]) -> tuple[list[dict], list[dict]]:
    """Sort rows deterministically and add per-(n, quantity) medians over seeds."""
    if not rows:
        raise UsageError("sweep produced no rows")
    rows = sorted(rows, key=lambda r: (r["n"], r["quantity"], r["seed"]))
    groups: dict[tuple[int, str], list[float]] = {}
    for r in rows:
        groups.setdefault((r["n"], r["quantity"]), []).append(r["value"])
    medians = [
        {"n": n, "seed": "median", "quantity": q, "value": float(statistics.median(vals))}
        for (n, q), vals in sorted(groups.items())
    ]
    return rows, medians


def cmd_sweep(args) -> int:
    n_list, seeds = _parse_int_list(args.n_list), _parse_int_list(args.seeds)
    if not n_list or not seeds:
        raise UsageError("sweep needs at least one n and one seed")
    if args.kind in ("spread", "contrast") and args.t is None:
        raise UsageError(f"--kind {args.kind} needs --t")
    jobs = [(n, s) for n in n_list for s in seeds]
    threads = int(os.environ.get(THREADS_ENV, "1") or 1)
    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        chunks = list(pool.map(lambda job: _sweep_one(args.kind, job[0], job[1], args), jobs))
    rows, medians = sweep_report([r for chunk in chunks for r in chunk])
    if args.format == "json":
        _write_json({"rows": rows, "medians": medians}, args.out)
    else:
        table = [[r["n"], r["seed"], r["quantity"], float(r["value"])] for r in rows + medians]
        _write_csv(["n", "seed", "quantity", "value"], table, args.out)
    return 0


# ---- entry point -----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="threshold-walks", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="sample a threshold graph and write it as JSON")
    _add_graph_args(p)
    p.add_argument("--out")
    p.add_argument("--edges", help="also write a whitespace-separated edge list")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("spectrum", help="Laplacian eigenvalues and multiplicities")
    _add_graph_args(p)
    p.add_argument("--out")
    p.add_argument("--vectors", help="CSV path for the full eigenvectors, one row per vector")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("evolve", help="walk distribution at one time or over a grid")
    _add_graph_args(p)
    _add_start_args(p)
    p.add_argument("--t", type=float)
    p.add_argument("--t0", type=float)
    p.add_argument("--t1", type=float)
    p.add_argument("--steps", type=int, default=1)
    p.add_argument("--method", choices=("closed-form", "spectral"), default="closed-form")
    p.add_argument("--amplitudes", action="store_true")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out")
    p.set_defaults(func=cmd_evolve)

    p = sub.add_parser("time-average", help="exact long-time average distribution")
    _add_graph_args(p)
    _add_start_args(p)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out")
    p.set_defaults(func=cmd_time_average)

    p = sub.add_parser("verify", help="compare closed forms against the dense oracle")
    _add_graph_args(p)
    p.add_argument("--t", type=float, nargs="+", default=[1.0])
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--out")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("sweep", help="asymptotic sweeps over n and seeds on binary samples")
    p.add_argument("--kind", choices=("rates", "spread", "contrast"), required=True)
    p.add_argument("--p", type=float, default=0.5)
    p.add_argument("--theta", type=float, default=0.5)
    p.add_argument("--n-list", required=True, help="e.g. 64,256,1024")
    p.add_argument("--seeds", required=True, help="e.g. 0-19 or 1,2,5")
    p.add_argument("--t", type=float)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out")
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, ConfigurationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (PreconditionError, CoverageError, OracleSizeError) as exc:
        print(f"precondition violated: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except ValueError as exc:
        print(f"precondition violated: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION


if __name__ == "__main__":
    raise SystemExit(main())
