"""Command-line front end.

Modes
-----
matrix    all pairwise distances on one lattice
pair      one distance with its certificate
verify    numeric solver against the closed forms, plus the operator identities
converge  symmetric-difference distances at the lattice centre for growing N
graph     distance matrix of a weighted digraph read from a file

Exit status: 0 success, 1 usage or configuration error, 2 computation
flagged (solver did not converge, or a verification check failed),
3 I/O or parse error. Errors are reported as one JSON line on stderr.
"""

import argparse
import csv
import io
import json
import math
import sys
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .distance import (
    DistanceQuery,
    SolverOptions,
    distance_exact_closed,
    distance_exact_open,
    distance_matrix,
    distance_numeric,
    real_reduce,
)
from .errors import ConnesError, ConvergenceWarning, GraphParseError, InvariantViolationError
from .graph_metric import WeightedDigraph, graph_distance_matrix
from .spectral_triple import (
    DiracKind,
    LatticeSpec,
    Topology,
    build_triple,
    commutator_norm,
    validate_triple,
)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_FLAGGED = 2
EXIT_IO = 3

MODES = ("matrix", "pair", "verify", "converge", "graph")
DEFAULT_SWEEP = (11, 21, 41, 81)
# infinite-lattice values d(0, 1) = 2 and d(0, 2) = 2 sqrt(2)
REFERENCE_NEAR = 2.0
REFERENCE_NEXT = 2.0 * math.sqrt(2.0)


class ConfigError(ConnesError, ValueError):
    pass


@dataclass
class RunConfig:
    mode: str
    lattice: LatticeSpec | None = None
    kind: DiracKind | None = None
    pair: tuple | None = None
    solver: SolverOptions = field(default_factory=SolverOptions)
    output_format: str = "json"
    output_path: str | None = None
    graph_file: str | None = None
    sweep: tuple = DEFAULT_SWEEP

    def __post_init__(self):
        if self.mode not in MODES:
            raise ConfigError(f"unknown mode {self.mode!r}")
        if self.output_format not in ("json", "csv"):
            raise ConfigError(f"unknown format {self.output_format!r}")
        if self.mode == "pair" and self.pair is None:
            raise ConfigError("pair mode requires --pair p,q")
        if self.mode == "graph" and self.graph_file is None:
            raise ConfigError("graph mode requires --graph <path>")
        if self.mode == "converge" and self.kind is not DiracKind.SYMMETRIC_DIFFERENCE:
            raise ConfigError("converge mode requires --kind symmetric-difference")
        if self.mode in ("matrix", "pair", "verify") and self.lattice is None:
            raise ConfigError(f"{self.mode} mode requires --n")
        if self.mode in ("matrix", "pair") and self.kind.topology is not self.lattice.topology:
            raise ConfigError(f"kind {self.kind.value} needs a {self.kind.topology.value} lattice")


# -- graph files ----------------------------------------------------------------


def load_graph(path):
    """Read a graph file.

    Format: first line ``n <vertex-count>``, then one arrow per line as
    ``k l epsilon`` (1-based vertices; ``epsilon`` may be omitted and
    defaults to 1). ``#`` starts a comment.
    """
    with open(path, encoding="utf-8") as fh:
        return parse_graph(fh.read())


def parse_graph(text):
    n = None
    arrows, weights = [], []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if n is None:
            if len(parts) != 2 or parts[0] != "n":
                raise GraphParseError("expected header 'n <vertex-count>'", lineno)
            try:
                n = int(parts[1])
            except ValueError:
                raise GraphParseError(f"bad vertex count {parts[1]!r}", lineno) from None
            if n < 1:
                raise GraphParseError(f"vertex count must be positive, got {n}", lineno)
            continue
        if len(parts) not in (2, 3):
            raise GraphParseError(f"expected 'k l [epsilon]', got {line!r}", lineno)
        try:
            k, l = int(parts[0]), int(parts[1])
            w = float(parts[2]) if len(parts) == 3 else 1.0
        except ValueError:
            raise GraphParseError(f"cannot parse arrow {line!r}", lineno) from None
        try:
            WeightedDigraph(n, [(k, l)], [w])
        except InvariantViolationError as exc:
            raise InvariantViolationError(f"line {lineno}: {exc}") from None
        if (k, l) in arrows:
            raise InvariantViolationError(f"line {lineno}: duplicate arrow ({k}, {l})")
        arrows.append((k, l))
        weights.append(w)
    if n is None:
        raise GraphParseError("missing header 'n <vertex-count>'")
    return WeightedDigraph(n, arrows, weights)


# -- rendering ------------------------------------------------------------------


def _num(x):
    x = float(x)
    if math.isinf(x):
        return "unbounded"
    return x


def _cell(x):
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    return str(x)


def render_json(meta, data):
    return json.dumps({"meta": meta, "data": data}, indent=2, allow_nan=False) + "\n"


def render_csv(rows, header=None):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    if header:
        writer.writerow(header)
    for row in rows:
        writer.writerow([_cell(x) for x in row])
    return buf.getvalue()


def matrix_to_json(m):
    return [[_num(x) for x in row] for row in m]


# -- modes ----------------------------------------------------------------------


def _meta(config, **extra):
    meta = {
        "mode": config.mode,
        "kind": config.kind.value if config.kind else None,
        "n": config.lattice.n_sites if config.lattice else None,
        "topology": config.lattice.topology.value if config.lattice else None,
        "seed": config.solver.seed,
        "tool_version": __version__,
    }
    meta.update(extra)
    return meta


def _run_matrix(config):
    triple = build_triple(config.lattice, config.kind)
    results = {}
    m = distance_matrix(triple, config.solver, results=results)
    flagged = not all(r.converged for r in results.values())
    stats = {
        "pairs": len(results),
        "methods": sorted({r.method.value for r in results.values()}),
        "iterations_used": int(sum(r.iterations_used for r in results.values())),
        "all_converged": not flagged,
    }
    if config.output_format == "csv":
        return render_csv(m), flagged
    return render_json(_meta(config, solver=stats), matrix_to_json(m)), flagged


def _run_pair(config):
    triple = build_triple(config.lattice, config.kind)
    p, q = config.pair
    r = distance_numeric(DistanceQuery(triple, p, q), config.solver)
    exact = None
    if config.kind in (DiracKind.ADJACENCY_PLAIN, DiracKind.ADJACENCY_DOUBLED):
        exact = distance_exact_open(triple.n_sites, p, q)
    elif config.kind is DiracKind.CLOSED_ADJACENCY_DOUBLED:
        exact = distance_exact_closed(triple.n_sites, p, q)
    record = dict(r.as_dict(), p=p, q=q, exact=exact)
    if r.upper_bound is not None:
        record["upper_bound"] = _num(r.upper_bound)
    record["value"] = _num(r.value)
    if config.output_format == "csv":
        header = ["p", "q", "value", "method", "converged", "iterations_used", "exact"]
        row = [p, q, r.value, r.method.value, r.converged, r.iterations_used, "" if exact is None else exact]
        return render_csv([row], header), not r.converged
    return render_json(_meta(config), record), not r.converged


def verification_suites(n_max, opts, seed=0):
    """Exact-vs-numeric and identity checks up to ``n_max`` sites.

    Returns a list of ``(suite, cases, max_deviation, tolerance, passed)``.
    """
    rng = np.random.default_rng(seed)
    rows = []

    def numeric(triple, p, q):
        return distance_numeric(DistanceQuery(triple, p, q), opts).value

    dev, cases = 0.0, 0
    for n in range(2, n_max + 1):
        t = build_triple(LatticeSpec(n), DiracKind.ADJACENCY_DOUBLED)
        for p in range(1, n + 1):
            for q in range(p + 1, n + 1):
                dev = max(dev, abs(numeric(t, p, q) - distance_exact_open(n, p, q)))
                cases += 1
    rows.append(("open_lattice_exact", cases, dev, 1e-6, dev <= 1e-6))

    dev, cases = 0.0, 0
    for n in range(3, n_max + 1):
        t = build_triple(LatticeSpec(n, Topology.CLOSED), DiracKind.CLOSED_ADJACENCY_DOUBLED)
        for p in range(1, n + 1):
            for q in range(p + 1, n + 1):
                dev = max(dev, abs(numeric(t, p, q) - distance_exact_closed(n, p, q)))
                cases += 1
    rows.append(("closed_lattice_exact", cases, dev, 1e-6, dev <= 1e-6))

    dev, cases = 0.0, 0
    for n in range(2, n_max + 1):
        plain = build_triple(LatticeSpec(n), DiracKind.ADJACENCY_PLAIN)
        doubled = build_triple(LatticeSpec(n), DiracKind.ADJACENCY_DOUBLED)
        for p in range(1, n + 1):
            for q in range(p + 1, n + 1):
                dev = max(dev, abs(numeric(plain, p, q) - numeric(doubled, p, q)))
                cases += 1
    rows.append(("undoubled_equivalence", cases, dev, 1e-6, dev <= 1e-6))

    dev, cases = 0.0, 0
    for n in range(2, n_max + 1):
        for kind, topo in (
            (DiracKind.ADJACENCY_DOUBLED, Topology.OPEN),
            (DiracKind.ADJACENCY_PLAIN, Topology.OPEN),
            (DiracKind.CLOSED_ADJACENCY_DOUBLED, Topology.CLOSED),
        ):
            if topo is Topology.CLOSED and n < 3:
                continue
            t = build_triple(LatticeSpec(n, topo), kind)
            for _ in range(20):
                f = rng.normal(size=n)
                fast = commutator_norm(t, f, "fast")
                dev = max(dev, abs(fast - commutator_norm(t, f, "generic")))
                cases += 1
    rows.append(("commutator_norm_fast_path", cases, dev, 1e-12, dev <= 1e-12))

    dev, cases, ok = 0.0, 0, True
    for n in range(2, n_max + 1):
        for kind in DiracKind:
            if kind.topology is Topology.CLOSED and n < 3:
                continue
            t = build_triple(LatticeSpec(n, kind.topology), kind)
            report = validate_triple(t, [rng.normal(size=n) for _ in range(3)], 1e-12)
            dev = max(dev, report.max_deviation())
            ok = ok and report.passed
            cases += 1
    rows.append(("triple_identities", cases, dev, 1e-12, ok))

    dev, cases = 0.0, 0
    for n in range(2, n_max + 1):
        t = build_triple(LatticeSpec(n), DiracKind.ADJACENCY_DOUBLED)
        for _ in range(10):
            f = rng.normal(size=n) + 1j * rng.normal(size=n)
            gap = abs(commutator_norm(t, f, "generic") - commutator_norm(t, real_reduce(f, Topology.OPEN), "generic"))
            dev = max(dev, gap)
            cases += 1
    rows.append(("real_reduction_open", cases, dev, 1e-12, dev <= 1e-12))
    return rows


def _run_verify(config):
    n_max = config.lattice.n_sites
    rows = verification_suites(n_max, config.solver, config.solver.seed)
    flagged = not all(r[4] for r in rows)
    if config.output_format == "csv":
        return render_csv(rows, ["suite", "cases", "max_deviation", "tolerance", "passed"]), flagged
    data = [
        {"suite": s, "cases": c, "max_deviation": d, "tolerance": tol, "passed": bool(ok)}
        for s, c, d, tol, ok in rows
    ]
    meta = _meta(config, n=None, n_max=n_max, all_passed=not flagged)
    return render_json(meta, data), flagged


def shrinking(values, floor):
    """True if successive changes never grow by more than ``floor``."""
    changes = [abs(b - a) for a, b in zip(values, values[1:])]
    return all(later <= earlier + floor for earlier, later in zip(changes, changes[1:]))


def convergence_study(sweep, opts):
    """Centre-pair distances for each N in ``sweep``.

    Returns a dict with per-N rows and the shrinkage and 2 % band verdicts.
    """
    rows = []
    converged = True
    for n in sweep:
        t = build_triple(LatticeSpec(n), DiracKind.SYMMETRIC_DIFFERENCE)
        c = (n + 1) // 2
        near = distance_numeric(DistanceQuery(t, c, c + 1), opts)
        nxt = distance_numeric(DistanceQuery(t, c, c + 2), opts)
        converged = converged and near.converged and nxt.converged
        rows.append(
            {
                "n": n,
                "centre": c,
                "d_next": near.value,
                "d_second": nxt.value,
                "reference_next": REFERENCE_NEAR,
                "reference_second": REFERENCE_NEXT,
                "rel_dev_next": abs(near.value - REFERENCE_NEAR) / REFERENCE_NEAR,
                "rel_dev_second": abs(nxt.value - REFERENCE_NEXT) / REFERENCE_NEXT,
            }
        )
    # changes at the solver's own resolution count as zero
    floor = 10 * opts.tolerance * REFERENCE_NEXT
    shrink = shrinking([r["d_next"] for r in rows], floor) and shrinking([r["d_second"] for r in rows], floor)
    band = all(r["rel_dev_next"] <= 0.02 and r["rel_dev_second"] <= 0.02 for r in rows[-1:])
    return {"rows": rows, "shrinking": shrink, "within_2_percent": band, "converged": converged}


def _run_converge(config):
    study = convergence_study(config.sweep, config.solver)
    flagged = not (study["shrinking"] and study["converged"])
    if config.output_format == "csv":
        keys = list(study["rows"][0])
        return render_csv([[r[k] for k in keys] for r in study["rows"]], keys), flagged
    meta = _meta(
        config,
        n=None,
        sweep=list(config.sweep),
        shrinking=study["shrinking"],
        within_2_percent=study["within_2_percent"],
        all_converged=study["converged"],
    )
    return render_json(meta, study["rows"]), flagged


def _run_graph(config):
    g = load_graph(config.graph_file)
    m = graph_distance_matrix(g)
    if config.output_format == "csv":
        return render_csv(m), False
    meta = _meta(config, n=g.n_vertices, arrows=len(g.arrows), graph_file=str(config.graph_file))
    return render_json(meta, matrix_to_json(m)), False


_RUNNERS = {
    "matrix": _run_matrix,
    "pair": _run_pair,
    "verify": _run_verify,
    "converge": _run_converge,
    "graph": _run_graph,
}


def run(config, stdout=None):
    """Execute ``config``; write the artifact to ``output_path`` or ``stdout``.

    Returns the exit status. Exceptions propagate; :func:`main` maps them to
    status codes.
    """
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ConvergenceWarning)
        text, flagged = _RUNNERS[config.mode](config)
    if config.output_path:
        with open(config.output_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        (stdout or sys.stdout).write(text)
    return EXIT_FLAGGED if flagged else EXIT_OK


# -- argument parsing -----------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def build_parser():
    p = _Parser(prog="connes-distance", description="Connes distances on one-dimensional lattices.")
    p.add_argument("--mode", choices=MODES, required=True)
    p.add_argument("--topology", choices=[t.value for t in Topology])
    p.add_argument("--n", type=int)
    p.add_argument("--kind", choices=[k.value for k in DiracKind])
    p.add_argument("--pair", help="two 1-based sites, e.g. 1,5")
    p.add_argument("--sweep", help="comma-separated lattice sizes for converge mode")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--out")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=SolverOptions.tolerance)
    p.add_argument("--max-iter", type=int, default=SolverOptions.max_iterations)
    p.add_argument("--restarts", type=int, default=SolverOptions.restarts)
    p.add_argument("--graph")
    p.add_argument("--version", action="version", version=__version__)
    return p


def _int_list(text, what):
    try:
        return tuple(int(x) for x in text.split(","))
    except ValueError:
        raise ConfigError(f"cannot parse {what} {text!r}") from None


def config_from_args(argv=None):
    args = build_parser().parse_args(argv)
    kind = DiracKind(args.kind) if args.kind else None
    topology = Topology(args.topology) if args.topology else None
    if args.mode == "converge" and kind is None:
        kind = DiracKind.SYMMETRIC_DIFFERENCE
    if args.mode in ("matrix", "pair") and kind is None:
        kind = DiracKind.CLOSED_ADJACENCY_DOUBLED if topology is Topology.CLOSED else DiracKind.ADJACENCY_DOUBLED
    if topology is None:
        topology = kind.topology if kind else Topology.OPEN
    lattice = None
    if args.n is not None and args.mode != "converge":
        lattice = LatticeSpec(args.n, Topology.OPEN if args.mode == "verify" else topology)
    pair = None
    if args.pair is not None:
        pair = _int_list(args.pair, "pair")
        if len(pair) != 2:
            raise ConfigError(f"--pair needs exactly two sites, got {args.pair!r}")
    sweep = _int_list(args.sweep, "sweep") if args.sweep else DEFAULT_SWEEP
    try:
        solver = SolverOptions(
            max_iterations=args.max_iter, tolerance=args.tol, restarts=args.restarts, seed=args.seed
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    return RunConfig(
        mode=args.mode,
        lattice=lattice,
        kind=kind,
        pair=pair,
        solver=solver,
        output_format=args.format,
        output_path=args.out,
        graph_file=args.graph,
        sweep=sweep,
    )


def _fail(status, kind, exc):
    record = {"status": status, "error": kind, "type": type(exc).__name__, "message": str(exc)}
    sys.stderr.write(json.dumps(record) + "\n")
    return status


def main(argv=None):
    try:
        config = config_from_args(argv)
    except SystemExit as exc:  # --help / --version
        return exc.code or 0
    except (ConfigError, ConnesError, ValueError) as exc:
        return _fail(EXIT_CONFIG, "config", exc)
    try:
        return run(config)
    except (GraphParseError, InvariantViolationError, OSError) as exc:
        return _fail(EXIT_IO, "io", exc)
    except ConnesError as exc:
        return _fail(EXIT_CONFIG, "config", exc)


if __name__ == "__main__":
    sys.exit(main())
