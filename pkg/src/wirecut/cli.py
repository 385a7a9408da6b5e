"""Command line front end.

Subcommands cover the whole workflow: generate a benchmark circuit, cut
it, run the subcircuit variants, reconstruct the distribution, and verify
it against the oracle. `dd` drives a recursive binned query, `bench`
produces the postprocessing scaling table, and `pipeline` runs every
stage from one config file.

Exit codes: 0 ok, 1 usage error, 2 infeasible request, 3 verification
failure, 4 resource guard.
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

import numpy as np
import yaml

from . import artifacts, bench
from .circuit import Circuit, serialize_circuit
from .cutsearch import DEFAULT_NODE_BUDGET, CutConstraints, find_cuts
from .dd import DdConfig, dd_run
from .errors import (
    CircuitParseError,
    DdUnnecessary,
    EmptyDag,
    Infeasible,
    InconsistentSolution,
    LengthMismatch,
    MissingTensor,
    MissingVariant,
    NegativeMass,
    NormalizationFailure,
    NotConnected,
    PipelineError,
    ResourceGuard,
    TooLarge,
    WholeCircuitFits,
    WirecutError,
)
from .metrics import oracle_compare
from .pipeline import config_from_mapping, dd_section, load_config, run_pipeline, scaling_report
from .reconstruct import build_plan, build_tensors, reconstruct_fd
from .sim import DEFAULT_QUBIT_LIMIT, make_backend
from .variants import enumerate_variants, split

_INFEASIBLE = (Infeasible, NotConnected, EmptyDag, WholeCircuitFits, TooLarge, DdUnnecessary)
_VERIFICATION = (
    NegativeMass,
    NormalizationFailure,
    InconsistentSolution,
    MissingVariant,
    MissingTensor,
    LengthMismatch,
)


def exit_code_for(exc: BaseException) -> int:
    """Map an exception to the documented exit code."""
    if isinstance(exc, PipelineError):
        exc = exc.cause
    if isinstance(exc, ResourceGuard):
        return 4
    if isinstance(exc, _INFEASIBLE):
        return 2
    if isinstance(exc, _VERIFICATION):
        return 3
    if isinstance(exc, (CircuitParseError, ValueError, OSError, yaml.YAMLError)):
        return 1
    if isinstance(exc, WirecutError):
        return 3
    return 1


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on bad flags; the contract says 1
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _write_or_print(text: str, output: str | None) -> None:
    if output:
        Path(output).write_text(text)
    else:
        sys.stdout.write(text)


def _build_family(args) -> Circuit:
    fam = args.family
    if fam == "bv":
        if args.qubits is None:
            raise ValueError("bv needs --qubits")
        hidden = args.hidden if args.hidden is not None else "1" * (args.qubits - 1)
        return bench.gen_bv(args.qubits, hidden)
    if fam == "adder":
        if args.qubits is None:
            raise ValueError("adder needs --qubits")
        return bench.gen_adder(args.qubits, a=args.a, b=args.b)
    if fam == "aqft":
        if args.qubits is None:
            raise ValueError("aqft needs --qubits")
        return bench.gen_aqft(args.qubits, degree=args.degree)
    if fam == "supremacy":
        if args.rows is None or args.cols is None:
            raise ValueError("supremacy needs --rows and --cols")
        return bench.gen_supremacy(args.rows, args.cols, depth=args.depth, seed=args.seed)
    raise ValueError(f"unknown family {fam!r}")


def _cmd_generate(args) -> int:
    circuit = _build_family(args)
    _write_or_print(serialize_circuit(circuit), args.output)
    return 0


def _cmd_cut(args) -> int:
    circuit = artifacts.read_circuit(args.circuit)
    constraints = CutConstraints(args.max_qubits, args.max_subcircuits)
    solution = find_cuts(circuit, constraints, node_budget=args.node_budget)
    split_result = split(circuit, solution)
    doc = artifacts.solution_to_dict(solution)
    if args.output:
        out = Path(args.output)
        out.mkdir(parents=True, exist_ok=True)
        artifacts.write_json(out / "cut.json", doc)
        artifacts.write_json(out / "manifest.json", artifacts.split_manifest(split_result))
        subdir = out / "subcircuits"
        subdir.mkdir(exist_ok=True)
        for sub in split_result.subcircuits:
            artifacts.write_circuit(subdir / f"sub{sub.index}.txt", sub.circuit)
            if args.write_variants:
                for var in enumerate_variants(sub):
                    artifacts.write_circuit(
                        subdir / f"s{sub.index}v{var.index}.txt", var.circuit
                    )
    else:
        sys.stdout.write(artifacts.canonical_dumps(doc))
    widths = "x".join(str(w) for w in solution.subcircuit_qubits)
    print(
        f"cuts={solution.num_cuts} subcircuits={widths} "
        f"multiplies={solution.objective} certified={solution.certified}",
        file=sys.stderr,
    )
    return 0


def _cmd_run(args) -> int:
    run_dir = Path(args.rundir)
    split_result = artifacts.split_from_manifest(artifacts.read_json(run_dir / "manifest.json"))
    shots = args.shots
    if args.mode == "shots" and shots is None:
        shots = 10_000
    backend = make_backend(args.mode, shots=shots, seed=args.seed, limit=args.limit)
    raw: dict[int, dict[int, np.ndarray]] = {}
    calls = 0
    for sub in split_result.subcircuits:
        roles = "A" * sub.num_wires
        vecs = {}
        for var in enumerate_variants(sub):
            vecs[var.index] = backend.run(var.circuit, roles, key=(0, sub.index, var.index))
            calls += 1
        raw[sub.index] = vecs
    meta = {"backend": args.mode, "shots": shots, "seed": args.seed}
    artifacts.write_raw_outputs(run_dir / "raw.json", raw, meta)
    print(f"ran {calls} variants across {len(raw)} subcircuits", file=sys.stderr)
    return 0


def _clip_policy(mode: str, shots: int | None, override: float | None) -> float:
    # mirrors the pipeline: exact 1e-8, shots 5/sqrt(shots), random clips all
    if override is not None:
        return override
    if mode == "shots":
        return 5.0 / (int(shots or 1) ** 0.5)
    if mode == "random":
        return float("inf")
    return 1e-8


def _cmd_reconstruct(args) -> int:
    run_dir = Path(args.rundir)
    split_result = artifacts.split_from_manifest(artifacts.read_json(run_dir / "manifest.json"))
    raw, meta = artifacts.read_raw_outputs(run_dir / "raw.json")
    plan = build_plan(split_result)
    mode = meta.get("backend", "exact")
    clip_tol = _clip_policy(mode, meta.get("shots"), args.clip_tol)
    renormalize = args.renormalize or mode != "exact"
    start = time.perf_counter()
    result = reconstruct_fd(
        plan,
        build_tensors(split_result, raw, plan),
        clip_tol=clip_tol,
        renormalize=renormalize,
        threads=args.threads,
    )
    runtime = time.perf_counter() - start
    artifacts.write_distribution(run_dir / "dist.bin", result.values)
    artifacts.write_json(
        run_dir / "recon.json",
        {
            "num_qubits": plan.num_qubits,
            "num_cuts": plan.num_cuts,
            "sum": float(result.values.sum()),
            "multiplies": result.multiplies,
            "terms": result.terms,
            "runtime_seconds": runtime,
        },
    )
    print(
        f"wrote dist.bin ({result.values.size} states) multiplies={result.multiplies}",
        file=sys.stderr,
    )
    return 0


def _cmd_dd(args) -> int:
    circuit = artifacts.read_circuit(args.circuit)
    constraints = CutConstraints(args.max_qubits, args.max_subcircuits)
    solution = find_cuts(circuit, constraints, node_budget=args.node_budget)
    config = DdConfig(
        max_active=args.active,
        max_recursions=args.recursions,
        strategy=args.strategy,
        frontier=args.frontier,
    )
    shots = args.shots
    if args.mode == "shots" and shots is None:
        shots = 10_000
    backend = make_backend(args.mode, shots=shots, seed=args.seed, limit=args.limit)
    result = dd_run(circuit, solution, config, backend, threads=args.threads)
    _write_or_print(artifacts.canonical_dumps(dd_section(result, top=args.top)), args.output)
    return 0


def _cmd_verify(args) -> int:
    circuit = artifacts.read_circuit(args.circuit)
    produced = artifacts.read_distribution(args.distribution)
    report = oracle_compare(circuit, produced, limit=args.limit)
    print(
        f"chi_square={report.chi_square:.6e} l_inf={report.l_inf:.6e} "
        f"total_variation={report.total_variation:.6e}"
    )
    if report.chi_square > args.tol:
        print(f"verification failed: chi_square above {args.tol}", file=sys.stderr)
        return 3
    return 0


def _cmd_bench(args) -> int:
    table = scaling_report([load_config(path) for path in args.configs])
    print(f"{'source':<28} {'n':>4} {'K':>3} {'predicted':>14} {'measured':>14} {'seconds':>9}")
    for row in table["rows"]:
        print(
            f"{row['source']:<28} {row['num_qubits']:>4} {row['num_cuts']:>3} "
            f"{row['objective']:>14} {row['multiplies']:>14} "
            f"{row['postprocess_seconds']:>9.3f}"
        )
    if not table["all_match"]:
        print("measured multiply counts deviate from the cost model", file=sys.stderr)
        return 3
    return 0


def _merge_overrides(data: dict, args) -> dict:
    """Flag overrides win over the config file."""
    data = dict(data or {})
    if args.circuit is not None:
        data["circuit"] = args.circuit
        data.pop("benchmark", None)
    if args.output_dir is not None:
        data["output_dir"] = args.output_dir
    if args.mode is not None:
        data["mode"] = args.mode
    backend = data.get("backend")
    if isinstance(backend, str):
        backend = {"mode": backend}
    backend = dict(backend or {})
    if args.backend is not None:
        backend["mode"] = args.backend
    if args.shots is not None:
        backend["shots"] = args.shots
    if args.seed is not None:
        backend["seed"] = args.seed
    if backend:
        data["backend"] = backend
    constraints = dict(data.get("constraints") or {})
    if args.max_qubits is not None:
        constraints["max_subcircuit_qubits"] = args.max_qubits
    if args.max_subcircuits is not None:
        constraints["max_subcircuits"] = args.max_subcircuits
    if constraints:
        data["constraints"] = constraints
    dd_cfg = dict(data.get("dd") or {})
    if args.active is not None:
        dd_cfg["max_active"] = args.active
    if args.recursions is not None:
        dd_cfg["max_recursions"] = args.recursions
    if args.strategy is not None:
        dd_cfg["strategy"] = args.strategy
    if args.frontier is not None:
        dd_cfg["frontier"] = args.frontier
    if dd_cfg:
        data["dd"] = dd_cfg
    if args.threads is not None:
        data["threads"] = args.threads
    if args.node_budget is not None:
        data["node_budget"] = args.node_budget
    return data


def _cmd_pipeline(args) -> int:
    data: dict = {}
    if args.config:
        with open(args.config) as fh:
            data = yaml.safe_load(fh) or {}
    config = config_from_mapping(_merge_overrides(data, args))
    out = run_pipeline(config)
    report, timings = out["report"], out["timings"]
    cut = report["cut"]
    widths = "x".join(str(w) for w in cut["subcircuit_qubits"])
    print(
        f"cuts={cut['num_cuts']} subcircuits={widths} "
        f"multiplies={cut['objective']} certified={cut['certified']}"
    )
    if report["mode"] == "fd":
        fd = report["fd"]
        print(
            f"fd: terms={fd['terms']} multiplies={fd['multiplies']} "
            f"output_sum={fd['output_sum']:.9f}"
        )
    else:
        dd = report["dd"]
        print(f"dd: recursions={dd['num_recursions']} multiplies={dd['multiplies']}")
    if report.get("verify"):
        pairs = " ".join(f"{k}={v:.3e}" for k, v in report["verify"].items())
        print(f"verify: {pairs}")
    stages = " ".join(f"{name}={secs:.3f}s" for name, secs in timings["stages"].items())
    print(f"stages: {stages}")
    print(
        f"total={timings['total_seconds']:.3f}s "
        f"backend={timings['backend_seconds']:.3f}s "
        f"postprocess={timings['postprocess_seconds']:.3f}s"
    )
    return 0


def _add_backend_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--mode", choices=("exact", "shots", "random"), default="exact")
    p.add_argument("--shots", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--limit", type=int, default=DEFAULT_QUBIT_LIMIT,
                   help="statevector qubit limit")


def build_parser() -> _Parser:
    parser = _Parser(prog="wirecut", description="cut, run, and reconstruct quantum circuits")
    sub = parser.add_subparsers(dest="command", metavar="command", required=True)

    p = sub.add_parser("generate", help="emit a benchmark circuit in text form")
    p.add_argument("family", choices=("bv", "adder", "aqft", "supremacy"))
    p.add_argument("--qubits", type=int, default=None)
    p.add_argument("--hidden", default=None, help="bv hidden bitstring")
    p.add_argument("--a", type=int, default=0, help="adder register a")
    p.add_argument("--b", type=int, default=0, help="adder register b")
    p.add_argument("--degree", type=int, default=None, help="aqft approximation degree")
    p.add_argument("--rows", type=int, default=None)
    p.add_argument("--cols", type=int, default=None)
    p.add_argument("--depth", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=_cmd_generate)

    p = sub.add_parser("cut", help="find the cheapest cut and split the circuit")
    p.add_argument("circuit")
    p.add_argument("--max-qubits", type=int, default=20)
    p.add_argument("--max-subcircuits", type=int, default=5)
    p.add_argument("--node-budget", type=int, default=DEFAULT_NODE_BUDGET)
    p.add_argument("--write-variants", action="store_true",
                   help="also write every variant circuit as text")
    p.add_argument("-o", "--output", default=None, help="run directory")
    p.set_defaults(func=_cmd_cut)

    p = sub.add_parser("run", help="simulate every subcircuit variant in a run directory")
    p.add_argument("rundir")
    _add_backend_flags(p)
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("reconstruct", help="combine raw outputs into the full distribution")
    p.add_argument("rundir")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--clip-tol", type=float, default=None)
    p.add_argument("--renormalize", action="store_true")
    p.set_defaults(func=_cmd_reconstruct)

    p = sub.add_parser("dd", help="recursive binned query on a large circuit")
    p.add_argument("circuit")
    p.add_argument("--max-qubits", type=int, default=20)
    p.add_argument("--max-subcircuits", type=int, default=5)
    p.add_argument("--node-budget", type=int, default=DEFAULT_NODE_BUDGET)
    p.add_argument("--active", type=int, required=True, help="bin qubits per recursion")
    p.add_argument("--recursions", type=int, required=True)
    p.add_argument("--strategy", choices=("dfs", "bfs"), default="dfs")
    p.add_argument("--frontier", type=int, default=None)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--top", type=int, default=8, help="bins listed per recursion")
    p.add_argument("-o", "--output", default=None)
    _add_backend_flags(p)
    p.set_defaults(func=_cmd_dd)

    p = sub.add_parser("verify", help="compare a distribution file against the oracle")
    p.add_argument("circuit")
    p.add_argument("distribution")
    p.add_argument("--tol", type=float, default=1e-6, help="chi-square threshold")
    p.add_argument("--limit", type=int, default=DEFAULT_QUBIT_LIMIT)
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("bench", help="postprocessing scaling table from config files")
    p.add_argument("configs", nargs="+")
    p.set_defaults(func=_cmd_bench)

    p = sub.add_parser("pipeline", help="run every stage from a config file")
    p.add_argument("config", nargs="?", default=None)
    p.add_argument("--circuit", default=None)
    p.add_argument("--output-dir", default=None)
    p.add_argument("--mode", choices=("fd", "dd"), default=None)
    p.add_argument("--backend", choices=("exact", "shots", "random"), default=None)
    p.add_argument("--shots", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("--max-qubits", type=int, default=None)
    p.add_argument("--max-subcircuits", type=int, default=None)
    p.add_argument("--active", type=int, default=None)
    p.add_argument("--recursions", type=int, default=None)
    p.add_argument("--strategy", choices=("dfs", "bfs"), default=None)
    p.add_argument("--frontier", type=int, default=None)
    p.add_argument("--node-budget", type=int, default=None)
    p.set_defaults(func=_cmd_pipeline)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (WirecutError, ValueError, OSError, yaml.YAMLError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exit_code_for(exc)


if __name__ == "__main__":
    raise SystemExit(main())
