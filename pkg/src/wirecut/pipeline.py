"""End-to-end driver: load or generate a circuit, cut it, execute the
subcircuit variants, reconstruct fully or recursively, verify against the
uncut simulation when feasible, and write a run directory.

Timings live in their own artifact (timings.json) so report.json is
byte-identical across identical runs; backend wall time is accounted
separately from postprocessing, which is the number the scaling table
reports.
"""

from __future__ import annotations

import time
from contextlib import contextmanager
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import yaml

from . import artifacts
from .bench import default_aqft_degree, gen_adder, gen_aqft, gen_bv, gen_supremacy
from .circuit import Circuit
from .cutsearch import DEFAULT_NODE_BUDGET, CutConstraints, find_cuts
from .dd import DdConfig, DdResult, dd_run
from .errors import PipelineError, WirecutError
from .metrics import oracle_compare
from .reconstruct import (
    FD_QUBIT_LIMIT,
    build_plan,
    build_tensors,
    estimate_cost,
    reconstruct_fd,
)
from .sim import DEFAULT_QUBIT_LIMIT, make_backend
from .variants import enumerate_variants, split

RAW_DUMP_LIMIT = 2**22  # total floats; above this raw outputs are not dumped


@dataclass
class RunConfig:
    benchmark: dict | None = None
    circuit_path: str | None = None
    max_subcircuit_qubits: int = 20
    max_subcircuits: int = 5
    mode: str = "fd"
    dd: DdConfig | None = None
    backend: str = "exact"
    shots: int | None = None
    seed: int = 0
    output_dir: str | None = None
    clip_tol: float | None = None
    norm_tol: float = 1e-6
    sim_limit: int = DEFAULT_QUBIT_LIMIT
    fd_limit: int = FD_QUBIT_LIMIT
    node_budget: int = DEFAULT_NODE_BUDGET
    threads: int = 1

    def validate(self) -> None:
        if (self.benchmark is None) == (self.circuit_path is None):
            raise ValueError("config needs exactly one of benchmark / circuit path")
        if self.mode not in ("fd", "dd"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.mode == "dd" and self.dd is None:
            raise ValueError("dd mode requires dd settings (max_active, ...)")
        if self.backend not in ("exact", "shots", "random"):
            raise ValueError(f"unknown backend {self.backend!r}")
        if self.backend == "shots" and (self.shots or 0) < 1:
            raise ValueError("shots backend requires shots >= 1")
        if self.threads < 1:
            raise ValueError("threads must be >= 1")


def config_from_mapping(data: dict) -> RunConfig:
    """Build a RunConfig from the nested key-value layout of config files."""
    data = dict(data or {})
    constraints = data.get("constraints") or {}
    backend = data.get("backend") or {}
    if isinstance(backend, str):
        backend = {"mode": backend}
    tolerances = data.get("tolerances") or {}
    dd_raw = data.get("dd")
    dd_cfg = None
    if dd_raw is not None:
        dd_cfg = DdConfig(
            max_active=int(dd_raw["max_active"]),
            max_recursions=int(dd_raw["max_recursions"]),
            strategy=str(dd_raw.get("strategy", "dfs")),
            frontier=(
                int(dd_raw["frontier"]) if dd_raw.get("frontier") is not None else None
            ),
        )
    cfg = RunConfig(
        benchmark=data.get("benchmark"),
        circuit_path=data.get("circuit"),
        max_subcircuit_qubits=int(constraints.get("max_subcircuit_qubits", 20)),
        max_subcircuits=int(constraints.get("max_subcircuits", 5)),
        mode=str(data.get("mode", "fd")),
        dd=dd_cfg,
        backend=str(backend.get("mode", "exact")),
        shots=(int(backend["shots"]) if backend.get("shots") is not None else None),
        seed=int(backend.get("seed", 0)),
        output_dir=data.get("output_dir"),
        clip_tol=(
            float(tolerances["clip_tol"])
            if tolerances.get("clip_tol") is not None
            else None
        ),
        norm_tol=float(tolerances.get("norm_tol", 1e-6)),
        sim_limit=int(data.get("sim_limit", DEFAULT_QUBIT_LIMIT)),
        fd_limit=int(data.get("fd_limit", FD_QUBIT_LIMIT)),
        node_budget=int(data.get("node_budget", DEFAULT_NODE_BUDGET)),
        threads=int(data.get("threads", 1)),
    )
    return cfg


def load_config(path: str | Path) -> RunConfig:
    with open(path) as fh:
        return config_from_mapping(yaml.safe_load(fh))


def build_circuit(config: RunConfig) -> tuple[Circuit, str]:
    """Input stage: read the circuit file or generate the benchmark."""
    if config.circuit_path is not None:
        return artifacts.read_circuit(config.circuit_path), f"file:{config.circuit_path}"
    spec = dict(config.benchmark)
    family = spec.get("family")
    try:
        return _generate_benchmark(family, spec)
    except KeyError as exc:
        raise ValueError(f"benchmark {family!r} needs key {exc.args[0]!r}") from None


def _generate_benchmark(family, spec) -> tuple[Circuit, str]:
    if family == "bv":
        n = int(spec["num_qubits"])
        hidden = str(spec.get("hidden", "1" * (n - 1)))
        return gen_bv(n, hidden), f"benchmark:bv:{n}:{hidden}"
    if family == "adder":
        n = int(spec["num_qubits"])
        a = int(spec.get("a", 0))
        b = int(spec.get("b", 0))
        return gen_adder(n, a, b), f"benchmark:adder:{n}:{a}+{b}"
    if family == "aqft":
        n = int(spec["num_qubits"])
        degree = int(spec.get("degree", default_aqft_degree(n)))
        return gen_aqft(n, degree), f"benchmark:aqft:{n}:{degree}"
    if family == "supremacy":
        rows = int(spec["rows"])
        cols = int(spec["cols"])
        depth = int(spec.get("depth", 10))
        seed = int(spec.get("seed", 0))
        return (
            gen_supremacy(rows, cols, depth, seed),
            f"benchmark:supremacy:{rows}x{cols}:d{depth}:s{seed}",
        )
    raise ValueError(f"unknown benchmark family {family!r}")


class _TimedBackend:
    """Wraps a backend to account its wall time and call count."""

    def __init__(self, inner):
        self.inner = inner
        self.elapsed = 0.0
        self.calls = 0

    @property
    def name(self) -> str:
        return self.inner.name

    def run(self, circuit, roles, key=()):
        t0 = time.perf_counter()
        try:
            return self.inner.run(circuit, roles, key)
        finally:
            self.elapsed += time.perf_counter() - t0
            self.calls += 1


@contextmanager
def _stage(name: str, times: dict):
    t0 = time.perf_counter()
    try:
        yield
    except PipelineError:
        raise
    except Exception as exc:
        raise PipelineError(name, exc) from exc
    finally:
        times[name] = time.perf_counter() - t0


def dd_section(result: DdResult, top: int = 8) -> dict:
    recursions = []
    for rec in result.recursions:
        order = np.argsort(-rec.masses, kind="stable")[:top]
        recursions.append(
            {
                "index": rec.index,
                "depth": rec.depth,
                "parent": list(rec.parent) if rec.parent is not None else None,
                "roles": rec.roles,
                "active": list(rec.active),
                "mass_sum": float(rec.masses.sum()),
                "multiplies": rec.multiplies,
                "top_bins": [
                    [int(p), float(rec.masses[p])]
                    for p in order
                    if rec.masses[p] > 0
                ],
            }
        )
    return {
        "max_active": result.config.max_active,
        "max_recursions": result.config.max_recursions,
        "strategy": result.config.strategy,
        "num_recursions": len(result.recursions),
        "multiplies": result.multiplies,
        "recursions": recursions,
        "frontier": [
            {"recursion": b.recursion, "pattern": b.pattern, "mass": b.mass}
            for b in result.frontier
        ],
    }


def run_pipeline(config: RunConfig) -> dict:
    """Execute all stages; returns {"report": ..., "timings": ...}.

    When config.output_dir is set, artifacts are written as stages finish,
    so a failing stage leaves the earlier ones on disk.
    """
    config.validate()
    times: dict[str, float] = {}
    t_start = time.perf_counter()
    out_dir: Path | None = None
    written: list[str] = []

    def emit(name: str, writer) -> None:
        if out_dir is None:
            return
        writer(out_dir / name)
        written.append(name)

    if config.output_dir is not None:
        out_dir = Path(config.output_dir)
        out_dir.mkdir(parents=True, exist_ok=True)

    with _stage("input", times):
        circuit, source = build_circuit(config)
        emit("circuit.txt", lambda p: artifacts.write_circuit(p, circuit))

    report: dict = {
        "circuit": {
            "num_qubits": circuit.num_qubits,
            "num_gates": len(circuit.gates),
            "source": source,
        },
        "constraints": {
            "max_subcircuit_qubits": config.max_subcircuit_qubits,
            "max_subcircuits": config.max_subcircuits,
        },
        "mode": config.mode,
        "backend": {
            "mode": config.backend,
            "shots": config.shots,
            "seed": config.seed,
        },
    }

    with _stage("cut", times):
        constraints = CutConstraints(
            config.max_subcircuit_qubits, config.max_subcircuits
        )
        solution = find_cuts(circuit, constraints, node_budget=config.node_budget)
        split_result = split(circuit, solution)
        report["cut"] = artifacts.solution_to_dict(solution)
        emit("cut.json", lambda p: artifacts.write_json(p, report["cut"]))
        emit(
            "manifest.json",
            lambda p: artifacts.write_json(p, artifacts.split_manifest(split_result)),
        )

    backend = _TimedBackend(
        make_backend(
            config.backend,
            shots=config.shots,
            seed=config.seed,
            limit=config.sim_limit,
        )
    )

    if config.mode == "fd":
        plan = build_plan(split_result)
        with _stage("execute", times):
            raw: dict[int, dict[int, np.ndarray]] = {}
            for sub in split_result.subcircuits:
                roles = "A" * sub.num_wires
                raw[sub.index] = {
                    var.index: backend.run(
                        var.circuit, roles, key=(0, sub.index, var.index)
                    )
                    for var in enumerate_variants(sub)
                }
            total_floats = sum(v.size for vecs in raw.values() for v in vecs.values())
            if total_floats <= RAW_DUMP_LIMIT:
                emit(
                    "raw.json",
                    lambda p: artifacts.write_raw_outputs(
                        p,
                        raw,
                        {
                            "backend": config.backend,
                            "shots": config.shots,
                            "seed": config.seed,
                        },
                    ),
                )
        with _stage("reconstruct", times):
            if config.clip_tol is not None:
                clip_tol = config.clip_tol
            elif config.backend == "shots":
                clip_tol = 5.0 / (config.shots**0.5)
            elif config.backend == "random":
                # pseudo-random outputs are for runtime studies; negatives
                # are structural there, not noise, so clip everything
                clip_tol = float("inf")
            else:
                clip_tol = 1e-8
            fd = reconstruct_fd(
                plan,
                build_tensors(split_result, raw, plan),
                clip_tol=clip_tol,
                renormalize=config.backend != "exact",
                norm_tol=config.norm_tol,
                max_qubits=config.fd_limit,
                threads=config.threads,
            )
            report["fd"] = {
                "terms": fd.terms,
                "multiplies": fd.multiplies,
                "estimated_multiplies": estimate_cost(plan),
                "raw_sum": fd.raw_sum,
                "clipped": fd.clipped,
                "output_sum": float(fd.values.sum()),
            }
            emit("dist.bin", lambda p: artifacts.write_distribution(p, fd.values))
        with _stage("verify", times):
            if config.backend == "exact" and circuit.num_qubits <= config.sim_limit:
                cmp = oracle_compare(circuit, fd.values, limit=config.sim_limit)
                report["verify"] = {
                    "chi_square": cmp.chi_square,
                    "l_inf": cmp.l_inf,
                    "total_variation": cmp.total_variation,
                }
            else:
                report["verify"] = None
        postprocess = times["reconstruct"]
    else:
        with _stage("dd", times):
            result = dd_run(circuit, solution, config.dd, backend, config.threads)
            report["dd"] = dd_section(result)
            emit("dd.json", lambda p: artifacts.write_json(p, report["dd"]))
        with _stage("verify", times):
            if config.backend == "exact":
                mass = report["dd"]["recursions"][0]["mass_sum"]
                report["verify"] = {"recursion0_mass_error": abs(mass - 1.0)}
            else:
                report["verify"] = None
        postprocess = times["dd"] - backend.elapsed

    report["backend"]["calls"] = backend.calls

    timings = {
        "stages": times,
        "backend_seconds": backend.elapsed,
        "postprocess_seconds": postprocess,
        "total_seconds": time.perf_counter() - t_start,
    }
    with _stage("artifacts", times):
        emit("report.json", lambda p: artifacts.write_json(p, report))
        emit("timings.json", lambda p: artifacts.write_json(p, timings))
        if out_dir is not None:
            artifacts.write_json(out_dir / "files.json", {"artifacts": sorted(written)})
    return {"report": report, "timings": timings}


def scaling_report(configs: list[RunConfig]) -> dict:
    """Run each config and tabulate work against the cost objective.

    Only full reconstruction with the exact backend is meaningful here;
    anything else is rejected. A multiply count differing from the
    objective is reported as a failed check.
    """
    rows = []
    for config in configs:
        if config.mode != "fd" or config.backend != "exact":
            raise ValueError("scaling report requires fd mode and the exact backend")
        out = run_pipeline(config)
        rep = out["report"]
        rows.append(
            {
                "source": rep["circuit"]["source"],
                "num_qubits": rep["circuit"]["num_qubits"],
                "num_cuts": rep["cut"]["num_cuts"],
                "objective": rep["cut"]["objective"],
                "multiplies": rep["fd"]["multiplies"],
                "matches_objective": rep["fd"]["multiplies"] == rep["cut"]["objective"],
                "postprocess_seconds": out["timings"]["postprocess_seconds"],
            }
        )
    return {"rows": rows, "all_match": all(r["matches_objective"] for r in rows)}
