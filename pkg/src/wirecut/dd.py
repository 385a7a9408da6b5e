"""Recursive binned reconstruction for circuits too wide to materialize.

Each recursion assigns every original qubit a role: active qubits index
bins, merged qubits are summed out inside the backend, zoomed qubits are
fixed to the bits of the bin chosen at the previous recursion. The binned
distribution over active qubits is rebuilt with the same Kronecker kernel
as the full reconstruction, just over fewer axes; masses are absolute
(never renormalized), so a recursion's bins always partition the mass of
the bin it zoomed into.

The frontier of candidate bins keeps the largest `R` entries and a
recursion budget of `R` applies as well; `frontier` overrides the width
when the two roles should differ.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .circuit import Circuit
from .cutsearch import CutSolution
from .errors import DdUnnecessary
from .reconstruct import build_plan, build_tensors, contract_all, sub_roles
from .variants import SplitCircuit, enumerate_variants, split


@dataclass(frozen=True)
class DdConfig:
    max_active: int
    max_recursions: int
    strategy: str = "dfs"
    frontier: int | None = None  # candidate-list width when different from R

    def __post_init__(self):
        if self.max_active < 1:
            raise ValueError("max_active must be >= 1")
        if self.max_recursions < 1:
            raise ValueError("max_recursions must be >= 1")
        if self.strategy not in ("dfs", "bfs"):
            raise ValueError(f"unknown strategy {self.strategy!r}")
        if self.frontier is not None and self.frontier < 1:
            raise ValueError("frontier width must be >= 1")


@dataclass(frozen=True)
class DdBin:
    """One bin: the states matching ``roles`` with active qubits spelling
    ``pattern`` (most significant bit = lowest active qubit index)."""

    recursion: int
    roles: str
    pattern: int
    mass: float
    depth: int
    parent: tuple[int, int] | None  # (recursion, pattern) zoomed to get here


@dataclass
class DdRecursion:
    """All bins of one reconstruction step share roles, depth and parent,
    so they are stored as a single mass vector."""

    index: int
    roles: str
    depth: int
    parent: tuple[int, int] | None
    active: tuple[int, ...]
    masses: np.ndarray
    multiplies: int

    def bin(self, pattern: int) -> DdBin:
        return DdBin(
            self.index,
            self.roles,
            pattern,
            float(self.masses[pattern]),
            self.depth,
            self.parent,
        )


@dataclass
class DdResult:
    num_qubits: int
    config: DdConfig
    recursions: list[DdRecursion]
    frontier: list[DdBin] = field(default_factory=list)

    @property
    def multiplies(self) -> int:
        return sum(r.multiplies for r in self.recursions)

    def top_bins(self, limit: int = 32) -> list[DdBin]:
        """Deepest-available view: leaf bins (never zoomed into) across all
        recursions, largest mass first."""
        zoomed = {r.parent for r in self.recursions if r.parent is not None}
        out: list[DdBin] = []
        for rec in self.recursions:
            order = np.argsort(-rec.masses, kind="stable")[: limit]
            out.extend(
                rec.bin(int(p)) for p in order if (rec.index, int(p)) not in zoomed
            )
        out.sort(key=lambda b: (-b.mass, b.depth, b.recursion, b.pattern))
        return out[:limit]


def select_active(roles: str, max_active: int) -> tuple[int, ...]:
    """Deterministic activation rule: lowest-index merged qubits first."""
    picked = [q for q, c in enumerate(roles) if c == "M"][:max_active]
    return tuple(picked)


def _activate(roles: str, max_active: int) -> str:
    chars = list(roles)
    for q in select_active(roles, max_active):
        chars[q] = "A"
    return "".join(chars)


def _zoom(rec: DdRecursion, pattern: int, max_active: int) -> str:
    chars = list(rec.roles)
    width = len(rec.active)
    for j, q in enumerate(rec.active):
        chars[q] = str((pattern >> (width - 1 - j)) & 1)
    return _activate("".join(chars), max_active)


def _reconstruct_step(
    split_result: SplitCircuit,
    roles: str,
    backend,
    rec_index: int,
    threads: int,
) -> tuple[np.ndarray, tuple[int, ...], int]:
    plan = build_plan(split_result, roles)
    raw: dict[int, dict[int, np.ndarray]] = {}
    for sub in split_result.subcircuits:
        local_roles = sub_roles(sub, roles)
        vecs: dict[int, np.ndarray] = {}
        for var in enumerate_variants(sub):
            vecs[var.index] = backend.run(
                var.circuit, local_roles, key=(rec_index, sub.index, var.index)
            )
        raw[sub.index] = vecs
    tensors = build_tensors(split_result, raw, plan)
    masses, mult, _ = contract_all(plan, tensors, threads=threads)
    return masses, plan.out_qubits, mult


def dd_run(
    circuit: Circuit,
    solution: CutSolution,
    config: DdConfig,
    backend,
    threads: int = 1,
) -> DdResult:
    """Recursive query: reconstruct bins, zoom into the heaviest, repeat.

    Strategy dfs pops the deepest largest-mass candidate (chases one state
    down), bfs the shallowest largest-mass one (broad coverage first).
    """
    n = circuit.num_qubits
    if config.max_active >= n:
        raise DdUnnecessary(
            f"{config.max_active} active qubits cover all {n}; "
            "use the full reconstruction"
        )
    split_result = split(circuit, solution)
    width = config.frontier if config.frontier is not None else config.max_recursions
    result = DdResult(n, config, [])
    # candidates: (mass, depth, recursion, pattern)
    candidates: list[tuple[float, int, int, int]] = []

    def push_bins(rec: DdRecursion) -> None:
        if "M" not in rec.roles:
            return  # fully resolved bins cannot be zoomed further
        order = np.argsort(-rec.masses, kind="stable")[:width]
        for p in order:
            mass = float(rec.masses[p])
            if mass > 0:
                candidates.append((mass, rec.depth, rec.index, int(p)))
        candidates.sort(key=lambda e: (-e[0], e[1], e[2], e[3]))
        del candidates[width:]

    def run_step(roles: str, depth: int, parent: tuple[int, int] | None) -> DdRecursion:
        masses, active, mult = _reconstruct_step(
            split_result, roles, backend, len(result.recursions), threads
        )
        rec = DdRecursion(len(result.recursions), roles, depth, parent, active, masses, mult)
        result.recursions.append(rec)
        return rec

    push_bins(run_step(_activate("M" * n, config.max_active), 0, None))
    while len(result.recursions) < config.max_recursions and candidates:
        if config.strategy == "dfs":
            entry = min(candidates, key=lambda e: (-e[1], -e[0], e[2], e[3]))
        else:
            entry = min(candidates, key=lambda e: (e[1], -e[0], e[2], e[3]))
        candidates.remove(entry)
        _, depth, rec_index, pattern = entry
        parent_rec = result.recursions[rec_index]
        roles = _zoom(parent_rec, pattern, config.max_active)
        push_bins(run_step(roles, depth + 1, (rec_index, pattern)))
    result.frontier = [
        result.recursions[rec].bin(pattern) for _, _, rec, pattern in candidates
    ]
    return result


def bin_lookup(result: DdResult, state: str) -> DdBin:
    """Finest bin containing the basis state (bitstring, qubit 0 first)."""
    if len(state) != result.num_qubits:
        raise ValueError(f"state has {len(state)} bits, expected {result.num_qubits}")
    children: dict[tuple[int, int], int] = {
        rec.parent: rec.index for rec in result.recursions if rec.parent is not None
    }
    rec = result.recursions[0]
    while True:
        pattern = 0
        for q in rec.active:
            pattern = (pattern << 1) | (state[q] == "1")
        child = children.get((rec.index, pattern))
        if child is None:
            return rec.bin(pattern)
        rec = result.recursions[child]
