"""Rebuild output distributions from attributed subcircuit tensors.

The reconstruction for one basis assignment chains Kronecker products of
the per-subcircuit tensors kept at full port resolution, then sums the
output-port axes away and reorders the remaining axes to ascending
original-qubit order (qubit 0 most significant). Summing over all 4^K
assignments yields the full distribution; the same kernel applied to
binned tensors yields recursive-query bins.

Port axes stay in the product until after the chain on purpose: the
multiply count of the chain is then exactly the cost objective the cut
searcher minimizes, which the instrumentation asserts.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from .cutsearch import clustering_objective
from .errors import (
    MissingTensor,
    NegativeMass,
    NormalizationFailure,
    ResourceGuard,
)
from .variants import (
    SplitCircuit,
    Subcircuit,
    basis_assignments,
    port_resolved_tensor,
)

FD_QUBIT_LIMIT = 30

TensorKey = tuple[int, tuple[str, ...]]  # (subcircuit index, basis assignment)


@dataclass(frozen=True)
class ReconstructionPlan:
    """Contraction layout shared by full and binned reconstruction.

    ``sub_kept_wires`` lists, per subcircuit, the local wires whose axes
    appear in that subcircuit's tensors (output ports always; other wires
    only when their original qubit is kept). ``permutation`` maps position
    in tensor-product order to the original qubit index; ``out_qubits`` is
    the same set sorted ascending, the index order of the output vector.
    """

    num_qubits: int
    num_cuts: int
    num_subcircuits: int
    sub_kept_wires: tuple[tuple[int, ...], ...]
    sub_axes: tuple[tuple[tuple[str, int], ...], ...]
    permutation: tuple[int, ...]
    out_qubits: tuple[int, ...]

    @property
    def kept_widths(self) -> tuple[int, ...]:
        return tuple(len(w) for w in self.sub_kept_wires)


def sub_roles(sub: Subcircuit, roles: str) -> str:
    """Roles string over a subcircuit's local wires: output-port wires stay
    fully resolved, other wires inherit their original qubit's role."""
    ports = sub.output_port_wires
    return "".join(
        "A" if w in ports else roles[sub.origin[w]] for w in range(sub.num_wires)
    )


def build_plan(split: SplitCircuit, roles: str | None = None) -> ReconstructionPlan:
    """Lay out the contraction for the given per-qubit roles.

    ``roles`` marks each original qubit A (kept), M (summed out by the
    backend) or 0/1 (conditioned by the backend); None keeps all qubits.
    """
    if roles is None:
        roles = "A" * split.num_qubits
    if len(roles) != split.num_qubits:
        raise ValueError(f"roles length {len(roles)} != {split.num_qubits} qubits")
    kept_wires: list[tuple[int, ...]] = []
    axes: list[tuple[tuple[str, int], ...]] = []
    product_order: list[int] = []
    for sub in split.subcircuits:
        ports = {p.wire: p.cut_id for p in sub.output_ports}
        wires = []
        tags = []
        for w in range(sub.num_wires):
            if w in ports:
                wires.append(w)
                tags.append(("port", ports[w]))
            elif roles[sub.origin[w]] == "A":
                wires.append(w)
                tags.append(("qubit", sub.origin[w]))
                product_order.append(sub.origin[w])
        kept_wires.append(tuple(wires))
        axes.append(tuple(tags))
    return ReconstructionPlan(
        num_qubits=split.num_qubits,
        num_cuts=split.num_cuts,
        num_subcircuits=len(split.subcircuits),
        sub_kept_wires=tuple(kept_wires),
        sub_axes=tuple(axes),
        permutation=tuple(product_order),
        out_qubits=tuple(sorted(product_order)),
    )


def estimate_cost(plan: ReconstructionPlan) -> int:
    """Multiply count of the Kronecker chains over all basis assignments."""
    return clustering_objective(plan.kept_widths, plan.num_cuts)


def build_tensors(
    split_result: SplitCircuit,
    raw: Mapping[int, Mapping[int, np.ndarray]],
    plan: ReconstructionPlan,
) -> dict[TensorKey, np.ndarray]:
    """Port-resolved tensors for every (subcircuit, basis assignment).

    ``raw`` maps subcircuit index -> variant index -> measured vector over
    that subcircuit's kept wires. Assignments that only differ on cuts not
    touching a subcircuit share one array.
    """
    tensors: dict[TensorKey, np.ndarray] = {}
    cache: dict[tuple[int, tuple[str, ...]], np.ndarray] = {}
    for k in basis_assignments(plan.num_cuts):
        for sub in split_result.subcircuits:
            ports = (*sub.input_ports, *sub.output_ports)
            restricted = tuple(k[p.cut_id] for p in ports)
            t = cache.get((sub.index, restricted))
            if t is None:
                t = port_resolved_tensor(
                    sub, raw[sub.index], k, plan.sub_kept_wires[sub.index]
                )
                cache[(sub.index, restricted)] = t
            tensors[(sub.index, k)] = t
    return tensors


def _contract_term(
    plan: ReconstructionPlan,
    factors: list[np.ndarray],
    port_axes: tuple[int, ...],
) -> tuple[np.ndarray, int]:
    acc = factors[0]
    mult = 0
    for t in factors[1:]:
        mult += acc.size * t.size
        acc = np.multiply.outer(acc, t).reshape(-1)
    total_axes = sum(len(a) for a in plan.sub_axes)
    arr = acc.reshape((2,) * total_axes)
    if port_axes:
        arr = arr.sum(axis=port_axes)
    return arr.reshape(-1), mult


def contract_all(
    plan: ReconstructionPlan,
    tensors: Mapping[TensorKey, np.ndarray],
    assignments: Iterable[tuple[str, ...]] | None = None,
    threads: int = 1,
) -> tuple[np.ndarray, int, int]:
    """Sum the Kronecker chains over basis assignments.

    Returns (signed sum over kept qubits ascending, multiply count, term
    count). Raises MissingTensor when a required (subcircuit, assignment)
    tensor is absent.
    """
    if assignments is None:
        assignments = basis_assignments(plan.num_cuts)
    terms = list(assignments)
    flat_axes = [tag for sub_tags in plan.sub_axes for tag in sub_tags]
    port_axes = tuple(i for i, (kind, _) in enumerate(flat_axes) if kind == "port")
    transpose = tuple(
        plan.permutation.index(q) for q in plan.out_qubits
    )
    expected = [
        2 ** len(plan.sub_kept_wires[i]) for i in range(plan.num_subcircuits)
    ]

    def factors_for(k: tuple[str, ...]) -> list[np.ndarray]:
        fs = []
        for i in range(plan.num_subcircuits):
            t = tensors.get((i, k))
            if t is None:
                raise MissingTensor(f"subcircuit {i}, assignment {''.join(k)}")
            if t.size != expected[i]:
                raise MissingTensor(
                    f"subcircuit {i}, assignment {''.join(k)}: "
                    f"{t.size} entries, expected {expected[i]}"
                )
            fs.append(t)
        return fs

    out_size = 2 ** len(plan.out_qubits)

    def run_chunk(chunk: list[tuple[str, ...]]) -> tuple[np.ndarray, int]:
        acc = np.zeros(out_size)
        mult = 0
        for k in chunk:
            vec, m = _contract_term(plan, factors_for(k), port_axes)
            acc += vec
            mult += m
        return acc, mult

    if threads <= 1 or len(terms) <= 1:
        total, mult = run_chunk(terms)
    else:
        nchunks = min(threads, len(terms))
        chunks = [terms[i::nchunks] for i in range(nchunks)]
        with ThreadPoolExecutor(max_workers=nchunks) as pool:
            parts = list(pool.map(run_chunk, chunks))
        # fixed reduction order keeps results independent of scheduling
        total = np.zeros(out_size)
        mult = 0
        for vec, m in parts:
            total += vec
            mult += m
    # one permutation into original qubit order at the end; terms share it
    if len(transpose) > 1:
        total = (
            total.reshape((2,) * len(plan.out_qubits)).transpose(transpose).reshape(-1)
        )
    return total, mult, len(terms)


@dataclass
class FdResult:
    values: np.ndarray
    multiplies: int
    terms: int
    raw_sum: float
    clipped: int


def reconstruct_fd(
    plan: ReconstructionPlan,
    tensors: Mapping[TensorKey, np.ndarray],
    *,
    clip_tol: float = 1e-8,
    renormalize: bool = False,
    norm_tol: float = 1e-6,
    max_qubits: int = FD_QUBIT_LIMIT,
    threads: int = 1,
) -> FdResult:
    """Full 2^n distribution, summed over every basis assignment.

    Negative entries within clip_tol of zero are clipped; anything lower
    raises NegativeMass. Without renormalization (exact inputs) the result
    must already sum to 1 within norm_tol; with it (sampled inputs) the
    clipped vector is rescaled to unit mass.
    """
    if plan.num_cuts < 1:
        raise ValueError("reconstruction requires at least one cut")
    if len(plan.out_qubits) > max_qubits:
        raise ResourceGuard(
            f"full reconstruction of {len(plan.out_qubits)} qubits exceeds the "
            f"{max_qubits}-qubit guard; use a recursive query instead"
        )
    total, mult, terms = contract_all(plan, tensors, threads=threads)
    worst = float(total.min()) if total.size else 0.0
    if worst < -clip_tol:
        raise NegativeMass(
            f"reconstructed mass {worst:.3e} below -{clip_tol:.1e}"
        )
    negatives = int((total < 0).sum())
    np.clip(total, 0.0, None, out=total)
    raw_sum = float(total.sum())
    if renormalize:
        if raw_sum > 0:
            total /= raw_sum
    elif abs(raw_sum - 1.0) > norm_tol:
        raise NormalizationFailure(
            f"exact-mode distribution sums to {raw_sum!r}, not 1 +- {norm_tol:.1e}"
        )
    return FdResult(total, mult, terms, raw_sum, negatives)
