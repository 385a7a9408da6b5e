"""Split a cut circuit into standalone subcircuits and turn their measured
outputs into the signed tensors the reconstruction chain multiplies.

Each cut wire segment becomes an output port (measured in a rotated basis
upstream) and an input port (initialized downstream). A subcircuit with
``i`` input and ``o`` output ports has 4^i * 3^o variants: inputs prepared
in {zero, one, plus, plus_i}, outputs rotated for {Z, X, Y} measurement.
Measurement combinations enumerate outermost and init combinations vary
fastest, both in the label orders above.

For a basis letter per cut (I, X, Y or Z), measured port outcomes are
weighted (+1,+1) for I on the Z variant and (+1,-1) on the Z/X/Y variant
otherwise, with one global factor 1/2 per cut folded into the measure
side; prepared ports combine init variants as zero+one (I), zero-one (Z),
2*plus-zero-one (X), 2*plus_i-zero-one (Y).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .circuit import Circuit, Gate, build_dag, expand_ccx
from .cutsearch import CutSolution, _topo_order
from .errors import InconsistentSolution, LengthMismatch, MissingVariant

INIT_LABELS = ("zero", "one", "plus", "plus_i")
MEAS_LABELS = ("Z", "X", "Y")
BASIS_LETTERS = ("I", "X", "Y", "Z")

_PREP_GATES = {
    "zero": (),
    "one": ("x",),
    "plus": ("h",),
    "plus_i": ("h", "s"),
}
_MEAS_GATES = {"Z": (), "X": ("h",), "Y": ("sdg", "h")}

# Which measurement variant serves each basis letter, and the coefficients
# combining init variants on the prepare side.
MEAS_VARIANT_FOR = {"I": "Z", "Z": "Z", "X": "X", "Y": "Y"}
PREP_COEFFS: dict[str, dict[str, float]] = {
    "I": {"zero": 1.0, "one": 1.0},
    "Z": {"zero": 1.0, "one": -1.0},
    "X": {"plus": 2.0, "zero": -1.0, "one": -1.0},
    "Y": {"plus_i": 2.0, "zero": -1.0, "one": -1.0},
}


@dataclass(frozen=True)
class Port:
    """Cut endpoint on a local wire. Output ports also record the local
    index of the last gate before the cut point."""

    cut_id: int
    wire: int
    after_gate: int | None = None


@dataclass(frozen=True)
class Subcircuit:
    """One standalone piece in dependency order.

    ``origin`` maps each local wire to its original qubit. Wires without
    an output port carry that qubit's final measurement; their count over
    all subcircuits is exactly the original qubit count.
    """

    index: int
    circuit: Circuit
    origin: tuple[int, ...]
    input_ports: tuple[Port, ...]
    output_ports: tuple[Port, ...]

    @property
    def num_wires(self) -> int:
        return self.circuit.num_qubits

    @property
    def output_port_wires(self) -> frozenset[int]:
        return frozenset(p.wire for p in self.output_ports)

    @property
    def measured_qubits(self) -> tuple[int, ...]:
        """Original qubits finally measured here (non-port wires, wire order)."""
        ports = self.output_port_wires
        return tuple(self.origin[w] for w in range(self.num_wires) if w not in ports)

    @property
    def num_variants(self) -> int:
        return 4 ** len(self.input_ports) * 3 ** len(self.output_ports)


@dataclass(frozen=True)
class WireCut:
    """A cut wire segment: measured upstream, re-prepared downstream."""

    cut_id: int
    qubit: int
    upstream_gate: int  # original gate index before the cut point


@dataclass(frozen=True)
class SplitCircuit:
    num_qubits: int
    subcircuits: tuple[Subcircuit, ...]
    cuts: tuple[WireCut, ...]

    @property
    def num_cuts(self) -> int:
        return len(self.cuts)


def split(circuit: Circuit, solution: CutSolution) -> SplitCircuit:
    """Cut the circuit along the solution into standalone subcircuits.

    Single-qubit gates attach to the current run of their wire, so each
    cut point sits immediately before the downstream multi-qubit gate.
    """
    circuit = expand_ccx(circuit)
    dag = build_dag(circuit)
    if len(solution.assignment) != dag.num_vertices:
        raise InconsistentSolution(
            f"solution covers {len(solution.assignment)} vertices, "
            f"circuit DAG has {dag.num_vertices}"
        )
    if solution.num_qubits != circuit.num_qubits:
        raise InconsistentSolution("solution was built for a different circuit size")
    num_clusters = max(solution.assignment) + 1
    if num_clusters < 2:
        raise InconsistentSolution("solution has no cuts")

    qedges: set[tuple[int, int]] = set()
    last_cluster_of: dict[int, int] = {}
    for v in range(dag.num_vertices):
        c = solution.assignment[v]
        for q in dag.vertex_qubits[v]:
            prev = last_cluster_of.get(q)
            if prev is not None and prev != c:
                qedges.add((prev, c))
            last_cluster_of[q] = c
    topo = _topo_order(num_clusters, qedges)
    if topo is None:
        raise InconsistentSolution("solution clusters have cyclic dependencies")
    sub_of_cluster = {c: i for i, c in enumerate(topo)}

    wires: list[list[int]] = [[] for _ in range(num_clusters)]  # origin per wire
    gates: list[list[Gate]] = [[] for _ in range(num_clusters)]
    in_ports: list[list[Port]] = [[] for _ in range(num_clusters)]
    out_ports: list[list[Port]] = [[] for _ in range(num_clusters)]
    cuts: list[WireCut] = []
    where: dict[int, tuple[int, int]] = {}  # qubit -> (sub, wire)
    pending: dict[int, list[Gate]] = {}  # 1q gates before a qubit's first run
    last_gate_idx: dict[int, int] = {}
    last_local: dict[tuple[int, int], int] = {}  # (sub, wire) -> local gate index
    vertex_of_gate = {gi: v for v, gi in enumerate(dag.gate_indices)}

    def new_wire(sub: int, qubit: int) -> int:
        wires[sub].append(qubit)
        return len(wires[sub]) - 1

    def emit(sub: int, gate: Gate) -> None:
        gates[sub].append(gate)
        for w in gate.qubits:
            last_local[(sub, w)] = len(gates[sub]) - 1

    for gi, g in enumerate(circuit.gates):
        if len(g.qubits) == 1:
            q = g.qubits[0]
            if q in where:
                s, w = where[q]
                emit(s, Gate(g.name, (w,), g.param))
            else:
                pending.setdefault(q, []).append(g)
            continue
        v = vertex_of_gate[gi]
        s = sub_of_cluster[solution.assignment[v]]
        local = []
        for q in g.qubits:
            if q not in where:
                w = new_wire(s, q)
                where[q] = (s, w)
                for lead in pending.pop(q, []):
                    emit(s, Gate(lead.name, (w,), lead.param))
            elif where[q][0] != s:
                old_s, old_w = where[q]
                cut_id = len(cuts)
                cuts.append(WireCut(cut_id, q, last_gate_idx[q]))
                out_ports[old_s].append(Port(cut_id, old_w, last_local[(old_s, old_w)]))
                w = new_wire(s, q)
                in_ports[s].append(Port(cut_id, w))
                where[q] = (s, w)
            local.append(where[q][1])
        for q in g.qubits:
            last_gate_idx[q] = gi
        emit(s, Gate(g.name, tuple(local), g.param))

    if not cuts:
        raise InconsistentSolution("solution cuts nothing")
    subs = []
    for s in range(num_clusters):
        subs.append(
            Subcircuit(
                index=s,
                circuit=Circuit(len(wires[s]), tuple(gates[s])),
                origin=tuple(wires[s]),
                input_ports=tuple(sorted(in_ports[s], key=lambda p: p.wire)),
                output_ports=tuple(sorted(out_ports[s], key=lambda p: p.wire)),
            )
        )
    widths = tuple(sub.num_wires for sub in subs)
    if widths != solution.subcircuit_qubits:
        raise InconsistentSolution(
            f"subcircuit widths {widths} != solution {solution.subcircuit_qubits}"
        )
    return SplitCircuit(circuit.num_qubits, tuple(subs), tuple(cuts))


@dataclass(frozen=True)
class SubcircuitVariant:
    """A runnable subcircuit instance: init labels per input port (port
    order), measurement labels per output port."""

    parent: int
    index: int
    inits: tuple[str, ...]
    meas: tuple[str, ...]
    circuit: Circuit


def variant_index(sub: Subcircuit, inits: tuple[str, ...], meas: tuple[str, ...]) -> int:
    ni = len(sub.input_ports)
    idx = 0
    for m in meas:
        idx = idx * 3 + MEAS_LABELS.index(m)
    base = idx * 4**ni
    off = 0
    for i in inits:
        off = off * 4 + INIT_LABELS.index(i)
    return base + off


def enumerate_variants(sub: Subcircuit) -> list[SubcircuitVariant]:
    """All prepared/rotated instances in deterministic order."""
    out: list[SubcircuitVariant] = []
    for meas in itertools.product(MEAS_LABELS, repeat=len(sub.output_ports)):
        for inits in itertools.product(INIT_LABELS, repeat=len(sub.input_ports)):
            prep = [
                Gate(name, (port.wire,))
                for port, label in zip(sub.input_ports, inits)
                for name in _PREP_GATES[label]
            ]
            rot = [
                Gate(name, (port.wire,))
                for port, label in zip(sub.output_ports, meas)
                for name in _MEAS_GATES[label]
            ]
            circuit = Circuit(
                sub.num_wires, tuple(prep) + sub.circuit.gates + tuple(rot)
            )
            out.append(SubcircuitVariant(sub.index, len(out), inits, meas, circuit))
    for v in out:
        assert variant_index(sub, v.inits, v.meas) == v.index
    return out


@dataclass(frozen=True)
class AttributedTensor:
    """Signed reconstruction factor over a subcircuit's non-port wires."""

    sub_index: int
    basis: tuple[str, ...]  # letter per cut id over the whole circuit
    qubits: tuple[int, ...]  # original qubits, wire order
    values: np.ndarray


def port_resolved_tensor(
    sub: Subcircuit,
    raw: dict[int, np.ndarray],
    assignment: tuple[str, ...],
    kept_wires: tuple[int, ...] | None = None,
) -> np.ndarray:
    """Signed tensor with output-port axes kept at full resolution.

    ``raw`` maps variant index to its measured vector over ``kept_wires``
    (all wires when None); ``assignment`` gives the basis letter per cut
    id. Prepared ports are combined across init variants, measured port
    axes are sign-weighted in place, and the global 1/2 per cut is folded
    in on the measure side.
    """
    if kept_wires is None:
        kept_wires = tuple(range(sub.num_wires))
    out_letters = [assignment[p.cut_id] for p in sub.output_ports]
    in_letters = [assignment[p.cut_id] for p in sub.input_ports]
    meas = tuple(MEAS_VARIANT_FOR[o] for o in out_letters)
    size = 2 ** len(kept_wires)
    acc: np.ndarray | None = None
    for combo in itertools.product(*(PREP_COEFFS[l].items() for l in in_letters)):
        inits = tuple(label for label, _ in combo)
        coeff = 1.0
        for _, c in combo:
            coeff *= c
        idx = variant_index(sub, inits, meas)
        if idx not in raw:
            raise MissingVariant(
                f"subcircuit {sub.index} variant {idx} (inits={inits}, meas={meas})"
            )
        vec = raw[idx]
        if vec.size != size:
            raise LengthMismatch(
                f"variant {idx} vector has {vec.size} entries, expected {size}"
            )
        acc = coeff * vec if acc is None else acc + coeff * vec
    assert acc is not None
    arr = acc.reshape((2,) * len(kept_wires)).astype(float).copy()
    axis_of = {w: i for i, w in enumerate(kept_wires)}
    for port, letter in zip(sub.output_ports, out_letters):
        ax = axis_of[port.wire]
        if letter != "I":
            sign = np.array([1.0, -1.0]).reshape(
                [2 if i == ax else 1 for i in range(arr.ndim)]
            )
            arr = arr * sign
    arr *= 0.5 ** len(sub.output_ports)
    return arr.reshape(-1)


def attribute(
    sub: Subcircuit, raw: dict[int, np.ndarray], assignment: tuple[str, ...]
) -> AttributedTensor:
    """Contract the measured port axes away: the tensor over the wires this
    subcircuit finally measures."""
    resolved = port_resolved_tensor(sub, raw, assignment)
    arr = resolved.reshape((2,) * sub.num_wires)
    port_axes = tuple(sorted(sub.output_port_wires))
    if port_axes:
        arr = arr.sum(axis=port_axes)
    return AttributedTensor(
        sub.index, tuple(assignment), sub.measured_qubits, arr.reshape(-1)
    )


def basis_assignments(num_cuts: int):
    """All basis-letter tuples, cut 0 varying slowest."""
    return itertools.product(BASIS_LETTERS, repeat=num_cuts)
