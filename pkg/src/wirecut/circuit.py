"""Gate-level circuits: construction, text serialization, and the cut DAG.

A circuit is an ordered gate list on ``num_qubits`` wires. Qubit 0 is the
most significant bit of every basis-state index throughout the package.
The text format is one gate per line after a ``qubits <n>`` header;
``#`` starts a comment. Parsing and serializing round-trip bit-exactly
(angles printed at 17 significant digits).
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import CircuitParseError, EmptyDag

# name -> (arity, number of angle parameters)
GATE_SIGNATURES: dict[str, tuple[int, int]] = {
    "h": (1, 0),
    "x": (1, 0),
    "t": (1, 0),
    "tdg": (1, 0),
    "s": (1, 0),
    "sdg": (1, 0),
    "sx": (1, 0),
    "sy": (1, 0),
    "rz": (1, 1),
    "cp": (2, 1),
    "cx": (2, 0),
    "cz": (2, 0),
    "ccx": (3, 0),
}


@dataclass(frozen=True)
class Gate:
    """One gate application: name, target qubits, optional angle (radians)."""

    name: str
    qubits: tuple[int, ...]
    param: float | None = None

    def __post_init__(self):
        if self.name not in GATE_SIGNATURES:
            raise ValueError(f"unknown gate {self.name!r}")
        arity, nparams = GATE_SIGNATURES[self.name]
        if len(self.qubits) != arity:
            raise ValueError(f"{self.name} expects {arity} qubits, got {len(self.qubits)}")
        if len(set(self.qubits)) != len(self.qubits):
            raise ValueError(f"{self.name} qubits must be distinct: {self.qubits}")
        if (self.param is None) != (nparams == 0):
            raise ValueError(f"{self.name} takes {nparams} angle parameter(s)")


@dataclass(frozen=True)
class Circuit:
    """Immutable ordered gate list on a fixed number of wires."""

    num_qubits: int
    gates: tuple[Gate, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if self.num_qubits < 1:
            raise ValueError("num_qubits must be >= 1")
        object.__setattr__(self, "gates", tuple(self.gates))
        for g in self.gates:
            if max(g.qubits) >= self.num_qubits:
                raise ValueError(f"gate {g.name} on {g.qubits} exceeds {self.num_qubits} qubits")

    @property
    def num_gates(self) -> int:
        return len(self.gates)

    def with_gates(self, extra: list[Gate]) -> "Circuit":
        return Circuit(self.num_qubits, self.gates + tuple(extra))


def serialize_circuit(circuit: Circuit) -> str:
    """Render a circuit as text. Deterministic; angles at 17 significant digits."""
    lines = [f"qubits {circuit.num_qubits}"]
    for g in circuit.gates:
        parts = [g.name]
        if g.param is not None:
            parts.append(format(g.param, ".17g"))
        parts.extend(str(q) for q in g.qubits)
        lines.append(" ".join(parts))
    return "\n".join(lines) + "\n"


def parse_circuit(text: str) -> Circuit:
    """Parse the text format. Errors carry the offending 1-based line number."""
    num_qubits = None
    gates: list[Gate] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        if num_qubits is None:
            if tokens[0] != "qubits" or len(tokens) != 2:
                raise CircuitParseError("expected header 'qubits <n>'", lineno)
            try:
                num_qubits = int(tokens[1])
            except ValueError:
                raise CircuitParseError(f"bad qubit count {tokens[1]!r}", lineno) from None
            if num_qubits < 1:
                raise CircuitParseError("qubit count must be >= 1", lineno)
            continue
        name = tokens[0]
        if name not in GATE_SIGNATURES:
            raise CircuitParseError(f"unknown gate {name!r}", lineno)
        arity, nparams = GATE_SIGNATURES[name]
        args = tokens[1:]
        param = None
        if nparams:
            if len(args) != arity + 1:
                raise CircuitParseError(f"{name} expects an angle and {arity} qubit(s)", lineno)
            try:
                param = float(args[0])
            except ValueError:
                raise CircuitParseError(f"bad angle {args[0]!r}", lineno) from None
            args = args[1:]
        elif len(args) != arity:
            raise CircuitParseError(f"{name} expects {arity} qubit(s), got {len(args)}", lineno)
        try:
            qubits = tuple(int(a) for a in args)
        except ValueError:
            raise CircuitParseError(f"bad qubit index in {args}", lineno) from None
        if any(q < 0 or q >= num_qubits for q in qubits):
            raise CircuitParseError(f"qubit index out of range in {qubits}", lineno)
        try:
            gates.append(Gate(name, qubits, param))
        except ValueError as exc:
            raise CircuitParseError(str(exc), lineno) from None
    if num_qubits is None:
        raise CircuitParseError("empty input: missing 'qubits <n>' header", 1)
    return Circuit(num_qubits, tuple(gates))


# Standard 15-gate Toffoli network over {h, t, tdg, cx}.
def _ccx_network(c1: int, c2: int, t: int) -> list[Gate]:
    return [
        Gate("h", (t,)),
        Gate("cx", (c2, t)),
        Gate("tdg", (t,)),
        Gate("cx", (c1, t)),
        Gate("t", (t,)),
        Gate("cx", (c2, t)),
        Gate("tdg", (t,)),
        Gate("cx", (c1, t)),
        Gate("t", (c2,)),
        Gate("t", (t,)),
        Gate("h", (t,)),
        Gate("cx", (c1, c2)),
        Gate("t", (c1,)),
        Gate("tdg", (c2,)),
        Gate("cx", (c1, c2)),
    ]


def expand_ccx(circuit: Circuit) -> Circuit:
    """Rewrite every ccx as the standard 15-gate {h,t,tdg,cx} network."""
    if not any(g.name == "ccx" for g in circuit.gates):
        return circuit
    out: list[Gate] = []
    for g in circuit.gates:
        if g.name == "ccx":
            out.extend(_ccx_network(*g.qubits))
        else:
            out.append(g)
    return Circuit(circuit.num_qubits, tuple(out))


@dataclass(frozen=True)
class DagEdge:
    """Wire segment between consecutive multi-qubit gates on one qubit."""

    qubit: int
    upstream: int  # vertex index
    downstream: int  # vertex index


@dataclass(frozen=True)
class CircuitDag:
    """Multi-qubit gates as vertices, same-wire adjacency as directed edges.

    Vertices are numbered in gate order; ``gate_indices[v]`` maps a vertex
    back to its position in ``circuit.gates``. Edges always point forward
    in time, so the DAG is acyclic by construction.
    """

    circuit: Circuit
    gate_indices: tuple[int, ...]
    vertex_qubits: tuple[tuple[int, ...], ...]
    edges: tuple[DagEdge, ...]

    @property
    def num_vertices(self) -> int:
        return len(self.gate_indices)


def build_dag(circuit: Circuit) -> CircuitDag:
    """Build the cut DAG. Raises EmptyDag if no multi-qubit gate exists."""
    gate_indices: list[int] = []
    vertex_qubits: list[tuple[int, ...]] = []
    last_vertex_on: dict[int, int] = {}
    edges: list[DagEdge] = []
    for idx, g in enumerate(circuit.gates):
        if len(g.qubits) < 2:
            continue
        v = len(gate_indices)
        gate_indices.append(idx)
        vertex_qubits.append(g.qubits)
        for q in g.qubits:
            if q in last_vertex_on:
                edges.append(DagEdge(q, last_vertex_on[q], v))
            last_vertex_on[q] = v
    if not gate_indices:
        raise EmptyDag("circuit has no multi-qubit gates")
    return CircuitDag(circuit, tuple(gate_indices), tuple(vertex_qubits), tuple(edges))


def is_fully_connected(circuit: Circuit) -> bool:
    """True iff multi-qubit gates join all wires into one component."""
    n = circuit.num_qubits
    parent = list(range(n))

    def find(a: int) -> int:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for g in circuit.gates:
        if len(g.qubits) < 2:
            continue
        r = find(g.qubits[0])
        for q in g.qubits[1:]:
            parent[find(q)] = r
    return len({find(q) for q in range(n)}) == 1
