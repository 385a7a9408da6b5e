"""Search for wire cuts: cluster the multi-qubit-gate DAG so every piece
fits on a small device and the reconstruction cost is minimal.

The cost of a clustering with K cut wire segments and subcircuit widths
n_1..n_C (in dependency order) is

    4^K * sum_{c=2..C} prod_{i<=c} 2^{n_i}

counting the floating-point multiplications of the reconstruction chain.
A subcircuit's width is its original wires plus its cut-input ports.

``find_cuts`` runs branch-and-bound over vertex-to-cluster assignments in
gate order with symmetry breaking (vertex 0 opens cluster 0; cluster c+1
only opens once c is nonempty). A hill-climbing primer over per-wire cut
times seeds the incumbent so large instances return a good solution even
when the node budget stops the proof of optimality (certified=False).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .circuit import Circuit, CircuitDag, build_dag, expand_ccx, is_fully_connected
from .errors import (
    Infeasible,
    InconsistentSolution,
    NotConnected,
    TooLarge,
    WholeCircuitFits,
)

DEFAULT_NODE_BUDGET = 10_000_000


@dataclass(frozen=True)
class CutConstraints:
    """Device limits the clustering must respect."""

    max_subcircuit_qubits: int
    max_subcircuits: int = 5

    def __post_init__(self):
        # below 2 no multi-qubit gate fits anywhere
        if self.max_subcircuit_qubits < 2:
            raise ValueError("max_subcircuit_qubits must be >= 2")
        if self.max_subcircuits < 2:
            raise ValueError("max_subcircuits must be >= 2")


@dataclass(frozen=True)
class CutSolution:
    """A feasible clustering plus its bookkeeping.

    ``assignment`` maps DAG vertex -> cluster label in first-use order;
    ``subcircuit_qubits`` lists widths in dependency (topological) order,
    which is also the order downstream stages use. ``cuts`` identifies each
    cut wire segment by (qubit, original index of the upstream gate).
    """

    num_qubits: int
    assignment: tuple[int, ...]
    num_cuts: int
    cuts: tuple[tuple[int, int], ...]
    subcircuit_qubits: tuple[int, ...]
    objective: int
    certified: bool = True
    nodes_explored: int = 0

    @property
    def num_subcircuits(self) -> int:
        return len(self.subcircuit_qubits)

    @property
    def log2_objective(self) -> float:
        import math

        return math.log2(self.objective)


def clustering_objective(widths_in_order: tuple[int, ...], num_cuts: int) -> int:
    """Reconstruction multiply count for widths listed in dependency order."""
    total = 0
    prefix = 1
    for c, w in enumerate(widths_in_order):
        prefix *= 2**w
        if c >= 1:
            total += prefix
    return 4**num_cuts * total


def _topo_order(num_clusters: int, edges: set[tuple[int, int]]) -> list[int] | None:
    """Kahn's algorithm, smallest label first; None if cyclic."""
    indeg = [0] * num_clusters
    succ: list[set[int]] = [set() for _ in range(num_clusters)]
    for a, b in edges:
        if b not in succ[a]:
            succ[a].add(b)
            indeg[b] += 1
    ready = sorted(i for i in range(num_clusters) if indeg[i] == 0)
    order: list[int] = []
    while ready:
        a = ready.pop(0)
        order.append(a)
        opened = []
        for b in succ[a]:
            indeg[b] -= 1
            if indeg[b] == 0:
                opened.append(b)
        ready = sorted(ready + opened)
    return order if len(order) == num_clusters else None


@dataclass
class _Evaluation:
    feasible: bool
    num_cuts: int = 0
    cuts: tuple[tuple[int, int], ...] = ()
    widths_topo: tuple[int, ...] = ()
    objective: int = 0
    topo: tuple[int, ...] = ()


def evaluate_assignment(
    dag: CircuitDag, assignment: tuple[int, ...], constraints: CutConstraints
) -> _Evaluation:
    """Check feasibility of a full canonical assignment and price it."""
    num_clusters = max(assignment) + 1
    if num_clusters < 2 or num_clusters > constraints.max_subcircuits:
        return _Evaluation(False)
    widths = [0] * num_clusters
    cuts: list[tuple[int, int]] = []
    qedges: set[tuple[int, int]] = set()
    last_cluster: dict[int, int] = {}
    last_gate: dict[int, int] = {}
    for v, qubits in enumerate(dag.vertex_qubits):
        c = assignment[v]
        for q in qubits:
            prev = last_cluster.get(q)
            if prev is None:
                widths[c] += 1
            elif prev != c:
                widths[c] += 1
                cuts.append((q, dag.gate_indices[last_gate[q]]))
                qedges.add((prev, c))
            last_cluster[q] = c
            last_gate[q] = v
    if any(w > constraints.max_subcircuit_qubits for w in widths):
        return _Evaluation(False)
    topo = _topo_order(num_clusters, qedges)
    if topo is None:
        return _Evaluation(False)
    widths_topo = tuple(widths[c] for c in topo)
    obj = clustering_objective(widths_topo, len(cuts))
    return _Evaluation(True, len(cuts), tuple(cuts), widths_topo, obj, tuple(topo))


def _make_solution(
    dag: CircuitDag,
    assignment: tuple[int, ...],
    ev: _Evaluation,
    certified: bool,
    nodes: int,
) -> CutSolution:
    return CutSolution(
        num_qubits=dag.circuit.num_qubits,
        assignment=assignment,
        num_cuts=ev.num_cuts,
        cuts=ev.cuts,
        subcircuit_qubits=ev.widths_topo,
        objective=ev.objective,
        certified=certified,
        nodes_explored=nodes,
    )


def enumerate_all_cuts(
    circuit: Circuit, constraints: CutConstraints
) -> list[CutSolution]:
    """Every feasible clustering, sorted by (objective, cuts, assignment).

    Exhaustive over canonical cluster assignments; intended as the ground
    truth for small DAGs (say up to a dozen vertices).
    """
    dag = build_dag(expand_ccx(circuit))
    if dag.num_vertices > 14:
        raise TooLarge(
            f"{dag.num_vertices} DAG vertices; exhaustive enumeration caps at 14"
        )
    out: list[tuple[int, int, tuple[int, ...], _Evaluation]] = []
    nv = dag.num_vertices
    assignment = [0] * nv
    cap = constraints.max_subcircuit_qubits
    max_clusters = constraints.max_subcircuits
    widths = [0] * max_clusters
    last_cluster: dict[int, int] = {}
    succ: list[set[int]] = [set() for _ in range(max_clusters)]
    edge_count: dict[tuple[int, int], int] = {}

    def reaches(a: int, b: int) -> bool:
        stack, seen = [a], {a}
        while stack:
            for y in succ[stack.pop()]:
                if y == b:
                    return True
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        return False

    def recurse(v: int, opened: int):
        if v == nv:
            if opened < 2:
                return
            ev = evaluate_assignment(dag, tuple(assignment), constraints)
            if ev.feasible:
                out.append((ev.objective, ev.num_cuts, tuple(assignment), ev))
            return
        qubits = dag.vertex_qubits[v]
        for c in range(min(opened + 1, max_clusters)):
            new_wires = 0
            new_edges = []
            ok = True
            for q in qubits:
                prev = last_cluster.get(q)
                if prev is None or prev != c:
                    new_wires += 1
                if prev is not None and prev != c:
                    if reaches(c, prev):
                        ok = False
                        break
                    new_edges.append((prev, c))
            if not ok or widths[c] + new_wires > cap:
                continue
            saved = [(q, last_cluster.get(q)) for q in qubits]
            widths[c] += new_wires
            for e in new_edges:
                edge_count[e] = edge_count.get(e, 0) + 1
                succ[e[0]].add(e[1])
            for q in qubits:
                last_cluster[q] = c
            assignment[v] = c
            recurse(v + 1, max(opened, c + 1))
            for q, prev in saved:
                if prev is None:
                    del last_cluster[q]
                else:
                    last_cluster[q] = prev
            widths[c] -= new_wires
            for e in new_edges:
                edge_count[e] -= 1
                if edge_count[e] == 0:
                    del edge_count[e]
                    succ[e[0]].discard(e[1])
        assignment[v] = 0

    recurse(0, 0)
    out.sort(key=lambda t: (t[0], t[1], t[2]))
    return [_make_solution(dag, a, ev, True, 0) for _, _, a, ev in out]


def _bipartition_primer(
    dag: CircuitDag, constraints: CutConstraints
) -> tuple[int, int, tuple[int, ...], _Evaluation] | None:
    """Local search over qubit sides for a 2-cluster split.

    A side label per wire induces a dependency-consistent split: a gate
    lands on the second side when it touches a second-side wire or sits
    downstream of one that does. For two clusters the cost only grows
    with the straddling-wire count, so flipping single wires descends on
    it directly. Restarts grow a connected first side from every wire.
    Returns the best feasible candidate or None.
    """
    cap = constraints.max_subcircuit_qubits
    n = dag.circuit.num_qubits
    nv = dag.num_vertices
    if n < 2 or nv < 2:
        return None

    adjacency: list[set[int]] = [set() for _ in range(n)]
    for qubits in dag.vertex_qubits:
        for a in qubits:
            for b in qubits:
                if a != b:
                    adjacency[a].add(b)

    def score(side: list[int]):
        # forward pass: once a wire has seen a second-side gate, every
        # later gate on it is second-side too (keeps cut data forward)
        tainted = [False] * n
        in_first = []
        for qubits in dag.vertex_qubits:
            second = any(side[q] or tainted[q] for q in qubits)
            in_first.append(not second)
            if second:
                for q in qubits:
                    tainted[q] = True
        size_s = sum(in_first)
        if size_s == 0 or size_s == nv:
            return ((1 << 30, 1 << 30), None, ())
        first_wires: set[int] = set()
        second_wires: set[int] = set()
        for v, flag in enumerate(in_first):
            for q in dag.vertex_qubits[v]:
                (first_wires if flag else second_wires).add(q)
        n1 = len(first_wires)
        n2 = len(second_wires)  # originals plus cut-input ports
        penalty = max(0, n1 - cap) + max(0, n2 - cap)
        cuts = len(first_wires & second_wires)
        if penalty == 0:
            first_label = 0 if in_first[0] else 1
            assignment = tuple(
                (0 if flag else 1) if first_label == 0 else (1 if flag else 0)
                for flag in in_first
            )
            ev = evaluate_assignment(dag, assignment, constraints)
            if ev.feasible:
                return ((0, ev.objective), ev, assignment)
        return ((penalty, clustering_objective((n1, n2), cuts)), None, ())

    def descend(side: list[int]):
        nonlocal best
        current, ev, assignment = score(side)
        if ev is not None:
            cand = (ev.objective, ev.num_cuts, assignment, ev)
            if best is None or cand[:3] < best[:3]:
                best = cand
        for _ in range(4 * n):
            improved = False
            for q in range(n):
                side[q] ^= 1
                trial, ev, assignment = score(side)
                if trial < current:
                    current = trial
                    improved = True
                    if ev is not None:
                        cand = (ev.objective, ev.num_cuts, assignment, ev)
                        if best is None or cand[:3] < best[:3]:
                            best = cand
                    break
                side[q] ^= 1
            if not improved:
                break

    best: tuple[int, int, tuple[int, ...], _Evaluation] | None = None
    grow_cap = min(cap, n - 1)
    for start in range(n):
        # grow a connected first side, preferring wires with the most
        # interactions into it; probe every size that leaves both sides
        # within reach of the cap
        grown = {start}
        order = [start]
        while len(grown) < grow_cap:
            frontier = [
                (len(adjacency[q] & grown), q)
                for q in range(n)
                if q not in grown and adjacency[q] & grown
            ]
            if not frontier:
                break
            frontier.sort(key=lambda t: (-t[0], t[1]))
            pick = frontier[0][1]
            grown.add(pick)
            order.append(pick)
        for size in range(1, len(order) + 1):
            if n - size > cap + 3:
                continue
            side = [1] * n
            for q in order[:size]:
                side[q] = 0
            descend(side)
    half = [0 if q < n // 2 else 1 for q in range(n)]
    descend(half)
    return best


def find_cuts(
    circuit: Circuit,
    constraints: CutConstraints,
    node_budget: int = DEFAULT_NODE_BUDGET,
) -> CutSolution:
    """Best clustering under the constraints.

    Raises NotConnected / WholeCircuitFits / Infeasible. When the node
    budget stops the search early the incumbent is returned with
    certified=False. Ties resolve to fewest cuts, then the
    lexicographically smallest assignment.
    """
    circuit = expand_ccx(circuit)  # cut model wants 1- and 2-qubit gates only
    if not is_fully_connected(circuit):
        raise NotConnected("circuit is not fully connected")
    if circuit.num_qubits <= constraints.max_subcircuit_qubits:
        raise WholeCircuitFits(
            f"{circuit.num_qubits} qubits fit within "
            f"max_subcircuit_qubits={constraints.max_subcircuit_qubits}"
        )
    dag = build_dag(circuit)
    nv = dag.num_vertices

    best: tuple[int, int, tuple[int, ...]] | None = None
    best_ev: _Evaluation | None = None
    primed = _bipartition_primer(dag, constraints)
    if primed is not None:
        best = primed[:3]
        best_ev = primed[3]

    # Branch and bound over canonical assignments in gate order.
    max_clusters = constraints.max_subcircuits
    cap = constraints.max_subcircuit_qubits
    widths = [0] * max_clusters
    assignment = [0] * nv
    last_cluster: dict[int, int] = {}
    qedges: dict[tuple[int, int], int] = {}
    succ: list[set[int]] = [set() for _ in range(max_clusters)]
    nodes = 0
    exhausted = False

    def reaches(a: int, b: int) -> bool:
        if a == b:
            return True
        stack = [a]
        seen = {a}
        while stack:
            x = stack.pop()
            for y in succ[x]:
                if y == b:
                    return True
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        return False

    def lower_bound(k_part: int, opened: int) -> int:
        sizes = sorted(widths[:opened])
        while len(sizes) < 2:
            sizes.append(2)
        total = 0
        prefix = 1
        for c, w in enumerate(sizes):
            prefix *= 2**w
            if c >= 1:
                total += prefix
        return 4**k_part * total

    def dfs(v: int, opened: int, k_part: int):
        nonlocal nodes, exhausted, best, best_ev
        if exhausted:
            return
        if v == nv:
            if opened < 2:
                return
            ev = evaluate_assignment(dag, tuple(assignment), constraints)
            if ev.feasible:
                cand = (ev.objective, ev.num_cuts, tuple(assignment))
                if best is None or cand < best:
                    best = cand
                    best_ev = ev
            return
        qubits = dag.vertex_qubits[v]
        for c in range(min(opened + 1, max_clusters)):
            nodes += 1
            if nodes > node_budget:
                exhausted = True
                return
            new_wires = []
            new_edges = []
            ok = True
            for q in qubits:
                prev = last_cluster.get(q)
                if prev is None or prev != c:
                    new_wires.append(q)
                if prev is not None and prev != c:
                    if reaches(c, prev):
                        ok = False
                        break
                    new_edges.append((prev, c))
            if ok and widths[c] + len(new_wires) > cap:
                ok = False
            if not ok:
                continue
            saved = [(q, last_cluster.get(q)) for q in qubits]
            widths[c] += len(new_wires)
            k_new = k_part + sum(1 for q, prev in saved if prev is not None and prev != c)
            for e in new_edges:
                qedges[e] = qedges.get(e, 0) + 1
                succ[e[0]].add(e[1])
            for q in qubits:
                last_cluster[q] = c
            assignment[v] = c
            if best is None or lower_bound(k_new, max(opened, c + 1)) <= best[0]:
                dfs(v + 1, max(opened, c + 1), k_new)
            for q, prev in saved:
                if prev is None:
                    del last_cluster[q]
                else:
                    last_cluster[q] = prev
            widths[c] -= len(new_wires)
            for e in new_edges:
                qedges[e] -= 1
                if qedges[e] == 0:
                    del qedges[e]
                    succ[e[0]].discard(e[1])
            if exhausted:
                return

    dfs(0, 0, 0)
    if best is None or best_ev is None:
        raise Infeasible("no clustering satisfies the constraints")
    return _make_solution(dag, best[2], best_ev, not exhausted, nodes)


def solution_from_assignment(
    circuit: Circuit, assignment: tuple[int, ...], constraints: CutConstraints
) -> CutSolution:
    """Price a given assignment (e.g. loaded from a file); it must be
    canonical and feasible."""
    dag = build_dag(expand_ccx(circuit))
    if len(assignment) != dag.num_vertices:
        raise InconsistentSolution(
            f"assignment covers {len(assignment)} vertices, DAG has {dag.num_vertices}"
        )
    ev = evaluate_assignment(dag, assignment, constraints)
    if not ev.feasible:
        raise InconsistentSolution("assignment violates the constraints")
    return _make_solution(dag, assignment, ev, True, 0)
