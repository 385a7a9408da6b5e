"""Benchmark circuit families: hidden-string search, ripple-carry adder,
approximate Fourier transform, and random grid sampling circuits.

All generators are deterministic given their arguments (the grid family
takes a seed for its single-qubit layers).
"""

from __future__ import annotations

import math
import random

from .circuit import Circuit, Gate


def gen_bv(num_qubits: int, hidden: str) -> Circuit:
    """Hidden-string search circuit on ``num_qubits`` wires.

    The hidden string has ``num_qubits - 1`` bits; the last wire is the
    phase ancilla. The final layer of h gates includes the ancilla, so the
    noiseless output is the single state ``hidden + '1'`` with probability 1.
    """
    n = num_qubits
    if n < 2:
        raise ValueError("need at least 2 qubits")
    if len(hidden) != n - 1 or any(c not in "01" for c in hidden):
        raise ValueError(f"hidden string must be {n - 1} bits of 0/1")
    anc = n - 1
    gates: list[Gate] = [Gate("x", (anc,))]
    gates.extend(Gate("h", (q,)) for q in range(n))
    gates.extend(Gate("cx", (i, anc)) for i, c in enumerate(hidden) if c == "1")
    gates.extend(Gate("h", (q,)) for q in range(n))
    return Circuit(n, tuple(gates))


def _maj(a: int, b: int, c: int) -> list[Gate]:
    return [Gate("cx", (c, b)), Gate("cx", (c, a)), Gate("ccx", (a, b, c))]


def _uma(a: int, b: int, c: int) -> list[Gate]:
    return [Gate("ccx", (a, b, c)), Gate("cx", (c, a)), Gate("cx", (a, b))]


def gen_adder(num_qubits: int, a: int = 0, b: int = 0) -> Circuit:
    """Ripple-carry adder on ``num_qubits = 2w + 2`` wires.

    Wire layout: ancilla carry-in, then b0, a0, b1, a1, ..., then carry-out.
    Computes b <- a + b with the carry in the last wire; the a register and
    the ancilla are restored. Nonzero operand values prepend x gates.
    """
    n = num_qubits
    if n < 4 or n % 2:
        raise ValueError("adder needs an even qubit count >= 4")
    w = (n - 2) // 2
    if not (0 <= a < 2**w and 0 <= b < 2**w):
        raise ValueError(f"operands must fit in {w} bits")
    anc = 0
    bq = [1 + 2 * i for i in range(w)]
    aq = [2 + 2 * i for i in range(w)]
    carry = n - 1
    gates: list[Gate] = []
    gates.extend(Gate("x", (aq[i],)) for i in range(w) if (a >> i) & 1)
    gates.extend(Gate("x", (bq[i],)) for i in range(w) if (b >> i) & 1)
    chain = [anc] + [aq[i] for i in range(w)]
    for i in range(w):
        gates.extend(_maj(chain[i], bq[i], aq[i]))
    gates.append(Gate("cx", (aq[w - 1], carry)))
    for i in reversed(range(w)):
        gates.extend(_uma(chain[i], bq[i], aq[i]))
    return Circuit(n, tuple(gates))


def adder_wires(num_qubits: int) -> dict[str, list[int] | int]:
    """Wire roles for gen_adder's layout (b bits are little-endian)."""
    w = (num_qubits - 2) // 2
    return {
        "ancilla": 0,
        "b": [1 + 2 * i for i in range(w)],
        "a": [2 + 2 * i for i in range(w)],
        "carry": num_qubits - 1,
    }


def default_aqft_degree(num_qubits: int) -> int:
    return int(math.ceil(math.log2(num_qubits))) + 2 if num_qubits > 1 else 1


def gen_aqft(num_qubits: int, degree: int | None = None) -> Circuit:
    """Approximate Fourier transform: controlled-phase gates cp(pi/2^d)
    are kept only for wire distances d <= degree."""
    n = num_qubits
    if degree is None:
        degree = default_aqft_degree(n)
    if degree < 1:
        raise ValueError("degree must be >= 1")
    gates: list[Gate] = []
    for i in range(n):
        gates.append(Gate("h", (i,)))
        for j in range(i + 1, min(n, i + degree + 1)):
            d = j - i
            gates.append(Gate("cp", (j, i), math.pi / 2**d))
    return Circuit(n, tuple(gates))


# Grid coupler activation patterns: horizontal and vertical edge classes,
# each split by the parity of the other coordinate. Patterns empty on a
# given grid are skipped so every layer applies at least one cz.
_PATTERNS = ("v0e", "v0o", "h0e", "h0o", "h1e", "h1o", "v1e", "v1o")


def _pattern_edges(rows: int, cols: int, pattern: str) -> list[tuple[int, int]]:
    edges = []
    horizontal = pattern[0] == "h"
    start_parity = int(pattern[1])
    other_even = pattern[2] == "e"
    if horizontal:
        for r in range(rows):
            if (r % 2 == 0) != other_even:
                continue
            for c in range(start_parity, cols - 1, 2):
                edges.append((r * cols + c, r * cols + c + 1))
    else:
        for r in range(start_parity, rows - 1, 2):
            for c in range(cols):
                if (c % 2 == 0) != other_even:
                    continue
                edges.append((r * cols + c, (r + 1) * cols + c))
    return edges


def gen_supremacy(rows: int, cols: int, depth: int = 10, seed: int = 0) -> Circuit:
    """Random grid sampling circuit: h layer, then ``depth`` cz layers
    cycling the grid coupler patterns, with a seeded random single-qubit
    gate from {t, sx, sy} on every wire between cz layers (never the same
    gate twice in a row on a wire). Grid dimensions may differ by at most 2.
    """
    if rows < 1 or cols < 1 or rows * cols < 2:
        raise ValueError("grid needs at least 2 sites")
    if abs(rows - cols) > 2:
        raise ValueError("grid dimensions may differ by at most 2")
    if depth < 1:
        raise ValueError("depth must be >= 1")
    n = rows * cols
    layers = [p for p in _PATTERNS if _pattern_edges(rows, cols, p)]
    rng = random.Random(seed)
    last: dict[int, str] = {}
    gates: list[Gate] = [Gate("h", (q,)) for q in range(n)]
    for layer in range(depth):
        if layer > 0:
            for q in range(n):
                choices = [g for g in ("t", "sx", "sy") if g != last.get(q)]
                pick = rng.choice(choices)
                last[q] = pick
                gates.append(Gate(pick, (q,)))
        for a, b in _pattern_edges(rows, cols, layers[layer % len(layers)]):
            gates.append(Gate("cz", (a, b)))
    return Circuit(n, tuple(gates))
