"""Classical execution backends standing in for quantum hardware.

Statevector simulation with qubit 0 as the most significant output bit,
multinomial sampling on top of it, and a seeded random-output backend for
runtime studies at sizes where simulation is beside the point.

``roles`` strings drive binned output: one character per wire, 'A' keeps
the wire at full resolution, 'M' sums it out, '0'/'1' condition on that
measurement outcome. Binned vectors are never renormalized.
"""

from __future__ import annotations

import math

import numpy as np

from .circuit import Circuit
from .errors import LengthMismatch, TooManyQubits

DEFAULT_QUBIT_LIMIT = 26

_H = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_S = np.array([[1, 0], [0, 1j]], dtype=complex)
_T = np.array([[1, 0], [0, np.exp(1j * math.pi / 4)]], dtype=complex)
_SX = 0.5 * np.array([[1 + 1j, 1 - 1j], [1 - 1j, 1 + 1j]], dtype=complex)
_SY = 0.5 * np.array([[1 + 1j, -1 - 1j], [1 + 1j, 1 + 1j]], dtype=complex)
_CX = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
)
_CZ = np.diag([1, 1, 1, -1]).astype(complex)
_CCX = np.eye(8, dtype=complex)
_CCX[6, 6] = _CCX[7, 7] = 0
_CCX[6, 7] = _CCX[7, 6] = 1


def gate_matrix(name: str, param: float | None = None) -> np.ndarray:
    """Unitary matrix for one gate, qubit order as listed in the gate."""
    fixed = {
        "h": _H,
        "x": _X,
        "s": _S,
        "sdg": _S.conj().T,
        "t": _T,
        "tdg": _T.conj().T,
        "sx": _SX,
        "sy": _SY,
        "cx": _CX,
        "cz": _CZ,
        "ccx": _CCX,
    }
    if name in fixed:
        return fixed[name]
    if name == "rz":
        return np.diag([np.exp(-0.5j * param), np.exp(0.5j * param)])
    if name == "cp":
        return np.diag([1, 1, 1, np.exp(1j * param)]).astype(complex)
    raise ValueError(f"no matrix for gate {name!r}")


def statevector(circuit: Circuit, limit: int = DEFAULT_QUBIT_LIMIT) -> np.ndarray:
    """Final state amplitudes as a flat complex vector of length 2^n."""
    n = circuit.num_qubits
    if n > limit:
        raise TooManyQubits(f"{n} qubits exceeds the statevector limit of {limit}")
    state = np.zeros((2,) * n, dtype=complex)
    state[(0,) * n] = 1.0
    for g in circuit.gates:
        k = len(g.qubits)
        u = gate_matrix(g.name, g.param).reshape((2,) * (2 * k))
        axes = list(g.qubits)
        state = np.tensordot(u, state, axes=(list(range(k, 2 * k)), axes))
        state = np.moveaxis(state, list(range(k)), axes)
    return state.reshape(-1)


def probabilities(circuit: Circuit, limit: int = DEFAULT_QUBIT_LIMIT) -> np.ndarray:
    """Exact output distribution, qubit 0 = most significant index bit."""
    amps = statevector(circuit, limit)
    return np.abs(amps) ** 2


def sample_counts(
    probs: np.ndarray, shots: int, rng: np.random.Generator
) -> np.ndarray:
    """Multinomial counts over basis states."""
    return rng.multinomial(shots, probs / probs.sum())


def bin_vector(probs: np.ndarray, roles: str) -> np.ndarray:
    """Project a distribution per roles: keep 'A' wires (ascending order),
    sum 'M' wires, condition on '0'/'1' wires. Output mass equals the mass
    consistent with the conditioned bits; no renormalization."""
    n = len(roles)
    if probs.size != 2**n:
        raise LengthMismatch(f"vector length {probs.size} != 2^{n}")
    arr = probs.reshape((2,) * n)
    index = tuple(int(c) if c in "01" else slice(None) for c in roles)
    arr = arr[index]
    merged_axes = tuple(
        i for i, c in enumerate(c for c in roles if c not in "01") if c == "M"
    )
    if merged_axes:
        arr = arr.sum(axis=merged_axes)
    return np.ascontiguousarray(arr).reshape(-1)


def _child_rng(seed: int, key: tuple[int, ...]) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, *key]))


class ExactBackend:
    """Statevector execution; full distributions are memoized per circuit."""

    name = "exact"

    def __init__(self, limit: int = DEFAULT_QUBIT_LIMIT):
        self.limit = limit
        self._cache: dict[Circuit, np.ndarray] = {}

    def run(self, circuit: Circuit, roles: str, key: tuple[int, ...] = ()) -> np.ndarray:
        probs = self._cache.get(circuit)
        if probs is None:
            probs = probabilities(circuit, self.limit)
            self._cache[circuit] = probs
        return bin_vector(probs, roles)


class ShotsBackend:
    """Multinomial sampling of the exact distribution, deterministic per
    (seed, call key)."""

    name = "shots"

    def __init__(self, shots: int, seed: int = 0, limit: int = DEFAULT_QUBIT_LIMIT):
        if shots < 1:
            raise ValueError("shots must be >= 1")
        self.shots = shots
        self.seed = seed
        self.limit = limit
        self._cache: dict[Circuit, np.ndarray] = {}

    def run(self, circuit: Circuit, roles: str, key: tuple[int, ...] = ()) -> np.ndarray:
        probs = self._cache.get(circuit)
        if probs is None:
            probs = probabilities(circuit, self.limit)
            self._cache[circuit] = probs
        counts = sample_counts(probs, self.shots, _child_rng(self.seed, key))
        return bin_vector(counts / self.shots, roles)


class RandomBackend:
    """Seeded random output of the right shape; replaces execution when only
    postprocessing runtime and memory are under study."""

    name = "random"

    def __init__(self, seed: int = 0):
        self.seed = seed

    def run(self, circuit: Circuit, roles: str, key: tuple[int, ...] = ()) -> np.ndarray:
        kept = roles.count("A")
        vec = _child_rng(self.seed, key).random(2**kept)
        return vec / vec.sum()


def make_backend(
    mode: str, *, shots: int | None = None, seed: int = 0, limit: int = DEFAULT_QUBIT_LIMIT
):
    if mode == "exact":
        return ExactBackend(limit)
    if mode == "shots":
        return ShotsBackend(shots or 10_000, seed, limit)
    if mode == "random":
        return RandomBackend(seed)
    raise ValueError(f"unknown backend mode {mode!r}")
