"""Statevector backend, binned outputs, and the sampling/random stand-ins."""

import math
import random

import numpy as np
import pytest

from wirecut import (
    Circuit,
    ExactBackend,
    Gate,
    RandomBackend,
    ShotsBackend,
    bin_vector,
    make_backend,
    parse_circuit,
    probabilities,
    sample_counts,
    statevector,
)
from wirecut.errors import LengthMismatch, TooManyQubits
from wirecut.sim import gate_matrix

from _families import random_planted


def test_single_h():
    probs = probabilities(Circuit(1, (Gate("h", (0,)),)))
    assert np.allclose(probs, [0.5, 0.5])


def test_bell_pair():
    probs = probabilities(parse_circuit("qubits 2\nh 0\ncx 0 1\n"))
    assert np.allclose(probs, [0.5, 0, 0, 0.5], atol=1e-12)


def test_qubit_zero_is_most_significant():
    # x on qubit 0 of a 2-qubit register lands on index 0b10
    probs = probabilities(Circuit(2, (Gate("x", (0,)),)))
    assert probs[2] == pytest.approx(1.0)
    probs = probabilities(Circuit(2, (Gate("x", (1,)),)))
    assert probs[1] == pytest.approx(1.0)


def test_gate_matrices_are_unitary():
    for name, param in [
        ("h", None), ("x", None), ("s", None), ("sdg", None), ("t", None),
        ("tdg", None), ("sx", None), ("sy", None), ("cx", None), ("cz", None),
        ("ccx", None), ("rz", 0.7), ("cp", 1.3),
    ]:
        u = gate_matrix(name, param)
        assert np.allclose(u @ u.conj().T, np.eye(u.shape[0]), atol=1e-12)
    assert np.allclose(gate_matrix("sx") @ gate_matrix("sx"), gate_matrix("x"))


def _dense_oracle(circuit: Circuit) -> np.ndarray:
    """Gate-by-gate full-matrix simulation; qubit 0 most significant."""
    n = circuit.num_qubits
    state = np.zeros(2**n, dtype=complex)
    state[0] = 1.0
    for g in circuit.gates:
        k = len(g.qubits)
        small = gate_matrix(g.name, g.param)
        full = np.zeros((2**n, 2**n), dtype=complex)
        for row in range(2**n):
            bits = [(row >> (n - 1 - q)) & 1 for q in range(n)]
            sub_in = 0
            for q in g.qubits:
                sub_in = (sub_in << 1) | bits[q]
            for sub_out in range(2**k):
                amp = small[sub_out, sub_in]
                if amp == 0:
                    continue
                out_bits = list(bits)
                for pos, q in enumerate(g.qubits):
                    out_bits[q] = (sub_out >> (k - 1 - pos)) & 1
                col = 0
                for b in out_bits:
                    col = (col << 1) | b
                full[col, row] += amp
        state = full @ state
    return state


def test_statevector_matches_dense_matrix_oracle():
    for seed in range(30):
        circuit, _ = random_planted(seed)
        if circuit.num_qubits > 6:
            continue
        got = statevector(circuit)
        want = _dense_oracle(circuit)
        assert np.max(np.abs(got - want)) < 1e-12


def test_statevector_qubit_limit():
    with pytest.raises(TooManyQubits):
        statevector(Circuit(4, (Gate("h", (0,)),)), limit=3)


def test_probability_vectors_are_normalized():
    for seed in range(20):
        circuit, _ = random_planted(seed)
        if circuit.num_qubits > 10:
            continue
        probs = probabilities(circuit)
        assert probs.min() >= 0
        assert probs.sum() == pytest.approx(1.0, abs=1e-9)


def test_bin_vector_examples():
    probs = np.array([0.1, 0.2, 0.3, 0.4])  # [p00, p01, p10, p11]
    assert np.allclose(bin_vector(probs, "AM"), [0.3, 0.7])
    assert np.allclose(bin_vector(probs, "MA"), [0.4, 0.6])
    assert np.allclose(bin_vector(probs, "1A"), [0.3, 0.4])
    assert np.allclose(bin_vector(probs, "A0"), [0.1, 0.3])
    assert np.allclose(bin_vector(probs, "MM"), [1.0])
    assert np.allclose(bin_vector(probs, "AA"), probs)
    with pytest.raises(LengthMismatch):
        bin_vector(probs, "AAA")


def test_bin_vector_zoom_patterns_partition_the_mass():
    circuit, _ = random_planted(4)
    probs = probabilities(circuit)
    n = circuit.num_qubits
    # fix two wires, sum the rest: the four settings partition all mass
    total = 0.0
    for b0 in "01":
        for b1 in "01":
            roles = b0 + b1 + "M" * (n - 2)
            total += bin_vector(probs, roles)[0]
    assert total == pytest.approx(1.0, abs=1e-9)


def test_exact_backend_all_active_equals_probabilities():
    circuit, _ = random_planted(6)
    backend = ExactBackend()
    got = backend.run(circuit, "A" * circuit.num_qubits)
    assert np.array_equal(got, probabilities(circuit))
    # memoization: the second call reuses the cached distribution
    assert backend.run(circuit, "M" * circuit.num_qubits)[0] == pytest.approx(1.0)


def test_sample_counts_total():
    rng = np.random.default_rng(0)
    counts = sample_counts(np.array([0.25, 0.75]), 1000, rng)
    assert counts.sum() == 1000


def test_shots_backend_is_deterministic_per_key():
    from wirecut import gen_aqft

    circuit = gen_aqft(4)  # uniform output, so key changes must show
    roles = "A" * circuit.num_qubits
    b1 = ShotsBackend(shots=2000, seed=5)
    b2 = ShotsBackend(shots=2000, seed=5)
    first = b1.run(circuit, roles, key=(0, 1))
    assert np.array_equal(first, b2.run(circuit, roles, key=(0, 1)))
    assert not np.array_equal(first, b1.run(circuit, roles, key=(0, 2)))
    with pytest.raises(ValueError):
        ShotsBackend(shots=0)


def test_shots_backend_converges_to_truth():
    circuit, _ = random_planted(9)
    shots = 200_000
    got = ShotsBackend(shots=shots, seed=1).run(circuit, "A" * circuit.num_qubits)
    truth = probabilities(circuit)
    assert got.sum() == pytest.approx(1.0, abs=1e-12)
    # binomial 5-sigma envelope per state
    bound = 5 * np.sqrt(np.maximum(truth * (1 - truth), 1e-12) / shots)
    assert np.all(np.abs(got - truth) <= bound + 1e-9)


def test_random_backend_shape_and_determinism():
    circuit = Circuit(6, (Gate("h", (0,)),))
    backend = RandomBackend(seed=3)
    vec = backend.run(circuit, "AAMM0A", key=(1,))
    assert vec.size == 2**3  # one entry per A wire pattern
    assert vec.sum() == pytest.approx(1.0)
    assert np.all(vec >= 0)
    assert np.array_equal(vec, RandomBackend(seed=3).run(circuit, "AAMM0A", key=(1,)))
    assert not np.array_equal(vec, backend.run(circuit, "AAMM0A", key=(2,)))


def test_make_backend_dispatch():
    assert make_backend("exact").name == "exact"
    assert make_backend("shots", shots=10).name == "shots"
    assert make_backend("random", seed=1).name == "random"
    with pytest.raises(ValueError):
        make_backend("quantum")


def test_diagonal_gates_leave_probabilities_uniform():
    # diagonal gates cannot move probability after a uniform h layer
    gates = [Gate("h", (q,)) for q in range(3)]
    gates += [Gate("rz", (0,), 0.3), Gate("cp", (0, 1), 1.1), Gate("t", (2,))]
    probs = probabilities(Circuit(3, tuple(gates)))
    assert np.allclose(probs, 1 / 8)


def test_statevector_rz_phase():
    # rz(pi) on |+> flips it to |->; interference check through a second h
    c = Circuit(1, (Gate("h", (0,)), Gate("rz", (0,), math.pi), Gate("h", (0,))))
    probs = probabilities(c)
    assert probs[1] == pytest.approx(1.0, abs=1e-12)
