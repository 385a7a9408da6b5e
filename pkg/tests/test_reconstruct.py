"""Reconstruction plans, the Kronecker kernel, and the full-distribution path."""

import numpy as np
import pytest

from wirecut import (
    CutConstraints,
    ExactBackend,
    Gate,
    Circuit,
    build_plan,
    build_tensors,
    contract_all,
    enumerate_variants,
    estimate_cost,
    find_cuts,
    probabilities,
    reconstruct_fd,
    split,
    sub_roles,
)
from wirecut.errors import (
    MissingTensor,
    NegativeMass,
    NormalizationFailure,
    ResourceGuard,
)
from wirecut.reconstruct import ReconstructionPlan

from _families import five_qubit_golden, sweep_corpus


def _run_split(circuit, constraints):
    solution = find_cuts(circuit, constraints)
    sp = split(circuit, solution)
    backend = ExactBackend()
    raw = {
        sub.index: {
            v.index: backend.run(v.circuit, "A" * sub.num_wires)
            for v in enumerate_variants(sub)
        }
        for sub in sp.subcircuits
    }
    return solution, sp, raw


def test_plan_layout_for_golden():
    _, sp, _ = _run_split(five_qubit_golden(), CutConstraints(3, 2))
    plan = build_plan(sp)
    assert plan.num_qubits == 5
    assert plan.num_cuts == 1
    assert plan.kept_widths == (3, 3)
    assert plan.sub_axes[0] == (("qubit", 0), ("qubit", 1), ("port", 0))
    assert plan.sub_axes[1] == (("qubit", 2), ("qubit", 3), ("qubit", 4))
    assert plan.permutation == (0, 1, 2, 3, 4)
    assert plan.out_qubits == (0, 1, 2, 3, 4)
    assert estimate_cost(plan) == 256


def test_plan_respects_roles():
    _, sp, _ = _run_split(five_qubit_golden(), CutConstraints(3, 2))
    plan = build_plan(sp, "MA01A")
    # merged/zoomed qubits drop out; port axes always stay
    assert plan.kept_widths == (2, 1)
    assert plan.out_qubits == (1, 4)
    assert sub_roles(sp.subcircuits[0], "MA01A") == "MAA"
    assert sub_roles(sp.subcircuits[1], "MA01A") == "01A"
    with pytest.raises(ValueError):
        build_plan(sp, "AAA")


def test_contract_all_matches_oracle_and_cost_model():
    circuit = five_qubit_golden()
    _, sp, raw = _run_split(circuit, CutConstraints(3, 2))
    plan = build_plan(sp)
    tensors = build_tensors(sp, raw, plan)
    total, mult, terms = contract_all(plan, tensors)
    assert terms == 4
    assert mult == estimate_cost(plan) == 256
    assert np.max(np.abs(total - probabilities(circuit))) < 1e-10


def test_tensor_cache_shares_untouched_assignments():
    shared = 0
    for circuit, constraints, solution in sweep_corpus()[:60]:
        if solution.num_cuts < 2:
            continue
        sp = split(circuit, solution)
        partial = [
            sub for sub in sp.subcircuits
            if len({p.cut_id for p in (*sub.input_ports, *sub.output_ports)})
            < sp.num_cuts
        ]
        if not partial:
            continue
        backend = ExactBackend()
        raw = {
            sub.index: {
                v.index: backend.run(v.circuit, "A" * sub.num_wires)
                for v in enumerate_variants(sub)
            }
            for sub in sp.subcircuits
        }
        plan = build_plan(sp)
        tensors = build_tensors(sp, raw, plan)
        sub = partial[0]
        touched = {p.cut_id for p in (*sub.input_ports, *sub.output_ports)}
        free = next(c for c in range(sp.num_cuts) if c not in touched)
        base = ["I"] * sp.num_cuts
        k1 = list(base)
        k2 = list(base)
        k1[free] = "X"
        k2[free] = "Y"
        assert tensors[(sub.index, tuple(k1))] is tensors[(sub.index, tuple(k2))]
        shared += 1
        if shared >= 3:
            break
    assert shared >= 1


def test_missing_tensor():
    _, sp, raw = _run_split(five_qubit_golden(), CutConstraints(3, 2))
    plan = build_plan(sp)
    tensors = build_tensors(sp, raw, plan)
    del tensors[(1, ("Y",))]
    with pytest.raises(MissingTensor):
        contract_all(plan, tensors)
    tensors = build_tensors(sp, raw, plan)
    tensors[(1, ("Y",))] = np.zeros(4)  # wrong width
    with pytest.raises(MissingTensor):
        contract_all(plan, tensors)


def test_reconstruct_fd_golden():
    circuit = five_qubit_golden()
    _, sp, raw = _run_split(circuit, CutConstraints(3, 2))
    plan = build_plan(sp)
    result = reconstruct_fd(plan, build_tensors(sp, raw, plan))
    assert result.terms == 4
    assert result.multiplies == 256
    assert result.raw_sum == pytest.approx(1.0, abs=1e-9)
    assert np.max(np.abs(result.values - probabilities(circuit))) < 1e-10


def test_reconstruct_fd_guards():
    circuit = five_qubit_golden()
    _, sp, raw = _run_split(circuit, CutConstraints(3, 2))
    plan = build_plan(sp)
    tensors = build_tensors(sp, raw, plan)
    with pytest.raises(ResourceGuard):
        reconstruct_fd(plan, tensors, max_qubits=4)
    uncut_plan = ReconstructionPlan(
        num_qubits=2, num_cuts=0, num_subcircuits=1,
        sub_kept_wires=((0, 1),), sub_axes=((("qubit", 0), ("qubit", 1)),),
        permutation=(0, 1), out_qubits=(0, 1),
    )
    with pytest.raises(ValueError):
        reconstruct_fd(uncut_plan, {})


def test_reconstruct_fd_detects_corrupt_inputs():
    circuit = five_qubit_golden()
    _, sp, raw = _run_split(circuit, CutConstraints(3, 2))
    plan = build_plan(sp)

    flipped = {0: dict(raw[0]), 1: dict(raw[1])}
    flipped[1][1] = -flipped[1][1]  # one-init variant with flipped sign
    with pytest.raises(NegativeMass):
        reconstruct_fd(plan, build_tensors(sp, flipped, plan))

    inflated = {0: dict(raw[0]), 1: dict(raw[1])}
    inflated[1][0] = 1.5 * inflated[1][0]
    with pytest.raises(NormalizationFailure):
        reconstruct_fd(
            plan, build_tensors(sp, inflated, plan), clip_tol=float("inf")
        )


def test_renormalize_rescales_clipped_mass():
    circuit = five_qubit_golden()
    _, sp, raw = _run_split(circuit, CutConstraints(3, 2))
    plan = build_plan(sp)
    inflated = {0: dict(raw[0]), 1: dict(raw[1])}
    inflated[1][0] = 1.5 * inflated[1][0]
    result = reconstruct_fd(
        plan, build_tensors(sp, inflated, plan), clip_tol=float("inf"),
        renormalize=True,
    )
    assert result.values.sum() == pytest.approx(1.0, abs=1e-12)
    assert result.raw_sum != pytest.approx(1.0, abs=1e-3)


def test_threaded_contraction_is_deterministic():
    for circuit, constraints, solution in sweep_corpus()[:30]:
        if solution.num_cuts < 2:
            continue
        sp = split(circuit, solution)
        backend = ExactBackend()
        raw = {
            sub.index: {
                v.index: backend.run(v.circuit, "A" * sub.num_wires)
                for v in enumerate_variants(sub)
            }
            for sub in sp.subcircuits
        }
        plan = build_plan(sp)
        tensors = build_tensors(sp, raw, plan)
        serial, mult1, _ = contract_all(plan, tensors, threads=1)
        first, mult3, _ = contract_all(plan, tensors, threads=3)
        second, _, _ = contract_all(plan, tensors, threads=3)
        assert mult1 == mult3
        assert np.array_equal(first, second)  # same thread count: bit-exact
        assert np.allclose(first, serial, atol=1e-12)
        break


def test_relabeling_qubits_permutes_the_distribution():
    circuit = five_qubit_golden()
    relabel = {0: 4, 4: 0, 1: 1, 2: 2, 3: 3}
    mapped = Circuit(
        5,
        tuple(
            Gate(g.name, tuple(relabel[q] for q in g.qubits), g.param)
            for g in circuit.gates
        ),
    )

    def fd(circ):
        _, sp, raw = _run_split(circ, CutConstraints(3, 2))
        plan = build_plan(sp)
        return reconstruct_fd(plan, build_tensors(sp, raw, plan)).values

    base = fd(circuit)
    swapped = fd(mapped)
    n = 5
    for idx in range(2**n):
        bits = format(idx, f"05b")
        target = "".join(bits[relabel[q]] for q in range(n))
        assert swapped[idx] == pytest.approx(base[int(target, 2)], abs=1e-10)
