"""Distribution-distance metrics and the ground-truth comparison harness.

The chi-square distance here is the symmetric form over paired elements,
sum of (a_i - b_i)^2 / (a_i + b_i) with empty-support terms dropped; it
ranges over [0, 2] for probability vectors.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .circuit import Circuit
from .errors import LengthMismatch
from .sim import DEFAULT_QUBIT_LIMIT, probabilities


def chi_square(a: np.ndarray, b: np.ndarray) -> float:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise LengthMismatch(f"shapes {a.shape} and {b.shape} differ")
    num = (a - b) ** 2
    den = a + b
    mask = den > 0
    return float((num[mask] / den[mask]).sum())


@dataclass(frozen=True)
class ComparisonReport:
    chi_square: float
    l_inf: float
    total_variation: float
    n: int
    notes: str = ""


def compare(a: np.ndarray, b: np.ndarray, notes: str = "") -> ComparisonReport:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise LengthMismatch(f"shapes {a.shape} and {b.shape} differ")
    diff = np.abs(a - b)
    n = int(a.size).bit_length() - 1
    return ComparisonReport(
        chi_square=chi_square(a, b),
        l_inf=float(diff.max()) if diff.size else 0.0,
        total_variation=float(diff.sum() / 2),
        n=n,
        notes=notes,
    )


def oracle_compare(
    circuit: Circuit, produced: np.ndarray, limit: int = DEFAULT_QUBIT_LIMIT
) -> ComparisonReport:
    """Compare a produced distribution against the uncut simulation."""
    truth = probabilities(circuit, limit)
    produced = np.asarray(produced, dtype=float)
    if produced.shape != truth.shape:
        raise LengthMismatch(
            f"produced length {produced.size} != 2^{circuit.num_qubits}"
        )
    return compare(produced, truth, notes="vs uncut simulation")
