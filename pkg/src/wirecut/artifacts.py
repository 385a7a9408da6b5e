"""On-disk artifact formats for run directories.

Distributions are binary: an 8-byte magic, a little-endian u32 format
version, a little-endian u32 qubit count, then 2^n little-endian 64-bit
reals. Everything else is canonical JSON (sorted keys, 2-space indent,
trailing newline) so identical runs produce byte-identical files.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

from .circuit import Circuit, parse_circuit, serialize_circuit
from .cutsearch import CutSolution
from .errors import LengthMismatch, WirecutError
from .variants import Port, SplitCircuit, Subcircuit, WireCut, enumerate_variants

DIST_MAGIC = b"WCDIST01"
DIST_VERSION = 1


def write_distribution(path: str | Path, values: np.ndarray) -> None:
    values = np.asarray(values, dtype="<f8")
    n = values.size.bit_length() - 1
    if values.size != 2**n:
        raise LengthMismatch(f"distribution length {values.size} is not a power of 2")
    with open(path, "wb") as fh:
        fh.write(DIST_MAGIC)
        fh.write(struct.pack("<II", DIST_VERSION, n))
        fh.write(values.tobytes())


def read_distribution(path: str | Path) -> np.ndarray:
    with open(path, "rb") as fh:
        magic = fh.read(8)
        if magic != DIST_MAGIC:
            raise WirecutError(f"{path}: not a distribution file (bad magic)")
        version, n = struct.unpack("<II", fh.read(8))
        if version != DIST_VERSION:
            raise WirecutError(f"{path}: unsupported format version {version}")
        data = fh.read()
    values = np.frombuffer(data, dtype="<f8")
    if values.size != 2**n:
        raise LengthMismatch(
            f"{path}: header says {2**n} entries, file holds {values.size}"
        )
    return values.astype(float)


def _jsonable(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not JSON serializable: {type(obj).__name__}")


def canonical_dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, default=_jsonable) + "\n"


def write_json(path: str | Path, obj) -> None:
    Path(path).write_text(canonical_dumps(obj))


def read_json(path: str | Path):
    return json.loads(Path(path).read_text())


def solution_to_dict(solution: CutSolution) -> dict:
    return {
        "num_qubits": solution.num_qubits,
        "assignment": list(solution.assignment),
        "num_cuts": solution.num_cuts,
        "cuts": [list(c) for c in solution.cuts],
        "subcircuit_qubits": list(solution.subcircuit_qubits),
        "objective": solution.objective,
        "log2_objective": solution.log2_objective,
        "certified": solution.certified,
        "nodes_explored": solution.nodes_explored,
    }


def solution_from_dict(data: dict) -> CutSolution:
    return CutSolution(
        num_qubits=int(data["num_qubits"]),
        assignment=tuple(int(a) for a in data["assignment"]),
        num_cuts=int(data["num_cuts"]),
        cuts=tuple((int(q), int(g)) for q, g in data["cuts"]),
        subcircuit_qubits=tuple(int(w) for w in data["subcircuit_qubits"]),
        objective=int(data["objective"]),
        certified=bool(data["certified"]),
        nodes_explored=int(data.get("nodes_explored", 0)),
    )


def split_manifest(split_result: SplitCircuit, include_variants: bool = True) -> dict:
    """Variant manifest: subcircuit structure plus every variant's labels.

    Circuit texts are stored inline so a manifest alone rebuilds the split.
    """
    subs = []
    for sub in split_result.subcircuits:
        entry = {
            "index": sub.index,
            "num_wires": sub.num_wires,
            "circuit": serialize_circuit(sub.circuit),
            "origin": list(sub.origin),
            "input_ports": [[p.cut_id, p.wire] for p in sub.input_ports],
            "output_ports": [
                [p.cut_id, p.wire, p.after_gate] for p in sub.output_ports
            ],
        }
        if include_variants:
            entry["variants"] = [
                {
                    "id": f"s{sub.index}v{v.index}",
                    "parent": v.parent,
                    "index": v.index,
                    "inits": list(v.inits),
                    "meas": list(v.meas),
                    "input_wires": [p.wire for p in sub.input_ports],
                    "output_wires": [p.wire for p in sub.output_ports],
                }
                for v in enumerate_variants(sub)
            ]
        subs.append(entry)
    return {
        "num_qubits": split_result.num_qubits,
        "num_cuts": split_result.num_cuts,
        "cuts": [[c.cut_id, c.qubit, c.upstream_gate] for c in split_result.cuts],
        "subcircuits": subs,
    }


def split_from_manifest(data: dict) -> SplitCircuit:
    subs = []
    for entry in data["subcircuits"]:
        subs.append(
            Subcircuit(
                index=int(entry["index"]),
                circuit=parse_circuit(entry["circuit"]),
                origin=tuple(int(q) for q in entry["origin"]),
                input_ports=tuple(
                    Port(int(c), int(w)) for c, w in entry["input_ports"]
                ),
                output_ports=tuple(
                    Port(int(c), int(w), int(g)) for c, w, g in entry["output_ports"]
                ),
            )
        )
    cuts = tuple(
        WireCut(int(cid), int(q), int(g)) for cid, q, g in data["cuts"]
    )
    return SplitCircuit(int(data["num_qubits"]), tuple(subs), cuts)


def write_circuit(path: str | Path, circuit: Circuit) -> None:
    Path(path).write_text(serialize_circuit(circuit))


def read_circuit(path: str | Path) -> Circuit:
    return parse_circuit(Path(path).read_text())


def write_raw_outputs(path: str | Path, raw: dict[int, dict[int, np.ndarray]], meta: dict) -> None:
    payload = dict(meta)
    payload["outputs"] = {
        str(si): {str(vi): vec.tolist() for vi, vec in vecs.items()}
        for si, vecs in raw.items()
    }
    write_json(path, payload)


def read_raw_outputs(path: str | Path) -> tuple[dict[int, dict[int, np.ndarray]], dict]:
    data = read_json(path)
    raw = {
        int(si): {int(vi): np.asarray(vec, dtype=float) for vi, vec in vecs.items()}
        for si, vecs in data.pop("outputs").items()
    }
    return raw, data
