"""Command line workflow tests: subcommand round trips, exit codes, file
formats, and run-to-run determinism."""

import json
import struct

import numpy as np
import pytest
import yaml

from wirecut import probabilities, serialize_circuit
from wirecut.artifacts import (
    DIST_MAGIC,
    read_distribution,
    read_json,
    write_distribution,
)
from wirecut.cli import exit_code_for, main
from wirecut.errors import (
    Infeasible,
    NegativeMass,
    PipelineError,
    ResourceGuard,
    WirecutError,
)
from wirecut.pipeline import config_from_mapping, run_pipeline, scaling_report

from _families import five_qubit_golden


@pytest.fixture
def golden_file(tmp_path):
    path = tmp_path / "golden.txt"
    path.write_text(serialize_circuit(five_qubit_golden()))
    return str(path)


def _write_config(tmp_path, name, data):
    path = tmp_path / name
    path.write_text(yaml.safe_dump(data))
    return str(path)


def test_generate_emits_parseable_circuit(tmp_path, capsys):
    out = tmp_path / "bv.txt"
    assert main(["generate", "bv", "--qubits", "6", "-o", str(out)]) == 0
    from wirecut import parse_circuit

    circuit = parse_circuit(out.read_text())
    assert circuit.num_qubits == 6
    # default hidden string is all ones; the ancilla reads 1 as well
    assert probabilities(circuit)[2**6 - 1] == pytest.approx(1.0, abs=1e-12)

    assert main(["generate", "aqft", "--qubits", "4"]) == 0
    stdout = capsys.readouterr().out
    assert stdout.startswith("qubits 4")


def test_workflow_round_trip(tmp_path, golden_file, capsys):
    rundir = tmp_path / "run"
    assert main(
        ["cut", golden_file, "--max-qubits", "3", "--max-subcircuits", "2",
         "-o", str(rundir)]
    ) == 0
    assert (rundir / "cut.json").exists()
    assert (rundir / "manifest.json").exists()
    assert (rundir / "subcircuits" / "sub0.txt").exists()
    assert (rundir / "subcircuits" / "sub1.txt").exists()
    cut = read_json(rundir / "cut.json")
    assert cut["num_cuts"] == 1
    assert cut["objective"] == 256
    assert cut["subcircuit_qubits"] == [3, 3]

    assert main(["run", str(rundir)]) == 0
    assert (rundir / "raw.json").exists()

    assert main(["reconstruct", str(rundir)]) == 0
    recon = read_json(rundir / "recon.json")
    assert recon["num_qubits"] == 5
    assert recon["num_cuts"] == 1
    assert recon["multiplies"] == 256
    assert recon["sum"] == pytest.approx(1.0, abs=1e-9)

    values = read_distribution(rundir / "dist.bin")
    truth = probabilities(five_qubit_golden())
    assert np.abs(values - truth).max() <= 1e-8

    capsys.readouterr()
    assert main(["verify", golden_file, str(rundir / "dist.bin")]) == 0
    assert "chi_square=" in capsys.readouterr().out


def test_usage_errors_exit_one(tmp_path, golden_file):
    assert main(["frobnicate"]) == 1  # unknown subcommand
    assert main(["cut", str(tmp_path / "missing.txt")]) == 1
    assert main(["generate", "bv"]) == 1  # bv without --qubits
    assert main(["cut", golden_file, "--max-qubits", "notanint"]) == 1


def test_infeasible_requests_exit_two(golden_file):
    # whole circuit fits: nothing to cut
    assert main(["cut", golden_file, "--max-qubits", "5",
                 "--max-subcircuits", "2"]) == 2
    # cap too small for any clustering
    assert main(["cut", golden_file, "--max-qubits", "2",
                 "--max-subcircuits", "2"]) == 2


def test_verification_failure_exits_three(tmp_path, golden_file):
    bad = tmp_path / "bad.bin"
    write_distribution(bad, np.full(32, 1.0 / 32))
    assert main(["verify", golden_file, str(bad)]) == 3

    truncated = tmp_path / "trunc.bin"
    truncated.write_bytes(b"NOTMAGIC" + b"\x00" * 8)
    assert main(["verify", golden_file, str(truncated)]) == 3


def test_resource_guard_exits_four(tmp_path, golden_file):
    cfg = _write_config(
        tmp_path,
        "guard.yaml",
        {
            "circuit": golden_file,
            "constraints": {"max_subcircuit_qubits": 3, "max_subcircuits": 2},
            "fd_limit": 3,
        },
    )
    assert main(["pipeline", cfg]) == 4


def test_exit_code_mapping_unwraps_pipeline_errors():
    assert exit_code_for(ResourceGuard("x")) == 4
    assert exit_code_for(PipelineError("reconstruct", ResourceGuard("x"))) == 4
    assert exit_code_for(PipelineError("cut", Infeasible("x"))) == 2
    assert exit_code_for(NegativeMass("x")) == 3
    assert exit_code_for(ValueError("x")) == 1
    assert exit_code_for(WirecutError("x")) == 3


def test_distribution_file_byte_layout(tmp_path):
    path = tmp_path / "d.bin"
    values = np.array([0.5, 0.25, 0.125, 0.125])
    write_distribution(path, values)
    blob = path.read_bytes()
    assert blob[:8] == DIST_MAGIC == b"WCDIST01"
    version, n = struct.unpack("<II", blob[8:16])
    assert version == 1 and n == 2
    assert blob[16:] == values.astype("<f8").tobytes()
    assert len(blob) == 16 + 4 * 8
    assert (read_distribution(path) == values).all()


def test_pipeline_reports_golden_facts(tmp_path, golden_file, capsys):
    out_dir = tmp_path / "run"
    cfg = _write_config(
        tmp_path,
        "golden.yaml",
        {
            "circuit": golden_file,
            "constraints": {"max_subcircuit_qubits": 3, "max_subcircuits": 2},
            "mode": "fd",
            "backend": "exact",
            "output_dir": str(out_dir),
        },
    )
    assert main(["pipeline", cfg]) == 0
    stdout = capsys.readouterr().out
    assert "cuts=1" in stdout and "multiplies=256" in stdout

    report = read_json(out_dir / "report.json")
    assert report["cut"]["num_cuts"] == 1
    assert report["cut"]["objective"] == 256
    assert report["fd"]["terms"] == 4
    assert report["fd"]["multiplies"] == 256
    assert report["verify"]["chi_square"] <= 1e-10
    files = read_json(out_dir / "files.json")["artifacts"]
    assert "dist.bin" in files and "report.json" in files


def test_pipeline_dd_mode_isolates_bv_solution(tmp_path):
    cfg = config_from_mapping(
        {
            "benchmark": {"family": "bv", "num_qubits": 8},
            "constraints": {"max_subcircuit_qubits": 5, "max_subcircuits": 2},
            "mode": "dd",
            "dd": {"max_active": 4, "max_recursions": 4, "strategy": "dfs"},
        }
    )
    report = run_pipeline(cfg)["report"]
    resolved = [
        rec
        for rec in report["dd"]["recursions"]
        if "M" not in rec["roles"] and rec["top_bins"]
    ]
    assert any(rec["top_bins"][0][1] >= 0.999 for rec in resolved)
    assert report["verify"]["recursion0_mass_error"] <= 1e-6


def test_identical_runs_are_byte_identical(tmp_path, golden_file):
    blobs = []
    for name in ("a", "b"):
        out_dir = tmp_path / name
        cfg = _write_config(
            tmp_path,
            f"{name}.yaml",
            {
                "circuit": golden_file,
                "constraints": {"max_subcircuit_qubits": 3, "max_subcircuits": 2},
                "backend": {"mode": "shots", "shots": 5000, "seed": 42},
                "output_dir": str(out_dir),
            },
        )
        assert main(["pipeline", cfg]) == 0
        blobs.append(
            {
                f: (out_dir / f).read_bytes()
                for f in ("report.json", "dist.bin", "raw.json", "cut.json")
            }
        )
    assert blobs[0] == blobs[1]


def test_stage_errors_name_stage_and_keep_artifacts(tmp_path, golden_file):
    with pytest.raises(PipelineError) as info:
        run_pipeline(config_from_mapping({"circuit": str(tmp_path / "nope.txt")}))
    assert info.value.stage == "input"
    assert "input" in str(info.value)

    out_dir = tmp_path / "partial"
    cfg = _write_config(
        tmp_path,
        "partial.yaml",
        {
            "circuit": golden_file,
            "constraints": {"max_subcircuit_qubits": 2, "max_subcircuits": 2},
            "output_dir": str(out_dir),
        },
    )
    assert main(["pipeline", cfg]) == 2  # cut stage is infeasible
    assert (out_dir / "circuit.txt").exists()  # input stage output kept
    assert not (out_dir / "cut.json").exists()


def test_dd_subcommand_writes_tree(tmp_path):
    circ = tmp_path / "bv.txt"
    assert main(["generate", "bv", "--qubits", "8", "-o", str(circ)]) == 0
    out = tmp_path / "tree.json"
    assert main(
        ["dd", str(circ), "--max-qubits", "5", "--max-subcircuits", "2",
         "--active", "4", "--recursions", "2", "-o", str(out)]
    ) == 0
    tree = json.loads(out.read_text())
    assert tree["num_recursions"] == 2
    assert tree["strategy"] == "dfs"
    assert tree["recursions"][0]["roles"] == "AAAAMMMM"
    pattern, mass = tree["recursions"][1]["top_bins"][0]
    assert pattern == 15 and mass >= 0.999


def test_bench_table_checks_cost_model(tmp_path, golden_file, capsys):
    cfg = _write_config(
        tmp_path,
        "bench.yaml",
        {
            "circuit": golden_file,
            "constraints": {"max_subcircuit_qubits": 3, "max_subcircuits": 2},
        },
    )
    assert main(["bench", cfg]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert len(lines) == 2  # header plus one row
    fields = lines[1].split()
    assert fields[-3:-1] == ["256", "256"]  # predicted and measured agree

    table = scaling_report([config_from_mapping(
        {
            "circuit": golden_file,
            "constraints": {"max_subcircuit_qubits": 3, "max_subcircuits": 2},
        }
    )])
    assert len(table["rows"]) == 1
    assert table["all_match"]
    row = table["rows"][0]
    assert row["objective"] == row["multiplies"] == 256
