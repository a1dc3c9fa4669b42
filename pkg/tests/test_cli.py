"""End-to-end command-line checks via subprocess."""

import json
import math
import os
import subprocess
import sys

import pytest

from exclab.bounds import GameParameters, classical_ic_lower_bound, gamma_log2

CSV_HEADER = ("n,m,gamma_log2,classical_ic_lower,"
              "quantum_entropy_upper,quantum_ic_upper")


def run_cli(*argv: str, env_extra: dict | None = None):
    env = {k: v for k, v in os.environ.items() if k != "EXCLAB_SEED"}
    if env_extra:
        env.update(env_extra)
    return subprocess.run(
        [sys.executable, "-m", "exclab.cli", *argv],
        capture_output=True,
        text=True,
        env=env,
    )


def test_verify_pbr_reports_and_passes():
    result = run_cli("verify-pbr", "4")
    assert result.returncode == 0, result.stderr
    doc = json.loads(result.stdout)
    assert doc["schema_version"] == "1"
    assert doc["command"] == "verify-pbr"
    assert doc["pass"] is True
    assert [row["m"] for row in doc["rows"]] == [1, 2, 3, 4]
    first = doc["rows"][0]
    assert first["theta"] == pytest.approx(math.pi / 2, rel=1e-11)
    assert first["max_exclusion_overlap"] <= 1e-12
    assert first["gram_residual"] <= 1e-10
    assert first["formula_residual"] <= 1e-12
    # The same measurement must demonstrably fail below the critical angle.
    assert first["subcritical_overlap"] > 1e-6
    assert first["pass"] is True


def test_verify_pbr_is_byte_deterministic():
    first = run_cli("verify-pbr", "3")
    second = run_cli("verify-pbr", "3")
    assert first.stdout == second.stdout
    assert first.returncode == second.returncode == 0


def test_verify_pbr_rejects_out_of_range_m_max():
    assert run_cli("verify-pbr", "11").returncode == 2
    assert run_cli("verify-pbr", "0").returncode == 2


def test_bounds_csv_values_match_library():
    result = run_cli("bounds", "--n", "16", "64", "--m-rule", "linear:0.25")
    assert result.returncode == 0, result.stderr
    lines = result.stdout.strip().split("\n")
    assert lines[0] == CSV_HEADER
    assert len(lines) == 3
    for line, n, m in zip(lines[1:], (16, 64), (4, 16)):
        cells = line.split(",")
        assert cells[0] == str(n)
        assert cells[1] == str(m)
        assert float(cells[2]) == pytest.approx(gamma_log2(n, m), rel=1e-9)
        assert float(cells[3]) == pytest.approx(
            classical_ic_lower_bound(GameParameters(n, m)), rel=1e-9
        )
        assert float(cells[5]) == pytest.approx(2 * float(cells[4]), rel=1e-9)


def test_bounds_empty_n_list_gives_header_only_csv():
    result = run_cli("bounds", "--n", "--m-rule", "power:0.75")
    assert result.returncode == 0, result.stderr
    assert result.stdout == CSV_HEADER + "\n"


def test_bounds_json_format():
    result = run_cli("bounds", "--n", "32", "--m-rule", "power:0.5",
                     "--format", "json")
    assert result.returncode == 0, result.stderr
    doc = json.loads(result.stdout)
    assert doc["schema_version"] == "1"
    assert doc["m_rule"] == "power:0.5"
    (row,) = doc["rows"]
    assert row["n"] == 32 and row["m"] == 5
    assert set(row) == {"n", "m", "gamma_log2", "classical_ic_lower",
                        "quantum_entropy_upper", "quantum_ic_upper"}


def test_bounds_batch_file(tmp_path):
    batch = tmp_path / "batch.json"
    batch.write_text(json.dumps({
        "schema_version": "1",
        "n_values": [16, 64],
        "m_rule": "linear:0.25",
        "format": "csv",
    }))
    from_spec = run_cli("bounds", "--spec", str(batch))
    from_flags = run_cli("bounds", "--n", "16", "64",
                         "--m-rule", "linear:0.25")
    assert from_spec.returncode == 0, from_spec.stderr
    assert from_spec.stdout == from_flags.stdout


def test_bounds_batch_file_rejections(tmp_path):
    unknown = tmp_path / "unknown.json"
    unknown.write_text(json.dumps({
        "n_values": [8], "m_rule": "power:0.75", "surprise": 1,
    }))
    assert run_cli("bounds", "--spec", str(unknown)).returncode == 2

    missing = tmp_path / "missing.json"
    missing.write_text(json.dumps({"n_values": [8]}))
    assert run_cli("bounds", "--spec", str(missing)).returncode == 2

    wrong_version = tmp_path / "version.json"
    wrong_version.write_text(json.dumps({
        "schema_version": "9", "n_values": [8], "m_rule": "power:0.75",
    }))
    assert run_cli("bounds", "--spec", str(wrong_version)).returncode == 2

    good = tmp_path / "good.json"
    good.write_text(json.dumps({"n_values": [8], "m_rule": "power:0.75"}))
    both = run_cli("bounds", "--spec", str(good), "--n", "8",
                   "--m-rule", "power:0.75")
    assert both.returncode == 2


def test_bounds_requires_inputs():
    assert run_cli("bounds").returncode == 2
    assert run_cli("bounds", "--m-rule", "power:0.75").returncode == 2


def test_bounds_output_file(tmp_path):
    target = tmp_path / "table.csv"
    result = run_cli("bounds", "--n", "8", "--m-rule", "linear:0.5",
                     "--output", str(target))
    assert result.returncode == 0
    assert result.stdout == ""
    content = target.read_text()
    assert content.startswith(CSV_HEADER)
    assert content.split("\n")[1].startswith("8,4,")


def test_simulate_quantum_json_and_determinism():
    argv = ("simulate", "--strategy", "quantum", "--n", "4", "--m", "2",
            "--trials", "50", "--seed", "3", "--threads", "1")
    first = run_cli(*argv)
    second = run_cli(*argv)
    assert first.returncode == 0, first.stderr
    assert first.stdout == second.stdout
    doc = json.loads(first.stdout)
    assert doc["schema_version"] == "1"
    assert doc["config"]["n"] == 4
    assert doc["config"]["seed"] == 3
    stats = doc["statistics"]
    assert stats["trials"] == 50
    assert stats["wins"] == 50
    assert stats["win_rate"] == 1.0
    assert stats["message_bits"] == {"qubits": 4.0}


def test_simulate_thread_count_does_not_change_output():
    argv = ("simulate", "--strategy", "quantum", "--n", "3", "--m", "2",
            "--trials", "60", "--seed", "5")
    serial = run_cli(*argv, "--threads", "1")
    parallel = run_cli(*argv, "--threads", "3")
    assert serial.returncode == parallel.returncode == 0
    assert serial.stdout == parallel.stdout


def test_simulate_seed_from_environment():
    argv = ("simulate", "--strategy", "quantum", "--n", "3", "--m", "1",
            "--trials", "20", "--threads", "1")
    from_env = run_cli(*argv, env_extra={"EXCLAB_SEED": "9"})
    from_flag = run_cli(*argv, "--seed", "9")
    assert from_env.returncode == 0, from_env.stderr
    assert from_env.stdout == from_flag.stdout
    assert json.loads(from_env.stdout)["config"]["seed"] == 9
    bad = run_cli(*argv, env_extra={"EXCLAB_SEED": "not-a-number"})
    assert bad.returncode == 2


def test_simulate_transcript_stream(tmp_path):
    path = tmp_path / "transcripts.ndjson"
    result = run_cli("simulate", "--strategy", "entanglement_assisted",
                     "--n", "3", "--m", "3", "--k", "11", "--delta", "0.05",
                     "--trials", "40", "--seed", "1", "--threads", "1",
                     "--transcripts", str(path))
    assert result.returncode == 0, result.stderr
    lines = path.read_text().strip().split("\n")
    assert len(lines) == 40
    records = [json.loads(line) for line in lines]
    for record in records:
        assert set(record) == {"x", "y", "message", "answer", "aborted", "won"}
        assert record["aborted"] == (record["answer"] is None)
    stats = json.loads(result.stdout)["statistics"]
    assert stats["wins"] == sum(1 for r in records if r["won"])
    assert stats["aborts"] == sum(1 for r in records if r["aborted"])


def test_simulate_usage_errors():
    missing_k = run_cli("simulate", "--strategy", "entanglement_assisted",
                        "--n", "4", "--m", "2", "--trials", "5")
    assert missing_k.returncode == 2
    too_big = run_cli("simulate", "--strategy", "classical_cover",
                      "--n", "17", "--m", "2", "--trials", "5",
                      "--threads", "1")
    assert too_big.returncode == 2
    assert "resource" in too_big.stderr


def test_oracle_small_instance():
    result = run_cli("oracle", "4", "2", "--threads", "1")
    assert result.returncode == 0, result.stderr
    doc = json.loads(result.stdout)
    assert doc["min_excluded"] == 11
    assert doc["closed_form"] == 11
    assert doc["matches_closed_form"] is True
    assert doc["witness_consistent"] is True
    assert doc["witness_excluded_count"] == 11
    assert doc["pass"] is True
    assert len(doc["witness_answers"]) == 6


def test_oracle_threads_do_not_change_output():
    serial = run_cli("oracle", "4", "3", "--threads", "1")
    parallel = run_cli("oracle", "4", "3", "--threads", "2")
    assert serial.returncode == parallel.returncode == 0
    assert serial.stdout == parallel.stdout


def test_oracle_refusals():
    over_budget = run_cli("oracle", "5", "3")
    assert over_budget.returncode == 2
    assert "budget" in over_budget.stderr
    assert run_cli("oracle", "3", "5").returncode == 2


def test_steering_report():
    result = run_cli("steering", "--m-max", "8")
    assert result.returncode == 0, result.stderr
    doc = json.loads(result.stdout)
    assert doc["pass"] is True
    assert len(doc["rows"]) == 8
    first = doc["rows"][0]
    assert first["p_steer"] == pytest.approx(0.5, abs=1e-12)
    for row in doc["rows"]:
        assert row["probability_residual"] <= 1e-12
        assert row["closed_form_residual"] <= 1e-12
        assert row["fidelity_residual"] <= 1e-12
        assert row["pass"] is True


def test_steering_rejects_bad_m_max():
    assert run_cli("steering", "--m-max", "0").returncode == 2


def test_choose_k_prints_bare_integer():
    result = run_cli("choose-k", "1.0", "0.05")
    assert result.returncode == 0
    assert result.stdout == "11\n"
    assert run_cli("choose-k", "1.5", "0.05").returncode == 2
