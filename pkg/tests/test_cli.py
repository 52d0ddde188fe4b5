import json
import math
import subprocess
import sys
from pathlib import Path

import pytest

from trapion import cli
from trapion.errors import ConfigError

GOLDEN = Path(__file__).parent / "golden"


def run_cli(*args, env=None, cwd=None):
    cmd = [sys.executable, "-m", "trapion", *args]
    return subprocess.run(cmd, capture_output=True, text=True, env=env, cwd=cwd)


def error_record(cp):
    lines = cp.stderr.strip().splitlines()
    record = json.loads(lines[-1])
    assert record["exit_code"] == cp.returncode
    return record


def test_help():
    cp = run_cli("--help")
    assert cp.returncode == 0
    for command in cli.COMMANDS:
        assert command in cp.stdout


# --- ions-table ---------------------------------------------------------------


def test_ions_table_csv_golden():
    cp = run_cli("ions-table", "--format", "csv")
    assert cp.returncode == 0, cp.stderr
    assert cp.stdout == (GOLDEN / "ions_table.csv").read_text()
    header, first = cp.stdout.splitlines()[:2]
    row = dict(zip(header.split(","), first.split(",")))
    assert row["ion"] == "9Be+"
    assert f"{float(row['p_se_pi']):.1e}" == "8.7e-04"


def test_ions_table_deterministic_json(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert run_cli("ions-table", "--out", str(a)).returncode == 0
    assert run_cli("ions-table", "--out", str(b)).returncode == 0
    assert a.read_bytes() == b.read_bytes()
    doc = json.loads(a.read_text())
    assert list(doc)[0] == "schema_version"
    assert len(doc["rows"]) == 7


def test_json_round_trip_exact():
    payload, _, _, _ = cli.cmd_ions_table(cli.RunConfig("ions-table"))
    from trapion.report import to_json

    back = json.loads(to_json(payload))
    for original, parsed in zip(payload["rows"], back["rows"]):
        for key, value in original.items():
            if isinstance(value, float):
                assert parsed[key] == value  # 17 significant digits reparse bit-exactly


def test_table_format():
    cp = run_cli("ions-table", "--format", "table")
    assert cp.returncode == 0
    assert cp.stdout.splitlines()[1].startswith("-")


def test_env_var_database(tmp_path):
    db = tmp_path / "db.csv"
    db.write_text("name,nuclear_spin_I,gamma_2pi_hz,nu_F_hz,nu_0_hz\nX+,1/2,1e6,1e12,1e9\n")
    import os

    env = dict(os.environ, TRAPION_ION_DB=str(db))
    cp = run_cli("ions-table", "--format", "csv", env=env)
    assert cp.returncode == 0, cp.stderr
    assert len(cp.stdout.splitlines()) == 2


def test_empty_database_succeeds(tmp_path):
    db = tmp_path / "db.csv"
    db.write_text("")
    cp = run_cli("ions-table", "--ion-db", str(db), "--format", "csv")
    assert cp.returncode == 0
    assert "empty" in cp.stderr
    assert len(cp.stdout.splitlines()) == 1


# --- budget ---------------------------------------------------------------------


def test_budget_default_is_optimal_carrier():
    cp = run_cli("budget")
    assert cp.returncode == 0, cp.stderr
    q = json.loads(cp.stdout)["quantities"]
    assert q["p_se_pi"] == pytest.approx(1.0e-3, rel=0.02)


def test_budget_hz_conversion():
    cp = run_cli("budget", "--delta-hz", "8.2e10", "--g-b-hz", "1e8", "--g-r-hz", "1e8")
    doc = json.loads(cp.stdout)
    from trapion.ramancoupling import BERYLLIUM_9, carrier_rabi_be, optimal_carrier_beams

    expected = abs(carrier_rabi_be(optimal_carrier_beams(BERYLLIUM_9, 2 * math.pi * 1e8, 2 * math.pi * 8.2e10), BERYLLIUM_9))
    assert doc["quantities"]["carrier_rabi_abs_rad_s"] == pytest.approx(expected, rel=1e-14)


def test_budget_polarization_renormalized_with_warning():
    cp = run_cli("budget", "--pol-b", "0,1.0000004,0")
    assert cp.returncode == 0
    assert "renormalized" in cp.stderr


def test_budget_polarization_rejected():
    cp = run_cli("budget", "--pol-b", "0,1.1,0")
    assert cp.returncode == 2
    assert "not normalized" in error_record(cp)["message"]


def test_budget_singular_denominator_is_physics_error():
    cp = run_cli("budget", "--delta-hz", "0")
    assert cp.returncode == 3
    assert error_record(cp)["error"] == "DenominatorSingular"


# --- gate-simulate --------------------------------------------------------------


def test_gate_simulate_calibrated(tmp_path):
    traj = tmp_path / "traj.csv"
    cp = run_cli("gate-simulate", "--trajectory", str(traj), "--samples", "32")
    assert cp.returncode == 0, cp.stderr
    doc = json.loads(cp.stdout)
    for got, want in zip(doc["phases"], [0, 1.5708, 1.5708, 0]):
        assert got == pytest.approx(want, abs=1e-3)
    assert min(doc["motional_return_fidelity"]) >= 1 - 1e-6
    assert doc["force_ratio_re"] == pytest.approx(-2, rel=1e-12)
    lines = traj.read_text().splitlines()
    assert lines[0] == "t_seconds,basis_label,re_alpha,im_alpha"
    assert len(lines) == 1 + 32 * 4


def test_gate_simulate_detuning_out_of_range():
    cp = run_cli("gate-simulate", "--gate-detuning-hz", "1e6", "--method", "analytic")
    assert cp.returncode == 2


def test_gate_simulate_unreachable_phase():
    cp = run_cli("gate-simulate", "--n-max", "20", "--method", "analytic")
    assert cp.returncode == 3
    assert error_record(cp)["error"] == "NoBracket"


def test_gate_simulate_parallel_polarization_has_no_stretch_force():
    cp = run_cli("gate-simulate", "--kappa-deg", "0", "--method", "analytic")
    assert cp.returncode == 3


# --- pulse ----------------------------------------------------------------------


def test_pulse_mapping_step():
    alpha, beta = 0.6, 0.8j
    cp = run_cli(
        "pulse", "--kind", "red_sideband", "--eta", "0.1", "--initial", f"down,0={alpha};up,0={beta}", "--n-max", "4"
    )
    assert cp.returncode == 0, cp.stderr
    amps = {(a["spin"], a["n"]): complex(a["re"], a["im"]) for a in json.loads(cp.stdout)["amplitudes"]}
    assert amps[("down", 0)] == pytest.approx(alpha, abs=1e-12)
    assert amps[("down", 1)] == pytest.approx(-1j * beta, abs=1e-12)
    assert abs(amps[("up", 0)]) < 1e-12


def test_pulse_sequence_from_config(tmp_path):
    cfg = tmp_path / "seq.ini"
    cfg.write_text(
        "[run]\nformat = csv\n\n"
        "[pulse.2]\nkind = carrier\narea = 1\n\n"
        "[pulse.1]\nkind = carrier\narea = 1\n"
    )
    cp = run_cli("pulse", "--config", str(cfg))
    assert cp.returncode == 0, cp.stderr
    rows = [line.split(",") for line in cp.stdout.splitlines()[1:]]
    # two carrier pi pulses: |down,0> -> -|down,0>
    assert float(rows[0][2]) == pytest.approx(-1, abs=1e-12)


def test_pulse_bad_initial_state():
    cp = run_cli("pulse", "--initial", "sideways,0=1")
    assert cp.returncode == 2


def test_pulse_overflow_is_physics_error():
    cp = run_cli("pulse", "--kind", "blue_sideband", "--eta", "0.1", "--initial", "down,3=1", "--n-max", "3")
    assert cp.returncode == 3
    assert error_record(cp)["error"] == "TruncationError"


# --- sweep ----------------------------------------------------------------------


def test_sweep_clock_objective_minimum_near_optimum():
    nu_f = 0.198e12
    cp = run_cli(
        "sweep", "--param", "delta_hz", "--start", str(0.3 * nu_f), "--stop", str(0.5 * nu_f),
        "--num", "21", "--objective", "clock_objective", "--format", "csv",
    )
    assert cp.returncode == 0, cp.stderr
    rows = [tuple(map(float, line.split(","))) for line in cp.stdout.splitlines()[1:]]
    assert len(rows) == 21
    best = min(rows, key=lambda r: r[1])[0]
    assert best == pytest.approx((math.sqrt(2) - 1) * nu_f, rel=0.03)


def test_sweep_gate_phase_quadratic():
    cp = run_cli(
        "sweep", "--param", "gate_amplitude_hz", "--start", "1000", "--stop", "2000", "--num", "2",
        "--objective", "gate_phase", "--format", "csv",
    )
    rows = [tuple(map(float, line.split(","))) for line in cp.stdout.splitlines()[1:]]
    assert rows[1][1] / rows[0][1] == pytest.approx(4, rel=1e-9)


def test_sweep_requires_range():
    cp = run_cli("sweep", "--param", "delta_hz")
    assert cp.returncode == 2


# --- configuration --------------------------------------------------------------


def test_flags_override_config(tmp_path):
    cfg = tmp_path / "run.ini"
    cfg.write_text("[beams]\ndelta_hz = 5e10\ng_b_hz = 2e8\n")
    conf = cli.load_config(["budget", "--config", str(cfg), "--delta-hz", "7e10"])
    assert conf.get("delta_hz") == 7e10
    assert conf.get("g_b_hz") == 2e8
    assert conf.get("g_r_hz") == cli.OPTIONS["g_r_hz"][2]


def test_text_table_alias(tmp_path):
    cfg = tmp_path / "run.ini"
    cfg.write_text("[run]\nformat = text-table\n")
    assert cli.load_config(["ions-table", "--config", str(cfg)]).output_format == "table"


@pytest.mark.parametrize(
    "text",
    ["[beams]\nbogus = 1\n", "[beams]\ndelta_hz = fast\n", "no section header\n", "[pulse.x]\nkind = carrier\n"],
)
def test_bad_config_rejected(tmp_path, text):
    cfg = tmp_path / "bad.ini"
    cfg.write_text(text)
    with pytest.raises(ConfigError):
        cli.load_config(["budget", "--config", str(cfg)])


@pytest.mark.parametrize(
    "args",
    [
        ["budget", "--g-b-hz", "-1"],
        ["budget", "--eta", "1.5"],
        ["pulse", "--n-max", "0"],
        ["nonsense"],
        ["budget", "--format", "xml"],
    ],
)
def test_invalid_arguments_exit_2(args):
    cp = run_cli(*args)
    assert cp.returncode == 2
    assert len(cp.stderr.strip().splitlines()) == 1
    assert error_record(cp)["error"] == "ConfigError"


def test_missing_config_file():
    cp = run_cli("budget", "--config", "/nonexistent/run.ini")
    assert cp.returncode == 2
