"""Command-line behavior: exit codes, overrides, CSV artifacts."""

import subprocess
import sys

import pytest

from risqnet.cli import (
    EXIT_INFEASIBLE,
    EXIT_OK,
    EXIT_USAGE,
    main,
)
from risqnet.scenarios import CSV_HEADER, read_csv

BASE_INI = """
[scenario]
seed = 9

[ris]
x = 150
y = 100
h = 60

[optimizer]
t_min = 0.05
cooling = 0.7
iters_per_temp = 30
"""

STARVED_INI = BASE_INI + """
[demands]
min_rate = 1e9
"""


@pytest.fixture
def base_cfg(tmp_path):
    path = tmp_path / "scenario.ini"
    path.write_text(BASE_INI, encoding="utf-8")
    return str(path)


@pytest.fixture
def starved_cfg(tmp_path):
    path = tmp_path / "starved.ini"
    path.write_text(STARVED_INI, encoding="utf-8")
    return str(path)


class TestPointCommands:
    def test_psucc_prints_per_user(self, base_cfg, capsys):
        assert main(["psucc", "--config", base_cfg]) == EXIT_OK
        out = capsys.readouterr().out
        assert out.count("p_succ") == 3

    def test_fidelity_prints_per_user(self, base_cfg, capsys):
        assert main(["fidelity", "--config", base_cfg]) == EXIT_OK
        out = capsys.readouterr().out
        assert out.count("fidelity") == 3

    def test_evaluate_reports_flags(self, base_cfg, capsys):
        assert main(["evaluate", "--config", base_cfg]) == EXIT_OK
        out = capsys.readouterr().out
        assert "wfi =" in out
        assert "feasible =" in out
        assert "rate_domain=" in out

    def test_point_commands_need_ris_section(self, tmp_path, capsys):
        path = tmp_path / "noris.ini"
        path.write_text("[scenario]\nseed = 1\n", encoding="utf-8")
        for cmd in ("psucc", "fidelity", "evaluate"):
            assert main([cmd, "--config", str(path)]) == EXIT_USAGE
            assert "[ris]" in capsys.readouterr().err

    def test_out_writes_solution_csv(self, base_cfg, tmp_path, capsys):
        out = tmp_path / "eval.csv"
        assert main(["evaluate", "--config", base_cfg,
                     "--out", str(out)]) == EXIT_OK
        capsys.readouterr()
        table = read_csv(str(out))
        assert table.header == CSV_HEADER
        assert len(table) == 3
        assert table.column("experiment") == ["evaluate"] * 3
        assert [float(p) for p in table.column("p_succ")]


class TestOptimize:
    def test_runs_and_reports(self, base_cfg, capsys):
        assert main(["optimize", "--config", base_cfg]) == EXIT_OK
        out = capsys.readouterr().out
        assert out.startswith("framework = proposed")
        assert "ris = (" in out
        assert "evaluations =" in out

    def test_framework_override(self, base_cfg, capsys):
        assert main(["optimize", "--config", base_cfg,
                     "--framework", "rate-max"]) == EXIT_OK
        assert capsys.readouterr().out.startswith("framework = rate-max")

    def test_unknown_framework_in_config(self, tmp_path, capsys):
        path = tmp_path / "bad.ini"
        path.write_text("[scenario]\nframework = bogus\n", encoding="utf-8")
        assert main(["optimize", "--config", str(path)]) == EXIT_USAGE
        assert "unknown framework" in capsys.readouterr().err

    def test_starved_demands_exit_infeasible(self, starved_cfg, capsys):
        assert main(["optimize", "--config", starved_cfg]) == EXIT_INFEASIBLE
        assert "infeasible" in capsys.readouterr().err


class TestExperiment:
    def test_psucc_sweep_writes_csv(self, tmp_path, capsys):
        out = tmp_path / "sweep.csv"
        assert main(["experiment", "psucc-sweep", "--seed", "5",
                     "--reps", "1", "--out", str(out)]) == EXIT_OK
        stdout = capsys.readouterr().out
        assert "ordering_weather_ok = True" in stdout
        assert "ordering_turbulence_ok = True" in stdout
        table = read_csv(str(out))
        assert len(table) == 32
        assert set(table.column("experiment")) == {"psucc-sweep"}

    def test_seed_flows_into_artifact(self, tmp_path, capsys):
        a = tmp_path / "a.csv"
        b = tmp_path / "b.csv"
        c = tmp_path / "c.csv"
        for path, seed in ((a, "5"), (b, "5"), (c, "6")):
            assert main(["experiment", "psucc-sweep", "--seed", seed,
                         "--reps", "1", "--out", str(path)]) == EXIT_OK
        capsys.readouterr()
        assert a.read_bytes() == b.read_bytes()
        assert a.read_bytes() != c.read_bytes()

    def test_all_infeasible_exits_two(self, starved_cfg, tmp_path, capsys):
        out = tmp_path / "starved.csv"
        assert main(["experiment", "ris-placement", "--config", starved_cfg,
                     "--reps", "1", "--out", str(out)]) == EXIT_INFEASIBLE
        assert "every repetition was infeasible" in capsys.readouterr().err
        table = read_csv(str(out))
        assert set(table.column("feasible")) == {"0"}

    def test_unknown_experiment_is_usage_error(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["experiment", "frobnicate"])
        assert exc.value.code == EXIT_USAGE
        capsys.readouterr()


class TestUsage:
    def test_missing_subcommand(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main([])
        assert exc.value.code == EXIT_USAGE
        capsys.readouterr()

    def test_unknown_flag(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["psucc", "--bogus"])
        assert exc.value.code == EXIT_USAGE
        capsys.readouterr()

    def test_missing_config_file(self, capsys):
        assert main(["psucc", "--config", "/nonexistent/path.ini"]) \
            == EXIT_USAGE
        assert "error:" in capsys.readouterr().err


def test_module_entry_point(base_cfg):
    proc = subprocess.run(
        [sys.executable, "-m", "risqnet.cli", "psucc", "--config", base_cfg],
        capture_output=True, text=True, timeout=300)
    assert proc.returncode == EXIT_OK
    assert proc.stdout.count("p_succ") == 3
