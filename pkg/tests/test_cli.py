import os

import pytest

import otaform.cli as cli
from otaform.engine import SimulationError

GOOD_CONFIG = """\
[scenario]
n = 4
horizon = 2.0
seed = 3
integrator_step = 0.05

[schedule]
mode = "fixed"
t_min = 0.5
t_max = 0.5

[agents]
model = "first_order"
lambda = 4.0
"""


def write_config(tmp_path, text=GOOD_CONFIG, name="scenario.toml"):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


class TestRunCommand:
    def test_success_writes_outputs(self, tmp_path, capsys):
        cfg = write_config(tmp_path)
        out = tmp_path / "out"
        rc = cli.main(["run", "--config", cfg, "--out", str(out)])
        assert rc == cli.EXIT_OK
        for stem in ("scenario_trace.csv", "scenario_dense.csv",
                     "scenario_report.txt"):
            assert (out / stem).exists()
        assert "verdict:" in capsys.readouterr().out

    def test_invalid_schedule_is_config_error(self, tmp_path, capsys):
        bad = GOOD_CONFIG.replace("t_min = 0.5", "t_min = 0.7")
        cfg = write_config(tmp_path, bad)
        out = tmp_path / "out"
        rc = cli.main(["run", "--config", cfg, "--out", str(out)])
        assert rc == cli.EXIT_CONFIG
        assert not out.exists()  # nothing written on config failure
        assert "config error" in capsys.readouterr().err

    def test_unknown_key_is_config_error(self, tmp_path):
        cfg = write_config(tmp_path, GOOD_CONFIG + "\n[plotting]\ndpi = 3\n")
        rc = cli.main(["run", "--config", cfg, "--out", str(tmp_path / "o")])
        assert rc == cli.EXIT_CONFIG

    def test_missing_file_is_config_error(self, tmp_path):
        rc = cli.main(["run", "--config", str(tmp_path / "nope.toml"),
                       "--out", str(tmp_path / "o")])
        assert rc == cli.EXIT_CONFIG

    def test_simulation_abort_is_runtime_error(self, tmp_path, monkeypatch,
                                               capsys):
        def boom(config):
            raise SimulationError("non-finite state at instant index 3")

        monkeypatch.setattr(cli, "run_scenario", boom)
        cfg = write_config(tmp_path)
        rc = cli.main(["run", "--config", cfg, "--out", str(tmp_path / "o")])
        assert rc == cli.EXIT_RUNTIME
        assert "aborted" in capsys.readouterr().err

    def test_seed_override_changes_output(self, tmp_path):
        cfg = write_config(tmp_path)
        cli.main(["run", "--config", cfg, "--out", str(tmp_path / "a")])
        cli.main(["run", "--config", cfg, "--out", str(tmp_path / "b"),
                  "--seed", "99"])
        a = (tmp_path / "a" / "scenario_trace.csv").read_bytes()
        b = (tmp_path / "b" / "scenario_trace.csv").read_bytes()
        assert a != b


class TestVerifyCommand:
    def test_suite_passes(self, capsys):
        rc = cli.main(["verify", "--suite", "seminorm", "--trials", "50"])
        assert rc == cli.EXIT_OK
        assert "ok" in capsys.readouterr().out

    def test_unknown_suite(self, capsys):
        rc = cli.main(["verify", "--suite", "teleportation"])
        assert rc == cli.EXIT_CONFIG
        assert "unknown suite" in capsys.readouterr().err

    def test_violation_exit_code(self, monkeypatch, capsys):
        monkeypatch.setitem(cli.SUITES, "seminorm",
                            lambda seed, trials=0: ["trial 0: fake violation"])
        rc = cli.main(["verify", "--suite", "seminorm"])
        assert rc == cli.EXIT_VIOLATION
        assert "violation" in capsys.readouterr().out


class TestParser:
    def test_requires_subcommand(self):
        with pytest.raises(SystemExit):
            cli.main([])

    def test_run_requires_config_and_out(self):
        with pytest.raises(SystemExit):
            cli.main(["run", "--out", "x"])

    def test_console_script_registered(self):
        from importlib.metadata import entry_points
        eps = entry_points()
        scripts = eps.select(group="console_scripts") \
            if hasattr(eps, "select") else eps.get("console_scripts", [])
        names = {e.name for e in scripts}
        assert "otaform" in names
