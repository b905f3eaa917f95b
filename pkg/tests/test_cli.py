from __future__ import annotations

import json

import pytest

from kinetutor.cli import (
    EXIT_ABORTED,
    EXIT_EXHAUSTED,
    EXIT_IO,
    EXIT_OK,
    EXIT_USAGE,
    main,
    parse_seed_set,
)


def run_cli(argv):
    try:
        return main(argv)
    except SystemExit as exc:  # usage errors raise through argparse
        return exc.code


class TestUsage:
    def test_missing_problem_flag(self, capsys):
        assert run_cli(["run"]) == EXIT_USAGE
        assert "error" in capsys.readouterr().err

    def test_unknown_flag(self, capsys):
        assert run_cli(["run", "--problem", "x.json", "--frobnicate"]) == EXIT_USAGE

    def test_unknown_command(self):
        assert run_cli(["polish"]) == EXIT_USAGE

    def test_seed_set_parsing(self):
        assert parse_seed_set("1-4") == [1, 2, 3, 4]
        assert parse_seed_set("1,5,9") == [1, 5, 9]
        assert parse_seed_set("3") == [3]
        with pytest.raises(ValueError):
            parse_seed_set(" , ")


class TestRun:
    def test_car_problem_writes_metrics(self, car_problem_path, tmp_path, capsys):
        out = tmp_path / "metrics"
        code = run_cli([
            "run", "--problem", str(car_problem_path), "--mode", "ga",
            "--seed", "1", "--metrics-out", str(out),
        ])
        assert code == EXIT_OK
        assert (out / "metrics.csv").exists()
        assert (out / "knowns.jsonl").exists()
        assert (out / "events.jsonl").exists()
        summary = json.loads((out / "summary.json").read_text())
        assert summary["status"] == "solved"
        assert summary["seed"] == 1
        assert "solved" in capsys.readouterr().out

    def test_missing_problem_file(self, tmp_path, capsys):
        code = run_cli(["run", "--problem", str(tmp_path / "nope.json")])
        assert code == EXIT_IO

    def test_malformed_problem_file(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        assert run_cli(["run", "--problem", str(bad)]) == EXIT_IO

    def test_zero_generations_exhausts(self, car_problem_path, capsys):
        code = run_cli([
            "run", "--problem", str(car_problem_path), "--max-generations", "0",
        ])
        assert code == EXIT_EXHAUSTED

    def test_byte_identical_reruns(self, car_problem_path, tmp_path):
        outs = []
        for name in ("first", "second"):
            out = tmp_path / name
            assert run_cli([
                "run", "--problem", str(car_problem_path), "--seed", "3",
                "--metrics-out", str(out),
            ]) == EXIT_OK
            outs.append(out)
        for filename in ("metrics.csv", "knowns.jsonl", "events.jsonl", "summary.json"):
            assert (outs[0] / filename).read_bytes() == (outs[1] / filename).read_bytes()

    def test_config_file_supplies_defaults(self, car_problem_path, tmp_path):
        config = tmp_path / "config.json"
        config.write_text(json.dumps({"max_generations": 0}))
        code = run_cli([
            "run", "--problem", str(car_problem_path), "--config", str(config),
        ])
        assert code == EXIT_EXHAUSTED

    def test_env_var_seed(self, car_problem_path, tmp_path, monkeypatch):
        monkeypatch.setenv("KINETUTOR_SEED", "12")
        out = tmp_path / "m"
        assert run_cli([
            "run", "--problem", str(car_problem_path), "--metrics-out", str(out),
        ]) == EXIT_OK
        assert json.loads((out / "summary.json").read_text())["seed"] == 12


class TestExportBits:
    def test_snapshot_round_trip(self, car_problem_path, tmp_path):
        snapshot = tmp_path / "session.json"
        assert run_cli([
            "run", "--problem", str(car_problem_path), "--seed", "2",
            "--snapshot-out", str(snapshot),
        ]) == EXIT_OK
        out = tmp_path / "bits.bin"
        assert run_cli(["export-bits", "--in", str(snapshot), "--out", str(out)]) == EXIT_OK
        assert out.stat().st_size == 75_000

    def test_unreadable_snapshot(self, tmp_path):
        code = run_cli([
            "export-bits", "--in", str(tmp_path / "missing.json"),
            "--out", str(tmp_path / "bits.bin"),
        ])
        assert code == EXIT_IO

    def test_empty_population_snapshot(self, tmp_path):
        snapshot = tmp_path / "empty.json"
        snapshot.write_text(json.dumps({
            "format": "kinetutor-session-v1",
            "seed": 0,
            "population": {"generation": 1, "bits_per_member": 12000, "members": []},
        }))
        out = tmp_path / "bits.bin"
        assert run_cli(["export-bits", "--in", str(snapshot), "--out", str(out)]) == EXIT_OK
        assert out.stat().st_size == 0


class TestCompare:
    def test_small_compare_run(self, car_problem_path, tmp_path, capsys):
        out = tmp_path / "summary.json"
        code = run_cli([
            "compare", "--problem", str(car_problem_path), "--seeds", "1-3",
            "--out", str(out),
        ])
        assert code == EXIT_OK
        summary = json.loads(out.read_text())
        assert summary["ga"]["n"] == 3 and summary["control"]["n"] == 3
        assert summary["ga_median_not_later"] is True
        assert "ga median <= control median: True" in capsys.readouterr().out


class TestTutor:
    def test_immediate_eof_aborts(self, monkeypatch, capsys):
        import builtins

        def no_input(prompt=""):
            raise EOFError

        monkeypatch.setattr(builtins, "input", no_input)
        code = run_cli(["tutor", "--max-generations", "1",
                        "--population-size", "2", "--chromosome-bits", "24"])
        assert code == EXIT_ABORTED

    def test_zero_generations_prints_exhausted(self, monkeypatch, capsys):
        import builtins

        answers = iter(["final position", "a car", "coasting"])

        monkeypatch.setattr(builtins, "input", lambda prompt="": next(answers))
        code = run_cli(["tutor", "--max-generations", "0",
                        "--population-size", "2", "--chromosome-bits", "24"])
        assert code == EXIT_EXHAUSTED
        assert "exhausted" in capsys.readouterr().out

    def test_oracle_fed_terminal_session_solves(self, monkeypatch, capsys, car_problem_path):
        # answer the terminal prompts from the oracle, exercising the tutor loop
        from kinetutor.scripted import ScriptedStudent, load_script
        import kinetutor.cli as cli_module

        oracle = ScriptedStudent(load_script(car_problem_path))

        class OracleTerminal(cli_module.TerminalIO):
            def exchange(self, prompt):
                return oracle.exchange(prompt)

        monkeypatch.setattr(cli_module, "TerminalIO", OracleTerminal)
        code = run_cli(["tutor", "--seed", "1"])
        assert code == EXIT_OK
        out = capsys.readouterr().out
        assert "Session solved" in out
        assert "What you know now" in out
