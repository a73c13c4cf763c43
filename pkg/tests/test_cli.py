"""Command-line interface: subcommands, formats, exit codes, spec files."""

import csv
import io
import json
import math
import subprocess
import sys

import pytest

from qhist.cli import (
    EXIT_IMPOSSIBLE,
    EXIT_INPUT,
    EXIT_NONCONVERGED,
    EXIT_OK,
    main,
)


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestScenarioCommand:
    def test_json_output(self, capsys):
        code, out, err = run_cli(capsys, "scenario", "temporal-ghz")
        assert code == EXIT_OK
        doc = json.loads(out)
        assert doc["name"] == "temporal-ghz"
        assert doc["artifacts"]["reduction_purity_t1"] == pytest.approx(0.5)

    def test_unknown_scenario_lists_names(self, capsys):
        code, out, err = run_cli(capsys, "scenario", "warp-drive")
        assert code == EXIT_INPUT
        assert "mach-zehnder" in err

    def test_scenario_parameters(self, capsys):
        code, out, _ = run_cli(
            capsys, "scenario", "temporal-ghz", "--slots", "4", "--alpha", "0.6"
        )
        assert code == EXIT_OK
        doc = json.loads(out)
        assert doc["artifacts"]["reduction_purity_t3"] == pytest.approx(
            0.36**2 + 0.64**2, abs=1e-9
        )

    def test_invalid_parameter(self, capsys):
        code, _, err = run_cli(capsys, "scenario", "temporal-ghz", "--slots", "40")
        assert code == EXIT_INPUT
        assert "error:" in err

    def test_parameter_for_wrong_scenario(self, capsys):
        code, _, err = run_cli(capsys, "scenario", "pauli-cycle", "--alpha", "0.5")
        assert code == EXIT_INPUT

    def test_byte_identical_runs(self, capsys):
        _, out1, _ = run_cli(capsys, "scenario", "pauli-cycle")
        _, out2, _ = run_cli(capsys, "scenario", "pauli-cycle")
        assert out1 == out2

    def test_csv_format(self, capsys):
        code, out, _ = run_cli(capsys, "scenario", "two-time-hab", "--format", "csv")
        assert code == EXIT_OK
        rows = list(csv.reader(io.StringIO(out)))
        assert rows[0] == ["key", "value"]
        table = dict(rows[1:])
        assert table["artifacts.postselection_probability"] == "0.25"

    def test_pretty_format(self, capsys):
        code, out, _ = run_cli(
            capsys, "scenario", "mach-zehnder", "--format", "pretty"
        )
        assert code == EXIT_OK
        assert "weight_bright_port" in out

    def test_out_file(self, capsys, tmp_path):
        target = tmp_path / "report.json"
        code, out, _ = run_cli(
            capsys, "scenario", "example1", "--out", str(target)
        )
        assert code == EXIT_OK
        assert out == ""
        doc = json.loads(target.read_text())
        assert doc["name"] == "example1"


class TestLgiCommand:
    def test_preset_value(self, capsys):
        code, out, _ = run_cli(capsys, "lgi", "--preset", "tsirelson")
        assert code == EXIT_OK
        doc = json.loads(out)
        assert doc["artifacts"]["value"] == pytest.approx(
            2.0 * math.sqrt(2.0), abs=1e-12
        )
        assert doc["artifacts"]["classical_bound"] == 2.0

    def test_spec_file(self, capsys, tmp_path):
        p = tmp_path / "lgi.json"
        p.write_text(
            json.dumps(
                {
                    "initial": "mixed",
                    "first": ["Z", "X"],
                    "second": [
                        {"theta": math.pi / 4, "phi": 0.0},
                        {"theta": math.pi / 4, "phi": math.pi},
                    ],
                }
            )
        )
        code, out, _ = run_cli(capsys, "lgi", "--spec", str(p))
        assert code == EXIT_OK
        doc = json.loads(out)
        assert doc["artifacts"]["value"] == pytest.approx(
            2.0 * math.sqrt(2.0), abs=1e-9
        )

    def test_malformed_spec(self, capsys, tmp_path):
        p = tmp_path / "broken.json"
        p.write_text('{\n  "x": ,\n}')
        code, _, err = run_cli(capsys, "lgi", "--spec", str(p))
        assert code == EXIT_INPUT
        assert "broken.json:2:" in err


class TestChainedCommand:
    def test_scaling(self, capsys):
        for n in (1, 3):
            code, out, _ = run_cli(capsys, "chained", "-n", str(n))
            assert code == EXIT_OK
            doc = json.loads(out)
            assert doc["artifacts"]["total"] == pytest.approx(
                2.0 * math.sqrt(2.0) * n, abs=1e-9
            )
            assert doc["artifacts"]["classical_bound"] == 2.0 * n


class TestMonogamyCommand:
    def test_preset(self, capsys):
        code, out, _ = run_cli(capsys, "monogamy", "--preset", "paper")
        assert code == EXIT_OK
        doc = json.loads(out)
        assert doc["artifacts"]["total"] == pytest.approx(
            4.0 * math.sqrt(2.0), abs=1e-12
        )
        assert doc["artifacts"]["spatial_reference"] == 4.0

    def test_chained_mode(self, capsys):
        code, out, _ = run_cli(
            capsys, "monogamy", "--preset", "paper", "--mode", "chained"
        )
        assert code == EXIT_OK
        doc = json.loads(out)
        assert doc["artifacts"]["mode"] == "chained_single_system"


class TestOptimizeCommand:
    def test_converges(self, capsys):
        code, out, _ = run_cli(capsys, "optimize", "--objective", "s_lgi")
        assert code == EXIT_OK
        doc = json.loads(out)
        assert doc["artifacts"]["value"] == pytest.approx(
            2.0 * math.sqrt(2.0), abs=1e-6
        )
        assert doc["artifacts"]["converged"] is True

    def test_budget_exhaustion_exit_code(self, capsys):
        code, out, _ = run_cli(
            capsys, "optimize", "--objective", "s_lgi", "--max-evals", "40"
        )
        assert code == EXIT_NONCONVERGED

    def test_trace_csv(self, capsys):
        code, out, _ = run_cli(capsys, "optimize", "--format", "csv")
        assert code == EXIT_OK
        rows = list(csv.reader(io.StringIO(out)))
        assert rows[0][0] == "evaluation"
        assert rows[0][-1] == "value"


class TestWeightCommand:
    def test_two_branch_history(self, capsys, tmp_path):
        p = tmp_path / "hist.json"
        p.write_text(
            json.dumps(
                {
                    "history": {
                        "terms": [
                            {
                                "coefficient": [0.7071067811865476, 0.0],
                                "slots": ["z+", "z+"],
                            },
                            {
                                "coefficient": [0.7071067811865476, 0.0],
                                "slots": ["z-", "z-"],
                            },
                        ]
                    }
                }
            )
        )
        code, out, _ = run_cli(capsys, "weight", "--spec", str(p))
        assert code == EXIT_OK
        doc = json.loads(out)
        assert doc["artifacts"]["weight"] == pytest.approx(1.0, abs=1e-9)
        assert doc["artifacts"]["n_terms"] == 2
        assert doc["artifacts"]["term_consistency"]["consistent"] is True

    def test_requires_spec(self, capsys):
        with pytest.raises(SystemExit):
            main(["weight"])

    def test_single_projector_chain(self, capsys, tmp_path):
        p = tmp_path / "xz.json"
        p.write_text(json.dumps({"terms": [{"slots": ["x+", "z+"]}]}))
        code, out, _ = run_cli(capsys, "weight", "--spec", str(p))
        assert code == EXIT_OK
        doc = json.loads(out)
        assert doc["artifacts"]["weight"] == pytest.approx(0.5, abs=1e-12)


class TestAblCommand:
    def write(self, tmp_path, payload, name="exp.json"):
        p = tmp_path / name
        p.write_text(json.dumps(payload))
        return str(p)

    def test_distribution(self, capsys, tmp_path):
        spec = self.write(
            tmp_path, {"pre": "0", "post": "0", "slots": ["X", "X"]}
        )
        code, out, _ = run_cli(capsys, "abl", "--spec", spec)
        assert code == EXIT_OK
        doc = json.loads(out)
        assert doc["artifacts"]["distribution"]["table"]["++"] == pytest.approx(0.5)
        assert doc["artifacts"]["distribution"]["table"]["--"] == pytest.approx(0.5)

    def test_single_slot_conditional(self, capsys, tmp_path):
        spec = self.write(tmp_path, {"pre": "0", "post": "+", "slots": ["Z"]})
        code, out, _ = run_cli(
            capsys, "abl", "--spec", spec, "--slot", "0", "--outcome", "+"
        )
        assert code == EXIT_OK
        doc = json.loads(out)
        assert doc["artifacts"]["abl_probability"] == pytest.approx(1.0, abs=1e-12)

    def test_impossible_postselection_exit_code(self, capsys, tmp_path):
        spec = self.write(tmp_path, {"pre": "0", "post": "1", "slots": ["Z"]})
        code, _, err = run_cli(capsys, "abl", "--spec", spec)
        assert code == EXIT_IMPOSSIBLE
        assert "impossible post-selection" in err

    def test_mixed_initial(self, capsys, tmp_path):
        spec = self.write(
            tmp_path, {"initial": "mixed", "slots": ["X", "Y", "Z"]}
        )
        code, out, _ = run_cli(capsys, "abl", "--spec", spec)
        assert code == EXIT_OK
        doc = json.loads(out)
        for p in doc["artifacts"]["distribution"]["table"].values():
            assert p == pytest.approx(0.125, abs=1e-12)

    def test_distribution_csv_format(self, capsys, tmp_path):
        spec = self.write(tmp_path, {"pre": "0", "post": "0", "slots": ["X", "X"]})
        code, out, _ = run_cli(capsys, "abl", "--spec", spec, "--format", "csv")
        assert code == EXIT_OK
        rows = list(csv.reader(io.StringIO(out)))
        assert rows[0] == ["outcome", "probability"]
        assert ["++", "0.5"] in rows


class TestEntryPoint:
    def test_module_invocation(self):
        proc = subprocess.run(
            [sys.executable, "-m", "qhist", "scenario", "example1"],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0
        assert json.loads(proc.stdout)["name"] == "example1"

    def test_console_script_help(self):
        proc = subprocess.run(
            [sys.executable, "-m", "qhist", "--help"], capture_output=True, text=True
        )
        assert proc.returncode == 0
        for sub in ("scenario", "lgi", "chained", "monogamy", "optimize", "weight", "abl"):
            assert sub in proc.stdout
