import csv
import json
from pathlib import Path

import numpy as np
import pytest
from scipy import stats

from quantstream import Checkpoint, QuantileState
from quantstream.ExitCode import ExitCode
from quantstream.cli import main


@pytest.fixture(autouse=True)
def no_seed_env(monkeypatch):
    monkeypatch.delenv("QUANTSTREAM_SEED", raising=False)


def _write_rows(path, rows):
    path.write_text("".join(",".join(repr(float(v)) for v in np.atleast_1d(row)) + "\n" for row in rows),
                    encoding="utf-8")
    return path


class TestStream:

    def test_smoke(self, tmp_path, capsys):
        data = tmp_path / "data.csv"
        data.write_text("1\n2\n3\n", encoding="utf-8")
        assert main(["stream", str(data), "--grid", "0.5"]) == ExitCode.OK
        state = QuantileState.from_json(capsys.readouterr().out)
        assert state.step == 3
        assert state.grid.levels == [0.5]

    def test_blank_lines_are_skipped(self, tmp_path, capsys):
        data = tmp_path / "data.csv"
        data.write_text("1,2\n\n3,4\n", encoding="utf-8")
        assert main(["stream", str(data), "--grid", "0.25,0.75"]) == ExitCode.OK
        assert QuantileState.from_json(capsys.readouterr().out).series_count == 2

    def test_csv_output(self, tmp_path):
        data = _write_rows(tmp_path / "data.csv", [[1.0, 2.0], [3.0, 4.0]])
        out = tmp_path / "out.csv"
        assert main(["stream", str(data), "--grid", "0.5", "--format", "csv", "--output", str(out)]) == 0
        lines = out.read_text(encoding="utf-8").splitlines()
        assert lines[0] == "series,tau,raw,averaged,step"
        assert len(lines) == 3

    def test_resume_is_bit_identical(self, tmp_path, rng):
        rows = rng.standard_normal((40, 2))
        whole = _write_rows(tmp_path / "whole.csv", rows)
        first = _write_rows(tmp_path / "first.csv", rows[:15])
        second = _write_rows(tmp_path / "second.csv", rows[15:])
        checkpoint = tmp_path / "state.json"
        out_whole, out_resumed = tmp_path / "whole.json", tmp_path / "resumed.json"
        assert main(["stream", str(whole), "--output", str(out_whole)]) == 0
        assert main(["stream", str(first), "--checkpoint", str(checkpoint),
                     "--output", str(tmp_path / "partial.json")]) == 0
        assert Checkpoint.load(checkpoint).state.step == 15
        assert main(["stream", str(second), "--resume", str(checkpoint), "--output", str(out_resumed)]) == 0
        assert out_resumed.read_text(encoding="utf-8") == out_whole.read_text(encoding="utf-8")

    def test_malformed_line(self, tmp_path, caplog):
        data = tmp_path / "data.csv"
        data.write_text("1\nabc\n3\n", encoding="utf-8")
        assert main(["stream", str(data)]) == ExitCode.MALFORMED_INPUT
        assert "line 2" in caplog.text

    def test_non_finite_value(self, tmp_path):
        data = tmp_path / "data.csv"
        data.write_text("1\nnan\n", encoding="utf-8")
        assert main(["stream", str(data)]) == ExitCode.MALFORMED_INPUT

    @pytest.mark.parametrize("cell", ["1_000", "\u0661", "0x10"])
    def test_number_grammar(self, tmp_path, caplog, cell):
        data = tmp_path / "data.csv"
        data.write_text(f"1\n{cell}\n", encoding="utf-8")
        assert main(["stream", str(data)]) == ExitCode.MALFORMED_INPUT
        assert "line 2" in caplog.text

    def test_scientific_notation_accepted(self, tmp_path, capsys):
        data = tmp_path / "data.csv"
        data.write_text("1e-3\n-2.5E+1\n .5 \n", encoding="utf-8")
        assert main(["stream", str(data), "--grid", "0.5"]) == ExitCode.OK
        assert QuantileState.from_json(capsys.readouterr().out).step == 3

    def test_ragged_rows(self, tmp_path, caplog):
        data = tmp_path / "data.csv"
        data.write_text("1,2\n3\n", encoding="utf-8")
        assert main(["stream", str(data)]) == ExitCode.MALFORMED_INPUT
        assert "line 2" in caplog.text

    def test_missing_file(self, tmp_path):
        assert main(["stream", str(tmp_path / "missing.csv")]) == ExitCode.IO

    def test_corrupt_checkpoint(self, tmp_path):
        data = _write_rows(tmp_path / "data.csv", [[1.0]])
        checkpoint = tmp_path / "state.json"
        checkpoint.write_text("{not json", encoding="utf-8")
        assert main(["stream", str(data), "--resume", str(checkpoint)]) == ExitCode.MALFORMED_INPUT

    def test_inference(self, tmp_path, capsys):
        rng = np.random.default_rng(9)
        data = _write_rows(tmp_path / "data.csv", rng.standard_normal(2000))
        null = tmp_path / "null.csv"
        null.write_text(",".join(repr(float(q)) for q in stats.norm.ppf([0.25, 0.5, 0.75])) + "\n",
                        encoding="utf-8")
        code = main(["stream", str(data), "--grid", "0.25,0.5,0.75", "--infer", "--null", str(null),
                     "--sparsity", "known:normal", "--bridge-reps", "5000", "--alpha", "0.01"])
        assert code == ExitCode.OK
        report = json.loads(capsys.readouterr().out)
        assert isinstance(report["reject"], bool)
        assert report["reject"] == (report["statistic"] > report["critical_value"])
        assert len(report["bands"]) == 3

    def test_inference_needs_null(self, tmp_path):
        data = _write_rows(tmp_path / "data.csv", [[1.0], [2.0]])
        assert main(["stream", str(data), "--infer"]) == ExitCode.USAGE

    def test_null_shape_mismatch(self, tmp_path):
        data = _write_rows(tmp_path / "data.csv", [[1.0], [2.0]])
        null = _write_rows(tmp_path / "null.csv", [[0.0, 1.0]])
        code = main(["stream", str(data), "--grid", "0.5", "--infer", "--null", str(null),
                     "--sparsity", "known:normal", "--bridge-reps", "1000"])
        assert code == ExitCode.MALFORMED_INPUT


class TestBands:

    def _bands(self, path, *extra):
        out = path.parent / "bands.json"
        assert main(["bands", str(path), "--output", str(out), *extra]) == ExitCode.OK
        return json.loads(out.read_text(encoding="utf-8"))

    def test_cover_true_median(self, tmp_path):
        data = _write_rows(tmp_path / "data.csv", np.random.default_rng(6).standard_normal(10_000))
        report = self._bands(data, "--grid", "0.5", "--alpha", "0.01", "--bridge-reps", "20000")
        band = report["bands"][0]
        assert band["lo"] <= 0.0 <= band["hi"]
        assert report["step"] == 10_000

    def test_smaller_alpha_widens(self, tmp_path):
        data = _write_rows(tmp_path / "data.csv", np.random.default_rng(1).standard_normal(500))
        wide = self._bands(data, "--alpha", "0.01", "--sparsity", "known:normal", "--bridge-reps", "5000")
        narrow = self._bands(data, "--alpha", "0.15", "--sparsity", "known:normal", "--bridge-reps", "5000")
        for w, n in zip(wide["bands"], narrow["bands"]):
            assert w["hi"] - w["lo"] > n["hi"] - n["lo"]

    def test_deterministic(self, tmp_path, capsys):
        data = _write_rows(tmp_path / "data.csv", np.random.default_rng(1).standard_normal(300))
        outputs = []
        for _ in range(2):
            assert main(["bands", str(data), "--bridge-reps", "2000", "--seed", "4"]) == 0
            outputs.append(capsys.readouterr().out)
        assert outputs[0] == outputs[1]

    def test_seed_from_environment(self, tmp_path, capsys, monkeypatch):
        data = _write_rows(tmp_path / "data.csv", np.random.default_rng(1).standard_normal(300))
        assert main(["bands", str(data), "--bridge-reps", "2000", "--seed", "12"]) == 0
        explicit = capsys.readouterr().out
        monkeypatch.setenv("QUANTSTREAM_SEED", "12")
        assert main(["bands", str(data), "--bridge-reps", "2000"]) == 0
        assert capsys.readouterr().out == explicit

    def test_invalid_seed_environment(self, tmp_path, monkeypatch):
        data = _write_rows(tmp_path / "data.csv", [[1.0], [2.0]])
        monkeypatch.setenv("QUANTSTREAM_SEED", "twelve")
        assert main(["bands", str(data)]) == ExitCode.USAGE

    def test_empty_file(self, tmp_path):
        data = tmp_path / "empty.csv"
        data.write_text("", encoding="utf-8")
        assert main(["bands", str(data)]) == ExitCode.MALFORMED_INPUT

    def test_constant_data_fails_numerically(self, tmp_path):
        data = _write_rows(tmp_path / "data.csv", np.ones(50))
        assert main(["bands", str(data), "--bridge-reps", "1000"]) == ExitCode.NUMERIC


class TestUsage:

    def test_unknown_flag(self):
        with pytest.raises(SystemExit) as excinfo:
            main(["stream", "--bogus"])
        assert excinfo.value.code == ExitCode.USAGE

    def test_help(self, capsys):
        with pytest.raises(SystemExit) as excinfo:
            main(["stream", "--help"])
        assert excinfo.value.code == 0
        help_text = capsys.readouterr().out
        assert "--checkpoint" in help_text and "--beta" in help_text

    @pytest.mark.parametrize("command, flags", [
        ("stream", ["--checkpoint", "--resume", "--infer", "--null"]),
        ("bands", ["--bridge-reps", "--sparsity"]),
        ("reproduce", ["--sizes", "--reps"]),
        ("qq", ["--dgp", "--df", "--n"]),
        ("tail", ["--tau", "--x", "--n"]),
    ])
    def test_help_for_every_command(self, capsys, command, flags):
        with pytest.raises(SystemExit) as excinfo:
            main([command, "--help"])
        assert excinfo.value.code == 0
        help_text = capsys.readouterr().out
        for flag in ["--beta", "--c-gamma", "--a", "--grid", "--alpha", "--seed", "--format", "--output", *flags]:
            assert flag in help_text

    @pytest.mark.parametrize("flags", [["--beta", "1.5"], ["--a", "0.5"], ["--grid", "0.5,0.2"],
                                       ["--sparsity", "known:cauchy"], ["--bridge-reps", "10"]])
    def test_invalid_configuration(self, tmp_path, flags):
        data = _write_rows(tmp_path / "data.csv", [[1.0], [2.0]])
        assert main(["bands", str(data), *flags]) == ExitCode.USAGE


class TestStudies:

    def test_unknown_preset(self):
        assert main(["reproduce", "table9"]) == ExitCode.UNKNOWN_PRESET

    def test_reduced_table(self, capsys):
        assert main(["reproduce", "table1", "--reps", "10", "--sizes", "100", "--format", "csv"]) == 0
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == "dgp,sparsity,n,beta,alpha,replications,rejections,rate,se,reference"
        assert len(lines) == 13

    def test_crossing(self, capsys):
        assert main(["reproduce", "crossing", "--reps", "5", "--sizes", "100"]) == 0
        assert json.loads(capsys.readouterr().out)["smoothed_rate"] == 0.0

    def test_qq(self, capsys):
        assert main(["qq", "--n", "100", "--reps", "20", "--bridge-reps", "1000"]) == 0
        report = json.loads(capsys.readouterr().out)
        assert len(report["empirical"]) == 20

    def test_tail(self, capsys):
        assert main(["tail", "--n", "200", "--reps", "30", "--tau", "0.9", "--x", "0,0.1,0.5"]) == 0
        curve = json.loads(capsys.readouterr().out)
        assert curve["x_values"] == [0.0, 0.1, 0.5]
        assert curve["averaged"][0] == 1.0

    def test_tail_invalid_thresholds(self):
        assert main(["tail", "--n", "50", "--reps", "5", "--x", "0.2,0.1"]) == ExitCode.USAGE


GOLDEN = Path(__file__).parent / "golden"


class TestGoldenOutput:
    """Outputs on the checked-in 20-row input against fixtures under tests/golden."""

    @pytest.fixture
    def schema(self):
        return json.loads((GOLDEN / "schema.json").read_text(encoding="utf-8"))

    def test_stream_csv(self, tmp_path):
        out = tmp_path / "stream.csv"
        assert main(["stream", str(GOLDEN / "stream_input.csv"), "--grid", "0.25,0.5,0.75",
                     "--seed", "11", "--format", "csv", "--output", str(out)]) == ExitCode.OK
        assert out.read_text(encoding="utf-8") == (GOLDEN / "stream.csv").read_text(encoding="utf-8")

    def test_stream_json_schema(self, tmp_path, schema):
        out = tmp_path / "stream.json"
        assert main(["stream", str(GOLDEN / "stream_input.csv"), "--grid", "0.25,0.5,0.75",
                     "--seed", "11", "--output", str(out)]) == ExitCode.OK
        document = json.loads(out.read_text(encoding="utf-8"))
        assert list(document) == schema["stream"]
        assert list(document["grid"]) == schema["grid"]
        assert list(document["schedule"]) == schema["schedule"]
        assert document["step"] == 20
        assert np.array(document["averaged"]).shape == (2, 3)

    def test_bands_csv(self, tmp_path, schema):
        out = tmp_path / "bands.csv"
        assert main(["bands", str(GOLDEN / "stream_input.csv"), "--grid", "0.25,0.5,0.75", "--seed", "11",
                     "--bridge-reps", "1000", "--format", "csv", "--output", str(out)]) == ExitCode.OK
        with open(out, encoding="utf-8", newline="") as handle:
            rows = list(csv.DictReader(handle))
        assert list(rows[0]) == schema["bands_csv"]
        with open(GOLDEN / "bands_estimates.csv", encoding="utf-8", newline="") as handle:
            expected = list(csv.DictReader(handle))
        assert [{key: row[key] for key in expected[0]} for row in rows] == expected
        assert len({row["critical_value"] for row in rows}) == 1
        assert all(float(row["lo"]) < float(row["estimate"]) < float(row["hi"]) for row in rows)

    def test_bands_json_schema(self, tmp_path, schema):
        out = tmp_path / "bands.json"
        assert main(["bands", str(GOLDEN / "stream_input.csv"), "--grid", "0.25,0.5,0.75", "--seed", "11",
                     "--bridge-reps", "1000", "--output", str(out)]) == ExitCode.OK
        document = json.loads(out.read_text(encoding="utf-8"))
        assert list(document) == schema["bands"]
        assert all(list(band) == schema["band"] for band in document["bands"])
        for band in document["bands"]:
            assert band["hi"] - band["estimate"] == pytest.approx(band["estimate"] - band["lo"], rel=1e-9)

    def test_bands_are_reproducible(self, tmp_path):
        outputs = []
        for name in ("first.json", "second.json"):
            out = tmp_path / name
            assert main(["bands", str(GOLDEN / "stream_input.csv"), "--seed", "11", "--bridge-reps", "1000",
                         "--output", str(out)]) == ExitCode.OK
            outputs.append(out.read_text(encoding="utf-8"))
        assert outputs[0] == outputs[1]
