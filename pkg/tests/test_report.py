import csv
import io
import json

from cli.config import OutputFormat
from cli.report import ReportWriter, check_record, render_csv, result_record, state_record
from formfactor.diagonal import ff_diagonal
from formfactor.result import ORACLE_TOLERANCE, FormFactorKind


class TestRecords:
    def test_check_record(self):
        assert check_record("s-sum", 1e-12, 1e-10, z=1j)["passed"] is True
        record = check_record("s-sum", float("inf"), 1e-10)
        assert record["passed"] is False
        assert record["error"] == "inf"

    def test_check_record_passed_override(self):
        record = check_record("hab-sign-mutation", 2.0, 1e-8, passed=True, control=True)
        assert record["passed"] is True
        assert record["control"] is True

    def test_state_record(self, two_site_state):
        record = state_record(two_site_state)
        assert record["sector"] == [1, 0]
        assert record["on_shell"] is True
        assert record["admissible"] is True
        json.dumps(record)

    def test_result_record(self, two_site_state):
        record = result_record(ff_diagonal(1, 0.5, two_site_state))
        assert record["kind"] == "diagonal"
        assert record["s"] == 1
        assert record["tolerance"] == ORACLE_TOLERANCE[FormFactorKind.DIAGONAL]
        assert result_record(ff_diagonal(1, 0.5, two_site_state), tolerance=1e-3)["tolerance"] == 1e-3
        json.dumps(record)


class TestReportWriter:
    def test_json_lines(self, tmp_path):
        path = tmp_path / "report.jsonl"
        with ReportWriter(str(path), OutputFormat.JSON) as writer:
            writer.write({"record": "a", "x": 1})
            writer.write({"record": "b", "y": [1, 2]})
        lines = path.read_text(encoding="utf-8").splitlines()
        assert [json.loads(line)["record"] for line in lines] == ["a", "b"]

    def test_csv_written_on_close(self, tmp_path):
        path = tmp_path / "report.csv"
        writer = ReportWriter(str(path), OutputFormat.CSV)
        with writer:
            writer.write({"record": "a", "x": 1})
            writer.write({"record": "b", "y": [1, 2]})
        rows = list(csv.DictReader(io.StringIO(path.read_text(encoding="utf-8"))))
        assert rows[0] == {"record": "a", "x": "1", "y": ""}
        assert json.loads(rows[1]["y"]) == [1, 2]

    def test_render_csv_columns(self):
        text = render_csv([{"b": 1}, {"a": 2, "b": 3}])
        assert text.splitlines()[0] == "b,a"
