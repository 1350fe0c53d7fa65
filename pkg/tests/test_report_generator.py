"""
Tests for run report, manifest and histogram output.
"""

import yaml

from src.metrics import SuperkmerStats, compute_metrics
from src.report_generator import HISTOGRAM_FILE, MANIFEST_FILE, REPORT_FILE, ReportGenerator


def make_report():
    stats = SuperkmerStats(records=2, superkmers=3, superkmer_symbols=40, kmers=30)
    report = compute_metrics(
        11,
        [10, 20, 0],
        stats,
        {"schedule": 0.1, "extract": 0.2, "count": 0.3},
        distinct=25,
        emitted_distinct=25,
        emitted_total=30,
        predicted_loads=[12.0, 18.0, 0.0],
    )
    report.config = {
        "m": 5,
        "granularity": "signature",
        "partitioner": "lpt",
        "canonical": False,
        "output_format": "bin",
    }
    return report


class TestReportFiles:
    """Tests for YAML output."""

    def test_report_round_trip(self, tmp_path):
        reports = ReportGenerator(tmp_path)
        path = reports.write_report(make_report())
        assert path == tmp_path / REPORT_FILE
        loaded = reports.load_report()
        assert loaded["partition_loads"] == [10, 20, 0]
        assert loaded["config"]["partitioner"] == "lpt"

    def test_manifest(self, tmp_path):
        reports = ReportGenerator(tmp_path)
        reports.write_manifest(make_report(), ["part-0.kbin", "part-1.kbin"])
        manifest = reports.load_manifest()
        assert manifest["files"] == ["part-0.kbin", "part-1.kbin"]
        assert manifest["mode"] == "forward"
        assert manifest["format"] == "bin"
        assert (manifest["k"], manifest["distinct"], manifest["total"]) == (11, 25, 30)

    def test_manifest_is_plain_yaml(self, tmp_path):
        path = ReportGenerator(tmp_path).write_manifest(make_report(), [])
        assert yaml.safe_load(path.read_text())["files"] == []

    def test_generate_all(self, tmp_path):
        report = make_report()
        report.outputs = [str(tmp_path / "part-0.kbin"), str(tmp_path / "part-1.kbin")]
        reports = ReportGenerator(str(tmp_path))
        paths = reports.generate_all(report)
        assert [p.name for p in paths] == [REPORT_FILE, MANIFEST_FILE, HISTOGRAM_FILE]
        assert reports.load_manifest()["files"] == ["part-0.kbin", "part-1.kbin"]


class TestHistogram:
    """Tests for the per-partition load table."""

    def test_write_and_load(self, tmp_path):
        reports = ReportGenerator(tmp_path)
        path = reports.write_histogram(make_report())
        assert path.name == HISTOGRAM_FILE
        assert path.read_text().splitlines()[0] == "partition\tkmers\tpredicted"
        frame = reports.load_histogram()
        assert frame["kmers"].tolist() == [10, 20, 0]
        assert frame["predicted"].tolist() == [12.0, 18.0, 0.0]

    def test_missing_prediction_is_zero(self, tmp_path):
        report = make_report()
        report.predicted_loads = []
        reports = ReportGenerator(tmp_path)
        reports.write_histogram(report)
        assert reports.load_histogram()["predicted"].tolist() == [0.0, 0.0, 0.0]


class TestRendering:
    """Tests for human-readable tables."""

    def test_summary(self):
        text = ReportGenerator.render_summary(make_report().to_dict())
        assert "| Skew (max/mean)" in text
        assert "2.000" in text
        assert "Time: count" in text

    def test_loads_heaviest_first(self):
        lines = ReportGenerator.render_loads(make_report().to_dict(), limit=2).splitlines()
        assert len(lines) == 4
        cells = [c.strip() for c in lines[2].strip("|").split("|")]
        assert cells == ["1", "20", "18"]
