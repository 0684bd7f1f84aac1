"""Rendering tests: the four figure kinds from real sweep summaries, byte
determinism, schema failure modes, and the CLI contract.

The fixture CSVs are genuine runner outputs (the n=5 comparison sweep and
the 30-cell chain grid), so these tests double as the secondary acceptance:
all four kinds render from them, and mismatched input fails cleanly.
"""

import shutil
from pathlib import Path

import pytest

from hevqe_plots import DataError, PlotJob, SchemaError, render
from hevqe_plots.cli import main

FIXTURES = Path(__file__).parent / "fixtures"
MAXCUT_CSV = FIXTURES / "maxcut_summary.csv"
HEIS_CSV = FIXTURES / "heisenberg_summary.csv"

CASES = [
    ("maxcut_alpha", MAXCUT_CSV),
    ("maxcut_pbest", MAXCUT_CSV),
    ("heis_energy", HEIS_CSV),
    ("heis_error", HEIS_CSV),
]


class TestRender:
    @pytest.mark.parametrize("kind,csv_path", CASES)
    def test_all_kinds_render_both_formats(self, tmp_path, kind, csv_path):
        svg, png = render(PlotJob(str(csv_path), kind, str(tmp_path / kind)))
        assert svg.exists() and svg.stat().st_size > 0
        assert png.exists() and png.stat().st_size > 0
        assert svg.suffix == ".svg" and png.suffix == ".png"

    @pytest.mark.parametrize("kind,csv_path", CASES)
    def test_rerender_is_byte_identical(self, tmp_path, kind, csv_path):
        s1, p1 = render(PlotJob(str(csv_path), kind, str(tmp_path / "a")))
        s2, p2 = render(PlotJob(str(csv_path), kind, str(tmp_path / "b")))
        assert s1.read_bytes() == s2.read_bytes()
        assert p1.read_bytes() == p2.read_bytes()

    def test_input_never_mutated(self, tmp_path):
        copy = tmp_path / "input.csv"
        shutil.copy(MAXCUT_CSV, copy)
        before = copy.read_bytes()
        render(PlotJob(str(copy), "maxcut_alpha", str(tmp_path / "out")))
        assert copy.read_bytes() == before

    def test_out_suffix_is_treated_as_base(self, tmp_path):
        svg, png = render(
            PlotJob(str(MAXCUT_CSV), "maxcut_alpha", str(tmp_path / "chart.svg"))
        )
        assert svg == tmp_path / "chart.svg"
        assert png == tmp_path / "chart.png"


class TestFailureModes:
    def test_wrong_family_schema_mismatch(self, tmp_path):
        with pytest.raises(SchemaError) as exc:
            render(PlotJob(str(MAXCUT_CSV), "heis_energy", str(tmp_path / "x")))
        message = str(exc.value)
        assert "missing" in message and "error_rel" in message
        assert not list(tmp_path.iterdir())  # nothing written

    def test_header_only_csv(self, tmp_path):
        empty = tmp_path / "empty.csv"
        empty.write_text(MAXCUT_CSV.read_text().splitlines()[0] + "\n")
        with pytest.raises(DataError):
            render(PlotJob(str(empty), "maxcut_alpha", str(tmp_path / "out")))
        assert not (tmp_path / "out.svg").exists()
        assert not (tmp_path / "out.png").exists()

    def test_wrong_schema_tag(self, tmp_path):
        lines = MAXCUT_CSV.read_text().splitlines()
        doctored = [lines[0]] + [
            line.replace("maxcut_summary_v1", "maxcut_summary_v9", 1)
            for line in lines[1:]
        ]
        bad = tmp_path / "bad.csv"
        bad.write_text("\n".join(doctored) + "\n")
        with pytest.raises(SchemaError, match="maxcut_summary_v9"):
            render(PlotJob(str(bad), "maxcut_alpha", str(tmp_path / "out")))

    def test_missing_file(self, tmp_path):
        with pytest.raises(SchemaError, match="not found"):
            render(PlotJob(str(tmp_path / "nope.csv"), "maxcut_alpha", "x"))

    def test_unknown_kind(self):
        with pytest.raises(SchemaError, match="unknown kind"):
            PlotJob(str(MAXCUT_CSV), "scatter3d", "x")


class TestCli:
    def test_render_success(self, tmp_path, capsys):
        code = main(["render", "--in", str(HEIS_CSV), "--kind", "heis_error",
                     "--out", str(tmp_path / "err")])
        assert code == 0
        assert "wrote" in capsys.readouterr().out
        assert (tmp_path / "err.svg").exists() and (tmp_path / "err.png").exists()

    def test_schema_mismatch_exit_2_with_diff(self, tmp_path, capsys):
        code = main(["render", "--in", str(HEIS_CSV), "--kind", "maxcut_alpha",
                     "--out", str(tmp_path / "x")])
        assert code == 2
        err = capsys.readouterr().err
        assert "schema error" in err and "missing" in err

    def test_empty_data_exit_1(self, tmp_path, capsys):
        empty = tmp_path / "empty.csv"
        empty.write_text(HEIS_CSV.read_text().splitlines()[0] + "\n")
        code = main(["render", "--in", str(empty), "--kind", "heis_energy",
                     "--out", str(tmp_path / "x")])
        assert code == 1
        assert "data error" in capsys.readouterr().err
        assert not (tmp_path / "x.svg").exists()

    def test_bad_kind_usage_error(self, tmp_path):
        with pytest.raises(SystemExit) as exc:
            main(["render", "--in", str(HEIS_CSV), "--kind", "pie",
                  "--out", str(tmp_path / "x")])
        assert exc.value.code == 2
