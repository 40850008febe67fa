import shutil
from pathlib import Path

import pytest

from plotkit import FigureSpec, PRESETS, SchemaError, build, read_summary, render
from plotkit.cli import main

GOLDEN = Path(__file__).parent / "golden"


def golden(preset: str) -> Path:
    return GOLDEN / f"{preset}_summary.csv"


class TestSchema:
    def test_reads_golden(self):
        rows = read_summary(golden("fig4"))
        assert rows and rows[0]["scenario_id"].startswith("fig4")
        assert isinstance(rows[0]["value"], float)

    def test_missing_columns_listed(self, tmp_path):
        p = tmp_path / "bad.csv"
        p.write_text("scenario_id,value\nx,1.0\n")
        with pytest.raises(SchemaError) as exc:
            read_summary(p)
        for col in ("estimator_id", "param_value", "std_error"):
            assert col in str(exc.value)

    def test_empty_file_rejected(self, tmp_path):
        p = tmp_path / "empty.csv"
        p.write_text("")
        with pytest.raises(SchemaError, match="empty"):
            read_summary(p)

    def test_header_only_rejected(self, tmp_path):
        p = tmp_path / "hdr.csv"
        p.write_text(golden("fig4").read_text().splitlines()[0] + "\n")
        with pytest.raises(SchemaError, match="no data rows"):
            read_summary(p)

    def test_comment_lines_skipped(self, tmp_path):
        p = tmp_path / "c.csv"
        p.write_text("# comment\n" + golden("fig4").read_text())
        assert read_summary(p)


class TestRender:
    @pytest.mark.parametrize("preset", PRESETS)
    def test_renders_every_preset(self, preset, tmp_path):
        out = render(FigureSpec(preset, golden(preset),
                                tmp_path / f"{preset}.svg"))
        assert out.exists() and out.stat().st_size > 0

    def test_default_output_is_vector(self, tmp_path):
        out = render(FigureSpec("fig4", golden("fig4"), tmp_path / "fig4"))
        assert out.suffix == ".svg"
        assert b"<svg" in out.read_bytes()[:200]

    def test_input_untouched_by_render(self, tmp_path):
        src = tmp_path / "in.csv"
        shutil.copy(golden("fig4"), src)
        before = src.read_bytes()
        render(FigureSpec("fig4", src, tmp_path / "out.svg"))
        assert src.read_bytes() == before

    def test_unknown_preset_rejected(self, tmp_path):
        with pytest.raises(SchemaError, match="unknown figure preset"):
            FigureSpec("fig99", golden("fig4"), tmp_path / "x.svg")

    def test_wrong_preset_csv_mismatch(self, tmp_path):
        with pytest.raises(SchemaError, match="missing columns"):
            build(FigureSpec("fig4", golden("fig2"), tmp_path / "x.svg"))

    def test_empty_input_writes_no_image(self, tmp_path):
        empty = tmp_path / "empty.csv"
        empty.write_text("")
        out = tmp_path / "nothing.svg"
        with pytest.raises(SchemaError):
            render(FigureSpec("fig1c", empty, out))
        assert not out.exists()

    def test_fig4_shows_reference_bars(self, tmp_path):
        import matplotlib.pyplot as plt
        fig = build(FigureSpec("fig4", golden("fig4"), tmp_path / "x.svg"))
        ax = fig.axes[0]
        heights = [p.get_height() for p in ax.patches]
        assert any(abs(h - 6.0) < 1e-9 for h in heights)
        assert any(abs(h - 1287 / 7) < 1e-9 for h in heights)
        labels = {t.get_text() for t in ax.texts}
        assert {"6", "184"} <= labels
        plt.close(fig)


class TestCli:
    def test_plot_roundtrip(self, tmp_path, capsys):
        out = tmp_path / "fig1c.svg"
        rc = main(["plot", "fig1c", "--in", str(golden("fig1c")),
                   "--out", str(out)])
        assert rc == 0 and out.exists()

    def test_schema_error_exit_code(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("a,b\n1,2\n")
        assert main(["plot", "fig4", "--in", str(bad),
                     "--out", str(tmp_path / "x.svg")]) == 2

    def test_missing_file_exit_code(self, tmp_path):
        assert main(["plot", "fig4", "--in", str(tmp_path / "nope.csv"),
                     "--out", str(tmp_path / "x.svg")]) == 2

    def test_unknown_preset_parser_error(self):
        with pytest.raises(SystemExit):
            main(["plot", "fig99", "--in", "x", "--out", "y"])
