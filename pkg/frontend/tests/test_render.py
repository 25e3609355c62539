import shutil
import subprocess
import sys

import pytest

from fraclms_plots.render import (
    CRITICAL_HEADER,
    DESCENT_HEADER,
    RESULTS_HEADER,
    FigureKind,
    FigureSpec,
    Scale,
    SchemaError,
    main,
    render,
)


def results_csv(tmp_path, name="results.csv"):
    """Synthetic file matching the producer's learning-curve schema."""
    lines = [",".join(RESULTS_HEADER)]
    for protocol in ("iii:snr10",):
        for algorithm, alphas in (("lms", [1.0]), ("flms1_mod", [0.9, 0.5])):
            for alpha in alphas:
                for iteration in range(6):
                    md = 1.0 / (iteration + 1)
                    lines.append(
                        f"{protocol},{algorithm},{alpha},{iteration},{md},0.0,0.0"
                    )
    path = tmp_path / name
    path.write_text("\n".join(lines) + "\n")
    return path


def descent_csv(tmp_path):
    lines = [",".join(DESCENT_HEADER)]
    t = 0.5
    for n in range(40):
        t = t + 0.1 * (1.5 - t)
        lines.append(f"{n},{t},{abs(t - 1.5)}")
    path = tmp_path / "descent.csv"
    path.write_text("\n".join(lines) + "\n")
    return path


def critical_csv(tmp_path):
    lines = [",".join(CRITICAL_HEADER)]
    for alpha in (0.4, 0.6, 0.8):
        lines.append(f"mse,{alpha},{1 + alpha},{1 - alpha},1e-8,1e-8,False")
        lines.append(f"example,{alpha},{0.3 + alpha / 10},0.0,1e-8,0.0,False")
    path = tmp_path / "critical_points.csv"
    path.write_text("\n".join(lines) + "\n")
    return path


class TestLearningCurves:
    def test_one_line_per_algorithm_alpha(self, tmp_path):
        spec = FigureSpec(
            str(results_csv(tmp_path)), FigureKind.LEARNING_CURVES, str(tmp_path / "fig.png")
        )
        summary = render(spec)
        assert summary == {"panels": 1, "lines": 3}
        assert (tmp_path / "fig.png").stat().st_size > 1000

    def test_missing_column_is_named(self, tmp_path):
        path = tmp_path / "bad.csv"
        header = [c for c in RESULTS_HEADER if c != "mean_md"]
        path.write_text(",".join(header) + "\n" + "x,lms,1.0,0,0.0,0.0\n")
        spec = FigureSpec(str(path), FigureKind.LEARNING_CURVES, str(tmp_path / "fig.png"))
        with pytest.raises(SchemaError, match="mean_md"):
            render(spec)
        assert not (tmp_path / "fig.png").exists()

    def test_empty_body_is_error(self, tmp_path):
        path = tmp_path / "empty.csv"
        path.write_text(",".join(RESULTS_HEADER) + "\n")
        spec = FigureSpec(str(path), FigureKind.LEARNING_CURVES, str(tmp_path / "fig.png"))
        with pytest.raises(SchemaError, match="no data rows"):
            render(spec)
        assert not (tmp_path / "fig.png").exists()

    def test_rendering_is_idempotent_and_readonly(self, tmp_path):
        csv_path = results_csv(tmp_path)
        before = csv_path.read_bytes()
        out_a, out_b = tmp_path / "a.png", tmp_path / "b.png"
        render(FigureSpec(str(csv_path), FigureKind.LEARNING_CURVES, str(out_a)))
        render(FigureSpec(str(csv_path), FigureKind.LEARNING_CURVES, str(out_b)))
        assert out_a.read_bytes() == out_b.read_bytes()
        assert csv_path.read_bytes() == before

    def test_linear_scale_option(self, tmp_path):
        spec = FigureSpec(
            str(results_csv(tmp_path)),
            FigureKind.LEARNING_CURVES,
            str(tmp_path / "fig.png"),
            scale=Scale.LINEAR,
        )
        render(spec)
        assert (tmp_path / "fig.png").exists()


class TestDescent:
    def test_two_panels(self, tmp_path):
        spec = FigureSpec(str(descent_csv(tmp_path)), FigureKind.DESCENT, str(tmp_path / "d.png"))
        assert render(spec)["panels"] == 2
        assert (tmp_path / "d.png").stat().st_size > 1000

    def test_schema(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("step,value\n0,1\n")
        spec = FigureSpec(str(path), FigureKind.DESCENT, str(tmp_path / "d.png"))
        with pytest.raises(SchemaError, match="abs_error"):
            render(spec)


class TestCriticalPoints:
    def test_panels_per_family(self, tmp_path):
        spec = FigureSpec(
            str(critical_csv(tmp_path)), FigureKind.CRITICAL_POINTS, str(tmp_path / "c.png")
        )
        summary = render(spec)
        assert summary["panels"] == 2
        assert (tmp_path / "c.png").stat().st_size > 1000


class TestCommandLine:
    def test_cli_roundtrip(self, tmp_path):
        csv_path = results_csv(tmp_path)
        out = tmp_path / "fig.png"
        code = main(["--kind", "learning_curves", "--in", str(csv_path), "--out", str(out)])
        assert code == 0
        assert out.exists()

    def test_cli_schema_error_exit(self, tmp_path, capsys):
        path = tmp_path / "bad.csv"
        path.write_text("a,b\n1,2\n")
        code = main(["--kind", "learning_curves", "--in", str(path), "--out", str(tmp_path / "f.png")])
        assert code == 1
        assert "missing column" in capsys.readouterr().err

    def test_cli_missing_file(self, tmp_path):
        code = main(
            ["--kind", "descent", "--in", str(tmp_path / "nope.csv"), "--out", str(tmp_path / "f.png")]
        )
        assert code == 1


@pytest.mark.skipif(shutil.which("fraclms") is None, reason="producer CLI not installed")
class TestAcceptanceAc11:
    """Render a real learning-curve file produced by the identification CLI."""

    def test_render_protocol_output(self, tmp_path):
        proc = subprocess.run(
            [
                "fraclms", "run-protocol", "iii", "--rounds", "2", "--iterations", "30",
                "--out", str(tmp_path),
            ],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0, proc.stderr
        csv_path = tmp_path / "protocol_iii.csv"
        out = tmp_path / "fig6a.png"
        summary = render(FigureSpec(str(csv_path), FigureKind.LEARNING_CURVES, str(out)))
        # one line per (algorithm, alpha): lms + 6 orders for each corrected rule
        assert summary == {"panels": 1, "lines": 13}
        assert out.stat().st_size > 1000

        # schema violation: drop a column, must error out naming it
        lines = csv_path.read_text().strip().split("\n")
        broken = tmp_path / "broken.csv"
        broken.write_text(
            "\n".join(",".join(line.split(",")[:-1]) for line in lines) + "\n"
        )
        with pytest.raises(SchemaError, match="diverged_rate"):
            render(FigureSpec(str(broken), FigureKind.LEARNING_CURVES, str(tmp_path / "x.png")))
        print("AC11 PASS: learning-curve figure rendered; schema violation rejected")
