"""Render figures from fraclms result CSVs.

Three figure kinds, one per result-file schema:

* ``learning_curves`` -- mean-deviation learning curves; one panel per
  protocol label in the file, one line per (algorithm, alpha), log-scaled
  y axis by default.
* ``descent`` -- two panels: the iterate against the step index, and the
  distance to the optimum (log scale).
* ``critical_points`` -- real critical-point loci against the fractional
  order, one panel per root family.

Input schemas are matched exactly against the producing tool's headers;
any mismatch is an error naming the offending columns, never a silent
coercion. Rendering is read-only and deterministic: no timestamps are
embedded, so re-rendering an unchanged input reproduces the image
byte-for-byte.

Exit codes: 0 success, 1 schema or data error, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import enum
import sys
from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

RESULTS_HEADER = ["protocol", "algorithm", "alpha", "iteration", "mean_md",
                  "complex_fire_rate", "diverged_rate"]
DESCENT_HEADER = ["n", "t", "abs_error"]
CRITICAL_HEADER = ["family", "alpha", "root_plus", "root_minus",
                   "residual_plus", "residual_minus", "imaginary"]

_PNG_METADATA = {"Software": "fraclms-plots"}


class SchemaError(ValueError):
    """Input file does not match the expected result schema."""


class FigureKind(enum.Enum):
    LEARNING_CURVES = "learning_curves"
    DESCENT = "descent"
    CRITICAL_POINTS = "critical_points"


class Scale(enum.Enum):
    LINEAR = "linear"
    LOG = "log"


@dataclass(frozen=True)
class FigureSpec:
    input_csv: str
    figure_kind: FigureKind
    output_image: str
    scale: Scale = Scale.LOG


_EXPECTED = {
    FigureKind.LEARNING_CURVES: RESULTS_HEADER,
    FigureKind.DESCENT: DESCENT_HEADER,
    FigureKind.CRITICAL_POINTS: CRITICAL_HEADER,
}


def _read_rows(path: str, expected_header: list[str]) -> list[dict]:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path}: empty file, expected header {','.join(expected_header)}")
        if header != expected_header:
            missing = [col for col in expected_header if col not in header]
            extra = [col for col in header if col not in expected_header]
            parts = []
            if missing:
                parts.append(f"missing column(s): {', '.join(missing)}")
            if extra:
                parts.append(f"unexpected column(s): {', '.join(extra)}")
            if not parts:
                parts.append("columns out of order")
            raise SchemaError(f"{path}: header mismatch ({'; '.join(parts)})")
        rows = [dict(zip(expected_header, row)) for row in reader if row]
    if not rows:
        raise SchemaError(f"{path}: no data rows")
    return rows


def _line_style(index: int):
    colors = plt.rcParams["axes.prop_cycle"].by_key()["color"]
    dashes = ["-", "--", "-.", ":"]
    return colors[index % len(colors)], dashes[(index // len(colors)) % len(dashes)]


def _render_learning_curves(spec: FigureSpec) -> dict:
    rows = _read_rows(spec.input_csv, RESULTS_HEADER)
    protocols = sorted({row["protocol"] for row in rows})
    lines = 0
    fig, axes = plt.subplots(
        1, len(protocols), figsize=(6.0 * len(protocols), 4.5), squeeze=False
    )
    for ax, protocol in zip(axes[0], protocols):
        subset = [row for row in rows if row["protocol"] == protocol]
        series = sorted({(row["algorithm"], row["alpha"]) for row in subset})
        for index, (algorithm, alpha) in enumerate(series):
            points = [
                (int(row["iteration"]), float(row["mean_md"]))
                for row in subset
                if row["algorithm"] == algorithm and row["alpha"] == alpha
            ]
            points.sort()
            label = algorithm if algorithm == "lms" else f"{algorithm} a={alpha}"
            color, dash = _line_style(index)
            ax.plot(
                [p[0] for p in points], [p[1] for p in points],
                dash, color=color, linewidth=1.2, label=label,
            )
            lines += 1
        ax.set_title(protocol)
        ax.set_xlabel("iteration")
        ax.set_ylabel("mean deviation")
        if spec.scale is Scale.LOG:
            ax.set_yscale("log")
        ax.legend(fontsize=7)
        ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    fig.savefig(spec.output_image, dpi=120, metadata=_PNG_METADATA)
    plt.close(fig)
    return {"panels": len(protocols), "lines": lines}


def _render_descent(spec: FigureSpec) -> dict:
    rows = _read_rows(spec.input_csv, DESCENT_HEADER)
    n = [int(row["n"]) for row in rows]
    t = [float(row["t"]) for row in rows]
    err = [float(row["abs_error"]) for row in rows]
    fig, (ax_t, ax_e) = plt.subplots(1, 2, figsize=(11.0, 4.2))
    ax_t.plot(n, t, "-", linewidth=1.2)
    ax_t.set_xlabel("step")
    ax_t.set_ylabel("iterate")
    ax_t.set_title("optimization path")
    ax_t.grid(True, alpha=0.3)
    ax_e.plot(n, err, "-", linewidth=1.2)
    ax_e.set_xlabel("step")
    ax_e.set_ylabel("|iterate - optimum|")
    ax_e.set_title("learning curve")
    if spec.scale is Scale.LOG:
        ax_e.set_yscale("log")
    ax_e.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    fig.savefig(spec.output_image, dpi=120, metadata=_PNG_METADATA)
    plt.close(fig)
    return {"panels": 2, "lines": 2}


def _render_critical_points(spec: FigureSpec) -> dict:
    rows = _read_rows(spec.input_csv, CRITICAL_HEADER)
    families = sorted({row["family"] for row in rows})
    fig, axes = plt.subplots(1, len(families), figsize=(5.5 * len(families), 4.2), squeeze=False)
    for ax, family in zip(axes[0], families):
        subset = [row for row in rows if row["family"] == family and row["imaginary"] == "False"]
        subset.sort(key=lambda row: float(row["alpha"]))
        alphas = [float(row["alpha"]) for row in subset]
        for index, column in enumerate(("root_plus", "root_minus")):
            color, dash = _line_style(index)
            values = [complex(row[column]).real for row in subset]
            ax.plot(alphas, values, dash, color=color, marker="o", markersize=3, label=column)
        ax.set_title(f"{family} critical points")
        ax.set_xlabel("fractional order")
        ax.set_ylabel("critical point")
        ax.legend(fontsize=8)
        ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(spec.output_image, dpi=120, metadata=_PNG_METADATA)
    plt.close(fig)
    return {"panels": len(families), "lines": 2 * len(families)}


_RENDERERS = {
    FigureKind.LEARNING_CURVES: _render_learning_curves,
    FigureKind.DESCENT: _render_descent,
    FigureKind.CRITICAL_POINTS: _render_critical_points,
}


def render(spec: FigureSpec) -> dict:
    """Render one figure; raises SchemaError on malformed input.

    Returns a small summary (panel and line counts) for callers that want
    to sanity-check what was drawn.
    """
    return _RENDERERS[spec.figure_kind](spec)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="render", description=__doc__)
    parser.add_argument("--kind", required=True, choices=[k.value for k in FigureKind])
    parser.add_argument("--in", dest="input_csv", required=True)
    parser.add_argument("--out", dest="output_image", required=True)
    parser.add_argument("--scale", choices=[s.value for s in Scale], default="log")
    args = parser.parse_args(argv)
    spec = FigureSpec(
        input_csv=args.input_csv,
        figure_kind=FigureKind(args.kind),
        output_image=args.output_image,
        scale=Scale(args.scale),
    )
    try:
        summary = render(spec)
    except (SchemaError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {spec.output_image} ({summary['panels']} panel(s), {summary['lines']} line(s))")
    return 0


if __name__ == "__main__":
    sys.exit(main())
