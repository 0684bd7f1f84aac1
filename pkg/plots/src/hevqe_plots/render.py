"""Render summary-CSV charts to SVG and PNG.

Four figure kinds:
  maxcut_alpha   mean final approximation ratio per ansatz, spread over seeds
  maxcut_pbest   mean probability of an optimal cut per ansatz, same layout
  heis_energy    chain energy vs field, one curve per (impurity site, frozen
                 state), oracle reference dotted underneath
  heis_error     relative error vs field on a log axis with the 0.01 guide

Rendering is deterministic: fixed style, fixed SVG hash salt, no embedded
timestamps, so re-rendering an identical CSV reproduces identical bytes.
Input files are never modified.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import matplotlib
import numpy as np

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402  (backend must be pinned first)

MAXCUT_SCHEMA = "maxcut_summary_v1"
HEIS_SCHEMA = "heisenberg_summary_v1"

MAXCUT_COLUMNS = [
    "schema", "ansatz", "n", "instance_seed", "opt_seed", "budget",
    "best_energy", "c_opt", "alpha", "p_best",
]
HEIS_COLUMNS = [
    "schema", "n", "J", "d", "frozen", "h", "reps", "budget",
    "energy", "e_ref", "error_abs", "error_rel", "magnetization",
]

KINDS = {
    "maxcut_alpha": (MAXCUT_COLUMNS, MAXCUT_SCHEMA),
    "maxcut_pbest": (MAXCUT_COLUMNS, MAXCUT_SCHEMA),
    "heis_energy": (HEIS_COLUMNS, HEIS_SCHEMA),
    "heis_error": (HEIS_COLUMNS, HEIS_SCHEMA),
}

ERROR_GUIDE = 0.01
HASH_SALT = "hevqe-plots"

_STYLE = {
    "figure.figsize": (6.0, 4.0),
    "figure.dpi": 130,
    "savefig.dpi": 130,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "font.size": 10,
    "svg.hashsalt": HASH_SALT,
}

# stable colors: impurity site d -> color; ansatz order is first appearance
_D_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#8c564b")


class SchemaError(Exception):
    """Input CSV header does not match the kind's schema; carries the diff."""


class DataError(Exception):
    """Structurally valid CSV without usable rows (e.g. header only)."""


@dataclass(frozen=True)
class PlotJob:
    input_csv: str
    kind: str
    out_path: str

    def __post_init__(self):
        if self.kind not in KINDS:
            raise SchemaError(
                f"unknown kind {self.kind!r}; expected one of {sorted(KINDS)}"
            )


def _column_diff(expected: list, got: list) -> str:
    missing = [c for c in expected if c not in got]
    unexpected = [c for c in got if c not in expected]
    parts = [f"expected columns {expected}", f"got {got}"]
    if missing:
        parts.append(f"missing: {missing}")
    if unexpected:
        parts.append(f"unexpected: {unexpected}")
    return "; ".join(parts)


def load_rows(path: Path, kind: str) -> list:
    columns, schema_tag = KINDS[kind]
    if not path.exists():
        raise SchemaError(f"input CSV not found: {path}")
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        if list(header) != columns:
            raise SchemaError(_column_diff(columns, list(header)))
        rows = list(reader)
    if not rows:
        raise DataError(f"{path} has a header but no data rows")
    bad = {row["schema"] for row in rows if row["schema"] != schema_tag}
    if bad:
        raise SchemaError(
            f"schema column must be {schema_tag!r}, found {sorted(bad)}"
        )
    return rows


def _out_base(out_path: str) -> Path:
    base = Path(out_path)
    if base.suffix.lower() in (".svg", ".png"):
        base = base.with_suffix("")
    return base


def _save(fig, base: Path):
    base.parent.mkdir(parents=True, exist_ok=True)
    svg, png = base.with_suffix(".svg"), base.with_suffix(".png")
    # Date metadata is the one nondeterministic SVG field; drop it
    fig.savefig(svg, format="svg", metadata={"Date": None})
    fig.savefig(png, format="png")
    plt.close(fig)
    return svg, png


def _render_maxcut(rows, metric: str, base: Path):
    order = []
    groups = {}
    for row in rows:
        token = row["ansatz"]
        if token not in groups:
            order.append(token)
            groups[token] = []
        groups[token].append(float(row[metric]))
    fig, ax = plt.subplots()
    xs = np.arange(len(order))
    means = np.array([np.mean(groups[t]) for t in order])
    spreads = np.array([np.std(groups[t]) for t in order])
    ax.errorbar(xs, means, yerr=spreads, fmt="o", capsize=4, color="#1f77b4")
    for x, t in zip(xs, order):
        ax.plot(
            np.full(len(groups[t]), x), groups[t],
            marker=".", linestyle="none", color="#1f77b4", alpha=0.35,
        )
    ax.set_xticks(xs)
    ax.set_xticklabels(order)
    ax.set_xlabel("ansatz")
    if metric == "alpha":
        ax.set_ylabel("approximation ratio")
        ax.set_title("Final approximation ratio, mean over instances")
    else:
        ax.set_ylabel("P(best cut)")
        ax.set_title("Probability of an optimal cut, mean over instances")
    n_values = sorted({row["n"] for row in rows})
    budget = sorted({row["budget"] for row in rows})
    ax.text(
        0.02, 0.02, f"n={','.join(n_values)}  budget={','.join(budget)}",
        transform=ax.transAxes, fontsize=8, color="#555555",
    )
    fig.tight_layout()
    return _save(fig, base)


def _heis_series(rows):
    series = {}
    for row in rows:
        key = (int(row["d"]), row["frozen"])
        series.setdefault(key, []).append(row)
    for key in series:
        series[key].sort(key=lambda r: float(r["h"]))
    return dict(sorted(series.items()))


def _render_heis(rows, which: str, base: Path):
    series = _heis_series(rows)
    fig, ax = plt.subplots()
    for (d, frozen), cells in series.items():
        h = [float(r["h"]) for r in cells]
        color = _D_COLORS[d % len(_D_COLORS)]
        dashes = "-" if frozen == "zero" else "--"
        label = f"d={d}, frozen |{0 if frozen == 'zero' else 1}>"
        if which == "energy":
            ax.plot(h, [float(r["energy"]) for r in cells],
                    linestyle=dashes, marker="o", color=color, label=label)
            ax.plot(h, [float(r["e_ref"]) for r in cells],
                    linestyle=":", color=color, alpha=0.6, linewidth=1.0)
        else:
            ax.plot(h, [float(r["error_rel"]) for r in cells],
                    linestyle=dashes, marker="o", color=color, label=label)
    ax.set_xlabel("field h")
    if which == "energy":
        ax.set_ylabel("chain energy")
        ax.set_title("Optimized chain energy vs field (dotted: exact reference)")
    else:
        ax.set_yscale("log")
        ax.set_ylabel("relative error")
        ax.set_title("Relative error vs field")
        ax.axhline(ERROR_GUIDE, color="#444444", linewidth=1.0, linestyle="-.")
        ax.annotate(f"{ERROR_GUIDE:g}", xy=(0.99, ERROR_GUIDE),
                    xycoords=("axes fraction", "data"),
                    ha="right", va="bottom", fontsize=8, color="#444444")
    ax.legend(fontsize=8)
    fig.tight_layout()
    return _save(fig, base)


def render(job: PlotJob):
    """Render one chart; returns (svg_path, png_path).

    Raises SchemaError on header/tag mismatch (before touching the output
    location) and DataError for a header-only CSV; no file is written in
    either case.
    """
    rows = load_rows(Path(job.input_csv), job.kind)
    base = _out_base(job.out_path)
    with plt.rc_context(_STYLE):
        if job.kind == "maxcut_alpha":
            return _render_maxcut(rows, "alpha", base)
        if job.kind == "maxcut_pbest":
            return _render_maxcut(rows, "p_best", base)
        if job.kind == "heis_energy":
            return _render_heis(rows, "energy", base)
        return _render_heis(rows, "error", base)
