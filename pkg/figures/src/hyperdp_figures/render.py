"""Deterministic matplotlib rendering of region maps and error curves.

Output is a pure function of (CSV bytes, spec): the Agg backend is forced,
SVG ids are salted with a fixed string, and the date/software metadata
that would otherwise embed timestamps or versions is disabled.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from .spec import FigureSpec, SchemaError, read_region_csv, read_summary_csv

REGION_COLORS = {"gray": "#b0b0b0", "white": "#ffffff", "green": "#7fc97f"}

_DETERMINISTIC_RC = {
    "svg.hashsalt": "hyperdp-figures",
    "figure.dpi": 100,
    "savefig.dpi": 100,
    "font.family": "DejaVu Sans",
}


def _save_both(fig, output: str) -> tuple[str, str]:
    base = str(Path(output).with_suffix(""))
    png_path, svg_path = base + ".png", base + ".svg"
    fig.savefig(png_path, metadata={"Software": None})
    fig.savefig(svg_path, metadata={"Date": None})
    plt.close(fig)
    return png_path, svg_path


def render_region_map(spec: FigureSpec) -> tuple[str, str]:
    """Shade the (a, eps) plane by recoverability region."""
    rows = read_region_csv(spec.inputs[0])
    a_vals = sorted({r["a"] for r in rows})
    eps_vals = sorted({r["eps"] for r in rows})
    if len(rows) != len(a_vals) * len(eps_vals):
        raise SchemaError("region CSV is not a complete rectangular grid")
    lookup = {(r["a"], r["eps"]): r["region"] for r in rows}
    codes = {"gray": 0, "white": 1, "green": 2}
    grid = np.empty((len(eps_vals), len(a_vals)))
    for j, a in enumerate(a_vals):
        for i, e in enumerate(eps_vals):
            grid[i, j] = codes[lookup[(a, e)]]

    with plt.rc_context(_DETERMINISTIC_RC):
        fig, ax = plt.subplots(figsize=(5.0, 4.0))
        cmap = matplotlib.colors.ListedColormap(
            [REGION_COLORS["gray"], REGION_COLORS["white"], REGION_COLORS["green"]]
        )
        ax.pcolormesh(
            a_vals, eps_vals, grid, cmap=cmap, vmin=-0.5, vmax=2.5, shading="nearest"
        )
        ax.set_xlabel("in-cluster density coefficient a")
        ax.set_ylabel("privacy budget eps")
        ax.set_title(spec.annotations.get("title", "exact-recovery regions"))
        handles = [
            plt.Rectangle((0, 0), 1, 1, facecolor=REGION_COLORS[k], edgecolor="k", linewidth=0.4)
            for k in ("gray", "white", "green")
        ]
        ax.legend(
            handles,
            ["irrecoverable", "non-private only", "private + non-private"],
            loc="lower right",
            fontsize=7,
        )
        fig.tight_layout()
        return _save_both(fig, spec.output)


def _shade_bands(ax, regions_csv: str, slice_key: str, slice_value: float, axis_key: str):
    """Shade the x-axis by region along one grid slice of a regions CSV."""
    rows = read_region_csv(regions_csv)
    slice_vals = sorted({r[slice_key] for r in rows})
    nearest = min(slice_vals, key=lambda v: abs(v - slice_value))
    line = sorted(
        (r for r in rows if r[slice_key] == nearest), key=lambda r: r[axis_key]
    )
    xs = [r[axis_key] for r in line]
    for left, right, row in zip(xs, xs[1:] + [xs[-1]], line):
        if row["region"] != "white":
            ax.axvspan(left, right, color=REGION_COLORS[row["region"]], alpha=0.25, lw=0)


def render_error_curve(spec: FigureSpec) -> tuple[str, str]:
    """Mean error vs sweep value with stderr bars, one curve per input."""
    curves = [read_summary_csv(path) for path in spec.inputs]
    params = {rows[0]["sweep_param"] for rows in curves}
    if len(params) != 1:
        raise SchemaError(f"inputs sweep different parameters: {sorted(params)}")
    sweep_param = params.pop()
    labels = list(spec.labels) + [
        Path(p).stem for p in spec.inputs[len(spec.labels):]
    ]

    with plt.rc_context(_DETERMINISTIC_RC):
        fig, ax = plt.subplots(figsize=(5.5, 4.0))
        markers = ["o", "s", "^", "d", "v"]
        for idx, rows in enumerate(curves):
            rows = sorted(rows, key=lambda r: r["sweep_value"])
            xs = [r["sweep_value"] for r in rows]
            ys = [r["mean_error"] for r in rows]
            es = [r["stderr"] for r in rows]
            ax.errorbar(
                xs, ys, yerr=es, label=labels[idx],
                marker=markers[idx % len(markers)], markersize=3.5,
                capsize=2, linewidth=1.2,
            )
        ann = spec.annotations
        if "regions_csv" in ann:
            slice_key = "eps" if sweep_param == "a" else "a"
            _shade_bands(
                ax, ann["regions_csv"], slice_key,
                float(ann.get(f"slice_{slice_key}", 0.0)), sweep_param,
            )
        if "vline" in ann:
            ax.axvline(float(ann["vline"]), color="k", linestyle="--", linewidth=1.0)
            ax.annotate(
                ann.get("vline_label", f"{ann['vline']:g}"),
                xy=(float(ann["vline"]), 0.95), xycoords=("data", "axes fraction"),
                fontsize=7, rotation=90, ha="right", va="top",
            )
        ax.set_xlabel(sweep_param)
        ax.set_ylabel("misclassification error")
        ax.set_title(ann.get("title", f"error vs {sweep_param}"))
        ax.legend(fontsize=7)
        fig.tight_layout()
        return _save_both(fig, spec.output)


def render(spec: FigureSpec) -> tuple[str, str]:
    if spec.kind == "region_map":
        return render_region_map(spec)
    return render_error_curve(spec)
