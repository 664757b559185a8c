"""Batch rendering of experiment-result CSVs into multi-panel figures.

Reads the simulator's result CSVs (header t, delta, std_max, xbar_norm,
f_gap, dist_opt, sum_alpha_delta, plus x_{i}_{k} state columns when present)
and a flat key=value figure spec, and writes the figure as both PNG and SVG.
Rendering is deterministic: no timestamps or randomized ids are embedded.
"""

import csv
import re
from dataclasses import dataclass
from pathlib import Path

import matplotlib
matplotlib.use("Agg")
matplotlib.rcParams["svg.hashsalt"] = "figures"
import matplotlib.pyplot as plt
import numpy as np


class SpecError(ValueError):
    pass


STATE_RE = re.compile(r"x_(\d+)_(\d+)")


@dataclass
class Panel:
    csv: str
    title: str
    columns: str  # "trajectories" or comma-separated diagnostic columns
    logy: bool = False


@dataclass
class FigureSpec:
    rows: int
    cols: int
    out: str
    panels: list


def parse_spec_text(text: str) -> FigureSpec:
    """Flat key=value spec: layout, out, panel<N>.{csv,title,columns,logy}."""
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise SpecError(f"line {lineno}: expected key=value, got {raw!r}")
        key, _, val = line.partition("=")
        values[key.strip()] = val.strip()

    layout = values.get("layout")
    if layout is None:
        raise SpecError("missing required key 'layout' (e.g. layout=2x2)")
    m = re.fullmatch(r"(\d+)x(\d+)", layout)
    if not m:
        raise SpecError(f"key 'layout': expected RxC, got {layout!r}")
    rows, cols = int(m.group(1)), int(m.group(2))
    out = values.get("out")
    if out is None:
        raise SpecError("missing required key 'out'")

    panels = []
    for i in range(1, rows * cols + 1):
        prefix = f"panel{i}."
        keys = {k for k in values if k.startswith(prefix)}
        if not keys:
            continue
        csv_path = values.get(prefix + "csv")
        if csv_path is None:
            raise SpecError(f"missing required key '{prefix}csv'")
        panels.append(Panel(
            csv=csv_path,
            title=values.get(prefix + "title", ""),
            columns=values.get(prefix + "columns", "delta"),
            logy=values.get(prefix + "logy", "false").lower()
                 in ("true", "1", "yes"),
        ))
    if not panels:
        raise SpecError("no panels")
    if len(panels) > rows * cols:
        raise SpecError(f"{len(panels)} panels do not fit a "
                        f"{rows}x{cols} layout")
    return FigureSpec(rows=rows, cols=cols, out=out, panels=panels)


def parse_spec_file(path) -> FigureSpec:
    return parse_spec_text(Path(path).read_text(encoding="utf-8"))


def read_result_csv(path):
    """Column name -> float array; trailing '# aborted ...' comments ignored."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if not header:
            raise SpecError(f"{path}: empty CSV")
        rows = [row for row in reader if row and not row[0].startswith("#")]
    data = np.array([[float(v) for v in row] for row in rows])
    if data.ndim != 2 or data.shape[1] != len(header):
        raise SpecError(f"{path}: ragged or empty CSV body")
    return {name: data[:, j] for j, name in enumerate(header)}


def _column(data, name, path):
    if name not in data:
        raise SpecError(f"column {name!r} not found in {path}")
    return data[name]


def _draw_panel(ax, panel: Panel):
    data = read_result_csv(panel.csv)
    t = _column(data, "t", panel.csv)
    if panel.columns == "trajectories":
        state_cols = sorted((c for c in data if STATE_RE.fullmatch(c)),
                            key=lambda c: tuple(map(int, c.split("_")[1:])))
        if not state_cols:
            raise SpecError(f"column 'x_*_*' not found in {panel.csv} "
                            "(run with record_state=true)")
        one_coord = all(c.endswith("_1") for c in state_cols)
        for c in state_cols:
            i, k = STATE_RE.fullmatch(c).groups()
            label = f"agent {i}" if one_coord else f"agent {i} [{k}]"
            ax.plot(t, data[c], linewidth=0.9, label=label)
        ax.legend(fontsize=7, ncol=2)
    else:
        for name in [c.strip() for c in panel.columns.split(",")]:
            ax.plot(t, _column(data, name, panel.csv), linewidth=1.0,
                    label=name)
        ax.legend(fontsize=8)
    if panel.logy:
        ax.set_yscale("log")
    ax.set_xlabel("iteration t")
    ax.set_title(panel.title, fontsize=10)
    ax.grid(True, alpha=0.3)


def render(spec: FigureSpec):
    """Write the figure; returns the list of files written (.png and .svg)."""
    fig, axes = plt.subplots(spec.rows, spec.cols,
                             figsize=(5.0 * spec.cols, 3.4 * spec.rows),
                             squeeze=False)
    flat = axes.ravel()
    for ax, panel in zip(flat, spec.panels):
        _draw_panel(ax, panel)
    for ax in flat[len(spec.panels):]:
        ax.set_visible(False)
    fig.tight_layout()
    base = Path(spec.out)
    if base.suffix in (".png", ".svg"):
        base = base.with_suffix("")
    written = []
    for ext in (".png", ".svg"):
        target = base.with_suffix(ext)
        # SVG: drop the creation date so re-renders are byte-identical
        meta = {"Date": None} if ext == ".svg" else None
        fig.savefig(target, dpi=120, metadata=meta)
        written.append(target)
    plt.close(fig)
    return written
