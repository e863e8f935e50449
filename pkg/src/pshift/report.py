"""Deterministic report documents plus CSV and figure emission.

Reports are JSON with sorted keys so identical inputs produce byte
identical text; the wall-time field is the single nondeterministic entry
and comparisons must exclude it.  When an output path is given, the
delimited data (CSV) and rendered figures (PNG, via the non-interactive
matplotlib backend) land alongside the report file.
"""

from __future__ import annotations

import csv
import json
import math
import time
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from .config import RunConfig


def _jsonable(v):
    if isinstance(v, complex):
        return [v.real, v.imag]
    if isinstance(v, float):
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        if math.isnan(v):
            return "nan"
        return v
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return v


def build_report(cfg: Optional[RunConfig], payload: dict, started: float) -> dict:
    return {
        "config": None if cfg is None else cfg.as_dict(),
        "payload": _jsonable(payload),
        "version": __version__,
        "wall_time_s": round(time.monotonic() - started, 6),
    }


def render_report(report: dict) -> str:
    return json.dumps(_jsonable(report), sort_keys=True, indent=2) + "\n"


def strip_wall_time(rendered: str) -> str:
    """Drop the wall-time line so two renderings can be compared bytewise."""
    return "\n".join(
        line for line in rendered.splitlines() if '"wall_time_s"' not in line
    ) + "\n"


def write_report(report: dict, path: Path) -> None:
    path.write_text(render_report(report))


def write_csv(path: Path, header: Sequence[str], rows: Sequence[Sequence]) -> None:
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_csv_cell(v) for v in row])


def _csv_cell(v):
    if isinstance(v, complex):
        return f"{v.real}+{v.imag}j"
    return v


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def render_orbit_figure(points: Sequence[Sequence], d: int, path: Path) -> None:
    """Coordinate magnitudes of the projected orbit against the power n."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(7, 4))
    ns = list(range(len(points)))
    for m in range(d):
        ax.plot(ns, [abs(pt[m]) for pt in points], label=f"|coordinate {m + 1}|")
    ax.set_xlabel("n")
    ax.set_ylabel("magnitude")
    ax.set_title("projected orbit coordinates")
    ax.legend(loc="best", fontsize="small")
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def render_visit_figure(log_dict: dict, path: Path) -> None:
    """Per-stage achieved distances against the epsilon schedule."""
    plt = _pyplot()
    steps = log_dict["steps"]
    fig, ax = plt.subplots(figsize=(7, 4))
    stages = [s["stage"] for s in steps]
    ax.plot(stages, [s["eps"] for s in steps], "k--", label="epsilon schedule")
    n_ops = len(steps[0]["distances"]) if steps else 0
    for i in range(n_ops):
        ax.plot(stages, [s["distances"][i] for s in steps], marker="o",
                label=f"operator {i + 1}")
    ax.set_yscale("log")
    ax.set_xlabel("stage")
    ax.set_ylabel("distance")
    ax.set_title("blow-up/collapse stage distances")
    ax.legend(loc="best", fontsize="small")
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def render_series_figure(
    xs: Sequence[float],
    series: dict[str, Sequence[float]],
    title: str,
    xlabel: str,
    ylabel: str,
    path: Path,
) -> None:
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(7, 4))
    for name in sorted(series):
        ax.plot(xs, series[name], label=name)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.set_title(title)
    ax.legend(loc="best", fontsize="small")
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
