"""CSV / JSON / SVG emission with byte-stable formatting.

Floats are rendered with repr (shortest round-trip form), so identical
results serialize to identical bytes.
"""

from __future__ import annotations

import json
import math

import numpy as np

from .bounds import BoundReport
from .harness import EnsembleResult, PTraceTable

SERIES_COLUMNS = ("protocol", "x_kind", "x_value", "mean_fidelity", "stderr", "trajectories")

_PALETTE = ("#c0392b", "#27ae60", "#8e44ad", "#2980b9", "#d68910")


def _fmt(value) -> str:
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    v = float(value)
    if math.isnan(v):
        return "nan"
    return repr(v)


def series_csv(result: EnsembleResult) -> str:
    lines = [",".join(SERIES_COLUMNS)]
    for sp in result.series:
        lines.append(
            ",".join(
                (
                    sp.protocol,
                    sp.x_kind,
                    _fmt(sp.x_value),
                    _fmt(sp.mean_fidelity),
                    _fmt(sp.stderr),
                    str(sp.trajectories),
                )
            )
        )
    return "\n".join(lines) + "\n"


def ptrace_csv(table: PTraceTable) -> str:
    n_terms = table.probabilities.shape[1]
    header = ["step"] + [f"p{j + 1}" for j in range(n_terms)] + ["sampled_index", "tau"]
    lines = [",".join(header)]
    for i, step in enumerate(table.steps):
        row = [str(int(step))]
        row += [_fmt(p) for p in table.probabilities[i]]
        row.append(str(int(table.sampled_indices[i])))
        row.append(_fmt(table.taus[i]))
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"


def _bound_dict(report: BoundReport) -> dict:
    return {
        "note": "order-of-growth values; constants unspecified",
        "t": report.total_time,
        "steps": report.steps,
        "trotter1": report.trotter1,
        "rc": report.rc,
        "arc": report.arc,
        "per_step": {k: list(v) for k, v in report.per_step.items()},
    }


def result_json(
    result: EnsembleResult, bounds: list[BoundReport] | None = None
) -> str:
    doc = {
        "config": result.config.to_dict(),
        "series": [
            {
                "protocol": sp.protocol,
                "x_kind": sp.x_kind,
                "x_value": sp.x_value,
                "mean_fidelity": sp.mean_fidelity,
                "stderr": sp.stderr,
                "trajectories": sp.trajectories,
            }
            for sp in result.series
        ],
    }
    if result.extrapolated:
        doc["extrapolated"] = dict(result.extrapolated)
    if bounds is not None:
        doc["bounds"] = [_bound_dict(b) for b in bounds]
    return json.dumps(doc, indent=2) + "\n"


def ptrace_json(table: PTraceTable) -> str:
    doc = {
        "config": table.config.to_dict(),
        "term_labels": list(table.labels),
        "ptrace": [
            {
                "step": int(table.steps[i]),
                "p": [float(x) for x in table.probabilities[i]],
                "sampled_index": int(table.sampled_indices[i]),
                "tau": None if math.isnan(table.taus[i]) else float(table.taus[i]),
            }
            for i in range(len(table.steps))
        ],
    }
    return json.dumps(doc, indent=2) + "\n"


def emit(result: EnsembleResult, format: str, path, bounds=None) -> None:
    """Write an ensemble result as CSV or JSON."""
    if format == "csv":
        text = series_csv(result)
    elif format == "json":
        text = result_json(result, bounds)
    else:
        raise ValueError(f"unknown format {format!r}")
    _write_text(path, text)


def emit_ptrace(table: PTraceTable, format: str, path) -> None:
    if format == "csv":
        text = ptrace_csv(table)
    elif format == "json":
        text = ptrace_json(table)
    else:
        raise ValueError(f"unknown format {format!r}")
    _write_text(path, text)


def _write_text(path, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def emit_svg(result: EnsembleResult, path) -> None:
    """Self-contained SVG line chart: one polyline per protocol."""
    if not result.series:
        raise ValueError("empty result")
    width, height = 640, 420
    left, right, top, bottom = 64, 16, 24, 48
    plot_w, plot_h = width - left - right, height - top - bottom

    protocols = []
    for sp in result.series:
        if sp.protocol not in protocols:
            protocols.append(sp.protocol)
    xs = sorted({sp.x_value for sp in result.series})
    x_lo, x_hi = min(xs), max(xs)
    if x_hi == x_lo:
        x_hi = x_lo + 1.0
    ys = [sp.mean_fidelity for sp in result.series]
    y_lo = min(0.0 if min(ys) < 0.5 else min(ys) - 0.05, min(ys))
    y_lo = max(0.0, y_lo)
    y_hi = 1.0

    def sx(x: float) -> float:
        return left + (x - x_lo) / (x_hi - x_lo) * plot_w

    def sy(y: float) -> float:
        return top + (y_hi - y) / (y_hi - y_lo) * plot_h

    x_label = "step size dt" if result.series[0].x_kind == "dt" else "evolution steps"
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<line x1="{left}" y1="{top}" x2="{left}" y2="{top + plot_h}" stroke="black"/>',
        f'<line x1="{left}" y1="{top + plot_h}" x2="{left + plot_w}" y2="{top + plot_h}" stroke="black"/>',
    ]
    for i in range(5):
        y = y_lo + (y_hi - y_lo) * i / 4
        parts.append(
            f'<text x="{left - 8:.1f}" y="{sy(y) + 4:.1f}" font-size="11" '
            f'text-anchor="end">{y:.2f}</text>'
        )
        parts.append(
            f'<line x1="{left - 4}" y1="{sy(y):.1f}" x2="{left}" y2="{sy(y):.1f}" stroke="black"/>'
        )
    for x in xs:
        parts.append(
            f'<text x="{sx(x):.1f}" y="{top + plot_h + 16}" font-size="11" '
            f'text-anchor="middle">{x:g}</text>'
        )
    parts.append(
        f'<text x="{left + plot_w / 2:.1f}" y="{height - 8}" font-size="12" '
        f'text-anchor="middle">{x_label}</text>'
    )
    parts.append(
        f'<text x="14" y="{top + plot_h / 2:.1f}" font-size="12" text-anchor="middle" '
        f'transform="rotate(-90 14 {top + plot_h / 2:.1f})">mean fidelity</text>'
    )
    for idx, protocol in enumerate(protocols):
        pts = sorted(
            (sp.x_value, sp.mean_fidelity)
            for sp in result.series
            if sp.protocol == protocol
        )
        coords = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in pts)
        color = _PALETTE[idx % len(_PALETTE)]
        parts.append(
            f'<polyline points="{coords}" fill="none" stroke="{color}" stroke-width="1.8"/>'
        )
        ly = top + 14 + 16 * idx
        lx = left + plot_w - 110
        parts.append(
            f'<line x1="{lx}" y1="{ly - 4}" x2="{lx + 24}" y2="{ly - 4}" '
            f'stroke="{color}" stroke-width="1.8"/>'
        )
        parts.append(f'<text x="{lx + 30}" y="{ly}" font-size="12">{protocol}</text>')
    parts.append("</svg>")
    _write_text(path, "\n".join(parts) + "\n")
