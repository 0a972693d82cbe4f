"""CSV, JSON-metadata and SVG writers for coverage curves. All outputs are byte-stable."""
from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path
from typing import List, Union

from .sweep import CoverageCurve

CSV_COLUMNS = ("sweep_var", "value", "series_id", "p_out_analytic", "p_out_mc", "ci99")
PathLike = Union[str, Path]


def _num(x) -> str:
    return "" if x is None else repr(float(x))


def curve_to_csv(curve: CoverageCurve) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for p in curve.points:
        w.writerow((curve.variable, _num(p.value), p.series_id, _num(p.p_out_analytic),
                    _num(p.p_out_mc), _num(p.ci99)))
    return buf.getvalue()


def _write(path: PathLike, text: str) -> None:
    path = Path(path)
    try:
        path.write_text(text)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc


def emit_csv(curve: CoverageCurve, path: PathLike) -> None:
    _write(path, curve_to_csv(curve))


def read_csv(path: PathLike) -> List[dict]:
    """Parse an emitted CSV back into rows with floats (None for empty MC cells)."""
    rows = []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            rows.append({
                "sweep_var": row["sweep_var"],
                "value": float(row["value"]),
                "series_id": row["series_id"],
                "p_out_analytic": float(row["p_out_analytic"]),
                "p_out_mc": float(row["p_out_mc"]) if row["p_out_mc"] else None,
                "ci99": float(row["ci99"]) if row["ci99"] else None,
            })
    return rows


def emit_metadata(curve: CoverageCurve, path: PathLike) -> None:
    _write(path, json.dumps(curve.metadata, indent=2, sort_keys=True) + "\n")


# -- SVG ------------------------------------------------------------------------

_WIDTH, _HEIGHT = 760, 480
_LEFT, _RIGHT, _TOP, _BOTTOM = 70, 250, 20, 50
_BLUES = ("#08306b", "#2171b5", "#6baed6", "#4292c6", "#9ecae1", "#c6dbef")
_REDS = ("#67000d", "#cb181d", "#fb6a4a", "#ef3b2c", "#fc9272", "#fcbba1")
_AXIS_LABEL = {"r0": "serving distance r0 (x100 m)", "T": "threshold T (dB)", "c_bar": "mean cluster size"}


def _style(series_id: str, shade: int):
    model, freq = series_id.split("/")[:2]
    colours = _BLUES if model == "PCP" else _REDS
    dash = "" if freq == "mmwave" else ' stroke-dasharray="6 3"'
    return colours[shade % len(colours)], dash


def curve_to_svg(curve: CoverageCurve, floor: float = 1e-6) -> str:
    ids = curve.series_ids()
    pts = list(curve.points)
    xs = [p.value for p in pts] or [0.0, 1.0]
    x0, x1 = min(xs), max(xs)
    if x1 == x0:
        x0, x1 = x0 - 0.5, x1 + 0.5
    positive = [v for p in pts for v in (p.p_out_analytic, p.p_out_mc) if v is not None and v > 0]
    lo = max(floor, min(positive)) if positive else floor
    y_lo = math.floor(math.log10(lo))
    y_hi = 0
    if y_lo >= y_hi:
        y_lo = y_hi - 1
    height = max(_HEIGHT, _TOP + 24 + 14 * len(ids))
    pw, ph = _WIDTH - _LEFT - _RIGHT, height - _TOP - _BOTTOM

    def sx(x):
        return _LEFT + (x - x0) / (x1 - x0) * pw

    def sy(p):
        lp = math.log10(max(p, 10.0 ** y_lo))
        return _TOP + (y_hi - lp) / (y_hi - y_lo) * ph

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{_WIDTH}" height="{height}" '
           f'viewBox="0 0 {_WIDTH} {height}" font-family="sans-serif" font-size="11">',
           f'<rect x="{_LEFT}" y="{_TOP}" width="{pw}" height="{ph}" fill="none" stroke="#000"/>']
    for e in range(y_lo, y_hi + 1):
        y = sy(10.0 ** e)
        out.append(f'<line x1="{_LEFT}" y1="{y:.2f}" x2="{_LEFT + pw}" y2="{y:.2f}" stroke="#ddd"/>')
        out.append(f'<text x="{_LEFT - 6}" y="{y + 4:.2f}" text-anchor="end">1e{e}</text>')
    for k in range(6):
        x = x0 + (x1 - x0) * k / 5
        out.append(f'<text x="{sx(x):.2f}" y="{_TOP + ph + 16}" text-anchor="middle">{x:.3g}</text>')
    out.append(f'<text x="{_LEFT + pw / 2:.2f}" y="{height - 10}" text-anchor="middle">'
               f'{_AXIS_LABEL.get(curve.variable, curve.variable)}</text>')
    out.append(f'<text x="16" y="{_TOP + ph / 2:.2f}" text-anchor="middle" '
               f'transform="rotate(-90 16 {_TOP + ph / 2:.2f})">outage probability</text>')

    groups: dict = {}
    for i, sid in enumerate(ids):
        shade = groups.setdefault("/".join(sid.split("/")[2:]), len(groups))
        colour, dash = _style(sid, shade)
        series = curve.series(sid)
        coords = " ".join(f"{sx(p.value):.2f},{sy(p.p_out_analytic):.2f}" for p in series)
        out.append(f'<polyline fill="none" stroke="{colour}" stroke-width="1.5"{dash} points="{coords}"/>')
        for p in series:
            if p.p_out_mc is not None:
                out.append(f'<circle cx="{sx(p.value):.2f}" cy="{sy(p.p_out_mc):.2f}" r="2.5" '
                           f'fill="none" stroke="{colour}"/>')
        ly = _TOP + 12 + 14 * i
        lx = _LEFT + pw + 12
        out.append(f'<line x1="{lx}" y1="{ly - 4}" x2="{lx + 24}" y2="{ly - 4}" stroke="{colour}" '
                   f'stroke-width="1.5"{dash}/>')
        out.append(f'<text x="{lx + 30}" y="{ly}">{sid}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def emit_svg(curve: CoverageCurve, path: PathLike) -> None:
    _write(path, curve_to_svg(curve))
