"""Self-contained SVG figures for sweep results (no plotting dependency).

One file, two panels: a log-log plot of the sup-over-time distance against
the concentration scale with its fitted rate line, and the per-run time
series of the second-moment radii.
"""

from __future__ import annotations

import numpy as np

from .errors import DegenerateInputError

_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")

_W, _H = 980, 430
_PANEL = dict(x0=70, y0=40, w=380, h=330)


def _svg_header():
    return (f'<?xml version="1.0" encoding="UTF-8"?>\n'
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" '
            f'height="{_H}" viewBox="0 0 {_W} {_H}">\n'
            f'<rect width="{_W}" height="{_H}" fill="white"/>\n')


def _map(v, lo, hi, p0, p1):
    if hi == lo:
        return 0.5 * (p0 + p1)
    return p0 + (v - lo) / (hi - lo) * (p1 - p0)


def _axis_box(x0, y0, w, h, title):
    return (f'<rect x="{x0}" y="{y0}" width="{w}" height="{h}" fill="none" '
            f'stroke="#333" stroke-width="1"/>\n'
            f'<text x="{x0 + w / 2}" y="{y0 - 12}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="14">{title}</text>\n')


def emit_svg_plots(result, path) -> None:
    """Write the sweep figure; needs at least two scales for the log-log
    panel (otherwise no file is produced)."""
    if len(result.epsilons) < 2:
        raise DegenerateInputError("log-log panel needs at least two scales")

    eps = np.asarray(result.epsilons)
    sup = np.asarray(result.sup["w2_pv"])  # (n_eps, n_comp)
    fit = result.fits["w2_pv"][0]

    parts = [_svg_header()]

    # left: log-log sup distance vs scale, with the fitted line
    px0, py0 = _PANEL["x0"], _PANEL["y0"]
    pw, ph = _PANEL["w"], _PANEL["h"]
    lx = np.log10(eps)
    ly = np.log10(sup)
    xlo, xhi = float(lx.min()), float(lx.max())
    ylo, yhi = float(ly.min()) - 0.1, float(ly.max()) + 0.1
    parts.append(_axis_box(px0, py0, pw, ph,
                           "sup distance vs concentration scale (log-log)"))
    for i in range(sup.shape[1]):
        color = _COLORS[i % len(_COLORS)]
        for k in range(eps.shape[0]):
            cx = _map(lx[k], xlo, xhi, px0 + 10, px0 + pw - 10)
            cy = _map(ly[k, i], ylo, yhi, py0 + ph - 10, py0 + 10)
            parts.append(f'<circle cx="{cx:.2f}" cy="{cy:.2f}" r="4" '
                         f'fill="{color}"/>\n')
    # fitted line for component 0 in natural-log coordinates
    line_pts = []
    for k in (0, eps.shape[0] - 1):
        yfit = (fit.slope * np.log(eps[k]) + fit.intercept) / np.log(10.0)
        cx = _map(lx[k], xlo, xhi, px0 + 10, px0 + pw - 10)
        cy = _map(yfit, ylo, yhi, py0 + ph - 10, py0 + 10)
        line_pts.append(f"{cx:.2f},{cy:.2f}")
    parts.append(f'<polyline points="{" ".join(line_pts)}" fill="none" '
                 f'stroke="#555" stroke-dasharray="6 3" stroke-width="1.5"/>\n')
    parts.append(f'<text x="{px0 + 14}" y="{py0 + 22}" '
                 f'font-family="monospace" font-size="13">'
                 f'slope={fit.slope:.2f}</text>\n')
    for k in range(eps.shape[0]):
        cx = _map(lx[k], xlo, xhi, px0 + 10, px0 + pw - 10)
        parts.append(f'<text x="{cx:.2f}" y="{py0 + ph + 16}" '
                     f'text-anchor="middle" font-family="sans-serif" '
                     f'font-size="11">{eps[k]:g}</text>\n')

    # right: time series of the second-moment radius, one line per run
    qx0 = px0 + pw + 100
    parts.append(_axis_box(qx0, py0, pw, ph,
                           "second-moment radius over time"))
    tmax = max(run.records[-1].t for run in result.runs) or 1.0
    wmax = max(max(r.w2_pv.max() for r in run.records)
               for run in result.runs)
    for j, run in enumerate(result.runs):
        color = _COLORS[j % len(_COLORS)]
        for i in range(sup.shape[1]):
            pts = []
            for rec in run.records:
                cx = _map(rec.t, 0.0, tmax, qx0 + 10, qx0 + pw - 10)
                cy = _map(rec.w2_pv[i], 0.0, wmax * 1.05,
                          py0 + ph - 10, py0 + 10)
                pts.append(f"{cx:.2f},{cy:.2f}")
            parts.append(f'<polyline points="{" ".join(pts)}" fill="none" '
                         f'stroke="{color}" stroke-width="1.2"/>\n')
        parts.append(f'<text x="{qx0 + pw - 12}" '
                     f'y="{py0 + 18 + 14 * j}" text-anchor="end" '
                     f'font-family="sans-serif" font-size="11" '
                     f'fill="{color}">eps={result.epsilons[j]:g}</text>\n')

    parts.append("</svg>\n")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("".join(parts))
