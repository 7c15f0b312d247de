"""Minimal self-contained SVG line charts of risk against sample size.

No plotting dependency: these are verification artifacts. One polyline
per scheme with a vertical +-1 std whisker per point.
"""

import numpy as np

WIDTH, HEIGHT = 640, 420
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 70, 30, 30, 50

SCHEME_COLORS = {
    "least_squares": "#888888",
    "adversarial_ordinary": "#d95f02",
    "adversarial_preprocessed": "#1b9e77",
}


def _series_from_rows(rows, case, sigma2, value="sup_risk"):
    """Per-scheme (n, mean, std) recomputed from detail rows."""
    groups = {}
    for row in rows:
        if row.get("row_kind") != "detail" or row.get("status") != "ok":
            continue
        if row["case"] != case or float(row["sigma2"]) != sigma2:
            continue
        key = (row["scheme"], int(row["n"]))
        groups.setdefault(key, []).append(float(row[value]))
    series = {}
    for (scheme, n), vals in groups.items():
        arr = np.asarray(vals)
        std = arr.std(ddof=1) if len(arr) > 1 else 0.0
        series.setdefault(scheme, []).append((n, arr.mean(), std))
    for scheme in series:
        series[scheme].sort()
    return series


def _ticks(lo, hi, count=5):
    if hi <= lo:
        hi = lo + 1.0
    return np.linspace(lo, hi, count)


def emit_plot(rows, case, sigma2, value="sup_risk", title=None):
    """SVG document for one (case, sigma2) cell filter.

    rows are results-CSV dicts; needs at least two sample sizes.
    """
    series = _series_from_rows(rows, case, sigma2, value)
    if not series:
        raise ValueError(f"no rows match case={case!r} sigma2={sigma2}")
    all_n = sorted({n for pts in series.values() for n, _, _ in pts})
    if len(all_n) < 2:
        raise ValueError("need at least two sample sizes to plot")

    ymax = max(m + s for pts in series.values() for _, m, s in pts)
    ymin = min(max(0.0, m - s) for pts in series.values() for _, m, s in pts)
    if ymax == ymin:
        ymax = ymin + 1.0
    x0, x1 = min(all_n), max(all_n)

    def sx(n):
        return MARGIN_L + (n - x0) / (x1 - x0) * (WIDTH - MARGIN_L - MARGIN_R)

    def sy(v):
        frac = (v - ymin) / (ymax - ymin)
        return HEIGHT - MARGIN_B - frac * (HEIGHT - MARGIN_T - MARGIN_B)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" '
        f'height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<line x1="{MARGIN_L}" y1="{HEIGHT - MARGIN_B}" '
        f'x2="{WIDTH - MARGIN_R}" y2="{HEIGHT - MARGIN_B}" stroke="black"/>',
        f'<line x1="{MARGIN_L}" y1="{MARGIN_T}" x2="{MARGIN_L}" '
        f'y2="{HEIGHT - MARGIN_B}" stroke="black"/>',
    ]
    label = title or f"{value} vs n ({case}, sigma2={sigma2})"
    parts.append(f'<text x="{WIDTH // 2}" y="{MARGIN_T - 10}" '
                 f'text-anchor="middle" font-size="13">{label}</text>')
    for n in all_n:
        x = sx(n)
        parts.append(f'<line x1="{x:.2f}" y1="{HEIGHT - MARGIN_B}" '
                     f'x2="{x:.2f}" y2="{HEIGHT - MARGIN_B + 5}" '
                     f'stroke="black"/>')
        parts.append(f'<text x="{x:.2f}" y="{HEIGHT - MARGIN_B + 20}" '
                     f'text-anchor="middle" font-size="11">{n}</text>')
    for v in _ticks(ymin, ymax):
        y = sy(v)
        parts.append(f'<line x1="{MARGIN_L - 5}" y1="{y:.2f}" '
                     f'x2="{MARGIN_L}" y2="{y:.2f}" stroke="black"/>')
        parts.append(f'<text x="{MARGIN_L - 9}" y="{y + 4:.2f}" '
                     f'text-anchor="end" font-size="11">{v:.3g}</text>')

    legend_y = MARGIN_T + 12
    for scheme in sorted(series):
        color = SCHEME_COLORS.get(scheme, "#3366cc")
        pts = series[scheme]
        for n, mean, std in pts:
            x = sx(n)
            parts.append(f'<line class="whisker" x1="{x:.2f}" '
                         f'y1="{sy(mean - std):.2f}" x2="{x:.2f}" '
                         f'y2="{sy(mean + std):.2f}" stroke="{color}" '
                         f'stroke-width="1"/>')
        coords = " ".join(f"{sx(n):.2f},{sy(mean):.2f}"
                          for n, mean, _ in pts)
        parts.append(f'<polyline class="series" fill="none" '
                     f'stroke="{color}" stroke-width="2" points="{coords}"/>')
        parts.append(f'<text x="{WIDTH - MARGIN_R - 5}" y="{legend_y}" '
                     f'text-anchor="end" font-size="11" fill="{color}">'
                     f'{scheme}</text>')
        legend_y += 14
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
