"""
Minimal SVG writer: region heatmaps and log-log polyline plots.

Output is plain self-contained SVG text with fixed number formatting, so
identical inputs give identical files.
"""
import math
from xml.sax.saxutils import escape

from experiments import BOUNDARY, CONSISTENT, INADMISSIBLE

WIDTH = 640
HEIGHT = 480
MARGIN = 60

STATUS_COLORS = {
    CONSISTENT: '#2e7d32',
    INADMISSIBLE: '#c62828',
    BOUNDARY: '#9e9e9e',
}
SERIES_COLORS = ('#1565c0', '#c62828', '#2e7d32', '#ef6c00', '#6a1b9a', '#00838f')


def _num(value):
    return f"{value:.2f}"


def _document(body, title):
    head = (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">\n'
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="#ffffff"/>\n'
        f'<text x="{WIDTH // 2}" y="24" text-anchor="middle" font-family="sans-serif" '
        f'font-size="16">{escape(title)}</text>\n'
    )
    return head + "".join(body) + "</svg>\n"


def _axis_labels(xlabel, ylabel):
    return [
        f'<text x="{WIDTH // 2}" y="{HEIGHT - 12}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="13">{escape(xlabel)}</text>\n',
        f'<text x="16" y="{HEIGHT // 2}" text-anchor="middle" font-family="sans-serif" '
        f'font-size="13" transform="rotate(-90 16 {HEIGHT // 2})">{escape(ylabel)}</text>\n',
    ]


def _unique_sorted(values):
    return sorted(set(values))


def region_svg(table, title="Restriction region"):
    """Tri-colour heatmap of a RegionTable: one rectangle per (p, q) cell."""
    keys = [c.pair.as_floats() for c in table.cells]
    ps = _unique_sorted(p for p, _ in keys)
    qs = _unique_sorted(q for _, q in keys)
    plot_w = WIDTH - 2 * MARGIN
    plot_h = HEIGHT - 2 * MARGIN
    cell_w = plot_w / max(len(ps), 1)
    cell_h = plot_h / max(len(qs), 1)
    col = {p: i for i, p in enumerate(ps)}
    row = {q: i for i, q in enumerate(qs)}

    body = []
    for cell in table.cells:
        p, q = cell.pair.as_floats()
        x = MARGIN + col[p] * cell_w
        y = HEIGHT - MARGIN - (row[q] + 1) * cell_h
        body.append(
            f'<rect x="{_num(x)}" y="{_num(y)}" width="{_num(cell_w)}" height="{_num(cell_h)}" '
            f'fill="{STATUS_COLORS[cell.status]}" stroke="#ffffff" stroke-width="0.5">'
            f'<title>p={p:g} q={q:g} {cell.status}</title></rect>\n'
        )
    for p in (ps[0], ps[-1]) if ps else ():
        x = MARGIN + (col[p] + 0.5) * cell_w
        body.append(
            f'<text x="{_num(x)}" y="{HEIGHT - MARGIN + 16}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="11">{p:g}</text>\n'
        )
    for q in (qs[0], qs[-1]) if qs else ():
        y = HEIGHT - MARGIN - (row[q] + 0.5) * cell_h
        body.append(
            f'<text x="{MARGIN - 6}" y="{_num(y)}" text-anchor="end" '
            f'font-family="sans-serif" font-size="11">{q:g}</text>\n'
        )
    for i, (status, color) in enumerate(STATUS_COLORS.items()):
        x = MARGIN + i * 190
        body.append(
            f'<rect x="{x}" y="36" width="12" height="12" fill="{color}"/>'
            f'<text x="{x + 16}" y="46" font-family="sans-serif" font-size="11">{escape(status)}</text>\n'
        )
    body.extend(_axis_labels("p", "q"))
    return _document(body, f"{title} (n={table.n})")


def loglog_svg(series, title, xlabel, ylabel="ratio"):
    """
    Log-log polyline plot.

    Args:
        series: list of (label, xs, ys) with positive values
    """
    xs = [math.log10(x) for _, sx, _ in series for x in sx]
    ys = [math.log10(y) for _, _, sy in series for y in sy]
    x_lo, x_hi = min(xs), max(xs)
    y_lo, y_hi = min(ys), max(ys)
    if x_hi == x_lo:
        x_hi = x_lo + 1.0
    if y_hi == y_lo:
        y_lo, y_hi = y_lo - 0.5, y_hi + 0.5

    def to_px(x, y):
        px = MARGIN + (math.log10(x) - x_lo) / (x_hi - x_lo) * (WIDTH - 2 * MARGIN)
        py = HEIGHT - MARGIN - (math.log10(y) - y_lo) / (y_hi - y_lo) * (HEIGHT - 2 * MARGIN)
        return px, py

    body = [
        f'<rect x="{MARGIN}" y="{MARGIN}" width="{WIDTH - 2 * MARGIN}" height="{HEIGHT - 2 * MARGIN}" '
        f'fill="none" stroke="#424242"/>\n'
    ]
    for i, (label, sx, sy) in enumerate(series):
        color = SERIES_COLORS[i % len(SERIES_COLORS)]
        points = " ".join(f"{_num(px)},{_num(py)}" for px, py in (to_px(x, y) for x, y in zip(sx, sy)))
        body.append(f'<polyline points="{points}" fill="none" stroke="{color}" stroke-width="2"/>\n')
        body.append(
            f'<text x="{WIDTH - MARGIN + 4}" y="{MARGIN + 14 * (i + 1)}" font-family="sans-serif" '
            f'font-size="11" fill="{color}">{escape(label)}</text>\n'
        )
    body.append(
        f'<text x="{MARGIN}" y="{HEIGHT - MARGIN + 16}" font-family="sans-serif" font-size="11">'
        f'{10 ** x_lo:.3g}</text>\n'
        f'<text x="{WIDTH - MARGIN}" y="{HEIGHT - MARGIN + 16}" text-anchor="end" '
        f'font-family="sans-serif" font-size="11">{10 ** x_hi:.3g}</text>\n'
    )
    body.extend(_axis_labels(f"{xlabel} (log)", f"{ylabel} (log)"))
    return _document(body, title)


def sweep_svg(sweeps, title):
    """Log-log plot of SweepResults, one polyline per exponent pair."""
    series = []
    for sweep in sweeps:
        xs, ys = zip(*sweep.rows)
        series.append((f"{sweep.pair} slope {sweep.slope:.2f}", xs, ys))
    return loglog_svg(series, title, sweeps[0].parameter if sweeps else "parameter")


def write_svg(path, text):
    with open(path, 'w', encoding='utf-8') as f:
        f.write(text)
