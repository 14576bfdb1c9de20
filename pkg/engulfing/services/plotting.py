"""
Deterministic SVG plots of report tables.

The canvas is fixed at 800×600; coordinates are written with six significant
digits so equal tables give byte-identical documents.
"""
import json
import logging
import math
from typing import List, Sequence, Tuple
from xml.sax.saxutils import escape

from ..helpers.error_handlers import ReportError
from ..models.report import ExperimentReport

logger = logging.getLogger(__name__)

WIDTH = 800
HEIGHT = 600
MARGIN = 60
PLOT_KINDS = ('section-boundary', 'ratio-curve')
SERIES_COLOURS = ('#1f77b4', '#d62728', '#2ca02c', '#9467bd', '#ff7f0e')

# abscissa and ordinate columns per experiment for ratio curves
RATIO_AXES = {
    'exp-family': ('h', ('exp_ratio', 'expsq_ratio')),
    'example-2-1': ('x', ('minimal_K',)),
}

Point = Tuple[float, float]


def _num(value: float) -> str:
    return f"{value:.6g}"


class _Frame:
    """Affine map from data coordinates to the canvas, y axis pointing up."""

    def __init__(self, xs: Sequence[float], ys: Sequence[float]):
        self.x_min, self.x_max = _span(xs)
        self.y_min, self.y_max = _span(ys)

    def __call__(self, x: float, y: float) -> Point:
        u = MARGIN + (x - self.x_min) / (self.x_max - self.x_min) * (WIDTH - 2 * MARGIN)
        v = HEIGHT - MARGIN - (y - self.y_min) / (self.y_max - self.y_min) * (HEIGHT - 2 * MARGIN)
        return u, v


def _span(values: Sequence[float]) -> Tuple[float, float]:
    lo, hi = min(values), max(values)
    if hi - lo <= 1e-12 * max(1.0, abs(lo), abs(hi)):
        pad = 1.0 if lo == 0 else 0.5 * abs(lo)
        return lo - pad, hi + pad
    return lo, hi


def _polyline(frame: _Frame, points: Sequence[Point], colour: str, dashed: bool = False) -> str:
    coords = " ".join(f"{_num(u)},{_num(v)}" for u, v in (frame(x, y) for x, y in points))
    dash = ' stroke-dasharray="6,4"' if dashed else ''
    return f'<polyline points="{coords}" fill="none" stroke="{colour}" stroke-width="2"{dash}/>'


def _axes(frame: _Frame, x_label: str, y_label: str) -> List[str]:
    left, bottom = MARGIN, HEIGHT - MARGIN
    right, top = WIDTH - MARGIN, MARGIN
    return [
        f'<line x1="{left}" y1="{bottom}" x2="{right}" y2="{bottom}" stroke="black"/>',
        f'<line x1="{left}" y1="{bottom}" x2="{left}" y2="{top}" stroke="black"/>',
        f'<text x="{left}" y="{bottom + 20}" font-size="12">{_num(frame.x_min)}</text>',
        f'<text x="{right}" y="{bottom + 20}" font-size="12" text-anchor="end">{_num(frame.x_max)}</text>',
        f'<text x="{left - 8}" y="{bottom}" font-size="12" text-anchor="end">{_num(frame.y_min)}</text>',
        f'<text x="{left - 8}" y="{top + 4}" font-size="12" text-anchor="end">{_num(frame.y_max)}</text>',
        f'<text x="{WIDTH // 2}" y="{HEIGHT - 15}" font-size="14" text-anchor="middle">{escape(x_label)}</text>',
        f'<text x="15" y="{HEIGHT // 2}" font-size="14" text-anchor="middle" '
        f'transform="rotate(-90 15 {HEIGHT // 2})">{escape(y_label)}</text>',
    ]


def _document(title: str, body: List[str]) -> str:
    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH // 2}" y="30" font-size="16" text-anchor="middle">{escape(title)}</text>',
        *body,
        '</svg>',
    ]
    return "\n".join(lines) + "\n"


def _ratio_curve(report: ExperimentReport) -> str:
    x_column, y_columns = RATIO_AXES.get(report.experiment_id, (None, ()))
    if x_column is None:
        numeric = [c for c in report.columns if any(v is not None for v in report.numeric_column(c))]
        if len(numeric) < 2:
            raise ReportError(f"Report '{report.experiment_id}' has no numeric columns to plot",
                              {'experiment_id': report.experiment_id})
        x_column, y_columns = numeric[0], tuple(numeric[1:])
    xs = report.numeric_column(x_column)
    series = []
    for column in y_columns:
        points = [(x, y) for x, y in zip(xs, report.numeric_column(column))
                  if x is not None and y is not None and math.isfinite(x) and math.isfinite(y)]
        if points:
            series.append((column, sorted(points)))
    if not series:
        raise ReportError(f"Report '{report.experiment_id}' has no finite points to plot",
                          {'experiment_id': report.experiment_id})
    frame = _Frame([x for _, pts in series for x, _ in pts], [y for _, pts in series for _, y in pts])
    body = _axes(frame, x_column, ", ".join(name for name, _ in series))
    for index, (name, points) in enumerate(series):
        colour = SERIES_COLOURS[index % len(SERIES_COLOURS)]
        body.append(_polyline(frame, points, colour))
        body.append(f'<text x="{WIDTH - MARGIN}" y="{MARGIN + 16 * (index + 1)}" font-size="12" '
                    f'text-anchor="end" fill="{colour}">{escape(name)}</text>')
    return _document(f"{report.experiment_id}: {report.function_tag}", body)


def _section_boundary(report: ExperimentReport) -> str:
    """Finite boundary points as polylines broken at unbounded rays; unbounded rays dashed to the frame."""
    if report.parameters.get('dimension') not in (1, 2):
        raise ReportError("section-boundary plots need a section report in dimension 1 or 2",
                          {'experiment_id': report.experiment_id})
    rows = sorted(report.rows, key=lambda row: row['angle'])
    finite = [(row['x'], row['y']) for row in rows if math.isfinite(row['radius'])]
    if not finite:
        raise ReportError("section has no finite boundary point to plot", {'experiment_id': report.experiment_id})
    base = json.loads(report.parameters.get('x0') or '[0.0, 0.0]')
    centre = (float(base[0]), float(base[1]) if len(base) > 1 else 0.0)
    reach = 1.5 * max(1e-12, max(math.hypot(x - centre[0], y - centre[1]) for x, y in finite))

    runs: List[List[Point]] = [[]]
    rays: List[Point] = []
    for row in rows:
        if math.isfinite(row['radius']):
            runs[-1].append((row['x'], row['y']))
        else:
            rays.append((centre[0] + math.cos(row['angle']) * reach, centre[1] + math.sin(row['angle']) * reach))
            runs.append([])
    if len(runs) > 1 and runs[0] and runs[-1]:
        # the sweep wraps from +pi to -pi
        runs[0] = runs.pop() + runs[0]
    elif not rays:
        runs[0].append(runs[0][0])

    extent = finite + rays + [centre]
    frame = _Frame([x for x, _ in extent], [y for _, y in extent])
    body = _axes(frame, 'x', 'y')
    for run in runs:
        if len(run) >= 2:
            body.append(_polyline(frame, run, SERIES_COLOURS[0]))
        elif len(run) == 1:
            u, v = frame(*run[0])
            body.append(f'<circle cx="{_num(u)}" cy="{_num(v)}" r="3" fill="{SERIES_COLOURS[0]}"/>')
    for ray in rays:
        body.append(_polyline(frame, [centre, ray], SERIES_COLOURS[1], dashed=True))
    return _document(f"section of {report.function_tag}, t={_num(report.parameters.get('t', math.nan))}", body)


def emit_plot(report: ExperimentReport, kind: str) -> str:
    """
    SVG document for a report table.

    Raises:
        ReportError: empty table, unknown kind or a table without plottable columns
    """
    if not report.rows:
        raise ReportError(f"Report '{report.experiment_id}' has an empty table", {'kind': kind},
                          "Nothing to plot: the report table is empty")
    if kind == 'ratio-curve':
        svg = _ratio_curve(report)
    elif kind == 'section-boundary':
        svg = _section_boundary(report)
    else:
        raise ReportError(f"Unknown plot kind '{kind}'; expected one of {', '.join(PLOT_KINDS)}", {'kind': kind})
    logger.info(f"Rendered {kind} plot of {report.experiment_id} ({len(svg)} bytes)")
    return svg
