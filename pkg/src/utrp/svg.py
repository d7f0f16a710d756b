"""Running-frequency plots as standalone SVG (one panel per realization)."""

from __future__ import annotations

from typing import Mapping, Sequence
from xml.sax.saxutils import escape

from .behavior_net import SimulationReport

PANEL_W, PANEL_H = 520, 160
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 60, 20, 28, 34


def convergence_svg(
    report: SimulationReport,
    expected: Mapping[tuple[str, ...], float] | None = None,
    sequences: Sequence[tuple[str, ...]] | None = None,
) -> str:
    """Running frequency against run count, with a dashed line at ``expected``."""
    expected = expected or {}
    if sequences is None:
        sequences = sorted(set(report.sequences) | set(expected))
    width = PANEL_W
    height = PANEL_H * len(sequences)
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
    ]
    n = max(report.n_runs, 1)
    plot_w = PANEL_W - MARGIN_L - MARGIN_R
    plot_h = PANEL_H - MARGIN_T - MARGIN_B
    for k, seq in enumerate(sequences):
        top = k * PANEL_H + MARGIN_T
        series = report.convergence(seq)
        target = expected.get(tuple(seq))
        values = [f for _, f in series] + ([target] if target is not None else [])
        y_max = min(1.0, max(values + [0.05]) * 1.15)

        def px(i, top=top):
            return MARGIN_L + plot_w * (i / n)

        def py(f, top=top, y_max=y_max):
            return top + plot_h * (1.0 - f / y_max)

        title = "<" + ",".join(seq) + ">"
        if target is not None:
            title += f"  expected {target:.4f}"
        final = report.frequency(seq)
        title += f"  observed {final:.4f}"
        out.append(f'<text x="{MARGIN_L}" y="{top - 10}" font-weight="bold">{escape(title)}</text>')
        out.append(
            f'<rect x="{MARGIN_L}" y="{top}" width="{plot_w}" height="{plot_h}" '
            'fill="none" stroke="#444" stroke-width="1"/>'
        )
        for frac in (0.0, 0.5, 1.0):
            v = y_max * frac
            y = py(v)
            out.append(f'<text x="{MARGIN_L - 6}" y="{y + 4:.1f}" text-anchor="end">{v:.2f}</text>')
        for frac in (0.0, 0.5, 1.0):
            x = MARGIN_L + plot_w * frac
            out.append(
                f'<text x="{x:.1f}" y="{top + plot_h + 14}" text-anchor="middle">{round(n * frac)}</text>'
            )
        out.append(
            f'<text x="{MARGIN_L + plot_w / 2:.1f}" y="{top + plot_h + 28}" '
            'text-anchor="middle" fill="#555">runs</text>'
        )
        if target is not None:
            y = py(target)
            out.append(
                f'<line x1="{MARGIN_L}" y1="{y:.2f}" x2="{MARGIN_L + plot_w}" y2="{y:.2f}" '
                'stroke="#d62728" stroke-dasharray="5,4" stroke-width="1.2"/>'
            )
        pts = " ".join(f"{px(i):.2f},{py(f):.2f}" for i, f in series)
        out.append(f'<polyline points="{pts}" fill="none" stroke="#1f77b4" stroke-width="1.4"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
