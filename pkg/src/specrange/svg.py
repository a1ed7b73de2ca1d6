"""Standalone SVG drawing of a spectrum and a numerical range."""
from __future__ import annotations

from typing import Optional, Sequence

import numpy as np

SIZE = 800
MARGIN = 40


def _num(x: float) -> str:
    return f"{x:.4f}"


def render_range_svg(spectrum: Sequence[complex], boundary: Sequence[complex],
                     target_radius: Optional[float] = None, title: str = "") -> str:
    """Spectrum as dots, range as a filled polygon, unit and target circles.

    The output depends only on the inputs, so it is byte-stable.
    """
    spectrum = np.asarray(spectrum, dtype=np.complex128)
    boundary = np.asarray(boundary, dtype=np.complex128)
    extent = max([1.0, target_radius or 0.0]
                 + [float(np.abs(a).max()) for a in (spectrum, boundary) if a.size])
    extent *= 1.1
    scale = (SIZE / 2 - MARGIN) / extent
    c = SIZE / 2

    def px(z):
        return c + scale * z.real, c - scale * z.imag

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" '
           f'viewBox="0 0 {SIZE} {SIZE}">',
           f'<rect x="0" y="0" width="{SIZE}" height="{SIZE}" fill="white"/>']
    if title:
        out.append(f'<text x="{MARGIN}" y="{MARGIN // 2 + 6}" font-family="sans-serif" '
                   f'font-size="16">{title}</text>')
    out.append(f'<line x1="{MARGIN}" y1="{_num(c)}" x2="{SIZE - MARGIN}" y2="{_num(c)}" '
               f'stroke="#999" stroke-width="1"/>')
    out.append(f'<line x1="{_num(c)}" y1="{MARGIN}" x2="{_num(c)}" y2="{SIZE - MARGIN}" '
               f'stroke="#999" stroke-width="1"/>')
    if boundary.size >= 3:
        pts = " ".join(f"{_num(x)},{_num(y)}" for x, y in map(px, boundary))
        out.append(f'<polygon points="{pts}" fill="#555" fill-opacity="0.6" stroke="black" '
                   f'stroke-width="1"/>')
    elif boundary.size:
        for x, y in map(px, boundary):
            out.append(f'<circle cx="{_num(x)}" cy="{_num(y)}" r="4" fill="#555"/>')
    out.append(f'<circle cx="{_num(c)}" cy="{_num(c)}" r="{_num(scale)}" fill="none" '
               f'stroke="blue" stroke-dasharray="4 3" stroke-width="1"/>')
    if target_radius:
        out.append(f'<circle cx="{_num(c)}" cy="{_num(c)}" r="{_num(scale * target_radius)}" '
                   f'fill="none" stroke="red" stroke-width="1.5"/>')
    for x, y in map(px, spectrum):
        out.append(f'<circle cx="{_num(x)}" cy="{_num(y)}" r="2" fill="orange" stroke="black" '
                   f'stroke-width="0.3"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
