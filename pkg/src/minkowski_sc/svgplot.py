"""Static SVG figures of bisector constructions and curves."""

import logging
import math

import numpy as np
import svgwrite

from minkowski_sc.constants import SVG_DECIMALS, SVG_SIZE
from minkowski_sc.convex import convex_hull, diameter
from minkowski_sc.storage import atomic_write_text

logger = logging.getLogger(__name__)

BALL_SAMPLES = 256


def _points(array):
    """Rounded (x, -y) tuples; SVG's y axis points down."""
    array = np.asarray(array, dtype=float).reshape(-1, 2)
    return [(round(float(x), SVG_DECIMALS), round(-float(y), SVG_DECIMALS)) for x, y in array]


def _drawing(points):
    """Drawing whose viewBox frames ``points`` with a 5% margin."""
    finite = points[np.all(np.isfinite(points), axis=1)]
    low = finite.min(axis=0)
    high = finite.max(axis=0)
    span = max(float(np.max(high - low)), 1e-9)
    pad = 0.05 * span
    x0, y0 = low[0] - pad, -high[1] - pad
    side = span + 2 * pad
    dwg = svgwrite.Drawing(size=(f"{SVG_SIZE}px", f"{SVG_SIZE}px"), profile="full", debug=False)
    dwg.attribs["viewBox"] = " ".join(
        str(round(float(value), SVG_DECIMALS)) for value in (x0, y0, side, side)
    )
    return dwg, side


def _ball(norm, center, radius):
    thetas = np.linspace(0.0, 2.0 * math.pi, BALL_SAMPLES, endpoint=False)
    return np.asarray(center) + radius * norm.sphere_param(thetas)


def bisector_svg(norm, trace):
    """SVG text: ball around a through b, segment, bisector, asymptote and strip."""
    segment = trace.segment
    samples = trace.samples[~trace.failed]
    ball = _ball(norm, segment.a, segment.norm_length)
    extent = float(np.max(np.abs(samples - segment.midpoint))) if len(samples) else 1.0
    w = trace.asymptote_direction
    asymptote = np.array([segment.midpoint - extent * w, segment.midpoint + extent * w])
    shift = trace.kappa_used * segment.v
    strip = [asymptote + shift, asymptote - shift]

    dwg, side = _drawing(np.vstack([ball, samples, asymptote, *strip]))
    stroke = side / 400.0

    dwg.add(
        dwg.polygon(
            points=_points(ball), id="ball", fill="none", stroke="#888", stroke_width=stroke
        )
    )
    dash = round(4 * stroke, SVG_DECIMALS)
    strip_group = dwg.g(
        id="strip", stroke="#2a7", stroke_width=stroke, stroke_dasharray=f"{dash},{dash}"
    )
    for line in strip:
        strip_group.add(dwg.polyline(points=_points(line), fill="none"))
    dwg.add(strip_group)
    for name, line, colour, width in (
        ("asymptote", asymptote, "#27c", stroke),
        ("bisector", samples, "#d11", 2 * stroke),
    ):
        dwg.add(
            dwg.polyline(
                points=_points(line), id=name, fill="none", stroke=colour, stroke_width=width
            )
        )
    dwg.add(
        dwg.polyline(
            points=_points([segment.a, segment.b]),
            id="segment",
            fill="none",
            stroke="#111",
            stroke_width=2 * stroke,
        )
    )
    return dwg.tostring()


def curve_svg(norm, curve):
    """SVG text: curve polyline, its convex hull, vertices and a scaled unit ball."""
    vertices = curve.vertices
    hull = convex_hull(vertices)
    radius = 0.25 * diameter(hull) if len(vertices) > 1 else 1.0
    ball = _ball(norm, vertices[0], radius)

    dwg, side = _drawing(np.vstack([vertices, ball]))
    stroke = side / 400.0

    dwg.add(
        dwg.polygon(
            points=_points(ball), id="ball", fill="none", stroke="#888", stroke_width=stroke
        )
    )
    dwg.add(
        dwg.polygon(
            points=_points(hull.vertices),
            id="hull",
            fill="#27c",
            fill_opacity=0.1,
            stroke="#27c",
            stroke_width=stroke,
        )
    )
    dwg.add(
        dwg.polyline(
            points=_points(vertices), id="curve", fill="none", stroke="#111", stroke_width=stroke
        )
    )
    dots = dwg.g(id="vertices", fill="#d11", stroke="none")
    for x, y in _points(vertices):
        dots.add(dwg.circle(center=(x, y), r=round(1.5 * stroke, SVG_DECIMALS)))
    dwg.add(dots)
    return dwg.tostring()


def save_bisector_svg(norm, trace, output_file):
    path = atomic_write_text(output_file, bisector_svg(norm, trace))
    logger.info(f"Bisector figure written to {path}")
    return path


def save_curve_svg(norm, curve, output_file):
    path = atomic_write_text(output_file, curve_svg(norm, curve))
    logger.info(f"Curve figure written to {path}")
    return path
