"""Curve bisectors M(a, b), their asymptote lines and the κ-strip.

The bisector is parametrised through chords of the unit ball. For a norm-unit
direction v and an offset t along the Euclidean normal n, the line t·n + ℝv
meets the sphere at a_t and b_t, and

    z(t) = a + ||b - a|| · (-a_t) / ||b_t - a_t||

runs through the whole bisector as t sweeps (-t0, t0).
"""

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize, root_scalar

from minkowski_sc.constants import (
    APRIORI_KAPPA,
    BISECTION_TOLERANCE,
    CHORD_BRACKET,
    KAPPA_DIRECTION_GRID,
    KAPPA_MIN_GRID,
    KAPPA_REFINE_CANDIDATES,
    KAPPA_T_GRID,
    KAPPA_U_CLIP,
    NEWTON_STEPS,
    RESIDUAL_TOLERANCE,
    TRACE_MARGIN,
    TRACE_SAMPLES,
)
from minkowski_sc.errors import (
    ChordMissesBallError,
    DegenerateSegmentError,
    RootFindingError,
    StrictConvexityError,
)
from minkowski_sc.norms import cross, dual_direction, perp

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class Segment:
    a: np.ndarray
    b: np.ndarray
    v: np.ndarray
    norm_length: float

    @property
    def midpoint(self):
        return 0.5 * (self.a + self.b)

    @property
    def unit(self):
        """Norm-unit direction of b - a."""
        return self.v / self.norm_length


def make_segment(norm, a, b):
    """Build a Segment, rejecting a == b."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    v = b - a
    norm_length = float(norm.value(v))
    if norm_length == 0.0:
        raise DegenerateSegmentError(f"Bisector of a segment needs a ≠ b, got {a.tolist()}")
    return Segment(a=a, b=b, v=v, norm_length=norm_length)


@dataclass(frozen=True, eq=False)
class ChordSample:
    t: float
    a_t: np.ndarray
    b_t: np.ndarray
    m_t: np.ndarray
    chord_norm: float


@dataclass(frozen=True, eq=False)
class ChordFrame:
    """Per-direction data shared by every chord parallel to v."""

    v: np.ndarray  # norm-unit
    n: np.ndarray  # Euclidean unit normal, <y, n> = t0 > 0
    y: np.ndarray
    line_direction: np.ndarray
    t0: float
    s_tangent: float  # coordinate of y along v


def chord_frame(norm, v):
    """Normalise v and compute its tangency point and support extent."""
    v = np.asarray(v, dtype=float)
    size = float(norm.value(v))
    if size == 0.0 or not math.isfinite(size):
        raise ValueError(f"Chord direction must be a nonzero finite vector, got {v.tolist()}")
    v = v / size
    n = perp(v) / math.hypot(v[0], v[1])
    dual = dual_direction(norm, v)
    t0 = float(dual.y @ n)
    s_tangent = float(dual.y @ v) / float(v @ v)
    return ChordFrame(
        v=v, n=n, y=dual.y, line_direction=dual.line_direction, t0=t0, s_tangent=s_tangent
    )


def _solve_chords(norm, frame, t):
    """Vectorised roots s1 < s2 of s -> ||t·n + s·v|| - 1.

    Each root is bracketed on its side of the chord minimiser, bisected to
    BISECTION_TOLERANCE and polished with safeguarded Newton steps. Entries
    where the line misses the ball come back as NaN.
    """
    t = np.asarray(t, dtype=float)
    s_mid = (t / frame.t0) * frame.s_tangent
    base = t[:, None] * frame.n + s_mid[:, None] * frame.v
    inside = (np.abs(t) < frame.t0) & (norm.value(base) < 1.0)

    roots = []
    for sign in (-1.0, 1.0):
        direction = sign * frame.v

        def residual(u):
            return norm.value(base + u[:, None] * direction) - 1.0

        lo = np.zeros_like(t)
        hi = np.full_like(t, CHORD_BRACKET)
        while np.max(hi - lo, initial=0.0) > BISECTION_TOLERANCE:
            mid = 0.5 * (lo + hi)
            below = residual(mid) < 0.0
            lo = np.where(below, mid, lo)
            hi = np.where(below, hi, mid)

        u = 0.5 * (lo + hi)
        for _ in range(NEWTON_STEPS):
            slope = norm.gradient(base + u[:, None] * direction) @ direction
            value = residual(u)
            safe = np.where(slope > 0.0, slope, 1.0)
            step = u - value / safe
            accept = (slope > 0.0) & (step >= lo) & (step <= hi)
            u = np.where(accept, step, u)
        roots.append(s_mid + sign * u)

    s1, s2 = roots
    s1 = np.where(inside, s1, np.nan)
    s2 = np.where(inside, s2, np.nan)
    return s1, s2


def _chord_points(norm, frame, t):
    t = np.atleast_1d(np.asarray(t, dtype=float))
    s1, s2 = _solve_chords(norm, frame, t)
    offset = t[:, None] * frame.n
    a_t = offset + s1[:, None] * frame.v
    b_t = offset + s2[:, None] * frame.v
    return a_t, b_t, s2 - s1


def chord_endpoints(norm, v, t, frame=None):
    """Endpoints of the chord of the unit ball along t·n + ℝv.

    Raises:
        ChordMissesBallError: If |t| ≥ t0.
    """
    frame = frame or chord_frame(norm, v)
    if not abs(t) < frame.t0:
        raise ChordMissesBallError(f"|t| = {abs(t)} must be below t0 = {frame.t0}")
    a_t, b_t, width = _chord_points(norm, frame, [t])
    if not np.isfinite(width[0]):
        raise ChordMissesBallError(f"Line at t = {t} does not cross the open unit ball")
    return ChordSample(
        t=float(t),
        a_t=a_t[0],
        b_t=b_t[0],
        m_t=0.5 * (a_t[0] + b_t[0]),
        chord_norm=float(width[0]),
    )


def chord_width(norm, v, t, frame=None):
    """||b_t - a_t|| for the chord at offset t."""
    return chord_endpoints(norm, v, t, frame=frame).chord_norm


def _bisector_points(norm, segment, frame, t):
    a_t, _, width = _chord_points(norm, frame, t)
    return segment.a + segment.norm_length * (-a_t) / width[:, None]


def bisector_point(norm, segment, t):
    """Point of M(a, b) attached to the chord offset t."""
    frame = chord_frame(norm, segment.v)
    sample = chord_endpoints(norm, frame.v, t, frame=frame)
    return segment.a + segment.norm_length * (-sample.a_t) / sample.chord_norm


def graded_offsets(t0, n_samples, margin=TRACE_MARGIN):
    """Offsets t0·sign(s)(1 - 2^-|s|), dense near ±t0, stopping at relative margin."""
    if n_samples < 3:
        raise ValueError(f"n_samples must be ≥ 3, got {n_samples}")
    exponent = math.log2(1.0 / margin)
    s = np.linspace(-exponent, exponent, n_samples)
    return t0 * np.sign(s) * (1.0 - np.exp2(-np.abs(s)))


def _oblique(v, w, x):
    return cross(x, w) / cross(v, w)


def oblique_projection(norm, v, x, frame=None):
    """Coefficient of x along v in the basis (v, L_v), v normalised to ||v|| = 1."""
    frame = frame or chord_frame(norm, v)
    return _oblique(frame.v, frame.line_direction, np.asarray(x, dtype=float))


def strip_contains(norm, segment, kappa, x, frame=None):
    """Whether x lies in the strip |Q_v(x - (a+b)/2)| ≤ κ||b - a||."""
    if not 0.0 <= kappa <= 0.5:
        raise ValueError(f"kappa must lie in [0, 1/2], got {kappa}")
    frame = frame or chord_frame(norm, segment.v)
    offset = np.asarray(x, dtype=float) - segment.midpoint
    q = _oblique(frame.v, frame.line_direction, offset)
    return np.abs(q) <= kappa * segment.norm_length


@dataclass(frozen=True, eq=False)
class BisectorTrace:
    """Sampled bisector with its asymptote line L(a, b)."""

    segment: Segment
    t: np.ndarray
    samples: np.ndarray
    residuals: np.ndarray
    failed: np.ndarray
    in_strip: np.ndarray
    asymptote_point: np.ndarray
    asymptote_direction: np.ndarray
    kappa_used: float


def bisector_residual(norm, segment, z):
    """| ||a - z|| - ||b - z|| | for each point z."""
    return np.abs(norm.value(segment.a - z) - norm.value(segment.b - z))


def trace_bisector(norm, segment, n_samples=TRACE_SAMPLES, kappa=None, margin=TRACE_MARGIN):
    """Sample M(a, b) on the graded offset grid.

    Without a κ the a-priori strip S_{1/2} is used. Samples whose chord solve
    fails or whose residual exceeds the tolerance are flagged in ``failed``.
    """
    kappa_used = APRIORI_KAPPA if kappa is None else float(kappa)
    frame = chord_frame(norm, segment.v)
    t = graded_offsets(frame.t0, n_samples, margin)
    samples = _bisector_points(norm, segment, frame, t)
    residuals = bisector_residual(norm, segment, samples)

    scale = np.maximum(1.0, norm.value(segment.a - samples))
    failed = ~np.isfinite(residuals) | (residuals > RESIDUAL_TOLERANCE * scale)
    in_strip = strip_contains(norm, segment, kappa_used, samples, frame=frame)
    if np.any(failed):
        logger.warning(f"{int(failed.sum())} of {n_samples} bisector samples failed")
    outside = ~in_strip & ~failed
    if np.any(outside):
        logger.warning(f"{int(outside.sum())} bisector samples lie outside S_{kappa_used}")

    return BisectorTrace(
        segment=segment,
        t=t,
        samples=samples,
        residuals=residuals,
        failed=failed,
        in_strip=in_strip,
        asymptote_point=segment.midpoint,
        asymptote_direction=frame.line_direction,
        kappa_used=kappa_used,
    )


def _kappa_ratios(norm, frame, u):
    a_t, b_t, width = _chord_points(norm, frame, u * frame.t0)
    midpoints = 0.5 * (a_t + b_t)
    q = _oblique(frame.v, frame.line_direction, midpoints)
    return np.abs(q) / width


def kappa_estimate(
    norm, direction_grid=KAPPA_DIRECTION_GRID, t_grid=KAPPA_T_GRID, refine=True
):
    """Estimate κ = sup |Q_v(m_t)| / ||b_t - a_t|| over directions and offsets.

    The grid maximum is refined by Nelder-Mead runs from the best grid cells.

    Raises:
        ValueError: If a grid is coarser than the minimum.
        StrictConvexityError: If the estimate reaches 1/2.
    """
    if direction_grid < KAPPA_MIN_GRID or t_grid < KAPPA_MIN_GRID:
        raise ValueError(f"kappa grids must be ≥ {KAPPA_MIN_GRID}")

    logger.info(f"Estimating kappa for {norm.spec} on a {direction_grid}x{t_grid} grid")
    phis = np.arange(direction_grid) * math.pi / direction_grid
    us = -1.0 + (2.0 * np.arange(t_grid) + 1.0) / t_grid
    ratios = np.empty((direction_grid, t_grid))
    for i, phi in enumerate(phis):
        frame = chord_frame(norm, (math.cos(phi), math.sin(phi)))
        ratios[i] = _kappa_ratios(norm, frame, us)

    best = float(np.nanmax(ratios))
    if refine:

        def negative_ratio(params):
            phi, u = params
            u = min(max(u, -KAPPA_U_CLIP), KAPPA_U_CLIP)
            frame = chord_frame(norm, (math.cos(phi), math.sin(phi)))
            ratio = _kappa_ratios(norm, frame, np.array([u]))[0]
            return -ratio if np.isfinite(ratio) else 0.0

        order = np.argsort(np.nan_to_num(ratios, nan=-1.0), axis=None)
        for flat in order[-KAPPA_REFINE_CANDIDATES:]:
            i, j = np.unravel_index(flat, ratios.shape)
            start = np.array([phis[i], us[j]])
            simplex = np.array(
                [start, start + [math.pi / direction_grid, 0.0], start + [0.0, 1.0 / t_grid]]
            )
            result = minimize(
                negative_ratio,
                start,
                method="Nelder-Mead",
                options={
                    "initial_simplex": simplex,
                    "xatol": 1e-10,
                    "fatol": 1e-15,
                    "maxiter": 400,
                },
            )
            best = max(best, -float(result.fun))

    if best >= 0.5:
        raise StrictConvexityError(
            f"kappa estimate {best} ≥ 1/2 for {norm.spec}; strict convexity is broken"
        )
    logger.info(f"kappa({norm.spec}) = {best!r}")
    return best


def _offset_for_width(norm, frame, width):
    """Offset t in (-t0, 0] whose chord has norm length ``width`` (< 2)."""

    def chord_at(log_u):
        return _chord_points(norm, frame, [-frame.t0 * (1.0 - math.exp(log_u))])[2][0]

    if chord_at(0.0) <= width:
        return 0.0
    upper = 0.0
    for k in range(1, 60):
        lower = -k * math.log(2.0)
        if chord_at(lower) < width:
            break
        upper = lower
    else:
        raise RootFindingError(f"Chord width {width} not reached near the tangency point")

    try:
        solution = root_scalar(
            lambda log_u: math.log(chord_at(log_u)) - math.log(width),
            bracket=(lower, upper),
            method="brentq",
            xtol=1e-14,
        )
    except ValueError as e:
        raise RootFindingError(f"Chord width {width} not bracketed on {(lower, upper)}") from e
    return -frame.t0 * (1.0 - math.exp(solution.root))


def _check_radii(radii):
    radii = [float(radius) for radius in radii]
    for radius in radii:
        if not radius >= 0.5:
            raise ValueError(f"Radii must be ≥ 1/2, got {radius}")
    return radii


def asymptote_deviation(norm, segment, radii):
    """Distance from z_R to L(a, b) for each R, on the segment rescaled to unit length.

    z_R is the bisector point attached to the chord of norm length 1/R, i.e.
    ||z_R - a|| = R. Returns a list of (R, distance) pairs.
    """
    radii = _check_radii(radii)
    frame = chord_frame(norm, segment.v)
    rows = []
    for radius in radii:
        t = _offset_for_width(norm, frame, 1.0 / radius)
        a_t, b_t, width = _chord_points(norm, frame, [t])
        z = -a_t[0] / width[0]
        distance = abs(float(cross(z - 0.5 * frame.v, frame.line_direction)))
        logger.debug(f"R={radius}: t={t!r}, deviation={distance!r}")
        rows.append((radius, distance))
    return rows


def limit_direction_error(norm, segment, radii):
    """Euclidean gap between (z_R - a)/||z_R - a|| and its limit on L_{b-a}."""
    radii = _check_radii(radii)
    frame = chord_frame(norm, segment.v)
    rows = []
    for radius in radii:
        t = _offset_for_width(norm, frame, 1.0 / radius)
        a_t, _, _ = _chord_points(norm, frame, [t])
        gap = float(np.hypot(*(-a_t[0] - frame.y)))
        rows.append((radius, gap))
    return rows


def deviation_slope(rows):
    """Least-squares slope of log(deviation) against log(R)."""
    radii = np.array([radius for radius, _ in rows])
    deviations = np.array([deviation for _, deviation in rows])
    slope, _ = np.polyfit(np.log(radii), np.log(deviations), 1)
    return float(slope)
