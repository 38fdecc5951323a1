"""C² strictly convex planar norms: evaluation, unit sphere, normals and dual lines.

Every norm is stored as x -> ||A x||_p with p >= 2 and A invertible; the
Euclidean norm is the case p = 2, A = I. Points are numpy arrays whose last
axis has length 2, so all evaluations broadcast over batches of points.
"""

import logging
import math
import re
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar, root_scalar

from minkowski_sc.constants import (
    ALPHA0_MIN_RESOLUTION,
    ALPHA0_RESOLUTION,
    LINE_SIGN_TOLERANCE,
    MIN_P,
    ROOT_RTOL,
    ROOT_XTOL,
    SINGULAR_DETERMINANT,
)
from minkowski_sc.errors import NormSpecError, RootFindingError, StrictConvexityError

logger = logging.getLogger(__name__)

IDENTITY = (1.0, 0.0, 0.0, 1.0)
_NUMBER = r"[-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?"
_LP_PATTERN = re.compile(rf"lp:({_NUMBER})")
_ALP_PATTERN = re.compile(rf"alp:({_NUMBER}):({_NUMBER}(?:,{_NUMBER}){{3}})")


@dataclass(frozen=True)
class NormSpec:
    """Parsed norm description: family, exponent and linear map."""

    family: str
    p: float = 2.0
    matrix: tuple = IDENTITY

    def __str__(self):
        return format_norm(self)


def _format_number(value):
    text = repr(float(value))
    return text[:-2] if text.endswith(".0") else text


def _check_exponent(p, text):
    if not math.isfinite(p) or p < MIN_P:
        raise NormSpecError(f"p must be ≥ 2 (got {p} in {text!r})")


def parse_norm(text):
    """Parse a norm spec string.

    Grammar: ``euclid`` | ``lp:<p>`` | ``alp:<p>:<a11>,<a12>,<a21>,<a22>``.

    Raises:
        NormSpecError: Unknown family, p < 2 or a singular matrix.
    """
    text = text.strip()
    if text == "euclid":
        return NormSpec("euclid")

    match = _LP_PATTERN.fullmatch(text)
    if match:
        p = float(match.group(1))
        _check_exponent(p, text)
        return NormSpec("lp", p)

    match = _ALP_PATTERN.fullmatch(text)
    if match:
        p = float(match.group(1))
        _check_exponent(p, text)
        matrix = tuple(float(entry) for entry in match.group(2).split(","))
        if not all(math.isfinite(entry) for entry in matrix):
            raise NormSpecError(f"Matrix entries must be finite in {text!r}")
        a11, a12, a21, a22 = matrix
        if abs(a11 * a22 - a12 * a21) <= SINGULAR_DETERMINANT:
            raise NormSpecError(f"Matrix must be invertible in {text!r}")
        return NormSpec("alp", p, matrix)

    raise NormSpecError(
        f"Unrecognised norm spec {text!r}; expected euclid, lp:<p> or "
        "alp:<p>:<a11>,<a12>,<a21>,<a22>"
    )


def format_norm(spec):
    """Serialise a NormSpec back to its spec string."""
    if spec.family == "euclid":
        return "euclid"
    if spec.family == "lp":
        return f"lp:{_format_number(spec.p)}"
    entries = ",".join(_format_number(entry) for entry in spec.matrix)
    return f"alp:{_format_number(spec.p)}:{entries}"


@dataclass(frozen=True, eq=False)
class NormModel:
    """Evaluation, gradient and sphere parametrisation of a norm."""

    spec: NormSpec
    matrix: np.ndarray = field(init=False, repr=False)
    identity: bool = field(init=False, repr=False)

    def __post_init__(self):
        matrix = np.asarray(self.spec.matrix, dtype=float).reshape(2, 2)
        object.__setattr__(self, "matrix", matrix)
        object.__setattr__(self, "identity", self.spec.matrix == IDENTITY)

    @property
    def p(self):
        return self.spec.p

    def _apply(self, x):
        x = np.asarray(x, dtype=float)
        if self.identity:
            return x
        return x @ self.matrix.T

    def _lp(self, y):
        if self.p == 2.0:
            return np.hypot(y[..., 0], y[..., 1])
        ay = np.abs(y)
        scale = np.maximum(ay[..., 0], ay[..., 1])
        safe = np.where(scale > 0, scale, 1.0)
        ratio = ay / safe[..., None]
        total = np.power(ratio, self.p).sum(axis=-1)
        return np.where(scale > 0, scale * np.power(total, 1.0 / self.p), 0.0)

    def value(self, x):
        """Norm of each point along the last axis."""
        return self._lp(self._apply(x))

    def gradient(self, x):
        """Gradient of the norm at nonzero points (0-homogeneous)."""
        y = self._apply(x)
        scale = np.asarray(self._lp(y))[..., None]
        grad = np.sign(y) * np.power(np.abs(y) / scale, self.p - 1.0)
        if self.identity:
            return grad
        return grad @ self.matrix

    def sphere_param(self, theta):
        """Unit-sphere point positively proportional to (cos θ, sin θ)."""
        theta = np.asarray(theta, dtype=float)
        u = np.stack((np.cos(theta), np.sin(theta)), axis=-1)
        return u / np.asarray(self.value(u))[..., None]


def build_norm(spec_or_text):
    """Build a NormModel from a NormSpec or a spec string."""
    spec = spec_or_text if isinstance(spec_or_text, NormSpec) else parse_norm(spec_or_text)
    return NormModel(spec)


def perp(v):
    """Counterclockwise quarter turn of each vector."""
    v = np.asarray(v, dtype=float)
    return np.stack((-v[..., 1], v[..., 0]), axis=-1)


def cross(u, v):
    """Scalar cross product u × v."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    return u[..., 0] * v[..., 1] - u[..., 1] * v[..., 0]


def _nonzero_point(x, what):
    x = np.asarray(x, dtype=float)
    if x.shape != (2,):
        raise ValueError(f"{what} expects a single planar point, got shape {x.shape}")
    if not np.all(np.isfinite(x)) or not np.any(x):
        raise ValueError(f"{what} is undefined for {x.tolist()}")
    return x


def evaluate(norm, x):
    """Norm value of a point (float) or of a batch of points (array)."""
    result = norm.value(x)
    return float(result) if np.ndim(result) == 0 else result


def sphere_point(norm, theta):
    """Boundary point of the unit ball in direction theta."""
    return norm.sphere_param(theta)


def outer_normal(norm, x):
    """Euclidean unit outer normal to the sphere through x.

    Raises:
        ValueError: If x is the zero vector.
    """
    x = _nonzero_point(x, "outer_normal")
    g = norm.gradient(x)
    return g / np.hypot(g[0], g[1])


def alignment(norm, x):
    """Angle between the radius to x and the tangent line at x's sphere point.

    The value lies in (0, π/2]; the Euclidean norm gives π/2 everywhere.
    """
    x = np.asarray(x, dtype=float)
    radial = x / np.asarray(np.hypot(x[..., 0], x[..., 1]))[..., None]
    g = norm.gradient(x)
    nu = g / np.asarray(np.hypot(g[..., 0], g[..., 1]))[..., None]
    cos_part = (nu * radial).sum(axis=-1)
    return np.arctan2(cos_part, np.abs(cross(nu, radial)))


@dataclass(frozen=True, eq=False)
class DualDirection:
    """Tangency point y for direction x and the dual line L_x = span(y)."""

    x: np.ndarray
    y: np.ndarray
    line_direction: np.ndarray


def canonical_direction(d):
    """Unit vector of d with a positive first component (second if first is zero)."""
    d = np.asarray(d, dtype=float)
    d = d / np.hypot(d[0], d[1])
    if d[0] < -LINE_SIGN_TOLERANCE or (
        abs(d[0]) <= LINE_SIGN_TOLERANCE and d[1] < 0
    ):
        d = -d
    return d


def dual_direction(norm, x):
    """Sphere point y whose tangent line is directed by x, with <y, x^⊥> > 0.

    The tangency condition <∇N(y), x> = 0 changes sign over the half-turn
    starting at the angle of x, so a bracketed solve always applies. Brent's
    method stalls on higher-order zeros (A·y on a coordinate axis with p > 2);
    those fall back to plain bisection on the same bracket.

    Raises:
        ValueError: If x is the zero vector.
        RootFindingError: If the bracketed solve does not converge.
    """
    x = _nonzero_point(x, "dual_direction")
    theta_x = math.atan2(x[1], x[0])

    def tangency(theta):
        return float(norm.gradient(norm.sphere_param(theta)) @ x)

    bracket = (theta_x, theta_x + math.pi)
    try:
        solution = root_scalar(
            tangency, bracket=bracket, method="brentq", xtol=ROOT_XTOL, rtol=ROOT_RTOL
        )
        if not solution.converged:
            logger.debug(
                f"Brent solve for x={x.tolist()} stalled at θ={solution.root} "
                f"({solution.flag}); bisecting"
            )
            solution = root_scalar(
                tangency, bracket=bracket, method="bisect", xtol=ROOT_XTOL, rtol=ROOT_RTOL
            )
    except ValueError as e:
        raise RootFindingError(
            f"No sign change of the tangency condition on {bracket} for x={x.tolist()}"
        ) from e
    if not solution.converged:
        raise RootFindingError(
            f"Tangency solve for x={x.tolist()} stopped at θ={solution.root} "
            f"with residual {tangency(solution.root):.3e} ({solution.flag})"
        )

    y = norm.sphere_param(solution.root)
    return DualDirection(x=x, y=y, line_direction=canonical_direction(y))


def support_extent(norm, n):
    """Height t0 = max <z, n> over the unit sphere for a Euclidean unit n."""
    n = _nonzero_point(n, "support_extent")
    n = n / np.hypot(n[0], n[1])
    tangent = np.array([n[1], -n[0]])
    return float(dual_direction(norm, tangent).y @ n)


def alpha0(norm, grid_resolution=ALPHA0_RESOLUTION):
    """Minimal angle between radius and tangent over the unit sphere.

    Sin of the result is the infimum of <ν_x, x/|x|>. A uniform angular grid
    locates the minimum, which a golden-section search then refines.

    Raises:
        ValueError: If grid_resolution is below the minimum.
        StrictConvexityError: If the minimum is not positive.
    """
    if grid_resolution < ALPHA0_MIN_RESOLUTION:
        raise ValueError(
            f"grid_resolution must be ≥ {ALPHA0_MIN_RESOLUTION}, got {grid_resolution}"
        )

    thetas = np.linspace(0.0, 2.0 * math.pi, grid_resolution, endpoint=False)
    values = alignment(norm, norm.sphere_param(thetas))
    k = int(np.argmin(values))
    best = float(values[k])

    def objective(theta):
        return float(alignment(norm, norm.sphere_param(theta)))

    h = 2.0 * math.pi / grid_resolution
    lower, upper = thetas[k] - h, thetas[k] + h
    if objective(lower) > best and objective(upper) > best:
        refined = minimize_scalar(
            objective,
            bracket=(lower, thetas[k], upper),
            method="golden",
            options={"xtol": 1e-12},
        )
        best = min(best, float(refined.fun))
    else:
        logger.debug(f"Alignment is flat around θ={thetas[k]:.6f}, skipping refinement")

    if best <= 0.0:
        raise StrictConvexityError(
            f"Minimal alignment angle {best} ≤ 0 for {norm.spec}; "
            "the model is not a strictly convex norm"
        )
    logger.debug(f"alpha0({norm.spec}) = {best!r} at resolution {grid_resolution}")
    return best
