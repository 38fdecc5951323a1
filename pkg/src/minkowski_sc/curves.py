"""Discrete self-contracted curves.

A polyline γ_0, ..., γ_{n-1} is self-contracted for a norm when, for every
k, the distances ||γ_i - γ_k|| do not increase as i runs up to k.
"""

import logging
import math
import re
from dataclasses import dataclass

import numpy as np

from minkowski_sc.constants import (
    COSINE_TOLERANCE,
    GD_BLOWUP,
    GREEDY_BATCH,
    GREEDY_HALVE_AFTER,
    GREEDY_MAX_REJECTIONS,
    SC_TOLERANCE,
)
from minkowski_sc.convex import convex_hull, diameter
from minkowski_sc.errors import DivergenceError, PreconditionError

logger = logging.getLogger(__name__)

_NUMBER = r"[-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?"
_QUAD_PATTERN = re.compile(rf"quad:({_NUMBER}(?:,{_NUMBER})*)")


@dataclass(frozen=True, eq=False)
class TimedPolyline:
    """Ordered vertices with strictly increasing parameters."""

    vertices: np.ndarray
    params: np.ndarray

    def __post_init__(self):
        vertices = np.asarray(self.vertices, dtype=float).reshape(-1, 2)
        params = np.asarray(self.params, dtype=float).reshape(-1)
        if len(vertices) == 0:
            raise ValueError("A curve needs at least one vertex")
        if len(params) != len(vertices):
            raise ValueError(
                f"Got {len(params)} parameters for {len(vertices)} vertices"
            )
        if not (np.all(np.isfinite(vertices)) and np.all(np.isfinite(params))):
            raise ValueError("Curve vertices and parameters must be finite")
        if np.any(np.diff(params) <= 0):
            raise ValueError("Curve parameters must be strictly increasing")
        if np.any(np.all(vertices[1:] == vertices[:-1], axis=1)):
            raise ValueError("Curve has consecutive duplicate vertices")
        object.__setattr__(self, "vertices", vertices)
        object.__setattr__(self, "params", params)

    def __len__(self):
        return len(self.vertices)


def make_curve(vertices, params=None):
    """TimedPolyline with parameters 0..n-1 unless given."""
    vertices = np.asarray(vertices, dtype=float).reshape(-1, 2)
    if params is None:
        params = np.arange(len(vertices), dtype=float)
    return TimedPolyline(vertices, params)


def length(curve):
    """Euclidean length of the polyline."""
    steps = np.diff(curve.vertices, axis=0)
    return float(np.hypot(steps[:, 0], steps[:, 1]).sum())


def suffix(curve, index):
    """The part of the curve from vertex ``index`` on."""
    if not 0 <= index < len(curve):
        raise IndexError(f"Vertex index {index} out of range for {len(curve)} vertices")
    return TimedPolyline(curve.vertices[index:], curve.params[index:])


def normalize_unit_diameter(curve):
    """Translate the first vertex to the origin and scale to unit diameter.

    Returns:
        tuple: (normalised curve, original diameter). A single point is
        only translated.
    """
    size = diameter(convex_hull(curve.vertices))
    shifted = curve.vertices - curve.vertices[0]
    if size > 0:
        shifted = shifted / size
    return TimedPolyline(shifted, curve.params), size


def distance_matrix(curve, norm):
    """D[i, k] = ||γ_i - γ_k|| for all vertex pairs."""
    v = curve.vertices
    return norm.value(v[:, None, :] - v[None, :, :])


@dataclass(frozen=True)
class SelfContractedReport:
    is_sc: bool
    worst_violation: tuple | None
    checked_triples: int

    def as_dict(self):
        worst = None
        if self.worst_violation is not None:
            i, j, k, defect = self.worst_violation
            worst = {"i": i, "j": j, "k": k, "defect": defect}
        return {
            "is_self_contracted": self.is_sc,
            "worst_violation": worst,
            "checked_triples": self.checked_triples,
        }


def is_self_contracted(curve, norm, tol=SC_TOLERANCE):
    """Check that i -> ||γ_i - γ_k|| is non-increasing on i ≤ k for every k.

    Distances are taken after scaling to unit diameter. The defect is the
    largest D[j, k] - D[i, k] over i < j ≤ k, found per column from the
    running minimum, so the check costs O(n²).
    """
    n = len(curve)
    if n < 2:
        raise ValueError("Self-contractedness needs at least two vertices")

    size = diameter(convex_hull(curve.vertices))
    distances = distance_matrix(curve, norm) / size
    running_min = np.minimum.accumulate(distances, axis=0)
    candidates = distances[1:] - running_min[:-1]
    rows, cols = np.indices(candidates.shape)
    candidates = np.where(rows + 1 <= cols, candidates, -np.inf)

    j, k = np.unravel_index(int(np.argmax(candidates)), candidates.shape)
    j = int(j) + 1
    k = int(k)
    defect = float(candidates[j - 1, k])
    i = int(np.argmin(distances[:j, k]))
    report = SelfContractedReport(
        is_sc=defect <= tol,
        worst_violation=(i, j, k, defect),
        checked_triples=n * (n - 1) * (n + 1) // 6,
    )
    logger.debug(f"Self-contracted check on {n} vertices: defect {defect!r}")
    return report


def bisector_side_check(curve, norm, i, j):
    """Margins ||γ_i - γ_k|| - ||γ_j - γ_k|| for the tail k ≥ j.

    A self-contracted curve keeps every tail vertex on the γ_j side of the
    bisector M(γ_i, γ_j), so all margins are nonnegative.
    """
    if not 0 <= i < j < len(curve):
        raise IndexError(f"Need 0 ≤ i < j < {len(curve)}, got ({i}, {j})")
    tail = curve.vertices[j:]
    return norm.value(curve.vertices[i] - tail) - norm.value(curve.vertices[j] - tail)


@dataclass(frozen=True, eq=False)
class GreedyRun:
    """Generated curve with the generator's telemetry."""

    curve: TimedPolyline
    stalled: bool
    proposals: int
    accepted: int
    halvings: int
    final_step: float

    @property
    def acceptance_rate(self):
        return self.accepted / self.proposals if self.proposals else 0.0

    def telemetry(self):
        return {
            "n": len(self.curve),
            "stalled": self.stalled,
            "proposals": self.proposals,
            "accepted": self.accepted,
            "acceptance_rate": self.acceptance_rate,
            "halvings": self.halvings,
            "final_step": self.final_step,
        }


def generate_greedy(
    norm,
    n,
    step,
    seed,
    batch=GREEDY_BATCH,
    halve_after=GREEDY_HALVE_AFTER,
    max_rejections=GREEDY_MAX_REJECTIONS,
):
    """Grow a self-contracted polyline from the origin by random steps.

    A proposal z at distance ``step`` from the last vertex is kept iff
    ||γ_i - z|| ≥ ||γ_{i+1} - z|| for every existing i. The step halves
    after ``halve_after`` consecutive rejections. If one vertex costs
    ``max_rejections`` proposals the run stops early with ``stalled`` set.

    Returns:
        GreedyRun: The curve and its telemetry.
    """
    if n < 2:
        raise ValueError(f"n must be ≥ 2, got {n}")
    if not step > 0:
        raise ValueError(f"step must be positive, got {step}")

    rng = np.random.Generator(np.random.PCG64(seed))
    points = [np.zeros(2)]
    current = float(step)
    proposals = halvings = consecutive = rejected_here = 0
    stalled = False

    while len(points) < n:
        path = np.array(points)
        size = min(batch, halve_after - consecutive)
        angles = rng.uniform(0.0, 2.0 * math.pi, size)
        candidates = path[-1] + current * np.column_stack((np.cos(angles), np.sin(angles)))
        dists = norm.value(path[None, :, :] - candidates[:, None, :])
        feasible = np.all(dists[:, :-1] >= dists[:, 1:], axis=1)
        hits = np.flatnonzero(feasible)

        if hits.size:
            first = int(hits[0])
            proposals += first + 1
            points.append(candidates[first])
            consecutive = rejected_here = 0
            continue

        proposals += size
        consecutive += size
        rejected_here += size
        if consecutive >= halve_after:
            current *= 0.5
            halvings += 1
            consecutive = 0
            logger.debug(f"Step halved to {current!r} at vertex {len(points)}")
        if rejected_here >= max_rejections:
            stalled = True
            logger.warning(
                f"Greedy generator stalled at {len(points)} of {n} vertices (seed {seed})"
            )
            break

    run = GreedyRun(
        curve=make_curve(np.array(points)),
        stalled=stalled,
        proposals=proposals,
        accepted=len(points) - 1,
        halvings=halvings,
        final_step=current,
    )
    logger.debug(f"Greedy seed {seed}: {run.telemetry()}")
    return run


@dataclass(frozen=True, eq=False)
class QuadraticPotential:
    """f(x) = ½ <H x, x> with H symmetric positive definite."""

    hessian: np.ndarray

    @property
    def largest_eigenvalue(self):
        return float(np.linalg.eigvalsh(self.hessian)[-1])


def parse_quadratic(text):
    """Parse ``quad:h1,h2`` (diagonal) or ``quad:h11,h12,h21,h22``."""
    match = _QUAD_PATTERN.fullmatch(text.strip())
    if not match:
        raise ValueError(
            f"Unrecognised potential {text!r}; expected quad:h1,h2 or quad:h11,h12,h21,h22"
        )
    entries = [float(entry) for entry in match.group(1).split(",")]
    if len(entries) == 2:
        hessian = np.diag(entries)
    elif len(entries) == 4:
        hessian = np.array(entries).reshape(2, 2)
    else:
        raise ValueError(f"A quadratic potential takes 2 or 4 entries, got {len(entries)}")
    if not np.allclose(hessian, hessian.T, rtol=0.0, atol=1e-12):
        raise ValueError(f"Hessian must be symmetric, got {hessian.tolist()}")
    if np.linalg.eigvalsh(hessian)[0] <= 0:
        raise ValueError(f"Hessian must be positive definite, got {hessian.tolist()}")
    return QuadraticPotential(hessian)


def generate_gradient_descent(potential, x0, step, n):
    """Explicit Euler iterates x_{k+1} = x_k - step·∇f(x_k).

    Self-contractedness is not assumed; validate the result under the norm
    of interest. Iteration stops early if an update leaves x unchanged.

    Raises:
        ValueError: If step is outside (0, 2/λmax) or n < 2.
        DivergenceError: If iterates become non-finite or blow up.
    """
    if isinstance(potential, str):
        potential = parse_quadratic(potential)
    if n < 2:
        raise ValueError(f"n must be ≥ 2, got {n}")
    bound = 2.0 / potential.largest_eigenvalue
    if not 0 < step < bound:
        raise ValueError(f"step must lie in (0, {bound}) for this potential, got {step}")

    x = np.asarray(x0, dtype=float)
    limit = GD_BLOWUP * max(1.0, float(np.hypot(*x)))
    points = [x]
    for k in range(1, n):
        x = x - step * (potential.hessian @ x)
        if not np.all(np.isfinite(x)) or np.hypot(*x) > limit:
            raise DivergenceError(f"Gradient descent diverged at iterate {k}: {x.tolist()}")
        if np.array_equal(x, points[-1]):
            logger.info(f"Gradient descent reached a fixed point after {k} iterates")
            break
        points.append(x)
    return make_curve(np.array(points))


@dataclass(frozen=True)
class TripleCosineReport:
    min_cosine: float
    triple: tuple | None
    bound: float

    @property
    def holds(self):
        return self.min_cosine >= self.bound - COSINE_TOLERANCE

    def as_dict(self):
        return {
            "min_cosine": self.min_cosine,
            "triple": None if self.triple is None else list(self.triple),
            "bound": self.bound,
            "holds": self.holds,
        }


def triple_cosine_check(curve, norm, alpha0_value):
    """Smallest cosine between y - x0 and y' - x0 over x0 before y before y'.

    For a self-contracted curve it stays above -cos(α₀).

    Raises:
        PreconditionError: If the curve is not self-contracted under norm.
    """
    verdict = is_self_contracted(curve, norm)
    if not verdict.is_sc:
        raise PreconditionError(
            f"Curve is not self-contracted; worst violation {verdict.worst_violation}"
        )

    vertices = curve.vertices
    worst = 1.0
    triple = None
    for i in range(len(vertices) - 2):
        rays = vertices[i + 1 :] - vertices[i]
        rays = rays / np.hypot(rays[:, 0], rays[:, 1])[:, None]
        gram = rays @ rays.T
        gram[np.tril_indices(len(rays))] = np.inf
        flat = int(np.argmin(gram))
        value = float(gram.flat[flat])
        if value < worst:
            a, b = np.unravel_index(flat, gram.shape)
            worst = value
            triple = (i, i + 1 + int(a), i + 1 + int(b))

    report = TripleCosineReport(
        min_cosine=worst, triple=triple, bound=-math.cos(alpha0_value)
    )
    if not report.holds:
        logger.error(f"Triple cosine {worst!r} at {triple} is below {report.bound!r}")
    return report
