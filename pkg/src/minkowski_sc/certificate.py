"""Rectifiability certificate for self-contracted curves.

The constants chain turns (α₀, κ) of a norm into a rate c₀ such that
every pair x' before x on a self-contracted curve satisfies

    W(Ω(x)) + c₀ |x - x'| ≤ W(Ω(x')),

where Ω(x) is the convex hull of the curve from x on and W is mean width.
Telescoping gives ℓ(γ) ≤ (1/c₀)·W(K(γ)) ≤ C·diam(K(γ)) with C = 1/c₀.
This module computes the chain, builds the separating direction for each
pair and checks the resulting inequalities on concrete curves.
"""

import logging
import math
from dataclasses import asdict, dataclass

import numpy as np

from minkowski_sc.bisector import kappa_estimate
from minkowski_sc.constants import (
    ALPHA0_RESOLUTION,
    CERTIFICATE_TOLERANCE,
    KAPPA_DIRECTION_GRID,
    KAPPA_T_GRID,
    PAIR_STRIDE,
    SLACK_TOLERANCE,
    TAIL_RELATIVE_TOLERANCE,
)
from minkowski_sc.convex import convex_hull, diameter, exact_mean_width
from minkowski_sc.curves import (
    bisector_side_check,
    is_self_contracted,
    length,
    normalize_unit_diameter,
)
from minkowski_sc.errors import (
    LemmaViolationError,
    LengthBoundError,
    PreconditionError,
    StrictConvexityError,
)
from minkowski_sc.norms import alpha0, dual_direction, perp

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ConstantsBundle:
    alpha0: float
    kappa: float
    lam: float
    tau1: float
    mu: float
    eps0: float
    tau: float
    delta: float
    c0: float
    C: float

    def as_dict(self):
        values = asdict(self)
        values["lambda"] = values.pop("lam")
        order = ("alpha0", "kappa", "lambda", "tau1", "mu", "eps0", "tau", "delta", "c0", "C")
        return {key: values[key] for key in order}


def bundle_from_angles(alpha0_value, kappa):
    """Constants chain as a pure function of α₀ and κ.

    Raises:
        StrictConvexityError: If α₀ ∉ (0, π/2] or κ ∉ [0, 1/2).
    """
    if not 0.0 < alpha0_value <= math.pi / 2:
        raise StrictConvexityError(f"alpha0 must lie in (0, π/2], got {alpha0_value}")
    if not 0.0 <= kappa < 0.5:
        raise StrictConvexityError(f"kappa must lie in [0, 1/2), got {kappa}")

    lam = 0.5 - kappa
    tau1 = math.sin(alpha0_value)
    mu = min(0.25, math.sin(alpha0_value / 2.0) / 4.0)
    eps0 = min(tau1 / 6.0, mu / 3.0, lam / 12.0)
    tau = min(mu, lam / 4.0, eps0 / 2.0)
    delta = min(tau, tau1 / 4.0)
    # λτ/4 per unit of arc, integrated over an arc of angle 2·asin(δ/2), over 2π
    c0 = (lam * tau / 4.0) * (2.0 * math.asin(delta / 2.0)) / (2.0 * math.pi)
    return ConstantsBundle(
        alpha0=alpha0_value,
        kappa=kappa,
        lam=lam,
        tau1=tau1,
        mu=mu,
        eps0=eps0,
        tau=tau,
        delta=delta,
        c0=c0,
        C=1.0 / c0,
    )


def derive_constants(
    norm,
    alpha0_resolution=ALPHA0_RESOLUTION,
    direction_grid=KAPPA_DIRECTION_GRID,
    t_grid=KAPPA_T_GRID,
):
    """Estimate α₀ and κ for a norm and assemble the constants chain."""
    alpha = alpha0(norm, alpha0_resolution)
    kappa = kappa_estimate(norm, direction_grid, t_grid)
    bundle = bundle_from_angles(alpha, kappa)
    logger.info(f"Constants for {norm.spec}: c0={bundle.c0!r}, C={bundle.C!r}")
    return bundle


def beta_mu_bound(mu):
    """Upper bound -cos(2·asin(2μ)) on the cosine threshold β_μ."""
    return -math.cos(2.0 * math.asin(2.0 * mu))


def perturbed_normal(nu, eps):
    """ν_ε = (ν + ε ν^⊥) / |ν + ε ν^⊥|."""
    nu = np.asarray(nu, dtype=float)
    turned = nu + eps * perp(nu)
    return turned / np.hypot(turned[0], turned[1])


def tail_hull(curve, index):
    """Convex hull Ω of the vertices from ``index`` on."""
    if not 0 <= index < len(curve):
        raise IndexError(f"Vertex index {index} out of range for {len(curve)} vertices")
    return convex_hull(curve.vertices[index:])


@dataclass(frozen=True, eq=False)
class PairCertificate:
    """Separating direction for the pair x' = γ_i, x = γ_j (i < j).

    Geometry is expressed in coordinates where |x - x'| = 1.
    """

    i: int
    j: int
    x: np.ndarray
    x_prime: np.ndarray
    v0: np.ndarray
    x0: np.ndarray
    nu: np.ndarray
    nu_bar: np.ndarray
    eps: float
    h1_count: int
    h_mu_count: int
    h_plus_count: int
    h_minus_count: int
    tail1_margin: float
    cl20_value: float
    cl21_value: float
    polar_value: float
    gain_value: float
    tail1: bool
    cl20: bool
    cl21: bool
    polar: bool

    @property
    def ok(self):
        return self.tail1 and self.cl20 and self.cl21 and self.polar

    def as_dict(self):
        return {
            "i": self.i,
            "j": self.j,
            "eps": self.eps,
            "h1": self.h1_count,
            "h_mu": self.h_mu_count,
            "h_plus": self.h_plus_count,
            "h_minus": self.h_minus_count,
            "tail1_margin": self.tail1_margin,
            "cl20": self.cl20_value,
            "cl21": self.cl21_value,
            "polar": self.polar_value,
            "gain": self.gain_value,
            "ok": self.ok,
        }


def separating_vector(norm, curve, i, j, bundle):
    """Build ν̄ for the pair x' = γ_i, x = γ_j and check it against the tail Γ(x).

    ν is the unit normal of the dual line L_{v₀} pointing towards x'. Tail
    points in the near-orthogonal region H'_μ must sit on one side of ν
    only; ν̄ is ν turned by ε₀ away from that side. The certificate then
    needs <ν̄, v₀> ≥ τ₁/2 and <ν̄, ξ₀(y)> ≤ -δ for every tail vertex y, and
    the same cone condition for the directions within δ of ν̄.

    Raises:
        PreconditionError: If some tail vertex is closer to x' than to x.
        LemmaViolationError: If tail points sit on both sides.
    """
    if not 0 <= i < j < len(curve):
        raise IndexError(f"Need 0 ≤ i < j < {len(curve)}, got ({i}, {j})")
    margins = bisector_side_check(curve, norm, i, j)
    scale_ref = float(norm.value(curve.vertices[i] - curve.vertices[j]))
    if np.min(margins) < -TAIL_RELATIVE_TOLERANCE * scale_ref:
        raise PreconditionError(
            f"Tail of γ_{j} crosses the bisector of (γ_{i}, γ_{j}); "
            "curve is not self-contracted"
        )

    x_prime = curve.vertices[i]
    x = curve.vertices[j]
    gap = float(np.hypot(*(x_prime - x)))
    v0 = (x_prime - x) / gap
    tail = (curve.vertices[j:] - x) / gap
    x0 = v0 * (1.0 - bundle.lam / 2.0)

    w = dual_direction(norm, v0).line_direction
    nu = perp(w)
    if nu @ v0 < 0:
        nu = -nu
    nu_dot_v0 = float(nu @ v0)

    offsets = tail - x0
    dist = np.hypot(offsets[:, 0], offsets[:, 1])
    xi = offsets / dist[:, None]

    tail1_values = offsets @ nu
    tail1_limit = -(bundle.lam / 2.0) * nu_dot_v0 * (1.0 - TAIL_RELATIVE_TOLERANCE)
    tail1_margin = float(tail1_limit - np.max(tail1_values))

    c = xi @ nu
    h1 = c <= -2.0 * bundle.mu
    h2 = (c > -2.0 * bundle.mu) & (c <= 0.0)
    h_mu = h2 & (dist <= 1.0)
    h_prime = h2 & (dist > 1.0)
    side = offsets @ perp(v0)
    h_plus = h_prime & (side >= 0.0)
    h_minus = h_prime & (side < 0.0)

    if h_plus.any() and h_minus.any():
        raise LemmaViolationError(
            f"Pair ({i}, {j}): tail occupies both sides of the near-orthogonal region "
            f"({int(h_plus.sum())} above, {int(h_minus.sum())} below)"
        )
    eps = -bundle.eps0 if h_plus.any() else bundle.eps0
    nu_bar = perturbed_normal(nu, eps)

    cl20_value = float(nu_bar @ v0)
    cl21_value = float(np.max(xi @ nu_bar))

    half_angle = 2.0 * math.asin(bundle.delta / 2.0)
    polar_value = -math.inf
    gain_value = math.inf
    for angle in (-half_angle, 0.0, half_angle):
        rotation = np.array(
            [[math.cos(angle), -math.sin(angle)], [math.sin(angle), math.cos(angle)]]
        )
        direction = rotation @ nu_bar
        polar_value = max(polar_value, float(np.max(xi @ direction)))
        gain_value = min(gain_value, float(direction @ (v0 - x0)))
    gain_bound = (bundle.lam / 2.0) * (bundle.tau / 2.0)

    certificate = PairCertificate(
        i=i,
        j=j,
        x=x,
        x_prime=x_prime,
        v0=v0,
        x0=x0,
        nu=nu,
        nu_bar=nu_bar,
        eps=eps,
        h1_count=int(h1.sum()),
        h_mu_count=int(h_mu.sum()),
        h_plus_count=int(h_plus.sum()),
        h_minus_count=int(h_minus.sum()),
        tail1_margin=tail1_margin,
        cl20_value=cl20_value,
        cl21_value=cl21_value,
        polar_value=polar_value,
        gain_value=gain_value,
        tail1=tail1_margin >= 0.0,
        cl20=cl20_value >= bundle.tau1 / 2.0 - CERTIFICATE_TOLERANCE,
        cl21=cl21_value <= -bundle.delta + CERTIFICATE_TOLERANCE,
        polar=polar_value <= CERTIFICATE_TOLERANCE
        and gain_value >= gain_bound - CERTIFICATE_TOLERANCE,
    )
    if not certificate.ok:
        logger.error(f"Pair certificate failed: {certificate.as_dict()}")
    return certificate


def certify_pairs(norm, curve, bundle, pairs=None):
    """Run separating_vector over all pairs i < j (or the given ones).

    Lemma violations are counted rather than raised.

    Raises:
        PreconditionError: If the curve is not self-contracted.
    """
    verdict = is_self_contracted(curve, norm)
    if not verdict.is_sc:
        raise PreconditionError(
            f"Curve is not self-contracted; worst violation {verdict.worst_violation}"
        )
    n = len(curve)
    if pairs is None:
        pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]

    failures = []
    lemma_violations = 0
    for i, j in pairs:
        try:
            certificate = separating_vector(norm, curve, i, j, bundle)
        except LemmaViolationError as e:
            logger.error(str(e))
            lemma_violations += 1
            continue
        if not certificate.ok:
            failures.append(certificate.as_dict())
    return {
        "pairs_checked": len(pairs),
        "pair_failures": len(failures),
        "lemma_violations": lemma_violations,
        "failures": failures,
    }


def _require_self_contracted(curve, norm):
    if len(curve) < 2:
        raise PreconditionError("The certificate needs at least two vertices")
    verdict = is_self_contracted(curve, norm)
    if not verdict.is_sc:
        raise PreconditionError(
            f"Curve is not self-contracted; worst violation {verdict.worst_violation}"
        )


def tail_widths(curve):
    """W(Ω(γ_k)) for every k, through perimeter / π."""
    return np.array([exact_mean_width(tail_hull(curve, k)) for k in range(len(curve))])


@dataclass(frozen=True)
class WidthDecrementReport:
    pairs_checked: int
    min_slack: float
    worst_pair: tuple
    empirical_c0: float
    c0: float
    violations: list

    @property
    def holds(self):
        return self.min_slack >= -SLACK_TOLERANCE

    def as_dict(self):
        return {
            "pairs_checked": self.pairs_checked,
            "min_slack": self.min_slack,
            "worst_pair": list(self.worst_pair),
            "empirical_c0": self.empirical_c0,
            "c0": self.c0,
            "violations": self.violations,
            "holds": self.holds,
        }


def width_decrement_check(curve, norm, bundle, pair_stride=PAIR_STRIDE):
    """Check W(Ω(x)) + c₀|x - x'| ≤ W(Ω(x')) on sampled pairs.

    Pairs come from the vertices with index divisible by ``pair_stride``
    plus the last one, in unit-diameter coordinates. Violations are logged
    with the curve, pair and slack; they do not raise.
    """
    if pair_stride < 1:
        raise ValueError(f"pair_stride must be ≥ 1, got {pair_stride}")
    _require_self_contracted(curve, norm)

    unit, _ = normalize_unit_diameter(curve)
    widths = tail_widths(unit)
    n = len(unit)
    indices = sorted(set(range(0, n, pair_stride)) | {n - 1})

    rows = [(i, j) for a, i in enumerate(indices) for j in indices[a + 1 :]]
    first = np.array([i for i, _ in rows])
    second = np.array([j for _, j in rows])
    steps = unit.vertices[second] - unit.vertices[first]
    gaps = np.hypot(steps[:, 0], steps[:, 1])
    drops = widths[first] - widths[second]
    slacks = drops - bundle.c0 * gaps
    rates = drops / gaps

    worst = int(np.argmin(slacks))
    violations = []
    for k in np.flatnonzero(slacks < -SLACK_TOLERANCE):
        violation = {"i": int(first[k]), "j": int(second[k]), "slack": float(slacks[k])}
        violations.append(violation)
        logger.error(
            f"Width decrement violated at pair ({violation['i']}, {violation['j']}) "
            f"with slack {violation['slack']!r}; curve vertices:\n"
            f"{np.array2string(unit.vertices, precision=17)}"
        )

    return WidthDecrementReport(
        pairs_checked=len(rows),
        min_slack=float(slacks[worst]),
        worst_pair=(int(first[worst]), int(second[worst])),
        empirical_c0=float(np.min(rates)),
        c0=bundle.c0,
        violations=violations,
    )


@dataclass(frozen=True)
class LengthBoundReport:
    length: float
    diam: float
    mean_width: float
    ratio: float
    C: float
    telescoped: float
    width_bound: float

    @property
    def telescoping_holds(self):
        return self.length <= self.width_bound * (1.0 + SLACK_TOLERANCE)

    def as_dict(self):
        return {
            "length": self.length,
            "diam": self.diam,
            "mean_width": self.mean_width,
            "ratio": self.ratio,
            "C": self.C,
            "telescoped": self.telescoped,
            "width_bound": self.width_bound,
            "telescoping_holds": self.telescoping_holds,
        }


def length_bound_report(curve, norm, bundle):
    """Length against the certified bound C·diam(K(γ)).

    ``telescoped`` sums the width drops between consecutive vertices, which
    add up to W(K(γ)); ``width_bound`` is W(K(γ))/c₀.

    Raises:
        LengthBoundError: If ℓ(γ)/diam(K(γ)) exceeds C.
    """
    _require_self_contracted(curve, norm)
    hull = convex_hull(curve.vertices)
    widths = tail_widths(curve)
    total = length(curve)
    diam = diameter(hull)
    report = LengthBoundReport(
        length=total,
        diam=diam,
        mean_width=float(widths[0]),
        ratio=total / diam,
        C=bundle.C,
        telescoped=float(np.sum(widths[:-1] - widths[1:])),
        width_bound=float(widths[0]) / bundle.c0,
    )
    if report.ratio > bundle.C:
        raise LengthBoundError(
            f"Length ratio {report.ratio!r} exceeds the certified constant {bundle.C!r}"
        )
    logger.debug(f"Length bound: {report.as_dict()}")
    return report
