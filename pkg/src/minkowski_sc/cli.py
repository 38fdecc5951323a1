"""Command-line interface for minkowski-sc."""

import argparse
import logging
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

from minkowski_sc import __version__
from minkowski_sc.bisector import (
    asymptote_deviation,
    deviation_slope,
    kappa_estimate,
    limit_direction_error,
    make_segment,
    trace_bisector,
)
from minkowski_sc.certificate import (
    bundle_from_angles,
    certify_pairs,
    derive_constants,
    length_bound_report,
    width_decrement_check,
)
from minkowski_sc.constants import (
    ALPHA0_RESOLUTION,
    DEFAULT_CURVE_POINTS,
    DEFAULT_NORM,
    DEFAULT_SEED,
    DEVIATION_RADII,
    GD_STEP,
    GREEDY_STEP,
    KAPPA_DIRECTION_GRID,
    KAPPA_T_GRID,
    PAIR_STRIDE,
    SC_TOLERANCE,
    TRACE_SAMPLES,
)
from minkowski_sc.curves import (
    generate_greedy,
    generate_gradient_descent,
    is_self_contracted,
    triple_cosine_check,
)
from minkowski_sc.errors import CertificateError, PreconditionError, StrictConvexityError
from minkowski_sc.norms import alpha0, build_norm, format_norm
from minkowski_sc.storage import (
    load_curve,
    save_curve,
    save_trace,
    write_report,
)
from minkowski_sc.svgplot import save_bisector_svg, save_curve_svg

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_INPUT = 2


@dataclass(frozen=True)
class RunConfig:
    """Parsed command line, echoed into every report."""

    command: str
    norm: str
    options: dict = field(default_factory=dict)

    @classmethod
    def from_args(cls, args):
        skip = {"func", "command", "norm", "verbose"}
        options = {}
        for key, value in sorted(vars(args).items()):
            if key in skip:
                continue
            if isinstance(value, Path):
                value = str(value)
            elif isinstance(value, tuple):
                value = list(value)
            options[key] = value
        return cls(command=args.command, norm=args.norm, options=options)

    def as_dict(self):
        return {"command": self.command, "norm": self.norm, **self.options}


def _norm(args):
    norm = build_norm(args.norm)
    return norm, format_norm(norm.spec)


def _bundle(norm, args):
    return derive_constants(
        norm,
        alpha0_resolution=args.alpha0_resolution,
        direction_grid=args.direction_grid,
        t_grid=args.t_grid,
    )


def _curves(norm, args):
    """(seed, curve) pairs from --curve or from the greedy generator."""
    if args.curve is not None:
        return [(None, load_curve(args.curve))]
    curves = []
    for seed in range(args.seed, args.seed + args.count):
        run = generate_greedy(norm, args.n, args.step, seed)
        curves.append((seed, run.curve))
    logger.info(f"Generated {len(curves)} greedy curves with n={args.n}")
    return curves


def norm_info_command(args):
    """Handle the norm-info subcommand."""
    norm, name = _norm(args)
    bundle = _bundle(norm, args)
    report = {
        "norm": name,
        "alpha0": bundle.alpha0,
        "kappa": bundle.kappa,
        "bundle": bundle.as_dict(),
        "config": RunConfig.from_args(args).as_dict(),
    }
    write_report(report, args.output)
    return EXIT_OK


def alpha0_command(args):
    """Handle the alpha0 subcommand."""
    norm, name = _norm(args)
    value = alpha0(norm, args.resolution)
    report = {
        "norm": name,
        "alpha0": value,
        "sin_alpha0": math.sin(value),
        "config": RunConfig.from_args(args).as_dict(),
    }
    write_report(report, args.output)
    return EXIT_OK


def kappa_command(args):
    """Handle the kappa subcommand."""
    norm, name = _norm(args)
    value = kappa_estimate(norm, args.direction_grid, args.t_grid, refine=not args.no_refine)
    report = {"norm": name, "kappa": value, "config": RunConfig.from_args(args).as_dict()}
    write_report(report, args.output)
    return EXIT_OK


def bisector_command(args):
    """Handle the bisector subcommand."""
    norm, name = _norm(args)
    segment = make_segment(norm, args.a, args.b)
    kappa = args.kappa
    if args.estimate_kappa:
        kappa = kappa_estimate(norm, args.direction_grid, args.t_grid)
    trace = trace_bisector(norm, segment, args.samples, kappa=kappa)

    save_trace(trace, args.output)
    if args.svg:
        save_bisector_svg(norm, trace, args.svg)

    deviations = asymptote_deviation(norm, segment, args.radii)
    directions = limit_direction_error(norm, segment, args.radii)
    positive = [(radius, value) for radius, value in deviations if value > 0]
    report = {
        "norm": name,
        "a": segment.a.tolist(),
        "b": segment.b.tolist(),
        "asymptote": {
            "point": trace.asymptote_point.tolist(),
            "direction": trace.asymptote_direction.tolist(),
        },
        "kappa_used": trace.kappa_used,
        "failed_samples": int(trace.failed.sum()),
        "outside_strip": int((~trace.in_strip & ~trace.failed).sum()),
        "max_residual": float(trace.residuals[~trace.failed].max(initial=0.0)),
        "deviations": [
            {"R": radius, "deviation": deviation, "direction_error": error}
            for (radius, deviation), (_, error) in zip(deviations, directions)
        ],
        "deviation_slope": deviation_slope(positive) if len(positive) >= 2 else None,
        "config": RunConfig.from_args(args).as_dict(),
    }
    if args.report:
        write_report(report, args.report)
    else:
        logger.info(f"Asymptote {report['asymptote']}, deviations {report['deviations']}")
    return EXIT_NEGATIVE if trace.failed.any() else EXIT_OK


def generate_command(args):
    """Handle the generate subcommand."""
    norm, _ = _norm(args)
    if args.method == "greedy":
        run = generate_greedy(norm, args.n, args.step, args.seed)
        logger.info(f"Greedy telemetry: {run.telemetry()}")
        curve = run.curve
    else:
        curve = generate_gradient_descent(args.potential, args.x0, args.step, args.n)
        verdict = is_self_contracted(curve, norm)
        logger.info(
            f"Gradient descent curve is self-contracted under {args.norm}: {verdict.is_sc} "
            f"(defect {verdict.worst_violation[3]!r})"
        )
    save_curve(curve, args.output)
    return EXIT_OK


def verify_command(args):
    """Handle the verify subcommand."""
    norm, name = _norm(args)
    curve = load_curve(args.curve)
    verdict = is_self_contracted(curve, norm, args.tolerance)
    report = {"norm": name, "curve": str(args.curve), "n": len(curve), **verdict.as_dict()}
    if verdict.is_sc:
        value = alpha0(norm, args.alpha0_resolution)
        report["alpha0"] = value
        report["triple_cosine"] = triple_cosine_check(curve, norm, value).as_dict()
    else:
        logger.warning(f"Curve is not self-contracted: {report['worst_violation']}")
    report["config"] = RunConfig.from_args(args).as_dict()
    write_report(report, args.output)
    return EXIT_OK if verdict.is_sc else EXIT_NEGATIVE


def certify_command(args):
    """Handle the certify subcommand."""
    norm, name = _norm(args)
    curves = _curves(norm, args)
    for seed, curve in curves:
        verdict = is_self_contracted(curve, norm)
        if not verdict.is_sc:
            raise PreconditionError(
                f"Curve (seed {seed}) is not self-contracted: {verdict.worst_violation}"
            )

    bundle = _bundle(norm, args)
    entries = []
    failed = False
    for seed, curve in curves:
        bound = length_bound_report(curve, norm, bundle)
        decrement = width_decrement_check(curve, norm, bundle, args.pair_stride)
        entry = {
            "seed": seed,
            "n": len(curve),
            "length": bound.length,
            "diam": bound.diam,
            "mean_width": bound.mean_width,
            "ratio": bound.ratio,
            "min_decrement_slack": decrement.min_slack,
            "empirical_c0": decrement.empirical_c0,
        }
        failed = failed or not decrement.holds
        if not args.no_pairs:
            pairs = certify_pairs(norm, curve, bundle)
            entry["pairs_checked"] = pairs["pairs_checked"]
            entry["pair_failures"] = pairs["pair_failures"]
            entry["lemma_violations"] = pairs["lemma_violations"]
            failed = failed or pairs["pair_failures"] > 0 or pairs["lemma_violations"] > 0
        entries.append(entry)
        logger.info(f"Certified curve seed={seed}: ratio {bound.ratio:.4f} ≤ C={bundle.C:.4g}")

    report = {"norm": name, **bundle.as_dict(), "curves": entries}
    report["config"] = RunConfig.from_args(args).as_dict()
    write_report(report, args.output)
    return EXIT_NEGATIVE if failed else EXIT_OK


def bound_report_command(args):
    """Handle the bound-report subcommand."""
    norm, name = _norm(args)
    if args.alpha0 is not None and args.kappa is not None:
        bundle = bundle_from_angles(args.alpha0, args.kappa)
    else:
        bundle = _bundle(norm, args)
    reports = []
    for seed, curve in _curves(norm, args):
        reports.append({"seed": seed, **length_bound_report(curve, norm, bundle).as_dict()})
    report = {
        "norm": name,
        "c0": bundle.c0,
        "C": bundle.C,
        "curves": reports,
        "max_ratio": max(entry["ratio"] for entry in reports),
        "config": RunConfig.from_args(args).as_dict(),
    }
    logger.info(f"Largest length/diameter ratio under {name}: {report['max_ratio']!r}")
    write_report(report, args.output)
    return EXIT_OK


def plot_command(args):
    """Handle the plot subcommand."""
    norm, _ = _norm(args)
    curve = load_curve(args.curve)
    save_curve_svg(norm, curve, args.output)
    return EXIT_OK


def _add_norm(parser):
    parser.add_argument(
        "--norm",
        default=DEFAULT_NORM,
        help="Norm spec: euclid, lp:<p> or alp:<p>:<a11>,<a12>,<a21>,<a22> "
        f"(default: {DEFAULT_NORM})",
    )


def _add_constant_grids(parser):
    parser.add_argument(
        "--alpha0-resolution",
        type=int,
        default=ALPHA0_RESOLUTION,
        help=f"Angular grid for alpha0 (default: {ALPHA0_RESOLUTION})",
    )
    parser.add_argument(
        "--direction-grid",
        type=int,
        default=KAPPA_DIRECTION_GRID,
        help=f"Chord directions for kappa (default: {KAPPA_DIRECTION_GRID})",
    )
    parser.add_argument(
        "--t-grid",
        type=int,
        default=KAPPA_T_GRID,
        help=f"Chord offsets per direction for kappa (default: {KAPPA_T_GRID})",
    )


def _add_curve_source(parser):
    parser.add_argument("--curve", type=Path, help="Curve CSV (default: generate greedy curves)")
    parser.add_argument(
        "--seed",
        type=int,
        default=DEFAULT_SEED,
        help=f"First generator seed (default: {DEFAULT_SEED})",
    )
    parser.add_argument(
        "--count", type=int, default=1, help="Number of generated curves (default: 1)"
    )
    parser.add_argument(
        "--n",
        type=int,
        default=DEFAULT_CURVE_POINTS,
        help=f"Vertices per generated curve (default: {DEFAULT_CURVE_POINTS})",
    )
    parser.add_argument(
        "--step",
        type=float,
        default=GREEDY_STEP,
        help=f"Initial greedy step (default: {GREEDY_STEP})",
    )


def _add_output(parser, what="JSON report"):
    parser.add_argument("--output", type=Path, help=f"Output {what} path (default: stdout)")


def main(argv=None):
    """Main CLI entry point."""
    parser = argparse.ArgumentParser(
        description="minkowski-sc - Minkowski-plane geometry and self-contracted curves",
        prog="minkowski-sc",
    )
    parser.add_argument("--version", action="version", version=f"minkowski-sc {__version__}")
    parser.add_argument("--verbose", action="store_true", help="Log at DEBUG level")

    subparsers = parser.add_subparsers(dest="command", help="Available commands", required=True)

    # Norm info command
    info_parser = subparsers.add_parser("norm-info", help="Print alpha0, kappa and the constants")
    _add_norm(info_parser)
    _add_constant_grids(info_parser)
    _add_output(info_parser)
    info_parser.set_defaults(func=norm_info_command)

    # Alpha0 command
    alpha_parser = subparsers.add_parser("alpha0", help="Minimal radius/tangent angle of the norm")
    _add_norm(alpha_parser)
    alpha_parser.add_argument(
        "--resolution",
        type=int,
        default=ALPHA0_RESOLUTION,
        help=f"Angular grid before refinement (default: {ALPHA0_RESOLUTION})",
    )
    _add_output(alpha_parser)
    alpha_parser.set_defaults(func=alpha0_command)

    # Kappa command
    kappa_parser = subparsers.add_parser("kappa", help="Estimate the bisector strip constant")
    _add_norm(kappa_parser)
    kappa_parser.add_argument(
        "--direction-grid",
        type=int,
        default=KAPPA_DIRECTION_GRID,
        help=f"Chord directions (default: {KAPPA_DIRECTION_GRID})",
    )
    kappa_parser.add_argument(
        "--t-grid",
        type=int,
        default=KAPPA_T_GRID,
        help=f"Chord offsets per direction (default: {KAPPA_T_GRID})",
    )
    kappa_parser.add_argument(
        "--no-refine", action="store_true", help="Skip the Nelder-Mead refinement"
    )
    _add_output(kappa_parser)
    kappa_parser.set_defaults(func=kappa_command)

    # Bisector command
    bisector_parser = subparsers.add_parser("bisector", help="Trace the bisector of a segment")
    _add_norm(bisector_parser)
    bisector_parser.add_argument(
        "--a", type=float, nargs=2, required=True, metavar=("X", "Y"), help="First endpoint"
    )
    bisector_parser.add_argument(
        "--b", type=float, nargs=2, required=True, metavar=("X", "Y"), help="Second endpoint"
    )
    bisector_parser.add_argument(
        "--samples",
        type=int,
        default=TRACE_SAMPLES,
        help=f"Number of bisector samples (default: {TRACE_SAMPLES})",
    )
    bisector_parser.add_argument(
        "--kappa", type=float, help="Strip constant to check against (default: 1/2)"
    )
    bisector_parser.add_argument(
        "--estimate-kappa", action="store_true", help="Estimate kappa for the strip check"
    )
    bisector_parser.add_argument(
        "--direction-grid",
        type=int,
        default=KAPPA_DIRECTION_GRID,
        help=f"Chord directions for --estimate-kappa (default: {KAPPA_DIRECTION_GRID})",
    )
    bisector_parser.add_argument(
        "--t-grid",
        type=int,
        default=KAPPA_T_GRID,
        help=f"Chord offsets for --estimate-kappa (default: {KAPPA_T_GRID})",
    )
    bisector_parser.add_argument(
        "--radii",
        type=float,
        nargs="+",
        default=list(DEVIATION_RADII),
        help=f"Radii of the asymptote deviation table (default: {list(DEVIATION_RADII)})",
    )
    _add_output(bisector_parser, "trace CSV")
    bisector_parser.add_argument("--report", type=Path, help="Output JSON report path")
    bisector_parser.add_argument("--svg", type=Path, help="Output SVG figure path")
    bisector_parser.set_defaults(func=bisector_command)

    # Generate command
    generate_parser = subparsers.add_parser("generate", help="Generate a curve CSV")
    _add_norm(generate_parser)
    generate_parser.add_argument(
        "--method",
        choices=["greedy", "gd"],
        default="greedy",
        help="Greedy self-contracted growth or gradient descent (default: greedy)",
    )
    generate_parser.add_argument(
        "--n",
        type=int,
        default=DEFAULT_CURVE_POINTS,
        help=f"Number of vertices (default: {DEFAULT_CURVE_POINTS})",
    )
    generate_parser.add_argument(
        "--step",
        type=float,
        help=f"Step size (default: {GREEDY_STEP} for greedy, {GD_STEP} for gd)",
    )
    generate_parser.add_argument(
        "--seed",
        type=int,
        default=DEFAULT_SEED,
        help=f"Generator seed (default: {DEFAULT_SEED})",
    )
    generate_parser.add_argument(
        "--potential",
        default="quad:1,10",
        help="Quadratic potential for gd: quad:h1,h2 or quad:h11,h12,h21,h22 (default: quad:1,10)",
    )
    generate_parser.add_argument(
        "--x0",
        type=float,
        nargs=2,
        default=[1.0, 1.0],
        metavar=("X", "Y"),
        help="Starting point for gd (default: 1 1)",
    )
    _add_output(generate_parser, "curve CSV")
    generate_parser.set_defaults(func=generate_command)

    # Verify command
    verify_parser = subparsers.add_parser("verify", help="Check that a curve is self-contracted")
    _add_norm(verify_parser)
    verify_parser.add_argument("--curve", type=Path, required=True, help="Curve CSV")
    verify_parser.add_argument(
        "--tolerance",
        type=float,
        default=SC_TOLERANCE,
        help=f"Allowed defect at unit diameter (default: {SC_TOLERANCE})",
    )
    verify_parser.add_argument(
        "--alpha0-resolution",
        type=int,
        default=ALPHA0_RESOLUTION,
        help=f"Angular grid for the triple cosine bound (default: {ALPHA0_RESOLUTION})",
    )
    _add_output(verify_parser)
    verify_parser.set_defaults(func=verify_command)

    # Certify command
    certify_parser = subparsers.add_parser("certify", help="Run the rectifiability certificate")
    _add_norm(certify_parser)
    _add_curve_source(certify_parser)
    _add_constant_grids(certify_parser)
    certify_parser.add_argument(
        "--pair-stride",
        type=int,
        default=PAIR_STRIDE,
        help=f"Vertex stride for the width decrement pairs (default: {PAIR_STRIDE})",
    )
    certify_parser.add_argument(
        "--no-pairs", action="store_true", help="Skip the per-pair separating vector checks"
    )
    _add_output(certify_parser)
    certify_parser.set_defaults(func=certify_command)

    # Bound report command
    bound_parser = subparsers.add_parser("bound-report", help="Length against the certified bound")
    _add_norm(bound_parser)
    _add_curve_source(bound_parser)
    _add_constant_grids(bound_parser)
    bound_parser.add_argument("--alpha0", type=float, help="Use this alpha0 instead of estimating")
    bound_parser.add_argument("--kappa", type=float, help="Use this kappa instead of estimating")
    _add_output(bound_parser)
    bound_parser.set_defaults(func=bound_report_command)

    # Plot command
    plot_parser = subparsers.add_parser("plot", help="Draw a curve with its hull as SVG")
    _add_norm(plot_parser)
    plot_parser.add_argument("--curve", type=Path, required=True, help="Curve CSV")
    plot_parser.add_argument("--output", type=Path, required=True, help="Output SVG path")
    plot_parser.set_defaults(func=plot_command)

    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(asctime)s - %(levelname)s: %(message)s",
    )
    if args.command == "generate" and args.step is None:
        args.step = GREEDY_STEP if args.method == "greedy" else GD_STEP

    try:
        return args.func(args)
    except (PreconditionError, CertificateError, StrictConvexityError) as e:
        logger.error(str(e))
        return EXIT_NEGATIVE
    except (ValueError, OSError, RuntimeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
