"""Tests for chords, bisector tracing, the κ-strip and asymptote deviation."""

import json
import math

import numpy as np
import pytest

from minkowski_sc.bisector import (
    asymptote_deviation,
    bisector_point,
    bisector_residual,
    chord_endpoints,
    chord_frame,
    chord_width,
    deviation_slope,
    graded_offsets,
    kappa_estimate,
    limit_direction_error,
    make_segment,
    oblique_projection,
    strip_contains,
    trace_bisector,
)
from minkowski_sc.errors import ChordMissesBallError, DegenerateSegmentError
from minkowski_sc.norms import build_norm


def test_chord_endpoints_lp4(lp4):
    sample = chord_endpoints(lp4, [1.0, 0.0], 0.5)
    s_star = 0.9375**0.25
    np.testing.assert_allclose(sample.a_t, [-s_star, 0.5], atol=1e-12)
    np.testing.assert_allclose(sample.b_t, [s_star, 0.5], atol=1e-12)
    np.testing.assert_allclose(sample.m_t, [0.0, 0.5], atol=1e-12)
    assert sample.chord_norm == pytest.approx(2 * s_star, abs=1e-12)


@pytest.mark.parametrize("t", [0.0, 0.3, -0.6, 0.99])
def test_chord_width_euclid(euclid, t):
    assert chord_width(euclid, [0.0, 3.0], t) == pytest.approx(2 * math.sqrt(1 - t * t), abs=1e-12)


def test_chord_endpoints_on_sphere(lp4):
    frame = chord_frame(lp4, [2.0, 1.0])
    for t in np.linspace(-0.99, 0.99, 21) * frame.t0:
        sample = chord_endpoints(lp4, frame.v, t, frame=frame)
        assert lp4.value(sample.a_t) == pytest.approx(1.0, abs=1e-12)
        assert lp4.value(sample.b_t) == pytest.approx(1.0, abs=1e-12)
        direction = sample.b_t - sample.a_t
        assert abs(direction[0] * frame.v[1] - direction[1] * frame.v[0]) < 1e-12
        assert direction @ frame.v > 0


def test_chord_misses_ball(lp4):
    frame = chord_frame(lp4, [1.0, 0.0])
    with pytest.raises(ChordMissesBallError):
        chord_endpoints(lp4, frame.v, frame.t0, frame=frame)
    with pytest.raises(ChordMissesBallError):
        chord_endpoints(lp4, frame.v, -1.5, frame=frame)


def test_chord_width_decreases_away_from_centre(lp4):
    frame = chord_frame(lp4, [1.0, 2.0])
    widths = [
        chord_width(lp4, frame.v, t, frame=frame) for t in np.linspace(0, 0.999, 50) * frame.t0
    ]
    assert np.all(np.diff(widths) < 0)
    assert widths[0] == pytest.approx(2.0, abs=1e-12)


def test_make_segment_rejects_degenerate(lp4):
    with pytest.raises(DegenerateSegmentError):
        make_segment(lp4, [1.0, 2.0], [1.0, 2.0])


def test_bisector_point_at_centre_chord_is_midpoint(euclid):
    segment = make_segment(euclid, [0.0, 0.0], [2.0, 0.0])
    np.testing.assert_allclose(bisector_point(euclid, segment, 0.0), [1.0, 0.0], atol=1e-12)


@pytest.mark.parametrize("text", ["euclid", "lp:3", "lp:4", "alp:4:1,0.5,0,2"])
def test_trace_bisector_is_equidistant(text):
    norm = build_norm(text)
    segment = make_segment(norm, [0.3, -0.2], [1.7, 0.9])
    trace = trace_bisector(norm, segment)
    assert not np.any(trace.failed)
    assert np.all(np.isfinite(trace.samples))
    assert np.all(trace.residuals <= 1e-9 * np.maximum(1.0, norm.value(segment.a - trace.samples)))
    assert np.all(trace.in_strip)


def test_trace_bisector_equivariance(lp4):
    base = make_segment(lp4, [0.0, 0.0], [1.0, 0.5])
    shifted = make_segment(lp4, [3.0, -2.0], [4.0, -1.5])
    scaled = make_segment(lp4, [0.0, 0.0], [2.5, 1.25])
    first = trace_bisector(lp4, base)
    np.testing.assert_allclose(
        trace_bisector(lp4, shifted).samples, first.samples + [3.0, -2.0], rtol=1e-9, atol=1e-9
    )
    np.testing.assert_allclose(
        trace_bisector(lp4, scaled).samples, 2.5 * first.samples, rtol=1e-9, atol=1e-9
    )


def test_trace_bisector_swapped_endpoints(lp4):
    segment = make_segment(lp4, [0.0, 0.0], [1.0, 0.5])
    reflected = make_segment(lp4, [1.0, 0.5], [0.0, 0.0])
    samples = trace_bisector(lp4, reflected).samples
    assert np.all(bisector_residual(lp4, segment, samples) <= 1e-9 * lp4.value(samples - segment.a))


def test_graded_offsets():
    t = graded_offsets(0.8, 41)
    assert len(t) == 41
    assert abs(t[20]) < 1e-12
    assert np.all(np.diff(t) > 0)
    assert np.all(np.abs(t) < 0.8)
    np.testing.assert_allclose(t, -t[::-1], atol=1e-12)
    with pytest.raises(ValueError):
        graded_offsets(0.8, 2)


def test_oblique_projection_examples(euclid, lp4):
    v = np.array([1.0, 1.0]) / 2**0.25
    assert oblique_projection(lp4, v, [1.0, 0.0]) == pytest.approx(2**0.25 / 2, abs=1e-12)
    assert oblique_projection(euclid, [1.0, 0.0], [0.4, 7.0]) == pytest.approx(0.4, abs=1e-12)


def test_oblique_projection_kills_line_direction(lp4):
    frame = chord_frame(lp4, [2.0, 1.0])
    assert abs(oblique_projection(lp4, frame.v, 5 * frame.line_direction)) < 1e-12
    assert oblique_projection(lp4, frame.v, frame.v) == pytest.approx(1.0, abs=1e-12)


def test_strip_contains_examples(euclid):
    segment = make_segment(euclid, [0.0, 0.0], [1.0, 0.0])
    assert not strip_contains(euclid, segment, 0.1, [0.65, 5.0])
    assert strip_contains(euclid, segment, 0.1, [0.55, 5.0])
    assert strip_contains(euclid, segment, 0.0, [0.5, -3.0])
    with pytest.raises(ValueError, match="kappa"):
        strip_contains(euclid, segment, 0.6, [0.5, 0.0])


def test_kappa_euclid_vanishes(bundles):
    assert bundles["euclid"].kappa <= 1e-8


def test_kappa_lp4_inside_range(bundles):
    assert 0.0 < bundles["lp:4"].kappa < 0.5


def test_kappa_rejects_coarse_grid(lp4):
    with pytest.raises(ValueError):
        kappa_estimate(lp4, direction_grid=64)


def test_bisector_samples_stay_in_kappa_strip(lp4, bundles):
    kappa = min(bundles["lp:4"].kappa + 1e-6, 0.5)
    rng = np.random.Generator(np.random.PCG64(3))
    for _ in range(1000):
        a, b = rng.uniform(-2, 2, size=(2, 2))
        if np.hypot(*(b - a)) < 1e-3:
            continue
        segment = make_segment(lp4, a, b)
        trace = trace_bisector(lp4, segment, kappa=kappa)
        assert np.all(trace.in_strip | trace.failed)
        assert not np.any(trace.failed)


def test_asymptote_deviation_euclid_is_zero(euclid):
    segment = make_segment(euclid, [0.0, 0.0], [2.0, 1.0])
    for _, distance in asymptote_deviation(euclid, segment, [10, 100, 1000]):
        assert distance <= 1e-9


def test_asymptote_deviation_decays_like_one_over_r(lp4):
    segment = make_segment(lp4, [0.0, 0.0], [2.0, 1.0])
    rows = asymptote_deviation(lp4, segment, [10, 30, 100, 300, 1000])
    assert [radius for radius, _ in rows] == [10, 30, 100, 300, 1000]
    assert rows[-1][1] < rows[0][1]
    assert -1.15 <= deviation_slope(rows) <= -0.85


def test_asymptote_deviation_rejects_small_radius(lp4):
    segment = make_segment(lp4, [0.0, 0.0], [1.0, 0.0])
    with pytest.raises(ValueError, match="1/2"):
        asymptote_deviation(lp4, segment, [0.25])


def test_limit_direction_error_shrinks(lp4):
    segment = make_segment(lp4, [0.0, 0.0], [2.0, 1.0])
    gaps = [gap for _, gap in limit_direction_error(lp4, segment, [10, 100, 1000])]
    assert gaps[0] > gaps[1] > gaps[2]
    assert gaps[2] < 1e-2


def test_deviation_slope_exact_power_law():
    rows = [(r, 3.0 / r) for r in (10.0, 100.0, 1000.0)]
    assert deviation_slope(rows) == pytest.approx(-1.0, abs=1e-12)


def test_axis_segment_bisector_is_vertical_line(lp4):
    trace = trace_bisector(lp4, make_segment(lp4, [0.0, 0.0], [2.0, 0.0]))
    x = trace.samples[:, 0]
    assert np.all(np.abs(x - 1.0) <= 1e-9 * np.maximum(1.0, np.abs(trace.samples[:, 1])))


def test_diagonal_segment_bisector_is_antidiagonal_line(lp4):
    trace = trace_bisector(lp4, make_segment(lp4, [0.0, 0.0], [1.0, 1.0]))
    total = trace.samples.sum(axis=1)
    scale = np.maximum(1.0, np.hypot(*trace.samples.T))
    assert np.all(np.abs(total - 1.0) <= 1e-9 * scale)
    np.testing.assert_allclose(trace.asymptote_direction, [2**-0.5, -(2**-0.5)], atol=1e-12)


def test_kappa_lp4_stable_under_grid_doubling(bundles, lp4):
    assert abs(kappa_estimate(lp4, 512, 512) - bundles["lp:4"].kappa) <= 1e-4


def test_kappa_ellipse_rotation_invariant():
    angle = 0.4
    c, s = math.cos(angle), math.sin(angle)
    # A·R for A = [[1, 0.5], [0, 2]] and R the rotation by angle
    rotated = [1.0 * c + 0.5 * s, -1.0 * s + 0.5 * c, 2.0 * s, 2.0 * c]
    plain = kappa_estimate(build_norm("alp:2:1,0.5,0,2"))
    turned = kappa_estimate(build_norm("alp:2:" + ",".join(repr(v) for v in rotated)))
    assert plain <= 1e-8
    assert turned == pytest.approx(plain, abs=1e-8)


def test_kappa_lp4_matches_fixture(bundles, fixtures_dir):
    expected = json.loads((fixtures_dir / "lp4_bundle.json").read_text())
    assert bundles["lp:4"].kappa == pytest.approx(expected["kappa"], abs=1e-4)


def test_trace_bisector_skewed_norm_along_axis():
    norm = build_norm("alp:4:1,0.5,0,2")
    trace = trace_bisector(norm, make_segment(norm, [0.0, 0.0], [1.0, 0.0]))
    assert not np.any(trace.failed)
    assert np.all(trace.in_strip)
    np.testing.assert_allclose(
        trace.asymptote_direction, np.array([1.0, -2.0]) / math.sqrt(5.0), atol=1e-9
    )
