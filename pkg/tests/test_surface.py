"""Riemann surface, sheet tracking, path coefficients and their bounds."""
from fractions import Fraction

import numpy as np
import pytest

from bryant.errors import BranchAmbiguity, BranchPointHit
from bryant.surface import (
    REFERENCE_BOUNDS, CoefficientBounds, PolygonalPath, SheetTracker, SurfaceParams, SurfacePoint,
    alpha1, alpha2, compute_h_bounds, continue_along, gauss_map_continue, h_coefficients,
    symmetry_transform, w_squared,
)

A = 1.78
PARAMS = SurfaceParams(A, 0.05)


def test_params_validation():
    with pytest.raises(ValueError):
        SurfaceParams(1.0, 0.05)
    with pytest.raises(ValueError):
        SurfaceParams(1.78, -0.1)


def test_base_point_sheet():
    w = gauss_map_continue(alpha1(A), PARAMS, 0.0, 1.0)
    assert w == pytest.approx(1.0)


def test_w_squared_values():
    assert w_squared(1.39, A) == pytest.approx(-0.75394, abs=5e-6)
    assert w_squared(2.28, A) == pytest.approx(0.31558, abs=5e-6)


def test_alpha1_end_sheet_is_positive_imaginary():
    """Fine-step continuation oracle along alpha_1 fixes Im w > 0 at z = 1.39."""
    tracker = SheetTracker(alpha1(A), PARAMS, resolution=20000)
    w = tracker(1.0)
    assert abs(w.real) < 1e-12
    assert w.imag == pytest.approx(0.86829, abs=1e-5)


def test_branch_point_hit():
    path = PolygonalPath((0.0, 1.0), (0, 1))
    with pytest.raises(BranchPointHit):
        gauss_map_continue(path, PARAMS, 1.0, 1.0)


def test_ambiguous_continuation():
    # w_prev orthogonal to both roots of w^2 = 1 (at z = 0)
    with pytest.raises(BranchAmbiguity):
        gauss_map_continue(alpha1(A), PARAMS, 0.0, 1j)


def test_surface_membership_along_paths():
    for path in (alpha1(A), alpha2(A)):
        ts = [Fraction(k, 4000) for k in range(4001)]
        zs = np.array([path.z_at(t) for t in ts])
        ws = continue_along(zs, A, 1.0)
        res = np.abs((zs - 1) * (zs + A) * ws ** 2 - (zs + 1) * (zs - A))
        assert np.all(res <= 1e-10 * (1 + np.abs(zs) ** 4))


def test_continuation_step_halving():
    for path in (alpha1(A), alpha2(A)):
        w1 = SheetTracker(path, PARAMS, 4000)(1.0)
        w2 = SheetTracker(path, PARAMS, 8000)(1.0)
        assert abs(w1 - w2) < 1e-10


def test_alpha_paths_breakpoints():
    p1, p2 = alpha1(A), alpha2(A)
    assert p1.t_breaks[1] == Fraction(67, 100)
    assert p2.t_breaks[1] == Fraction(686, 1000)
    assert p1.vertices[-1] == pytest.approx((1 + A) / 2)
    assert p2.vertices[-1] == pytest.approx(A + 0.5)


def test_h1_modulus_on_first_segment():
    h1, h2, h3, h4 = h_coefficients(alpha1(A), PARAMS, 0)
    assert abs(h1(0.3)) == pytest.approx(abs(1 + 0.4j) / 0.67, rel=1e-12)
    assert abs(h1(0.3)) == pytest.approx(1.6075, abs=1e-4)


def test_h4_is_minus_h1():
    for path in (alpha1(A), alpha2(A)):
        for seg in range(path.n_segments):
            h1, _, _, h4 = h_coefficients(path, PARAMS, seg)
            assert h4(0.5) == -h1(0.5)


def test_h2_h3_relations():
    path = alpha2(A)
    tracker = SheetTracker(path, PARAMS)
    h1, h2, h3, _ = h_coefficients(path, PARAMS, 1, tracker)
    w = tracker(0.8)
    assert h2(0.8) * w == pytest.approx(h1(0.8))
    assert h3(0.8) == pytest.approx(-h1(0.8) * w)


@pytest.fixture(scope="module")
def computed_bounds():
    return {p.name: compute_h_bounds(p, PARAMS) for p in (alpha1(A), alpha2(A))}


def test_bounds_within_published_values(computed_bounds):
    for b in computed_bounds.values():
        assert REFERENCE_BOUNDS.dominates(b)


def _dense_suprema(path, samples_per_segment=20001):
    """Finite-difference estimate of sup |h|, |h'|, |h''|, |h'''| (independent of the interval code)."""
    sup = np.zeros(4)
    for seg in range(path.n_segments):
        t0, t1 = float(path.t_breaks[seg]), float(path.t_breaks[seg + 1])
        ts = np.linspace(t0, t1, samples_per_segment)
        z0, z1 = path.vertices[seg], path.vertices[seg + 1]
        zs = z0 + (ts - t0) / (t1 - t0) * (z1 - z0)
        ws = continue_along(zs, A, 1.0 if seg == 0 else _end_w(path, seg))
        v = path.velocity(seg)
        dt = ts[1] - ts[0]
        for h in (v / ws, -v * ws):
            d1 = np.gradient(h, dt)
            d2 = np.gradient(d1, dt)
            d3 = np.gradient(d2, dt)
            for k, d in enumerate((h, d1, d2, d3)):
                sup[k] = max(sup[k], np.max(np.abs(d[3:-3])))
        sup[0] = max(sup[0], abs(v))
    return sup


def _end_w(path, seg):
    ts = [Fraction(k, 4000) * path.t_breaks[seg] for k in range(4001)]
    zs = np.array([path.z_at(t) for t in ts])
    return continue_along(zs, A, 1.0)[-1]


def test_bounds_dominate_dense_sampling(computed_bounds):
    for path in (alpha1(A), alpha2(A)):
        b = computed_bounds[path.name].as_tuple()
        est = _dense_suprema(path)
        for k in range(4):
            assert b[k] >= est[k] * (1 - 1e-3), (path.name, k, b[k], est[k])
        # and they are not absurdly loose
        assert b[3] <= 1.5 * est[3]


def test_bounds_spot_check_random_t(computed_bounds):
    rng = np.random.default_rng(3)
    for path in (alpha1(A), alpha2(A)):
        tracker = SheetTracker(path, PARAMS)
        M = computed_bounds[path.name].M
        for t in rng.uniform(0, 1, 1000):
            seg = path.segment_of(Fraction(repr(float(t))))
            hs = h_coefficients(path, PARAMS, seg, tracker)
            assert max(abs(h(float(t))) for h in hs) <= M


def test_zero_length_segment_contributes_nothing():
    b = compute_h_bounds(PolygonalPath((0.5j, 0.5j), (0, 1)), PARAMS)
    assert b.as_tuple() == (0.0, 0.0, 0.0, 0.0)
    joined = PolygonalPath((0.5j, 0.5j, 0.5 + 0.5j), (0, Fraction(1, 2), 1))
    alone = PolygonalPath((0.5j, 0.5 + 0.5j), (0, 1))
    # same z-segment traversed twice as fast: bounds scale by 2, 4, 8, 16
    bj, ba = compute_h_bounds(joined, PARAMS), compute_h_bounds(alone, PARAMS)
    for k, (x, y) in enumerate(zip(bj.as_tuple(), ba.as_tuple())):
        assert x == pytest.approx(2 ** (k + 1) * y, rel=0.02)


def test_coefficient_bounds_helpers():
    b1 = CoefficientBounds(1, 2, 3, 4)
    b2 = CoefficientBounds(2, 1, 3, 5)
    w = CoefficientBounds.worst(b1, b2)
    assert w.as_tuple() == (2, 2, 3, 5)
    assert w.dominates(b1) and w.dominates(b2) and not b1.dominates(b2)


@pytest.mark.parametrize("i,expected", [(1, (0, 1)), (2, (0, 1)), (4, (0, -1))])
def test_symmetries_at_base_point(i, expected):
    p = symmetry_transform(i, SurfacePoint(0, 1))
    assert (p.z, p.w) == expected


def test_phi3_is_phi2_after_phi1():
    p = SurfacePoint(0.5 + 0.25j, complex(np.sqrt(w_squared(0.5 + 0.25j, A))))
    q1 = symmetry_transform(3, p)
    q2 = symmetry_transform(2, symmetry_transform(1, p))
    assert q1 == q2


def test_symmetries_preserve_surface():
    z = 0.3 + 0.7j
    p = SurfacePoint(z, complex(np.sqrt(w_squared(z, A))))
    assert p.on_surface(A)
    for i in (1, 2, 3, 4):
        assert symmetry_transform(i, p).on_surface(A)
