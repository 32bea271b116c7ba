"""RK4 integration of the row systems in interval and floating modes."""
from fractions import Fraction

import numpy as np
import pytest

from bryant.bounds import global_rk4_bound
from bryant.integrator import (
    IntegrationConfig, MatrixEnclosure, integrate_batch, integrate_path, integrate_reference, rk4_step,
)
from bryant.interval import ComplexBox
from bryant.period import symmetry_matrix
from bryant.surface import REFERENCE_BOUNDS, SurfaceParams, alpha1, alpha2, compute_h_bounds

A = 1.78


def test_rk4_step_zero_field_keeps_state():
    F = np.array([[1 + 2j, 3], [0.5, 2 - 1j]])
    h = lambda t: (1.0, 2.0, 3.0, 4.0)  # noqa: E731
    assert np.array_equal(rk4_step(F, h, 0, Fraction(1, 10), 0.0), F)
    box = rk4_step(MatrixEnclosure.from_matrix(F), h, 0, Fraction(1, 10), 0.0)
    assert np.all(box.contains(F))


def test_rk4_step_exponential():
    """dA/dt = A from A = 1 over one unit step gives 65/24 for both row entries."""
    h = lambda t: (1.0, 0.0, 0.0, 0.0)  # noqa: E731
    F = rk4_step(np.eye(2, dtype=complex), h, 0, 1, 1.0)
    assert F[0, 0] == pytest.approx(65 / 24, rel=1e-15)
    box = rk4_step(MatrixEnclosure.identity(), h, 0, 1, 1.0)
    assert box.a11.re.contains(65 / 24)
    assert box.a11.re.lo <= Fraction(65, 24) <= box.a11.re.hi


def test_interval_contains_floating_step():
    rng = np.random.default_rng(1)
    F = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    coeffs = rng.normal(size=4) + 1j * rng.normal(size=4)
    h = lambda t: tuple(coeffs)  # noqa: E731
    fl = rk4_step(F, h, 0, Fraction(1, 7), 0.3)
    iv = rk4_step(MatrixEnclosure.from_matrix(F), h, 0, Fraction(1, 7), 0.3)
    assert np.all(iv.contains(fl))


def test_grid_must_hit_breakpoints():
    with pytest.raises(ValueError):
        integrate_path(alpha1(A), SurfaceParams(A, 0.05), IntegrationConfig(4001))
    with pytest.raises(ValueError):
        IntegrationConfig(0)
    with pytest.raises(ValueError):
        IntegrationConfig(4000, "fast")


def test_step_condition_checked_when_bounds_given():
    with pytest.raises(ValueError):
        integrate_path(alpha1(A), SurfaceParams(A, 2.0), IntegrationConfig(500), bounds=REFERENCE_BOUNDS)


@pytest.mark.parametrize("path", [alpha1(A), alpha2(A)], ids=["alpha1", "alpha2"])
def test_zero_c_gives_identity(path):
    F = integrate_path(path, SurfaceParams(A, 0.0), IntegrationConfig(1000))
    assert np.all(F.contains(np.eye(2)))
    # outward rounding still widens the exact zero updates by a few ulps
    assert F.max_width() < 1e-12
    assert np.array_equal(integrate_reference(path, SurfaceParams(A, 0.0), 1000), np.eye(2))


def test_enclosure_widths(endpoint_enclosures):
    _, F1, F2 = endpoint_enclosures
    for F in (F1, F2):
        assert np.all(F.max_width() < 1e-8)


def test_determinant_contains_one(endpoint_enclosures):
    _, F1, F2 = endpoint_enclosures
    for F in (F1, F2):
        det = F.det()
        assert np.all(det.contains(1.0))
        assert np.all(det.width() < 1e-7)


def test_interval_contains_floating(endpoint_enclosures):
    cs, F1, F2 = endpoint_enclosures
    for path, F in ((alpha1(A), F1), (alpha2(A), F2)):
        fl = integrate_batch(path, A, cs, IntegrationConfig(4000, "floating"))
        assert np.all(F.contains(fl))


def test_batched_matches_single():
    p = alpha1(A)
    batch = integrate_batch(p, A, [0.0495, 0.05], IntegrationConfig(500))
    single = integrate_path(p, SurfaceParams(A, 0.05), IntegrationConfig(500))
    assert batch[1].bounds() == single.bounds()


def test_threads_do_not_change_results(monkeypatch):
    p = alpha2(A)
    cs = [0.049, 0.05, 0.051, 0.052]
    monkeypatch.setenv("BRYANT_THREADS", "1")
    one = integrate_batch(p, A, cs, IntegrationConfig(500))
    monkeypatch.setenv("BRYANT_THREADS", "3")
    three = integrate_batch(p, A, cs, IntegrationConfig(500))
    for k in range(len(cs)):
        assert one[k].bounds() == three[k].bounds()


def test_reference_within_global_bound(endpoint_enclosures):
    """Fine-grid floating reference lies within epsilon of the production enclosure."""
    params = SurfaceParams(A, 0.05)
    cs, F1, F2 = endpoint_enclosures
    for path, F in ((alpha1(A), F1), (alpha2(A), F2)):
        bounds = compute_h_bounds(path, params)
        eps = global_rk4_bound(0.05, 4000, bounds)
        ref = integrate_reference(path, params, 100_000)
        assert np.all(F[1].inflate(eps).contains(ref))


def test_richardson_order_four():
    params = SurfaceParams(A, 0.05)
    ns = (100, 200, 400, 800, 1600)
    ref = {n: integrate_reference(alpha1(A), params, n) for n in ns}
    diffs = [np.max(np.abs(ref[n] - ref[2 * n])) for n in ns[:-1]]
    ratios = [d0 / d1 for d0, d1 in zip(diffs, diffs[1:])]
    assert all(8 <= r <= 32 for r in ratios), ratios


def _overlap(F, G):
    return bool(np.all(F.overlaps(G)))


@pytest.mark.parametrize("path_fn", [alpha1, alpha2], ids=["alpha1", "alpha2"])
@pytest.mark.parametrize("i", [1, 2, 3, 4])
def test_mirrored_paths_match_symmetry(path_fn, i):
    """Integrating along phi_i(path) agrees with the symmetry transform of the original endpoint."""
    path = path_fn(A)
    cfg = IntegrationConfig(1000)
    params = SurfaceParams(A, 0.05)
    F = integrate_path(path, params, cfg)
    G = integrate_path(path.mirrored(i), params, cfg)
    assert _overlap(G, symmetry_matrix(i, F))


def test_matrix_enclosure_round_trip():
    F = MatrixEnclosure(*(ComplexBox.from_bounds(k, k + 1, -k, -k + 0.5) for k in range(4)))
    G = MatrixEnclosure.from_bounds(F.bounds())
    assert G.bounds() == F.bounds()
    assert len(F.bounds()) == 16
