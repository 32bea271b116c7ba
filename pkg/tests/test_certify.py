"""Existence certificate: verdicts, serialization, independent re-checking and the period sweep."""
import copy
import json
import math

import pytest

from bryant.certify import (
    FAILED, SWEEP_HEADER, VERIFIED, Certificate, certify_existence, check_certificate, format_sweep_csv,
    sweep_edges, sweep_periods,
)
from bryant.errors import InvalidRange, PreconditionViolation
from bryant.surface import REFERENCE_BOUNDS, CoefficientBounds

from conftest import A, C1, C2


def test_certificate_verified(certificate):
    assert certificate.verdict == VERIFIED, certificate.reason
    assert certificate.reason == ""
    assert certificate.bounds_source == "computed"
    assert len(certificate.sweep) == 50
    assert all(r.passed for r in certificate.sweep)
    assert certificate.budget.epsilon < 1e-7


def test_certificate_rechecks(certificate):
    assert check_certificate(certificate) == []


def test_certificate_json_round_trip(certificate):
    text = certificate.to_json()
    again = Certificate.from_json(text)
    assert again.to_json() == text
    assert check_certificate(again) == []
    doc = json.loads(text)
    assert doc["schema_version"] == 1
    assert set(doc["endpoint_enclosures"]) == {"c1", "c2"}
    assert len(doc["endpoint_enclosures"]["c1"]["alpha1"]) == 16


def test_certificate_deterministic(certificate):
    again = certify_existence(A, C1, C2, 4000, 50, timestamp="fixed")
    assert again.to_json() == certificate.to_json()


def test_tampered_certificate_is_rejected(certificate):
    d = copy.deepcopy(certificate.to_dict())
    d["sweep"][7]["inflation"] = d["budget"]["epsilon"]
    problems = check_certificate(Certificate.from_dict(d))
    assert any("inflation too small" in p for p in problems)

    d = copy.deepcopy(certificate.to_dict())
    d["sweep"][3]["c_hi"] = d["sweep"][3]["c_hi"] - 1e-9
    assert any("gap" in p for p in check_certificate(Certificate.from_dict(d)))

    d = copy.deepcopy(certificate.to_dict())
    d["budget"]["epsilon"] = d["budget"]["epsilon"] / 2
    assert any("epsilon" in p for p in check_certificate(Certificate.from_dict(d)))


def test_sweep_tiling_and_inflation(certificate):
    recs = certificate.sweep
    assert recs[0].c_lo == C1 and recs[-1].c_hi == C2
    assert all(r0.c_hi == r1.c_lo for r0, r1 in zip(recs, recs[1:]))
    b = certificate.budget
    for r in recs:
        assert r.inflation >= b.epsilon + b.derivative_bound * (r.c_hi - r.c_lo) / 2
        assert r.f1[0] > 2 and r.f2[0] > 2


def test_sweep_edges_exact():
    edges, mids, half = sweep_edges(0.0495, 0.0505, 50)
    assert edges[0] == 0.0495 and edges[-1] == 0.0505
    assert len(edges) == 51 and len(mids) == 50
    assert half >= 1e-5 and half == pytest.approx(1e-5, rel=1e-9)


@pytest.mark.parametrize("a,c1,c2,m", [
    (1.78, 0.05, 0.05, 50),
    (1.78, 0.0505, 0.0495, 50),
    (1.78, 0.0, 0.05, 50),
    (1.0, 0.0495, 0.0505, 50),
    (1.78, 0.0495, 0.0505, 0),
])
def test_invalid_range(a, c1, c2, m):
    with pytest.raises(InvalidRange):
        certify_existence(a, c1, c2, 4000, m)


def test_inflated_epsilon_fails():
    cert = certify_existence(A, C1, C2, 4000, 2, epsilon_scale=1e6, timestamp="fixed")
    assert cert.verdict == FAILED
    assert cert.reason.startswith("endpoint sign not separable")
    assert check_certificate(cert) != []


def test_override_bounds():
    cert = certify_existence(A, C1, C2, 4000, 50, override_bounds=REFERENCE_BOUNDS, timestamp="fixed")
    assert cert.bounds_source == "override"
    assert cert.verified, cert.reason
    assert check_certificate(cert) == []
    with pytest.raises(PreconditionViolation):
        certify_existence(A, C1, C2, 4000, 2, override_bounds=CoefficientBounds(1, 1, 1, 1))


def test_coarse_subdivision_fails():
    """Two subintervals inflate by ~5e-3, too much for f2 > 2 to survive."""
    cert = certify_existence(A, C1, C2, 4000, 2, timestamp="fixed")
    assert cert.verdict == FAILED
    assert cert.reason.startswith("f1, f2 > 2 not certified on [0.0495")


def test_sweep_single_point():
    rows = sweep_periods(A, [0.05], 4000)
    assert len(rows) == 1 and rows[0].flag == "ok"
    assert rows[0].f1 > 2 and rows[0].f2 > 2
    assert rows[0].f1_width < 1e-6


def test_sweep_sign_change(sweep_101):
    assert len(sweep_101) == 101
    d = [r.f1 - r.f2 for r in sweep_101]
    assert d[0] > 0 and d[-1] < 0
    flips = sum(1 for x, y in zip(d, d[1:]) if math.copysign(1, x) != math.copysign(1, y))
    assert flips == 1


def test_sweep_csv_format():
    rows = sweep_periods(A, [0.05], 500)
    text = format_sweep_csv(rows)
    lines = text.splitlines()
    assert lines[0] == SWEEP_HEADER
    assert lines[1].split(",")[0] == "0.05" and lines[1].endswith(",ok")


def test_sweep_degenerate_rows_have_empty_cells():
    rows = sweep_periods(A, [0.0, 0.05], 500)
    assert rows[0].flag == "DegenerateDenominator"
    assert format_sweep_csv(rows).splitlines()[1] == "0.0,,,,,DegenerateDenominator"


def test_sweep_midpoints_inside_certificate(certificate, sweep_101):
    """Sweep values at grid points inside a subinterval fall in its inflated enclosure."""
    for row in sweep_101:
        rec = next(r for r in certificate.sweep if r.c_lo <= row.c <= r.c_hi)
        assert rec.f1[0] <= row.f1 <= rec.f1[1]
        assert rec.f2[0] <= row.f2 <= rec.f2[1]
