"""Existence certificate for ``f1 = f2 > 2`` by the intermediate value theorem.

The procedure:

1. bound the path coefficients and derive the discretisation budget
   ``epsilon`` (valid for every c in ``[c1, c2]``);
2. integrate both paths in interval arithmetic at c1, c2 and at the
   midpoint of every sweep subinterval;
3. at c1 and c2 the epsilon-inflated enclosures must separate
   ``f1 > f2`` and ``f1 < f2`` respectively;
4. on every subinterval the enclosures inflated by ``epsilon +
   epsilon_hat`` must give finite ``f1, f2 > 2``.
"""
from __future__ import annotations

import json
import platform
import sys
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import __version__
from .bounds import ErrorBudget, c_derivative_bound, global_rk4_bound, make_budget
from .errors import InvalidRange, PreconditionViolation
from .integrator import IntegrationConfig, MatrixEnclosure, integrate_batch
from .period import period_values
from .surface import CoefficientBounds, SurfaceParams, alpha1, alpha2, compute_h_bounds

SCHEMA_VERSION = 1
VERIFIED = "VERIFIED"
FAILED = "FAILED"


@dataclass
class SubintervalRecord:
    c_lo: float
    c_hi: float
    c_mid: float
    inflation: float
    f1: tuple[float, float] | None
    f2: tuple[float, float] | None
    passed: bool
    enclosures: dict = field(repr=False)


@dataclass
class Certificate:
    params: dict
    budget: ErrorBudget
    path_bounds: dict
    bounds_source: str
    endpoint_enclosures: dict
    sweep: list[SubintervalRecord]
    verdict: str
    reason: str = ""
    timestamp: str = ""
    toolchain: dict = field(default_factory=dict)
    schema_version: int = SCHEMA_VERSION

    @property
    def verified(self) -> bool:
        return self.verdict == VERIFIED

    def to_dict(self) -> dict:
        d = asdict(self)
        d["budget"] = self.budget.to_dict()
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1, sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> "Certificate":
        d = dict(d)
        d["budget"] = ErrorBudget.from_dict(d["budget"])
        d["sweep"] = [SubintervalRecord(**{**r, "f1": _pair(r["f1"]), "f2": _pair(r["f2"])})
                      for r in d["sweep"]]
        return cls(**d)

    @classmethod
    def from_json(cls, text: str) -> "Certificate":
        return cls.from_dict(json.loads(text))


def _pair(v):
    return None if v is None else (float(v[0]), float(v[1]))


def toolchain_fingerprint() -> dict:
    return {
        "package": __version__,
        "python": sys.version.split()[0],
        "numpy": np.__version__,
        "machine": platform.machine(),
        "float": "binary64, round-to-nearest with one-ulp outward steps",
    }


def sweep_edges(c1: float, c2: float, subintervals: int):
    """Subinterval edges (shared, exactly tiling ``[c1, c2]``), midpoints, max half-width."""
    edges = [c1 + k * (c2 - c1) / subintervals for k in range(subintervals + 1)]
    edges[0], edges[-1] = c1, c2
    mids = [0.5 * (lo + hi) for lo, hi in zip(edges, edges[1:])]
    half = max(max(Fraction(m) - Fraction(lo), Fraction(hi) - Fraction(m))
               for lo, hi, m in zip(edges, edges[1:], mids))
    half_width = float(half)
    if Fraction(half_width) < half:
        half_width = float(np.nextafter(half_width, np.inf))
    return edges, mids, half_width


def _interval_pair(iv, k=None):
    if iv is None:
        return None
    lo, hi = (iv.lo, iv.hi) if k is None else (iv.lo[k], iv.hi[k])
    if np.isnan(lo) or np.isnan(hi):
        return None
    return (float(lo), float(hi))


def _evaluate(F1: MatrixEnclosure, F2: MatrixEnclosure, inflation):
    """Inflated f1, f2 enclosures plus degenerate masks (batched)."""
    p1, bad1 = period_values(F1.inflate(inflation), 1)
    p2, bad2 = period_values(F2.inflate(inflation), 2)
    return p1, bad1, p2, bad2


def check_endpoint(F1: MatrixEnclosure, F2: MatrixEnclosure, eps: float, expect: str):
    """Return ``(ok, f1, f2)``; ``expect`` is ``'f1>f2'`` or ``'f1<f2'``."""
    p1, bad1, p2, bad2 = _evaluate(F1, F2, eps)
    if bool(bad1) or bool(bad2):
        return False, None, None
    f1, f2 = p1.value, p2.value
    if expect == "f1>f2":
        ok = bool(f1.lo > f2.hi)
    else:
        ok = bool(f1.hi < f2.lo)
    return ok, _interval_pair(f1), _interval_pair(f2)


def _bounds_for(a: float, override: CoefficientBounds | None):
    params = SurfaceParams(a)
    per_path = {"alpha1": compute_h_bounds(alpha1(a), params),
                "alpha2": compute_h_bounds(alpha2(a), params)}
    worst = CoefficientBounds.worst(*per_path.values())
    if override is None:
        return worst, per_path, "computed"
    if not override.dominates(worst):
        raise PreconditionViolation(
            f"override bounds {override.as_tuple()} do not dominate computed {worst.as_tuple()}")
    return override, per_path, "override"


def certify_existence(a: float, c1: float, c2: float, n: int = 4000, subintervals: int = 50, *,
                      override_bounds: CoefficientBounds | None = None,
                      epsilon_scale: float = 1.0, timestamp: str | None = None) -> Certificate:
    """Run the full pipeline and return a certificate (VERIFIED or FAILED).

    ``epsilon_scale`` multiplies the discretisation budget; values above 1
    are for demonstrating that the checks can fail.
    """
    if not a > 1:
        raise InvalidRange(f"a must exceed 1, got {a}")
    if not 0 < c1 < c2:
        raise InvalidRange(f"need 0 < c1 < c2, got c1={c1}, c2={c2}")
    if subintervals < 1:
        raise InvalidRange("need at least one subinterval")
    bounds, per_path, source = _bounds_for(a, override_bounds)
    edges, mids, half_width = sweep_edges(c1, c2, subintervals)
    budget = make_budget(c1, c2, n, bounds, half_width)
    eps = budget.epsilon * epsilon_scale
    if epsilon_scale != 1.0:
        budget = ErrorBudget(**{**budget.__dict__, "epsilon": eps})
    cfg = IntegrationConfig(n, "interval")
    cs = [c1, c2] + mids
    F1 = integrate_batch(alpha1(a), a, cs, cfg)
    F2 = integrate_batch(alpha2(a), a, cs, cfg)

    reason = ""
    endpoints = {}
    for k, (label, expect) in enumerate((("c1", "f1>f2"), ("c2", "f1<f2"))):
        ok, f1, f2 = check_endpoint(F1[k], F2[k], eps, expect)
        endpoints[label] = {"c": cs[k], "expect": expect, "passed": ok, "f1": f1, "f2": f2,
                            "alpha1": F1[k].bounds(), "alpha2": F2[k].bounds()}
        if not ok and not reason:
            reason = f"endpoint sign not separable at {label} = {cs[k]!r} (expected {expect})"

    inflation = float(np.nextafter(eps + budget.epsilon_hat, np.inf))
    G1, G2 = F1[2:], F2[2:]
    p1, bad1, p2, bad2 = _evaluate(G1, G2, inflation)
    records = []
    for k in range(subintervals):
        f1 = None if p1 is None else _interval_pair(p1.value, k)
        f2 = None if p2 is None else _interval_pair(p2.value, k)
        passed = f1 is not None and f2 is not None and f1[0] > 2 and f2[0] > 2
        records.append(SubintervalRecord(edges[k], edges[k + 1], mids[k], inflation, f1, f2, passed,
                                         {"alpha1": G1[k].bounds(), "alpha2": G2[k].bounds()}))
        if not passed and not reason:
            reason = f"f1, f2 > 2 not certified on [{edges[k]!r}, {edges[k + 1]!r}]"

    return Certificate(
        params={"a": a, "c1": c1, "c2": c2, "n": n, "subintervals": subintervals},
        budget=budget,
        path_bounds={k: asdict(v) for k, v in per_path.items()},
        bounds_source=source,
        endpoint_enclosures=endpoints,
        sweep=records,
        verdict=FAILED if reason else VERIFIED,
        reason=reason,
        timestamp=timestamp if timestamp is not None else datetime.now(timezone.utc).isoformat(),
        toolchain=toolchain_fingerprint(),
    )


def check_certificate(cert: Certificate) -> list[str]:
    """Re-verify a certificate from its stored enclosures; returns the failures.

    Only the closed-form bounds are recomputed; nothing is re-integrated.
    """
    problems = []
    p = cert.params
    a, c1, c2, n, m = p["a"], p["c1"], p["c2"], p["n"], p["subintervals"]
    b = cert.budget
    for name, pb in cert.path_bounds.items():
        if not b.bounds.dominates(CoefficientBounds(**pb)):
            problems.append(f"budget bounds do not dominate {name} bounds")
    try:
        eps_check = global_rk4_bound(c2, n, b.bounds)
    except PreconditionViolation as exc:
        problems.append(str(exc))
        eps_check = np.inf
    if not b.epsilon >= eps_check:
        problems.append("stored epsilon is below the recomputed discretisation bound")
    deriv = c_derivative_bound(b.bounds.M, c2)

    recs = cert.sweep
    if len(recs) != m:
        problems.append("sweep record count does not match subintervals")
    if not recs or recs[0].c_lo != c1 or recs[-1].c_hi != c2:
        problems.append("sweep does not start at c1 and end at c2")
    for r0, r1 in zip(recs, recs[1:]):
        if r0.c_hi != r1.c_lo:
            problems.append(f"gap between subintervals at {r0.c_hi!r}")
    for r in recs:
        half = max(Fraction(r.c_mid) - Fraction(r.c_lo), Fraction(r.c_hi) - Fraction(r.c_mid))
        need = Fraction(b.epsilon) + Fraction(deriv) * half
        if Fraction(r.inflation) < need or not r.c_lo <= r.c_mid <= r.c_hi:
            problems.append(f"inflation too small on [{r.c_lo!r}, {r.c_hi!r}]")
            continue
        F1 = MatrixEnclosure.from_bounds(r.enclosures["alpha1"])
        F2 = MatrixEnclosure.from_bounds(r.enclosures["alpha2"])
        p1, bad1, p2, bad2 = _evaluate(F1, F2, r.inflation)
        if bool(bad1) or bool(bad2) or not (p1.value.lo > 2 and p2.value.lo > 2):
            problems.append(f"f1, f2 > 2 fails on [{r.c_lo!r}, {r.c_hi!r}]")

    for label, c in (("c1", c1), ("c2", c2)):
        e = cert.endpoint_enclosures[label]
        if e["c"] != c:
            problems.append(f"endpoint {label} evaluated at the wrong c")
        ok, _, _ = check_endpoint(MatrixEnclosure.from_bounds(e["alpha1"]),
                                  MatrixEnclosure.from_bounds(e["alpha2"]), b.epsilon, e["expect"])
        expected = "f1>f2" if label == "c1" else "f1<f2"
        if not ok or e["expect"] != expected:
            problems.append(f"endpoint check fails at {label}")

    if cert.verdict == VERIFIED and problems:
        problems.insert(0, "certificate claims VERIFIED but re-verification failed")
    if cert.verdict != VERIFIED and not problems:
        problems.append("certificate is not VERIFIED")
    return problems


@dataclass(frozen=True)
class SweepRow:
    c: float
    f1: float | None
    f2: float | None
    f1_width: float | None
    f2_width: float | None
    flag: str


SWEEP_HEADER = "c,f1,f2,f1_width,f2_width,flag"


def sweep_periods(a: float, c_grid: Sequence[float], n: int = 4000) -> list[SweepRow]:
    """Midpoints and widths of the f1, f2 enclosures on a c grid (no epsilon inflation)."""
    cs = [float(c) for c in c_grid]
    if not cs:
        return []
    cfg = IntegrationConfig(n, "interval")
    F1 = integrate_batch(alpha1(a), a, cs, cfg)
    F2 = integrate_batch(alpha2(a), a, cs, cfg)
    p1, bad1 = period_values(F1, 1)
    p2, bad2 = period_values(F2, 2)
    rows = []
    for k, c in enumerate(cs):
        b1 = p1 is None or bool(np.asarray(bad1)[k] if np.ndim(bad1) else bad1)
        b2 = p2 is None or bool(np.asarray(bad2)[k] if np.ndim(bad2) else bad2)
        if b1 or b2:
            rows.append(SweepRow(c, None, None, None, None, "DegenerateDenominator"))
            continue
        v1, v2 = p1.value[k], p2.value[k]
        rows.append(SweepRow(c, float(v1.mid()), float(v2.mid()),
                             float(v1.width()), float(v2.width()), "ok"))
    return rows


def format_sweep_csv(rows: Sequence[SweepRow]) -> str:
    def cell(v):
        return "" if v is None else repr(v)
    lines = [SWEEP_HEADER]
    for r in rows:
        lines.append(",".join([repr(r.c), cell(r.f1), cell(r.f2), cell(r.f1_width),
                               cell(r.f2_width), r.flag]))
    return "\n".join(lines) + "\n"
