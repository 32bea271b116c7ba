"""A-priori RK4 error bounds for the row systems, evaluated with upward rounding.

All public functions return Python floats that are upper bounds of the
exact real value of the printed formula (interval evaluation, ``hi`` end).
"""
from __future__ import annotations

from dataclasses import dataclass, asdict
from fractions import Fraction

from .errors import PreconditionViolation
from .interval import RealInterval
from .surface import CoefficientBounds

# (n power, c power, denominator, ((coefficient, c power, (M, M1, M2, M3) powers), ...))
# One row per parenthesised group of the zeta polynomial, transcribed as printed.
ZETA_GROUPS = (
    (9, 1, 72, (
        (96, 3, (4, 0, 0, 0)),
        (144, 2, (2, 1, 0, 0)),
        (18, 1, (0, 2, 0, 0)),
        (48, 1, (1, 0, 1, 0)),
        (13, 0, (0, 0, 0, 1)),
    )),
    (8, 2, 48, (
        (32, 2, (3, 1, 0, 0)),
        (12, 1, (1, 2, 0, 0)),
        (16, 1, (2, 0, 1, 0)),
        (4, 0, (0, 1, 1, 0)),
        (11, 0, (1, 0, 0, 1)),
    )),
    (7, 2, 384, (
        (80, 2, (2, 2, 0, 0)),
        (8, 1, (0, 3, 0, 0)),
        (96, 2, (3, 0, 1, 0)),
        (64, 1, (1, 1, 1, 0)),
        (5, 0, (0, 0, 2, 0)),
        (79, 1, (2, 0, 0, 1)),
        (22, 0, (0, 1, 0, 1)),
    )),
    (6, 2, 2304, (
        (48, 2, (1, 3, 0, 0)),
        (336, 2, (2, 1, 1, 0)),
        (48, 1, (0, 2, 1, 0)),
        (60, 1, (1, 0, 2, 0)),
        (272, 2, (3, 0, 0, 1)),
        (236, 1, (1, 1, 0, 1)),
        (49, 0, (0, 0, 1, 1)),
    )),
    (5, 2, 2304, (
        (48, 2, (1, 2, 1, 0)),
        (54, 2, (2, 0, 2, 0)),
        (15, 1, (0, 1, 2, 0)),
        (200, 2, (2, 1, 0, 1)),
        (26, 1, (0, 2, 0, 1)),
        (84, 1, (1, 0, 1, 1)),
        (12, 0, (0, 0, 0, 2)),
    )),
    (4, 3, 13824, (
        (90, 1, (1, 1, 2, 0)),
        (9, 0, (0, 0, 3, 0)),
        (156, 1, (1, 2, 0, 1)),
        (450, 1, (2, 0, 1, 1)),
        (105, 0, (0, 1, 1, 1)),
        (116, 0, (1, 0, 0, 3)),
    )),
    (3, 3, 27648, (
        (18, 1, (1, 0, 3, 0)),
        (210, 1, (1, 1, 1, 1)),
        (33, 0, (0, 0, 2, 1)),
        (216, 1, (2, 0, 0, 2)),
        (44, 0, (0, 1, 0, 2)),
    )),
    (2, 3, 27648, (
        (33, 1, (1, 0, 2, 1)),
        (44, 1, (1, 1, 0, 2)),
        (13, 0, (0, 0, 1, 2)),
    )),
    (1, 3, 82944, (
        (39, 1, (1, 0, 1, 2)),
        (4, 0, (0, 0, 0, 3)),
    )),
    (0, 4, 20736, (
        (1, 0, (1, 0, 0, 3)),
    )),
)


def _iv(x) -> RealInterval:
    if isinstance(x, RealInterval):
        return x
    return RealInterval.from_exact(Fraction(x))


def zeta_interval(c, n, M, M1, M2, M3) -> RealInterval:
    """Outward-rounded enclosure of the zeta polynomial."""
    c, n = _iv(c), _iv(n)
    ms = [_iv(v) for v in (M, M1, M2, M3)]
    total = RealInterval.point(0.0)
    for n_pow, c_pow, denom, terms in ZETA_GROUPS:
        inner = RealInterval.point(0.0)
        for coef, cp, powers in terms:
            term = RealInterval.point(float(coef)) * c ** cp
            for base, p in zip(ms, powers):
                term = term * base ** p
            inner = inner + term
        total = total + (n ** n_pow * c ** c_pow * inner) / float(denom)
    return total


def zeta(c: float, n: int, M: float, M1: float, M2: float, M3: float) -> float:
    """Upper bound of the zeta polynomial at the given arguments."""
    return float(zeta_interval(c, n, M, M1, M2, M3).hi)


def check_step_condition(c: float, n: int, M: float) -> None:
    if not Fraction(M) * Fraction(c) * 100 < n:
        raise PreconditionViolation(
            f"M*c/n = {M * c / n:.4g} must be below 1/100 (need n > {100 * M * c:.4g})")


def global_rk4_bound(c: float, n: int, bounds: CoefficientBounds) -> float:
    """Upper bound on ``|exact - RK4|`` for each entry of the endpoint matrix.

    ``(e^{2.1cM} + e^{4.1cM}) / (4.2 c M n^12) * zeta``.
    """
    check_step_condition(c, n, bounds.M)
    if c == 0 or bounds.M == 0:
        return 0.0
    ci, Mi, ni = _iv(c), _iv(bounds.M), _iv(n)
    cM = ci * Mi
    growth = (_iv("2.1") * cM).exp() + (_iv("4.1") * cM).exp()
    denom = _iv("4.2") * cM * ni ** 12
    z = zeta_interval(ci, ni, *bounds.as_tuple())
    return float((growth / denom * z).hi)


def c_derivative_bound(M: float, c: float) -> float:
    """Upper bound ``2.48 M e^{2.4 M c}`` on the c-derivative of the RK4 output."""
    if M < 0 or c < 0:
        raise ValueError("M and c must be nonnegative")
    Mi = _iv(M)
    return float((_iv("2.48") * Mi * (_iv("2.4") * Mi * _iv(c)).exp()).hi)


def solution_growth_bound(c: float, M: float, t: float, entry: str = "A") -> float:
    """A-priori bound on the exact solution: ``(1 + e^{2tcM})/2`` for A, D;
    ``(e^{2tcM} - 1)/2`` for B, C."""
    if not 0 <= t <= 1:
        raise ValueError("t must lie in [0, 1]")
    e = (RealInterval.point(2.0) * _iv(t) * _iv(c) * _iv(M)).exp()
    if entry in ("A", "D"):
        return float(((e + 1.0) / 2.0).hi)
    if entry in ("B", "C"):
        return float(max(((e - 1.0) / 2.0).hi, 0.0))
    raise ValueError(f"unknown entry {entry!r}")


@dataclass(frozen=True)
class ErrorBudget:
    """Discretisation budget ``epsilon`` and c-variation budget ``epsilon_hat``."""

    epsilon: float
    epsilon_hat: float
    n: int
    bounds: CoefficientBounds
    c_ref: float
    zeta: float
    derivative_bound: float
    half_width: float

    def to_dict(self) -> dict:
        d = asdict(self)
        d["bounds"] = asdict(self.bounds)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ErrorBudget":
        d = dict(d)
        d["bounds"] = CoefficientBounds(**d["bounds"])
        return cls(**d)


def make_budget(c1: float, c2: float, n: int, bounds: CoefficientBounds,
                half_width: float) -> ErrorBudget:
    """Budget valid for every c in ``[c1, c2]``.

    Both bounds increase with c, so they are evaluated at ``c2``;
    ``half_width`` is the largest distance from a sweep midpoint to the
    edge of its subinterval.
    """
    eps = global_rk4_bound(c2, n, bounds)
    deriv = c_derivative_bound(bounds.M, c2)
    eps_hat = float((_iv(deriv) * _iv(half_width)).hi)
    return ErrorBudget(epsilon=eps, epsilon_hat=eps_hat, n=n, bounds=bounds, c_ref=c2,
                       zeta=zeta(c2, n, *bounds.as_tuple()), derivative_bound=deriv,
                       half_width=half_width)
