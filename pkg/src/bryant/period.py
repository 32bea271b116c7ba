"""Monodromy assembly and the scalar period functions f1, f2.

With ``F(alpha_1(1)) = (A1 B1; C1 D1)`` and ``F(alpha_2(1)) = (A2 B2; C2 D2)``
the monodromies around the three generating loops follow from the surface
symmetries alone, and the SU(2) conditions reduce to ``f1 = f2`` with
``|f1| > 2``.
"""
from __future__ import annotations

from dataclasses import dataclass
import math

import numpy as np

from .errors import DegenerateDenominator, OutOfRange
from .integrator import MatrixEnclosure
from .interval import ComplexBox, RealInterval


@dataclass(frozen=True)
class MonodromyPair:
    phi: MatrixEnclosure
    psi: MatrixEnclosure
    psi3: MatrixEnclosure


@dataclass(frozen=True)
class PeriodValue:
    value: RealInterval
    imag_residual: RealInterval
    denominator: RealInterval


def symmetry_matrix(i: int, F: MatrixEnclosure) -> MatrixEnclosure:
    """Endpoint value along the ``phi_i``-image of a path, given ``F`` along the path."""
    A, B, C, D = F.entries
    if i == 1:
        return MatrixEnclosure(A.conj(), B.conj(), C.conj(), D.conj())
    if i == 2:
        return MatrixEnclosure(D, C, B, A)
    if i == 3:
        return MatrixEnclosure(D.conj(), C.conj(), B.conj(), A.conj())
    if i == 4:
        return MatrixEnclosure(A.conj(), -B.conj(), -C.conj(), D.conj())
    raise ValueError(f"no symmetry phi_{i}")


def assemble_monodromies(F1: MatrixEnclosure, F2: MatrixEnclosure) -> MonodromyPair:
    A1, B1, C1, D1 = F1.entries
    A2, B2, C2, D2 = F2.entries
    phi = (F1
           @ MatrixEnclosure(D1.conj(), B1.conj(), C1.conj(), A1.conj())
           @ MatrixEnclosure(D1, -C1, -B1, A1)
           @ MatrixEnclosure(A1.conj(), -C1.conj(), -B1.conj(), D1.conj()))
    psi = F2 @ MatrixEnclosure(D2.conj(), -B2.conj(), -C2.conj(), A2.conj())
    psi3 = (MatrixEnclosure(D2, C2, B2, A2)
            @ MatrixEnclosure(A2.conj(), -C2.conj(), -B2.conj(), D2.conj()))
    return MonodromyPair(phi, psi, psi3)


def _re_conj_prod(x: ComplexBox, y: ComplexBox) -> RealInterval:
    """``Re(conj(x) * y)``."""
    return x.re * y.re + x.im * y.im


def _im_conj_prod(x: ComplexBox, y: ComplexBox) -> RealInterval:
    """``Im(conj(x) * y)``."""
    return x.re * y.im - x.im * y.re


def _safe_ratio(num: RealInterval, den: RealInterval):
    bad = den.contains_zero()
    if np.ndim(bad) == 0:
        if bad:
            return None, bad
        return num / den, bad
    if np.any(bad):
        den = RealInterval(np.where(bad, 1.0, den.lo), np.where(bad, 1.0, den.hi))
        q = num / den
        nan = np.where(bad, np.nan, 0.0)
        return RealInterval._raw(q.lo + nan, q.hi + nan), bad
    return num / den, bad


def _complex_residual(num: ComplexBox, den: ComplexBox, bad) -> RealInterval:
    if np.ndim(bad) == 0:
        return (num / den).im
    safe = ComplexBox(RealInterval(np.where(bad, 1.0, den.re.lo), np.where(bad, 1.0, den.re.hi)),
                      RealInterval(np.where(bad, 0.0, den.im.lo), np.where(bad, 0.0, den.im.hi)))
    im = (num / safe).im
    nan = np.where(bad, np.nan, 0.0)
    return RealInterval._raw(im.lo + nan, im.hi + nan)


def f1_parts(F1: MatrixEnclosure):
    """Numerator and denominator (real intervals) plus the full complex ones."""
    A, B, C, D = F1.entries
    num = (_re_conj_prod(A, D) + _re_conj_prod(C, B)) * -2.0
    den = _re_conj_prod(D, C) + _re_conj_prod(B, A)
    cnum = (A.conj() * D + D.conj() * A + C.conj() * B + B.conj() * C) * -2.0
    cden = D.conj() * C + C.conj() * D + B.conj() * A + A.conj() * B
    return num, den, cnum, cden


def f2_parts(F2: MatrixEnclosure):
    # numerator and denominator are purely imaginary: keep imaginary parts
    A, B, C, D = F2.entries
    num = (_im_conj_prod(A, D) + _im_conj_prod(C, B)) * 2.0
    den = _im_conj_prod(D, C) + _im_conj_prod(B, A)
    cnum = (A.conj() * D - D.conj() * A + C.conj() * B - B.conj() * C) * 2.0
    cden = D.conj() * C - C.conj() * D + B.conj() * A - A.conj() * B
    return num, den, cnum, cden


def period_values(F: MatrixEnclosure, which: int):
    """Batched ``(PeriodValue, degenerate_mask)``; degenerate entries are NaN."""
    num, den, cnum, cden = (f1_parts if which == 1 else f2_parts)(F)
    value, bad = _safe_ratio(num, den)
    if value is None:
        return None, bad
    residual = _complex_residual(cnum, cden, bad)
    return PeriodValue(value, residual, den), bad


def _period(F: MatrixEnclosure, which: int) -> PeriodValue:
    pv, bad = period_values(F, which)
    if np.any(bad):
        raise DegenerateDenominator(f"f{which} denominator enclosure contains 0")
    return pv


def period_f1(F1: MatrixEnclosure) -> PeriodValue:
    return _period(F1, 1)


def period_f2(F2: MatrixEnclosure) -> PeriodValue:
    return _period(F2, 2)


def gauge_function(beta: float) -> float:
    return (1 + 2 * beta * beta) / (beta * math.sqrt(1 + beta * beta))


def solve_gauge_beta(f: float, rtol: float = 1e-14) -> float:
    """The unique ``beta > 0`` with ``(1 + 2 beta^2)/(beta sqrt(1 + beta^2)) = f``.

    The left side decreases strictly from +inf to 2, so bisection applies.
    """
    if not f > 2:
        raise OutOfRange(f"gauge equation needs f > 2, got {f}")
    lo, hi = 0.5, 1.0
    while gauge_function(lo) <= f:
        lo *= 0.5
    while gauge_function(hi) >= f:
        hi *= 2.0
    for _ in range(400):
        mid = 0.5 * (lo + hi)
        if gauge_function(mid) > f:
            lo = mid
        else:
            hi = mid
        if hi - lo <= rtol * hi:
            break
    return 0.5 * (lo + hi)


def gauge_conjugate(P: MatrixEnclosure, beta: float) -> MatrixEnclosure:
    """``K P K^{-1}`` with ``K = (alpha beta; beta alpha)``, ``alpha = sqrt(1 + beta^2)``."""
    b = RealInterval.point(beta)
    alpha = (b.sqr() + 1.0).sqrt()
    zero = RealInterval.point(0.0)
    al = ComplexBox(alpha, zero)
    be = ComplexBox(b, zero)
    K = MatrixEnclosure(al, be, be, al)
    Kinv = MatrixEnclosure(al, -be, -be, al)
    return K @ P @ Kinv


def su2_distance(P) -> float:
    """Max-entry distance of ``P conj(P)^t`` from the identity (midpoint diagnostic)."""
    m = P.mid() if isinstance(P, MatrixEnclosure) else np.asarray(P, dtype=complex)
    q = m @ np.conj(np.swapaxes(m, -1, -2))
    return float(np.max(np.abs(q - np.eye(2))))
