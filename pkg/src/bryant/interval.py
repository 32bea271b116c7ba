"""Outward-rounded interval arithmetic over reals and rectangular complex boxes.

Every operation rounds to nearest and then steps each endpoint one ulp
outward with ``nextafter``.  Bounds may be Python floats or numpy arrays, so
a single ``RealInterval`` can carry a whole batch of independent intervals;
all operations broadcast elementwise.

>>> x = RealInterval(1.0, 2.0)
>>> (x * RealInterval(-1.0, 1.0)).contains(-2.0)
True
"""
from __future__ import annotations

from fractions import Fraction
import numpy as np

from .errors import BranchAmbiguity, DivisionByZeroInterval

__all__ = [
    "RealInterval",
    "ComplexBox",
    "iv_arith",
    "cbox_arith",
]

_INF = np.inf


def _down(x):
    return np.nextafter(x, -_INF)


def _up(x):
    return np.nextafter(x, _INF)


def _down_keep(x, keep):
    """``_down(x)`` except where ``keep`` marks an exactly computed value."""
    r = _down(x)
    if np.ndim(r) == 0:
        return x if keep else r
    return np.where(keep, x, r)


def _up_keep(x, keep):
    r = _up(x)
    if np.ndim(r) == 0:
        return x if keep else r
    return np.where(keep, x, r)


def _fast_add(x: "RealInterval", y: "RealInterval") -> "RealInterval":
    # plain one-ulp widening without the exact-zero refinement (hot path)
    return RealInterval._raw(_down(x.lo + y.lo), _up(x.hi + y.hi))


def _fast_sub(x: "RealInterval", y: "RealInterval") -> "RealInterval":
    return RealInterval._raw(_down(x.lo - y.hi), _up(x.hi - y.lo))


def _fast_mul(x: "RealInterval", y: "RealInterval") -> "RealInterval":
    p1, p2, p3, p4 = x.lo * y.lo, x.lo * y.hi, x.hi * y.lo, x.hi * y.hi
    return RealInterval._raw(_down(np.minimum(np.minimum(p1, p2), np.minimum(p3, p4))),
                             _up(np.maximum(np.maximum(p1, p2), np.maximum(p3, p4))))


def _as_interval(x) -> "RealInterval":
    if isinstance(x, RealInterval):
        return x
    return RealInterval.point(x)


def _defer(other) -> bool:
    if isinstance(other, (RealInterval, float, int)):
        return False
    return isinstance(other, ComplexBox) or np.iscomplexobj(other)


def _is_real_operand(other) -> bool:
    if isinstance(other, ComplexBox):
        return False
    return isinstance(other, (RealInterval, float, int)) or np.isrealobj(other)


class RealInterval:
    """Closed interval ``[lo, hi]`` (or an array of them)."""

    __slots__ = ("lo", "hi")

    def __init__(self, lo, hi=None):
        if hi is None:
            hi = lo
        lo = np.asarray(lo, dtype=float) if np.ndim(lo) else float(lo)
        hi = np.asarray(hi, dtype=float) if np.ndim(hi) else float(hi)
        if np.any(np.asarray(lo) > np.asarray(hi)):
            raise ValueError(f"empty interval [{lo}, {hi}]")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    def __setattr__(self, name, value):
        raise AttributeError("RealInterval is immutable")

    @classmethod
    def _raw(cls, lo, hi) -> "RealInterval":
        obj = object.__new__(cls)
        object.__setattr__(obj, "lo", lo)
        object.__setattr__(obj, "hi", hi)
        return obj

    @classmethod
    def point(cls, x) -> "RealInterval":
        """Degenerate interval of an exactly representable float (or array)."""
        x = np.asarray(x, dtype=float) if np.ndim(x) else float(x)
        return cls._raw(x, x)

    @classmethod
    def from_exact(cls, value) -> "RealInterval":
        """Enclose an exact rational (``Fraction``, ``int`` or decimal string).

        ``float(Fraction)`` is correctly rounded, so one ulp either side is
        enough unless the conversion is exact.
        """
        q = Fraction(value)
        f = float(q)
        if Fraction(f) == q:
            return cls._raw(f, f)
        return cls._raw(float(_down(f)), float(_up(f)))

    # -- inspection -------------------------------------------------------
    @property
    def shape(self):
        return np.shape(self.lo)

    def __len__(self):
        return len(self.lo)

    def __getitem__(self, idx) -> "RealInterval":
        return RealInterval._raw(self.lo[idx], self.hi[idx])

    def mid(self):
        return 0.5 * self.lo + 0.5 * self.hi

    def width(self):
        return self.hi - self.lo

    def mag(self):
        """Upper bound of ``|x|`` over the interval."""
        return np.maximum(np.abs(self.lo), np.abs(self.hi))

    def mig(self):
        """Lower bound of ``|x|`` over the interval."""
        return np.where((self.lo <= 0) & (self.hi >= 0), 0.0,
                        np.minimum(np.abs(self.lo), np.abs(self.hi)))

    def contains(self, x):
        return np.logical_and(self.lo <= x, x <= self.hi)

    def contains_zero(self):
        return np.logical_and(self.lo <= 0.0, self.hi >= 0.0)

    def subset_of(self, other: "RealInterval"):
        return np.logical_and(other.lo <= self.lo, self.hi <= other.hi)

    def overlaps(self, other: "RealInterval"):
        return np.logical_and(self.lo <= other.hi, other.lo <= self.hi)

    def inflate(self, r) -> "RealInterval":
        """Widen both endpoints by a nonnegative radius ``r``."""
        return RealInterval._raw(_down(self.lo - r), _up(self.hi + r))

    def hull(self, other: "RealInterval") -> "RealInterval":
        return RealInterval._raw(np.minimum(self.lo, other.lo),
                                 np.maximum(self.hi, other.hi))

    def __repr__(self):
        return f"RealInterval({self.lo!r}, {self.hi!r})"

    def __eq__(self, other):
        if not isinstance(other, RealInterval):
            return NotImplemented
        return bool(np.all(self.lo == other.lo) and np.all(self.hi == other.hi))

    __hash__ = None

    # -- arithmetic -------------------------------------------------------
    def __neg__(self):
        return RealInterval._raw(-self.hi, -self.lo)

    def __add__(self, other):
        if _defer(other):
            return NotImplemented
        other = _as_interval(other)
        lo, hi = self.lo + other.lo, self.hi + other.hi
        # a sum that rounds to zero is exact
        return RealInterval._raw(_down_keep(lo, lo == 0), _up_keep(hi, hi == 0))

    __radd__ = __add__

    def __sub__(self, other):
        if _defer(other):
            return NotImplemented
        other = _as_interval(other)
        lo, hi = self.lo - other.hi, self.hi - other.lo
        return RealInterval._raw(_down_keep(lo, lo == 0), _up_keep(hi, hi == 0))

    def __rsub__(self, other):
        return _as_interval(other) - self

    def __mul__(self, other):
        if _defer(other):
            return NotImplemented
        other = _as_interval(other)
        p1 = self.lo * other.lo
        p2 = self.lo * other.hi
        p3 = self.hi * other.lo
        p4 = self.hi * other.hi
        lo = np.minimum(np.minimum(p1, p2), np.minimum(p3, p4))
        hi = np.maximum(np.maximum(p1, p2), np.maximum(p3, p4))
        # zero products are exact unless both factors were nonzero (underflow)
        zero_factor = ((self.lo == 0) & (self.hi == 0)) | ((other.lo == 0) & (other.hi == 0))
        return RealInterval._raw(_down_keep(lo, zero_factor), _up_keep(hi, zero_factor))

    __rmul__ = __mul__

    def reciprocal(self) -> "RealInterval":
        if np.any(self.contains_zero()):
            raise DivisionByZeroInterval(f"0 in {self!r}")
        return RealInterval._raw(_down(1.0 / self.hi), _up(1.0 / self.lo))

    def __truediv__(self, other):
        if _defer(other):
            return NotImplemented
        other = _as_interval(other)
        if np.any(other.contains_zero()):
            raise DivisionByZeroInterval(f"0 in {other!r}")
        # overflow to +-inf is already an outward result
        with np.errstate(over="ignore"):
            q1 = self.lo / other.lo
            q2 = self.lo / other.hi
            q3 = self.hi / other.lo
            q4 = self.hi / other.hi
        lo = np.minimum(np.minimum(q1, q2), np.minimum(q3, q4))
        hi = np.maximum(np.maximum(q1, q2), np.maximum(q3, q4))
        zero_num = (self.lo == 0) & (self.hi == 0)
        return RealInterval._raw(_down_keep(lo, zero_num), _up_keep(hi, zero_num))

    def __rtruediv__(self, other):
        return _as_interval(other) / self

    def sqr(self) -> "RealInterval":
        """Square with the dependency handled (tighter than ``x * x``)."""
        l2 = self.lo * self.lo
        h2 = self.hi * self.hi
        straddle = self.contains_zero()
        lo = np.where(straddle, 0.0, np.minimum(l2, h2))
        hi = np.maximum(l2, h2)
        zero = (self.lo == 0) & (self.hi == 0)
        return RealInterval._raw(np.maximum(_down(lo), 0.0), _up_keep(hi, zero))

    def sqrt(self) -> "RealInterval":
        """Square root of the nonnegative part (IEEE sqrt is correctly rounded)."""
        if np.any(np.asarray(self.hi) < 0):
            raise ValueError(f"sqrt of negative interval {self!r}")
        lo = np.sqrt(np.maximum(self.lo, 0.0))
        return RealInterval._raw(np.maximum(_down(lo), 0.0), _up(np.sqrt(self.hi)))

    def exp(self) -> "RealInterval":
        # libm exp is faithful but not correctly rounded: step two ulps (exp(0) = 1 is exact).
        lo, hi = np.exp(self.lo), np.exp(self.hi)
        lo = _down_keep(lo, self.lo == 0)
        lo = _down_keep(lo, self.lo == 0)
        hi = _up_keep(_up_keep(hi, self.hi == 0), self.hi == 0)
        return RealInterval._raw(np.maximum(lo, 0.0), hi)

    def __pow__(self, k: int) -> "RealInterval":
        if not isinstance(k, (int, np.integer)) or k < 0:
            raise TypeError("only nonnegative integer powers are supported")
        result = RealInterval.point(np.ones(self.shape) if self.shape else 1.0)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base.sqr()
        return result


def iv_arith(op: str, x: RealInterval, y: RealInterval) -> RealInterval:
    """Dispatch one of ``add``, ``sub``, ``mul``, ``div`` on two intervals."""
    if op == "add":
        return x + y
    if op == "sub":
        return x - y
    if op == "mul":
        return x * y
    if op == "div":
        return x / y
    raise ValueError(f"unknown interval op {op!r}")


def _as_box(z) -> "ComplexBox":
    if isinstance(z, ComplexBox):
        return z
    if isinstance(z, RealInterval):
        return ComplexBox(z, RealInterval.point(np.zeros(z.shape) if z.shape else 0.0))
    return ComplexBox.point(z)


class ComplexBox:
    """Rectangular enclosure ``re + i*im`` of a complex number (or an array)."""

    __slots__ = ("re", "im")

    def __init__(self, re: RealInterval, im: RealInterval):
        object.__setattr__(self, "re", re)
        object.__setattr__(self, "im", im)

    def __setattr__(self, name, value):
        raise AttributeError("ComplexBox is immutable")

    @classmethod
    def point(cls, z) -> "ComplexBox":
        z = np.asarray(z, dtype=complex) if np.ndim(z) else complex(z)
        return cls(RealInterval.point(np.real(z)), RealInterval.point(np.imag(z)))

    @classmethod
    def from_bounds(cls, re_lo, re_hi, im_lo, im_hi) -> "ComplexBox":
        return cls(RealInterval(re_lo, re_hi), RealInterval(im_lo, im_hi))

    @property
    def shape(self):
        return self.re.shape

    def __len__(self):
        return len(self.re)

    def __getitem__(self, idx) -> "ComplexBox":
        return ComplexBox(self.re[idx], self.im[idx])

    def mid(self):
        return self.re.mid() + 1j * self.im.mid()

    def width(self):
        """Larger of the real and imaginary widths."""
        return np.maximum(self.re.width(), self.im.width())

    def mag(self):
        """Upper bound of ``|z|`` over the box."""
        r = self.re.mag()
        i = self.im.mag()
        return _up(_up(np.hypot(r, i)))

    def mig(self):
        """Lower bound of ``|z|`` over the box."""
        r = self.re.mig()
        i = self.im.mig()
        return np.maximum(_down(_down(np.hypot(r, i))), 0.0)

    def contains(self, z):
        return np.logical_and(self.re.contains(np.real(z)), self.im.contains(np.imag(z)))

    def contains_zero(self):
        return np.logical_and(self.re.contains_zero(), self.im.contains_zero())

    def overlaps(self, other: "ComplexBox"):
        return np.logical_and(self.re.overlaps(other.re), self.im.overlaps(other.im))

    def subset_of(self, other: "ComplexBox"):
        return np.logical_and(self.re.subset_of(other.re), self.im.subset_of(other.im))

    def inflate(self, r) -> "ComplexBox":
        return ComplexBox(self.re.inflate(r), self.im.inflate(r))

    def __repr__(self):
        return f"ComplexBox(re={self.re!r}, im={self.im!r})"

    def __eq__(self, other):
        if not isinstance(other, ComplexBox):
            return NotImplemented
        return self.re == other.re and self.im == other.im

    __hash__ = None

    # -- arithmetic -------------------------------------------------------
    def conj(self) -> "ComplexBox":
        return ComplexBox(self.re, -self.im)

    def __neg__(self):
        return ComplexBox(-self.re, -self.im)

    def __add__(self, other):
        other = _as_box(other)
        return ComplexBox(_fast_add(self.re, other.re), _fast_add(self.im, other.im))

    __radd__ = __add__

    def __sub__(self, other):
        other = _as_box(other)
        return ComplexBox(_fast_sub(self.re, other.re), _fast_sub(self.im, other.im))

    def __rsub__(self, other):
        return _as_box(other) - self

    def __mul__(self, other):
        if _is_real_operand(other):
            other = _as_interval(other)
            return ComplexBox(_fast_mul(self.re, other), _fast_mul(self.im, other))
        other = _as_box(other)
        return ComplexBox(_fast_sub(_fast_mul(self.re, other.re), _fast_mul(self.im, other.im)),
                          _fast_add(_fast_mul(self.re, other.im), _fast_mul(self.im, other.re)))

    __rmul__ = __mul__

    def abs2(self) -> RealInterval:
        return self.re.sqr() + self.im.sqr()

    def __truediv__(self, other):
        if _is_real_operand(other):
            other = _as_interval(other)
            return ComplexBox(self.re / other, self.im / other)
        other = _as_box(other)
        if np.any(other.contains_zero()):
            raise DivisionByZeroInterval(f"0 in {other!r}")
        den = other.abs2()
        num = self * other.conj()
        return ComplexBox(num.re / den, num.im / den)

    def __rtruediv__(self, other):
        return _as_box(other) / self

    def sqrt(self, hint) -> "ComplexBox":
        """Enclose the square root nearest ``hint`` (scalar or array).

        A float root ``s0`` of the box midpoint is picked on the hint's side.
        For every ``x`` in the box the root ``s`` with ``s^2 = x`` nearest
        ``s0`` satisfies ``|s - s0| <= r / (|s0| + sqrt(|s0|^2 - r))`` where
        ``r`` bounds ``|x - s0^2|``; when ``r <= |s0|^2 / 4`` exactly one root
        lies in that disk.
        """
        x0 = self.mid()
        s0 = np.sqrt(np.asarray(x0, dtype=complex))
        d_plus = np.abs(s0 - hint)
        d_minus = np.abs(-s0 - hint)
        flip = d_minus < d_plus
        near = np.where(flip, d_minus, d_plus)
        far = np.where(flip, d_plus, d_minus)
        if np.any(far < 10.0 * near):
            raise BranchAmbiguity("square root branch hint is not decisive")
        s0 = np.where(flip, -s0, s0)
        if not np.ndim(hint) and not np.ndim(x0):
            s0 = complex(s0)
        sbox = ComplexBox.point(s0)
        r = (self - sbox * sbox).mag()
        m = np.maximum(_down(_down(np.abs(s0))), 0.0)
        m2 = _down(m * m)
        if np.any(~(r <= 0.25 * m2)):
            raise BranchAmbiguity("box too close to the branch point for a sqrt enclosure")
        root = _down(np.sqrt(_down(m2 - r)))
        delta = _up(r / _down(m + root))
        return ComplexBox(sbox.re.inflate(delta), sbox.im.inflate(delta))


def cbox_arith(op: str, x: ComplexBox, y: ComplexBox | None = None, *, hint=None) -> ComplexBox:
    """Dispatch complex-box ``add/sub/mul/div/conj/sqrt``.

    ``sqrt`` needs ``hint``, a complex point whose nearest root is returned.
    """
    if op == "add":
        return x + y
    if op == "sub":
        return x - y
    if op == "mul":
        return x * y
    if op == "div":
        return x / y
    if op == "conj":
        return x.conj()
    if op == "sqrt":
        if hint is None:
            raise ValueError("sqrt requires a branch hint")
        return x.sqrt(hint)
    raise ValueError(f"unknown box op {op!r}")

