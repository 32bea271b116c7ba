"""Classical RK4 for ``dF/dt = F (c h1, c h3; c h2, c h4)`` along polygonal paths.

The two rows (A, B) and (C, D) obey the same 2x2 system, so they are
stacked and advanced together.  Every c value of a batch shares the path
coefficients, so a whole sweep of c is integrated in one vectorised pass.
The same stage routine runs on ``ComplexBox`` (interval mode, enclosing the
exact RK4 iterate) and on complex ndarrays (floating mode).
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .interval import ComplexBox, RealInterval
from .surface import (
    CoefficientBounds,
    PolygonalPath,
    SurfaceParams,
    check_grid,
    enclose_sheet,
    half_node_sheet,
    step_segments,
)

MODES = ("interval", "floating")


@dataclass(frozen=True)
class MatrixEnclosure:
    """Entrywise complex-box enclosure of ``(A B; C D)``; entries may be batched."""

    a11: ComplexBox
    a12: ComplexBox
    a21: ComplexBox
    a22: ComplexBox

    @classmethod
    def from_matrix(cls, m) -> "MatrixEnclosure":
        m = np.asarray(m, dtype=complex)
        return cls(*(ComplexBox.point(m[..., i, j]) for i in (0, 1) for j in (0, 1)))

    @classmethod
    def identity(cls) -> "MatrixEnclosure":
        return cls.from_matrix(np.eye(2))

    @property
    def entries(self) -> tuple[ComplexBox, ComplexBox, ComplexBox, ComplexBox]:
        return (self.a11, self.a12, self.a21, self.a22)

    @property
    def shape(self):
        return self.a11.shape

    def __getitem__(self, idx) -> "MatrixEnclosure":
        return MatrixEnclosure(*(e[idx] for e in self.entries))

    def __len__(self):
        return len(self.a11)

    def det(self) -> ComplexBox:
        return self.a11 * self.a22 - self.a12 * self.a21

    def mid(self) -> np.ndarray:
        e = [x.mid() for x in self.entries]
        return np.stack([np.stack([e[0], e[1]], -1), np.stack([e[2], e[3]], -1)], -2)

    def max_width(self):
        return np.max([x.width() for x in self.entries], axis=0)

    def contains(self, m):
        m = np.asarray(m)
        ok = True
        for (i, j), e in zip(((0, 0), (0, 1), (1, 0), (1, 1)), self.entries):
            ok = np.logical_and(ok, e.contains(m[..., i, j]))
        return ok

    def overlaps(self, other: "MatrixEnclosure"):
        ok = True
        for e, f in zip(self.entries, other.entries):
            ok = np.logical_and(ok, e.overlaps(f))
        return ok

    def conj(self) -> "MatrixEnclosure":
        return MatrixEnclosure(*(e.conj() for e in self.entries))

    def inflate(self, r) -> "MatrixEnclosure":
        return MatrixEnclosure(*(e.inflate(r) for e in self.entries))

    def __matmul__(self, other: "MatrixEnclosure") -> "MatrixEnclosure":
        a, b, c, d = self.entries
        e, f, g, h = other.entries
        return MatrixEnclosure(a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h)

    def bounds(self) -> dict[str, float]:
        """The 16 real bounds ``{X}_{lr,ur,li,ui}`` of a scalar enclosure."""
        out = {}
        for name, e in zip("ABCD", self.entries):
            out[f"{name}_lr"] = float(e.re.lo)
            out[f"{name}_ur"] = float(e.re.hi)
            out[f"{name}_li"] = float(e.im.lo)
            out[f"{name}_ui"] = float(e.im.hi)
        return out

    @classmethod
    def from_bounds(cls, b: dict) -> "MatrixEnclosure":
        return cls(*(ComplexBox.from_bounds(b[f"{k}_lr"], b[f"{k}_ur"], b[f"{k}_li"], b[f"{k}_ui"])
                     for k in "ABCD"))


@dataclass(frozen=True)
class IntegrationConfig:
    n: int = 4000
    mode: str = "interval"

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be a positive integer")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")

    def validate(self, path: PolygonalPath, c: float, bounds: CoefficientBounds | None = None):
        check_grid(path, self.n)
        if bounds is not None and not Fraction(bounds.M) * Fraction(c) * 100 < self.n:
            raise ValueError(f"M*c/n = {bounds.M * c / self.n:.3g} is not below 1/100")


def _rk4_rows(X, Y, q1, q2, q3, q4):
    """One RK4 step of ``X' = q1 X + q2 Y``, ``Y' = q3 X + q4 Y`` (already scaled).

    ``qi`` are triples of coefficients at t, t + step/2 and t + step.
    """
    k0 = q1[0] * X + q2[0] * Y
    m0 = q3[0] * X + q4[0] * Y
    X1 = X + k0 * 0.5
    Y1 = Y + m0 * 0.5
    k1 = q1[1] * X1 + q2[1] * Y1
    m1 = q3[1] * X1 + q4[1] * Y1
    X2 = X + k1 * 0.5
    Y2 = Y + m1 * 0.5
    k2 = q1[1] * X2 + q2[1] * Y2
    m2 = q3[1] * X2 + q4[1] * Y2
    X3 = X + k2
    Y3 = Y + m2
    k3 = q1[2] * X3 + q2[2] * Y3
    m3 = q3[2] * X3 + q4[2] * Y3
    X = X + (k0 + k1 * 2.0 + k2 * 2.0 + k3) / 6.0
    Y = Y + (m0 + m1 * 2.0 + m2 * 2.0 + m3) / 6.0
    return X, Y


def _scale(c, step):
    """``c * step`` as an interval (``step`` may be an exact Fraction)."""
    c_iv = c if isinstance(c, RealInterval) else RealInterval.point(c)
    return c_iv * RealInterval.from_exact(step)


def rk4_step(state, h: Callable, t, step, c):
    """Advance ``F`` one RK4 step.

    ``h(t)`` returns ``(h1, h2, h3, h4)``.  A ``MatrixEnclosure`` state is
    advanced in interval arithmetic (coefficients may be ``ComplexBox`` or
    exact complex numbers); a plain 2x2 array is advanced in floating point.
    """
    step = Fraction(step)
    t = Fraction(t)
    coeffs = [h(t), h(t + step / 2), h(t + step)]
    if isinstance(state, MatrixEnclosure):
        s = _scale(c, step)
        q = [[ComplexBox.point(v) * s if not isinstance(v, ComplexBox) else v * s
              for v in (cf[i] for cf in coeffs)] for i in range(4)]
        X = _stack_boxes(state.a11, state.a21)
        Y = _stack_boxes(state.a12, state.a22)
        X, Y = _rk4_rows(X, Y, *q)
        return MatrixEnclosure(X[0], Y[0], X[1], Y[1])
    F = np.asarray(state, dtype=complex)
    s = c * float(step)
    q = [[s * complex(cf[i]) for cf in coeffs] for i in range(4)]
    X, Y = _rk4_rows(F[:, 0], F[:, 1], *q)
    return np.stack([X, Y], axis=-1)


def _stack_boxes(top: ComplexBox, bottom: ComplexBox) -> ComplexBox:
    return ComplexBox(RealInterval(np.stack([top.re.lo, bottom.re.lo]), np.stack([top.re.hi, bottom.re.hi])),
                      RealInterval(np.stack([top.im.lo, bottom.im.lo]), np.stack([top.im.hi, bottom.im.hi])))


@dataclass(frozen=True)
class Stencil:
    """Per-step coefficients: ``h1[k]`` and ``h2[k, j]``, ``h3[k, j]`` for j = 0, 1/2, 1."""

    h1: object
    h2: object
    h3: object
    n: int


def build_stencil(path: PolygonalPath, params: SurfaceParams, n: int, mode: str) -> Stencil:
    ts, segs, zs, ws = half_node_sheet(path, params, n)
    step_seg = step_segments(path, n)
    idx = 2 * np.arange(n)[:, None] + np.arange(3)[None, :]
    if mode == "floating":
        vel = np.array([path.velocity(s) for s in range(path.n_segments)])
        h1 = vel[step_seg]
        return Stencil(h1, h1[:, None] / ws[idx], -h1[:, None] * ws[idx], n)
    zbox = path.z_box(ts, segs)
    wbox = enclose_sheet(zbox, params.a, ws)
    vb = [path.velocity_box(s) for s in range(path.n_segments)]
    h1 = ComplexBox(RealInterval(np.array([vb[s].re.lo for s in step_seg]),
                                 np.array([vb[s].re.hi for s in step_seg])),
                    RealInterval(np.array([vb[s].im.lo for s in step_seg]),
                                 np.array([vb[s].im.hi for s in step_seg])))
    w = wbox[idx]
    h1col = h1[:, None]
    return Stencil(h1, h1col / w, -(h1col * w), n)


def _run(stencil: Stencil, cs: np.ndarray, mode: str):
    n = stencil.n
    m = len(cs)
    if mode == "floating":
        s = cs / n
        X = np.zeros((2, m), dtype=complex)
        Y = np.zeros((2, m), dtype=complex)
        X[0] = 1.0
        Y[1] = 1.0
        for k in range(n):
            q1 = s * stencil.h1[k]
            q2 = [s * v for v in stencil.h2[k]]
            q3 = [s * v for v in stencil.h3[k]]
            q1t = (q1, q1, q1)
            q4t = (-q1, -q1, -q1)
            X, Y = _rk4_rows(X, Y, q1t, q2, q3, q4t)
        out = np.empty((m, 2, 2), dtype=complex)
        out[:, 0, 0], out[:, 1, 0] = X[0], X[1]
        out[:, 0, 1], out[:, 1, 1] = Y[0], Y[1]
        return out
    s = RealInterval.point(np.asarray(cs, dtype=float)) * RealInterval.from_exact(Fraction(1, n))
    zeros = np.zeros((2, m))
    e0 = np.zeros((2, m))
    e0[0] = 1.0
    e1 = np.zeros((2, m))
    e1[1] = 1.0
    X = ComplexBox(RealInterval.point(e0), RealInterval.point(zeros))
    Y = ComplexBox(RealInterval.point(e1), RealInterval.point(zeros))
    for k in range(n):
        q1 = stencil.h1[k] * s
        q4 = -q1
        h2k = stencil.h2[k]
        h3k = stencil.h3[k]
        q2 = [h2k[j] * s for j in range(3)]
        q3 = [h3k[j] * s for j in range(3)]
        X, Y = _rk4_rows(X, Y, (q1, q1, q1), q2, q3, (q4, q4, q4))
    return MatrixEnclosure(X[0], Y[0], X[1], Y[1])


def worker_count() -> int:
    try:
        return max(1, int(os.environ.get("BRYANT_THREADS", "1")))
    except ValueError:
        return 1


def _concat(parts: Sequence[MatrixEnclosure]) -> MatrixEnclosure:
    def cat(boxes):
        return ComplexBox(RealInterval(np.concatenate([b.re.lo for b in boxes]),
                                       np.concatenate([b.re.hi for b in boxes])),
                          RealInterval(np.concatenate([b.im.lo for b in boxes]),
                                       np.concatenate([b.im.hi for b in boxes])))
    return MatrixEnclosure(*(cat([p.entries[i] for p in parts]) for i in range(4)))


def integrate_batch(path: PolygonalPath, a: float, cs: Sequence[float], cfg: IntegrationConfig,
                    stencil: Stencil | None = None):
    """Integrate from ``F = I`` to the path end for every c in ``cs``.

    Interval mode returns a batched ``MatrixEnclosure``; floating mode an
    ndarray of shape ``(len(cs), 2, 2)``.
    """
    params = SurfaceParams(a)
    cfg.validate(path, max(cs) if len(cs) else 0.0)
    cs = np.asarray(cs, dtype=float)
    if stencil is None:
        stencil = build_stencil(path, params, cfg.n, cfg.mode)
    workers = min(worker_count(), len(cs))
    if workers <= 1:
        return _run(stencil, cs, cfg.mode)
    chunks = np.array_split(cs, workers)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(lambda ch: _run(stencil, ch, cfg.mode), chunks))
    if cfg.mode == "floating":
        return np.concatenate(parts)
    return _concat(parts)


def integrate_path(path: PolygonalPath, params: SurfaceParams, cfg: IntegrationConfig = IntegrationConfig(),
                   bounds: CoefficientBounds | None = None) -> MatrixEnclosure:
    """Endpoint value of the RK4 solution started at the identity.

    Interval mode encloses the exact-arithmetic RK4 output (rounding only;
    discretisation error is accounted for separately).  Floating mode
    returns a point enclosure of the floating result.
    """
    cfg.validate(path, params.c, bounds)
    out = integrate_batch(path, params.a, [params.c], cfg)
    if cfg.mode == "floating":
        return MatrixEnclosure.from_matrix(out[0])
    return out[0]


def integrate_reference(path: PolygonalPath, params: SurfaceParams, n_ref: int) -> np.ndarray:
    """Plain floating RK4 at resolution ``n_ref``; the fine-grid oracle."""
    return integrate_batch(path, params.a, [params.c], IntegrationConfig(n_ref, "floating"))[0]
