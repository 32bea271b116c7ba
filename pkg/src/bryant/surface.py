"""The twice-punctured torus ``(z-1)(z+a) w^2 = (z+1)(z-a)`` and its paths.

The Gauss map is ``g = w``.  Along a polygonal path in the z-plane the
sheet of ``w`` is tracked by analytic continuation (nearest root), and the
linear system for the rows of ``F`` has coefficients

    h1 = dz/dt,  h2 = h1 / g,  h3 = -h1 * g,  h4 = -h1

which are constant (h1, h4) or smooth (h2, h3) on each segment.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .errors import (
    BranchAmbiguity,
    BranchPointHit,
    SubdivisionLimitExceeded,
)
from .interval import ComplexBox, RealInterval

BRANCH_TOL = 1e-12
# nearest root must be at least this many times closer than the other one
SHEET_SEPARATION = 10.0


@dataclass(frozen=True)
class SurfaceParams:
    a: float
    c: float = 0.0

    def __post_init__(self):
        if not self.a > 1.0:
            raise ValueError(f"branch parameter a must exceed 1, got {self.a}")
        if not self.c >= 0.0:
            raise ValueError(f"c must be nonnegative, got {self.c}")

    @property
    def branch_points(self) -> tuple[float, float, float, float]:
        return (1.0, -1.0, self.a, -self.a)


@dataclass(frozen=True)
class SurfacePoint:
    z: complex
    w: complex

    def residual(self, a: float) -> float:
        z, w = self.z, self.w
        return abs((z - 1) * (z + a) * w * w - (z + 1) * (z - a))

    def on_surface(self, a: float, tol: float = 1e-12) -> bool:
        return self.residual(a) <= tol * (1 + abs(self.z) ** 4)


def _as_fraction(t) -> Fraction:
    if isinstance(t, float):
        # decimal reading of the float, so 0.67 means 67/100
        return Fraction(repr(t))
    return Fraction(t)


@dataclass(frozen=True)
class PolygonalPath:
    """Polygonal z-path; ``t`` is linear in ``z`` on each segment.

    ``t_breaks`` are exact rationals so that step grids can be checked to
    land on them exactly.
    """

    vertices: tuple[complex, ...]
    t_breaks: tuple[Fraction, ...]
    base_sheet: int = 1
    name: str = field(default="", compare=False)

    def __post_init__(self):
        verts = tuple(complex(v) for v in self.vertices)
        breaks = tuple(_as_fraction(t) for t in self.t_breaks)
        object.__setattr__(self, "vertices", verts)
        object.__setattr__(self, "t_breaks", breaks)
        if len(verts) < 2 or len(verts) != len(breaks):
            raise ValueError("need at least two vertices and one t-break per vertex")
        if breaks[0] != 0 or breaks[-1] != 1:
            raise ValueError("t_breaks must run from 0 to 1")
        if any(b1 <= b0 for b0, b1 in zip(breaks, breaks[1:])):
            raise ValueError("t_breaks must be strictly increasing")
        if self.base_sheet not in (1, -1):
            raise ValueError("base_sheet must be +1 or -1")

    @property
    def n_segments(self) -> int:
        return len(self.vertices) - 1

    def segment_of(self, t) -> int:
        """Index of the segment containing ``t`` (right-closed except at 0)."""
        for i in range(self.n_segments):
            if t <= self.t_breaks[i + 1]:
                return i
        return self.n_segments - 1

    def velocity(self, segment: int) -> complex:
        """``dz/dt`` on a segment, i.e. ``h1``, rounded to nearest."""
        z0, z1 = self.vertices[segment], self.vertices[segment + 1]
        return (z1 - z0) / float(self.t_breaks[segment + 1] - self.t_breaks[segment])

    def velocity_box(self, segment: int) -> ComplexBox:
        z0, z1 = self.vertices[segment], self.vertices[segment + 1]
        span = RealInterval.from_exact(self.t_breaks[segment + 1] - self.t_breaks[segment])
        return (ComplexBox.point(z1) - ComplexBox.point(z0)) / span

    def z_at(self, t, segment: int | None = None) -> complex:
        if segment is None:
            segment = self.segment_of(t)
        t0, t1 = self.t_breaks[segment], self.t_breaks[segment + 1]
        lam = float((_as_fraction(t) - t0) / (t1 - t0))
        z0, z1 = self.vertices[segment], self.vertices[segment + 1]
        return z0 + lam * (z1 - z0)

    def z_box(self, ts: Sequence[Fraction], segments: Sequence[int]) -> ComplexBox:
        """Enclosures of ``z(t)`` at exact parameters ``ts`` (vectorised)."""
        lam_lo = np.empty(len(ts))
        lam_hi = np.empty(len(ts))
        z0 = np.empty(len(ts), dtype=complex)
        dz = np.empty(len(ts), dtype=complex)
        for k, (t, s) in enumerate(zip(ts, segments)):
            t0, t1 = self.t_breaks[s], self.t_breaks[s + 1]
            lam = RealInterval.from_exact((t - t0) / (t1 - t0))
            lam_lo[k], lam_hi[k] = lam.lo, lam.hi
            z0[k] = self.vertices[s]
            dz[k] = self.vertices[s + 1] - self.vertices[s]
        lam = RealInterval(lam_lo, lam_hi)
        z1 = ComplexBox.point(z0 + dz)
        diff = z1 - ComplexBox.point(z0)
        return ComplexBox.point(z0) + diff * lam

    def mirrored(self, i: int) -> "PolygonalPath":
        """Image of the path under the surface symmetry ``phi_i``.

        phi_1 conjugates, phi_2 negates z (w -> 1/w keeps the base sheet at
        z = 0), phi_3 does both, phi_4 conjugates and flips the sheet.
        """
        verts = self.vertices
        sheet = self.base_sheet
        if i == 1:
            verts = tuple(v.conjugate() for v in verts)
        elif i == 2:
            verts = tuple(-v for v in verts)
        elif i == 3:
            verts = tuple(-v.conjugate() for v in verts)
        elif i == 4:
            verts = tuple(v.conjugate() for v in verts)
            sheet = -sheet
        else:
            raise ValueError(f"no symmetry phi_{i}")
        return PolygonalPath(verts, self.t_breaks, sheet, name=f"phi{i}({self.name})")


def alpha1(a: float) -> PolygonalPath:
    """First-quadrant path from (0, 1) to z = (1 + a)/2, between 1 and a."""
    return PolygonalPath((0.0, 1 + 0.4j, (1 + a) / 2),
                         (Fraction(0), Fraction("0.67"), Fraction(1)), name="alpha1")


def alpha2(a: float) -> PolygonalPath:
    """First-quadrant path from (0, 1) to z = a + 1/2, beyond a."""
    return PolygonalPath((0.0, complex(a + 0.2, 0.7), a + 0.5),
                         (Fraction(0), Fraction("0.686"), Fraction(1)), name="alpha2")


PATH_PRESETS: dict[str, Callable[[float], PolygonalPath]] = {
    "alpha1": alpha1,
    "alpha2": alpha2,
}


@dataclass(frozen=True)
class CoefficientBounds:
    """Upper bounds on ``|h_i|`` and its first three t-derivatives."""

    M: float
    M1: float
    M2: float
    M3: float

    def __post_init__(self):
        if min(self.M, self.M1, self.M2, self.M3) < 0:
            raise ValueError("coefficient bounds must be nonnegative")

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.M, self.M1, self.M2, self.M3)

    def dominates(self, other: "CoefficientBounds") -> bool:
        return all(x >= y for x, y in zip(self.as_tuple(), other.as_tuple()))

    @classmethod
    def worst(cls, *bounds: "CoefficientBounds") -> "CoefficientBounds":
        return cls(*np.max([b.as_tuple() for b in bounds], axis=0).tolist())


# Published hand-derived bounds for a = 1.78, valid on both alpha paths.
REFERENCE_BOUNDS = CoefficientBounds(4.6, 48.0, 850.0, 25000.0)


def w_squared(z, a: float):
    return (z + 1) * (z - a) / ((z - 1) * (z + a))


def _check_branch(z, a: float) -> None:
    for p in (1.0, -1.0, a, -a):
        if np.any(np.abs(np.asarray(z) - p) < BRANCH_TOL):
            raise BranchPointHit(f"z = {z} is at branch point {p}")


def nearest_root(w2, w_prev):
    """Root of ``w^2 = w2`` nearest ``w_prev`` (vectorised), with separation check."""
    r = np.sqrt(np.asarray(w2, dtype=complex))
    d_plus = np.abs(r - w_prev)
    d_minus = np.abs(r + w_prev)
    near = np.minimum(d_plus, d_minus)
    far = np.maximum(d_plus, d_minus)
    if np.any(far < SHEET_SEPARATION * near):
        raise BranchAmbiguity("continuation step too coarse: roots not separated")
    return np.where(d_minus < d_plus, -r, r)


def base_value(path: PolygonalPath, params: SurfaceParams) -> complex:
    z0 = path.vertices[0]
    _check_branch(z0, params.a)
    return path.base_sheet * complex(np.sqrt(complex(w_squared(z0, params.a))))


def gauss_map_continue(path: PolygonalPath, params: SurfaceParams, t, w_prev: complex) -> complex:
    """Continue ``g = w`` to ``z(t)``: the root nearest ``w_prev``."""
    if not 0 <= t <= 1:
        raise ValueError(f"t = {t} outside [0, 1]")
    z = path.z_at(t)
    _check_branch(z, params.a)
    return complex(nearest_root(w_squared(z, params.a), w_prev))


def continue_along(zs: np.ndarray, a: float, w0: complex) -> np.ndarray:
    """Sheet values at consecutive points ``zs`` starting from root ``w0`` at ``zs[0]``.

    Sign selection is vectorised: each principal root is compared with its
    predecessor and the accumulated sign flips are a cumulative product.
    """
    zs = np.asarray(zs, dtype=complex)
    _check_branch(zs, a)
    r = np.sqrt(w_squared(zs, a).astype(complex))
    d_same = np.abs(r[1:] - r[:-1])
    d_flip = np.abs(r[1:] + r[:-1])
    if np.any(np.maximum(d_same, d_flip) < SHEET_SEPARATION * np.minimum(d_same, d_flip)):
        raise BranchAmbiguity("continuation step too coarse: roots not separated")
    step_sign = np.where(d_flip < d_same, -1.0, 1.0)
    sign0 = -1.0 if abs(r[0] + w0) < abs(r[0] - w0) else 1.0
    signs = sign0 * np.concatenate(([1.0], np.cumprod(step_sign)))
    return signs * r


def half_node_sheet(path: PolygonalPath, params: SurfaceParams, n: int):
    """Exact parameters, segment indices, z and continued w at ``t = j/(2n)``.

    Node ``2k`` is attributed to the segment of step ``k`` so the last node
    of a segment and the first node of the next share one z value.
    """
    check_grid(path, n)
    ts = [Fraction(j, 2 * n) for j in range(2 * n + 1)]
    step_seg = step_segments(path, n)
    segs = [int(step_seg[min(j // 2, n - 1)]) for j in range(2 * n + 1)]
    zs = np.array([path.z_at(t, s) for t, s in zip(ts, segs)])
    ws = continue_along(zs, params.a, base_value(path, params))
    return ts, segs, zs, ws


def step_segments(path: PolygonalPath, n: int) -> np.ndarray:
    """Segment index for each of the ``n`` equal steps."""
    seg = np.empty(n, dtype=int)
    for k in range(n):
        seg[k] = path.segment_of(Fraction(2 * k + 1, 2 * n))
    return seg


def check_grid(path: PolygonalPath, n: int) -> None:
    for tb in path.t_breaks:
        if (tb * n).denominator != 1:
            raise ValueError(f"t-break {tb} is not on the 1/{n} step grid")


def enclose_sheet(zbox: ComplexBox, a: float, hints: np.ndarray) -> ComplexBox:
    """Rigorous enclosure of the root of ``w^2(z)`` nearest each hint."""
    A = ComplexBox.point(a)
    w2 = (zbox + 1.0) * (zbox - A) / ((zbox - 1.0) * (zbox + A))
    return w2.sqrt(hints)


class SheetTracker:
    """Floating evaluation of ``w(t)`` along a path from a fine cached grid."""

    def __init__(self, path: PolygonalPath, params: SurfaceParams, resolution: int = 4000):
        self.path = path
        self.params = params
        self.resolution = resolution
        self._ts = np.linspace(0.0, 1.0, resolution + 1)
        zs = np.array([path.z_at(Fraction(k, resolution)) for k in range(resolution + 1)])
        self._ws = continue_along(zs, params.a, base_value(path, params))

    def __call__(self, t: float) -> complex:
        k = int(np.clip(np.floor(t * self.resolution), 0, self.resolution))
        return gauss_map_continue(self.path, self.params, t, self._ws[k])


def h_coefficients(path: PolygonalPath, params: SurfaceParams, segment: int,
                   tracker: SheetTracker | None = None):
    """``(h1, h2, h3, h4)`` as functions of t on one segment (floating)."""
    if not 0 <= segment < path.n_segments:
        raise IndexError(f"segment {segment} out of range")
    tracker = tracker or SheetTracker(path, params)
    v = path.velocity(segment)

    def h1(t):
        return v

    def h2(t):
        return v / tracker(t)

    def h3(t):
        return -v * tracker(t)

    def h4(t):
        return -v

    return h1, h2, h3, h4


def _log_derivatives(z: ComplexBox, a: float):
    """Enclosures of ``L = g'/g`` and its first two z-derivatives.

    ``2 L = 1/(z+1) + 1/(z-a) - 1/(z-1) - 1/(z+a)``.
    """
    terms = ((-1.0, 1.0), (a, 1.0), (1.0, -1.0), (-a, -1.0))
    L = L1 = L2 = None
    for p, sgn in terms:
        inv = 1.0 / (z - p)
        inv2 = inv * inv
        inv3 = inv2 * inv
        t0, t1, t2 = inv * (0.5 * sgn), inv2 * (-0.5 * sgn), inv3 * sgn
        L = t0 if L is None else L + t0
        L1 = t1 if L1 is None else L1 + t1
        L2 = t2 if L2 is None else L2 + t2
    return L, L1, L2


def _piece_bounds(z0: complex, dz: ComplexBox, lam: RealInterval, a: float, speed: float):
    """Bounds (|h2|,|h3|, 1st, 2nd, 3rd derivative maxima) for z-pieces.

    Returns an array of shape (npieces, 4); pieces whose box touches a
    branch point get ``inf``.
    """
    z = ComplexBox.point(z0) + dz * lam
    near = np.zeros(z.shape, dtype=bool)
    for p in (1.0, -1.0, a, -a):
        near |= (z - p).mig() <= 0.0
    if np.any(near):
        # park offending pieces at a harmless point; their bounds become inf below
        z = ComplexBox(RealInterval(np.where(near, 0.0, z.re.lo), np.where(near, 0.0, z.re.hi)),
                       RealInterval(np.where(near, 0.5, z.im.lo), np.where(near, 0.5, z.im.hi)))
    A = ComplexBox.point(a)
    w2 = (z + 1.0) * (z - A) / ((z - 1.0) * (z + A))
    g_hi = np.sqrt(w2.mag()) * (1 + 1e-15)
    ginv_hi = np.sqrt(1.0 / w2.mig()) * (1 + 1e-15)
    L, L1, L2 = _log_derivatives(z, a)
    LL = L * L
    out = np.zeros(z.shape + (4,))
    h_hi = speed
    out[..., 0] = h_hi * np.maximum(g_hi, ginv_hi)
    for s, u_hi in ((1.0, g_hi), (-1.0, ginv_hi)):
        d1 = L.mag() * u_hi
        d2 = (L1 * s + LL).mag() * u_hi
        d3 = (L2 * s + L * L1 * 3.0 + LL * L * s).mag() * u_hi
        out[..., 1] = np.maximum(out[..., 1], h_hi ** 2 * d1)
        out[..., 2] = np.maximum(out[..., 2], h_hi ** 3 * d2)
        out[..., 3] = np.maximum(out[..., 3], h_hi ** 4 * d3)
    out[near] = np.inf
    # absorb the float rounding in the products above
    return np.nextafter(out * (1 + 1e-13), np.inf)


def _point_values(z0: complex, dz: complex, lam: np.ndarray, a: float, speed: float):
    """Floating values of the same four quantities at sample points (lower estimate)."""
    z = z0 + dz * lam
    w = np.sqrt(w_squared(z, a).astype(complex))
    L = 0.5 * (1 / (z + 1) + 1 / (z - a) - 1 / (z - 1) - 1 / (z + a))
    L1 = -0.5 * (1 / (z + 1) ** 2 + 1 / (z - a) ** 2 - 1 / (z - 1) ** 2 - 1 / (z + a) ** 2)
    L2 = 1 / (z + 1) ** 3 + 1 / (z - a) ** 3 - 1 / (z - 1) ** 3 - 1 / (z + a) ** 3
    out = np.zeros(z.shape + (4,))
    out[..., 0] = speed * np.maximum(np.abs(w), 1 / np.abs(w))
    for s in (1.0, -1.0):
        u = w ** s
        out[..., 1] = np.maximum(out[..., 1], speed ** 2 * np.abs(s * L * u))
        out[..., 2] = np.maximum(out[..., 2], speed ** 3 * np.abs((s * L1 + L * L) * u))
        out[..., 3] = np.maximum(out[..., 3],
                                 speed ** 4 * np.abs((s * L2 + 3 * L * L1 + s * L ** 3) * u))
    return out


def compute_h_bounds(path: PolygonalPath, params: SurfaceParams, *,
                     initial_pieces: int = 64, rel_improvement: float = 0.01,
                     max_pieces: int = 1 << 20) -> CoefficientBounds:
    """Rigorous ``(M, M1, M2, M3)`` along a path by adaptive interval subdivision.

    Derivatives of ``g^{+-1}`` use the closed-form logarithmic derivative,
    so every piece bound is an interval enclosure rather than a sample.
    Refinement stops once no component improves by ``rel_improvement``.
    """
    a = params.a
    best = np.zeros(4)
    for seg in range(path.n_segments):
        z0 = path.vertices[seg]
        dz = path.vertices[seg + 1] - z0
        dz_box = ComplexBox.point(path.vertices[seg + 1]) - ComplexBox.point(z0)
        if dz == 0:
            continue
        speed = float(path.velocity_box(seg).mag())
        best[0] = max(best[0], speed)
        edges = np.linspace(0.0, 1.0, initial_pieces + 1)
        lo, hi = edges[:-1], edges[1:]
        settled = np.zeros(4)
        lower = np.zeros(4)
        history = []
        while True:
            bounds = _piece_bounds(z0, dz_box, RealInterval(lo, hi), a, speed)
            samples = _point_values(z0, dz, np.concatenate((lo, hi, 0.5 * (lo + hi))), a, speed)
            lower = np.maximum(lower, samples.max(axis=0))
            total = np.maximum(settled, bounds.max(axis=0))
            history.append(total)
            if len(history) > 1 and np.all(np.isfinite(total)) and \
                    np.all(total >= history[-2] * (1 - rel_improvement)):
                break
            keep = np.any(bounds > lower, axis=1)
            if np.any(~keep):
                settled = np.maximum(settled, bounds[~keep].max(axis=0))
            lo, hi = lo[keep], hi[keep]
            mid = 0.5 * (lo + hi)
            lo, hi = np.concatenate((lo, mid)), np.concatenate((mid, hi))
            if len(lo) > max_pieces or len(lo) == 0:
                if len(lo) == 0:
                    break
                raise SubdivisionLimitExceeded(
                    f"h-bounds on segment {seg} of {path.name or 'path'} did not converge")
        seg_bound = np.min(np.array(history), axis=0)
        best = np.maximum(best, seg_bound)
    return CoefficientBounds(*(float(np.nextafter(b, np.inf)) if b > 0 else 0.0 for b in best))


def symmetry_transform(i: int, p: SurfacePoint) -> SurfacePoint:
    """Apply ``phi_i``: (z̄, w̄), (-z, 1/w), (-z̄, 1/w̄), (z̄, -w̄)."""
    z, w = complex(p.z), complex(p.w)
    if i == 1:
        return SurfacePoint(z.conjugate(), w.conjugate())
    if i == 2:
        return SurfacePoint(-z, 1 / w)
    if i == 3:
        return SurfacePoint(-z.conjugate(), 1 / w.conjugate())
    if i == 4:
        return SurfacePoint(z.conjugate(), -w.conjugate())
    raise ValueError(f"no symmetry phi_{i}")
