"""Surface sampling for preset Weierstrass data and OBJ export.

Hyperbolic presets integrate ``F^{-1} dF = k (g, -g^2; 1, -g) f dz`` with
floating RK4 from ``F = I`` at a base point, then map
``Phi = (1/k) F^{-1} conj(F^{-1})^t`` through the Minkowski model into the
unit Poincare ball.  Euclidean presets evaluate the minimal-surface
Weierstrass integral by Gauss-Legendre quadrature.
"""
from __future__ import annotations

import os
import tempfile
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import GridSingularity, NonUnimodular
from .integrator import worker_count
from .surface import continue_along

PRESET_NAMES = ("horosphere", "enneper_cousin", "catenoid_cousin", "genus1_catenoid",
                "euclidean_minimal_catenoid", "euclidean_enneper")
EUCLIDEAN = ("euclidean_minimal_catenoid", "euclidean_enneper")
DET_TOL = 1e-8
PUNCTURE_TOL = 1e-9


@dataclass(frozen=True)
class WeierstrassPreset:
    """Named Weierstrass data.

    ``lam`` scales ``f`` (ignored by the genus-one preset, whose ``f`` is
    ``c/w``), ``a`` is the genus-one surface parameter and ``c`` the
    curvature scale of the ambient space.
    """

    name: str
    lam: float = 1.0
    a: float = 1.78
    c: float = 1.0

    def __post_init__(self):
        if self.name not in PRESET_NAMES:
            raise ValueError(f"unknown preset {self.name!r}; choose from {PRESET_NAMES}")
        if self.name == "genus1_catenoid" and not self.a > 1:
            raise ValueError("genus1_catenoid needs a > 1")
        if not self.c > 0:
            raise ValueError("c must be positive")

    @property
    def euclidean(self) -> bool:
        return self.name in EUCLIDEAN

    @property
    def kappa(self) -> float:
        """Factor in front of the ODE matrix (and ``1/kappa`` in ``Phi``)."""
        return 1.0 if self.name == "genus1_catenoid" else self.c

    @property
    def punctures(self) -> tuple[complex, ...]:
        if self.name in ("catenoid_cousin", "euclidean_minimal_catenoid"):
            return (0j,)
        if self.name == "genus1_catenoid":
            return (1 + 0j, -1 + 0j, self.a + 0j, -self.a + 0j)
        return ()

    @property
    def base_point(self) -> complex:
        return 1 + 0j if self.name in ("catenoid_cousin", "euclidean_minimal_catenoid") else 0j

    def gf(self, z, w=None):
        """``(g, f)`` at ``z`` (``w`` is the sheet value for the genus-one preset)."""
        z = np.asarray(z, dtype=complex)
        one = np.ones_like(z)
        if self.name == "horosphere":
            return one, self.lam * one
        if self.name in ("enneper_cousin", "euclidean_enneper"):
            return z, self.lam * one
        if self.name in ("catenoid_cousin", "euclidean_minimal_catenoid"):
            return z, self.lam / z ** 2
        return w, self.c / w

    def default_domain(self):
        """``('rect', re0, re1, im0, im1)`` or ``('annulus', r0, r1, th0, th1)``."""
        if self.name in ("catenoid_cousin", "euclidean_minimal_catenoid"):
            return ("annulus", 0.5, 2.0, 0.0, 2 * np.pi)
        if self.name == "genus1_catenoid":
            return ("rect", -3.0, 3.0, 0.1, 2.0)
        return ("rect", -1.0, 1.0, -1.0, 1.0)


def preset(name: str, lam: float | None = None, a: float | None = None, c: float | None = None):
    """Preset with per-name defaults (genus one uses ``c = 0.05``)."""
    kw = {"name": name}
    if lam is not None:
        kw["lam"] = lam
    if a is not None:
        kw["a"] = a
    if c is not None:
        kw["c"] = c
    elif name == "genus1_catenoid":
        kw["c"] = 0.05
    return WeierstrassPreset(**kw)


@dataclass(frozen=True)
class HyperbolicPoint:
    minkowski: tuple[float, float, float, float]
    poincare: tuple[float, float, float]


def hermitean_to_minkowski(phi: np.ndarray) -> np.ndarray:
    """``(t, x1, x2, x3)`` from ``(t + x3, x1 + i x2; x1 - i x2, t - x3)``."""
    p11, p22, p12 = phi[..., 0, 0].real, phi[..., 1, 1].real, phi[..., 0, 1]
    return np.stack([(p11 + p22) / 2, p12.real, p12.imag, (p11 - p22) / 2], axis=-1)


def minkowski_to_poincare(m: np.ndarray, c: float = 1.0) -> np.ndarray:
    """Unit-ball point after contracting ``H^3(-c^2)`` by ``c``."""
    m = np.asarray(m, dtype=float)
    return c * m[..., 1:] / (1.0 + c * m[..., :1])


def quadric_residual(m: np.ndarray, c: float = 1.0) -> np.ndarray:
    """``|sum x^2 - t^2 + 1/c^2|`` in unit-curvature coordinates (i.e. times ``c^2``)."""
    u = c * np.asarray(m, dtype=float)
    return np.abs(np.sum(u[..., 1:] ** 2, axis=-1) - u[..., 0] ** 2 + 1.0)


def _immersion(F: np.ndarray, c: float) -> np.ndarray:
    F = np.asarray(F, dtype=complex)
    det = F[..., 0, 0] * F[..., 1, 1] - F[..., 0, 1] * F[..., 1, 0]
    dev = np.max(np.abs(det - 1)) if det.size else 0.0
    if not dev <= DET_TOL:
        raise NonUnimodular(f"det F deviates from 1 by {dev:.3g}")
    inv = np.empty_like(F)
    inv[..., 0, 0], inv[..., 1, 1] = F[..., 1, 1], F[..., 0, 0]
    inv[..., 0, 1], inv[..., 1, 0] = -F[..., 0, 1], -F[..., 1, 0]
    inv /= det[..., None, None]
    phi = inv @ np.conj(np.swapaxes(inv, -1, -2)) / c
    return hermitean_to_minkowski(phi)


def immersion_point(F, c: float = 1.0) -> HyperbolicPoint:
    """Point of ``Phi = (1/c) F^{-1} conj(F^{-1})^t`` in both models."""
    m = _immersion(F, c)
    p = minkowski_to_poincare(m, c)
    return HyperbolicPoint(tuple(float(v) for v in m), tuple(float(v) for v in p))


# ---------------------------------------------------------------- integration

Leg = Callable[[np.ndarray], tuple[np.ndarray, np.ndarray]]


def _line(z0, z1) -> Leg:
    z0, z1 = np.asarray(z0, dtype=complex), np.asarray(z1, dtype=complex)
    return lambda s: (z0 + s * (z1 - z0), z1 - z0)


def _arc(r, th0, th1) -> Leg:
    r, th0, th1 = (np.asarray(v, dtype=float) for v in (r, th0, th1))

    def leg(s):
        z = r * np.exp(1j * (th0 + s * (th1 - th0)))
        return z, 1j * (th1 - th0) * z
    return leg


def _check_punctures(zs: np.ndarray, punctures) -> None:
    for p in punctures:
        d = np.min(np.abs(zs - p))
        if d < PUNCTURE_TOL:
            raise GridSingularity(f"grid path passes within {d:.3g} of the puncture {p}")


def _rk4_legs(preset_: WeierstrassPreset, legs: list[Leg], steps: int, w0: complex = 1 + 0j):
    """Integrate ``F`` from the identity along consecutive legs for a batch of rays."""
    k = preset_.kappa
    F = None
    w_end = None
    for leg in legs:
        s = np.arange(2 * steps + 1) / (2 * steps)
        z, dz = leg(s[:, None])
        z = np.broadcast_to(z, np.broadcast_shapes(z.shape, np.shape(dz))).copy()
        dz = np.broadcast_to(dz, z.shape)
        _check_punctures(z, preset_.punctures)
        if preset_.name == "genus1_catenoid":
            start = w0 if w_end is None else w_end
            starts = np.broadcast_to(start, z.shape[1:])
            w = np.stack([continue_along(z[:, j], preset_.a, starts[j]) for j in range(z.shape[1])],
                         axis=1)
            w_end = w[-1]
        else:
            w = None
        g, f = preset_.gf(z, w)
        scale = k * f * dz / steps
        # right-hand side F' = F G with G = scale * (g, -g^2; 1, -g)
        G = np.empty(z.shape + (2, 2), dtype=complex)
        G[..., 0, 0], G[..., 0, 1] = g * scale, -g * g * scale
        G[..., 1, 0], G[..., 1, 1] = scale, -g * scale
        if F is None:
            F = np.broadcast_to(np.eye(2, dtype=complex), z.shape[1:] + (2, 2)).copy()
        for i in range(steps):
            G0, Gh, G1 = G[2 * i], G[2 * i + 1], G[2 * i + 2]
            k1 = F @ G0
            k2 = (F + k1 / 2) @ Gh
            k3 = (F + k2 / 2) @ Gh
            k4 = (F + k3) @ G1
            F = F + (k1 + 2 * k2 + 2 * k3 + k4) / 6
    return F


def _minimal_legs(preset_: WeierstrassPreset, legs: list[Leg], nodes: int):
    x, wts = np.polynomial.legendre.leggauss(nodes)
    s = (x + 1) / 2
    out = 0
    for leg in legs:
        z, dz = leg(s[:, None])
        z = np.broadcast_to(z, np.broadcast_shapes(z.shape, np.shape(dz)))
        _check_punctures(z, preset_.punctures)
        g, f = preset_.gf(z)
        vec = np.stack([(1 - g * g) * f, 1j * (1 + g * g) * f, 2 * g * f], axis=-1)
        out = out + np.einsum("i,ij...->j...", wts / 2, vec * np.asarray(dz)[..., None])
    return np.real(out)


def minimal_point(g: Callable, f: Callable, path, nodes: int = 24, panels: int = 8) -> np.ndarray:
    """``Re int ((1 - g^2) f, i (1 + g^2) f, 2 g f) dz`` along a polyline ``path``.

    Composite Gauss-Legendre with ``panels`` panels of ``nodes`` points per segment.
    """
    pts = np.asarray(path, dtype=complex)
    x, wts = np.polynomial.legendre.leggauss(nodes)
    total = np.zeros(3, dtype=complex)
    for z0, z1 in zip(pts[:-1], pts[1:]):
        for p in range(panels):
            a0 = z0 + (z1 - z0) * p / panels
            a1 = z0 + (z1 - z0) * (p + 1) / panels
            z = a0 + (a1 - a0) * (x + 1) / 2
            gz, fz = np.asarray(g(z), dtype=complex), np.asarray(f(z), dtype=complex)
            vec = np.stack([(1 - gz ** 2) * fz, 1j * (1 + gz ** 2) * fz, 2 * gz * fz])
            total += vec @ wts * (a1 - a0) / 2
    return total.real


# ----------------------------------------------------------------------- mesh

@dataclass
class Mesh:
    """Quad mesh; ``vertices`` are Poincare-ball (hyperbolic) or R^3 (Euclidean) points."""

    preset: WeierstrassPreset
    vertices: np.ndarray
    quads: np.ndarray
    minkowski: np.ndarray | None = field(default=None, repr=False)

    @property
    def max_quadric_residual(self) -> float:
        if self.minkowski is None:
            return 0.0
        return float(np.max(quadric_residual(self.minkowski, self.preset.kappa)))

    @property
    def max_radius(self) -> float:
        return float(np.max(np.linalg.norm(self.vertices, axis=1)))


def _grid_quads(nu: int, nv: int) -> np.ndarray:
    idx = np.arange(nu * nv).reshape(nv, nu)
    return np.stack([idx[:-1, :-1], idx[:-1, 1:], idx[1:, 1:], idx[1:, :-1]], axis=-1).reshape(-1, 4)


def _ray_legs(preset_: WeierstrassPreset, domain, nu: int, nv: int):
    """Nodes in row-major order and the legs from the base point to each node."""
    kind, p0, p1, q0, q1 = domain
    u = np.linspace(p0, p1, nu)
    v = np.linspace(q0, q1, nv)
    U, V = np.meshgrid(u, v)
    U, V = U.ravel(), V.ravel()
    b = preset_.base_point
    if kind == "rect":
        nodes = U + 1j * V
        return nodes, lambda sel: [_line(b, nodes[sel])]
    if kind == "annulus":
        if b != 1:
            raise ValueError("annular grids start at z = 1")
        nodes = U * np.exp(1j * V)
        return nodes, lambda sel: [_line(b, U[sel] + 0j), _arc(U[sel], 0.0, V[sel])]
    raise ValueError(f"unknown domain kind {kind!r}")


def sample_surface(preset_: WeierstrassPreset, grid: tuple[int, int] = (24, 16), domain=None,
                   steps: int = 200) -> Mesh:
    """Sample the preset on an ``nu x nv`` grid; each vertex has its own ray from the base point."""
    nu, nv = grid
    if nu < 2 or nv < 2:
        raise ValueError("grid needs at least 2 x 2 nodes")
    domain = preset_.default_domain() if domain is None else domain
    nodes, legs_for = _ray_legs(preset_, domain, nu, nv)
    _check_punctures(nodes, preset_.punctures)
    chunks = np.array_split(np.arange(nodes.size), max(1, min(worker_count(), nodes.size)))

    if preset_.euclidean:
        def run(sel):
            return _minimal_legs(preset_, legs_for(sel), 24)
    else:
        def run(sel):
            return _immersion(_rk4_legs(preset_, legs_for(sel), steps), preset_.kappa)
    if len(chunks) == 1:
        parts = [run(chunks[0])]
    else:
        with ThreadPoolExecutor(max_workers=len(chunks)) as pool:
            parts = list(pool.map(run, chunks))
    pts = np.concatenate(parts)
    quads = _grid_quads(nu, nv)
    if preset_.euclidean:
        return Mesh(preset_, pts, quads)
    return Mesh(preset_, minkowski_to_poincare(pts, preset_.kappa), quads, pts)


def format_obj(mesh: Mesh) -> str:
    if len(mesh.vertices) == 0 or len(mesh.quads) == 0:
        raise ValueError("mesh is empty")
    lines = [f"# {mesh.preset.name}"]
    lines += [f"v {x:.9g} {y:.9g} {z:.9g}" for x, y, z in mesh.vertices]
    lines += ["f " + " ".join(str(int(i) + 1) for i in q) for q in mesh.quads]
    return "\n".join(lines) + "\n"


def atomic_write(path, text: str) -> None:
    """Write ``text`` to ``path`` through a temporary file and rename."""
    path = os.fspath(path)
    fd, tmp = tempfile.mkstemp(dir=os.path.dirname(os.path.abspath(path)), prefix=".tmp-")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def export_obj(mesh: Mesh, path) -> None:
    atomic_write(path, format_obj(mesh))


def read_obj(path) -> tuple[np.ndarray, np.ndarray]:
    """Vertices and (0-based) faces of an OBJ file."""
    verts, faces = [], []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            parts = line.split()
            if not parts:
                continue
            if parts[0] == "v":
                verts.append([float(p) for p in parts[1:4]])
            elif parts[0] == "f":
                faces.append([int(p.split("/")[0]) - 1 for p in parts[1:]])
    return np.array(verts), np.array(faces, dtype=int)
