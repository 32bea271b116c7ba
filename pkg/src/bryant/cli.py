"""Command-line front end: ``certify``, ``sweep``, ``bounds``, ``integrate``, ``mesh``.

Exit status: 0 on success (or a VERIFIED certificate), 2 on a FAILED
certificate, 1 on usage or runtime errors.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict, dataclass
from decimal import Decimal, InvalidOperation

from .errors import BryantError
from .surface import CoefficientBounds, REFERENCE_BOUNDS

EXIT_OK, EXIT_ERROR, EXIT_FAILED = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}")


def parse_decimal(text: str) -> float:
    """Decimal string to the nearest binary64; no locale, no inf/nan."""
    try:
        d = Decimal(text.strip())
    except InvalidOperation:
        raise argparse.ArgumentTypeError(f"not a decimal number: {text!r}") from None
    if not d.is_finite():
        raise argparse.ArgumentTypeError(f"not a finite number: {text!r}")
    return float(d)


def parse_positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be positive: {text!r}")
    return v


def parse_c_grid(text: str) -> list[float]:
    """``start:stop:step`` with both ends included, computed in decimal arithmetic."""
    try:
        start, stop, step = (Decimal(p) for p in text.split(":"))
    except (ValueError, InvalidOperation):
        raise argparse.ArgumentTypeError(f"grid must be start:stop:step, got {text!r}") from None
    if not (step > 0 and stop >= start):
        raise argparse.ArgumentTypeError("grid needs step > 0 and stop >= start")
    count = (stop - start) / step
    if count != count.to_integral_value():
        raise argparse.ArgumentTypeError("(stop - start) must be a multiple of step")
    return [float(start + k * step) for k in range(int(count) + 1)]


def parse_mesh_grid(text: str) -> tuple[int, int]:
    try:
        nu, nv = (int(p) for p in text.lower().split("x"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"grid must be NxM, got {text!r}") from None
    if nu < 2 or nv < 2:
        raise argparse.ArgumentTypeError("grid needs at least 2x2 nodes")
    return nu, nv


def parse_bounds(text: str) -> CoefficientBounds:
    if text == "reference":
        return REFERENCE_BOUNDS
    parts = text.split(",")
    if len(parts) != 4:
        raise argparse.ArgumentTypeError("bounds must be 'reference' or M,M1,M2,M3")
    return CoefficientBounds(*(parse_decimal(p) for p in parts))


@dataclass
class RunConfig:
    command: str
    a: float = 1.78
    c1: float = 0.0495
    c2: float = 0.0505
    n: int = 4000
    subintervals: int = 50
    grid: str | None = None
    out: str | None = None
    override_bounds: CoefficientBounds | None = None


def build_parser() -> argparse.ArgumentParser:
    fmt = argparse.ArgumentDefaultsHelpFormatter
    p = _Parser(prog="bryant", description="Validated numerics for genus-one catenoid cousins.",
                formatter_class=fmt)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, ranged=True):
        sp.add_argument("--a", type=parse_decimal, default=1.78, help="surface parameter (> 1)")
        if ranged:
            sp.add_argument("--c1", type=parse_decimal, default=0.0495, help="lower end of the c range")
            sp.add_argument("--c2", type=parse_decimal, default=0.0505, help="upper end of the c range")
        sp.add_argument("--n", type=parse_positive_int, default=4000, help="RK4 steps per path")
        sp.add_argument("--out", default=None, help="output file (standard output if omitted)")

    sp = sub.add_parser("certify", help="run the existence certificate", formatter_class=fmt)
    common(sp)
    sp.add_argument("--subintervals", type=parse_positive_int, default=50, help="sweep subintervals")
    sp.add_argument("--override-bounds", type=parse_bounds, default=None,
                    help="'reference' or M,M1,M2,M3; must dominate the computed bounds")
    sp.add_argument("--epsilon-scale", type=parse_decimal, default=1.0,
                    help="multiply the discretisation budget (values > 1 test the checks)")

    sp = sub.add_parser("sweep", help="f1, f2 midpoints on a c grid (CSV)", formatter_class=fmt)
    common(sp, ranged=False)
    sp.add_argument("--grid", type=parse_c_grid, default="0.0495:0.0505:0.00001",
                    help="start:stop:step, both ends included")

    sp = sub.add_parser("bounds", help="coefficient bounds and error budget table", formatter_class=fmt)
    common(sp)
    sp.add_argument("--subintervals", type=parse_positive_int, default=50, help="sweep subintervals")
    sp.add_argument("--override-bounds", type=parse_bounds, default=None,
                    help="'reference' or M,M1,M2,M3 used instead of the computed bounds")

    sp = sub.add_parser("integrate", help="endpoint matrix enclosure for one path", formatter_class=fmt)
    common(sp, ranged=False)
    sp.add_argument("--c", type=parse_decimal, default=0.05, help="period parameter")
    sp.add_argument("--path", choices=("alpha1", "alpha2"), default="alpha1", help="path preset")
    sp.add_argument("--mode", choices=("interval", "floating"), default="interval", help="arithmetic")

    from .mesh import PRESET_NAMES
    sp = sub.add_parser("mesh", help="sample a preset surface to OBJ", formatter_class=fmt)
    sp.add_argument("--preset", choices=PRESET_NAMES, default="genus1_catenoid", help="Weierstrass data")
    sp.add_argument("--lambda", dest="lam", type=parse_decimal, default=None,
                    help="preset parameter lambda (default 1)")
    sp.add_argument("--a", type=parse_decimal, default=1.78, help="genus-one surface parameter")
    sp.add_argument("--c", type=parse_decimal, default=None,
                    help="curvature scale (default 1; 0.05 for genus1_catenoid)")
    sp.add_argument("--grid", type=parse_mesh_grid, default="24x16", help="NxM grid nodes")
    sp.add_argument("--steps", type=parse_positive_int, default=200, help="RK4 steps per ray leg")
    sp.add_argument("--out", default=None, help="OBJ file (standard output if omitted)")
    return p


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    from .mesh import atomic_write
    atomic_write(out, text)


def _check_range(args) -> None:
    if not args.a > 1:
        raise UsageError(f"--a must exceed 1, got {args.a}")
    if not 0 < args.c1 < args.c2:
        raise UsageError(f"need 0 < c1 < c2, got c1={args.c1}, c2={args.c2}")


def _cmd_certify(args) -> int:
    from .certify import certify_existence
    _check_range(args)
    cert = certify_existence(args.a, args.c1, args.c2, args.n, args.subintervals,
                             override_bounds=args.override_bounds, epsilon_scale=args.epsilon_scale)
    _emit(cert.to_json() + "\n", args.out)
    print(f"{cert.verdict}{': ' + cert.reason if cert.reason else ''}", file=sys.stderr)
    return EXIT_OK if cert.verified else EXIT_FAILED


def _cmd_sweep(args) -> int:
    from .certify import format_sweep_csv, sweep_periods
    if not args.a > 1:
        raise UsageError(f"--a must exceed 1, got {args.a}")
    _emit(format_sweep_csv(sweep_periods(args.a, args.grid, args.n)), args.out)
    return EXIT_OK


def _cmd_bounds(args) -> int:
    from .bounds import make_budget
    from .certify import _bounds_for, sweep_edges
    from .surface import SurfaceParams, alpha1, alpha2, compute_h_bounds
    _check_range(args)
    if args.override_bounds is None:
        bounds, per_path, _ = _bounds_for(args.a, None)
    else:
        bounds = args.override_bounds
        params = SurfaceParams(args.a)
        per_path = {"alpha1": compute_h_bounds(alpha1(args.a), params),
                    "alpha2": compute_h_bounds(alpha2(args.a), params)}
    _, _, half = sweep_edges(args.c1, args.c2, args.subintervals)
    budget = make_budget(args.c1, args.c2, args.n, bounds, half)
    rows = [("path", "M", "M1", "M2", "M3")]
    rows += [(k,) + tuple(f"{v:.6g}" for v in b.as_tuple()) for k, b in per_path.items()]
    rows.append(("used",) + tuple(f"{v:.6g}" for v in bounds.as_tuple()))
    lines = ["  ".join(f"{c:>10}" for c in r) for r in rows]
    lines += ["",
              f"c_ref             {budget.c_ref!r}",
              f"n                 {budget.n}",
              f"zeta              {budget.zeta:.6e}",
              f"epsilon           {budget.epsilon:.6e}",
              f"derivative bound  {budget.derivative_bound:.6e}",
              f"half-width        {budget.half_width:.6e}",
              f"epsilon_hat       {budget.epsilon_hat:.6e}"]
    _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def _cmd_integrate(args) -> int:
    from .integrator import IntegrationConfig, integrate_path
    from .surface import PATH_PRESETS, SurfaceParams
    if not args.a > 1 or not args.c >= 0:
        raise UsageError("need a > 1 and c >= 0")
    F = integrate_path(PATH_PRESETS[args.path](args.a), SurfaceParams(args.a, args.c),
                       IntegrationConfig(args.n, args.mode))
    doc = {"path": args.path, "a": args.a, "c": args.c, "n": args.n, "mode": args.mode,
           "bounds": F.bounds(), "max_width": float(F.max_width())}
    _emit(json.dumps(doc, indent=1, sort_keys=True) + "\n", args.out)
    return EXIT_OK


def _cmd_mesh(args) -> int:
    from .mesh import format_obj, preset, sample_surface
    m = sample_surface(preset(args.preset, lam=args.lam, a=args.a, c=args.c), args.grid, steps=args.steps)
    _emit(format_obj(m), args.out)
    return EXIT_OK


COMMANDS = {"certify": _cmd_certify, "sweep": _cmd_sweep, "bounds": _cmd_bounds,
            "integrate": _cmd_integrate, "mesh": _cmd_mesh}


def parse_config(argv) -> tuple[RunConfig, argparse.Namespace]:
    args = build_parser().parse_args(argv)
    cfg = RunConfig(args.command)
    for k in asdict(cfg):
        if k != "command" and hasattr(args, k):
            setattr(cfg, k, getattr(args, k))
    return cfg, args


def run(argv=None) -> int:
    try:
        _, args = parse_config(sys.argv[1:] if argv is None else argv)
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_ERROR
    except (BryantError, ValueError, OSError) as exc:
        print(f"bryant: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR


def main() -> None:
    sys.exit(run())
