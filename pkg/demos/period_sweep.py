"""Tabulate f1 and f2 across c in [0.0495, 0.0505] and locate the crossing f1 = f2.

    python3 demos/period_sweep.py [points]
"""
import sys

import numpy as np

from bryant import solve_gauge_beta, sweep_periods


def main(points=21):
    cs = np.linspace(0.0495, 0.0505, points)
    rows = sweep_periods(1.78, cs, n=4000)
    print(f"{'c':>10} {'f1':>12} {'f2':>12} {'f1 - f2':>12}")
    for r in rows:
        print(f"{r.c:10.6f} {r.f1:12.6f} {r.f2:12.6f} {r.f1 - r.f2:12.6f}")
    d = [r.f1 - r.f2 for r in rows]
    for r0, r1, d0, d1 in zip(rows, rows[1:], d, d[1:]):
        if d0 > 0 >= d1:
            # linear interpolation of the crossing between neighbouring rows
            c = r0.c + (r1.c - r0.c) * d0 / (d0 - d1)
            f = r0.f1 + (r1.f1 - r0.f1) * (c - r0.c) / (r1.c - r0.c)
            print(f"\ncrossing near c = {c:.7f}, f = {f:.4f}, gauge beta = {solve_gauge_beta(f):.6f}")


if __name__ == "__main__":
    main(int(sys.argv[1]) if len(sys.argv) > 1 else 21)
