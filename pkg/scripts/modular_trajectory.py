"""Trajectory of the modular mixing matrix O(X) for one interval family.

Compares the ODE solution with the closed form when the family is symmetric
and reports the orthogonality defect along the way.
"""
import argparse
import sys
from dataclasses import dataclass

import numpy as np

from multiferm import modular as mod


@dataclass
class Config:
    n: int = 3
    root_arc: tuple = (-0.9, 1.4)
    phases: tuple | None = None  # flat u1, v1, u2, v2, ... overrides the symmetric family
    decades: float = 1.0
    points: int = 21

    def family(self) -> mod.IntervalFamily:
        if self.phases:
            ph = list(self.phases)
            return mod.IntervalFamily(tuple(zip(ph[0::2], ph[1::2])))
        return mod.IntervalFamily.symmetric_family(self.n, *self.root_arc)


def run(cfg: Config):
    g = mod.ModularGeometry(cfg.family())
    half = cfg.decades / 2
    g.prepare(g.X0 * 10 ** -half, g.X0 * 10 ** half)
    rows = []
    for X in g.X0 * np.logspace(-half, half, cfg.points):
        O = g.O(X)
        dev = float(np.max(np.abs(O - g.closed_form_O(X)))) if g.family.symmetric else float("nan")
        rows.append((X, mod.orthogonality_defect(O), dev, O))
    return g, rows


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--root-arc", type=float, nargs=2, default=(-0.9, 1.4))
    p.add_argument("--phases", help="comma separated arc endpoint phases (general family)")
    p.add_argument("--decades", type=float, default=1.0)
    p.add_argument("--points", type=int, default=21)
    p.add_argument("--show-matrix", action="store_true")
    a = p.parse_args(argv)
    phases = tuple(float(x) for x in a.phases.split(",")) if a.phases else None
    g, rows = run(Config(a.n, tuple(a.root_arc), phases, a.decades, a.points))
    print(f"n = {g.n}, base point X0 = {g.X0:.6f}")
    print(f"{'X':>12} {'orth defect':>12} {'vs closed':>12}")
    for X, orth, dev, O in rows:
        print(f"{X:12.6f} {orth:12.2e} {dev:12.2e}")
        if a.show_matrix:
            print(np.array2string(O, precision=6, suppress_small=True))


if __name__ == "__main__":
    sys.exit(main())
