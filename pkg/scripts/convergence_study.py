#!/usr/bin/env python3
"""Grid-convergence study for the constant-strength reference problem.

Solves the truncated problem on three ratio-2 grids, prints the observed
convergence order and the Richardson-extrapolated ground energy next to the
exact value -2*sigma^2.
"""
import argparse

from robinspectra.analysis import richardson
from robinspectra.discretize import Grid, OuterBC, assemble
from robinspectra.eigensolve import lowest_eigenpairs
from robinspectra.potential import Constant

parser = argparse.ArgumentParser()
parser.add_argument("--sigma", type=float, default=1.0)
parser.add_argument("--R", type=float, default=12.0)
args = parser.parse_args()

p = Constant(args.sigma)
points = []
for h in (0.1, 0.05, 0.025):
    F = assemble(p, Grid(args.R, h), OuterBC.DIRICHLET)
    lam = float(lowest_eigenpairs(F, 1).eigenvalues[0])
    points.append((h, lam))
    print(f"h = {h:6.3f}   lambda_1 = {lam:+.10f}")

study = richardson(points)
exact = -2 * args.sigma**2
print(f"observed order : {study.order:.3f}")
print(f"extrapolated   : {study.extrapolated:+.10f}")
print(f"exact          : {exact:+.10f}")
print(f"error          : {abs(study.extrapolated - exact):.3e}")
