"""Discretized dimension: truncated energies, dyadic regularization of a
fractal cloud, cones with admissible measures, and one dimension-improvement
step that visibly spreads a collinear sheet set.

Run:  python3 demos/04_dimension_toolkit.py
"""

import math

import numpy as np

from unipotent_lab import algebra as al, dimension as dm, quotient as qt
from unipotent_lab.harness import fractal_cloud

print("== truncated Riesz energy ==")
cl = dm.PointCloud(np.array([[0, 0, 0], [0, 0.1, 0], [0, 0.2, 0]]),
                   0.5, 4, 1, 3)
for R in (0, 1, 3):
    print(f"  eng_(R={R})(0) = {dm.energy(cl, R, 0.7, 0):.4f}")

print("\n== dyadic regularization of a seeded fractal cloud ==")
cloud = fractal_cloud(0, 0)
res = dm.regularize(cloud, M=5, k0=1, k1=3, beta=0.01)
print(f"cloud of {len(cloud)} points -> {len(res.parts)} part(s), "
      f"{len(res.discard)} discarded, budget {0.01 ** 0.25 * len(cloud):.0f}")
part = res.parts[0]
print("largest part band table (level: tau):",
      {k: part.tau[k] for k in sorted(part.tau) if k >= part.cloud.k0})
print("band replay exact:", dm.verify_band(part))

print("\n== cones and the localized Margulis pair (f, psi) ==")
eta = 0.002
beta = eta * eta
y = qt.identity_coset()
F = dm.PointCloud(np.array([[0, 0, 0], [0.9e-6, -0.4e-6, 0.7e-6],
                            [-1.1e-6, 0.8e-6, -0.2e-6]]), beta, 4, 1, 3)
cone = dm.cone_build(y, F, beta, eta)
z = dm.sheet_center(cone, 0)
I = dm.transversal_set(cone, al.identity(al.PRODUCT), z, 0.1)
print(f"3-sheet cone: #I(e, z) = {len(I)} (always contains 0)")
f, psi = dm.margulis_fpsi(cone, al.identity(al.PRODUCT), z, 0.1, 1, 1 / 3)
print(f"f = {f:.2f}, psi = {psi:.2f}")

print("\n== one dimension-improvement step on a collinear cone ==")
direc = np.array([0.5, -0.8, 1.0])
direc /= np.max(np.abs(direc))
s = (np.arange(48) + 1.0) / 48 * beta * 0.9
cone = dm.cone_build(y, dm.PointCloud(s[:, None] * direc, beta, 4, 1, 3),
                     beta, eta)
ell = 2 * abs(math.log(beta)) + 0.1
rep = dm.dimension_step(cone, ell, 0.37, 0.05, 1, 0.9, N=16, seed=4)
print(f"pieces hit: {rep.n_pieces}, offspring built: {len(rep.offspring)}")
print(f"per-point energy sup: before {rep.energy_sup_before:.3g}, "
      f"after {rep.energy_sup_after:.3g}")
print(f"sup f: before {rep.sup_f_before:.3g}, after {rep.sup_f_after:.3g} "
      f"(contraction {rep.contraction:.2e})")
