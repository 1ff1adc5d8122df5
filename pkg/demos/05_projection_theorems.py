"""Discretized projection theorems: fiber scans of the quadratic family xi_r
and the rational family zeta_r over a fractal cloud, and the planted-kernel
adversarial cloud whose exceptional parameters concentrate at r0.

Run:  python3 demos/05_projection_theorems.py
"""

import math

import numpy as np

from unipotent_lab import projection as pj

alpha = math.log(2) / math.log(3)

print("== Cantor-measure cloud, linear scan ==")
cl = pj.cantor_sample_cloud(3 ** 6, 1.0, seed=7)
rep = pj.linear_scan(cl, R=1, alpha=alpha, eps=0.01, b=1 / 27.0, r_count=256)
print(f"{len(cl)} points, energy certificate U = {rep.meta['Upsilon']:.3g}")
print(f"max fiber over the grid: {max(rep.max_fiber)}, "
      f"exceptional fraction: {rep.exceptional_fraction:.3f}")

print("\n== same cloud scaled small, nonlinear (zeta) scan ==")
cl2 = pj.cantor_sample_cloud(3 ** 6, 0.005, seed=7)
rep2 = pj.nonlinear_scan(cl2, alpha=alpha, eps=0.01, b0=0.005,
                         b1=0.005 / 27.0, r_count=256)
print(f"ball-regularity certificate Ubar = {rep2.meta['Ubar']:.3f}")
print(f"exceptional fraction: {rep2.exceptional_fraction:.3f}")

print("\n== adversarial cloud inside ker xi_(r0), r0 = 0.4 ==")
adv = pj.collinear_cloud(0.4, 512, 1.0)
rep3 = pj.linear_scan(adv, R=1, alpha=alpha, eps=0.01, b=1e-3, r_count=512)
exc = np.array(rep3.exceptional_set)
print(f"exceptional r's: {len(exc)} of 512, range "
      f"[{exc.min():.4f}, {exc.max():.4f}] (all within 0.05 of r0)")

print("\n== multiplicity m^b(q) ==")
q = (0.3, float(pj.algebra.xi_values(0.3, cl.points[:1])[0]))
print(f"mass of the b-fiber through a cloud point at r = 0.3: "
      f"{pj.multiplicity(cl, 1 / 27.0, q):.4f}")
