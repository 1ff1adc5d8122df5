"""Group and Lie-algebra kernels: one-parameter subgroups, the BCH-type
split g = h exp(w), and the two projection families xi_r / zeta_r.

Run:  python3 demos/01_group_kernels.py
"""

import numpy as np

from unipotent_lab import algebra as al
from unipotent_lab.rng import stream

print("== one-parameter subgroups (product model) ==")
g = al.one_param(al.PRODUCT, "n", 0.5, 0.25)
print("n(0.5, 0.25) factors:")
print(g.factors[0])
print(g.factors[1])

print("\n== BCH split: exp(w1) exp(-w2) = h exp(w) ==")
gen = stream(0, "demo-bch")
w1 = al.r_vector(al.PRODUCT, *gen.uniform(-0.01, 0.01, 3))
w2 = al.r_vector(al.PRODUCT, *gen.uniform(-0.01, 0.01, 3))
h, w = al.bch_split(al.mul(al.exp_r(w1), al.inv(al.exp_r(w2))))
d12 = float(np.max(np.abs(w1.r - w2.r)))
print(f"||w1 - w2|| = {d12:.3e},  ||w|| = {w.norm():.3e} "
      f"(sandwich [2/3, 3/2]: ratio {w.norm() / d12:.3f})")
print(f"||h - I|| = {h.dist_to_identity_norm():.3e}")

print("\n== same split in the complex model (Newton chart) ==")
wc = al.r_vector(al.COMPLEX, 0.004, -0.006, 0.002)
hc, wcs = al.bch_split(al.exp_r(wc))
print(f"recovered w: {np.round(wcs.r, 6)} vs planted {wc.r}")

print("\n== xi_r vs the adjoint (1,2)-entry ==")
r = 0.37
w = al.r_vector(al.PRODUCT, 0.3, -0.5, 0.8)
ur = al.one_param(al.PRODUCT, "u", r)
print(f"xi_{r}(w) = {al.xi_project(r, w):+.6f}, "
      f"(Ad(u_r) w)_12 = {al.adjoint(ur, w).r[1]:+.6f}")

print("\n== zeta_r agrees with xi_r to first order ==")
for eps in (1e-2, 1e-3, 1e-4):
    we = al.r_vector(al.PRODUCT, *(eps * w.r))
    z = al.zeta_project(r, we)
    print(f"  eps={eps:.0e}:  zeta = {z:+.8f},  eps*xi = {eps * al.xi_project(r, w):+.8f}")
