"""Margulis functions for periodic orbits: the sigma_d averaging operator's
e^{-d/3} contraction, and the drift of E[f_Y] down to its recurrence floor.

Run:  python3 demos/06_margulis_averages.py
"""

import math

from unipotent_lab import algebra as al, margulis as mg, quotient as qt
from unipotent_lab.rng import stream

print("== sigma_d contraction of ||Ad(h) w||^(-1/3) ==")
w = al.r_vector(al.PRODUCT, 0, 1, 0)
for d in (2.0, 6.0, 10.0):
    res = mg.sigma_contraction(w, d)
    print(f"  d = {d:4.1f}: value = {res.value:.6f} "
          f"(E12 direction: exactly e^(-d/3) = {math.exp(-d / 3):.6f})")

gen = stream(0, "demo-sigma")
worst = 0.0
for d in (2.0, 6.0, 10.0):
    for _ in range(50):
        v = gen.normal(size=3)
        v /= abs(v).max()
        worst = max(worst, math.exp(d / 3.0)
                    * mg.sigma_contraction(al.r_vector(al.PRODUCT, *v), d).value)
print(f"uniform constant over random unit w: sup e^(d/3) value = {worst:.2f}")

print("\n== f_Y and the contraction sweep from a planted start ==")
Y = qt.periodic_catalog(1)[0]
w0 = al.r_vector(al.PRODUCT, 4e-7, -6e-7, 1e-6)
x = qt.from_group(al.exp_r(w0))
print(f"f_Y at distance 1e-6 from the orbit: {mg.f_Y_eval(x, Y):.1f}")
sweep = mg.contraction_sweep(x, Y, d=6.0, ell=5, N=120, seed=3)
floor = qt.INJ_CAP ** (-1 / 3.0)
print(f"recurrence floor inj_cap^(-1/3) = {floor:.2f}")
for s in sweep:
    print(f"  step {s['step']}: E[f_Y] = {s['mean_f']:8.2f} "
          f"(+- {s['std_error']:.2f})")

print("\n== averaged return along the full unipotent interval ==")
xq = qt.from_group(al.exp_r(al.r_vector(al.PRODUCT, 1e-4, 2e-4, -3e-4)))
for logT in (8.0, 10.0, 12.0):
    est = mg.averaged_return(xq, Y, logT, 200, seed=4)
    print(f"  logT = {logT:4.1f}: int f_Y = {est['estimate']:.2f} "
          f"(+- {est['std_error']:.2f})")
