"""The quotient space X = (SL2(R) x SL2(R)) / (SL2(Z) x SL2(Z)): reduction,
injectivity radius, Haar sampling against the Siegel formula, periodic
orbits and transversal returns.

Run:  python3 demos/02_lattice_quotient.py
"""

import math

import numpy as np

from unipotent_lab import algebra as al, flow, quotient as qt

print("== reduction to canonical representatives ==")
rep, gam = qt.reduce(al.one_param(al.PRODUCT, "u", 3.0))
print("reduce(u_3): representative is the identity,",
      "gamma =", gam.factors[0].astype(int).tolist())

print("\n== injectivity radius (capped at 0.01) ==")
print("inj(identity) =", qt.identity_coset().inj)
x = qt.from_group(al.one_param(al.PRODUCT, "a", 10.0))
print(f"inj(a_10)     = {x.inj:.3e}  (~ c e^-5, cusp excursion)")

print("\n== Haar sampling vs the Siegel integral formula ==")
f = flow.AnnulusBump(1.2, 0.4)
vals = []
for i in range(4000):
    p = qt.haar_sample(7, i)
    pts = qt.lattice_points_in_ball(np.asarray(p.rep.factors[0]), 1.6)
    vals.append(float(np.sum(f(np.linalg.norm(pts, axis=1)))) if len(pts) else 0.0)
m, se = np.mean(vals), np.std(vals) / math.sqrt(len(vals))
print(f"mean F_f over 4000 samples = {m:.4f} +- {se:.4f}")
print(f"Siegel formula (int f dLeb) = {f.lebesgue_integral:.4f}")

print("\n== periodic orbit catalog (canonical conjugators diag(1, n)) ==")
for Y in qt.periodic_catalog(5):
    print(f"  height {Y.height}: det {Y.det()}, vol proxy {Y.vol_proxy:.0f}")

print("\n== transversal returns at a planted offset ==")
Y = qt.periodic_catalog(1)[0]
w0 = al.r_vector(al.PRODUCT, 2e-3, -3e-3, 4e-3)
xp = qt.from_group(al.exp_r(w0))
print("planted w0 =", w0.r)
for v in qt.transversal_returns(xp, Y):
    print("  found return:", np.round(v.r, 6), " norm", f"{v.r_norm():.2e}")
print(f"dist_to_orbit upper bound: {qt.dist_to_orbit(xp, Y):.3e}")
