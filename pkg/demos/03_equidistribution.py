"""The equidistribution dichotomy at desk scale: discrepancy of expanding
unipotent translates decays for a generic start, but stays bounded away from
zero on a periodic orbit (tested with a function vanishing near the orbit).

Run:  python3 demos/03_equidistribution.py   (about a minute)
"""

from unipotent_lab import algebra as al, flow, quotient as qt

tests = [flow.siegel_product(flow.AnnulusBump(1.2, 0.4),
                             flow.AnnulusBump(1.7, 0.5), "siegel-a")]

print("== generic start: discrepancy vs logT ==")
w = al.r_vector(al.PRODUCT, 0.11, 0.07, -0.13)
x0 = qt.from_group(al.mul(al.exp_r(w),
                          al.one_param(al.PRODUCT, "n", 0.0, 0.7071)))
for logT in (4.0, 6.0, 8.0, 10.0):
    out = flow.unipotent_discrepancy(x0, logT, tests, 4000, seed=1)
    print(f"  logT = {logT:4.1f}: discrepancy = {out['max_discrepancy']:.4f}")

print("\n== start on the diagonal periodic orbit ==")
Y = qt.periodic_catalog(1)[0]
off = flow.orbit_avoid(Y, 0.05, label="off-orbit", mc_n=1500)
print(f"off-orbit test: haar mean = {off.haar_mean:.3f} (sup = 1)")
xd = qt.identity_coset()
for logT in (4.0, 8.0, 12.0):
    out = flow.unipotent_discrepancy(xd, logT, [off], 2000, seed=1)
    print(f"  logT = {logT:4.1f}: discrepancy = {out['max_discrepancy']:.4f} "
          "(obstructed: the orbit never leaves itself)")

print("\n== sparse averaging along a Cantor measure ==")
rho = flow.cantor_measure(7)
print(f"Cantor measure: {len(rho.atoms)} atoms, certificate "
      f"C = {rho.C:.2f}, theta = {rho.theta:.4f}, b = {rho.b:.2e}")
import warnings
with warnings.catch_warnings():
    warnings.simplefilter("ignore")
    for t in (5.0, 10.0):
        est = flow.sparse_average(qt.haar_sample(3), t, 1.0, rho, tests[0],
                                  2000, seed=2)
        print(f"  t = {t:4.1f}: |avg - haar| = "
              f"{abs(est.value - tests[0].haar_mean):.4f} "
              f"(se {est.std_error:.4f})")
