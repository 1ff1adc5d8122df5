"""Closing-lemma diagnostics: the dichotomy between transversal separation
along translated boxes and proximity to a small periodic orbit.

Run:  python3 demos/07_closing_scan.py
"""

from unipotent_lab import algebra as al, closing as cs, quotient as qt

print("== generic start: the good set is almost everything ==")
x1 = qt.haar_sample(2024)
rep = cs.closing_scan(x1, t=4.0, D=3.0, beta=1e-5, r_count=8, search_norm=4)
print(f"good fraction {rep.good_fraction:.2f} "
      f"(threshold 1 - 5 beta^(1/4) = {rep.meta['threshold']:.3f})")
print("f_t values:", [round(v, 2) for v in rep.f_t_value])

print("\n== start planted 3e-7 from the diagonal orbit ==")
w = al.r_vector(al.PRODUCT, 1.2e-7, -1.8e-7, 3e-7)
xp = qt.from_group(al.exp_r(w))
rep2 = cs.closing_scan(xp, t=1.0, D=2.0, beta=0.04, r_count=8, search_norm=5,
                       good_fraction_threshold=0.5)
print(f"good fraction {rep2.good_fraction:.2f} -> nearby-periodic search ran")
print(f"detected orbit: height {rep2.detected_orbit.height}, "
      f"distance {rep2.detected_distance:.2e}")
print(f"short stabilizer candidates seen: {rep2.stabilizer_candidates}, "
      f"non-commuting pair: {rep2.zariski_dense_candidates}")
