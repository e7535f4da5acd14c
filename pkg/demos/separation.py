"""Disjoint closed convex sets that cannot be strongly separated, and a cure by truncation.

Run with ``python3 demos/separation.py``.
"""
import numpy as np

from barricade import counterexample_pair, distance, embedded_pairs, separate

C, D, _ = counterexample_pair("hyperbola_line")
print("C = {y >= 1/x, x > 0} and D = the x-axis never meet, yet:")
out = separate(C, D)
print(f"  separate(C, D) -> {out.status}, shared recession ray {out.common_ray.tolist()}")
res = distance(C, D, tol=1e-3)
print(f"  distance bracket [{res.lower}, {res.upper:.2e}] after {res.iterations} iterations")

print("\nMarching along the shared ray shrinks the gap without end:")
for c, d, gap in out.gap_sequence[:6]:
    print(f"  c = ({c[0]:8.1f}, {c[1]:.5f})   gap {gap:.2e}")

print("\nIn infinite dimensions the same failure happens with trivial common recession.")
print("The l2 example, cut down to R^6, keeps its sequence pairs with gaps 2/(k+1):")
for k, xi, zeta, gap in embedded_pairs("l2_slices", 6):
    print(f"  k={k}  gap {gap:.15f}   exact {2 / (k + 1):.15f}")

C6, D6, _ = counterexample_pair("l2_slices", 6)
out6 = separate(C6, D6)
h = out6.hyperplane
print(f"\nEvery finite truncation is strongly separated: {out6.status}, margin {h.margin:.4f}")
print(f"  normal {np.round(h.xstar, 4).tolist()}")
