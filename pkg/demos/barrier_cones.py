"""Why the parabola has the strong separation property and the exponential does not.

Run with ``python3 demos/barrier_cones.py``.
"""
from barricade import Catalog1D, Epigraph1D, classify_barrier, recession_cone, ssp_verdict, support

parabola = Epigraph1D(Catalog1D("square"))
exp_graph = Epigraph1D(Catalog1D("exp"))

print("Both epigraphs recede only upwards:")
for name, S in (("y >= x^2", parabola), ("y >= e^x", exp_graph)):
    print(f"  {name:9s} recession generators {[g.tolist() for g in recession_cone(S).generators]}")

print("\nSupport values in the direction (1, -1):")
print(f"  parabola    {support(parabola, [1, -1]).value:+.12f}   (conjugate of x^2 at 1 is 1/4)")
print(f"  exponential {support(exp_graph, [1, -1]).value:+.12f}   (conjugate of e^x at 1 is 1*ln(1) - 1 = -1)")

print("\nThe downward direction (0, -1) pairs to zero with the upward ray, so it sits on the")
print("boundary of the polar of the recession cone.  What differs is how fast each set")
print("leaves that boundary:")
for name, S in (("parabola", parabola), ("exponential", exp_graph)):
    c = classify_barrier(S, [0, -1])
    print(f"  {name:11s} (0,-1) -> {c.verdict}")

print("\nA parabola grows fast enough that every nonzero barrier direction is interior;")
print("the exponential flattens out to the left, leaving a boundary direction behind:")
for name, S in (("parabola", parabola), ("exponential", exp_graph)):
    v = ssp_verdict(S)
    extra = f", witness {v.witness.tolist()}" if v.witness is not None else ""
    print(f"  {name:11s} {v.verdict}{extra}")
