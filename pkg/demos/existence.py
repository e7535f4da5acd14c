"""Growth conditions that guarantee a convex program attains its infimum.

Run with ``python3 demos/existence.py``.
"""
import numpy as np

from barricade import (Catalog1D, Catalog1DLift, ConvexQuadratic, Epigraph1D, Ex53Fn,
                       HPolyhedron, certify_and_solve, check_coercive, check_cond9,
                       check_cond10)


def show(name, f):
    marks = [check_coercive(f).holds, check_cond9(f).holds, check_cond10(f).holds]
    print(f"  {name:34s} coercive={marks[0]!s:5s} every-base={marks[1]!s:5s} "
          f"some-base={marks[2]!s:5s}")

print("Three growth conditions, each weaker than the last:")
show("x^2 + y on R^2", ConvexQuadratic(np.diag([1.0, 0.0]), [0.0, 1.0]))
show("-sqrt(x) on x >= 0", Catalog1DLift(1, 0, Catalog1D("negsqrt")))
show("exp(-x) - sqrt(xy) on the quadrant", Ex53Fn())

print("\nMinimise y + x^2 over the parabola epigraph y >= x^2:")
parabola_program = ConvexQuadratic(np.diag([1.0, 0.0]), [0.0, 1.0])
rep = certify_and_solve(Epigraph1D(Catalog1D("square")), parabola_program)
print(f"  {rep.conclusion} via {rep.route}; minimiser {np.round(rep.solution.x, 8).tolist()}, "
      f"value {rep.solution.value:.2e}")

print("\nMinimise the decaying function over the x-axis:")
rep = certify_and_solve(HPolyhedron([[0.0, 1.0], [0.0, -1.0]], [0.0, 0.0]), Ex53Fn())
print(f"  {rep.conclusion}, failed hypotheses {list(rep.failed)}")
print(f"  infimum 0 is approached but never reached: best value {rep.best.value:.2e}, "
      f"nonattainment flagged = {rep.nonattainment_flag}")
