"""Reference computations that share no code with the package."""
import itertools

import numpy as np
from scipy.optimize import linprog
from scipy.spatial import cKDTree


def random_polyhedron(rng, n, m, spread=2.0):
    """Rows ``A`` and offsets ``b`` of a nonempty polyhedron containing ``x0``."""
    A = rng.normal(size=(m, n))
    x0 = rng.normal(size=n)
    b = A @ x0 + rng.uniform(0.1, spread, m)
    return A, b, x0


def brute_force_projection(A, b, x):
    """Projection onto ``{z : A z <= b}`` by enumerating candidate active sets.

    For every subset S the projection onto the affine set ``A_S z = b_S`` is a
    candidate; the nearest feasible candidate is the answer.
    """
    m, n = A.shape
    best, best_d = None, np.inf
    for k in range(0, min(m, n) + 1):
        for S in itertools.combinations(range(m), k):
            if S:
                As = A[list(S)]
                y, *_ = np.linalg.lstsq(As @ As.T, As @ x - b[list(S)], rcond=None)
                z = x - As.T @ y
                if np.max(np.abs(As @ z - b[list(S)])) > 1e-9:
                    continue
            else:
                z = x.copy()
            if np.max(A @ z - b) <= 1e-9:
                d = np.linalg.norm(z - x)
                if d < best_d:
                    best, best_d = z, d
    return best


def lp_support(A, b, xstar):
    """``sup {<xstar, x> : A x <= b}`` with scipy's HiGHS; inf when unbounded."""
    res = linprog(-np.asarray(xstar), A_ub=A, b_ub=b, bounds=[(None, None)] * A.shape[1],
                  method="highs")
    if res.status == 3:
        return np.inf
    assert res.status == 0, res.message
    return -res.fun


def lp_barrier_oracle(A, xstar):
    """Is ``{y >= 0 : A^T y = xstar}`` feasible?  (Farkas: finite support.)"""
    m = A.shape[0]
    res = linprog(np.zeros(m), A_eq=A.T, b_eq=xstar, bounds=[(0, None)] * m, method="highs")
    return res.status == 0


def recession_generators_lp(A, xstar):
    """``max <xstar, v>`` over ``{A v <= 0, |v|_inf <= 1}``."""
    n = A.shape[1]
    res = linprog(-np.asarray(xstar), A_ub=A, b_ub=np.zeros(A.shape[0]),
                  bounds=[(-1, 1)] * n, method="highs")
    return -res.fun, res.x


def grid_conjugate(f, s, lo=-60.0, hi=60.0, count=40_001):
    """``sup_x (s x - f(x))`` over a dense grid, from plain function values."""
    xs = np.linspace(lo, hi, count)
    vals = np.array([f(x) for x in xs])
    ok = np.isfinite(vals)
    return float(np.max(s * xs[ok] - vals[ok]))


def grid_distance(members_c, members_d, box, step):
    """Minimum distance between grid points of two planar sets inside ``box``.

    ``members_*`` take an ``(N, 2)`` array and return a boolean mask.
    """
    (x0, x1), (y0, y1) = box
    g = np.stack(np.meshgrid(np.arange(x0, x1 + step / 2, step),
                             np.arange(y0, y1 + step / 2, step)), -1).reshape(-1, 2)
    C = g[members_c(g)]
    D = g[members_d(g)]
    dist, _ = cKDTree(D).query(C)
    return float(dist.min())
