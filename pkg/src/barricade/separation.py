"""Distance between convex sets and separation certificates."""
import math
import time
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from .catalog import Catalog1D
from .cones import common_direction, recession_cone
from .errors import ConvergenceError, DimensionError
from .lp import is_feasible
from .sets import Epigraph1D, HPolyhedron, quiet_solve
from .support import support

STRONG = "StronglySeparated"
WEAK = "SeparatedOnly"
NOT_STRONG = "NotStronglySeparable"
INTERSECTING = "Intersecting"

SEPARATION_TOL = 1e-8
ESCALATIONS = 3


@dataclass(frozen=True)
class Hyperplane:
    """``sup_C <xstar, .> <= alpha <= inf_D <xstar, .>`` with gap ``margin``."""

    xstar: np.ndarray
    alpha: float
    margin: float

    def flipped(self):
        return Hyperplane(-self.xstar, -self.alpha, self.margin)

    def to_dict(self):
        return {"xstar": self.xstar.tolist(), "alpha": self.alpha, "margin": self.margin}


@dataclass(frozen=True)
class DistanceResult:
    lower: float
    upper: float
    cp: np.ndarray
    dp: np.ndarray
    iterations: int
    marches: int = 0

    def __iter__(self):
        return iter((self.lower, self.upper, self.cp, self.dp))


@dataclass(frozen=True)
class SeparationOutcome:
    status: str
    hyperplane: Optional[Hyperplane] = None
    dist: Optional[float] = None
    cp: Optional[np.ndarray] = None
    dp: Optional[np.ndarray] = None
    common_ray: Optional[np.ndarray] = None
    gap_sequence: List[Tuple[np.ndarray, np.ndarray, float]] = field(default_factory=list)
    point: Optional[np.ndarray] = None
    bounds: Optional[Tuple[float, float]] = None

    def to_dict(self):
        d = {"status": self.status}
        if self.hyperplane is not None:
            d["hyperplane"] = self.hyperplane.to_dict()
        if self.dist is not None:
            d["dist"] = self.dist
        for key in ("cp", "dp", "common_ray", "point"):
            val = getattr(self, key)
            if val is not None:
                d[key] = val.tolist()
        if self.gap_sequence:
            d["gap_sequence"] = [{"c": c.tolist(), "d": e.tolist(), "gap": g}
                                 for c, e, g in self.gap_sequence]
        if self.bounds is not None:
            d["bounds"] = {"lower": self.bounds[0], "upper": self.bounds[1]}
        return d


def _check_dims(C, D):
    if C.dim != D.dim:
        raise DimensionError(f"dimension mismatch: {C.dim} vs {D.dim}")


def _dual_bound(C, D, cp, dp):
    """``inf_D <x*, .> - sup_C <x*, .>`` for ``x*`` along ``dp - cp``, clipped at 0."""
    gap = dp - cp
    ng = np.linalg.norm(gap)
    if ng == 0:
        return 0.0, None
    xstar = gap / ng
    sc = support(C, xstar)
    sd = support(D, -xstar)
    if not (sc.finite and sd.finite):
        return 0.0, xstar
    return max(0.0, -sd.value - sc.value), xstar


def _joint_pair(C, D):
    """Nearest pair from one conic solve over ``C x D``; None if the solve fails."""
    import cvxpy as cp

    c = cp.Variable(C.dim)
    d = cp.Variable(D.dim)
    prob = cp.Problem(cp.Minimize(cp.sum_squares(c - d)),
                      C.cvx_constraints(c) + D.cvx_constraints(d))
    try:
        quiet_solve(prob, tol_gap_abs=1e-14, tol_gap_rel=1e-14, tol_feas=1e-14)
    except cp.SolverError:
        return None
    if c.value is None or d.value is None or not (
            np.all(np.isfinite(c.value)) and np.all(np.isfinite(d.value))):
        return None
    cv = C.project(np.asarray(c.value, float))
    dv = D.project(np.asarray(d.value, float))
    return cv, dv


def distance(C, D, tol=SEPARATION_TOL, max_iter=10000, deadline=None) -> DistanceResult:
    """Bounds on ``inf ||c - d||``.

    A conic solve over the product ``C x D`` gives the starting pair, which
    is refined by alternating projections.  When the sets share a recession
    direction ``v`` the pair is also pushed along ``v`` with doubling steps
    whenever that shrinks the gap; this is what drives the gap to zero for
    pairs that only meet at infinity.  The lower bound is the dual value
    ``inf_D <x*, .> - sup_C <x*, .>`` along the current gap direction.
    Raises :class:`ConvergenceError` carrying both bounds when the budget
    runs out before ``upper - lower <= tol``.
    """
    _check_dims(C, D)
    start = time.monotonic()
    v = common_direction(recession_cone(C), recession_cone(D))
    c = C.project(C.point())
    d = D.project(c)
    c = C.project(d)
    upper = float(np.linalg.norm(c - d))
    pair = _joint_pair(C, D)
    if pair is not None and np.linalg.norm(pair[0] - pair[1]) < upper:
        c, d = pair
        upper = float(np.linalg.norm(c - d))
    lower, _ = _dual_bound(C, D, c, d)
    step = 1.0
    marches = 0
    it = 1

    def done():
        return upper - lower <= tol or upper <= tol

    while it < max_iter and not done():
        if deadline is not None and time.monotonic() - start > deadline:
            break
        d_new = D.project(c)
        c_new = C.project(d_new)
        gap = float(np.linalg.norm(c_new - d_new))
        it += 1
        stalled = gap > upper * (1 - 1e-2)
        if gap <= upper:
            c, d, upper = c_new, d_new, gap
        if stalled and v is not None:
            # travel along the shared direction while it keeps paying off
            step = max(step, float(np.linalg.norm(c)))
            while it < max_iter and not done():
                d_try = D.project(c + step * v)
                c_try = C.project(d_try)
                g_try = float(np.linalg.norm(c_try - d_try))
                it += 1
                if g_try < upper * (1 - 1e-3):
                    c, d, upper = c_try, d_try, g_try
                    marches += 1
                    step *= 2.0
                else:
                    break
        if stalled or it % 10 == 0:
            lower = max(lower, _dual_bound(C, D, c, d)[0])
            if stalled and v is None and not done() and gap >= upper:
                break  # an exact fixed point of the projections
    lower = min(lower, upper)
    if not done():
        raise ConvergenceError("distance bounds did not meet within budget",
                               best=(c, d), residual=upper - lower,
                               partial=DistanceResult(lower, upper, c, d, it, marches))
    return DistanceResult(lower, upper, c, d, it, marches)


def _polyhedral_common_point(C, D):
    if isinstance(C, HPolyhedron) and isinstance(D, HPolyhedron):
        ok, x = is_feasible(np.vstack([C.A, D.A]), np.concatenate([C.b, D.b]))
        return ok, x
    return None, None


def _gap_sequence(C, D, v, tol, kmax=60):
    """Pairs ``(c_k, d_k)`` marching along ``v`` with strictly shrinking gaps."""
    c0 = C.project(np.zeros(C.dim))
    seq = []
    for k in range(kmax):
        d = D.project(c0 + 2.0 ** k * v)
        c = C.project(d)
        gap = float(np.linalg.norm(c - d))
        if not seq or gap < seq[-1][2]:
            seq.append((c, d, gap))
        if gap < 10 * tol:
            break
    return seq


def _weak_hyperplane(C, D, xstar, tol):
    if xstar is None:
        return None
    sc = support(C, xstar)
    sd = support(D, -xstar)
    if sc.finite and sd.finite and sc.value <= -sd.value + tol:
        return Hyperplane(xstar, 0.5 * (sc.value - sd.value), max(0.0, -sd.value - sc.value))
    return None


def _strong(C, D, res):
    xstar = (res.dp - res.cp) / np.linalg.norm(res.dp - res.cp)
    sc = support(C, xstar).value
    inf_d = -support(D, -xstar).value
    h = Hyperplane(xstar, 0.5 * (sc + inf_d), inf_d - sc)
    return SeparationOutcome(STRONG, hyperplane=h, dist=res.upper, cp=res.cp, dp=res.dp,
                             bounds=(res.lower, res.upper))


def separate(C, D, tol=SEPARATION_TOL, max_iter=10000, deadline=None) -> SeparationOutcome:
    """Certify strong separation, intersection, or the lack of strong separation."""
    _check_dims(C, D)
    v = common_direction(recession_cone(C), recession_cone(D))
    budget = max_iter
    res = None
    for _ in range(ESCALATIONS + 1):
        try:
            res = distance(C, D, tol, budget, deadline)
        except ConvergenceError as exc:
            res = exc.partial
        if res.lower > tol:
            return _strong(C, D, res)
        if res.upper <= tol:
            ok, x = _polyhedral_common_point(C, D)
            if ok:
                return SeparationOutcome(INTERSECTING, point=x, bounds=(res.lower, res.upper))
            mid = 0.5 * (res.cp + res.dp)
            if ok is None and (v is None or res.marches == 0) \
                    and C.contains(mid, tol) and D.contains(mid, tol):
                return SeparationOutcome(INTERSECTING, point=mid, bounds=(res.lower, res.upper))
        if v is not None and (res.upper > tol or res.marches > 0):
            gaps = _gap_sequence(C, D, v, tol)
            xstar = None
            if res.upper > 0:
                xstar = (res.dp - res.cp) / res.upper
            return SeparationOutcome(NOT_STRONG, hyperplane=_weak_hyperplane(C, D, xstar, tol),
                                     common_ray=np.asarray(v), gap_sequence=gaps,
                                     cp=res.cp, dp=res.dp, bounds=(res.lower, res.upper))
        budget *= 4
    raise ConvergenceError("separation undecided after escalation", best=(res.cp, res.dp),
                           residual=res.upper - res.lower,
                           partial=SeparationOutcome(WEAK if res.upper > tol else INTERSECTING,
                                                     cp=res.cp, dp=res.dp,
                                                     bounds=(res.lower, res.upper)))


# -- counterexample fixtures --------------------------------------------------

COUNTEREXAMPLES = ("hyperbola_line", "l2_slices", "l1_slices")


def _slice(n, weights):
    """``{x >= 0 : sum_i weights[i] x_i = 1}`` as an H-polyhedron."""
    w = np.asarray(weights, float)
    A = np.vstack([w, -w, -np.eye(n)])
    b = np.concatenate([[1.0, -1.0], np.zeros(n)])
    return HPolyhedron(A, b)


def counterexample_pair(name, n=2):
    """``(C, D, expected_status)`` for one of the named fixtures."""
    if name == "hyperbola_line":
        C = Epigraph1D(Catalog1D("recip"))
        D = HPolyhedron([[0.0, 1.0], [0.0, -1.0]], [0.0, 0.0])
        return C, D, NOT_STRONG
    if name not in COUNTEREXAMPLES:
        raise KeyError(name)
    if n < 2:
        raise ValueError("truncations need n >= 2")
    i = np.arange(1, n + 1)
    if name == "l2_slices":
        return _slice(n, 1.0 / i), _slice(n, 1.0 / (i + 1)), STRONG
    return _slice(n, np.ones(n)), _slice(n, i / (i + 1.0)), STRONG


def embedded_pairs(name, n):
    """The sequence pairs ``(k, xi_k, zeta_k, gap_k)`` that fit in R^n."""
    if name == "l2_slices":
        out = []
        for k in range(1, n):
            xi = np.zeros(n)
            xi[k - 1] = k
            zeta = xi.copy()
            zeta[0] += 2.0 / (k + 1)
            out.append((k, xi, zeta, float(np.linalg.norm(xi - zeta))))
        return out
    if name == "l1_slices":
        out = []
        for k in range(1, n + 1):
            xi = np.zeros(n)
            xi[k - 1] = 1.0
            zeta = (k + 1) / k * xi
            out.append((k, xi, zeta, float(np.linalg.norm(xi - zeta))))
        return out
    raise KeyError(name)
