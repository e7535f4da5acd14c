"""Support function evaluation with finiteness certificates."""
import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .cones import recession_cone
from .errors import ConvergenceError, InconclusiveError
from .lp import linprog_max
from .sets import Ball, Epigraph1D, HPolyhedron, SublevelSystem, VSet, as_vec

FINITE = "Finite"
INFINITE = "Infinite"
SUPPORT_TOL = 1e-9


@dataclass(frozen=True)
class SupportValue:
    """Value of the support function at one direction.

    ``Finite`` values come with an (approximate) maximiser when one is
    available.  ``Infinite`` values carry either a unit recession ray with
    positive pairing, or -- when the supremum is infinite without such a
    ray -- a ``sequence`` of points of the set whose pairings increase
    without visible bound.
    """

    status: str
    value: Optional[float] = None
    argsup: Optional[np.ndarray] = None
    ray: Optional[np.ndarray] = None
    sequence: Tuple[np.ndarray, ...] = ()

    @property
    def finite(self):
        return self.status == FINITE

    def to_dict(self):
        d = {"status": self.status}
        if self.value is not None:
            d["value"] = self.value
        if self.argsup is not None:
            d["argsup"] = self.argsup.tolist()
        if self.ray is not None:
            d["ray"] = self.ray.tolist()
        if self.sequence:
            d["sequence"] = [p.tolist() for p in self.sequence]
        return d


def _infinite_ray(ray):
    ray = np.asarray(ray, float)
    return SupportValue(INFINITE, ray=ray / np.linalg.norm(ray))


def support(S, xstar, tol=SUPPORT_TOL) -> SupportValue:
    """Support function ``sup {<xstar, c> : c in S}``."""
    xstar = as_vec(xstar, S.dim)
    if not np.any(xstar):
        return SupportValue(FINITE, 0.0, S.point())
    if isinstance(S, HPolyhedron):
        return _support_hpoly(S, xstar)
    if isinstance(S, VSet):
        return _support_vset(S, xstar, tol)
    if isinstance(S, Ball):
        return SupportValue(FINITE, float(xstar @ S.center + S.radius * np.linalg.norm(xstar)),
                            S.center + S.radius * xstar / np.linalg.norm(xstar))
    if isinstance(S, Epigraph1D):
        return _support_epigraph(S, xstar)
    if isinstance(S, SublevelSystem):
        return _support_sublevel(S, xstar, tol)
    raise TypeError(f"unsupported set type {type(S).__name__}")


def _support_hpoly(S, xstar):
    res = linprog_max(xstar, S.A, S.b)
    if res.status == "unbounded":
        return _infinite_ray(res.ray)
    return SupportValue(FINITE, res.value, res.x)


def _support_vset(S, xstar, tol):
    if len(S.rays):
        pair = S.rays @ xstar
        j = int(np.argmax(pair))
        if pair[j] > tol:
            return _infinite_ray(S.rays[j])
    vals = S.points @ xstar
    i = int(np.argmax(vals))
    return SupportValue(FINITE, float(vals[i]), S.points[i].copy())


def _conj_argmax(phi, s):
    """A maximiser of ``s x - phi(x)`` when it exists in closed form."""
    t = phi.tag
    if t == "square":
        return s / 2.0
    if t == "exp":
        return math.log(s) if s > 0 else None
    if t in ("abs", "linear"):
        return 0.0
    if t == "negsqrt":
        return 0.25 / (s * s)
    return 1.0 / math.sqrt(-s) if s < 0 else None


def _graph_sequence(S, xstar):
    """Graph points ``(x, f(x))`` whose pairing with ``xstar`` grows unboundedly."""
    dom = S.phi.domain
    x0 = S.phi.interior_point()
    best = ()
    for side in (1.0, -1.0):
        pts, vals = [], []
        for k in range(41):
            x = x0 + side * 2.0 ** k
            fx = S.f(x)
            if x not in dom or not math.isfinite(fx):
                break
            p = np.array([x, fx])
            pts.append(p)
            vals.append(float(xstar @ p))
        if len(vals) < 4 or not np.all(np.diff(vals[-4:]) > 0):
            continue
        # keep the strictly increasing tail
        start = len(vals) - 1
        while start > 0 and vals[start - 1] < vals[start]:
            start -= 1
        if len(pts) - start > len(best):
            best = tuple(pts[start:])
    return best


def _support_epigraph(S, xstar):
    u, v = xstar
    phi = S.phi
    K = recession_cone(S)
    mu, g = K.max_pairing(xstar)
    if v > 0 or (g is not None and mu > 0):
        return _infinite_ray(np.array([0.0, 1.0]) if v > 0 else g)
    if v == 0:
        dom = phi.domain
        if u == 0:
            return SupportValue(FINITE, 0.0, S.point())
        edge = dom.hi if u > 0 else dom.lo
        if math.isfinite(edge):
            arg = None
            if edge in dom:
                arg = np.array([edge, S.f(edge)])
            return SupportValue(FINITE, float(u * edge), arg)
        return SupportValue(INFINITE, sequence=_graph_sequence(S, xstar))
    s = u / (-v)
    conj = phi.conjugate(s)
    if not math.isfinite(conj):
        return SupportValue(INFINITE, sequence=_graph_sequence(S, xstar))
    value = -v * conj + v * S.shift
    xa = _conj_argmax(phi, s)
    arg = None if xa is None else np.array([xa, S.f(xa)])
    return SupportValue(FINITE, float(value), arg)


def _support_sublevel(S, xstar, tol):
    K = recession_cone(S)
    mu, g = K.max_pairing(xstar)
    if g is not None and mu > tol:
        return _infinite_ray(g)
    x0 = S.point()
    finite_tol = max(tol, 1e-7)
    vals, pts = [], []
    for k in range(31):
        radius = 2.0 ** k
        try:
            p = S.max_linear(xstar, x0, radius)
        except ConvergenceError:
            break
        val = float(xstar @ p)
        vals.append(val)
        pts.append(p)
        if np.linalg.norm(p - x0) < radius * (1 - 1e-6):
            return SupportValue(FINITE, val, p)
        if k >= 4:
            inc = np.diff(vals[-5:])
            scale = 1.0 + abs(val)
            if np.all(inc <= finite_tol * scale * 2.0 ** np.arange(4)[::-1]) and inc[-1] <= finite_tol * scale:
                return SupportValue(FINITE, val, p)
            if k >= 10 and np.all(inc > 1e-6 * scale) and np.all(inc[1:] >= 0.99 * inc[:-1]):
                return SupportValue(INFINITE, sequence=tuple(pts[-8:]))
    raise InconclusiveError("support of sublevel system undecided within budget",
                            lower_bound=vals[-1] if vals else None)


def in_barrier_cone(S, xstar, tol=SUPPORT_TOL) -> bool:
    """True iff the support function is finite at ``xstar``."""
    return support(S, xstar, tol).finite


def recession_check(S, ray, lambdas=(1.0, 10.0, 100.0), tol=1e-7):
    """Membership probes ``c0 + lam * ray`` for a point ``c0`` of ``S``."""
    c0 = S.point()
    return all(S.contains(c0 + lam * np.asarray(ray), tol) for lam in lambdas)


def _far_points(S, radius, count, rng):
    """Points of ``S`` obtained by projecting points on a sphere of the given radius."""
    if S.dim == 2:
        th = np.linspace(0.0, 2 * np.pi, count, endpoint=False)
        D = np.column_stack([np.cos(th), np.sin(th)])
    else:
        D = rng.normal(size=(count, S.dim))
        D /= np.linalg.norm(D, axis=1)[:, None]
    return [S.project(radius * d) for d in D]


def limsup_profile(S, xstar, radii, count=256, seed=0, ascent_steps=20):
    """Estimates of ``sup <xstar, c>/||c||`` over ``c in S`` with ``||c|| ~ R``.

    For each radius the set is probed by projecting a sphere of directions;
    the best few probes are refined by ascent steps along ``xstar`` followed
    by renormalisation to the sphere and re-projection.  Returns the raw
    estimates and their suffix maxima (a nonincreasing sequence).
    """
    if S.is_bounded_rep():
        raise ValueError("set is bounded; the limsup is vacuous")
    xstar = as_vec(xstar, S.dim)
    radii = [float(r) for r in radii]
    if not radii or any(r <= 0 for r in radii) or np.any(np.diff(radii) <= 0):
        raise ValueError("radii must be positive and strictly increasing")
    rng = np.random.default_rng(seed)
    K = recession_cone(S)
    raw = []
    for R in radii:
        cands = _far_points(S, R, count, rng)
        c0 = S.point()
        cands += [c0 + R * np.asarray(g) for g in K.generators]

        def ratio(c):
            nc = np.linalg.norm(c)
            return -np.inf if abs(nc - R) > 0.1 * R else float(xstar @ c) / nc

        scored = sorted(cands, key=ratio, reverse=True)[:8]
        best = max((ratio(c) for c in scored), default=-np.inf)
        step = 0.05 * R
        for c in scored:
            for _ in range(ascent_steps):
                w = c + step * xstar / np.linalg.norm(xstar)
                w = R * w / np.linalg.norm(w)
                c_new = S.project(w)
                if ratio(c_new) > ratio(c):
                    c = c_new
                else:
                    break
            best = max(best, ratio(c))
        if not math.isfinite(best):
            raise InconclusiveError(f"no probe reached the shell of radius {R}")
        raw.append(best)
    smooth = list(np.maximum.accumulate(raw[::-1])[::-1])
    return raw, smooth


def normalized_limsup_estimate(S, xstar, radii, **kwargs) -> float:
    """Numeric probe of ``limsup <xstar, c>/||c||`` as ``||c|| -> inf``.

    The last entry of the smoothed profile from :func:`limsup_profile`.
    A negative value points to an interior direction of the barrier cone.
    """
    _, smooth = limsup_profile(S, xstar, radii, **kwargs)
    return float(smooth[-1])
