"""Closed-form convex functions used to build sets and objectives.

Two families live here:

* :class:`Catalog1D` -- proper convex lsc functions on the real line, each
  with its value, a subgradient, its conjugate (and the conjugate's domain)
  and its horizon function.
* :class:`CatalogFn` subclasses -- functions on R^n (affine, convex
  quadratic, scaled norm, a lifted 1-D entry, and the two-variable
  ``exp(-x) - sqrt(xy)`` on the nonnegative quadrant).  Each exposes the
  value, a subgradient, the closed-form horizon and the polyhedral rows of
  the cone ``{v : f_inf(v) <= 0}``.
"""
import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

INF = math.inf
# stand-in for an infinite partial derivative at the edge of a domain
_GRAD_CAP = 1e6

TAGS_1D = ("square", "exp", "abs", "linear", "negsqrt", "recip")


@dataclass(frozen=True)
class Interval:
    """Real interval with optionally infinite / open endpoints."""

    lo: float = -INF
    hi: float = INF
    lo_closed: bool = False
    hi_closed: bool = False

    def __contains__(self, t):
        if t < self.lo or t > self.hi:
            return False
        if t == self.lo and not self.lo_closed:
            return False
        if t == self.hi and not self.hi_closed:
            return False
        return True

    @property
    def is_open(self):
        return not (self.lo_closed and math.isfinite(self.lo)) and not (
            self.hi_closed and math.isfinite(self.hi)
        )


_R = Interval()


@dataclass(frozen=True)
class Catalog1D:
    """A one-dimensional convex function picked from a fixed list.

    ``tag`` is one of ``square`` (x^2), ``exp``, ``abs``, ``linear``
    (``slope * x``), ``negsqrt`` (``-sqrt(x)`` on x >= 0) and ``recip``
    (``1/x`` on x > 0).
    """

    tag: str
    slope: float = 0.0

    def __post_init__(self):
        if self.tag not in TAGS_1D:
            raise ValueError(f"unknown 1-D catalog tag {self.tag!r}")
        if not math.isfinite(self.slope):
            raise ValueError("slope must be finite")

    @property
    def domain(self) -> Interval:
        if self.tag == "negsqrt":
            return Interval(0.0, INF, True, False)
        if self.tag == "recip":
            return Interval(0.0, INF, False, False)
        return _R

    @property
    def conj_domain(self) -> Interval:
        t = self.tag
        if t == "square":
            return _R
        if t == "exp":
            return Interval(0.0, INF, True, False)
        if t == "abs":
            return Interval(-1.0, 1.0, True, True)
        if t == "linear":
            return Interval(self.slope, self.slope, True, True)
        if t == "negsqrt":
            return Interval(-INF, 0.0, False, False)
        return Interval(-INF, 0.0, False, True)  # recip

    def __call__(self, x):
        x = float(x)
        if x not in self.domain:
            return INF
        t = self.tag
        if t == "square":
            return x * x
        if t == "exp":
            return math.exp(x) if x < 709.0 else INF
        if t == "abs":
            return abs(x)
        if t == "linear":
            return self.slope * x
        if t == "negsqrt":
            return -math.sqrt(x)
        return 1.0 / x

    def values(self, xs):
        """Vectorised ``__call__`` over an array."""
        xs = np.asarray(xs, dtype=float)
        dom = self.domain
        inside = (xs >= dom.lo) & (xs <= dom.hi)
        if not dom.lo_closed:
            inside &= xs != dom.lo
        if not dom.hi_closed:
            inside &= xs != dom.hi
        t = self.tag
        z = np.where(inside, xs, self.interior_point())
        with np.errstate(over="ignore"):
            if t == "square":
                out = z * z
            elif t == "exp":
                out = np.where(z < 709.0, np.exp(np.minimum(z, 709.0)), INF)
            elif t == "abs":
                out = np.abs(z)
            elif t == "linear":
                out = self.slope * z
            elif t == "negsqrt":
                out = -np.sqrt(z)
            else:
                out = 1.0 / z
        return np.where(inside, out, INF)

    def subgradient(self, x):
        x = float(x)
        t = self.tag
        if t == "square":
            return 2.0 * x
        if t == "exp":
            return math.exp(min(x, 700.0))
        if t == "abs":
            return float(np.sign(x))
        if t == "linear":
            return self.slope
        if t == "negsqrt":
            return -0.5 / math.sqrt(x) if x > 0 else -_GRAD_CAP
        return -1.0 / (x * x) if x > 0 else -_GRAD_CAP

    def conjugate(self, s):
        """Fenchel conjugate ``sup_x (s x - phi(x))``."""
        s = float(s)
        if s not in self.conj_domain:
            return INF
        t = self.tag
        if t == "square":
            return 0.25 * s * s
        if t == "exp":
            return s * math.log(s) - s if s > 0 else 0.0
        if t in ("abs", "linear"):
            return 0.0
        if t == "negsqrt":
            return -0.25 / s
        return -2.0 * math.sqrt(-s)

    def horizon_slopes(self) -> Tuple[Optional[float], Optional[float]]:
        """Slopes of the horizon function on t > 0 and t < 0.

        ``None`` marks the side where the horizon is +inf.  Every catalog
        horizon is ``pos*t`` for t >= 0 and ``neg*t`` for t <= 0.
        """
        t = self.tag
        if t == "square":
            return None, None
        if t == "exp":
            return None, 0.0
        if t == "abs":
            return 1.0, -1.0
        if t == "linear":
            return self.slope, self.slope
        return 0.0, None  # negsqrt, recip

    def horizon(self, t):
        pos, neg = self.horizon_slopes()
        t = float(t)
        if t > 0:
            return INF if pos is None else pos * t
        if t < 0:
            return INF if neg is None else neg * t
        return 0.0

    def interior_point(self):
        return 1.0 if self.tag in ("negsqrt", "recip") else 0.0

    def to_dict(self):
        d = {"tag": self.tag}
        if self.tag == "linear":
            d["slope"] = self.slope
        return d

    def cvx(self, t):
        import cvxpy as cp

        tag = self.tag
        if tag == "square":
            return cp.square(t)
        if tag == "exp":
            return cp.exp(t)
        if tag == "abs":
            return cp.abs(t)
        if tag == "linear":
            return self.slope * t
        if tag == "negsqrt":
            return -cp.sqrt(t)
        return cp.inv_pos(t)


def _vec(x):
    x = np.asarray(x, dtype=float).ravel()
    if not np.all(np.isfinite(x)):
        raise ValueError("vectors must have finite entries")
    return x


class CatalogFn:
    """Base class for the n-dimensional catalog functions."""

    kind = "base"
    dim: int

    def __call__(self, x) -> float:
        raise NotImplementedError

    def subgradient(self, x) -> np.ndarray:
        raise NotImplementedError

    def horizon(self, v) -> float:
        """Closed-form horizon value, ``math.inf`` where infinite."""
        raise NotImplementedError

    def zero_cone_rows(self) -> Optional[np.ndarray]:
        """Rows ``H`` with ``{v : f_inf(v) <= 0} = {v : H v <= 0}``, or None."""
        return None

    def in_domain(self, x) -> bool:
        return math.isfinite(self(x))

    def base_points(self):
        """Points of the domain worth probing first."""
        return [np.zeros(self.dim)]

    def into_domain(self, x):
        return np.asarray(x, dtype=float)

    def domain_samples(self, k, seed=0):
        """``k`` deterministic points of the domain, base points first."""
        rng = np.random.default_rng(seed)
        pts = [np.asarray(p, float) for p in self.base_points()]
        pts += [self.into_domain(np.zeros(self.dim))]
        for e in np.eye(self.dim):
            pts.append(self.into_domain(e))
            pts.append(self.into_domain(-e))
        while len(pts) < k:
            pts.append(self.into_domain(rng.normal(scale=3.0, size=self.dim)))
        out = []
        for p in pts:
            if self.in_domain(p) and not any(np.array_equal(p, q) for q in out):
                out.append(p)
        while len(out) < k:
            p = self.into_domain(rng.normal(scale=3.0, size=self.dim))
            if self.in_domain(p):
                out.append(p)
        return out[:k]

    def cvx(self, x):
        """cvxpy expression of the function of the variable ``x``."""
        raise NotImplementedError

    def to_dict(self):
        raise NotImplementedError


class AffineFn(CatalogFn):
    """``a . x + c``."""

    kind = "affine"

    def __init__(self, a, c=0.0):
        self.a = _vec(a)
        self.c = float(c)
        self.dim = self.a.size

    def __call__(self, x):
        return float(self.a @ np.asarray(x, float) + self.c)

    def subgradient(self, x):
        return self.a.copy()

    def horizon(self, v):
        return float(self.a @ np.asarray(v, float))

    def zero_cone_rows(self):
        return self.a[None, :].copy()

    def cvx(self, x):
        return self.a @ x + self.c

    def to_dict(self):
        return {"kind": "affine", "a": self.a.tolist(), "c": self.c}


class ConvexQuadratic(CatalogFn):
    """``x' Q x + b . x + c`` with ``Q`` symmetric positive semidefinite."""

    kind = "quadratic"

    def __init__(self, Q, b=None, c=0.0):
        Q = np.atleast_2d(np.asarray(Q, dtype=float))
        if Q.shape[0] != Q.shape[1] or not np.all(np.isfinite(Q)):
            raise ValueError("Q must be a finite square matrix")
        Q = 0.5 * (Q + Q.T)
        w, U = np.linalg.eigh(Q)
        if w.min(initial=0.0) < -1e-10 * max(1.0, abs(w).max()):
            raise ValueError("Q must be positive semidefinite")
        self.Q = Q
        self.dim = Q.shape[0]
        self.b = np.zeros(self.dim) if b is None else _vec(b)
        self.c = float(c)
        self._range = U[:, w > 1e-10 * max(1.0, abs(w).max())]

    def __call__(self, x):
        x = np.asarray(x, float)
        return float(x @ self.Q @ x + self.b @ x + self.c)

    def subgradient(self, x):
        return 2.0 * self.Q @ np.asarray(x, float) + self.b

    def horizon(self, v):
        v = np.asarray(v, float)
        if np.linalg.norm(self._range.T @ v) > 1e-12 * max(1.0, np.linalg.norm(v)):
            return INF
        return float(self.b @ v)

    def zero_cone_rows(self):
        R = self._range.T
        return np.vstack([R, -R, self.b[None, :]])

    def cvx(self, x):
        import cvxpy as cp

        return cp.quad_form(x, cp.psd_wrap(self.Q)) + self.b @ x + self.c

    def to_dict(self):
        return {"kind": "quadratic", "Q": self.Q.tolist(), "b": self.b.tolist(),
                "c": self.c}


class NormFn(CatalogFn):
    """``weight * ||x - center|| + offset`` (Euclidean norm, weight > 0)."""

    kind = "norm"

    def __init__(self, center, weight=1.0, offset=0.0):
        self.center = _vec(center)
        self.weight = float(weight)
        if not self.weight > 0:
            raise ValueError("weight must be positive")
        self.offset = float(offset)
        self.dim = self.center.size

    def __call__(self, x):
        return float(self.weight * np.linalg.norm(np.asarray(x, float) - self.center)
                     + self.offset)

    def subgradient(self, x):
        d = np.asarray(x, float) - self.center
        nd = np.linalg.norm(d)
        return self.weight * d / nd if nd > 0 else np.zeros(self.dim)

    def horizon(self, v):
        return self.weight * float(np.linalg.norm(v))

    def zero_cone_rows(self):
        eye = np.eye(self.dim)
        return np.vstack([eye, -eye])

    def base_points(self):
        return [self.center.copy()]

    def cvx(self, x):
        import cvxpy as cp

        return self.weight * cp.norm(x - self.center, 2) + self.offset

    def to_dict(self):
        return {"kind": "norm", "center": self.center.tolist(),
                "weight": self.weight, "offset": self.offset}


class Catalog1DLift(CatalogFn):
    """``phi(x[index]) + a . x + c`` for a :class:`Catalog1D` entry ``phi``."""

    kind = "lift"

    def __init__(self, dim, index, phi, a=None, c=0.0):
        self.dim = int(dim)
        self.index = int(index)
        if not 0 <= self.index < self.dim:
            raise ValueError("index out of range")
        self.phi = phi if isinstance(phi, Catalog1D) else Catalog1D(**phi)
        self.a = np.zeros(self.dim) if a is None else _vec(a)
        if self.a.size != self.dim:
            raise ValueError("coefficient vector has the wrong length")
        self.c = float(c)

    def __call__(self, x):
        x = np.asarray(x, float)
        p = self.phi(x[self.index])
        if not math.isfinite(p):
            return INF
        return float(p + self.a @ x + self.c)

    def subgradient(self, x):
        g = self.a.copy()
        g[self.index] += self.phi.subgradient(np.asarray(x, float)[self.index])
        return g

    def horizon(self, v):
        v = np.asarray(v, float)
        h = self.phi.horizon(v[self.index])
        return h if not math.isfinite(h) else float(h + self.a @ v)

    def zero_cone_rows(self):
        pos, neg = self.phi.horizon_slopes()
        e = np.zeros(self.dim)
        e[self.index] = 1.0
        rows = []
        if pos is not None:
            rows.append(pos * e + self.a)
        else:
            rows.append(e)
        if neg is not None:
            rows.append(neg * e + self.a)
        else:
            rows.append(-e)
        if pos is None and neg is None:
            rows.append(self.a.copy())
        return np.array(rows)

    def into_domain(self, x):
        x = np.array(x, dtype=float)
        if self.phi.tag in ("negsqrt", "recip"):
            x[self.index] = abs(x[self.index])
            if self.phi.tag == "recip" and x[self.index] == 0:
                x[self.index] = 1.0
        return x

    def base_points(self):
        p = np.zeros(self.dim)
        p[self.index] = self.phi.interior_point()
        return [p]

    def cvx(self, x):
        return self.phi.cvx(x[self.index]) + self.a @ x + self.c

    def to_dict(self):
        return {"kind": "lift", "dim": self.dim, "index": self.index,
                "phi": self.phi.to_dict(), "a": self.a.tolist(), "c": self.c}


class Ex53Fn(CatalogFn):
    """``exp(-x) - sqrt(x y)`` on the closed nonnegative quadrant, +inf elsewhere."""

    kind = "ex53"
    dim = 2

    def __call__(self, z):
        x, y = (float(t) for t in np.asarray(z, float).ravel())
        if x < 0 or y < 0:
            return INF
        return math.exp(-x) - math.sqrt(x * y)

    def subgradient(self, z):
        x, y = (float(t) for t in np.asarray(z, float).ravel())
        gx = -math.exp(-max(x, 0.0))
        if x > 0 and y > 0:
            return np.array([gx - 0.5 * math.sqrt(y / x), -0.5 * math.sqrt(x / y)])
        # one-sided derivative is -inf across the boundary
        return np.array([gx - (_GRAD_CAP if y > 0 else 0.0),
                         -_GRAD_CAP if x > 0 else 0.0])

    def horizon(self, v):
        u, w = (float(t) for t in np.asarray(v, float).ravel())
        if u < 0 or w < 0:
            return INF
        return -math.sqrt(u * w)

    def zero_cone_rows(self):
        return -np.eye(2)

    def base_points(self):
        return [np.array([1.0, 1.0]), np.array([0.0, 0.0])]

    def into_domain(self, x):
        return np.abs(np.asarray(x, dtype=float))

    def cvx(self, x):
        import cvxpy as cp

        return cp.exp(-x[0]) - cp.geo_mean(x)

    def to_dict(self):
        return {"kind": "ex53"}


def function_from_dict(d, dim=None):
    """Build a :class:`CatalogFn` from its JSON-style description."""
    d = dict(d)
    kind = d.pop("kind")
    if kind == "affine":
        return AffineFn(d["a"], d.get("c", 0.0))
    if kind == "quadratic":
        return ConvexQuadratic(d["Q"], d.get("b"), d.get("c", 0.0))
    if kind == "norm":
        return NormFn(d["center"], d.get("weight", 1.0), d.get("offset", 0.0))
    if kind == "lift":
        return Catalog1DLift(d.get("dim", dim), d["index"], Catalog1D(**d["phi"]),
                             d.get("a"), d.get("c", 0.0))
    if kind == "ex53":
        return Ex53Fn()
    raise ValueError(f"unknown function kind {kind!r}")
