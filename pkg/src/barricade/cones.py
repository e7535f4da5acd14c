"""Recession cones of the set representations.

Every cone is stored as a :class:`ConeRep`.  Polyhedral H-cones
``{v : H v <= 0}`` get their extreme rays (plus a basis of the lineality
space, in both signs) enumerated eagerly; the sizes here are small.
"""
import itertools
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.linalg import null_space

from .lp import linprog_max
from .sets import Ball, Epigraph1D, HPolyhedron, SublevelSystem, VSet

POLY_H = "polyhedral_h"
POLY_V = "polyhedral_v"
SAMPLED = "sampled"


def _dedupe(vectors, tol=1e-9):
    out = []
    for v in vectors:
        if not any(np.linalg.norm(v - w) <= tol for w in out):
            out.append(v)
    return out


def _unit(g):
    g = g / np.linalg.norm(g)
    g[np.abs(g) < 1e-15] = 0.0
    return g + 0.0  # no negative zeros in reports


def cone_generators(H, tol=1e-10):
    """Unit generators of ``{v : H v <= 0}``.

    Returns ``(generators, lineality)`` where ``lineality`` is an
    orthonormal basis (columns) of the lineality space.  The cone equals the
    conic hull of the generators, which include ``+-`` every lineality
    basis vector.
    """
    H = np.atleast_2d(np.asarray(H, float))
    m, n = H.shape
    L = null_space(H) if m else np.eye(n)
    gens = []
    for col in L.T:
        gens.extend([col, -col])
    E = L.T
    rankE = L.shape[1]
    k = n - 1 - rankE
    scale = max(1.0, np.abs(H).max(initial=0.0))
    if k >= 0:
        for S in itertools.combinations(range(m), k):
            M = np.vstack([E, H[list(S)]]) if S or rankE else np.zeros((0, n))
            if M.shape[0] and np.linalg.matrix_rank(M, tol=1e-10 * scale) != n - 1:
                continue
            N = null_space(M) if M.shape[0] else np.eye(n)
            if N.shape[1] != 1:
                continue
            d = N[:, 0]
            for s in (1.0, -1.0):
                if np.all(H @ (s * d) <= tol * scale):
                    gens.append(s * d)
    gens = [_unit(g) for g in gens]
    return _dedupe(gens), L


@dataclass(frozen=True)
class ConeRep:
    """A convex cone given by inequalities, generators or samples.

    ``kind`` is ``polyhedral_h`` (``H`` set, generators derived),
    ``polyhedral_v`` (generators given) or ``sampled`` (a certified subset:
    directions that lie in the cone, not an exhaustive description).
    """

    kind: str
    generators: tuple
    H: Optional[np.ndarray] = None
    lineality: Optional[np.ndarray] = None
    exhaustive: bool = True
    meta: dict = field(default_factory=dict)

    @classmethod
    def from_inequalities(cls, H):
        H = np.atleast_2d(np.asarray(H, float))
        gens, L = cone_generators(H)
        return cls(POLY_H, tuple(gens), H=H, lineality=L)

    @classmethod
    def from_generators(cls, gens, dim):
        gens = [np.asarray(g, float) / np.linalg.norm(g) for g in gens]
        G = np.array(gens).reshape(-1, dim)
        L = np.zeros((dim, 0))
        if len(G):
            # lineality of a finitely generated cone: directions whose negative is also in it
            Lcols = [g for g in gens if _in_vcone(-g, G)]
            if Lcols:
                L = np.linalg.qr(np.array(Lcols).T)[0][:, : np.linalg.matrix_rank(np.array(Lcols))]
        return cls(POLY_V, tuple(_dedupe(gens)), lineality=L)

    @classmethod
    def sampled(cls, directions):
        return cls(SAMPLED, tuple(_dedupe([np.asarray(d, float) for d in directions])),
                   exhaustive=False)

    @property
    def dim_generators(self):
        return len(self.generators)

    def is_zero(self):
        return self.exhaustive and len(self.generators) == 0

    def is_pointed(self):
        return self.lineality is None or self.lineality.shape[1] == 0

    def contains(self, v, tol=1e-9):
        v = np.asarray(v, float)
        if self.kind == POLY_H:
            return bool(np.all(self.H @ v <= tol * max(1.0, np.linalg.norm(v))))
        if not len(self.generators):
            return bool(np.linalg.norm(v) <= tol)
        return _in_vcone(v, np.array(self.generators), tol)

    def max_pairing(self, xstar):
        """``(mu, g)``: the largest ``<xstar, g>`` over unit generators."""
        if not self.generators:
            return -np.inf, None
        vals = [float(np.dot(xstar, g)) for g in self.generators]
        i = int(np.argmax(vals))
        return vals[i], self.generators[i]

    def to_dict(self):
        d = {"kind": self.kind, "generators": [g.tolist() for g in self.generators],
             "exhaustive": self.exhaustive}
        if self.H is not None:
            d["H"] = self.H.tolist()
        return d


def _in_vcone(v, G, tol=1e-9):
    """Is ``v`` a nonnegative combination of the rows of ``G``?"""
    from scipy.optimize import nnls

    coef, res = nnls(G.T, np.asarray(v, float))
    return bool(res <= tol * max(1.0, np.linalg.norm(v)))


def intersect(K1, K2):
    """Intersection of two exhaustive cones as an H-cone (or sampled)."""
    H1, H2 = _as_h(K1), _as_h(K2)
    if H1 is None or H2 is None:
        dirs = [g for g in K1.generators if K2.contains(g)]
        dirs += [g for g in K2.generators if K1.contains(g)]
        return ConeRep.sampled(dirs)
    return ConeRep.from_inequalities(np.vstack([H1, H2]))


def _as_h(K):
    """H-description of a cone, computing one for V-cones in low dimension."""
    if K.kind == POLY_H:
        return K.H
    if K.kind == SAMPLED:
        return None
    n = K.lineality.shape[0]
    G = np.array(K.generators).reshape(-1, n)
    if len(G) == 0:
        eye = np.eye(n)
        return np.vstack([eye, -eye])
    # facets of cone(G) are the generators of the polar {y : G y <= 0}
    polar_gens, _ = cone_generators(G)
    if not polar_gens:
        return np.zeros((1, n))  # cone(G) is the whole space
    return np.array(polar_gens)


def polar(K):
    """Polar cone ``{y : <y, v> <= 0 for all v in K}`` as a :class:`ConeRep`."""
    if K.kind == SAMPLED:
        raise ValueError("polar of a sampled cone is not certified")
    n = K.lineality.shape[0] if K.lineality is not None else K.H.shape[1]
    G = np.array(K.generators).reshape(-1, n)
    if len(G) == 0:
        return ConeRep.from_generators(list(np.eye(n)) + list(-np.eye(n)), n)
    return ConeRep.from_inequalities(G)


def recession_cone(S) -> ConeRep:
    """Recession cone of a set in any of the five representations."""
    if isinstance(S, HPolyhedron):
        return ConeRep.from_inequalities(S.A)
    if isinstance(S, VSet):
        return ConeRep.from_generators(list(S.rays), S.dim)
    if isinstance(S, Ball):
        return ConeRep.from_generators([], S.dim)
    if isinstance(S, Epigraph1D):
        return ConeRep.from_inequalities(S.as_constraint().zero_cone_rows())
    if isinstance(S, SublevelSystem):
        rows = S.recession_rows()
        if rows is not None:
            return ConeRep.from_inequalities(rows)
        return _sampled_recession(S)
    raise TypeError(f"unsupported set type {type(S).__name__}")


def _sampled_recession(S, count=256, seed=0):
    rng = np.random.default_rng(seed)
    D = rng.normal(size=(count, S.dim))
    D /= np.linalg.norm(D, axis=1)[:, None]
    keep = [d for d in D if all(f.horizon(d) <= 0 for f in S.constraints)]
    return ConeRep.sampled(keep)


def common_direction(K1, K2):
    """A nonzero unit vector in both cones, or None.

    Exact for exhaustive cones via the intersection's generators.
    """
    K = intersect(K1, K2)
    if K.generators:
        return K.generators[0]
    return None


def pointed_certificate(K):
    """A unit ``y`` with ``<y, g> < 0`` on every generator, or None.

    Such a ``y`` exists exactly when the cone is pointed, i.e. when its polar
    has interior points.
    """
    if not K.generators:
        return None
    G = np.array(K.generators)
    n = G.shape[1]
    # maximise t subject to G y + t <= 0, -1 <= y <= 1, t <= 1
    A = np.vstack([np.hstack([G, np.ones((len(G), 1))]),
                   np.hstack([np.eye(n), np.zeros((n, 1))]),
                   np.hstack([-np.eye(n), np.zeros((n, 1))]),
                   np.eye(n + 1)[-1:]])
    b = np.concatenate([np.zeros(len(G)), np.ones(2 * n), [1.0]])
    c = np.zeros(n + 1)
    c[-1] = 1.0
    res = linprog_max(c, A, b)
    if res.status != "optimal" or res.value <= 1e-9:
        return None
    y = res.x[:n]
    return y / np.linalg.norm(y)
