"""Barrier-cone classification and the strong separation property.

In R^n the interior of the barrier cone equals the interior of the polar of
the recession cone, so deciding ``x* in Int barc(S)`` reduces to the sign of
``max <x*, g>`` over unit recession generators ``g``.  Every interior
verdict is cross-checked against the growth criterion
``<x*, c> <= -alpha ||c||`` on sampled far points of the set.
"""
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.linalg import qr
from scipy.stats import norm as normal_dist
from scipy.stats import qmc

from .cones import SAMPLED, polar, recession_cone
from .errors import InconclusiveError
from .sets import Epigraph1D, HPolyhedron, SublevelSystem, VSet, as_vec
from .support import support

INTERIOR = "InteriorPoint"
BOUNDARY = "BoundaryPoint"
OUTSIDE = "Outside"

HAS_SSP = "HasSSP"
LACKS_SSP = "LacksSSP"
INCONCLUSIVE = "Inconclusive"

CONE_TOL = 1e-7
SCAN_RADII = (10.0, 100.0, 1000.0)


@dataclass(frozen=True)
class BarrierClassification:
    """Position of ``x*`` relative to the barrier cone.

    ``InteriorPoint`` carries ``alpha`` and ``R`` with ``<x*, c> <= -alpha ||c||``
    for sampled ``c`` in the set with ``||c|| >= R``.  ``Outside`` carries a
    recession ray with positive pairing when one exists.
    """

    verdict: str
    alpha: Optional[float] = None
    R: Optional[float] = None
    ray: Optional[np.ndarray] = None
    margin: Optional[float] = None

    def to_dict(self):
        d = {"verdict": self.verdict}
        for key in ("alpha", "R", "margin"):
            val = getattr(self, key)
            if val is not None:
                d[key] = val
        if self.ray is not None:
            d["ray"] = self.ray.tolist()
        return d


@dataclass(frozen=True)
class SspVerdict:
    verdict: str
    witness: Optional[np.ndarray] = None
    rationale: str = ""

    def to_dict(self):
        d = {"verdict": self.verdict, "rationale": self.rationale}
        if self.witness is not None:
            d["witness"] = self.witness.tolist()
        return d


def sphere_directions(dim, count, seed=0):
    """Scrambled Sobol points pushed to the unit sphere."""
    m = max(1, math.ceil(math.log2(count)))
    U = qmc.Sobol(dim, scramble=True, seed=seed).random_base2(m)[:count]
    D = normal_dist.ppf(np.clip(U, 1e-12, 1 - 1e-12))
    return D / np.linalg.norm(D, axis=1)[:, None]


def _growth_samples(S, K, radius, count, seed):
    """Points of ``S`` at distance about ``radius`` from the origin."""
    c0 = S.point()
    pts = [c0 + radius * np.asarray(g) for g in K.generators]
    for d in sphere_directions(S.dim, count, seed):
        pts.append(S.project(radius * d))
    return pts


def _violations(xstar, alpha, pts, R):
    out = []
    for c in pts:
        nc = np.linalg.norm(c)
        if nc >= R and xstar @ c > -alpha * nc:
            out.append(nc)
    return out


def _bounded_radius(S):
    """A radius enclosing a bounded set, from its support in the axis directions."""
    ext = []
    for e in np.eye(S.dim):
        hi = support(S, e).value
        lo = -support(S, -e).value
        ext.append(max(abs(hi), abs(lo)))
    return float(np.linalg.norm(ext)) + 1.0


def _criterion_radius(S, K, xstar, alpha, count=32, seed=0):
    """Smallest scanned ``R`` for which the growth criterion holds on samples."""
    near = []
    for r in (1.0, 3.0):
        near += _growth_samples(S, K, r, count, seed)
    bad = _violations(xstar, alpha, near, 0.0)
    R = max(1.0, 2.0 * max(bad, default=0.0))
    for _ in range(8):
        far = []
        for t in SCAN_RADII:
            far += _growth_samples(S, K, t * R, count, seed)
        bad = _violations(xstar, alpha, far, R)
        if not bad:
            return R
        R = 2.0 * max(bad)
    return None


def classify_barrier(S, xstar, tol=CONE_TOL, seed=0, validate=True) -> BarrierClassification:
    """Is ``xstar`` interior to, on the boundary of, or outside ``barc(S)``?

    ``validate=False`` skips the growth-criterion scan (used for bulk sampling).
    """
    xstar = as_vec(xstar, S.dim)
    if not np.any(xstar):
        raise ValueError("xstar must be nonzero; 0 is interior iff the set is bounded")
    K = recession_cone(S)
    if K.is_zero() or S.is_bounded_rep():
        R = _bounded_radius(S) if validate else None
        return BarrierClassification(INTERIOR, alpha=0.5 * float(np.linalg.norm(xstar)),
                                     R=R, margin=-math.inf)
    mu, g = K.max_pairing(xstar)
    if mu > tol:
        return BarrierClassification(OUTSIDE, ray=np.asarray(g), margin=mu)
    sampled = K.kind == SAMPLED
    if mu < -tol:
        alpha = -0.5 * mu
        if not validate:
            return BarrierClassification(INTERIOR, alpha=alpha, margin=mu)
        R = _criterion_radius(S, K, xstar, alpha, seed=seed)
        if R is None:
            if sampled:
                raise InconclusiveError("sampled cone margin not confirmed by the growth scan")
            raise AssertionError("growth criterion failed on an exact interior verdict")
        return BarrierClassification(INTERIOR, alpha=alpha, R=R, margin=mu)
    if sampled:
        raise InconclusiveError("sampled recession cone leaves the margin undecided")
    sv = support(S, xstar)
    if sv.finite:
        return BarrierClassification(BOUNDARY, margin=mu)
    return BarrierClassification(OUTSIDE, ray=sv.ray, margin=mu)


def _affine_hull_normal(S, tol=1e-9, seed=0):
    """A unit normal of the affine hull of ``S`` when it is not all of R^n."""
    n = S.dim
    rng = np.random.default_rng(seed)
    c0 = S.point()
    scale = 10.0 * max(1.0, float(np.linalg.norm(c0)))
    targets = [c0 + scale * s * e for e in np.eye(n) for s in (1.0, -1.0)]
    targets += [c0 + scale * rng.normal(size=n) for _ in range(2)]
    P = np.array([S.project(t) for t in targets])
    D = (P - P[0]).T
    _, Rm, piv = qr(D, pivoting=True)
    diag = np.abs(np.diag(Rm))
    big = max(1.0, diag.max(initial=0.0))
    rank = int(np.sum(diag > tol * big))
    if rank >= n:
        return None
    U, _, _ = np.linalg.svd(D)
    w = U[:, -1]
    j = np.flatnonzero(np.abs(w) > 1e-12)[0]
    return w * np.sign(w[j])


def _canonical(w):
    w = np.asarray(w, float)
    w = w / np.linalg.norm(w)
    w[np.abs(w) < 1e-15] = 0.0
    return w


def _polyhedral_witness(S, K, tol):
    P = polar(K)
    if not P.generators:
        return None
    G = np.array(K.generators)
    for y in P.generators:
        if np.max(G @ y) >= -tol:
            return _canonical(y)
    return None


def _epigraph_witness(S):
    phi = S.phi
    cd = phi.conj_domain
    for e, closed in ((cd.lo, cd.lo_closed), (cd.hi, cd.hi_closed)):
        if closed and math.isfinite(e):
            return _canonical([e, -1.0])
    dom = phi.domain
    if math.isfinite(dom.lo):
        return np.array([-1.0, 0.0])
    if math.isfinite(dom.hi):
        return np.array([1.0, 0.0])
    return None


def ssp_verdict(S, tol=CONE_TOL, seed=0, samples=256) -> SspVerdict:
    """Decide whether ``barc(S) = Int barc(S) U {0}``."""
    if S.is_bounded_rep():
        return SspVerdict(HAS_SSP, rationale="bounded")
    K = recession_cone(S)
    if K.is_zero():
        return SspVerdict(HAS_SSP, rationale="bounded")
    w = _affine_hull_normal(S, seed=seed)
    if w is not None:
        return SspVerdict(LACKS_SSP, _canonical(w), "affine_hull_deficient")
    if isinstance(S, (HPolyhedron, VSet)):
        y = _polyhedral_witness(S, K, tol)
        if y is None:
            return SspVerdict(HAS_SSP, rationale="trivial_barrier_cone")
        return SspVerdict(LACKS_SSP, y, "polyhedral_boundary_generator")
    if isinstance(S, Epigraph1D):
        y = _epigraph_witness(S)
        if y is None:
            return SspVerdict(HAS_SSP, rationale="conjugate_domain")
        return SspVerdict(LACKS_SSP, y, "conjugate_domain")
    if isinstance(S, SublevelSystem):
        cands = []
        if K.kind != SAMPLED:
            cands += list(polar(K).generators)
        cands += list(sphere_directions(S.dim, samples, seed))
        for y in cands:
            try:
                cl = classify_barrier(S, y, tol, seed=seed, validate=False)
            except InconclusiveError:
                continue
            if cl.verdict == BOUNDARY:
                return SspVerdict(LACKS_SSP, _canonical(y), "sampled_boundary")
        return SspVerdict(INCONCLUSIVE, rationale="sampled_no_boundary")
    raise TypeError(f"unsupported set type {type(S).__name__}")
