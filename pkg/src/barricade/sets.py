"""Closed convex sets in R^n with membership and projection oracles."""
import math
import threading
import warnings

import numpy as np
from scipy.optimize import minimize_scalar, nnls

from .catalog import Catalog1D, Catalog1DLift, CatalogFn
from .errors import ConvergenceError, DimensionError, EmptySetError
from .lp import is_feasible, linprog_max

MEMBERSHIP_TOL = 1e-9
PROJECTION_TOL = 1e-8
MAX_ITER = 10000
DYKSTRA_PATIENCE = 30


def as_vec(x, dim=None):
    """Validate and convert ``x`` to a finite 1-D float array."""
    x = np.asarray(x, dtype=float).ravel()
    if x.size == 0 or not np.all(np.isfinite(x)):
        raise ValueError("vectors must be nonempty with finite entries")
    if dim is not None and x.size != dim:
        raise DimensionError(f"expected dimension {dim}, got {x.size}")
    return x


class ConvexSet:
    """Common interface of the five set representations."""

    kind = "abstract"
    dim: int

    def contains(self, x, tol=MEMBERSHIP_TOL) -> bool:
        raise NotImplementedError

    def project(self, x, tol=PROJECTION_TOL, max_iter=MAX_ITER) -> np.ndarray:
        raise NotImplementedError

    def is_bounded_rep(self):
        """True / False when the representation decides it, else None."""
        return None

    def point(self) -> np.ndarray:
        """Some point of the set."""
        raise NotImplementedError

    def to_dict(self):
        raise NotImplementedError

    def cvx_constraints(self, x):
        """cvxpy constraints stating ``x in S`` (may introduce auxiliary variables)."""
        raise NotImplementedError

    def _check(self, x):
        return as_vec(x, self.dim)


# -- polyhedra --------------------------------------------------------------

def _polish_polyhedron(A, b, x, p, tol):
    """Guess the active set at ``p`` and solve the equality-constrained problem.

    Returns the exact projection when the KKT conditions check out, else None.
    """
    slack = A @ p - b
    active = list(np.flatnonzero(slack >= -1e3 * tol))
    for _ in range(A.shape[0] + 1):
        if not active:
            q = x.copy()
            y = np.zeros(0)
        else:
            As = A[active]
            y, *_ = np.linalg.lstsq(As @ As.T, As @ x - b[active], rcond=None)
            q = x - As.T @ y
            if np.max(np.abs(As @ q - b[active])) > 0.01 * tol:
                return None  # inconsistent active set
        if np.max(A @ q - b) > 0.01 * tol:
            return None
        if y.size and y.min() < -1e-12:
            active.pop(int(np.argmin(y)))
            continue
        return q
    return None


def _independent_rows(A, rows, tol=1e-10):
    keep = []
    for i in rows:
        trial = keep + [i]
        if np.linalg.matrix_rank(A[trial], tol=tol) == len(trial):
            keep = trial
    return keep


def _active_set_projection(A, b, x, z):
    """Primal active-set QP for the projection, started at a feasible ``z``."""
    m = A.shape[0]
    W = _independent_rows(A, list(np.flatnonzero(A @ z - b >= -1e-12)))
    for _ in range(20 * (m + x.size) + 20):
        if W:
            Aw = A[W]
            lam, *_ = np.linalg.lstsq(Aw.T, x - z, rcond=None)
            # a full-rank working set pins z; drop roundoff in p
            full = len(W) >= z.size and np.linalg.matrix_rank(Aw) == z.size
            p = np.zeros_like(z) if full else (x - z) - Aw.T @ lam
        else:
            lam, p = np.zeros(0), x - z
        if np.linalg.norm(p) <= 1e-12 * max(1.0, np.linalg.norm(x), np.linalg.norm(z)):
            neg = [j for j in range(len(W)) if lam[j] < -1e-12]
            if not neg:
                return z
            # Bland's rule (lowest constraint index) rules out degenerate cycling
            W.pop(min(neg, key=lambda j: W[j]))
            continue
        Ap = A @ p
        alpha, block = 1.0, None
        # rows in the span of W pair with p only through roundoff
        for i in range(m):
            if i not in W and Ap[i] > 1e-12 * np.linalg.norm(p):
                step = (b[i] - A[i] @ z) / Ap[i]
                if step < alpha:
                    alpha, block = max(step, 0.0), i
        z = z + alpha * p
        if block is not None:
            W.append(block)
    raise ConvergenceError("active-set projection cycled", best=z,
                           residual=float(np.max(A @ z - b)))


def project_polyhedron(A, b, x, tol=PROJECTION_TOL, max_iter=MAX_ITER):
    """Euclidean projection onto ``{z : A z <= b}`` (rows of ``A`` unit length).

    Cyclic Dykstra over the halfspaces, with periodic active-set polishing
    that returns the exact projection as soon as the KKT conditions verify.
    Thin wedges can make Dykstra crawl; after ``DYKSTRA_PATIENCE`` sweeps an
    exact primal active-set solve takes over.
    """
    if np.all(A @ x - b <= 0):
        return x.copy()
    m = A.shape[0]
    z = x.copy()
    incr = np.zeros((m, x.size))
    for it in range(1, min(max_iter, DYKSTRA_PATIENCE) + 1):
        for i in range(m):
            w = z + incr[i]
            viol = A[i] @ w - b[i]
            z = w - max(viol, 0.0) * A[i]
            incr[i] = w - z
        if it % 5 == 1:
            q = _polish_polyhedron(A, b, x, z, tol)
            if q is not None:
                return q
    # small Dykstra steps do not mean convergence, so only verified points return
    return _active_set_projection(A, b, x, _start_point(A, b))


def _start_point(A, b):
    """A feasible point, strictly inside when the polyhedron has interior.

    Starting at a degenerate vertex (say a cone apex) lets the active-set
    method stall among redundant active rows.
    """
    n = A.shape[1]
    Ai = np.hstack([A, np.ones((A.shape[0], 1))])
    cap = np.zeros((1, n + 1))
    cap[0, -1] = 1.0
    c = np.zeros(n + 1)
    c[-1] = 1.0
    res = linprog_max(c, np.vstack([Ai, cap]), np.append(b, 1.0))
    if res.status == "infeasible" or res.x[-1] < -1e-9:
        raise EmptySetError("polyhedron is empty")
    if res.x[-1] > 1e-9:
        return res.x[:-1]
    return is_feasible(A, b)[1]


class HPolyhedron(ConvexSet):
    """``{x : A x <= b}``.  Zero rows are dropped, others scaled to unit norm."""

    kind = "hpoly"

    def __init__(self, A, b):
        A = np.atleast_2d(np.asarray(A, dtype=float))
        b = np.asarray(b, dtype=float).ravel()
        if A.shape[0] != b.size or not (np.all(np.isfinite(A)) and np.all(np.isfinite(b))):
            raise ValueError("A and b must be finite with matching rows")
        norms = np.linalg.norm(A, axis=1)
        zero = norms == 0
        if np.any(b[zero] < 0):
            raise EmptySetError("a zero row with negative right-hand side")
        keep = ~zero
        if not keep.any():
            raise ValueError("at least one nonzero row is required")
        self.A = A[keep] / norms[keep, None]
        self.b = b[keep] / norms[keep]
        self.dim = A.shape[1]
        ok, x0 = is_feasible(self.A, self.b)
        if not ok:
            raise EmptySetError("polyhedron is empty")
        self._point = x0
        self._bounded = None

    def contains(self, x, tol=MEMBERSHIP_TOL):
        x = self._check(x)
        return bool(np.max(self.A @ x - self.b) <= tol)

    def project(self, x, tol=PROJECTION_TOL, max_iter=MAX_ITER):
        return project_polyhedron(self.A, self.b, self._check(x), tol, max_iter)

    def is_bounded_rep(self):
        if self._bounded is None:
            self._bounded = HPolyCone(self.A).is_zero()
        return self._bounded

    def point(self):
        return self._point.copy()

    def to_dict(self):
        return {"kind": "hpoly", "A": self.A.tolist(), "b": self.b.tolist()}

    def cvx_constraints(self, x):
        return [self.A @ x <= self.b]


# -- V-representation -------------------------------------------------------

def _project_simplex(v):
    """Euclidean projection onto the probability simplex."""
    u = np.sort(v)[::-1]
    css = np.cumsum(u)
    k = np.arange(1, v.size + 1)
    rho = np.nonzero(u * k > css - 1)[0][-1]
    theta = (css[rho] - 1) / (rho + 1.0)
    return np.maximum(v - theta, 0)


class VSet(ConvexSet):
    """``conv(points) + cone(rays)``; rays are stored with unit length."""

    kind = "vset"

    def __init__(self, points, rays=()):
        P = np.atleast_2d(np.asarray(points, dtype=float))
        if P.size == 0 or not np.all(np.isfinite(P)):
            raise EmptySetError("VSet needs at least one finite point")
        self.dim = P.shape[1]
        R = np.asarray(rays, dtype=float).reshape(-1, self.dim) if len(rays) else np.zeros((0, self.dim))
        if not np.all(np.isfinite(R)):
            raise ValueError("rays must be finite")
        nr = np.linalg.norm(R, axis=1)
        if np.any(nr == 0):
            raise ValueError("rays must be nonzero")
        self.points = P
        self.rays = R / nr[:, None] if len(R) else R

    def _coefficients(self, x, tol, max_iter):
        P, R = self.points, self.rays
        k, r = len(P), len(R)
        M = np.vstack([P, R]).T
        # Lawson-Hanson NNLS with a heavy row for sum(lam) = 1 yields a basic
        # solution; the KKT polish then makes it exact
        rho = 1e3 * max(1.0, np.abs(M).max(), np.abs(x).max())
        E = np.vstack([M, rho * np.r_[np.ones(k), np.zeros(r)]])
        try:
            w0, _ = nnls(E, np.r_[x, rho], maxiter=50 * (k + r))
        except RuntimeError:
            w0 = None
        if w0 is not None:
            q = self._polish(M, k, x, w0)
            if q is not None:
                return q
        L = max(np.linalg.norm(M, 2) ** 2, 1e-12)
        lam = np.full(k, 1.0 / k)
        mu = np.zeros(r)
        z = np.concatenate([lam, mu])
        yk, t = z.copy(), 1.0
        for it in range(1, max_iter + 1):
            g = M.T @ (M @ yk - x)
            w = yk - g / L
            znew = np.concatenate([_project_simplex(w[:k]), np.maximum(w[k:], 0)])
            tnew = 0.5 * (1 + math.sqrt(1 + 4 * t * t))
            yk = znew + (t - 1) / tnew * (znew - z)
            step = np.linalg.norm(znew - z)
            z, t = znew, tnew
            if it % 10 == 0:
                q = self._polish(M, k, x, z)
                if q is not None:
                    return q
            if step < 1e-14:
                break
        q = self._polish(M, k, x, z)
        return q if q is not None else z

    @staticmethod
    def _polish(M, k, x, z):
        """Exact least squares on the support of ``z``; None unless KKT holds."""
        supp = np.flatnonzero(z > 1e-12)
        sl = supp[supp < k]
        sr = supp[supp >= k]
        if sl.size == 0:
            return None
        cols = np.concatenate([sl, sr])
        Ms = M[:, cols]
        # [Ms'Ms  e; e' 0] [z; nu] = [Ms'x; 1] with e marking the point weights
        e = np.zeros(cols.size)
        e[: sl.size] = 1.0
        K = np.block([[Ms.T @ Ms, e[:, None]], [e[None, :], np.zeros((1, 1))]])
        rhs = np.concatenate([Ms.T @ x, [1.0]])
        sol, *_ = np.linalg.lstsq(K, rhs, rcond=None)
        zs = sol[:-1]
        if zs.min() < -1e-13:
            return None
        zf = np.zeros_like(z)
        zf[cols] = np.maximum(zs, 0)
        zf[:k] /= zf[:k].sum()
        g = M.T @ (M @ zf - x)
        scale = 1e-9 * max(1.0, np.linalg.norm(x), np.abs(M).max())
        gp = g[:k]
        nu = gp[sl].mean()
        if np.any(gp < nu - scale) or np.any(g[k:] < -scale):
            return None
        return zf

    def project(self, x, tol=PROJECTION_TOL, max_iter=MAX_ITER):
        x = self._check(x)
        z = self._coefficients(x, tol, max_iter)
        return np.vstack([self.points, self.rays]).T @ z

    def contains(self, x, tol=MEMBERSHIP_TOL):
        x = self._check(x)
        return bool(np.linalg.norm(self.project(x) - x) <= tol)

    def is_bounded_rep(self):
        return len(self.rays) == 0

    def point(self):
        return self.points[0].copy()

    def to_dict(self):
        return {"kind": "vset", "points": self.points.tolist(),
                "rays": self.rays.tolist()}

    def cvx_constraints(self, x):
        import cvxpy as cp

        lam = cp.Variable(len(self.points), nonneg=True)
        expr = self.points.T @ lam
        cons = [cp.sum(lam) == 1]
        if len(self.rays):
            mu = cp.Variable(len(self.rays), nonneg=True)
            expr = expr + self.rays.T @ mu
        return cons + [x == expr]


# -- ball -------------------------------------------------------------------

class Ball(ConvexSet):
    """Closed Euclidean ball."""

    kind = "ball"

    def __init__(self, center, radius):
        self.center = as_vec(center)
        self.radius = float(radius)
        if not (math.isfinite(self.radius) and self.radius > 0):
            raise ValueError("radius must be positive and finite")
        self.dim = self.center.size

    def contains(self, x, tol=MEMBERSHIP_TOL):
        x = self._check(x)
        return bool(np.linalg.norm(x - self.center) <= self.radius + tol)

    def project(self, x, tol=PROJECTION_TOL, max_iter=MAX_ITER):
        x = self._check(x)
        d = x - self.center
        nd = np.linalg.norm(d)
        if nd <= self.radius:
            return x.copy()
        return self.center + self.radius * d / nd

    def is_bounded_rep(self):
        return True

    def point(self):
        return self.center.copy()

    def to_dict(self):
        return {"kind": "ball", "center": self.center.tolist(), "radius": self.radius}

    def cvx_constraints(self, x):
        import cvxpy as cp

        return [cp.norm(x - self.center, 2) <= self.radius]


# -- epigraph of a 1-D catalog function ---------------------------------------

class Epigraph1D(ConvexSet):
    """``{(x, y) : y >= phi(x) + shift}`` in R^2."""

    kind = "epigraph1d"
    dim = 2

    def __init__(self, phi, shift=0.0):
        self.phi = phi if isinstance(phi, Catalog1D) else Catalog1D(**phi)
        self.shift = float(shift)
        if not math.isfinite(self.shift):
            raise ValueError("shift must be finite")

    def f(self, x):
        return self.phi(x) + self.shift

    def contains(self, x, tol=MEMBERSHIP_TOL):
        x = self._check(x)
        fx = self.f(x[0])
        if math.isfinite(fx) and x[1] >= fx - tol:
            return True
        return bool(np.linalg.norm(self.project(x) - x) <= tol)

    def project(self, x, tol=PROJECTION_TOL, max_iter=MAX_ITER):
        x = self._check(x)
        a, b = x
        fa = self.f(a)
        if math.isfinite(fa) and b >= fa:
            return x.copy()
        dom = self.phi.domain
        candidates = []
        # vertical boundary rays sit above closed finite endpoints
        for e, closed in ((dom.lo, dom.lo_closed), (dom.hi, dom.hi_closed)):
            if closed and math.isfinite(e):
                candidates.append(np.array([e, max(b, self.f(e))]))
        ref = a if a in dom else self.phi.interior_point()
        ref_pt = np.array([ref, max(b, self.f(ref))])
        candidates.append(ref_pt)
        r = min(np.linalg.norm(c - x) for c in candidates)
        lo = max(a - r, dom.lo)
        hi = min(a + r, dom.hi)
        if not dom.lo_closed and lo == dom.lo:
            lo = dom.lo + max(1e-300, 1e-15 * abs(hi - lo))
        if not dom.hi_closed and hi == dom.hi:
            hi = dom.hi - 1e-15 * abs(hi - lo)

        def g(t):
            ft = self.f(t)
            if not abs(ft) < 1e150:
                return math.inf
            return (t - a) ** 2 + (ft - b) ** 2

        if hi > lo:
            grid = np.linspace(lo, hi, 401)
            fg = self.phi.values(grid) + self.shift
            with np.errstate(over="ignore", invalid="ignore"):
                vals = np.where(np.abs(fg) < 1e150, (grid - a) ** 2 + (fg - b) ** 2, np.inf)
            i = int(np.argmin(vals))
            left, right = grid[max(i - 1, 0)], grid[min(i + 1, grid.size - 1)]
            if right > left:
                res = minimize_scalar(g, bounds=(left, right), method="bounded",
                                      options={"xatol": 1e-14 * max(1.0, abs(a)),
                                               "maxiter": 500})
                t = res.x if res.fun <= vals[i] else grid[i]
            else:
                t = grid[i]
            candidates.append(np.array([t, self.f(t)]))
        return min(candidates, key=lambda c: np.linalg.norm(c - x))

    def is_bounded_rep(self):
        return False

    def point(self):
        t = self.phi.interior_point()
        return np.array([t, self.f(t)])

    def to_dict(self):
        return {"kind": "epigraph1d", "phi": self.phi.to_dict(), "shift": self.shift}

    def cvx_constraints(self, x):
        return [self.phi.cvx(x[0]) + self.shift <= x[1]]

    def as_constraint(self) -> CatalogFn:
        """The same set written as ``phi(x) - y + shift <= 0``."""
        return Catalog1DLift(2, 0, self.phi, a=[0.0, -1.0], c=self.shift)


# -- sublevel systems -------------------------------------------------------

def quiet_solve(prob, **opts):
    # accuracy is checked by the callers (residual pull-back), not by warnings
    import cvxpy as cp

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", UserWarning)
        prob.solve(solver=cp.CLARABEL, **opts)


class SublevelSystem(ConvexSet):
    """``{x : f_i(x) <= 0 for all i}`` for catalog functions ``f_i``.

    Projection and support subproblems are solved with cvxpy; the compiled
    problems are cached per instance and guarded by a lock.
    """

    kind = "sublevel"

    def __init__(self, constraints):
        constraints = list(constraints)
        if not constraints:
            raise ValueError("at least one constraint is required")
        dims = {f.dim for f in constraints}
        if len(dims) != 1:
            raise DimensionError("constraints disagree on dimension")
        self.constraints = constraints
        self.dim = dims.pop()
        self._lock = threading.Lock()
        self._proj = None
        self._supp = None
        self._slater = self._find_slater()

    def _find_slater(self):
        import cvxpy as cp

        x = cp.Variable(self.dim)
        t = cp.Variable()
        cons = [f.cvx(x) <= t for f in self.constraints]
        cons += [t >= -1.0, cp.norm(x, "inf") <= 1e4]
        prob = cp.Problem(cp.Minimize(t + 1e-3 * cp.sum_squares(x)), cons)
        quiet_solve(prob)
        if x.value is None or t.value is None or t.value > 1e-9:
            raise EmptySetError("sublevel system appears to be empty")
        p = np.asarray(x.value, float)
        if self.residual(p) > 1e-9:
            raise EmptySetError("sublevel system appears to be empty")
        return p

    def residual(self, x):
        return max(f(x) for f in self.constraints)

    def contains(self, x, tol=MEMBERSHIP_TOL):
        x = self._check(x)
        return bool(self.residual(x) <= tol)

    def _pull_back(self, p, tol):
        """Move ``p`` toward the Slater point until it is feasible within ``tol``."""
        if self.residual(p) <= tol:
            return p
        lo, hi = 0.0, 1.0
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            if self.residual(p + mid * (self._slater - p)) <= tol:
                hi = mid
            else:
                lo = mid
        return p + hi * (self._slater - p)

    def project(self, x, tol=PROJECTION_TOL, max_iter=MAX_ITER):
        import cvxpy as cp

        x = self._check(x)
        if self.residual(x) <= 0:
            return x.copy()
        with self._lock:
            if self._proj is None:
                var = cp.Variable(self.dim)
                target = cp.Parameter(self.dim)
                cons = [f.cvx(var) <= 0 for f in self.constraints]
                prob = cp.Problem(cp.Minimize(cp.sum_squares(var - target)), cons)
                self._proj = (prob, var, target)
            prob, var, target = self._proj
            target.value = x
            try:
                quiet_solve(prob, tol_gap_abs=1e-12, tol_gap_rel=1e-12, tol_feas=1e-12)
            except cp.SolverError as exc:
                raise ConvergenceError("projection solve failed", best=x) from exc
            if var.value is None:
                raise ConvergenceError("projection solve failed", best=x)
            p = np.asarray(var.value, float).copy()
        return self._pull_back(p, 0.1 * tol)

    def max_linear(self, xstar, center, radius):
        """Maximise ``xstar . x`` over the set intersected with a ball."""
        import cvxpy as cp

        with self._lock:
            if self._supp is None:
                var = cp.Variable(self.dim)
                c = cp.Parameter(self.dim)
                x0 = cp.Parameter(self.dim)
                rad = cp.Parameter(nonneg=True)
                cons = [f.cvx(var) <= 0 for f in self.constraints]
                cons.append(cp.norm(var - x0, 2) <= rad)
                prob = cp.Problem(cp.Maximize(c @ var), cons)
                self._supp = (prob, var, c, x0, rad)
            prob, var, c, x0, rad = self._supp
            c.value = np.asarray(xstar, float)
            x0.value = np.asarray(center, float)
            rad.value = float(radius)
            try:
                quiet_solve(prob)
            except cp.SolverError as exc:
                raise ConvergenceError("trust-region support solve failed") from exc
            if var.value is None:
                raise ConvergenceError("trust-region support solve failed")
            p = self._pull_back(np.asarray(var.value, float).copy(), 1e-9)
        return p

    def recession_rows(self):
        rows = [f.zero_cone_rows() for f in self.constraints]
        if any(r is None for r in rows):
            return None
        return np.vstack(rows)

    def is_bounded_rep(self):
        rows = self.recession_rows()
        if rows is None:
            return None
        return HPolyCone(rows).is_zero()

    def point(self):
        return self._slater.copy()

    def to_dict(self):
        return {"kind": "sublevel", "constraints": [f.to_dict() for f in self.constraints]}

    def cvx_constraints(self, x):
        return [f.cvx(x) <= 0 for f in self.constraints]


class HPolyCone:
    """Tiny helper: the cone ``{v : H v <= 0}``."""

    def __init__(self, H):
        self.H = np.atleast_2d(np.asarray(H, float))

    def is_zero(self):
        n = self.H.shape[1]
        A = np.vstack([self.H, np.eye(n), -np.eye(n)])
        b = np.concatenate([np.zeros(len(self.H)), np.ones(2 * n)])
        for i in range(n):
            for sgn in (1.0, -1.0):
                c = np.zeros(n)
                c[i] = sgn
                if linprog_max(c, A, b).value > 1e-9:
                    return False
        return True


# -- module-level API -------------------------------------------------------

def contains(S, x, tol=MEMBERSHIP_TOL):
    if not tol > 0:
        raise ValueError("tol must be positive")
    return S.contains(x, tol)


def project(S, x, tol=PROJECTION_TOL, max_iter=MAX_ITER):
    if not tol > 0:
        raise ValueError("tol must be positive")
    return S.project(x, tol, max_iter)


def dimension(S):
    return S.dim


def is_bounded_rep(S):
    return S.is_bounded_rep()


def set_from_dict(d):
    """Build a :class:`ConvexSet` from its JSON-style description."""
    from .catalog import function_from_dict

    d = dict(d)
    kind = d.pop("kind")
    if kind == "hpoly":
        return HPolyhedron(d["A"], d["b"])
    if kind == "vset":
        return VSet(d["points"], d.get("rays", []))
    if kind == "ball":
        return Ball(d["center"], d["radius"])
    if kind == "epigraph1d":
        return Epigraph1D(Catalog1D(**d["phi"]), d.get("shift", 0.0))
    if kind == "sublevel":
        return SublevelSystem([function_from_dict(f) for f in d["constraints"]])
    raise ValueError(f"unknown set kind {kind!r}")
