"""Dense two-phase tableau simplex with Bland's rule.

Meant for the small programs that show up in this package (a handful of
variables, a few dozen rows).  Variables are free; the solver splits them
into positive and negative parts internally.
"""
from dataclasses import dataclass
from typing import Optional

import numpy as np

_EPS = 1e-10


@dataclass(frozen=True)
class LPResult:
    """Outcome of :func:`linprog_max`.

    ``status`` is one of ``"optimal"``, ``"unbounded"`` or ``"infeasible"``.
    For unbounded programs ``ray`` is a direction ``d`` with ``A d <= 0``,
    ``A_eq d = 0`` and ``c . d > 0``, and ``x`` is a feasible point.
    """

    status: str
    x: Optional[np.ndarray] = None
    value: Optional[float] = None
    ray: Optional[np.ndarray] = None


def _pivot(T, r, j):
    T[r] /= T[r, j]
    col = T[:, j].copy()
    col[r] = 0.0
    T -= np.outer(col, T[r])


def _run(T, basis, allowed, eps):
    """Minimise the objective held in the last row of ``T`` (Bland's rule).

    Returns ``None`` at optimality or the index of an entering column along
    which the program is unbounded.
    """
    m = T.shape[0] - 1
    for _ in range(50000):
        obj = T[-1, :-1]
        entering = None
        for j in allowed:
            if obj[j] < -eps:
                entering = j
                break
        if entering is None:
            return None
        col = T[:m, entering]
        best_ratio = np.inf
        leave = None
        for i in range(m):
            if col[i] > eps:
                ratio = T[i, -1] / col[i]
                if ratio < best_ratio - eps or (
                    abs(ratio - best_ratio) <= eps and basis[i] < basis[leave]
                ):
                    best_ratio = ratio
                    leave = i
        if leave is None:
            return entering
        _pivot(T, leave, entering)
        basis[leave] = entering
    raise RuntimeError("simplex did not terminate")  # Bland's rule forbids cycling


def linprog_max(c, A_ub=None, b_ub=None, A_eq=None, b_eq=None, eps=_EPS):
    """Maximise ``c . x`` subject to ``A_ub x <= b_ub`` and ``A_eq x = b_eq``.

    All variables are free.  Returns an :class:`LPResult`.
    """
    c = np.asarray(c, dtype=float)
    n = c.size
    A_ub = np.zeros((0, n)) if A_ub is None else np.atleast_2d(np.asarray(A_ub, float))
    b_ub = np.zeros(0) if b_ub is None else np.asarray(b_ub, float).ravel()
    A_eq = np.zeros((0, n)) if A_eq is None else np.atleast_2d(np.asarray(A_eq, float))
    b_eq = np.zeros(0) if b_eq is None else np.asarray(b_eq, float).ravel()
    mu, me = A_ub.shape[0], A_eq.shape[0]
    m = mu + me

    # standard form: columns [x+ | x- | slacks | artificials]
    nstd = 2 * n + mu
    E = np.zeros((m, nstd))
    E[:mu, :n] = A_ub
    E[:mu, n:2 * n] = -A_ub
    E[:mu, 2 * n:] = np.eye(mu)
    E[mu:, :n] = A_eq
    E[mu:, n:2 * n] = -A_eq
    f = np.concatenate([b_ub, b_eq])
    neg = f < 0
    E[neg] *= -1
    f = np.where(neg, -f, f)

    if m == 0:
        if np.all(np.abs(c) <= eps):
            return LPResult("optimal", np.zeros(n), 0.0)
        return LPResult("unbounded", np.zeros(n), None, c / np.linalg.norm(c))

    T = np.zeros((m + 1, nstd + m + 1))
    T[:m, :nstd] = E
    T[:m, nstd:nstd + m] = np.eye(m)
    T[:m, -1] = f
    T[-1, :nstd] = -E.sum(axis=0)
    T[-1, -1] = -f.sum()
    basis = list(range(nstd, nstd + m))
    scale = max(1.0, np.abs(f).max(initial=0.0))

    _run(T, basis, range(nstd), eps)
    if -T[-1, -1] > 1e-9 * scale * m:
        return LPResult("infeasible")

    # drive artificials out of the basis, dropping redundant rows
    keep = []
    for i in range(m):
        if basis[i] >= nstd:
            cand = [j for j in range(nstd) if abs(T[i, j]) > 1e-9]
            if cand:
                _pivot(T, i, cand[0])
                basis[i] = cand[0]
                keep.append(i)
        else:
            keep.append(i)
    T = np.vstack([T[keep], T[-1:]])
    T = np.delete(T, np.s_[nstd:nstd + m], axis=1)
    basis = [basis[i] for i in keep]
    mk = len(keep)

    cost = np.zeros(nstd)
    cost[:n] = -c
    cost[n:2 * n] = c
    T[-1, :] = 0.0
    T[-1, :nstd] = cost
    for i, bj in enumerate(basis):
        T[-1] -= cost[bj] * T[i]

    entering = _run(T, basis, range(nstd), eps)
    z = np.zeros(nstd)
    for i, bj in enumerate(basis):
        z[bj] = T[i, -1]
    x = z[:n] - z[n:2 * n]
    if entering is not None:
        dz = np.zeros(nstd)
        dz[entering] = 1.0
        for i, bj in enumerate(basis[:mk]):
            dz[bj] = -T[i, entering]
        d = dz[:n] - dz[n:2 * n]
        nd = np.linalg.norm(d)
        if nd > eps:
            return LPResult("unbounded", x, None, d / nd)
        # entering pair x+_j/x-_j cancels; treat as degenerate optimum
    return LPResult("optimal", x, float(c @ x))


def is_feasible(A_ub=None, b_ub=None, A_eq=None, b_eq=None, n=None):
    """True when the polyhedron ``{A_ub x <= b_ub, A_eq x = b_eq}`` is nonempty."""
    if n is None:
        n = np.atleast_2d(A_ub if A_ub is not None else A_eq).shape[1]
    res = linprog_max(np.zeros(n), A_ub, b_ub, A_eq, b_eq)
    return res.status != "infeasible", res.x
