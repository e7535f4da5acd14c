"""Horizon functions, growth conditions and the existence certifier.

The three growth conditions checked here, for a convex ``f`` and its
horizon cone ``K = {v : f_inf(v) <= 0}``:

* ``coercive``  -- ``f_inf(v) > 0`` for every ``v != 0`` (``K = {0}``);
* ``cond9``     -- along every ``0 != v in K``, ``f(x + t v) -> -inf`` from
  *every* ``x`` in the domain;
* ``cond10``    -- along every ``0 != v in K``, ``f(x + t v) -> -inf`` from
  *some* ``x`` in the domain.

Limits are decided operationally on ``t = 2^k``, ``k <= 20``: a probe
diverges when its values decrease monotonically and either drop below
``-1e6`` or lose at least as much per doubling as the doubling before (so
the drops cannot sum to a finite total).
"""
import math
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from .barrier import HAS_SSP, LACKS_SSP, sphere_directions, ssp_verdict
from .cones import ConeRep, intersect, recession_cone
from .errors import ConvergenceError, InconclusiveError
from .serial import jsonable, number
from .sets import SublevelSystem, quiet_solve

CLOSED_FORM = "ClosedForm"
NUMERIC = "NumericLimit"

COERCIVE = "Coercive8"
COND9 = "Cond9"
COND10 = "Cond10"

NONEMPTY_COMPACT = "NonemptyCompact"
HYPOTHESES_FAILED = "HypothesesFailed"
INCONCLUSIVE = "Inconclusive"

DIVERGENCE_LEVEL = -1e6
MAX_DOUBLINGS = 20
COND9_SAMPLES = 24
HORIZON_CAP = 1e12


@dataclass(frozen=True)
class HorizonValue:
    value: float
    method: str = CLOSED_FORM
    estimates: tuple = ()

    def to_dict(self):
        d = {"value": number(self.value), "method": self.method}
        if self.estimates:
            d["estimates"] = [number(e) for e in self.estimates]
        return d


@dataclass(frozen=True)
class ConditionReport:
    """Outcome of one growth-condition check.

    ``holds`` is True, False or None (inconclusive).  ``witnesses`` holds one
    record per probed direction: ``v``, the base point ``x`` and the trace
    ``values`` of ``f(x + 2^k v)``.  A False verdict lists the violating
    records first.
    """

    condition: str
    holds: Optional[bool]
    witnesses: List[dict] = field(default_factory=list)
    samples: int = 0

    def to_dict(self):
        return {"condition": self.condition, "holds": self.holds, "samples": self.samples,
                "witnesses": [jsonable(w) for w in self.witnesses]}


@dataclass(frozen=True)
class Solution:
    x: np.ndarray
    value: float
    kkt_residual: float

    def to_dict(self):
        return {"x": self.x.tolist(), "value": self.value, "kkt_residual": self.kkt_residual}


@dataclass(frozen=True)
class ExistenceReport:
    hypotheses: dict
    conclusion: str
    failed: tuple = ()
    route: Optional[str] = None
    solution: Optional[Solution] = None
    best: Optional[Solution] = None
    nonattainment_flag: bool = False
    trace: dict = field(default_factory=dict)

    def to_dict(self):
        hyp = {}
        for key, val in self.hypotheses.items():
            if hasattr(val, "to_dict"):
                hyp[key] = val.to_dict()
            elif isinstance(val, list):
                hyp[key] = [v.to_dict() for v in val]
            else:
                hyp[key] = jsonable(val)
        d = {"conclusion": self.conclusion, "failed": list(self.failed),
             "route": self.route, "hypotheses": hyp,
             "nonattainment_flag": self.nonattainment_flag,
             "trace": jsonable(self.trace)}
        d["solution"] = None if self.solution is None else self.solution.to_dict()
        d["best"] = None if self.best is None else self.best.to_dict()
        return d


# -- horizon function ---------------------------------------------------------

def numeric_horizon(f, v, x0=None):
    """Difference quotients ``(f(x0 + t v) - f(x0)) / t`` on ``t = 2^k``."""
    v = np.asarray(v, float)
    x0 = np.asarray(f.base_points()[0] if x0 is None else x0, float)
    f0 = f(x0)
    if not math.isfinite(f0):
        raise ValueError("base point must lie in the domain")
    est = []
    for k in range(MAX_DOUBLINGS + 1):
        lam = 2.0 ** k
        val = f(x0 + lam * v)
        if not math.isfinite(val):
            return HorizonValue(math.inf, CLOSED_FORM, tuple(est))
        q = (val - f0) / lam
        est.append(q)
        if q > HORIZON_CAP:
            return HorizonValue(math.inf, NUMERIC, tuple(est))
    return HorizonValue(est[-1], NUMERIC, tuple(est))


def horizon(f, v, closed_form=True) -> HorizonValue:
    """``f_inf(v)``: closed form from the catalog, or the numeric limit."""
    v = np.asarray(v, float)
    if not np.any(v):
        raise ValueError("direction must be nonzero")
    if closed_form:
        try:
            return HorizonValue(float(f.horizon(v)))
        except NotImplementedError:
            pass
    return numeric_horizon(f, v)


def horizon_zero_cone(f, samples=512, seed=0) -> ConeRep:
    """The cone ``{v : f_inf(v) <= 0}``."""
    rows = f.zero_cone_rows()
    if rows is not None:
        return ConeRep.from_inequalities(rows)
    D = sphere_directions(f.dim, samples, seed)
    return ConeRep.sampled([d for d in D if horizon(f, d).value <= 0])


# -- growth conditions -----------------------------------------------------------

def ray_trace(f, x, v, doublings=MAX_DOUBLINGS):
    """``f(x + 2^k v)`` for ``k = 0..doublings``."""
    x = np.asarray(x, float)
    v = np.asarray(v, float)
    return [f(x + 2.0 ** k * v) for k in range(doublings + 1)]


def diverges(values):
    """Decide ``lim f = -inf`` from values on a doubling grid."""
    vals = np.asarray(values, float)
    if not np.all(np.isfinite(vals)):
        return False
    drops = -np.diff(vals)
    if np.any(drops < -1e-12 * (1.0 + np.abs(vals[1:]))):
        return False
    if vals[-1] < DIVERGENCE_LEVEL:
        return True
    tail = drops[-4:]
    return bool(np.all(tail > 1e-9) and np.all(np.diff(tail) >= -1e-12 * tail[1:]))


def _probe_directions(K):
    """Cone generators plus normalised pairwise sums, in a fixed order."""
    gens = [np.asarray(g, float) for g in K.generators]
    dirs = list(gens)
    for i in range(len(gens)):
        for j in range(i + 1, len(gens)):
            s = gens[i] + gens[j]
            if np.linalg.norm(s) > 1e-9:
                dirs.append(s / np.linalg.norm(s))
    out = []
    for d in dirs:
        d = d + 0.0
        if not any(np.allclose(d, e, atol=1e-12) for e in out):
            out.append(d)
    # descending lexicographic order: coordinate directions come first
    return sorted(out, key=lambda d: tuple(-d))


def check_coercive(f, tol=1e-9, samples=512, seed=0) -> ConditionReport:
    """``f_inf(v) > 0`` for all ``v != 0``."""
    rows = f.zero_cone_rows()
    if rows is not None:
        K = ConeRep.from_inequalities(rows)
        if K.is_zero():
            return ConditionReport(COERCIVE, True, samples=0)
        wit = [{"v": g, "horizon": horizon(f, g).value} for g in _probe_directions(K)]
        return ConditionReport(COERCIVE, False, wit, samples=len(wit))
    D = sphere_directions(f.dim, samples, seed)
    vals = [horizon(f, d).value for d in D]
    i = int(np.argmin(vals))
    if vals[i] > tol:
        return ConditionReport(COERCIVE, True, samples=samples)
    return ConditionReport(COERCIVE, False, [{"v": D[i], "horizon": vals[i]}], samples=samples)


def _condition(f, every_base, name, samples, seed):
    K = horizon_zero_cone(f, seed=seed)
    if K.is_zero():
        return ConditionReport(name, True, samples=0)
    bases = f.domain_samples(samples, seed)  # catalog base points come first
    bad, good = [], []
    for v in _probe_directions(K):
        found = None
        for x in bases:
            vals = ray_trace(f, x, v)
            rec = {"v": v, "x": np.asarray(x, float), "values": vals}
            if diverges(vals):
                if not every_base:
                    found = rec
                    break
            elif every_base:
                found = rec
                break
        if every_base:
            if found is None:
                good.append({"v": v, "x": None, "values": None})
            else:
                bad.append(found)
        elif found is None:
            bad.append({"v": v, "x": None, "values": None})
        else:
            good.append(found)
    if bad:
        return ConditionReport(name, False, bad + good, samples=len(bases))
    return ConditionReport(name, True if K.exhaustive else None, good, samples=len(bases))


def check_cond10(f, tol=1e-9, samples=COND9_SAMPLES, seed=0) -> ConditionReport:
    """Some base point diverges along every nonzero ``v`` of the horizon cone."""
    return _condition(f, False, COND10, samples, seed)


def check_cond9(f, tol=1e-9, samples=COND9_SAMPLES, seed=0) -> ConditionReport:
    """Every sampled base point diverges along every nonzero ``v`` of the horizon cone."""
    return _condition(f, True, COND9, samples, seed)


# -- existence certificate and solver ----------------------------------------------

def _kkt_residual(M, f, x):
    g = f.subgradient(x)
    return float(np.linalg.norm(M.project(x - g) - x))


def _subgradient_run(M, f, x0, iters):
    """Projected subgradient with step ``a / sqrt(k)``; returns best point and trace."""
    a = max(1.0, float(np.linalg.norm(x0)))
    x = x0.copy()
    best_x, best_f = x.copy(), f(x)
    norms, vals = [], []
    for k in range(1, iters + 1):
        g = f.subgradient(x)
        y = M.project(x - a / math.sqrt(k) * g)
        fy = f(y)
        if math.isfinite(fy):
            x = y
            if fy < best_f:
                best_x, best_f = y.copy(), fy
        norms.append(float(np.linalg.norm(x)))
        vals.append(f(x))
        if best_f < DIVERGENCE_LEVEL:
            break
    return best_x, best_f, norms, vals


def _conic_polish(M, f):
    import cvxpy as cp

    try:
        x = cp.Variable(M.dim)
        prob = cp.Problem(cp.Minimize(f.cvx(x)), M.cvx_constraints(x))
        quiet_solve(prob, tol_gap_abs=1e-12, tol_gap_rel=1e-12, tol_feas=1e-12)
    except (cp.SolverError, NotImplementedError, cp.error.DCPError):
        return None, None
    if prob.status in ("unbounded", "unbounded_inaccurate"):
        return None, "unbounded"
    if x.value is None:
        return None, None
    return M.project(np.asarray(x.value, float)), prob.status


def _march(M, f, x, f_x, directions):
    """Push ``x`` along shared recession/horizon directions while ``f`` drops."""
    best_x, best_f = x, f_x
    runaway = False
    unbounded = False
    traces = []
    for s in directions:
        scale = max(1.0, float(np.linalg.norm(x)))
        pts, vals = [], []
        accepted = 0
        for k in range(41):
            p = x + scale * 2.0 ** k * np.asarray(s)
            fp = f(p)
            pts.append(p)
            vals.append(fp)
            if fp < DIVERGENCE_LEVEL:
                unbounded = True
                break
            if not (fp < best_f - 1e-12 * (1.0 + abs(best_f))):
                if accepted >= 2 and len(vals) > 1 and fp <= vals[-2]:
                    runaway = True  # still decreasing, but by negligible amounts
                break
            best_x, best_f = p, fp
            accepted += 1
        traces.append({"s": np.asarray(s), "values": vals})
    return best_x, best_f, runaway, unbounded, traces


def certify_and_solve(M, f, tol=1e-6, max_iter=2000, seed=0, restarts=10) -> ExistenceReport:
    """Check the existence hypotheses for ``min f over M`` and solve it.

    Hypotheses: ``M`` has the strong separation property, ``f`` is bounded
    below on ``M``, and ``f`` satisfies cond10.  For sublevel systems the
    property may instead come from cond9 holding for every constraint.
    """
    if M.dim != f.dim:
        raise ValueError("set and function dimensions differ")
    ssp = ssp_verdict(M, seed=seed)
    cond10 = check_cond10(f, seed=seed)
    cond9 = None
    route = None
    ssp_ok = ssp.verdict == HAS_SSP
    if isinstance(M, SublevelSystem):
        cond9 = [check_cond9(g, seed=seed) for g in M.constraints]
        if all(r.holds for r in cond9):
            ssp_ok = True
            route = "sublevel_cond9"

    # starts: projected base points, then seeded random restarts
    rng = np.random.default_rng(seed)
    starts = [M.project(p) for p in f.base_points()] + [M.point()]
    while len(starts) < restarts:
        starts.append(M.project(rng.normal(scale=3.0, size=M.dim)))
    starts = [s for s in starts if math.isfinite(f(s))][:restarts]
    if not starts:
        raise ConvergenceError("no start point of the constraint set lies in the domain")
    iters = max(1, max_iter // len(starts))
    runs = [_subgradient_run(M, f, s, iters) for s in starts]
    # deterministic merge: best value, then lexicographic point
    runs.sort(key=lambda r: (r[1], tuple(r[0])))
    x_hat, f_hat, norms, vals = runs[0]
    unbounded = f_hat < DIVERGENCE_LEVEL

    polish, status = _conic_polish(M, f)
    if status == "unbounded":
        unbounded = True
    if polish is not None and math.isfinite(f(polish)) and f(polish) <= f_hat + tol:
        x_hat, f_hat = polish, f(polish)

    # quarter-budget drift test on the winning run
    q = max(1, len(norms) // 4)
    drift = bool(len(norms) >= 8 and norms[-1] > norms[-q] + 0.1 * (1 + norms[-q])
                 and 0 <= vals[-q] - vals[-1] < tol)

    march_dirs = []
    try:
        shared = intersect(recession_cone(M), horizon_zero_cone(f))
        march_dirs = list(shared.generators)
    except (ValueError, InconclusiveError):
        pass
    x_hat, f_hat, runaway, diverged, marches = _march(M, f, x_hat, f_hat, march_dirs)
    unbounded = unbounded or diverged
    nonattainment = bool((runaway or drift) and not unbounded)
    bounded_below = {"holds": not unbounded, "probe_value": f_hat}

    kkt = _kkt_residual(M, f, x_hat) if math.isfinite(f_hat) else math.inf
    best = Solution(np.asarray(x_hat, float), float(f_hat), kkt)
    solution = best if (M.contains(x_hat, 1e-7) and kkt <= tol) else None

    hypotheses = {"ssp": ssp, "bounded_below": bounded_below, "cond10": cond10}
    if cond9 is not None:
        hypotheses["cond9"] = cond9
    failed = []
    if not ssp_ok and ssp.verdict == LACKS_SSP:
        failed.append("ssp")
    if unbounded:
        failed.append("bounded_below")
    if cond10.holds is False:
        failed.append("cond10")
    undecided = (not ssp_ok and not failed.count("ssp")) or cond10.holds is None
    if ssp_ok and not unbounded and cond10.holds:
        conclusion = NONEMPTY_COMPACT
        route = route or "existence_theorem"
    elif M.is_bounded_rep() and solution is not None:
        conclusion = NONEMPTY_COMPACT
        route = "bounded_constraint"
    elif failed:
        conclusion = HYPOTHESES_FAILED
    else:
        conclusion = INCONCLUSIVE if undecided else HYPOTHESES_FAILED
    trace = {"iterate_norms": norms[-8:], "values": vals[-8:], "marches": marches,
             "drift": drift}
    return ExistenceReport(hypotheses, conclusion, tuple(failed), route, solution, best,
                           nonattainment, trace)
