"""Scenario files, task execution and the example gallery."""
import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional

import jsonschema
import numpy as np

from . import __version__
from .barrier import BOUNDARY, classify_barrier, ssp_verdict
from .catalog import function_from_dict
from .cones import pointed_certificate, recession_cone
from .errors import BarricadeError, ConvergenceError, InconclusiveError
from .horizon import check_coercive, check_cond9, check_cond10, certify_and_solve
from .separation import STRONG, counterexample_pair, embedded_pairs, separate
from .serial import jsonable
from .sets import set_from_dict
from .support import support

SCENARIO_SCHEMA = "barricade/1"
REPORT_SCHEMA = "barricade-report/1"

DEFAULT_TOLERANCES = {"support": 1e-9, "cone": 1e-7, "separation": 1e-8, "solve": 1e-6,
                      "max_iter": 10000, "solve_iter": 2000}

_VEC = {"type": "array", "items": {"type": "number"}, "minItems": 1}
_MAT = {"type": "array", "items": _VEC, "minItems": 1}
_PHI = {"type": "object", "additionalProperties": False, "required": ["tag"],
        "properties": {"tag": {"enum": ["square", "exp", "abs", "linear", "negsqrt", "recip"]},
                       "slope": {"type": "number"}}}


def _obj(required, **props):
    return {"type": "object", "additionalProperties": False, "required": required,
            "properties": props}


_FUNCTION = {"oneOf": [
    _obj(["kind", "a"], kind={"const": "affine"}, a=_VEC, c={"type": "number"}),
    _obj(["kind", "Q"], kind={"const": "quadratic"}, Q=_MAT, b=_VEC, c={"type": "number"}),
    _obj(["kind", "center"], kind={"const": "norm"}, center=_VEC,
         weight={"type": "number", "exclusiveMinimum": 0}, offset={"type": "number"}),
    _obj(["kind", "index", "phi"], kind={"const": "lift"}, dim={"type": "integer", "minimum": 1},
         index={"type": "integer", "minimum": 0}, phi=_PHI, a=_VEC, c={"type": "number"}),
    _obj(["kind"], kind={"const": "ex53"}),
]}

_SET = {"oneOf": [
    _obj(["kind", "A", "b"], kind={"const": "hpoly"}, A=_MAT, b=_VEC),
    _obj(["kind", "points"], kind={"const": "vset"}, points=_MAT,
         rays={"type": "array", "items": _VEC}),
    _obj(["kind", "center", "radius"], kind={"const": "ball"}, center=_VEC,
         radius={"type": "number", "exclusiveMinimum": 0}),
    _obj(["kind", "phi"], kind={"const": "epigraph1d"}, phi=_PHI, shift={"type": "number"}),
    _obj(["kind", "constraints"], kind={"const": "sublevel"},
         constraints={"type": "array", "items": _FUNCTION, "minItems": 1}),
]}

_NAME = {"type": "string", "minLength": 1}
_STATUS = {"type": "string"}
_TASK = {"oneOf": [
    _obj(["kind", "set"], kind={"const": "analyze"}, set=_NAME, xstar=_VEC, expected=_STATUS),
    _obj(["kind", "sets"], kind={"const": "separate"},
         sets={"type": "array", "items": _NAME, "minItems": 2, "maxItems": 2},
         expected=_STATUS),
    _obj(["kind", "set"], kind={"const": "ssp"}, set=_NAME, expected=_STATUS),
    _obj(["kind", "set", "function"], kind={"const": "solve"}, set=_NAME, function=_NAME,
         expected=_STATUS),
    _obj(["kind", "function"], kind={"const": "conditions"}, function=_NAME,
         expected=_STATUS),
]}

SCHEMA = _obj(
    ["schema", "dimension", "sets", "tasks"],
    schema={"const": SCENARIO_SCHEMA},
    name={"type": "string"},
    dimension={"type": "integer", "minimum": 1},
    sets={"type": "object", "additionalProperties": _SET},
    functions={"type": "object", "additionalProperties": _FUNCTION},
    tasks={"type": "array", "items": _TASK},
    tolerances=_obj([], **{k: {"type": "number", "exclusiveMinimum": 0}
                           for k in DEFAULT_TOLERANCES}),
    seed={"type": "integer", "minimum": 0},
)


class ScenarioError(BarricadeError, ValueError):
    """Schema or reference violation in a scenario file."""


@dataclass
class Scenario:
    dimension: int
    sets: Dict[str, object]
    functions: Dict[str, object]
    tasks: List[dict]
    tolerances: Dict[str, float] = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))
    seed: int = 0
    name: Optional[str] = None
    source: Optional[dict] = None


def _line_of(text, path):
    """Best-effort line number of the JSON element at ``path``."""
    if text is None:
        return None
    pos = 0
    for part in path:
        if isinstance(part, str):
            j = text.find(json.dumps(part), pos)
            if j < 0:
                break
            pos = j
    return text.count("\n", 0, pos) + 1


def _narrow(err):
    """For a failed ``oneOf``, the error from the branch named by ``kind``."""
    inst = err.instance
    if err.validator != "oneOf" or not isinstance(inst, dict) or "kind" not in inst:
        return err, []
    for branch in err.validator_value:
        if branch.get("properties", {}).get("kind", {}).get("const") == inst["kind"]:
            sub = next(jsonschema.Draft202012Validator(branch).iter_errors(inst), None)
            if sub is not None:
                inner, rel = _narrow(sub)
                return inner, list(sub.absolute_path) + rel
    return err, []


def _schema_error(err, text):
    inner, rel = _narrow(err)
    path = list(err.absolute_path) + rel
    where = "/".join(str(p) for p in path) or "<root>"
    line = _line_of(text, path)
    loc = f"line {line}, " if line else ""
    return ScenarioError(f"{loc}field {where}: {inner.message}")


def scenario_from_dict(data, text=None) -> Scenario:
    """Validate a decoded scenario and build its sets and functions."""
    try:
        jsonschema.validate(data, SCHEMA)
    except jsonschema.ValidationError as err:
        raise _schema_error(err, text) from None
    n = data["dimension"]
    sets, functions = {}, {}
    for name, spec in data["sets"].items():
        try:
            S = set_from_dict(spec)
        except (BarricadeError, ValueError) as exc:
            raise ScenarioError(f"line {_line_of(text, ['sets', name])}, field sets/{name}: "
                                f"{exc}") from None
        if S.dim != n:
            raise ScenarioError(f"field sets/{name}: dimension {S.dim} != scenario dimension {n}")
        sets[name] = S
    for name, spec in data.get("functions", {}).items():
        try:
            f = function_from_dict(spec, dim=n)
        except (BarricadeError, ValueError) as exc:
            raise ScenarioError(f"field functions/{name}: {exc}") from None
        if f.dim != n:
            raise ScenarioError(f"field functions/{name}: dimension {f.dim} != {n}")
        functions[name] = f
    for i, task in enumerate(data["tasks"]):
        names = task.get("sets", [task["set"]] if "set" in task else [])
        for s in names:
            if s not in sets:
                raise ScenarioError(f"field tasks/{i}: undefined set {s!r}")
        if "function" in task and task["function"] not in functions:
            raise ScenarioError(f"field tasks/{i}: undefined function {task['function']!r}")
        if "xstar" in task and len(task["xstar"]) != n:
            raise ScenarioError(f"field tasks/{i}/xstar: expected {n} entries")
    tol = dict(DEFAULT_TOLERANCES)
    tol.update(data.get("tolerances", {}))
    return Scenario(n, sets, functions, list(data["tasks"]), tol, data.get("seed", 0),
                    data.get("name"), data)


def parse_scenario(path) -> Scenario:
    """Read and validate a scenario file."""
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as err:
        raise ScenarioError(f"line {err.lineno}, column {err.colno}: {err.msg}") from None
    return scenario_from_dict(data, text)


# -- task execution -----------------------------------------------------------

def _analyze(sc, task):
    S = sc.sets[task["set"]]
    out = {"bounded": S.is_bounded_rep()}
    from .cones import recession_cone

    out["recession_cone"] = recession_cone(S).to_dict()
    if "xstar" not in task:
        return ("Bounded" if out["bounded"] else "Unbounded"), out, None
    xs = np.asarray(task["xstar"], float)
    sv = support(S, xs, sc.tolerances["support"])
    out["support"] = sv.to_dict()
    cl = classify_barrier(S, xs, sc.tolerances["cone"], seed=sc.seed)
    out["classification"] = cl.to_dict()
    return cl.verdict, out, None


def _barrier_interior(S):
    """Does ``barc(S)`` have interior points?  True iff ``rec(S)`` is pointed."""
    K = recession_cone(S)
    if K.is_zero():
        return True
    if not K.exhaustive:
        return None
    return K.is_pointed() and pointed_certificate(K) is not None


def _separate(sc, task):
    C, D = (sc.sets[s] for s in task["sets"])
    tol = sc.tolerances["separation"]
    res = separate(C, D, tol, int(sc.tolerances["max_iter"]))
    cert = res.to_dict()
    # reported for reference only; in R^n the verdict does not depend on it
    cert["barrier_interior"] = [_barrier_interior(C), _barrier_interior(D)]
    if res.status == STRONG:
        h = res.hyperplane
        sc_val = support(C, h.xstar).value
        inf_d = -support(D, -h.xstar).value
        cert["revalidated_margin"] = inf_d - sc_val
        cert["revalidated"] = bool(sc_val + h.margin <= inf_d + 2 * tol and h.margin > 0)
    bounds = {"dist_lower": res.bounds[0], "dist_upper": res.bounds[1]} if res.bounds else None
    return res.status, cert, bounds


def _ssp(sc, task):
    S = sc.sets[task["set"]]
    v = ssp_verdict(S, sc.tolerances["cone"], seed=sc.seed)
    cert = v.to_dict()
    if v.witness is not None:
        in_barc = support(S, v.witness).finite
        cl = classify_barrier(S, v.witness, sc.tolerances["cone"], seed=sc.seed)
        cert["witness_check"] = {"in_barrier_cone": in_barc, "classification": cl.verdict,
                                 "valid": bool(in_barc and cl.verdict == BOUNDARY)}
    return v.verdict, cert, None


def _solve(sc, task):
    M = sc.sets[task["set"]]
    f = sc.functions[task["function"]]
    rep = certify_and_solve(M, f, sc.tolerances["solve"], int(sc.tolerances["solve_iter"]),
                            seed=sc.seed)
    bounds = None
    if rep.best is not None:
        bounds = {"value": rep.best.value, "kkt_residual": rep.best.kkt_residual}
    return rep.conclusion, rep.to_dict(), bounds


def strongest_condition(f, seed=0):
    """Reports for the three growth conditions plus the strongest one that holds."""
    reports = [check_coercive(f, seed=seed), check_cond9(f, seed=seed),
               check_cond10(f, seed=seed)]
    for r in reports:
        if r.holds:
            return r.condition, reports
    return "None", reports


def _conditions(sc, task):
    f = sc.functions[task["function"]]
    status, reports = strongest_condition(f, sc.seed)
    return status, {"reports": [r.to_dict() for r in reports]}, None


_RUNNERS = {"analyze": _analyze, "separate": _separate, "ssp": _ssp, "solve": _solve,
            "conditions": _conditions}


def run_task(sc, index, task, meta=True):
    start = time.perf_counter()
    entry = {"index": index, "task": dict(task)}
    try:
        status, cert, bounds = _RUNNERS[task["kind"]](sc, task)
    except ConvergenceError as exc:
        status, cert, bounds = "ConvergenceError", {"message": str(exc)}, None
        if exc.residual is not None:
            bounds = {"residual": exc.residual}
    except InconclusiveError as exc:
        status, cert, bounds = "Inconclusive", {"message": str(exc)}, None
        if exc.lower_bound is not None:
            bounds = {"lower_bound": exc.lower_bound}
    entry["status"] = status
    entry["certificate"] = cert
    if bounds is not None:
        entry["bounds"] = bounds
    if "expected" in task:
        entry["match"] = status == task["expected"]
    if meta:
        entry["wall_time"] = time.perf_counter() - start
    return jsonable(entry)


def run(sc: Scenario, kinds=None, parallel=False, meta=True) -> dict:
    """Execute the scenario's tasks in order and collect a report."""
    tasks = [(i, t) for i, t in enumerate(sc.tasks) if kinds is None or t["kind"] in kinds]
    if parallel and len(tasks) > 1:
        with ThreadPoolExecutor() as pool:
            futs = [pool.submit(run_task, sc, i, t, meta) for i, t in tasks]
            results = [f.result() for f in futs]
    else:
        results = [run_task(sc, i, t, meta) for i, t in tasks]
    rep = {"schema": REPORT_SCHEMA, "seed": sc.seed, "tasks": results}
    if sc.name:
        rep["scenario"] = sc.name
    if meta:
        rep["meta"] = {"version": __version__,
                       "generated": time.strftime("%Y-%m-%dT%H:%M:%S%z")}
    return rep


def all_match(report):
    return all(t.get("match", True) for t in report["tasks"])


def dumps(report):
    """Serialise a report; floats use the shortest round-trip representation."""
    return json.dumps(report, indent=2, sort_keys=True, allow_nan=False) + "\n"


# -- gallery ---------------------------------------------------------------------

@dataclass(frozen=True)
class GalleryItem:
    name: str
    anchor: str
    expected: str
    build: object  # callable(n) -> scenario dict
    table: Optional[str] = None  # embedded-pair table to attach


def _scenario(name, dim, sets, task, functions=None):
    d = {"schema": SCENARIO_SCHEMA, "name": name, "dimension": dim,
         "sets": {k: v.to_dict() if hasattr(v, "to_dict") else v for k, v in sets.items()},
         "tasks": [task], "seed": 0}
    if functions:
        d["functions"] = {k: v.to_dict() for k, v in functions.items()}
    return d


def _pair_scenario(name, expected):
    def build(n):
        C, D, _ = counterexample_pair(name, n)
        return _scenario(name, C.dim, {"C": C, "D": D},
                         {"kind": "separate", "sets": ["C", "D"], "expected": expected})
    return build


_HYP = {"kind": "epigraph1d", "phi": {"tag": "recip"}}
_AXIS = {"kind": "hpoly", "A": [[0.0, 1.0], [0.0, -1.0]], "b": [0.0, 0.0]}


def _nested_cone(n):
    # 0 <= x_{k+1} <= k/(k+1) x_k, truncated to R^n
    rows, rhs = [], []
    e = np.eye(n)
    rows.append(-e[0])
    for k in range(1, n):
        rows.append(-e[k])
        rows.append(e[k] - k / (k + 1.0) * e[k - 1])
    rhs = [0.0] * len(rows)
    return {"kind": "hpoly", "A": np.array(rows).tolist(), "b": rhs}


def _gallery():
    from .catalog import ConvexQuadratic, Ex53Fn

    items = [
        GalleryItem("hyperbola_line", "hyperbola-vs-axis", "NotStronglySeparable",
                    _pair_scenario("hyperbola_line", "NotStronglySeparable")),
        GalleryItem("hyperbola_barrier", "hyperbola-barrier-cone", "InteriorPoint",
                    lambda n: _scenario("hyperbola_barrier", 2, {"C": _HYP},
                                        {"kind": "analyze", "set": "C", "xstar": [-1.0, -1.0],
                                         "expected": "InteriorPoint"})),
        GalleryItem("line_barrier", "axis-barrier-cone", "LacksSSP",
                    lambda n: _scenario("line_barrier", 2, {"D": _AXIS},
                                        {"kind": "ssp", "set": "D", "expected": "LacksSSP"})),
        GalleryItem("parabola", "parabola-epigraph", "HasSSP",
                    lambda n: _scenario("parabola", 2,
                                        {"C": {"kind": "epigraph1d", "phi": {"tag": "square"}}},
                                        {"kind": "ssp", "set": "C", "expected": "HasSSP"})),
        GalleryItem("exp_epigraph", "exponential-epigraph", "LacksSSP",
                    lambda n: _scenario("exp_epigraph", 2,
                                        {"C": {"kind": "epigraph1d", "phi": {"tag": "exp"}}},
                                        {"kind": "ssp", "set": "C", "expected": "LacksSSP"})),
        GalleryItem("lower_halfplane", "lower-halfplane", "LacksSSP",
                    lambda n: _scenario("lower_halfplane", 2,
                                        {"H": {"kind": "hpoly", "A": [[0.0, 1.0]], "b": [0.0]}},
                                        {"kind": "ssp", "set": "H", "expected": "LacksSSP"})),
        GalleryItem("unit_ball", "unit-ball", "HasSSP",
                    lambda n: _scenario("unit_ball", n,
                                        {"B": {"kind": "ball", "center": [0.0] * n,
                                               "radius": 1.0}},
                                        {"kind": "ssp", "set": "B", "expected": "HasSSP"})),
        GalleryItem("nested_cone", "decaying-coordinate-cone", "InteriorPoint",
                    lambda n: _scenario("nested_cone", n, {"K": _nested_cone(n)},
                                        {"kind": "analyze", "set": "K",
                                         "xstar": [-1.0] + [0.0] * (n - 1),
                                         "expected": "InteriorPoint"})),
        GalleryItem("ex52", "parabola-program", "NonemptyCompact",
                    lambda n: _scenario("ex52", 2,
                                        {"M": {"kind": "epigraph1d", "phi": {"tag": "square"}}},
                                        {"kind": "solve", "set": "M", "function": "f",
                                         "expected": "NonemptyCompact"},
                                        {"f": ConvexQuadratic(np.diag([1.0, 0.0]), [0.0, 1.0])})),
        GalleryItem("ex53", "axis-program", "HypothesesFailed",
                    lambda n: _scenario("ex53", 2, {"M": _AXIS},
                                        {"kind": "solve", "set": "M", "function": "f",
                                         "expected": "HypothesesFailed"},
                                        {"f": Ex53Fn()})),
        GalleryItem("negative_root", "negative-root", "Cond9",
                    lambda n: {"schema": SCENARIO_SCHEMA, "name": "negative_root",
                               "dimension": 1, "sets": {},
                               "functions": {"f": {"kind": "lift", "dim": 1, "index": 0,
                                                   "phi": {"tag": "negsqrt"}}},
                               "tasks": [{"kind": "conditions", "function": "f",
                                          "expected": "Cond9"}], "seed": 0}),
        GalleryItem("l2_slices", "weighted-slices-l2", STRONG,
                    _pair_scenario("l2_slices", STRONG), table="l2_slices"),
        GalleryItem("l1_slices", "weighted-slices-l1", STRONG,
                    _pair_scenario("l1_slices", STRONG), table="l1_slices"),
    ]
    return {it.name: it for it in items}


GALLERY = _gallery()


def gap_table(name, n):
    rows = []
    for k, xi, zeta, gap in embedded_pairs(name, n):
        exact = 2.0 / (k + 1) if name == "l2_slices" else 1.0 / k
        rows.append({"k": k, "xi": xi, "zeta": zeta, "gap": gap, "exact": exact,
                     "rel_error": abs(gap - exact) / exact})
    return rows


def gallery(names=None, n=6, parallel=False, meta=True, configure=None) -> dict:
    """Run gallery items (all by default) and compare against expected statuses."""
    names = list(GALLERY) if names is None else list(names)
    unknown = [nm for nm in names if nm not in GALLERY]
    if unknown:
        raise KeyError(unknown[0])
    items = []
    for nm in names:
        it = GALLERY[nm]
        sc = scenario_from_dict(it.build(n))
        if configure is not None:
            sc = configure(sc)
        rep = run(sc, parallel=parallel, meta=meta)
        entry = {"name": nm, "anchor": it.anchor, "expected": it.expected,
                 "status": rep["tasks"][0]["status"], "result": rep["tasks"][0]}
        entry["match"] = entry["status"] == it.expected
        if it.table:
            entry["table"] = jsonable(gap_table(it.table, n))
        items.append(entry)
    out = {"schema": REPORT_SCHEMA, "gallery": items,
           "tasks": [it["result"] for it in items]}
    if meta:
        out["meta"] = {"version": __version__,
                       "generated": time.strftime("%Y-%m-%dT%H:%M:%S%z")}
    return out


def gallery_all_match(report):
    return all(it["match"] for it in report["gallery"])

