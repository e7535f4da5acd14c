"""Seeded property suites: 1000 generated cases per property."""
import math

import numpy as np
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from barricade import Ball, Catalog1D, Epigraph1D, HPolyhedron, VSet, support
from barricade.horizon import numeric_horizon

from oracles import random_polyhedron
from test_catalog import catalog_functions

CASES = settings(max_examples=1000, derandomize=True, deadline=None, database=None,
                 suppress_health_check=[HealthCheck.too_slow])
seeds = st.integers(min_value=0, max_value=2 ** 32 - 1)
TAGS = ("square", "exp", "abs", "linear", "negsqrt", "recip")


def random_set(rng):
    kind = rng.integers(4)
    if kind == 0:
        n = int(rng.integers(1, 5))
        A, b, _ = random_polyhedron(rng, n, int(rng.integers(1, 9)))
        return HPolyhedron(A, b)
    if kind == 1:
        n = int(rng.integers(1, 4))
        rays = rng.normal(size=(int(rng.integers(0, 3)), n))
        return VSet(rng.normal(size=(int(rng.integers(1, 5)), n)), rays)
    if kind == 2:
        n = int(rng.integers(1, 5))
        return Ball(rng.normal(size=n), float(rng.uniform(0.1, 3)))
    return Epigraph1D(Catalog1D(str(rng.choice(TAGS)), slope=float(rng.normal())),
                      float(rng.normal()))


def _sigma(S, v):
    sv = support(S, v)
    return sv.value if sv.finite else math.inf


@CASES
@given(seeds)
def test_support_is_sublinear(seed):
    rng = np.random.default_rng(seed)
    S = random_set(rng)
    a, b = rng.normal(size=S.dim), rng.normal(size=S.dim)
    sa, sb, sab = _sigma(S, a), _sigma(S, b), _sigma(S, a + b)
    scale = 1 + abs(sa) + abs(sb) if math.isfinite(sa + sb) else 1.0
    assert sab <= sa + sb + 1e-7 * scale
    t = float(rng.uniform(0.1, 10))
    sta = _sigma(S, t * a)
    if math.isinf(sa):
        assert math.isinf(sta)
    else:
        assert abs(sta - t * sa) <= 1e-7 * (1 + abs(t * sa))


@CASES
@given(seeds)
def test_projection_is_idempotent_and_nonexpansive(seed):
    rng = np.random.default_rng(seed)
    S = random_set(rng)
    x, y = rng.normal(size=S.dim) * 5, rng.normal(size=S.dim) * 5
    px, py = S.project(x), S.project(y)
    tol = 1e-6 * (1 + np.linalg.norm(x) + np.linalg.norm(y))
    assert np.linalg.norm(S.project(px) - px) <= tol
    assert np.linalg.norm(px - py) <= np.linalg.norm(x - y) + tol


FUNCTIONS = catalog_functions()


@CASES
@given(seeds)
def test_horizon_difference_quotients_are_monotone(seed):
    rng = np.random.default_rng(seed)
    f = FUNCTIONS[int(rng.integers(len(FUNCTIONS)))]
    x0 = f.domain_samples(8, seed=int(rng.integers(100)))[int(rng.integers(8))]
    v = rng.normal(size=f.dim)
    q = list(numeric_horizon(f, v, x0).estimates)
    assert all(b >= a - 1e-9 * (1 + abs(a)) for a, b in zip(q, q[1:]))


@CASES
@given(seeds)
def test_subgradient_inequality(seed):
    rng = np.random.default_rng(seed)
    f = FUNCTIONS[int(rng.integers(len(FUNCTIONS)))]
    x = f.into_domain(rng.normal(size=f.dim) * 3)
    y = f.into_domain(rng.normal(size=f.dim) * 3)
    h = 1e-7
    if not all(math.isfinite(f(x + h * e)) for e in np.vstack([np.eye(f.dim), -np.eye(f.dim)])):
        return  # empty subdifferential on the domain boundary
    fy = f(y)
    if math.isfinite(fy):
        assert fy >= f(x) + f.subgradient(x) @ (y - x) - 1e-9 * (1 + abs(fy))
