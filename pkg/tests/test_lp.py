import numpy as np
import pytest
from scipy.optimize import linprog

from barricade.lp import is_feasible, linprog_max


def _scipy_max(c, A, b):
    res = linprog(-c, A_ub=A, b_ub=b, bounds=[(None, None)] * len(c), method="highs")
    return res


def test_small_optimum():
    res = linprog_max([1.0, 1.0], [[1, 0], [0, 1], [-1, 0], [0, -1]], [1, 2, 0, 0])
    assert res.status == "optimal"
    assert res.value == pytest.approx(3.0)
    np.testing.assert_allclose(res.x, [1.0, 2.0])


def test_unbounded_returns_improving_ray():
    A = np.array([[-1.0, 0.0], [0.0, -1.0]])
    res = linprog_max([1.0, 0.5], A, [0.0, 0.0])
    assert res.status == "unbounded"
    assert np.all(A @ res.ray <= 1e-12)
    assert np.dot([1.0, 0.5], res.ray) > 0


def test_infeasible():
    res = linprog_max([1.0], [[1.0], [-1.0]], [-1.0, 0.0])
    assert res.status == "infeasible"
    ok, _ = is_feasible([[1.0], [-1.0]], [-1.0, 0.0])
    assert not ok


def test_equality_rows():
    res = linprog_max([0.0, 1.0], [[-1, 0], [0, -1]], [0, 0], A_eq=[[1, 1]], b_eq=[2])
    assert res.value == pytest.approx(2.0)


def test_agrees_with_highs_on_random_programs(rng):
    for _ in range(200):
        n = int(rng.integers(1, 5))
        m = int(rng.integers(1, 9))
        A = rng.normal(size=(m, n))
        b = A @ rng.normal(size=n) + rng.uniform(0.1, 2, m)
        c = rng.normal(size=n)
        ours = linprog_max(c, A, b)
        ref = _scipy_max(c, A, b)
        if ref.status == 3:
            assert ours.status == "unbounded"
        else:
            assert ours.status == "optimal"
            assert ours.value == pytest.approx(-ref.fun, abs=1e-8, rel=1e-8)
            assert np.max(A @ ours.x - b) <= 1e-9


def test_degenerate_vertex_terminates():
    # many constraints through the same vertex: Bland's rule must not cycle
    angles = np.linspace(0, np.pi / 2, 12)
    A = np.column_stack([np.cos(angles), np.sin(angles)])
    res = linprog_max([1.0, 1.0], A, np.zeros(12))
    assert res.status == "optimal"
    assert res.value == pytest.approx(0.0, abs=1e-12)
