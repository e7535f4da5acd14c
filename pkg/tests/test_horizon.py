import math

import numpy as np
import pytest

from barricade import (Ball, Catalog1D, Catalog1DLift, ConvexQuadratic, Epigraph1D, Ex53Fn,
                       HPolyhedron, AffineFn, SublevelSystem, certify_and_solve,
                       check_coercive, check_cond9, check_cond10, horizon, horizon_zero_cone)
from barricade.horizon import (HYPOTHESES_FAILED, NONEMPTY_COMPACT, NUMERIC, diverges,
                               numeric_horizon, ray_trace)

from test_catalog import catalog_functions

F52 = ConvexQuadratic(np.diag([1.0, 0.0]), [0.0, 1.0])  # y + x^2


def test_closed_form_horizon_values():
    assert horizon(F52, [0.0, -1.0]).value == -1.0
    assert horizon(F52, [1.0, 0.0]).value == math.inf
    assert horizon(Ex53Fn(), [1.0, 1.0]).value == -1.0
    assert horizon(Ex53Fn(), [-1.0, 0.0]).value == math.inf


@pytest.mark.parametrize("f", catalog_functions(), ids=lambda f: f.kind)
def test_numeric_limit_agrees_with_closed_form(f):
    for v in ([1.0, 0.0], [0.0, -1.0], [1.0, 1.0], [-0.6, 0.8]):
        exact = horizon(f, v).value
        num = numeric_horizon(f, v, f.base_points()[0]).value
        if math.isinf(exact):
            assert math.isinf(num) or num > 1e3
        else:
            # square-root growth converges like t^(-1/2): about 1e-3 at t = 2^20
            assert num == pytest.approx(exact, abs=2e-3)


@pytest.mark.parametrize("f", catalog_functions(), ids=lambda f: f.kind)
def test_difference_quotients_are_monotone(f):
    x0 = f.base_points()[0]
    for v in ([1.0, 0.0], [0.0, 1.0], [1.0, 1.0], [-1.0, 0.5]):
        q = [e for e in numeric_horizon(f, v, x0).estimates]
        assert all(b >= a - 1e-9 * (1 + abs(a)) for a, b in zip(q, q[1:]))
        lim = horizon(f, v).value
        assert all(e <= lim + 1e-9 * (1 + abs(e)) for e in q)


def test_zero_cone_of_example_function():
    K = horizon_zero_cone(F52)
    assert K.contains([0.0, -1.0]) and not K.contains([0.0, 1.0]) and not K.contains([1.0, -1.0])


def test_coercive_detection():
    assert check_coercive(ConvexQuadratic(np.eye(2))).holds
    rep = check_coercive(F52)
    assert rep.holds is False
    v = np.asarray(rep.witnesses[0]["v"])
    assert v[0] == pytest.approx(0.0) and v[1] < 0


def test_divergence_rule():
    assert diverges([-(2.0 ** k) for k in range(21)])
    assert diverges([-math.sqrt(2.0 ** k) for k in range(21)])
    assert not diverges([math.exp(-(2.0 ** k)) for k in range(6)])
    assert not diverges([1.0, 0.0, 0.5])
    assert not diverges([0.0, -1.0, math.inf])


def test_conditions_on_example_function():
    rep9 = check_cond9(Ex53Fn())
    assert rep9.holds is False
    w = rep9.witnesses[0]
    np.testing.assert_allclose(w["v"], [1.0, 0.0])
    np.testing.assert_allclose(w["x"], [0.0, 0.0])
    np.testing.assert_allclose(w["values"], [math.exp(-(2.0 ** k)) for k in range(21)])
    rep10 = check_cond10(Ex53Fn())
    assert rep10.holds is True
    assert any(np.allclose(r["x"], [1.0, 1.0]) for r in rep10.witnesses)


def test_negative_root_satisfies_cond9_not_coercive():
    f = Catalog1DLift(1, 0, Catalog1D("negsqrt"))
    assert check_cond9(f).holds is True
    assert check_coercive(f).holds is False


def test_ray_trace():
    assert ray_trace(AffineFn([1.0]), [0.0], [1.0], doublings=3) == [1.0, 2.0, 4.0, 8.0]


def test_certify_parabola_program():
    rep = certify_and_solve(Epigraph1D(Catalog1D("square")), F52)
    assert rep.conclusion == NONEMPTY_COMPACT
    assert np.linalg.norm(rep.solution.x) <= 1e-5
    assert abs(rep.solution.value) <= 1e-6


def test_certify_axis_program_flags_nonattainment():
    axis = HPolyhedron([[0.0, 1.0], [0.0, -1.0]], [0.0, 0.0])
    rep = certify_and_solve(axis, Ex53Fn())
    assert rep.conclusion == HYPOTHESES_FAILED
    assert rep.failed == ("ssp",)
    assert rep.nonattainment_flag
    assert 0 < rep.best.value < 1e-3


def test_bounded_constraint_route():
    rep = certify_and_solve(Ball([0.0, 0.0], 1.0), AffineFn([1.0, 0.0]))
    assert rep.conclusion == NONEMPTY_COMPACT
    np.testing.assert_allclose(rep.solution.x, [-1.0, 0.0], atol=1e-6)


def test_sublevel_route_via_cond9():
    M = SublevelSystem([ConvexQuadratic(np.diag([1.0, 0.0]), [0.0, -1.0]),  # y >= x^2
                        AffineFn([0.0, 1.0], -4.0)])  # y <= 4
    rep = certify_and_solve(M, AffineFn([1.0, 1.0]))
    assert rep.conclusion == NONEMPTY_COMPACT
    np.testing.assert_allclose(rep.solution.x, [-0.5, 0.25], atol=1e-4)
