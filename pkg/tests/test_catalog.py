import math

import numpy as np
import pytest

from barricade import (AffineFn, Catalog1D, Catalog1DLift, ConvexQuadratic, Ex53Fn, NormFn,
                       function_from_dict)

from oracles import grid_conjugate

TAGS = ["square", "exp", "abs", "linear", "negsqrt", "recip"]


def catalog_functions():
    return [
        AffineFn([1.0, -2.0], 0.5),
        ConvexQuadratic([[2.0, 0.5], [0.5, 1.0]], [1.0, 0.0], -1.0),
        ConvexQuadratic(np.diag([1.0, 0.0]), [0.0, 1.0]),
        NormFn([1.0, -1.0], weight=2.0, offset=-1.0),
        Catalog1DLift(2, 0, Catalog1D("exp"), a=[0.0, -1.0]),
        Catalog1DLift(2, 1, Catalog1D("negsqrt")),
        Catalog1DLift(2, 0, Catalog1D("recip"), a=[0.0, 1.0]),
        Ex53Fn(),
    ]


@pytest.mark.parametrize("tag", TAGS)
def test_vectorised_values_match_scalar(tag):
    phi = Catalog1D(tag, slope=0.7)
    xs = np.linspace(-5, 5, 1001)
    np.testing.assert_allclose(phi.values(xs), [phi(x) for x in xs], rtol=1e-14)


@pytest.mark.parametrize("tag", TAGS)
@pytest.mark.parametrize("s", [-2.0, -0.3, 0.4, 1.7])
def test_closed_form_conjugate_against_grid(tag, s):
    phi = Catalog1D(tag, slope=0.4)
    val = phi.conjugate(s)
    ref = grid_conjugate(phi, s)
    if math.isinf(val):
        assert grid_conjugate(phi, s, -600, 600) > ref + 1.0
    else:
        assert val == pytest.approx(ref, abs=2e-3)


@pytest.mark.parametrize("tag", TAGS)
def test_derivative_matches_finite_differences(tag):
    phi = Catalog1D(tag, slope=0.4)
    for x in (0.3, 1.1, 2.5) + ((-0.7, -1.9) if tag not in ("negsqrt", "recip") else ()):
        h = 1e-6
        fd = (phi(x + h) - phi(x - h)) / (2 * h)
        assert phi.subgradient(x) == pytest.approx(fd, rel=1e-5, abs=1e-6)


def interior(f, x, h=1e-7):
    """True when ``x`` sits inside the domain (the subdifferential is nonempty there)."""
    return all(math.isfinite(f(x + h * e)) for e in np.vstack([np.eye(f.dim), -np.eye(f.dim)]))


@pytest.mark.parametrize("f", catalog_functions(), ids=lambda f: f.kind)
def test_subgradient_inequality(f, rng):
    pts = f.domain_samples(20, seed=3)
    for x in pts:
        if not interior(f, x):
            continue
        g = f.subgradient(x)
        for y in pts:
            fy = f(y)
            if math.isfinite(fy):
                assert fy >= f(x) + g @ (y - x) - 1e-9 * (1 + abs(fy))


@pytest.mark.parametrize("f", catalog_functions(), ids=lambda f: f.kind)
def test_gradient_finite_difference_at_smooth_points(f):
    x = f.domain_samples(6, seed=5)[-1]
    if f.kind == "norm" and np.allclose(x, f.center):
        pytest.skip("kink")
    g = f.subgradient(x)
    h = 1e-6
    for i in range(f.dim):
        e = np.zeros(f.dim)
        e[i] = h
        if not (math.isfinite(f(x + e)) and math.isfinite(f(x - e))):
            continue
        fd = (f(x + e) - f(x - e)) / (2 * h)
        assert g[i] == pytest.approx(fd, rel=1e-4, abs=1e-5)


@pytest.mark.parametrize("f", catalog_functions(), ids=lambda f: f.kind)
def test_round_trip(f):
    assert function_from_dict(f.to_dict(), dim=f.dim).to_dict() == f.to_dict()


def test_invalid_inputs():
    with pytest.raises(ValueError):
        Catalog1D("cube")
    with pytest.raises(ValueError):
        ConvexQuadratic([[1.0, 0.0], [0.0, -1.0]])
    with pytest.raises(ValueError):
        function_from_dict({"kind": "spline"})


def test_domains():
    assert Catalog1D("negsqrt")(-1.0) == math.inf
    assert Catalog1D("recip")(0.0) == math.inf
    assert Ex53Fn()([-1.0, 0.0]) == math.inf
    assert Ex53Fn()([0.0, 0.0]) == 1.0
