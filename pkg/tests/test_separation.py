import numpy as np
import pytest

from barricade import (Ball, Catalog1D, Epigraph1D, HPolyhedron, VSet, counterexample_pair,
                       distance, embedded_pairs, separate, support)
from barricade.errors import DimensionError
from barricade.separation import INTERSECTING, NOT_STRONG, STRONG

from oracles import grid_distance


def test_two_balls():
    res = distance(Ball([0, 0], 1), Ball([3, 0], 1))
    assert res.lower == pytest.approx(1.0, abs=1e-8)
    assert res.upper == pytest.approx(1.0, abs=1e-8)
    out = separate(Ball([0, 0], 1), Ball([3, 0], 1))
    assert out.status == STRONG
    np.testing.assert_allclose(out.hyperplane.xstar, [1.0, 0.0], atol=1e-8)
    assert out.hyperplane.margin == pytest.approx(1.0, abs=1e-8)


def test_overlap_is_intersecting():
    out = separate(Ball([0, 0], 1), Ball([1, 0], 1))
    assert out.status == INTERSECTING
    assert Ball([0, 0], 1).contains(out.point, 1e-7) and Ball([1, 0], 1).contains(out.point, 1e-7)


def test_polyhedra_intersecting_via_lp():
    C = HPolyhedron([[1, 0], [-1, 0], [0, 1], [0, -1]], [1, 1, 1, 1])
    D = HPolyhedron([[0.0, 1.0]], [0.5])
    assert separate(C, D).status == INTERSECTING


def test_distance_matches_dense_grid():
    C = Epigraph1D(Catalog1D("square"), shift=1.0)
    D = HPolyhedron([[1.0, 1.0], [-1.0, 0.0], [0.0, 1.0]], [0.0, 3.0, 3.0])
    res = distance(C, D)
    ref = grid_distance(lambda g: g[:, 1] >= g[:, 0] ** 2 + 1,
                        lambda g: np.all(g @ D.A.T <= D.b, axis=1), ((-3, 3), (-3, 3)), 0.01)
    assert res.upper <= ref + 1e-9
    assert res.upper >= ref - 0.01
    assert res.upper - res.lower <= 1e-8


def test_distance_is_symmetric(rng):
    for _ in range(10):
        c, d = rng.normal(size=2) * 3, rng.normal(size=2) * 3
        C = VSet(c + rng.normal(size=(4, 2)))
        D = Ball(d, 0.5)
        a, b = distance(C, D), distance(D, C)
        assert a.upper == pytest.approx(b.upper, abs=1e-7)


def test_strong_margin_revalidates():
    C = Epigraph1D(Catalog1D("square"), shift=1.0)
    D = HPolyhedron([[0.0, 1.0]], [0.0])
    out = separate(C, D)
    assert out.status == STRONG
    h = out.hyperplane
    # orientation: sup over the first set below inf over the second
    s1 = support(C, h.xstar).value
    i2 = -support(D, -h.xstar).value
    assert i2 - s1 == pytest.approx(h.margin, abs=1e-8)
    assert s1 <= h.alpha <= i2
    assert h.margin == pytest.approx(1.0, abs=1e-7)


def test_hyperbola_and_axis():
    C, D, expected = counterexample_pair("hyperbola_line")
    out = separate(C, D)
    assert out.status == expected == NOT_STRONG
    np.testing.assert_allclose(out.common_ray, [1.0, 0.0])
    gaps = [g for _, _, g in out.gap_sequence]
    assert all(a > b for a, b in zip(gaps, gaps[1:]))
    assert gaps[-1] < 1e-6


def test_dimension_mismatch():
    with pytest.raises(DimensionError):
        distance(Ball([0, 0], 1), Ball([0, 0, 0], 1))


def test_counterexample_arguments():
    with pytest.raises(KeyError):
        counterexample_pair("nope")
    with pytest.raises(ValueError):
        counterexample_pair("l2_slices", 1)


@pytest.mark.parametrize("name", ["l2_slices", "l1_slices"])
def test_slice_pairs_are_strongly_separated_in_finite_dimension(name):
    C, D, expected = counterexample_pair(name, 4)
    out = separate(C, D)
    assert out.status == expected == STRONG
    assert out.hyperplane.margin > 0


def test_embedded_pairs_lie_in_the_slices():
    for name in ("l2_slices", "l1_slices"):
        C, D, _ = counterexample_pair(name, 6)
        for k, xi, zeta, gap in embedded_pairs(name, 6):
            assert C.contains(xi, 1e-12) and D.contains(zeta, 1e-12)
            assert gap == pytest.approx(np.linalg.norm(xi - zeta))
