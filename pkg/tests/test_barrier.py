import numpy as np
import pytest

from barricade import (Ball, Catalog1D, ConvexQuadratic, Epigraph1D, HPolyhedron,
                       SublevelSystem, VSet, classify_barrier, ssp_verdict, support)
from barricade import Catalog1DLift
from barricade.barrier import (BOUNDARY, HAS_SSP, INCONCLUSIVE, INTERIOR, LACKS_SSP,
                               OUTSIDE, sphere_directions)
from barricade.cones import recession_cone

from oracles import lp_barrier_oracle, random_polyhedron


def _far_points(S, radius, count=200, seed=1):
    rng = np.random.default_rng(seed)
    D = rng.normal(size=(count, S.dim))
    D /= np.linalg.norm(D, axis=1)[:, None]
    return [S.project(radius * d) for d in D]


def test_parabola_interior_with_growth_certificate():
    E = Epigraph1D(Catalog1D("square"))
    cl = classify_barrier(E, [0.0, -1.0])
    assert cl.verdict == INTERIOR
    assert cl.alpha > 0 and cl.R > 0
    for c in _far_points(E, 50 * cl.R):
        if np.linalg.norm(c) >= cl.R:
            assert np.dot([0.0, -1.0], c) <= -cl.alpha * np.linalg.norm(c) + 1e-9


def test_exp_epigraph_boundary():
    assert classify_barrier(Epigraph1D(Catalog1D("exp")), [0.0, -1.0]).verdict == BOUNDARY


def test_line_outside_with_ray():
    line = HPolyhedron([[0.0, 1.0], [0.0, -1.0]], [0.0, 0.0])
    cl = classify_barrier(line, [1.0, 0.0])
    assert cl.verdict == OUTSIDE
    np.testing.assert_allclose(cl.ray, [1.0, 0.0])


def test_bounded_set_everything_interior():
    cl = classify_barrier(Ball([3.0, 0.0], 1.0), [0.3, 0.4])
    assert cl.verdict == INTERIOR and cl.alpha == pytest.approx(0.25)


def test_zero_xstar_rejected():
    with pytest.raises(ValueError):
        classify_barrier(Ball([0, 0], 1), [0.0, 0.0])


def test_classification_agrees_with_generator_signs(rng):
    for _ in range(60):
        n = int(rng.integers(1, 4))
        A, b, _ = random_polyhedron(rng, n, int(rng.integers(1, 7)))
        P = HPolyhedron(A, b)
        gens = recession_cone(P).generators
        xs = rng.normal(size=n)
        cl = classify_barrier(P, xs)
        strict = all(xs @ g < -1e-7 for g in gens)
        assert (cl.verdict == INTERIOR) == strict
        assert (cl.verdict != OUTSIDE) == lp_barrier_oracle(P.A, xs)


@pytest.mark.parametrize("S, expected", [
    (Epigraph1D(Catalog1D("square")), HAS_SSP),
    (Epigraph1D(Catalog1D("exp")), LACKS_SSP),
    (Epigraph1D(Catalog1D("recip")), LACKS_SSP),
    (Epigraph1D(Catalog1D("negsqrt")), LACKS_SSP),
    (Epigraph1D(Catalog1D("abs")), LACKS_SSP),
    (HPolyhedron([[0.0, 1.0]], [0.0]), LACKS_SSP),
    (HPolyhedron([[0.0, 1.0], [0.0, -1.0]], [0.0, 0.0]), LACKS_SSP),
    (HPolyhedron([[1, 0], [-1, 0], [0, 1], [0, -1]], [1, 1, 1, 1]), HAS_SSP),
    (Ball([0.0, 0.0, 0.0], 2.0), HAS_SSP),
    (VSet([[0, 0]], [[1, 0], [0, 1]]), LACKS_SSP),
])
def test_ssp_verdicts(S, expected):
    v = ssp_verdict(S)
    assert v.verdict == expected
    if expected == LACKS_SSP:
        # the witness is a nonzero boundary point of the barrier cone
        assert support(S, v.witness).finite
        assert classify_barrier(S, v.witness).verdict == BOUNDARY


def test_trivial_barrier_cones_have_ssp():
    # rec = R^2 leaves barc = {0}; a half-line in R has barc = [0, inf)
    plane = VSet([[0.0, 0.0]], [[1, 0], [-1, 0], [0, 1], [0, -1]])
    assert ssp_verdict(plane).verdict == HAS_SSP
    assert ssp_verdict(HPolyhedron([[1.0]], [1.0])).verdict == HAS_SSP
    assert ssp_verdict(HPolyhedron([[0.0, 0.0, 1.0]], [1.0])).verdict == LACKS_SSP


def test_sublevel_ssp():
    exp_epi = SublevelSystem([Catalog1DLift(2, 0, Catalog1D("exp"), a=[0.0, -1.0])])
    v = ssp_verdict(exp_epi)
    assert v.verdict == LACKS_SSP
    assert classify_barrier(exp_epi, v.witness).verdict == BOUNDARY
    parabola = SublevelSystem([ConvexQuadratic(np.diag([1.0, 0.0]), [0.0, -1.0])])
    assert ssp_verdict(parabola).verdict in (HAS_SSP, INCONCLUSIVE)


def test_sphere_directions_are_unit_and_reproducible():
    D = sphere_directions(3, 64, seed=4)
    np.testing.assert_allclose(np.linalg.norm(D, axis=1), 1.0)
    np.testing.assert_array_equal(D, sphere_directions(3, 64, seed=4))
