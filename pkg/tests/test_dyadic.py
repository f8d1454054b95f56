import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import random_seq
from morrey_embed.dyadic import (CubeRangeError, DyadicCube, PreconditionError, canonical, contains, index_set_I,
                                 relevant_cubes)
from morrey_embed.seqnorm import NormRequest, brute_force_norm, space_norm
from morrey_embed.weights import LogExample, PiecewisePower, Power

cubes = st.builds(DyadicCube, st.integers(-3, 5), st.tuples(st.integers(-20, 20)))


def test_contains_examples():
    assert contains(DyadicCube(0, (0,)), DyadicCube(2, (3,)))
    assert not contains(DyadicCube(1, (0,)), DyadicCube(1, (1,)))
    assert not contains(DyadicCube(-1, (-1,)), DyadicCube(0, (0,)))


@given(cubes, cubes, cubes)
def test_contains_partial_order(a, b, c):
    assert contains(a, a)
    if contains(a, b) and contains(b, a):
        assert a == b
    if contains(a, b) and contains(b, c):
        assert contains(a, c)


@given(cubes, cubes)
def test_contains_matches_point_sets(P, Q):
    (plo, phi), = P.bounds()
    (qlo, qhi), = Q.bounds()
    assert contains(P, Q) == (plo <= qlo and qhi <= phi)


def test_offset_guard():
    with pytest.raises(CubeRangeError):
        DyadicCube(0, (2 ** 52,))


def test_canonical_order_and_dedup():
    cs = [DyadicCube(1, (1,)), DyadicCube(0, (0,)), DyadicCube(1, (0,)), DyadicCube(0, (0,))]
    assert canonical(cs) == (DyadicCube(0, (0,)), DyadicCube(1, (0,)), DyadicCube(1, (1,)))


def test_index_set_examples():
    assert len(index_set_I(3, 3, (5,))) <= 3
    assert [c.offset for c in index_set_I(5, 3, (5,), 1, 1)] == [(20,), (21,), (22,), (23,)]
    # touching neighbours enter as soon as the dilation exceeds 1
    assert [c.offset for c in index_set_I(0, 0, (0,), 1, 1)] == [(0,)]
    assert [c.offset for c in index_set_I(0, 0, (0,), 1 + 1e-9, 1 + 1e-9)] == [(-1,), (0,), (1,)]


@given(st.integers(0, 8), st.integers(0, 8), st.integers(-1000, 1000), st.integers(-5, 5))
def test_index_set_cardinality_law(J, j, m1, m2):
    for m in ((m1,), (m1, m2)):
        d = len(m)
        n = len(index_set_I(J, j, m))
        ratio = n / 2 ** (d * max(J - j, 0))
        assert 1 / 2 ** d <= ratio <= 3 ** d


def test_relevant_cubes_examples():
    F = relevant_cubes([DyadicCube(0, (0,))], Power(2), 2)
    assert F == (DyadicCube(0, (0,)),)
    assert relevant_cubes([], Power(2), 2) == ()
    F = relevant_cubes([DyadicCube(2, (-1,)), DyadicCube(2, (0,))], Power(2), 2)
    # one chain per side of 0; each is already stable at the cell level
    assert F == (DyadicCube(2, (-1,)), DyadicCube(2, (0,)))
    F = relevant_cubes([DyadicCube(2, (-2,)), DyadicCube(2, (-1,)), DyadicCube(2, (1,))], Power(2), 2)
    assert DyadicCube(1, (-1,)) in F and DyadicCube(2, (1,)) in F
    assert not any(contains(P, DyadicCube(2, (-1,))) and contains(P, DyadicCube(2, (0,))) for P in F)


def test_relevant_cubes_needs_gp():
    with pytest.raises(PreconditionError):
        relevant_cubes([DyadicCube(0, (0,))], Power(2), 3)


@pytest.mark.parametrize("phi,p", [(Power(2), 1), (PiecewisePower(2, 4), 2), (LogExample(), 1)])
@pytest.mark.parametrize("scale", ["b", "f", "n", "e"])
def test_relevant_cubes_sound_against_deep_scan(phi, p, scale):
    rng = np.random.default_rng(7)
    for _ in range(5):
        seq = random_seq(rng, J_max=3, width=1, density=0.3)
        req = NormRequest(scale, 0.5, p, 2.0, phi)
        fast = space_norm(seq, req).value
        deep = brute_force_norm(seq, req, nu_floor=-60)
        assert fast == pytest.approx(deep, rel=1e-12)
