import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from morrey_embed.oracle import SpaceSpec
from morrey_embed.seqnorm import norm_value
from morrey_embed.weights import INF, LogExample, PiecewisePower, Power
from morrey_embed.witnesses import (KINDS, WitnessFamily, WitnessInapplicable, blowup_scales, decay_scales,
                                    dual_gamma, fine_index, global_decay, local_blowup, nested_atoms, single_coeff,
                                    single_level)


def restrict_stages(seq, levels):
    keep = {j: seq.level(j) for j in seq.levels if j in levels}
    return type(seq).from_arrays(seq.d, keep)


FAMILIES = [
    WitnessFamily("local_blowup", {"phi": Power(4), "s": 0.5, "p": 2, "q": 2}),
    WitnessFamily("global_decay", {"phi": Power(4), "s": 0.0, "p": 2, "q": 2}),
    WitnessFamily("single_level", {"s1": 0.5}),
    WitnessFamily("single_coeff", {}),
    WitnessFamily("fine_index", {"s": 1.0, "q1": 4, "q2": 2}),
    WitnessFamily("nested_dual", {"phi": Power(2), "s": 0.5, "r": 2}),
    WitnessFamily("nested_atoms", {"phi": Power(2), "s": 0.5}),
]


# -- local_blowup ---------------------------------------------------------------

@pytest.mark.parametrize("q", [1, 2, 3])
def test_local_blowup_values(q):
    phi = PiecewisePower(4, 2)
    for N in (1, 5, 12):
        seq = local_blowup(phi, 1.0, 2, q, N)
        assert norm_value(seq, "n", 1.0, 2, q, phi) == pytest.approx(N ** (1 / q), rel=1e-9)
    one = local_blowup(phi, 1.0, 2, q, 1)
    assert norm_value(one, "b", 1.0, 2, q, phi) == pytest.approx(1.0, rel=1e-12)


def test_local_blowup_b_norm_bounded():
    phi = Power(4)
    vals = [norm_value(local_blowup(phi, 0.0, 2, 1, N), "b", 0.0, 2, 1, phi) for N in (4, 8, 16, 24)]
    assert max(vals) < 2.5
    assert vals[-1] == pytest.approx(vals[-2], rel=1e-3)


def test_local_blowup_needs_blowup():
    with pytest.raises(WitnessInapplicable):
        local_blowup(Power(2), 0, 2, 2, 3)


def test_blowup_scales_greedy_minimal():
    phi = LogExample()
    p = 0.5
    ks = blowup_scales(phi, p, 6)
    val = lambda k: math.log2(phi.eval(k)) + k / p  # noqa: E731
    assert ks[0] == 1
    for a, b in zip(ks, ks[1:]):
        assert val(b) > val(a) + 1
        assert all(val(k) <= val(a) + 1 for k in range(a + 1, b))


# -- global_decay ---------------------------------------------------------------

@pytest.mark.parametrize("q", [1, 2])
def test_global_decay_values(q):
    phi = Power(4)
    for N in (2, 5, 8):
        seq = global_decay(phi, 0.5, 2, N, q)
        assert norm_value(seq, "b", 0.5, 2, q, phi) <= 1 + 1e-9
        assert norm_value(seq, "n", 0.5, 2, q, phi) >= (N + 1) ** (1 / q) * (1 - 1e-9)


def test_global_decay_e_bounded_with_p_exponent():
    phi = Power(4)
    vals = [norm_value(global_decay(phi, 0.0, 2, N, 1, "p"), "e", 0.0, 2, 1, phi) for N in (2, 4, 6, 8)]
    assert max(vals) <= 1.5


def test_decay_scales_greedy_minimal():
    phi, p, r = Power(4), 2, 2
    ks = decay_scales(phi, p, r, 6)
    f = lambda k: math.log2(phi.eval(-k)) - k / p  # noqa: E731
    for ell, (a, b) in enumerate(zip(ks, ks[1:]), start=1):
        assert f(b) < -math.log2(ell + 1) / r
        assert all(f(k) >= -math.log2(ell + 1) / r for k in range(a + 1, b))


def test_global_decay_needs_decay():
    with pytest.raises(WitnessInapplicable):
        global_decay(Power(2), 0, 2, 3)


# -- single_level / single_coeff / fine_index ---------------------------------

@pytest.mark.parametrize("k", [0, 1, 4, 7])
def test_single_level_bounds(k):
    phi1, phi2 = Power(2), Power(4)
    s1, s2 = 0.25, 1.0
    seq = single_level(k, s1)
    assert norm_value(seq, "e", s1, 2, 2, phi1) <= 1 + 1e-9
    assert norm_value(seq, "e", s2, 2, INF, phi2) >= 2 ** (k * (s2 - s1)) * (1 - 1e-9)
    if k == 0:
        assert norm_value(seq, "e", s1, 2, 2, phi1) == pytest.approx(1.0, rel=1e-12)


@pytest.mark.parametrize("j", range(0, 13, 3))
def test_single_coeff_value(j):
    phi = LogExample()
    assert norm_value(single_coeff(j), "e", 0.7, 1, 2, phi) == pytest.approx(2 ** (0.7 * j) * phi.eval(j), rel=1e-12)


def test_fine_index_partial_sums():
    s, q1, q2 = 1.0, 4.0, 2.0
    seq = fine_index(s, q1, q2, 10)
    a = np.array([2 ** (j * s) * abs(seq.level(j)[1][0]) for j in seq.levels])
    assert a == pytest.approx([(j + 1) ** -0.5 for j in range(11)], rel=1e-14)
    # tails: Σ (j+1)^{-q1/q2} converges, Σ (j+1)^{-1} grows like log
    tail = lambda r, n: sum((j + 1) ** (-r / q2) for j in range(n, 2 * n))  # noqa: E731
    assert tail(q1, 1000) < 1e-3
    assert tail(q2, 1000) == pytest.approx(math.log(2), abs=1e-3)
    with pytest.raises(WitnessInapplicable):
        fine_index(s, 2, 2, 3)


# -- nested constructions -----------------------------------------------------

def test_nested_atoms_bounded_at_critical_smoothness():
    phi = Power(2)
    vals = [norm_value(nested_atoms(0.5, phi, N), "e", 0.5, 1, 2, phi) for N in (4, 8, 12, 16, 20)]
    steps = np.diff(vals)
    assert np.all(steps > 0) and np.all(steps[1:] < 0.5 * steps[:-1])
    assert vals[-1] < 2.5


def test_nested_dual_gamma():
    g = dual_gamma(0.25, Power(2), 2, 5)
    # a_j = 2^{-j/4} / 2^{-j/2} and r' - 1 = 1
    assert g == pytest.approx([2 ** (0.25 * j) for j in range(5)])
    assert dual_gamma(0.25, Power(2), 1, 3) == [1.0] * 3


# -- the family wrapper -------------------------------------------------------

@pytest.mark.parametrize("fam", FAMILIES, ids=lambda f: f.kind)
@given(N=st.integers(1, 7))
def test_prefix_property(fam, N):
    small, big = fam.generate(N), fam.generate(N + 1)
    assert set(small.support()) <= set(big.support()) or fam.kind in ("single_level", "single_coeff")
    if fam.kind in ("single_level", "single_coeff"):
        return
    if fam.kind == "local_blowup":
        stages = set(small.levels)
    elif fam.kind == "nested_dual":
        # γ is renormalised per depth for the dual pairing; the support still nests
        assert set(small.levels) == set(range(N))
        return
    else:
        stages = set(range(N + 1)) if fam.kind in ("global_decay", "fine_index") else set(range(N))
    assert restrict_stages(big, stages) == small


@pytest.mark.parametrize("fam", FAMILIES, ids=lambda f: f.kind)
def test_family_json_round_trip(fam):
    back = WitnessFamily.from_json(fam.to_json())
    assert back.id == fam.id
    assert back.generate(4) == fam.generate(4)


def test_family_validation():
    assert set(KINDS) == {f.kind for f in FAMILIES}
    with pytest.raises(ValueError, match="unknown witness kind"):
        WitnessFamily("mystery", {})
    with pytest.raises(ValueError, match="sss"):
        WitnessFamily("single_level", {"sss": 1})
    with pytest.raises(ValueError, match="missing"):
        WitnessFamily("fine_index", {"s": 1})


def test_closed_forms():
    src = SpaceSpec("B", 0.5, 2, 2, Power(4))
    tgt = SpaceSpec("N", 0.5, 2, 2, Power(4))
    fam = FAMILIES[0]
    for N in (2, 4, 8):
        assert fam.closed_form(N, src, tgt) == pytest.approx(math.sqrt(N))
    e1 = SpaceSpec("E", 0.5, 2, 2, Power(2))
    e2 = SpaceSpec("E", 1.0, 2, INF, Power(2))
    assert FAMILIES[2].closed_form(6, e1, e2) == pytest.approx(2 ** 3)
    assert FAMILIES[6].closed_form(9, SpaceSpec("E", 0.5, 1, 2, Power(2)), "C") == 9
