import math

import pytest
from hypothesis import given, strategies as st

from morrey_embed.weights import (INF, AsymptoticProfile, End, GeometricMean, Growth, InconclusiveError, Limit,
                                  LogExample, Ordering, PiecewisePower, Power, PowerLog, Tabulated,
                                  WeightRangeError, check_gp, check_intc, lex_compare_growth, limit_behavior, rphi,
                                  weight_from_json)

exps = st.sampled_from([0.5, 1.0, 1.5, 2.0, 3.0, 4.0, 8.0])


# -- evaluation ---------------------------------------------------------------

def test_eval_examples():
    assert Power(2).eval(3) == 2 ** -1.5
    assert LogExample().eval(0) == 1.0
    assert PiecewisePower(2, 4).eval(-2) == pytest.approx(math.sqrt(2), rel=1e-15)


def test_normalisation_applied_at_ingest():
    phi = Power(2, factor=7.5)
    assert phi.eval(0) == 1.0
    assert phi.eval(4) == pytest.approx(Power(2).eval(4), rel=1e-15)


@given(exps, exps, st.integers(-30, 30))
def test_evaluation_positive_and_monotone(u, v, nu):
    phi = PiecewisePower(u, v)
    assert phi.eval(nu) > 0
    assert phi.eval(nu) <= phi.eval(nu - 1)


def test_tabulated_range_and_profile():
    tab = Tabulated.from_function(lambda t: t ** 0.5, -5, 5)
    assert tab.eval(2) == pytest.approx(0.5)
    with pytest.raises(WeightRangeError):
        tab.eval(6)
    with pytest.raises(InconclusiveError):
        limit_behavior(tab, 2, End.ZERO)
    with pytest.raises(InconclusiveError):
        check_intc(tab)


# -- class membership ---------------------------------------------------------

def test_power_membership_examples():
    # t^0.4 with d = 1 is the Power weight with d/u = 0.4
    assert check_gp(Power(2.5), 2)
    assert check_gp(Power(INF), 0.7)
    assert check_gp(Power(INF), 50)


def test_log_damped_power_not_member():
    # t^u (log(e+t))^-1 with small u
    phi = PowerLog(10, -1)
    res = check_gp(phi, 1)
    assert not res
    t, s = res.witness
    assert t < s and phi(s) < phi(t)


@given(exps, exps)
def test_power_membership_iff(u, p):
    assert bool(check_gp(Power(u), p)) == (p <= u)


@given(exps, exps)
def test_piecewise_member_at_min(u, v):
    assert check_gp(PiecewisePower(u, v), min(u, v))


@given(st.sampled_from([1.0, 2.0, 3.0, 5.0, INF]), st.sampled_from([1.0, 2.0, 3.0, 5.0, INF]), exps, exps)
def test_membership_monotone_in_p(u, v, p1, p2):
    phi = PiecewisePower(u, v)
    lo, hi = sorted((p1, p2))
    if check_gp(phi, hi):
        assert check_gp(phi, lo)


@given(exps, exps, exps)
def test_rphi_bounds_member_p(u, v, p):
    phi = PiecewisePower(u, v)
    if check_gp(phi, p):
        assert rphi(phi) >= p


@given(exps, exps, st.integers(-30, 30))
def test_doubling_bound(u, v, nu):
    phi = PiecewisePower(u, v)
    p = min(u, v)
    assert phi.eval(nu - 1) <= 2 ** (1 / p) * phi.eval(nu) * (1 + 1e-12)


def test_powerlog_and_logexample_membership():
    for p in (0.5, 1, 2):
        assert check_gp(PowerLog(p, -1), p)
    assert check_gp(PowerLog(4, -1, 10), 4)
    assert check_gp(LogExample(), 1)
    assert not check_gp(LogExample(), 1.01)


def test_powerlog_rejects_small_L():
    with pytest.raises(ValueError):
        PowerLog(2, -1, 2.0)


def test_geometric_mean_membership():
    phi = GeometricMean(Power(2), Power(4), 0.5)
    assert phi.eval(4) == pytest.approx(2 ** (-4 * (0.5 * 0.5 + 0.5 * 0.25)))
    assert check_gp(phi, 2)


# -- rphi, intc, limits -------------------------------------------------------

def test_rphi_examples():
    assert rphi(PiecewisePower(2, 4)) == 2
    assert rphi(LogExample()) == 1
    assert rphi(LogExample(d=3)) == 3
    assert rphi(Power(INF)) == INF
    assert rphi(PiecewisePower(INF, 2)) == INF


def test_intc_examples():
    res = check_intc(Power(2))
    assert res and res.eps == 0.5 and res.C == 1.0
    assert not check_intc(Power(INF))
    res = check_intc(PiecewisePower(2, INF))
    assert not res and res.witness[0] > res.witness[1] > 1


@given(exps, exps)
def test_intc_constant_admissible(u, v):
    phi = PiecewisePower(u, v)
    res = check_intc(phi)
    assert res
    for a in range(-12, 13, 3):
        for b in range(a, 13, 3):
            # t = 2^b >= r = 2^a
            assert phi.eval(-b) / phi.eval(-a) >= (2.0 ** (b - a)) ** res.eps / res.C * (1 - 1e-12)


def test_limit_behavior_examples():
    assert limit_behavior(Power(4), 2, End.ZERO) == Limit.INFINITE
    assert limit_behavior(LogExample(), 1, End.ZERO) == Limit.POSITIVE_FINITE
    for end in End:
        assert limit_behavior(Power(2), 2, end) == Limit.POSITIVE_FINITE


@given(exps, exps, exps)
def test_limit_split_exclusive(u, v, p):
    phi = PiecewisePower(u, v)
    zero = limit_behavior(phi, p, End.ZERO)
    inf = limit_behavior(phi, p, End.INFINITY)
    both_finite = zero == Limit.POSITIVE_FINITE and inf == Limit.POSITIVE_FINITE
    assert not (both_finite and (zero == Limit.INFINITE or inf == Limit.ZERO))


def test_lex_compare_examples():
    assert lex_compare_growth(Power(4), Power(4), 1, End.ZERO) == Ordering.EQUAL
    assert lex_compare_growth(Power(4), Power(2), 1, End.INFINITY) == Ordering.LESS
    # log factor tends to a constant at the zero end
    assert lex_compare_growth(Power(2), PowerLog(2, -1), 1, End.ZERO) == Ordering.EQUAL


def test_ell_membership_rule():
    assert Growth(-0.1, 5).in_ell(0.5)
    assert not Growth(0.1, -5).in_ell(INF)
    assert Growth(0, 0).in_ell(INF) and not Growth(0, 0).in_ell(10)
    assert Growth(0, -1).in_ell(2) and not Growth(0, -1).in_ell(1)


# -- JSON ---------------------------------------------------------------------

@pytest.mark.parametrize("phi", [Power(2), Power(INF, 2), PiecewisePower(2, 4), PowerLog(2, -1, 5), LogExample(),
                                 Tabulated.from_function(lambda t: min(t, 1.0), -4, 4,
                                                         AsymptoticProfile(1, 0, 0, 0))])
def test_weight_json_round_trip(phi):
    back = weight_from_json(phi.to_json())
    assert [back.eval(n) for n in range(-4, 5)] == [phi.eval(n) for n in range(-4, 5)]
    assert back.to_json() == phi.to_json()


def test_weight_json_strict():
    with pytest.raises(ValueError, match="uu"):
        weight_from_json({"family": "power", "params": {"uu": 2}, "d": 1})
    with pytest.raises(ValueError, match="bogus"):
        weight_from_json({"family": "power", "params": {"u": 2}, "d": 1, "bogus": 0})
