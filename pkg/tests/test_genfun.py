import pytest
from hypothesis import given, settings, strategies as st

from entropik.genfun import (RationalGF, TooFewTerms, Unstable, fit_generating_function,
                             lambda_from_gf, pade_fit, splits_used, stabilize)
from entropik.recurrence import cs_prime_complexity, cs_prime_sequence
from entropik.report import TABLE1, golden_gf


def fit(values, **kw):
    return fit_generating_function(values, **kw)[0]


def test_q4_needs_seven_terms():
    series = golden_gf(4).series(7)
    assert series[:5] == [1, 4, 8, 12, 16]
    gf = fit(series)
    assert gf == RationalGF.from_polys([1, 2, 1], [1, -2, 1])
    # five terms give a single matching split, short of a run of three
    assert isinstance(fit(series[:5]), Unstable)


def test_constant_sequence_is_geometric():
    assert fit([1] * 8) == RationalGF((1,), (1, -1))


def test_q6_with_eight_terms_and_held_out_check():
    values = golden_gf(6).series(15)
    gf, table = fit_generating_function(values, n_terms=8)
    assert gf == golden_gf(6)
    assert gf.denominator == (1, -5, 4)
    assert len(splits_used(table, gf)) >= 3


def test_q7_truncated_below_m_is_unstable():
    values = golden_gf(7).series(5)
    assert values[:4] == [1, 9, 69, 481]
    assert isinstance(fit(values), Unstable)


def test_q7_from_half_steps():
    deg, _ = cs_prime_sequence(7, 16)
    gf = fit(deg.values)
    assert gf.even_part() == golden_gf(7)


def test_noisy_input_is_unstable():
    values = golden_gf(6).series(8)
    values[5] += 1
    out = fit(values)
    assert isinstance(out, Unstable) and not out


def test_held_out_mismatch_rejects():
    values = golden_gf(6).series(12)
    values[-1] += 1
    assert isinstance(fit_generating_function(values, n_terms=8)[0], Unstable)


def test_too_few_terms():
    with pytest.raises(TooFewTerms):
        pade_fit([1, 2, 3])


def test_every_split_reproduces_its_input():
    values = golden_gf(5).series(9)
    table = pade_fit(values)
    for (N, M), gf in table.splits.items():
        if gf is not None:
            assert gf.series(N + M + 1) == values[:N + M + 1]


def test_lambda_examples():
    assert abs(lambda_from_gf(golden_gf(7)).lam - 6.854102) < 1e-6
    assert abs(lambda_from_gf(golden_gf(8)).lam - 10.331852) < 1e-6
    est = lambda_from_gf(golden_gf(4))
    assert est.lam == 1.0 and est.growth_order == 1


TABLE1_Q = [pytest.param(q, marks=pytest.mark.xfail(
    strict=True, reason="printed 17.944273 is 1.1e-6 off 9 + sqrt(80)")) if q == 10 else q
    for q in range(4, 14)]


@pytest.mark.parametrize("q", TABLE1_Q)
def test_lambda_matches_table1(q):
    est = lambda_from_gf(golden_gf(q))
    assert abs(est.lam - TABLE1[q]["lam"]) < 1e-6


def test_q10_lambda_is_the_quadratic_root():
    assert abs(lambda_from_gf(golden_gf(10)).lam - (9 + 80 ** 0.5)) < 1e-12


@pytest.mark.parametrize("q", [5, 7, 11, 13])
def test_lambda_matches_closed_form(q):
    assert abs(lambda_from_gf(golden_gf(q)).lam - cs_prime_complexity(q).lam) < 1e-9


@pytest.mark.parametrize("q", [5, 7, 11, 13])
def test_fit_agrees_with_recurrence_for_thirty_terms(q):
    deg, _ = cs_prime_sequence(q, 80)
    half = fit(deg.values[:40])
    assert half, half
    full = half.even_part()
    assert full.series(30) == deg.full_step().values[:30]


def test_constant_denominator_rejected():
    with pytest.raises(ValueError):
        lambda_from_gf(RationalGF((1, 2), (1,)))


def test_normalization():
    gf = RationalGF.from_polys([2, 2], [2, -2])
    assert gf == RationalGF((1, 1), (1, -1))
    assert gf.denominator[0] == 1


@settings(max_examples=25, deadline=None)
@given(st.lists(st.integers(-3, 3), min_size=1, max_size=3),
       st.lists(st.integers(-3, 3), min_size=1, max_size=2))
def test_rational_series_is_recovered(num, den_tail):
    gf = RationalGF.from_polys([1] + num, [1] + den_tail)
    values = gf.series(2 * (len(gf.numerator) + len(gf.denominator)) + 4)
    table = pade_fit(values)
    assert gf in table.splits.values()
