import pytest

from entropik.degree_line import line_degrees
from entropik.patterns import build_pattern
from entropik.recurrence import Q9_SEEDS, cs_prime_seeds, cs_prime_sequence
from entropik.surface_flow import (check_relations, map_name, propagate, verify_lemma,
                                   verify_multiplicity_relations)


def cs(q):
    return build_pattern(q, "CS")


@pytest.fixture(scope="module")
def flows():
    return {q: propagate(cs(q), n) for q, n in [(5, 10), (7, 8), (11, 6), (13, 6)]}


def test_map_order():
    assert [map_name(n) for n in (1, 2, 3, 4)] == ["I", "J", "I", "J"]


def test_q5_initial_rows(flows):
    r = flows[5]
    rows = [(r.degrees.values[n], r.exponents.u[n][0], r.exponents.u[n][1]) for n in range(5)]
    assert rows == [(1, 0, 0), (2, 0, 0), (4, 1, 0), (7, 2, 0), (12, 4, 1)]


def test_q7_fourth_step(flows):
    r = flows[7]
    assert r.degrees.values[4] == 69
    assert r.exponents.u[4][0] == 18 and r.exponents.u[4][1] == 2


@pytest.mark.parametrize("q", [5, 7, 11, 13])
def test_prime_rows_follow_table2(flows, q):
    r = flows[q]
    rows = [(r.degrees.values[n], r.exponents.u[n][0], r.exponents.u[n][1]) for n in range(5)]
    assert rows == cs_prime_seeds((q + 1) // 2)


@pytest.mark.parametrize("q", [5, 7, 11, 13])
def test_agrees_with_recurrence(flows, q):
    r = flows[q]
    n = len(r.degrees.values) - 1
    deg, rec = cs_prime_sequence(q, n)
    assert r.degrees.values == deg.values
    assert [row[:2] for row in r.exponents.u] == [row[:2] for row in rec.u]


def test_q9_initial_rows():
    r = propagate(cs(9), 4)
    u = r.exponents.u
    rows = [(r.degrees.values[n], u[n][0], u[n][1], u[n][3]) for n in range(5)]
    assert rows == Q9_SEEDS


@pytest.mark.parametrize("q", [5, 7, 11, 13])
def test_relations_hold_at_every_step(flows, q):
    r = flows[q]
    out = check_relations(r.degrees.values, r.exponents, r.exponents.p)
    assert out == {"eqdef": [], "eqinv": [], "sysdefinv2": []}


def test_q9_relations_hold():
    r = propagate(cs(9), 8)
    assert check_relations(r.degrees.values, r.exponents, 5) == {"eqdef": [], "eqinv": [], "sysdefinv2": []}


def test_degrees_match_line_method(flows):
    line = line_degrees(cs(7), 8, trials=1, granularity="half")
    assert flows[7].degrees.values == line.values


def test_germ_engine_matches_exact():
    a = propagate(cs(5), 8, engine="exact")
    b = propagate(cs(5), 8, engine="germ", seed=4)
    assert a.degrees.values == b.degrees.values
    assert a.exponents.u == b.exponents.u and a.exponents.v[1:] == b.exponents.v[1:]


@pytest.mark.parametrize("q", [5, 7, 11, 13])
def test_multiplicity_relations(flows, q):
    rep = verify_multiplicity_relations(flows[q].exponents, q)
    assert rep.ok, rep


def test_q9_class_equality_fails():
    rep = verify_multiplicity_relations(propagate(cs(9), 6).exponents, 9)
    assert not rep and rep.class_equality


def test_lemma_q5():
    rep = verify_lemma(cs(5), 8)
    assert rep.ok and rep.exact_steps == list(range(1, 9))


def test_lemma_q7():
    rep = verify_lemma(cs(7), 6)
    assert rep.ok, [s for s in rep.steps if not s.ok]
    assert len(rep.steps) == 6


def test_lemma_negative_control():
    rep = verify_lemma(cs(5), 6, skip_content=True)
    assert not rep.ok
    # S_1 and S_2 carry no content, so the first I-step with something to remove is n = 3
    assert rep.first_failure == 3 and map_name(3) == "I"


def test_non_cs_pattern_rejected():
    with pytest.raises(ValueError):
        propagate(build_pattern(5, "G"), 3)
