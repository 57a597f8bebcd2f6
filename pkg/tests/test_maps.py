import random

import pytest

from entropik.algebra.fields import find_field_with_root
from entropik.maps import (IndeterminateImage, evaluate, hadamard_map, i_point, inverse_map,
                           j_point, kappa_j, orbit_report, projectively_equal,
                           similarity_inverse_map)
from entropik.patterns import build_pattern

F = find_field_with_root(2, 61)


def test_hadamard_components():
    assert [str(c) for c in hadamard_map(3).components] == ["1*x1*x2", "1*x0*x2", "1*x0*x1"]
    assert [str(c) for c in hadamard_map(2).components] == ["1*x1", "1*x0"]


@pytest.mark.parametrize("p", [2, 3, 5, 8])
def test_hadamard_degree_and_fixed_point(p):
    J = hadamard_map(p)
    assert J.degree == p - 1
    assert evaluate(J, [1] * p) == tuple([1] * p)


def test_hadamard_at_coordinate_point_is_indeterminate():
    with pytest.raises(IndeterminateImage):
        evaluate(hadamard_map(3), [1, 0, 0])


def test_hadamard_rational_point():
    assert projectively_equal(evaluate(hadamard_map(3), [1, 2, 3]), [6, 3, 2])


def test_general_q3_inverse_is_adjugate():
    I = inverse_map(build_pattern(3, "G"))
    assert I.degree == 2 and len(I.components) == 9


@pytest.mark.parametrize("q,deg", [(5, 2), (6, 3), (7, 3), (9, 4)])
def test_cs_inverse_reduced_degree(q, deg):
    assert inverse_map(build_pattern(q, "CS")).degree == deg


@pytest.mark.parametrize("q", range(3, 14))
def test_cs_inverse_agrees_with_similarity_route(q):
    pat = build_pattern(q, "CS")
    Fq = find_field_with_root(q, 61)
    I = inverse_map(pat, Fq)
    CJC = similarity_inverse_map(pat, Fq)
    rng = random.Random(q)
    P = Fq.modulus
    for _ in range(100):
        x = [rng.randrange(1, P) for _ in range(pat.p)]
        assert projectively_equal(evaluate(I, x), evaluate(CJC, x), P)


@pytest.mark.parametrize("p", [3, 4, 6])
def test_jj_is_kappa_times_identity(p):
    rng = random.Random(p)
    P = F.modulus
    kap = kappa_j(p, F)
    for _ in range(100):
        x = [rng.randrange(1, P) for _ in range(p)]
        k = 1
        for v in x:
            k = k * pow(v, p - 2, P) % P
        assert j_point(j_point(x, P), P) == [k * v % P for v in x]
    assert kap is not None


@pytest.mark.parametrize("kind", ["G", "S", "C", "CS"])
@pytest.mark.parametrize("q", [3, 4, 5, 6])
def test_ii_is_projective_identity(kind, q):
    pat = build_pattern(q, kind)
    rng = random.Random(q)
    P = F.modulus
    for _ in range(100):
        x = [rng.randrange(1, P) for _ in range(pat.p)]
        assert projectively_equal(i_point(pat, i_point(pat, x, P), P), x, P)


@pytest.mark.parametrize("kind", ["G", "C", "CS"])
def test_k_then_inverse_returns_start(kind):
    pat = build_pattern(5, kind)
    rng = random.Random(7)
    P = F.modulus
    x = [rng.randrange(1, P) for _ in range(pat.p)]
    y = j_point(i_point(pat, x, P), P)          # one K step, I applied first
    back = i_point(pat, j_point(y, P), P)
    assert projectively_equal(back, x, P)


def test_orbit_q7_zero_class():
    rep = orbit_report(build_pattern(7, "CS"), "Pi_0")
    assert rep.diagram() == "Pi_0 >->[J] P_0 -->[I] P_0 ~~>[J] Pi_0"


@pytest.mark.parametrize("s", [1, 2, 3])
def test_orbit_q7_other_classes(s):
    rep = orbit_report(build_pattern(7, "CS"), f"Pi_{s}")
    assert rep.diagram() == (f"Pi_{s} >->[J] P_{s} -->[I] R_{s} -->[J] R_{s} "
                             f"-->[I] P_{s} ~~>[J] Pi_{s}")


def test_orbit_q9_codimension_two():
    rep = orbit_report(build_pattern(9, "CS"), "Pi_3")
    assert rep.diagram() == "Pi_3 >->[J] P_3 -->[I] R_3 ~~>[J] Pi_0,3"
