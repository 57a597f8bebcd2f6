import random

import pytest

from entropik.algebra.fields import PrimeField, find_field_with_root
from entropik.algebra.linalg import mat_mul_mod
from entropik.patterns import (Kind, Pattern, build_c_matrix, build_pattern, check_admissible,
                               normalize_point, singular_points)


def test_dimensions():
    assert build_pattern(5, "CS").p == 3
    assert build_pattern(6, "CS").p == 4
    assert build_pattern(4, "C").p == 4
    assert build_pattern(4, "G").p == 16
    assert build_pattern(4, "S").p == 10


def test_kind_parse():
    assert Kind.parse("cs") is Kind.CYCLIC_SYMMETRIC
    with pytest.raises(ValueError):
        Kind.parse("xyz")


def test_pattern_json_roundtrip():
    pat = build_pattern(6, "CS")
    assert Pattern.from_json(pat.to_json()) == pat


@pytest.mark.parametrize("q", range(3, 11))
@pytest.mark.parametrize("kind", ["G", "S", "C", "CS"])
def test_admissible_kinds(q, kind):
    assert check_admissible(build_pattern(q, kind), trials=5, rng=random.Random(q))


def test_row_constant_pattern_not_admissible():
    classes = [[0, 0, 0], [1, 2, 3], [4, 5, 6]]
    assert not check_admissible(Pattern.from_classes(classes), trials=3, rng=random.Random(1))


def test_c_matrix_q5():
    F = PrimeField(31, 5, 2)
    C = build_c_matrix(build_pattern(5, "CS"), F)
    assert C.rows()[0] == [1, 2, 2]
    sq = C.squared()
    assert sq == [[5 * (i == j) for j in range(3)] for i in range(3)]


def test_c_matrix_q6_last_column():
    F = find_field_with_root(6, 40)
    C = build_c_matrix(build_pattern(6, "CS"), F)
    col = [F.symmetric(r[-1]) for r in C.rows()]
    assert col == [(-1) ** r for r in range(4)]


@pytest.mark.parametrize("q", range(3, 18))
def test_c_squared_is_q_identity(q):
    F = find_field_with_root(q, 40)
    C = build_c_matrix(build_pattern(q, "CS"), F)
    p = len(C.rows())
    assert C.squared() == [[q * (i == j) % F.modulus for j in range(p)] for i in range(p)]


def test_singular_points_small_q():
    F = PrimeField(31, 5, 2)
    sp5 = singular_points(build_pattern(5, "CS"), F)
    # labels s = 1..p-1 count from the first non-zero class
    assert sp5.R[1] == (1, 1, -1) and sp5.R[2] == (1, -1, 1)
    F7 = find_field_with_root(7, 40)
    sp7 = singular_points(build_pattern(7, "CS"), F7)
    assert sp7.R[1] == (1, -1, -1, 1)
    assert sp7.P[0] == (1, 0, 0, 0)


def test_q_points_are_c_over_q_images():
    F = find_field_with_root(7, 40)
    pat = build_pattern(7, "CS")
    C = build_c_matrix(pat, F)
    pts = singular_points(pat, F)
    for k, e in enumerate(pts.P):
        via_inverse = [sum(a * b for a, b in zip(row, e)) % F.modulus for row in C.inverse()]
        assert normalize_point(via_inverse, F) == pts.Q[k]
