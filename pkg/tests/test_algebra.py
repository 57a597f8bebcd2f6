import random

import pytest
import sympy as sp
from hypothesis import given, settings, strategies as st

from entropik.algebra.fields import PrimeField, find_field_with_root, is_prime
from entropik.algebra.linalg import SingularMatrixError, adjugate_integer, adjugate_mod, inverse_mod
from entropik.algebra.multipoly import MultiPoly, poly_content_monomial, remove_monomial_content, substitute
from entropik.algebra.unipoly import UniPoly, uni_gcd

F31 = PrimeField(31)
BIG = find_field_with_root(2, 61)


def test_field_with_fifth_root_small():
    F = find_field_with_root(5, 4)
    assert F.modulus == 31
    assert pow(F.root, 5, 31) == 1 and F.root != 1


def test_field_with_seventh_root_large():
    F = find_field_with_root(7, 20)
    assert F.modulus > 2 ** 20 and F.modulus % 7 == 1
    assert pow(F.root, 7, F.modulus) == 1 and F.root != 1


def test_field_square_root_of_unity():
    F = find_field_with_root(2, 2)
    assert F.modulus >= 5 and is_prime(F.modulus)
    assert F.root == F.modulus - 1


def test_field_rejects_fake_root():
    with pytest.raises(ValueError):
        PrimeField(31, 5, 3)


@settings(max_examples=200)
@given(st.integers(0, 30), st.integers(0, 30), st.integers(0, 30))
def test_field_axioms(a, b, c):
    F = F31
    assert F.mul(a, F.add(b, c)) == F.add(F.mul(a, b), F.mul(a, c))
    if a:
        assert F.mul(a, F.inv(a)) == 1


def test_content_examples():
    x0, x1 = MultiPoly.variables(2)
    assert poly_content_monomial(x0 ** 2 * x1 + x0 * x1 ** 2) == (1, 1)
    assert poly_content_monomial(x0 + x1) == (0, 0)
    (y,) = MultiPoly.variables(1)
    assert poly_content_monomial(y ** 3) == (3,)


def _rand_poly(rng, nvars, deg, field=None, terms=4):
    vs = MultiPoly.variables(nvars, field)
    f = MultiPoly.constant(nvars, 0, field)
    for _ in range(terms):
        m = MultiPoly.constant(nvars, rng.randrange(1, 30), field)
        for _ in range(rng.randrange(0, deg + 1)):
            m = m * vs[rng.randrange(nvars)]
        f = f + m
    return f


@settings(max_examples=50)
@given(st.integers(0, 10 ** 6))
def test_content_removal_leaves_trivial_content(seed):
    rng = random.Random(seed)
    f = _rand_poly(rng, 3, 5)
    if f.is_zero():
        return
    g, m = remove_monomial_content(f)
    assert poly_content_monomial(g) == (0, 0, 0)
    vs = MultiPoly.variables(3)
    back = g
    for i, e in enumerate(m):
        back = back * vs[i] ** e
    assert back == f


def test_gcd_examples():
    t = lambda c: UniPoly(F31, c)
    f = t([2, -3, 1])  # (t-1)(t-2)
    g = t([3, -4, 1])  # (t-1)(t-3)
    assert uni_gcd(f, g) == t([-1, 1])
    h = t([6, 4])
    assert uni_gcd(h, t([])) == h.monic()


def test_gcd_coprime_by_resultant():
    rng = random.Random(3)
    P = BIG.modulus
    tt = sp.Symbol("t")
    for _ in range(10):
        a = [rng.randrange(P) for _ in range(2)] + [1]
        b = [rng.randrange(P) for _ in range(2)] + [1]
        res = sp.resultant(sum(c * tt ** i for i, c in enumerate(a)), sum(c * tt ** i for i, c in enumerate(b)), tt)
        g = uni_gcd(UniPoly(BIG, a), UniPoly(BIG, b))
        assert (g.degree() == 0) == (int(res) % P != 0)


@settings(max_examples=40)
@given(st.integers(0, 10 ** 6))
def test_gcd_multiplicative(seed):
    rng = random.Random(seed)
    rp = lambda d: UniPoly(F31, [rng.randrange(31) for _ in range(d)] + [rng.randrange(1, 31)])
    f, g, h = rp(rng.randrange(1, 4)), rp(rng.randrange(1, 4)), rp(rng.randrange(0, 3))
    assert uni_gcd(f * h, g * h) == (h.monic() * uni_gcd(f, g)).monic()


def test_substitute_examples():
    x0, x1 = MultiPoly.variables(2)
    assert substitute(x0 + x1, [x1, x0]) == x0 + x1
    y0, y1, y2 = MultiPoly.variables(3)
    J = [y1 * y2, y0 * y2, y0 * y1]
    assert substitute(y0, J) == y1 * y2
    f = y0 ** 2 + y1 * y2
    assert substitute(f, J).total_degree() == 2 * 2


@settings(max_examples=30)
@given(st.integers(0, 10 ** 6))
def test_substitute_is_ring_homomorphism(seed):
    rng = random.Random(seed)
    f, g = _rand_poly(rng, 3, 3, F31), _rand_poly(rng, 3, 3, F31)
    imgs = [_rand_poly(rng, 2, 2, F31, terms=3) for _ in range(3)]
    assert substitute(f * g, imgs) == substitute(f, imgs) * substitute(g, imgs)
    assert substitute(f + g, imgs) == substitute(f, imgs) + substitute(g, imgs)


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_integer_adjugate_against_sympy(n):
    rng = random.Random(n)
    M = [[rng.randrange(-50, 50) for _ in range(n)] for _ in range(n)]
    if sp.Matrix(M).det() == 0:
        M[0][0] += 1
    d, X = adjugate_integer(M)
    adj = sp.Matrix(M).adjugate()
    assert abs(d) == abs(sp.Matrix(M).det())
    sign = 1 if d == sp.Matrix(M).det() else -1
    assert sp.Matrix([[int(x) for x in row] for row in X]) * sign == adj


def test_integer_adjugate_singular():
    with pytest.raises(SingularMatrixError):
        adjugate_integer([[1, 2], [2, 4]])


def test_modular_adjugate_and_inverse():
    rng = random.Random(5)
    M = [[rng.randrange(101) for _ in range(4)] for _ in range(4)]
    adj = adjugate_mod(M, 101)
    want = sp.Matrix(M).adjugate().applyfunc(lambda x: x % 101)
    assert sp.Matrix(adj) == want
    inv = inverse_mod(M, 101)
    prod = (sp.Matrix(M) * sp.Matrix(inv)).applyfunc(lambda x: x % 101)
    assert prod == sp.eye(4)
