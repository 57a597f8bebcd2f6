"""Dense matrix helpers over F_p and over the integers."""

from __future__ import annotations

from typing import Sequence

import gmpy2

Matrix = list[list[int]]


class SingularMatrixError(ArithmeticError):
    pass


def identity(n: int) -> Matrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def mat_mul_mod(a: Matrix, b: Matrix, p: int) -> Matrix:
    bt = list(zip(*b))
    return [[sum(x * y for x, y in zip(row, col)) % p for col in bt] for row in a]


def mat_vec_mod(a: Matrix, v: Sequence[int], p: int) -> list[int]:
    return [sum(x * y for x, y in zip(row, v)) % p for row in a]


def det_and_inverse_mod(m: Matrix, p: int) -> tuple[int, Matrix]:
    """Gauss-Jordan over F_p. Raises SingularMatrixError when det = 0."""
    n = len(m)
    a = [[x % p for x in row] + [int(i == j) for j in range(n)] for i, row in enumerate(m)]
    det = 1
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col]), None)
        if piv is None:
            raise SingularMatrixError("matrix is singular mod p")
        if piv != col:
            a[col], a[piv] = a[piv], a[col]
            det = -det
        pv = a[col][col]
        det = det * pv % p
        inv = pow(pv, -1, p)
        row = [x * inv % p for x in a[col]]
        a[col] = row
        for r in range(n):
            if r != col and a[r][col]:
                f = a[r][col]
                a[r] = [(x - f * y) % p for x, y in zip(a[r], row)]
    return det % p, [row[n:] for row in a]


def inverse_mod(m: Matrix, p: int) -> Matrix:
    return det_and_inverse_mod(m, p)[1]


def adjugate_mod(m: Matrix, p: int) -> Matrix:
    """adj(M) = det(M) * M^-1 for invertible M over F_p."""
    det, inv = det_and_inverse_mod(m, p)
    return [[x * det % p for x in row] for row in inv]


def adjugate_integer(m: Sequence[Sequence[int]]) -> tuple[int, list[list]]:
    """Fraction-free Gauss-Jordan (Bareiss) on [M | I].

    Returns ``(d, X)`` with ``M X = d I`` and ``d = +-det(M)``, so ``X`` is
    the adjugate up to sign. Entries are gmpy2 mpz. Raises
    SingularMatrixError when det(M) = 0.
    """
    n = len(m)
    mpz = gmpy2.mpz
    a = [[mpz(x) for x in row] + [mpz(int(i == j)) for j in range(n)] for i, row in enumerate(m)]
    prev = mpz(1)
    width = 2 * n
    for k in range(n):
        piv = next((r for r in range(k, n) if a[r][k]), None)
        if piv is None:
            raise SingularMatrixError("integer matrix is singular")
        if piv != k:
            a[k], a[piv] = a[piv], a[k]
        pk = a[k]
        akk = pk[k]
        for i in range(n):
            if i == k:
                continue
            ai = a[i]
            aik = ai[k]
            # every entry of the updated row is an exact multiple of prev
            a[i] = [gmpy2.divexact(akk * ai[j] - aik * pk[j], prev) if j != k else mpz(0)
                    for j in range(width)]
        prev = akk
    d = a[n - 1][n - 1]
    return int(d), [row[n:] for row in a]
