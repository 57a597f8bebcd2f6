"""Closed recurrences for the cyclic-symmetric degrees and the complexity quadratics."""

from __future__ import annotations

import math

import numpy as np
import sympy as sp

from .algebra.fields import is_prime
from .records import ComplexityEstimate, DegreeRecord, ExponentRecord


class IncompleteSystem(ValueError):
    """No closed recurrence is available for this q."""


def cs_prime_seeds(p: int) -> list[tuple[int, int, int]]:
    """Rows n = 0..4 of (d_n, u0_n, u1_n) as polynomials in p."""
    return [
        (1, 0, 0),
        (p - 1, 0, 0),
        ((p - 1) ** 2, p - 2, 0),
        (p ** 3 - 3 * p ** 2 + 2 * p + 1, (p - 1) * (p - 2), 0),
        ((p - 1) * (p ** 3 - 3 * p ** 2 + p + 3), (p - 1) ** 2 * (p - 2), p - 2),
    ]


def cs_prime_step(p: int, d: list[int], u0: list[int], u1: list[int]) -> tuple[int, int, int]:
    """Next (d_n, u0_n, u1_n) from the histories (needs n >= 4)."""
    n = len(d)
    dn = (p - 1) * d[n - 1] - u0[n - 1] - (p - 1) * u1[n - 1]
    u0n = (p - 2) * d[n - 2] - (p - 1) * u1[n - 2]
    u1n = (p - 2) * d[n - 4] - u0[n - 4] - (p - 2) * u1[n - 4]
    return dn, u0n, u1n


def seeds_consistent(p: int) -> bool:
    """Rows 0..3 pushed through the recurrence give row 4."""
    rows = cs_prime_seeds(p)
    d, u0, u1 = (list(c) for c in zip(*rows[:4]))
    return cs_prime_step(p, d, u0, u1) == rows[4]


def _v_from_u(p: int, weights: list[int], d: list[int], u: list[list[int]]) -> list[list[int | None]]:
    """v_n^i = (p-2) d_{n-1} - sum over the other coordinates of u_{n-1}."""
    v: list[list[int | None]] = [[None] * len(weights)]
    for n in range(1, len(d)):
        total = sum(w * x for w, x in zip(weights, u[n - 1]))
        v.append([(p - 2) * d[n - 1] - (total - u[n - 1][i]) for i in range(len(weights))])
    return v


def cs_prime_sequence(q: int, n_max: int) -> tuple[DegreeRecord, ExponentRecord]:
    """Half-step d_n, u_n (classes x_0 and the merged x_1..x_{p-1}) for n <= n_max."""
    if q < 5 or not is_prime(q):
        raise IncompleteSystem(f"q = {q}: the three-line recurrence needs an odd prime q >= 5")
    p = (q + 1) // 2
    seeds = cs_prime_seeds(p)
    d, u0, u1 = (list(c) for c in zip(*seeds[:4]))
    while len(d) <= n_max:
        dn, a, b = cs_prime_step(p, d, u0, u1)
        d.append(dn)
        u0.append(a)
        u1.append(b)
    d, u0, u1 = d[:n_max + 1], u0[:n_max + 1], u1[:n_max + 1]
    u = [[a, b] for a, b in zip(u0, u1)]
    weights = [1, p - 1]
    rec = ExponentRecord(p, u, _v_from_u(p, weights, d, u), ["x0", "xs"], weights)
    return DegreeRecord("CS", q, "half", d, "recurrence"), rec


# -- q = 9 ---------------------------------------------------------------------------

Q9_SEEDS = [  # (d, u0, u1, u2), rows n = 0..4
    (1, 0, 0, 0),
    (4, 0, 0, 0),
    (16, 3, 0, 2),
    (59, 12, 0, 8),
    (216, 46, 3, 32),
]
Q9_WEIGHTS = [1, 3, 1]  # x0 | x1, x2, x4 | x3


def q9_step(d, u0, u1, u2) -> tuple[int, int, int, int]:
    """Next row; the u2 line is the conjectural closure u2_{n+1} = 2 d_{n-1} - 3 u1_{n-1}."""
    n = len(d) - 1
    return (4 * d[n] - u0[n] - 3 * u1[n] - u2[n],
            3 * d[n - 1] - 3 * u1[n - 1] - u2[n - 1],
            3 * d[n - 3] - u0[n - 3] - 2 * u1[n - 3] - u2[n - 3],
            2 * d[n - 1] - 3 * u1[n - 1])


def q9_sequence(n_max: int) -> tuple[DegreeRecord, ExponentRecord]:
    cols = [list(c) for c in zip(*Q9_SEEDS[:4])]
    while len(cols[0]) <= n_max:
        for c, x in zip(cols, q9_step(*cols)):
            c.append(x)
    d, u0, u1, u2 = (c[:n_max + 1] for c in cols)
    u = [list(r) for r in zip(u0, u1, u2)]
    rec = ExponentRecord(5, u, _v_from_u(5, Q9_WEIGHTS, d, u), ["x0", "x1,x2,x4", "x3"], Q9_WEIGHTS)
    deg = DegreeRecord("CS", 9, "half", d, "recurrence")
    deg.meta["closure"] = "conjectural"
    return deg, rec


def q9_balance_violations(d, rec: ExponentRecord) -> list[str]:
    """Check the d-line and the three v-lines of the q=9 balance system."""
    out = []
    u, v = rec.u, rec.v
    for n in range(len(d) - 1):
        u0, u1, u2 = u[n]
        if d[n + 1] != 4 * d[n] - u0 - 3 * u1 - u2:
            out.append(f"d line fails at n={n}")
        want = (3 * d[n] - 3 * u1 - u2, 3 * d[n] - u0 - 2 * u1 - u2, 3 * d[n] - u0 - 3 * u1)
        if tuple(v[n + 1]) != want:
            out.append(f"v lines fail at n={n}")
    return out


# -- complexities ---------------------------------------------------------------------

def _reciprocal_quadratic_lambda(a: int) -> float:
    """Larger root of x^2 - a x + 1 (the inverse of the smaller-modulus root)."""
    disc = a * a - 4
    if disc <= 0:
        # roots on the unit circle
        return 1.0
    return (a + math.sqrt(disc)) / 2


def cs_prime_complexity(q: int) -> ComplexityEstimate:
    if not is_prime(q) or q < 3:
        raise IncompleteSystem(f"q = {q} is not an odd prime")
    p = (q + 1) // 2
    a = (p - 1) ** 2 - 2
    lam = _reciprocal_quadratic_lambda(a)
    growth = 2 if lam == 1.0 else None
    return ComplexityEstimate(lam, "recurrence", 0.0, [1, -a, 1], growth)


def cyclic_complexity(q: int) -> ComplexityEstimate:
    if q < 4:
        raise ValueError("q must be >= 4")
    a = (q - 2) ** 2 - 2
    return ComplexityEstimate(_reciprocal_quadratic_lambda(a), "recurrence", 0.0, [1, -a, 1])


def conjecture_lambda(q: int) -> ComplexityEstimate:
    if q < 4:
        raise ValueError("q must be >= 4")
    b = q * q - 4 * q + 2
    assert b == (q - 2) ** 2 - 2
    return ComplexityEstimate(_reciprocal_quadratic_lambda(b), "conjecture", 0.0, [1, -b, 1])


def companion_matrix(p: int) -> sp.Matrix:
    """12 x 12 transition matrix on (d, u0, u1) with lags 1..4 for the prime-q system.

    State at n: [d_n..d_{n-3}, u0_n..u0_{n-3}, u1_n..u1_{n-3}].
    """
    M = sp.zeros(12, 12)
    D, U0, U1 = 0, 4, 8
    # d_{n+1} = (p-1) d_n - u0_n - (p-1) u1_n
    M[D, D], M[D, U0], M[D, U1] = p - 1, -1, -(p - 1)
    # u0_{n+1} = (p-2) d_{n-1} - (p-1) u1_{n-1}
    M[U0, D + 1], M[U0, U1 + 1] = p - 2, -(p - 1)
    # u1_{n+1} = (p-2) d_{n-3} - u0_{n-3} - (p-2) u1_{n-3}
    M[U1, D + 3], M[U1, U0 + 3], M[U1, U1 + 3] = p - 2, -1, -(p - 2)
    for base in (D, U0, U1):
        for k in range(1, 4):
            M[base + k, base + k - 1] = 1
    return M


def companion_check(q: int) -> dict:
    """Spectral radius of the 12 x 12 matrix, squared (half-step to full-step),
    against the quadratic's lambda; plus the factor the characteristic
    polynomial shares with x^4 + (2 - (p-1)^2) x^2 + 1."""
    p = (q + 1) // 2
    M = companion_matrix(p)
    z = sp.Symbol("z")
    chi = M.charpoly(z).as_expr()
    quartic = z ** 4 + (2 - (p - 1) ** 2) * z ** 2 + 1
    common = sp.gcd(sp.Poly(chi, z), sp.Poly(quartic, z))
    eig = np.linalg.eigvals(np.array(M.tolist(), dtype=float))
    rho = float(max(abs(eig)))
    lam = cs_prime_complexity(q).lam
    # the dominant eigenvalue sqrt(lambda) must be a root of the shared factor
    shares = common.degree() > 0 and abs(float(common.eval(math.sqrt(lam)))) < 1e-6 * lam ** 2
    return {"shares_factor": bool(shares), "common_factor": str(common.as_expr()),
            "rho_squared": rho ** 2, "lambda": lam}


def polynomial_growth(values, tail: float = 0.5) -> tuple[int, list[float]]:
    """Growth order of a polynomially growing sequence and its quadratic fit.

    Order = rounded log-log slope over the trailing part; the quadratic
    least-squares coefficients (highest first) are returned alongside.
    """
    vals = [float(x) for x in values]
    n = np.arange(len(vals), dtype=float)
    start = max(1, int(len(vals) * (1 - tail)))
    if len(vals) - start < 3:
        raise ValueError("sequence too short for a growth fit")
    slope = np.polyfit(np.log(n[start:]), np.log(vals[start:]), 1)[0]
    quad = np.polyfit(n, vals, 2)
    return int(round(slope)), [float(c) for c in quad]


def half_step_ratio(d: list[int]) -> float:
    """d_n / d_{n-1} at the end of a half-step sequence (tends to sqrt(lambda))."""
    return d[-1] / d[-2]


__all__ = ["cs_prime_sequence", "cs_prime_complexity", "cyclic_complexity", "conjecture_lambda",
           "q9_sequence", "cs_prime_seeds", "seeds_consistent", "companion_check",
           "polynomial_growth", "IncompleteSystem", "Q9_SEEDS", "q9_balance_violations"]
