"""Rational generating functions guessed from degree sequences by exact Padé fits."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np
import sympy as sp

from .records import ComplexityEstimate, DegreeRecord

U = sp.Symbol("u")


class TooFewTerms(ValueError):
    pass


@dataclass(frozen=True)
class RationalGF:
    """numerator / denominator with integer coefficients, lowest degree first.

    Normalized: denominator constant term 1, numerator and denominator coprime.
    """

    numerator: tuple[int, ...]
    denominator: tuple[int, ...]

    @classmethod
    def from_polys(cls, num, den) -> "RationalGF":
        """Reduce and normalize sympy expressions or coefficient lists in u."""
        n = sp.Poly(_as_expr(num), U, domain="QQ")
        d = sp.Poly(_as_expr(den), U, domain="QQ")
        if d.is_zero:
            raise ZeroDivisionError("zero denominator")
        g = sp.gcd(n, d)
        n, d = sp.div(n, g)[0], sp.div(d, g)[0]
        c0 = d.eval(0)
        if c0 == 0:
            raise ValueError("denominator vanishes at u = 0; not a power series")
        n, d = n * (1 / c0), d * (1 / c0)
        nc, dc = _coeffs_low_first(n), _coeffs_low_first(d)
        scale = 1
        for c in nc + dc:
            scale = scale * Fraction(c).denominator // math.gcd(scale, Fraction(c).denominator)
        if scale != 1:
            # an integer-coefficient form with d(0) = 1 needs no extra scaling; keep rationals honest
            raise ValueError("generating function has non-integer coefficients after normalization")
        return cls(tuple(int(c) for c in nc), tuple(int(c) for c in dc))

    def expr(self):
        num = sum(c * U ** k for k, c in enumerate(self.numerator))
        den = sum(c * U ** k for k, c in enumerate(self.denominator))
        return num / den

    def series(self, n_terms: int) -> list[int]:
        d = self.denominator
        out: list[int] = []
        for n in range(n_terms):
            c = self.numerator[n] if n < len(self.numerator) else 0
            for k in range(1, min(n, len(d) - 1) + 1):
                c -= d[k] * out[n - k]
            out.append(c)
        return out

    def even_part(self) -> "RationalGF":
        """(g(s) + g(-s)) / 2 rewritten in u = s^2: turns a half-step series into
        the full-step one."""
        s = sp.Symbol("s")
        num = sum(c * s ** k for k, c in enumerate(self.numerator))
        den = sum(c * s ** k for k, c in enumerate(self.denominator))
        neg = lambda e: e.subs(s, -s)
        top = sp.expand((num * neg(den) + neg(num) * den) / 2)
        bottom = sp.expand(den * neg(den))
        return RationalGF.from_polys(top.subs(s, sp.sqrt(U)), bottom.subs(s, sp.sqrt(U)))

    def __str__(self):
        return str(sp.factor(self.expr()))

    def to_dict(self) -> dict:
        return {"numerator": list(self.numerator), "denominator": list(self.denominator)}

    @property
    def type(self) -> tuple[int, int]:
        return len(self.numerator) - 1, len(self.denominator) - 1


def _as_expr(x):
    if isinstance(x, (list, tuple)):
        return sum(sp.Rational(c) * U ** k for k, c in enumerate(x))
    return sp.sympify(x)


def _coeffs_low_first(poly: sp.Poly) -> list:
    if poly.is_zero:
        return [0]
    c = poly.all_coeffs()[::-1]
    return c


@dataclass
class PadeTable:
    """Approximants [N/M] for all splits N + M = K - 1 of K input terms."""

    terms: list[int]
    splits: dict[tuple[int, int], RationalGF | None] = field(default_factory=dict)

    @property
    def order(self) -> int:
        return len(self.terms) - 1

    def ordered(self) -> list[tuple[tuple[int, int], RationalGF | None]]:
        return sorted(self.splits.items())


def _pade_split(c: Sequence[int], N: int, M: int) -> RationalGF | None:
    """[N/M] approximant of the series c (needs len(c) >= N + M + 1).

    The denominator is any nonzero vector in the kernel of the Hankel
    block; the reduced fraction is independent of the choice. Returns None
    when the reduced fraction fails to match c through order N + M
    (a defective split) or has a pole at 0.
    """
    K = N + M + 1
    if M == 0:
        den = [sp.Integer(1)]
    else:
        H = sp.Matrix(M, M + 1, lambda r, k: c[N + 1 + r - k] if N + 1 + r - k >= 0 else 0)
        ker = H.nullspace()
        if not ker:
            return None
        den = list(ker[0])
    num = [sum(den[k] * c[n - k] for k in range(0, min(n, M) + 1)) for n in range(N + 1)]
    try:
        gf = RationalGF.from_polys(list(num), list(den))
    except (ValueError, ZeroDivisionError):
        return None
    if gf.series(K) != list(c[:K]):
        return None
    return gf


def pade_fit(degrees, n_terms: int | None = None) -> PadeTable:
    """Exact Padé table over the first ``n_terms`` entries (default: all)."""
    values = list(degrees.values if isinstance(degrees, DegreeRecord) else degrees)
    if n_terms is not None:
        values = values[:n_terms]
    if len(values) < 4:
        raise TooFewTerms(f"need at least 4 terms, got {len(values)}")
    table = PadeTable(values)
    K = len(values)
    for N in range(K):
        M = K - 1 - N
        table.splits[(N, M)] = _pade_split(values, N, M)
    return table


@dataclass
class Unstable:
    reason: str
    diagnostics: dict = field(default_factory=dict)

    def __bool__(self):
        return False


def _acceptable(gf: RationalGF, n_check: int) -> str | None:
    s = gf.series(n_check)
    if any(x < 0 for x in s):
        return "negative coefficient in expansion"
    return None


def stabilize(table: PadeTable, degrees=None, min_run: int = 3, lookahead: int = 60):
    """The reduced fraction shared by >= ``min_run`` consecutive splits.

    Candidates must have a nonnegative expansion and must predict every
    held-out degree (entries of ``degrees`` beyond the fitted window).
    Returns a RationalGF or an ``Unstable`` (falsy) with diagnostics.
    """
    full = list(degrees.values if isinstance(degrees, DegreeRecord) else (degrees or table.terms))
    held_out = full[len(table.terms):]
    runs: list[tuple[RationalGF, list[tuple[int, int]]]] = []
    current: RationalGF | None = None
    members: list[tuple[int, int]] = []
    for split, gf in table.ordered():
        if gf is not None and gf == current:
            members.append(split)
            continue
        if current is not None:
            runs.append((current, members))
        current, members = gf, [split]
    if current is not None:
        runs.append((current, members))
    rejected = []
    for gf, splits in sorted(runs, key=lambda r: -len(r[1])):
        if gf is None or len(splits) < min_run:
            continue
        problem = _acceptable(gf, len(full) + lookahead)
        if problem is None and held_out and gf.series(len(full)) != full:
            problem = "held-out degrees not predicted"
        if problem:
            rejected.append({"fraction": str(gf), "splits": splits, "reason": problem})
            continue
        return gf
    longest = max((len(s) for g, s in runs if g is not None), default=0)
    return Unstable("no fraction shared by enough consecutive splits" if not rejected
                    else "all stable candidates rejected",
                    {"longest_run": longest, "min_run": min_run, "rejected": rejected,
                     "terms": len(table.terms)})


def splits_used(table: PadeTable, gf: RationalGF) -> list[tuple[int, int]]:
    return [s for s, g in table.ordered() if g == gf]


def fit_generating_function(degrees, min_run: int = 3, n_terms: int | None = None):
    table = pade_fit(degrees, n_terms)
    return stabilize(table, degrees, min_run), table


# -- complexity from the smallest pole -----------------------------------------------------

def _smallest_positive_root(den: Sequence[int], tol: float = 1e-15) -> float | None:
    """Isolate real roots in (0, 1] exactly (Sturm via sympy), then bisect."""
    poly = sp.Poly(sum(c * U ** k for k, c in enumerate(den)), U)
    intervals = poly.intervals(inf=0, sup=1, eps=sp.Rational(1, 10 ** 18))
    roots = [float((a + b) / 2) for (a, b), _ in intervals if b > 0]
    return min(roots) if roots else None


def pole_multiplicity_at_one(den: Sequence[int]) -> int:
    poly = sp.Poly(sum(c * U ** k for k, c in enumerate(den)), U)
    m = 0
    one = sp.Poly(1 - U, U)
    while True:
        qt, r = sp.div(poly, one)
        if not r.is_zero:
            return m
        poly, m = qt, m + 1


def lambda_from_gf(f: RationalGF, order: int = 500, tol: float = 1e-9) -> ComplexityEstimate:
    """lambda = 1 / (smallest modulus of a denominator root).

    Two estimators: (a) the smallest positive real root, isolated exactly
    (for a series with nonnegative coefficients the radius of convergence
    is itself a singularity), with a numeric check that no complex root is
    closer to the origin; (b) sqrt(c_n / c_{n-2}) from the exact expansion
    at n = ``order``. They must agree within ``tol`` unless lambda = 1,
    where the polynomial growth order is reported instead.
    """
    den = f.denominator
    if len(den) < 2:
        raise ValueError("constant denominator: finite sequence, no complexity")
    r = _smallest_positive_root(den)
    # square-free part first: repeated roots are numerically fragile
    sqf = sp.Poly(sum(c * U ** k for k, c in enumerate(den)), U).sqf_part()
    all_roots = np.roots([float(c) for c in sqf.all_coeffs()])
    min_mod = float(min(abs(all_roots)))
    if r is None or r > min_mod * (1 + 1e-9):
        raise ArithmeticError(f"dominant pole not on the positive real axis (|z|min={min_mod})")
    lam_a = 1.0 / r
    c = f.series(order + 1)
    if lam_a - 1.0 < 1e-12:
        growth = pole_multiplicity_at_one(den) - 1
        return ComplexityEstimate(1.0, "genfun", 0.0, list(den), growth,
                                  note="poles on the unit circle; polynomial growth")
    lam_b = math.sqrt(Fraction(c[order], c[order - 2]))
    if abs(lam_a - lam_b) > tol * lam_a:
        raise ArithmeticError(f"estimators disagree: root {lam_a} vs coefficient ratio {lam_b}")
    return ComplexityEstimate(lam_a, "genfun", abs(lam_a - lam_b), list(den))


__all__ = ["RationalGF", "PadeTable", "Unstable", "pade_fit", "stabilize", "lambda_from_gf",
           "fit_generating_function", "splits_used", "pole_multiplicity_at_one", "TooFewTerms"]
