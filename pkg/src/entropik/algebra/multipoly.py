"""Sparse multivariate polynomials over a prime field or over Q.

Exponent vectors are packed into one Python int (``_BITS`` bits per
variable) so that multiplying monomials is a single integer addition.
``field=None`` means exact arithmetic over the integers/rationals.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .fields import PrimeField

_BITS = 24
_MASK = (1 << _BITS) - 1


def pack(exps: Sequence[int]) -> int:
    key = 0
    for i, e in enumerate(exps):
        if e < 0 or e > _MASK:
            raise ValueError(f"exponent {e} out of range")
        key |= e << (_BITS * i)
    return key


def unpack(key: int, nvars: int) -> tuple[int, ...]:
    return tuple((key >> (_BITS * i)) & _MASK for i in range(nvars))


def _packed_degree(key: int, nvars: int) -> int:
    d = 0
    for _ in range(nvars):
        d += key & _MASK
        key >>= _BITS
    return d


class MultiPoly:
    """Immutable sparse polynomial in ``nvars`` variables."""

    __slots__ = ("nvars", "field", "_t")

    def __init__(self, nvars: int, terms=None, field: PrimeField | None = None):
        self.nvars = nvars
        self.field = field
        t = {}
        if terms:
            for exps, c in terms.items():
                if len(exps) != nvars:
                    raise ValueError("exponent vector length does not match nvars")
                c = self._norm(c)
                if c:
                    k = pack(exps)
                    t[k] = self._norm(t.get(k, 0) + c)
                    if not t[k]:
                        del t[k]
        self._t = t

    # -- construction helpers -------------------------------------------------

    def _norm(self, c):
        if self.field is not None:
            return c % self.field.modulus
        if isinstance(c, Fraction) and c.denominator == 1:
            return c.numerator
        return c

    def _new(self, packed: dict) -> "MultiPoly":
        out = MultiPoly.__new__(MultiPoly)
        out.nvars = self.nvars
        out.field = self.field
        out._t = packed
        return out

    @classmethod
    def variables(cls, nvars: int, field: PrimeField | None = None) -> list["MultiPoly"]:
        return [cls(nvars, {tuple(int(i == j) for j in range(nvars)): 1}, field)
                for i in range(nvars)]

    @classmethod
    def constant(cls, nvars: int, c, field: PrimeField | None = None) -> "MultiPoly":
        return cls(nvars, {(0,) * nvars: c}, field)

    @classmethod
    def linear_form(cls, coeffs: Sequence, field: PrimeField | None = None) -> "MultiPoly":
        n = len(coeffs)
        return cls(n, {tuple(int(i == j) for j in range(n)): c for i, c in enumerate(coeffs)}, field)

    # -- inspection -----------------------------------------------------------

    def terms(self) -> dict[tuple[int, ...], int]:
        return {unpack(k, self.nvars): c for k, c in self._t.items()}

    def __len__(self):
        return len(self._t)

    def is_zero(self) -> bool:
        return not self._t

    def total_degree(self) -> int:
        if not self._t:
            return -1
        return max(_packed_degree(k, self.nvars) for k in self._t)

    def is_homogeneous(self) -> bool:
        degs = {_packed_degree(k, self.nvars) for k in self._t}
        return len(degs) <= 1

    def degree_in(self, i: int) -> int:
        if not self._t:
            return -1
        shift = _BITS * i
        return max((k >> shift) & _MASK for k in self._t)

    def min_degree_in(self, i: int) -> int:
        shift = _BITS * i
        return min((k >> shift) & _MASK for k in self._t)

    def __eq__(self, other):
        if not isinstance(other, MultiPoly):
            return NotImplemented
        return self.nvars == other.nvars and self._t == other._t

    def __hash__(self):
        return hash((self.nvars, frozenset(self._t.items())))

    def __repr__(self):
        if not self._t:
            return "0"
        parts = []
        for exps, c in sorted(self.terms().items(), reverse=True):
            mono = "*".join(f"x{i}^{e}" if e > 1 else f"x{i}" for i, e in enumerate(exps) if e)
            parts.append(f"{c}*{mono}" if mono else f"{c}")
        return " + ".join(parts)

    # -- arithmetic -----------------------------------------------------------

    def _check(self, other):
        if self.nvars != other.nvars:
            raise ValueError("variable count mismatch")

    def __add__(self, other):
        if not isinstance(other, MultiPoly):
            return self + MultiPoly.constant(self.nvars, other, self.field)
        self._check(other)
        t = dict(self._t)
        norm = self._norm
        for k, c in other._t.items():
            v = norm(t.get(k, 0) + c)
            if v:
                t[k] = v
            else:
                t.pop(k, None)
        return self._new(t)

    __radd__ = __add__

    def __neg__(self):
        norm = self._norm
        return self._new({k: norm(-c) for k, c in self._t.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, s) -> "MultiPoly":
        norm = self._norm
        s = norm(s)
        if not s:
            return self._new({})
        return self._new({k: norm(c * s) for k, c in self._t.items()})

    def __mul__(self, other):
        if not isinstance(other, MultiPoly):
            return self.scale(other)
        self._check(other)
        a, b = self._t, other._t
        if len(a) < len(b):
            a, b = b, a
        out: dict[int, int] = {}
        get = out.get
        for kb, cb in b.items():
            for ka, ca in a.items():
                k = ka + kb
                out[k] = get(k, 0) + ca * cb
        if self.field is not None:
            p = self.field.modulus
            out = {k: c % p for k, c in out.items() if c % p}
        else:
            out = {k: self._norm(c) for k, c in out.items() if c}
        return self._new(out)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            raise ValueError("negative power")
        result = MultiPoly.constant(self.nvars, 1, self.field)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def evaluate(self, point: Sequence):
        n = self.nvars
        total = 0
        for k, c in self._t.items():
            term = c
            for i in range(n):
                e = (k >> (_BITS * i)) & _MASK
                if e:
                    term = term * point[i] ** e if self.field is None else \
                        term * pow(point[i], e, self.field.modulus)
            total += term
        return self._norm(total)

    def map_exponents(self, fn) -> "MultiPoly":
        """Apply ``fn`` (tuple -> tuple) to every exponent vector; ``fn`` must be injective."""
        n = self.nvars
        return self._new({pack(fn(unpack(k, n))): c for k, c in self._t.items()})

    def divide_monomial(self, exps: Sequence[int]) -> "MultiPoly":
        m = pack(exps)
        if any(e > mn for e, mn in zip(exps, (self.min_degree_in(i) for i in range(self.nvars)))):
            raise ValueError("monomial does not divide polynomial")
        return self._new({k - m: c for k, c in self._t.items()})

    def diff(self, i: int) -> "MultiPoly":
        shift = _BITS * i
        unit = 1 << shift
        norm = self._norm
        out = {}
        for k, c in self._t.items():
            e = (k >> shift) & _MASK
            if e:
                v = norm(c * e)
                if v:
                    out[k - unit] = v
        return self._new(out)

    def make_monic_like(self) -> "MultiPoly":
        """Scale so that the largest term (in packed order) has coefficient 1."""
        if not self._t or self.field is None:
            return self
        k = max(self._t)
        return self.scale(self.field.inv(self._t[k]))


def poly_content_monomial(f: MultiPoly) -> tuple[int, ...]:
    """Per variable, the smallest exponent occurring in ``f``."""
    if f.is_zero():
        raise ValueError("undefined content: zero polynomial")
    return tuple(f.min_degree_in(i) for i in range(f.nvars))


def remove_monomial_content(f: MultiPoly) -> tuple[MultiPoly, tuple[int, ...]]:
    m = poly_content_monomial(f)
    if any(m):
        f = f.divide_monomial(m)
    return f, m


def substitute(f: MultiPoly, images: Sequence[MultiPoly]) -> MultiPoly:
    """Compose ``f`` with ``images`` (x_i -> images[i]).

    Horner scheme over the variables of ``f`` with cached powers of each image.
    """
    if len(images) != f.nvars:
        raise ValueError(f"substitute: {len(images)} images for {f.nvars} variables")
    if not images:
        return f
    m = images[0].nvars
    field = images[0].field
    for g in images:
        if g.nvars != m:
            raise ValueError("images live in different rings")
    powers: list[dict[int, MultiPoly]] = [{0: MultiPoly.constant(m, 1, field)} for _ in images]

    def power(i, e):
        cache = powers[i]
        if e not in cache:
            cache[e] = power(i, e // 2) * power(i, e - e // 2) if e > 1 else images[i]
        return cache[e]

    n = f.nvars

    def rec(packed_terms: dict[int, int], var: int) -> MultiPoly:
        if var == n:
            c = sum(packed_terms.values())
            return MultiPoly.constant(m, c, field)
        shift = _BITS * var
        groups: dict[int, dict[int, int]] = {}
        for k, c in packed_terms.items():
            e = (k >> shift) & _MASK
            groups.setdefault(e, {})[k & ~(_MASK << shift)] = c
        exps = sorted(groups, reverse=True)
        # Horner in this variable over the present exponents
        acc = rec(groups[exps[0]], var + 1)
        for prev, e in zip(exps, exps[1:]):
            acc = acc * power(var, prev - e) + rec(groups[e], var + 1)
        if exps[-1]:
            acc = acc * power(var, exps[-1])
        return acc

    return rec(f._t, 0)
