"""Degree sequences of K^n from the image of a random line.

The line l(t) = a + t b is pushed through J, I, J, I, ... as a tuple of
univariate polynomials over F_p; after every elementary map the gcd of the
components is divided out and the remaining degree is recorded.
"""

from __future__ import annotations

import logging
import random
import time
from typing import Sequence

import flint

from .algebra.fields import PrimeField, find_field_with_root
from .algebra.unipoly import UniPoly, uni_gcd
from .maps import inverse_map
from .patterns import Kind, Pattern, spectral_frame
from .records import DegreeRecord

log = logging.getLogger(__name__)

DEFAULT_BITS = 62  # nmod_poly works with word-size moduli


class DegenerateLine(ArithmeticError):
    pass


# -- polynomial backends ------------------------------------------------------------

class _FlintBackend:
    name = "flint"

    def __init__(self, F: PrimeField):
        self.P = F.modulus
        self.zero = flint.nmod_poly([], self.P)
        self.one = flint.nmod_poly([1], self.P)

    def line(self, a, b):
        return [flint.nmod_poly([x, y], self.P) for x, y in zip(a, b)]

    def degree(self, f):
        return f.degree()

    def gcd(self, f, g):
        return f.gcd(g)

    def divexact(self, f, g):
        q, r = divmod(f, g)
        if not r.is_zero():
            raise ArithmeticError("inexact polynomial division")
        return q

    def lincomb(self, row, polys):
        acc = self.zero
        for c, f in zip(row, polys):
            if c:
                acc += f * c
        return acc

    def is_zero(self, f):
        return f.is_zero()


class _PythonBackend:
    name = "python"

    def __init__(self, F: PrimeField):
        self.F = F
        self.zero = UniPoly(F, [])
        self.one = UniPoly(F, [1])

    def line(self, a, b):
        return [UniPoly(self.F, [x, y]) for x, y in zip(a, b)]

    def degree(self, f):
        return f.degree()

    def gcd(self, f, g):
        if f.is_zero() and g.is_zero():
            return self.zero
        return uni_gcd(f, g)

    def divexact(self, f, g):
        q, r = divmod(f, g)
        if not r.is_zero():
            raise ArithmeticError("inexact polynomial division")
        return q

    def lincomb(self, row, polys):
        acc = self.zero
        for c, f in zip(row, polys):
            if c:
                acc = acc + f * c
        return acc

    def is_zero(self, f):
        return f.is_zero()


BACKENDS = {"flint": _FlintBackend, "python": _PythonBackend}


def _gcd_all(be, polys):
    g = be.zero
    for f in polys:
        g = be.gcd(g, f) if not be.is_zero(g) else f
        if be.degree(g) == 0:
            return be.one
    return g


def _reduce(be, polys):
    g = _gcd_all(be, polys)
    if be.is_zero(g):
        raise DegenerateLine("image vanishes identically")
    if be.degree(g) == 0:
        return polys
    return [be.divexact(f, g) for f in polys]


def _hadamard_reduced(be, polys):
    """J on content-free components: lcm / P_k, which is already content-free."""
    if any(be.is_zero(f) for f in polys):
        # two or more zero coordinates kill every product; one zero leaves a single component
        zeros = [k for k, f in enumerate(polys) if be.is_zero(f)]
        if len(zeros) > 1:
            raise DegenerateLine("image vanishes identically")
        k0 = zeros[0]
        out = [be.zero] * len(polys)
        out[k0] = be.one
        return out
    L = polys[0]
    for f in polys[1:]:
        g = be.gcd(L, f)
        L = L * be.divexact(f, g)
    return [be.divexact(L, f) for f in polys]


def _apply_polymap(be, comps, polys):
    """Evaluate MultiPoly components on a tuple of univariate polynomials."""
    cache: dict = {}

    def power(i, e):
        key = (i, e)
        if key not in cache:
            cache[key] = polys[i] if e == 1 else power(i, e // 2) * power(i, e - e // 2)
        return cache[key]

    out = []
    for comp in comps:
        acc = be.zero
        for exps, c in comp.terms().items():
            term = None
            for i, e in enumerate(exps):
                if e:
                    term = power(i, e) if term is None else term * power(i, e)
            term = be.one if term is None else term
            acc = acc + term * (c % be_mod(be))
        out.append(acc)
    return out


def be_mod(be):
    return be.P if hasattr(be, "P") else be.F.modulus


class LineStepper:
    """Applies J and I to polynomial tuples for one pattern over one field."""

    def __init__(self, pat: Pattern, F: PrimeField, backend: str = "flint"):
        self.pat, self.F = pat, F
        self.be = BACKENDS[backend](F)
        frame = spectral_frame(pat, F) if F.root_order == pat.q else None
        self.frame = frame
        self.imap = None
        if frame is None:
            self.imap = inverse_map(pat, F).components

    def J(self, polys):
        return _hadamard_reduced(self.be, polys)

    def I(self, polys):
        be = self.be
        if self.frame is not None:
            T, Tinv = self.frame
            # T is invertible, so both linear changes keep the components coprime
            Y = _hadamard_reduced(be, [be.lincomb(row, polys) for row in T])
            return [be.lincomb(row, Y) for row in Tinv]
        return _reduce(be, _apply_polymap(be, self.imap, polys))

    def degree(self, polys):
        return max(self.be.degree(f) for f in polys)


def field_for(pat: Pattern, bits: int, rng: random.Random) -> PrimeField:
    if pat.kind in (Kind.CYCLIC_SYMMETRIC, Kind.CYCLIC):
        return find_field_with_root(pat.q, bits, rng)
    return find_field_with_root(2, bits, rng)


def random_line(p: int, F: PrimeField, rng: random.Random):
    P = F.modulus
    while True:
        a = [rng.randrange(1, P) for _ in range(p)]
        b = [rng.randrange(1, P) for _ in range(p)]
        # reject proportional pairs
        r = b[0] * pow(a[0], -1, P) % P
        if any((b[i] - r * a[i]) % P for i in range(p)):
            return a, b


def line_trial(pat: Pattern, half_steps: int, F: PrimeField, rng: random.Random,
               backend: str = "flint", time_limit: float | None = None) -> list[int]:
    """Half-step degrees d_0..d_{half_steps} for one field and one random line."""
    st = LineStepper(pat, F, backend)
    a, b = random_line(pat.p, F, rng)
    polys = st.be.line(a, b)
    degs = [1]
    start = time.monotonic()
    for n in range(1, half_steps + 1):
        polys = st.J(polys) if n % 2 == 1 else st.I(polys)
        degs.append(st.degree(polys))
        log.debug("q=%d half-step %d degree %d (%.1fs)", pat.q, n, degs[-1], time.monotonic() - start)
        if time_limit is not None and time.monotonic() - start > time_limit:
            raise TimeoutError(f"line trial exceeded {time_limit}s at half-step {n}")
    return degs


def line_degrees(pat: Pattern, n_max: int, trials: int = 3, seed=0, granularity: str = "full",
                 backend: str = "flint", bits: int = DEFAULT_BITS,
                 time_limit: float | None = None) -> DegreeRecord:
    """Per-n maximum over ``trials`` independent (prime, line) pairs.

    ``n_max`` counts steps at the requested granularity; the computation is
    always done at half-step resolution.
    """
    if n_max < 1 or trials < 1:
        raise ValueError("n_max and trials must be >= 1")
    half = 2 * n_max if granularity == "full" else n_max
    rng = random.Random(seed)
    records = []
    failures = []
    for k in range(trials):
        F = field_for(pat, bits, rng)
        try:
            degs = line_trial(pat, half, F, rng, backend, time_limit)
        except DegenerateLine as exc:
            failures.append(str(exc))
            continue
        records.append(DegreeRecord(pat.kind.value, pat.q, "half", degs, "line",
                                    meta={"modulus": F.modulus}))
    if not records:
        raise DegenerateLine(f"all {trials} trials degenerate: {failures}")
    rec = degree_consensus(records)
    rec.meta.update({"seed": seed, "trials": trials, "backend": backend})
    return rec.full_step() if granularity == "full" else rec


def degree_consensus(records: Sequence[DegreeRecord]) -> DegreeRecord:
    """Pointwise maximum; flags indices where records disagree."""
    if not records:
        raise ValueError("degree_consensus needs at least one record")
    first = records[0]
    for r in records[1:]:
        if (r.granularity, r.q, r.pattern) != (first.granularity, first.q, first.pattern):
            raise ValueError("records differ in granularity, pattern or q")
    n = min(len(r.values) for r in records)
    values, flags = [], set()
    for i in range(n):
        col = [r.values[i] for r in records]
        values.append(max(col))
        if len(set(col)) > 1:
            flags.add(i)
    for r in records:
        flags.update(r.flags)
    return DegreeRecord(first.pattern, first.q, first.granularity, values, first.method,
                        sorted(flags), {"moduli": [r.meta.get("modulus") for r in records]})


__all__ = ["DegreeRecord", "line_degrees", "degree_consensus", "line_trial", "LineStepper",
           "DegenerateLine", "random_line"]
