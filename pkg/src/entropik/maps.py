"""The involutions J (Hadamard inverse) and I (matrix inverse), as polynomial maps
in reduced coordinates, plus point evaluation and singular-orbit tracing."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from functools import lru_cache
from math import gcd
from typing import Callable, Sequence

import flint

from .algebra.fields import PrimeField, find_field_with_root
from .algebra.linalg import SingularMatrixError, adjugate_mod, mat_vec_mod
from .algebra.multipoly import MultiPoly, substitute
from .patterns import (Kind, Pattern, build_c_matrix, normalize_point, singular_points,
                       small_representative)


class IndeterminateImage(ArithmeticError):
    """Every component of the map vanishes at the point."""

    def __init__(self, point):
        super().__init__(f"indeterminate image at {tuple(point)}")
        self.point = tuple(point)


class NotAdmissible(ValueError):
    pass


@dataclass(frozen=True)
class PolyMap:
    components: tuple[MultiPoly, ...]
    pattern: Pattern | None = None
    name: str = ""

    def __post_init__(self):
        degs = {c.total_degree() for c in self.components if not c.is_zero()}
        if len(degs) > 1:
            raise ValueError(f"components have mixed degrees {sorted(degs)}")
        if not all(c.is_homogeneous() for c in self.components):
            raise ValueError("components must be homogeneous")

    @property
    def degree(self) -> int:
        return max(c.total_degree() for c in self.components)

    @property
    def nvars(self) -> int:
        return self.components[0].nvars

    def __len__(self):
        return len(self.components)

    def reduce(self, F: PrimeField) -> "PolyMap":
        """Same map with coefficients reduced into F."""
        comps = tuple(MultiPoly(c.nvars, c.terms(), F) for c in self.components)
        return PolyMap(comps, self.pattern, self.name)

    def compose(self, inner: "PolyMap") -> "PolyMap":
        """self o inner, without content removal."""
        return PolyMap(tuple(substitute(c, inner.components) for c in self.components),
                       self.pattern, f"{self.name}o{inner.name}")


@dataclass(frozen=True)
class ContentFactor:
    kappa: MultiPoly


def hadamard_map(pat: Pattern | int, F: PrimeField | None = None) -> PolyMap:
    """J: component k is the product of all coordinates but x_k."""
    p = pat.p if isinstance(pat, Pattern) else pat
    comps = []
    for k in range(p):
        comps.append(MultiPoly(p, {tuple(int(j != k) for j in range(p)): 1}, F))
    return PolyMap(tuple(comps), pat if isinstance(pat, Pattern) else None, "J")


def kappa_j(p: int, F: PrimeField | None = None) -> ContentFactor:
    """J o J = kappa_J * identity with kappa_J = prod x_i^(p-2)."""
    return ContentFactor(MultiPoly(p, {(p - 2,) * p: 1}, F))


# -- the matrix inverse -----------------------------------------------------------

def _fmpz_ctx(n: int):
    return flint.fmpz_mpoly_ctx.get(("x", n), "degrevlex")


def _symbolic_cofactors(pat: Pattern):
    """Cofactor matrix of the q x q pattern matrix, entries in Z[x_0..x_{p-1}]."""
    q = pat.q
    ctx = _fmpz_ctx(pat.p)
    xs = ctx.gens()
    M = [[xs[c] for c in row] for row in pat.classes]
    zero = ctx.from_dict({})

    @lru_cache(maxsize=None)
    def minor(rows: tuple[int, ...], cols: tuple[int, ...]):
        if len(rows) == 1:
            return M[rows[0]][cols[0]]
        r, rest = rows[0], rows[1:]
        acc = zero
        for idx, c in enumerate(cols):
            term = M[r][c] * minor(rest, cols[:idx] + cols[idx + 1:])
            acc = acc + term if idx % 2 == 0 else acc - term
        return acc

    everything = tuple(range(q))
    cof = []
    for i in range(q):
        rows = everything[:i] + everything[i + 1:]
        row = []
        for j in range(q):
            cols = everything[:j] + everything[j + 1:]
            m = minor(rows, cols)
            row.append(m if (i + j) % 2 == 0 else -m)
        cof.append(row)
    return cof, ctx


def _to_multipoly(f, n: int, F: PrimeField | None) -> MultiPoly:
    return MultiPoly(n, {tuple(e): int(c) for e, c in f.to_dict().items()}, F)


def inverse_map(pat: Pattern, F: PrimeField | None = None) -> PolyMap:
    """I: each entry replaced by its cofactor, one representative per class,
    divided by the polynomial gcd of all components.

    Built with integer coefficients (FLINT multivariate gcd); ``F`` only
    reduces the final coefficients.
    """
    cof, ctx = _symbolic_cofactors(pat)
    comps = [None] * pat.p
    for i, row in enumerate(pat.classes):
        for j, c in enumerate(row):
            if comps[c] is None:
                comps[c] = cof[i][j]
            elif cof[i][j] != comps[c]:
                raise NotAdmissible(f"cofactors differ within class {c} (cell {i},{j})")
    g = comps[0]
    for f in comps[1:]:
        g = g.gcd(f)
    comps = [f / g for f in comps]
    lead = comps[0].leading_coefficient() if not comps[0].is_zero() else 1
    if lead < 0:
        comps = [-f for f in comps]
    return PolyMap(tuple(_to_multipoly(f, pat.p, F) for f in comps), pat, "I")


def similarity_inverse_map(pat: Pattern, F: PrimeField) -> PolyMap:
    """C o J o C for cyclic-symmetric patterns: I up to a projective factor."""
    C = build_c_matrix(pat, F)
    p = pat.p
    lin = tuple(MultiPoly.linear_form(row, F) for row in C.rows())
    inner = [substitute(jk, lin) for jk in hadamard_map(p, F).components]
    outer = tuple(substitute(lk, inner) for lk in lin)
    return PolyMap(outer, pat, "CJC")


# -- points ------------------------------------------------------------------------

@dataclass(frozen=True)
class ProjPoint:
    coords: tuple
    modulus: int | None = None

    def __post_init__(self):
        vals = [c % self.modulus for c in self.coords] if self.modulus else list(self.coords)
        if not any(vals):
            raise ValueError("the zero vector is not a projective point")

    def normalized(self) -> tuple:
        if self.modulus:
            P = self.modulus
            lead = next(x % P for x in self.coords if x % P)
            s = pow(lead, -1, P)
            return tuple(x * s % P for x in self.coords)
        # integers: divide by gcd, first nonzero coordinate positive
        g = 0
        for x in self.coords:
            g = gcd(g, int(x))
        lead = next(x for x in self.coords if x)
        if lead < 0:
            g = -g
        return tuple(int(x) // g for x in self.coords)

    def __eq__(self, other):
        if not isinstance(other, ProjPoint):
            return NotImplemented
        return self.modulus == other.modulus and self.normalized() == other.normalized()

    def __hash__(self):
        return hash((self.modulus, self.normalized()))


def projectively_equal(a: Sequence[int], b: Sequence[int], modulus: int | None = None) -> bool:
    return ProjPoint(tuple(a), modulus) == ProjPoint(tuple(b), modulus)


def evaluate(m: PolyMap, x: Sequence) -> tuple:
    if len(x) != m.nvars:
        raise ValueError(f"point has {len(x)} coordinates, map expects {m.nvars}")
    img = tuple(c.evaluate(x) for c in m.components)
    if not any(img):
        raise IndeterminateImage(x)
    return img


# Fast pointwise versions used by property checks and the orbit tracer.

def j_point(x: Sequence[int], P: int | None = None) -> list[int]:
    n = len(x)
    prefix = [1] * (n + 1)
    for i, v in enumerate(x):
        prefix[i + 1] = prefix[i] * v if P is None else prefix[i] * v % P
    out = [0] * n
    suffix = 1
    for i in range(n - 1, -1, -1):
        out[i] = prefix[i] * suffix if P is None else prefix[i] * suffix % P
        suffix = suffix * x[i] if P is None else suffix * x[i] % P
    return out


def i_point(pat: Pattern, x: Sequence[int], P: int) -> list[int]:
    """Cofactor map on the pattern matrix with class values ``x`` (mod P)."""
    M = pat.matrix([v % P for v in x])
    try:
        adj = adjugate_mod(M, P)
    except SingularMatrixError:
        return _cofactor_by_minors(M, pat, P)
    # cofactor matrix is the transpose of the adjugate
    return [adj[j][i] for i, j in pat.representatives()]


def _cofactor_by_minors(M, pat: Pattern, P: int) -> list[int]:
    from .algebra.linalg import det_and_inverse_mod
    out = []
    for i, j in pat.representatives():
        sub = [row[:j] + row[j + 1:] for r, row in enumerate(M) if r != i]
        try:
            d = det_and_inverse_mod(sub, P)[0]
        except SingularMatrixError:
            d = 0
        out.append(d * (-1) ** (i + j) % P)
    return out


# -- singular orbits ---------------------------------------------------------------

class UnsupportedVariety(ValueError):
    pass


@dataclass
class OrbitStep:
    map_name: str
    arrow: str  # "blow-down", "regular", "blow-up"
    image: str
    codim: int


@dataclass
class OrbitReport:
    q: int
    start: str
    steps: list[OrbitStep] = field(default_factory=list)

    def diagram(self) -> str:
        out = self.start
        sym = {"blow-down": ">->", "regular": "-->", "blow-up": "~~>"}
        for s in self.steps:
            out += f" {sym[s.arrow]}[{s.map_name}] {s.image}"
        return out


def _series_mul(a, b, T, P):
    out = [0] * T
    for i, x in enumerate(a):
        if x:
            for j in range(T - i):
                out[i + j] = (out[i + j] + x * b[j]) % P
    return out


class _OrbitTracer:
    """Numeric tracer over F_p: varieties are represented by random samples."""

    def __init__(self, pat: Pattern, F: PrimeField, rng: random.Random, samples: int = 6):
        self.pat, self.F, self.rng, self.samples = pat, F, rng, samples
        self.P = F.modulus
        self.C = build_c_matrix(pat, F).rows()
        self.sps = singular_points(pat, F)

    # maps on vectors of truncated power series
    def _apply_series(self, name, xs, T):
        P, p = self.P, self.pat.p
        if name == "I":
            xs = [[sum(self.C[r][s] * xs[s][k] for s in range(p)) % P for k in range(T)]
                  for r in range(p)]
        out = []
        for k in range(p):
            acc = [1] + [0] * (T - 1)
            for j in range(p):
                if j != k:
                    acc = _series_mul(acc, xs[j], T, P)
            out.append(acc)
        if name == "I":
            out = [[sum(self.C[r][s] * out[s][k] for s in range(p)) % P for k in range(T)]
                   for r in range(p)]
        return out

    def _limit(self, name, x, v, T=12):
        """Leading coefficient vector of B(x + t v) as t -> 0."""
        xs = [[xi % self.P, vi % self.P] + [0] * (T - 2) for xi, vi in zip(x, v)]
        img = self._apply_series(name, xs, T)
        for k in range(T):
            lead = [c[k] for c in img]
            if any(lead):
                return lead, k
        raise ArithmeticError("series precision exhausted in limit computation")

    def classify(self, pts) -> tuple[str, int]:
        P, p = self.P, self.pat.p
        normed = {normalize_point(x, self.F) for x in pts}
        if len(normed) == 1:
            return self.name_point(next(iter(normed))), p - 1
        rank = _rank_mod([list(x) for x in pts], P)
        zero = [k for k in range(p) if all(x[k] % P == 0 for x in pts)]
        codim = p - rank
        if zero and len(zero) == codim:
            return "Pi_" + ",".join(str(k) for k in zero), codim
        if codim == 0:
            return "generic", 1 if rank == p else codim
        return f"linear(codim {codim})", codim

    def name_point(self, x) -> str:
        sps = self.sps
        for k, e in enumerate(sps.P):
            if normalize_point(e, self.F) == x:
                return f"P_{k}"
        for s, r in sps.R.items():
            if r is not None and normalize_point(r, self.F) == x:
                return f"R_{s}"
        for k, e in enumerate(sps.Q):
            if e == x:
                return f"Q_{k}"
        small = small_representative(x, self.F, bound=10)
        return str(list(small)) if small else "point"


def _rank_mod(rows, P):
    rows = [r[:] for r in rows]
    rank = 0
    ncols = len(rows[0]) if rows else 0
    for col in range(ncols):
        piv = next((i for i in range(rank, len(rows)) if rows[i][col] % P), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        inv = pow(rows[rank][col], -1, P)
        rows[rank] = [v * inv % P for v in rows[rank]]
        for i in range(len(rows)):
            if i != rank and rows[i][col] % P:
                f = rows[i][col]
                rows[i] = [(a - f * b) % P for a, b in zip(rows[i], rows[rank])]
        rank += 1
    return rank


def orbit_report(pat: Pattern, variety: str, F: PrimeField | None = None, max_steps: int = 6,
                 seed: int = 0) -> OrbitReport:
    """Apply J, I, J, ... to a coordinate hyperplane ``Pi_k`` or a point
    ``P_k``/``Q_k``/``R_s`` and classify each step.

    A variety is carried as a set of random sample points. A sample whose
    image is indeterminate is resolved by the limit along a random line
    through it; the limits sweep out the blown-up variety. The trace stops
    after a blow-up or once the image is a generic (non-linear) variety.
    """
    if pat.kind is not Kind.CYCLIC_SYMMETRIC:
        raise UnsupportedVariety("orbit tracing is implemented for cyclic-symmetric patterns")
    F = F or find_field_with_root(pat.q, 61)
    rng = random.Random(seed)
    tr = _OrbitTracer(pat, F, rng)
    P, p = F.modulus, pat.p
    kind, _, idx = variety.partition("_")
    try:
        k = int(idx)
    except ValueError:
        raise UnsupportedVariety(variety) from None
    if kind == "Pi" and 0 <= k < p:
        pts = [[0 if j == k else rng.randrange(1, P) for j in range(p)] for _ in range(tr.samples)]
        codim = 1
    elif kind in ("P", "Q", "R"):
        table = {"P": dict(enumerate(tr.sps.P)), "Q": dict(enumerate(tr.sps.Q)), "R": tr.sps.R}[kind]
        if k not in table or table[k] is None:
            raise UnsupportedVariety(variety)
        pts = [[c % P for c in table[k]]] * tr.samples
        codim = p - 1
    else:
        raise UnsupportedVariety(variety)
    report = OrbitReport(pat.q, variety)
    names = ["J", "I"] if kind in ("Pi", "P") else ["I", "J"]
    if kind == "R":
        names = ["J", "I"]
    for step in range(max_steps):
        name = names[step % 2]
        imgs = []
        blew_up = False
        for x in pts:
            lead, order = tr._limit(name, x, [rng.randrange(P) for _ in range(p)])
            imgs.append(lead)
            blew_up |= order > 0
        label, new_codim = tr.classify(imgs)
        if blew_up:
            arrow = "blow-up"
        elif new_codim > codim:
            arrow = "blow-down"
        else:
            arrow = "regular"
        report.steps.append(OrbitStep(name, arrow, label, new_codim))
        if arrow == "blow-up" or label == "generic":
            break
        pts, codim = imgs, new_codim
    return report


__all__ = ["PolyMap", "ProjPoint", "ContentFactor", "IndeterminateImage", "NotAdmissible",
           "hadamard_map", "inverse_map", "similarity_inverse_map", "kappa_j", "evaluate",
           "projectively_equal", "j_point", "i_point", "orbit_report", "OrbitReport"]
