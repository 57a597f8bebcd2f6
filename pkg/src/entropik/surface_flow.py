"""Images S_n of a hyperplane under I, J, I, ... and the multiplicities factored out.

Convention: S_0 is a random hyperplane, S_n is the image of S_{n-1} under
B_n with B_odd = I and B_even = J, so the equation of S_n is
S_{n-1}(B_n(x)) with a monomial factor removed. J factors are powers of
the coordinates x_i; I = C o J o C factors are powers of X_i = (C x)_i.

u[n][i]  exponent of the i-th frame coordinate in S_n(B_{n+1}(x))
v[n][i]  exponent of the i-th frame coordinate in S_n(B_n(x))

Two engines produce the same record:
 * "exact": S_n as a sparse polynomial over F_p (FLINT nmod_mpoly);
 * "germ": orders of vanishing along curve germs through generic points of
   each coordinate hyperplane, computed with truncated power series. It only
   needs earlier degrees and exponents, so it reaches much larger n.
"""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass, field
from math import comb

import flint

from .algebra.fields import PrimeField, find_field_with_root
from .patterns import Kind, Pattern, build_c_matrix
from .records import DegreeRecord, ExponentRecord

log = logging.getLogger(__name__)

DEFAULT_TERM_CAP = 400_000
MAX_PRECISION = 1 << 14


class DegenerateStart(ArithmeticError):
    pass


def map_name(n: int) -> str:
    """Name of B_n."""
    return "I" if n % 2 == 1 else "J"


def _require_cs(pat: Pattern):
    if pat.kind is not Kind.CYCLIC_SYMMETRIC:
        raise ValueError("surface_flow needs a cyclic-symmetric pattern")


class _Context:
    def __init__(self, pat: Pattern, F: PrimeField, rng: random.Random):
        self.pat, self.F, self.rng = pat, F, rng
        self.p = pat.p
        self.P = F.modulus
        self.C = build_c_matrix(pat, F).rows()
        self.h = [rng.randrange(1, self.P) for _ in range(self.p)]


# -- exact engine -----------------------------------------------------------------------

class ExactSurfaces:
    """Keeps S_n (x-frame) and A_n(y) = S_n(C y) as nmod_mpoly."""

    def __init__(self, ctx: _Context, term_cap: int = DEFAULT_TERM_CAP, skip_content: bool = False):
        self.ctx = ctx
        self.cap = term_cap
        self.skip_content = skip_content
        p = ctx.p
        self.R = flint.nmod_mpoly_ctx.get(("x", p), modulus=ctx.P)
        self.gens = self.R.gens()
        self.lin = [sum((c * g for c, g in zip(row, self.gens)), self.R.from_dict({}))
                    for row in ctx.C]
        h = ctx.h
        S0 = self.R.from_dict({tuple(int(i == k) for i in range(p)): h[k] for k in range(p)})
        self.S = [S0]
        self.A = [self._to_y(S0)]
        self.removed: list[list[int]] = [[0] * p]

    def _to_y(self, f):
        return f.compose(*self.lin)

    @staticmethod
    def _content(f, p):
        exps = [e for e in f.to_dict()]
        return [min(e[i] for e in exps) for i in range(p)]

    def fits(self, d: int) -> bool:
        return comb(d + self.ctx.p - 1, self.ctx.p - 1) <= self.cap

    def step(self):
        """Compute S_n from S_{n-1}; returns the removed exponents (u_{n-1})."""
        n = len(self.S)
        p = self.ctx.p
        src = self.S[-1] if map_name(n) == "J" else self.A[-1]
        d = src.total_degree()
        terms = src.to_dict()
        degs = [max(e[i] for e in terms) for i in range(p)]
        u = [d - degs[i] for i in range(p)]
        if self.skip_content:
            new = {tuple(d - e[i] for i in range(p)): c for e, c in terms.items()}
            u_removed = [0] * p
        else:
            new = {tuple(degs[i] - e[i] for i in range(p)): c for e, c in terms.items()}
            u_removed = u
        T = self.R.from_dict(new)
        if map_name(n) == "J":
            S = T
        else:
            S = T.compose(*self.lin)
        self.S.append(S)
        self.A.append(self._to_y(S))
        self.removed.append(u_removed)
        return u

    def frame_degrees(self, n: int, name: str) -> list[int]:
        f = self.S[n] if name == "J" else self.A[n]
        return [int(k) for k in f.degrees()]

    def exponent(self, n: int, name: str) -> list[int]:
        """Multiplicities of the frame coordinates of ``name`` in S_n(B(x))."""
        d = self.degree(n)
        return [d - k for k in self.frame_degrees(n, name)]

    def degree(self, n: int) -> int:
        return int(self.S[n].total_degree())


# -- germ engine ------------------------------------------------------------------------

class _PrecisionExhausted(Exception):
    pass


def _ord(f, T) -> int | None:
    """Valuation of a series known mod t^T; None when it is zero to that precision."""
    c = f.coeffs()
    for k in range(min(len(c), T)):
        if int(c[k]):
            return k
    return None


class GermEngine:
    def __init__(self, ctx: _Context, d: list[int], u: list[list[int]]):
        self.ctx = ctx
        self.d = d  # d_0..d_{n}
        self.u = u  # u_0..u_{n-1}

    def _J(self, z, T):
        p = len(z)
        out = []
        for k in range(p):
            acc = None
            for j in range(p):
                if j != k:
                    acc = z[j] if acc is None else acc.mul_low(z[j], T)
            out.append(acc)
        return out

    def _lin(self, z):
        P = self.ctx.P
        zero = flint.nmod_poly([], P)
        out = []
        for row in self.ctx.C:
            acc = zero
            for c, f in zip(row, z):
                acc += f * c
            out.append(acc)
        return out

    def _apply(self, name, z, T):
        if name == "J":
            return self._J(z, T)
        return self._lin(self._J(self._lin(z), T))

    def _frame(self, name, z):
        return z if name == "J" else self._lin(z)

    def _normalize(self, w, T):
        ords = [_ord(f, T) for f in w]
        known = [o for o in ords if o is not None]
        if not known:
            raise _PrecisionExhausted
        m = min(known)
        # a component that vanished to full precision might still be smaller than
        # nothing else; it is only safe when its true order is >= m, i.e. T > m
        if len(known) < len(w) and T - m < 2:
            raise _PrecisionExhausted
        return m, [f.right_shift(m) for f in w]

    def ord_S(self, n: int, z, T: int) -> int:
        """Order in t of S_n(z(t)), z a vector of series mod t^T with min order 0."""
        total = 0
        for k in range(n, 0, -1):
            name = map_name(k)
            frame = self._frame(name, z)
            for i, f in enumerate(frame):
                e = self.u[k - 1][i]
                if e:
                    o = _ord(f, T)
                    if o is None:
                        raise _PrecisionExhausted
                    total -= e * o
            w = self._apply(name, z, T)
            m, z = self._normalize(w, T)
            total += m * self.d[k - 1]
        hz = flint.nmod_poly([], self.ctx.P)
        for c, f in zip(self.ctx.h, z):
            hz += f * c
        o = _ord(hz, T)
        if o is None:
            raise _PrecisionExhausted
        return total + o

    def germ(self, name: str, i: int, T: int):
        """r + t e_i in the frame of ``name`` (pulled back to x coordinates)."""
        P, p, rng = self.ctx.P, self.ctx.p, self.ctx.rng
        pts = [flint.nmod_poly([0 if j == i else rng.randrange(1, P), int(j == i)], P)
               for j in range(p)]
        return pts if name == "J" else self._lin(pts)

    def exponent(self, n: int, name: str, i: int) -> int:
        """Order of S_n(B(c(t))) along a germ transverse to the i-th frame hyperplane of B."""
        T = 16
        while T <= MAX_PRECISION:
            try:
                c = self.germ(name, i, T)
                w = self._apply(name, c, T)
                m, w = self._normalize(w, T)
                return m * self.d[n] + self.ord_S(n, w, T)
            except _PrecisionExhausted:
                T *= 2
        raise ArithmeticError(f"series precision cap reached at n={n}, class {i}")


# -- driver -----------------------------------------------------------------------------

@dataclass
class FlowResult:
    degrees: DegreeRecord
    exponents: ExponentRecord
    engines: list[str] = field(default_factory=list)  # engine used for S_n
    modulus: int = 0


def propagate(pat: Pattern, n_max: int, seed=0, engine: str = "auto",
              term_cap: int = DEFAULT_TERM_CAP, bits: int = 61, retries: int = 3) -> FlowResult:
    """d_n, u_n (n <= n_max) and v_n (1 <= n <= n_max) for a random hyperplane."""
    _require_cs(pat)
    if engine not in ("auto", "exact", "germ"):
        raise ValueError(f"unknown engine {engine!r}")
    rng = random.Random(seed)
    for attempt in range(retries):
        F = find_field_with_root(pat.q, bits, rng)
        ctx = _Context(pat, F, rng)
        try:
            return _propagate(ctx, n_max, engine, term_cap)
        except DegenerateStart as exc:
            log.info("resampling start hyperplane: %s", exc)
    raise DegenerateStart(f"{retries} start hyperplanes were degenerate")


def _propagate(ctx: _Context, n_max: int, engine: str, term_cap: int) -> FlowResult:
    p = ctx.p
    d = [1]
    u: list[list[int]] = []
    v: list[list[int | None]] = [[None] * p]
    used = ["exact" if engine != "germ" else "germ"]
    exact = ExactSurfaces(ctx, term_cap) if engine != "germ" else None
    germ = GermEngine(ctx, d, u)
    for n in range(0, n_max + 1):
        nxt = map_name(n + 1)
        if exact is not None and len(exact.S) > n:
            u.append(exact.exponent(n, nxt))
            if n >= 1:
                v.append(exact.exponent(n, map_name(n)))
        else:
            u.append([germ.exponent(n, nxt, i) for i in range(p)])
            if n >= 1:
                v.append([germ.exponent(n, map_name(n), i) for i in range(p)])
        if n == 0 and any(u[0]):
            raise DegenerateStart("start hyperplane already meets a coordinate singularity")
        if n == n_max:
            break
        dn = (p - 1) * d[n] - sum(u[n])
        if exact is not None and (engine == "exact" or exact.fits(dn)):
            exact.step()
            if exact.degree(n + 1) != dn:
                raise ArithmeticError(f"exact degree {exact.degree(n + 1)} != {dn} at n={n + 1}")
            used.append("exact")
        else:
            exact = None
            used.append("germ")
        d.append(dn)
        if n == 0 and dn != p - 1:
            raise DegenerateStart(f"d_1 = {dn} != p - 1")
    rec = ExponentRecord(p, u, v)
    deg = DegreeRecord("CS", ctx.pat.q, "half", d, "surface")
    deg.meta["engines"] = used
    return FlowResult(deg, rec, used, ctx.P)


# -- checks -----------------------------------------------------------------------------

def check_relations(d: list[int], rec: ExponentRecord, p: int) -> dict[str, list[str]]:
    """The degree drop, the involution balance and the v formula at every step.

    eqdef:      d_n = (p-1) d_{n-1} - sum_i u_{n-1}^i
    eqinv:      (p-2) d_n = v_{n+1}^i + sum_{j != i} u_n^j
    sysdefinv2: v_n^i = (p-2) d_{n-1} + u_{n-1}^i - sum_j u_{n-1}^j
    """
    w = rec.weights
    out: dict[str, list[str]] = {"eqdef": [], "eqinv": [], "sysdefinv2": []}
    u, v = rec.u, rec.v
    for n in range(1, len(d)):
        if n - 1 < len(u) and d[n] != (p - 1) * d[n - 1] - sum(a * b for a, b in zip(w, u[n - 1])):
            out["eqdef"].append(f"n={n}")
    for n in range(len(d) - 1):
        if n + 1 >= len(v) or n >= len(u):
            continue
        tot = sum(a * b for a, b in zip(w, u[n]))
        for i in range(len(w)):
            if v[n + 1][i] is None:
                continue
            if (p - 2) * d[n] != v[n + 1][i] + tot - u[n][i]:
                out["eqinv"].append(f"n={n}, class {i}")
            if v[n + 1][i] != (p - 2) * d[n] + u[n][i] - tot:
                out["sysdefinv2"].append(f"n={n + 1}, class {i}")
    return out


@dataclass
class MultiplicityReport:
    ok: bool
    p0_relation: list[str]
    ps_relation: list[str]
    class_equality: list[str]

    def __bool__(self):
        return self.ok


def verify_multiplicity_relations(rec: ExponentRecord, q: int | None = None) -> MultiplicityReport:
    """u_n^0 = v_{n-1}^0, u_n^s = v_{n-3}^s, and u_n^s equal across s = 1..p-1."""
    u, v = rec.u, rec.v
    p_rel, s_rel, eq = [], [], []
    for n in range(len(u)):
        if 1 <= n - 1 < len(v) and v[n - 1][0] is not None and u[n][0] != v[n - 1][0]:
            p_rel.append(f"n={n}")
        for s in range(1, len(u[n])):
            if n - 3 >= 1 and v[n - 3][s] is not None and u[n][s] != v[n - 3][s]:
                s_rel.append(f"n={n}, s={s}")
        if len(set(u[n][1:])) > 1:
            eq.append(f"n={n}: {u[n][1:]}")
    return MultiplicityReport(not (p_rel or s_rel or eq), p_rel, s_rel, eq)


@dataclass
class LemmaStep:
    n: int
    map: str
    content_free: bool
    pullback: bool | None  # None: not checked (germ mode)
    mode: str = "exact"
    residual: str = ""

    @property
    def ok(self) -> bool:
        return self.content_free and self.pullback is not False


@dataclass
class LemmaReport:
    steps: list[LemmaStep]

    @property
    def ok(self) -> bool:
        return all(s.ok for s in self.steps)

    @property
    def first_failure(self) -> int | None:
        return next((s.n for s in self.steps if not s.ok), None)

    @property
    def exact_steps(self) -> list[int]:
        return [s.n for s in self.steps if s.mode == "exact"]

    def __bool__(self):
        return self.ok


def verify_lemma(pat: Pattern, n_max: int, seed=0, skip_content: bool = False,
                 term_cap: int = DEFAULT_TERM_CAP, bits: int = 61) -> LemmaReport:
    """Step by step check that

    * S_n has no monomial factor left in the frame of the map that made it;
    * S_n(B_n(x)) * M_n(B_n(x)) = kappa_B(x)^{d_{n-1}} * S_{n-1}(x), where M_n
      is the removed monomial (in the frame of B_n) and kappa the B o B factor.

    For B = I both sides are compared in the frame X = C x, where every
    substitution is an exponent map and the identity holds up to the factor
    q^{d_n}. ``skip_content`` keeps the monomial factors (negative control).

    Steps whose S_n would exceed ``term_cap`` terms switch to germ mode: the
    first property is checked by evaluating S_n at generic points of each frame
    hyperplane (order 0 along a transverse germ), the identity is not checked.
    """
    _require_cs(pat)
    rng = random.Random(seed)
    F = find_field_with_root(pat.q, bits, rng)
    ctx = _Context(pat, F, rng)
    ex = ExactSurfaces(ctx, term_cap, skip_content=skip_content)
    p, q, P = ctx.p, pat.q, ctx.P
    d, u = [1], []
    germ = None
    steps = []
    for n in range(1, n_max + 1):
        name = map_name(n)
        if germ is None:
            u.append(ex.exponent(n - 1, name))
        else:
            u.append([germ.exponent(n - 1, name, i) for i in range(p)])
        dn = (p - 1) * d[-1] - sum(u[-1])
        if germ is None and (skip_content or ex.fits(dn)):
            steps.append(_exact_step(ex, n, q, P))
            d.append(ex.degree(n))
            if not steps[-1].content_free and not skip_content:
                break
            continue
        if germ is None:
            ex = None
            germ = GermEngine(ctx, d, u)
        d.append(dn)
        free = all(_order_on_hyperplane(germ, n, name, i) == 0 for i in range(p))
        steps.append(LemmaStep(n, name, free, None, "germ"))
    return LemmaReport(steps)


def _order_on_hyperplane(germ: GermEngine, n: int, name: str, i: int) -> int:
    T = 16
    while T <= MAX_PRECISION:
        try:
            return germ.ord_S(n, germ.germ(name, i, T), T)
        except _PrecisionExhausted:
            T *= 2
    raise ArithmeticError("series precision cap reached")


def _exact_step(ex: ExactSurfaces, n: int, q: int, P: int) -> LemmaStep:
    p = ex.ctx.p
    d_prev = ex.degree(n - 1)
    ex.step()
    name = map_name(n)
    m = ex.removed[n]
    cur = ex.S[n] if name == "J" else ex.A[n]
    prev = ex.S[n - 1] if name == "J" else ex.A[n - 1]
    content_free = not any(ExactSurfaces._content(cur, p))
    dn = cur.total_degree()
    # left: cur(J(X)) * prod_i J(X)_i^{m_i}; right: X^{(p-2) d_prev} * prev(X)
    shift = [sum(m) - m[i] for i in range(p)]
    lhs = {tuple(dn - e[i] + shift[i] for i in range(p)): c for e, c in cur.to_dict().items()}
    rhs = {tuple(e[i] + (p - 2) * d_prev for i in range(p)): c for e, c in prev.to_dict().items()}
    ok, residual = _equal_up_to_scalar(lhs, rhs, P)
    if ok:
        # A_n(y) = S_n(C y) = q^{d_n} T(y) since C C = q id: that is the only scalar left
        want = pow(q, dn, P) if name == "I" else 1
        scale = _scalar(lhs, rhs, P)
        ok = scale == want
        residual = "" if ok else f"scalar {scale} != {want}"
    return LemmaStep(n, name, content_free, ok, "exact", residual)


def _scalar(lhs: dict, rhs: dict, P: int) -> int:
    k = next(iter(rhs))
    return lhs[k] * pow(rhs[k], -1, P) % P


def _equal_up_to_scalar(lhs: dict, rhs: dict, P: int) -> tuple[bool, str]:
    if lhs.keys() != rhs.keys():
        extra = len(set(lhs) ^ set(rhs))
        return False, f"{extra} monomials differ"
    s = _scalar(lhs, rhs, P)
    bad = sum(1 for k in rhs if lhs[k] % P != rhs[k] * s % P)
    return bad == 0, "" if bad == 0 else f"{bad} coefficients differ"


__all__ = ["propagate", "verify_lemma", "verify_multiplicity_relations", "check_relations",
           "FlowResult", "LemmaReport", "MultiplicityReport", "ExactSurfaces", "GermEngine",
           "map_name"]
