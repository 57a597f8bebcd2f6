"""Dense univariate polynomials over a prime field.

Coefficients are stored lowest degree first; the zero polynomial has no
coefficients. This is the reference implementation; bulk degree runs go
through FLINT's nmod_poly (see ``entropik.degree_line``).
"""

from __future__ import annotations

from .fields import PrimeField


def _trim(c: list[int]) -> list[int]:
    while c and c[-1] == 0:
        c.pop()
    return c


class UniPoly:
    __slots__ = ("field", "coeffs")

    def __init__(self, field: PrimeField, coeffs=()):
        p = field.modulus
        self.field = field
        self.coeffs = _trim([c % p for c in coeffs])

    @classmethod
    def monomial(cls, field, degree, coeff=1):
        return cls(field, [0] * degree + [coeff])

    def degree(self) -> int:
        """Degree; -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def leading(self) -> int:
        return self.coeffs[-1] if self.coeffs else 0

    def __eq__(self, other):
        return (isinstance(other, UniPoly) and self.field.modulus == other.field.modulus
                and self.coeffs == other.coeffs)

    def __hash__(self):
        return hash((self.field.modulus, tuple(self.coeffs)))

    def __repr__(self):
        return f"UniPoly({self.coeffs} mod {self.field.modulus})"

    def _new(self, coeffs):
        out = UniPoly.__new__(UniPoly)
        out.field = self.field
        out.coeffs = _trim(coeffs)
        return out

    def __add__(self, other):
        p = self.field.modulus
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = a[:]
        for i, c in enumerate(b):
            out[i] = (out[i] + c) % p
        return self._new(out)

    def __neg__(self):
        p = self.field.modulus
        return self._new([-c % p for c in self.coeffs])

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        p = self.field.modulus
        if isinstance(other, int):
            return self._new([c * other % p for c in self.coeffs])
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return self._new([])
        out = [0] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    out[i + j] += x * y
        return self._new([c % p for c in out])

    __rmul__ = __mul__

    def __pow__(self, e: int):
        result = self._new([1])
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def __divmod__(self, other):
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        p = self.field.modulus
        r = self.coeffs[:]
        db = other.degree()
        inv_lead = pow(other.coeffs[-1], -1, p)
        q = [0] * max(len(r) - db, 0)
        b = other.coeffs
        for k in range(len(r) - 1 - db, -1, -1):
            c = r[k + db] * inv_lead % p
            q[k] = c
            if c:
                for j in range(db + 1):
                    r[k + j] = (r[k + j] - c * b[j]) % p
        return self._new(q), self._new(r[:db] if db > 0 else [])

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def monic(self):
        if self.is_zero():
            return self
        inv = pow(self.coeffs[-1], -1, self.field.modulus)
        return self * inv

    def __call__(self, x: int) -> int:
        p = self.field.modulus
        acc = 0
        for c in reversed(self.coeffs):
            acc = (acc * x + c) % p
        return acc

    def valuation(self) -> int:
        """Order of vanishing at t = 0 (infinite for zero is reported as -1)."""
        for i, c in enumerate(self.coeffs):
            if c:
                return i
        return -1


def uni_gcd(f: UniPoly, g: UniPoly) -> UniPoly:
    """Monic gcd over the prime field (Euclid)."""
    if f.is_zero() and g.is_zero():
        raise ValueError("gcd(0, 0) is undefined")
    a, b = f, g
    while not b.is_zero():
        a, b = b, a % b
    return a.monic()


def uni_gcd_many(polys) -> UniPoly:
    it = iter(polys)
    g = next(it)
    for f in it:
        if g.degree() == 0:
            break
        g = uni_gcd(g, f) if not (g.is_zero() and f.is_zero()) else g
    return g.monic()
