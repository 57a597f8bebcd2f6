"""Prime fields F_p, optionally carrying a primitive q-th root of unity."""

from __future__ import annotations

import random
from dataclasses import dataclass

import gmpy2

MAX_PRIME_CANDIDATES = 1_000_000


class FieldSearchError(RuntimeError):
    pass


def is_prime(n: int) -> bool:
    # gmpy2 runs BPSW, which has no known counterexample and is exact below 2**64.
    return n >= 2 and bool(gmpy2.is_prime(n, 30))


def _prime_factors(n: int) -> list[int]:
    out = []
    f = 2
    while f * f <= n:
        if n % f == 0:
            out.append(f)
            while n % f == 0:
                n //= f
        f += 1
    if n > 1:
        out.append(n)
    return out


@dataclass(frozen=True)
class PrimeField:
    """The field Z/pZ.

    ``root_order``/``root`` are set when the field was built to contain a
    primitive ``root_order``-th root of unity.
    """

    modulus: int
    root_order: int | None = None
    root: int | None = None

    def __post_init__(self):
        if not is_prime(self.modulus):
            raise ValueError(f"{self.modulus} is not prime")
        if self.root is not None:
            q = self.root_order
            if q is None or not is_primitive_root_of_unity(self.root, q, self.modulus):
                raise ValueError(f"{self.root} is not a primitive {q}-th root mod {self.modulus}")

    def __call__(self, a: int) -> int:
        return a % self.modulus

    def add(self, a: int, b: int) -> int:
        return (a + b) % self.modulus

    def sub(self, a: int, b: int) -> int:
        return (a - b) % self.modulus

    def mul(self, a: int, b: int) -> int:
        return a * b % self.modulus

    def neg(self, a: int) -> int:
        return -a % self.modulus

    def inv(self, a: int) -> int:
        a %= self.modulus
        if a == 0:
            raise ZeroDivisionError("zero has no inverse")
        return pow(a, -1, self.modulus)

    def div(self, a: int, b: int) -> int:
        return a * self.inv(b) % self.modulus

    def pow(self, a: int, e: int) -> int:
        return pow(a, e, self.modulus)

    def symmetric(self, a: int) -> int:
        """Representative of ``a`` in (-p/2, p/2]."""
        a %= self.modulus
        return a - self.modulus if a > self.modulus // 2 else a

    def random_element(self, rng: random.Random, nonzero: bool = False) -> int:
        lo = 1 if nonzero else 0
        return rng.randrange(lo, self.modulus)


def is_primitive_root_of_unity(w: int, q: int, p: int) -> bool:
    if pow(w, q, p) != 1:
        return False
    return all(pow(w, q // r, p) != 1 for r in _prime_factors(q))


def find_field_with_root(q: int, min_bits: int, rng: random.Random | None = None) -> PrimeField:
    """Smallest prime p >= 2**min_bits with p = 1 (mod q), with a primitive q-th root.

    With ``rng`` the search starts at a random offset above ``2**min_bits``
    so that independent trials get independent primes.
    """
    if q < 2:
        raise ValueError("q must be >= 2")
    lo = 1 << min_bits
    if rng is not None:
        lo += rng.randrange(1 << max(min_bits - 2, 1))
    k = max((lo - 1 + q - 1) // q, 1)
    for _ in range(MAX_PRIME_CANDIDATES):
        p = k * q + 1
        k += 1
        if not is_prime(p):
            continue
        exponent = (p - 1) // q
        for a in range(2, 2 + 200):
            w = pow(a, exponent, p)
            if is_primitive_root_of_unity(w, q, p):
                return PrimeField(p, q, w)
    raise FieldSearchError(f"no prime = 1 mod {q} found above 2**{min_bits} "
                           f"within {MAX_PRIME_CANDIDATES} candidates")


def random_prime_field(min_bits: int, rng: random.Random) -> PrimeField:
    return find_field_with_root(2, min_bits, rng)
