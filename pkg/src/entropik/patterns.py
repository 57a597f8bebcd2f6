"""Matrix patterns, their reduced coordinates, and the cyclic-symmetric C matrix."""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

from .algebra.fields import PrimeField, find_field_with_root
from .algebra.linalg import (SingularMatrixError, adjugate_mod, identity, inverse_mod,
                             mat_mul_mod, mat_vec_mod)


class Kind(str, Enum):
    GENERAL = "G"
    SYMMETRIC = "S"
    CYCLIC = "C"
    CYCLIC_SYMMETRIC = "CS"
    CUSTOM = "custom"

    @classmethod
    def parse(cls, name: str) -> "Kind":
        key = name.strip().upper()
        aliases = {"G": cls.GENERAL, "GENERAL": cls.GENERAL,
                   "S": cls.SYMMETRIC, "SYMMETRIC": cls.SYMMETRIC,
                   "C": cls.CYCLIC, "CYCLIC": cls.CYCLIC,
                   "CS": cls.CYCLIC_SYMMETRIC, "CYCLICSYMMETRIC": cls.CYCLIC_SYMMETRIC,
                   "CYCLIC_SYMMETRIC": cls.CYCLIC_SYMMETRIC,
                   "CUSTOM": cls.CUSTOM}
        if key not in aliases:
            raise ValueError(f"unsupported pattern kind {name!r}")
        return aliases[key]


@dataclass(frozen=True)
class Pattern:
    """A partition of the q x q cells into ``p`` classes (the reduced coordinates)."""

    q: int
    kind: Kind
    classes: tuple[tuple[int, ...], ...]
    p: int = field(init=False)

    def __post_init__(self):
        if len(self.classes) != self.q or any(len(r) != self.q for r in self.classes):
            raise ValueError("classes must be a q x q array")
        used = sorted({c for row in self.classes for c in row})
        if used != list(range(len(used))):
            raise ValueError("class indices must be exactly 0..p-1")
        object.__setattr__(self, "p", len(used))

    @classmethod
    def from_classes(cls, classes: Sequence[Sequence[int]], kind: Kind = Kind.CUSTOM) -> "Pattern":
        return cls(len(classes), kind, tuple(tuple(r) for r in classes))

    def matrix(self, values: Sequence) -> list[list]:
        """The q x q matrix whose entries are the class values."""
        if len(values) != self.p:
            raise ValueError(f"expected {self.p} class values, got {len(values)}")
        return [[values[c] for c in row] for row in self.classes]

    def representatives(self) -> list[tuple[int, int]]:
        reps: dict[int, tuple[int, int]] = {}
        for i, row in enumerate(self.classes):
            for j, c in enumerate(row):
                reps.setdefault(c, (i, j))
        return [reps[c] for c in range(self.p)]

    def class_sizes(self) -> list[int]:
        sizes = [0] * self.p
        for row in self.classes:
            for c in row:
                sizes[c] += 1
        return sizes

    def reduce(self, matrix: Sequence[Sequence]) -> list:
        """Read one entry per class."""
        return [matrix[i][j] for i, j in self.representatives()]

    def respects(self, matrix: Sequence[Sequence]) -> bool:
        seen: dict[int, object] = {}
        for i, row in enumerate(self.classes):
            for j, c in enumerate(row):
                v = matrix[i][j]
                if seen.setdefault(c, v) != v:
                    return False
        return True

    def to_json(self) -> str:
        return json.dumps({"q": self.q, "kind": self.kind.value,
                           "classes": [c for row in self.classes for c in row]})

    @classmethod
    def from_json(cls, text: str) -> "Pattern":
        obj = json.loads(text)
        q = obj["q"]
        flat = obj["classes"]
        if len(flat) != q * q:
            raise ValueError("classes array must have q*q entries")
        rows = [flat[i * q:(i + 1) * q] for i in range(q)]
        return cls.from_classes(rows, Kind.parse(obj["kind"]))


def cs_dimension(q: int) -> int:
    return q // 2 + 1 if q % 2 == 0 else (q + 1) // 2


def build_pattern(q: int, kind) -> Pattern:
    if q < 3:
        raise ValueError("q must be at least 3")
    kind = Kind.parse(kind) if isinstance(kind, str) else Kind(kind)
    if kind is Kind.GENERAL:
        classes = [[i * q + j for j in range(q)] for i in range(q)]
    elif kind is Kind.CYCLIC:
        classes = [[(j - i) % q for j in range(q)] for i in range(q)]
    elif kind is Kind.CYCLIC_SYMMETRIC:
        classes = [[min((j - i) % q, (i - j) % q) for j in range(q)] for i in range(q)]
    elif kind is Kind.SYMMETRIC:
        index = {}
        for i in range(q):
            for j in range(i, q):
                index[(i, j)] = len(index)
        classes = [[index[(min(i, j), max(i, j))] for j in range(q)] for i in range(q)]
    else:
        raise ValueError(f"build_pattern cannot build kind {kind}; use Pattern.from_classes")
    return Pattern.from_classes(classes, kind)


def check_admissible(pat: Pattern, trials: int = 5, rng: random.Random | None = None,
                     bits: int = 62) -> bool:
    """Monte-Carlo test that the cofactor map preserves the pattern.

    Random pattern matrices over a large prime field; a single violation
    proves non-admissibility, agreement on every trial is evidence only.
    """
    rng = rng or random.Random(0)
    F = find_field_with_root(2, bits, rng)
    p = F.modulus
    done = 0
    attempts = 0
    while done < trials:
        attempts += 1
        if attempts > 10 * trials + 10:
            raise RuntimeError("could not draw invertible pattern matrices")
        vals = [rng.randrange(1, p) for _ in range(pat.p)]
        try:
            adj = adjugate_mod(pat.matrix(vals), p)
        except SingularMatrixError:
            continue
        if not pat.respects(adj):
            return False
        done += 1
    return True


# -- cyclic-symmetric structures -------------------------------------------------

def _require_cs(pat: Pattern):
    if pat.kind is not Kind.CYCLIC_SYMMETRIC:
        raise ValueError("operation requires a cyclic-symmetric pattern")


def _require_root(pat: Pattern, F: PrimeField):
    if F.root is None or F.root_order != pat.q:
        raise ValueError(f"field lacks a primitive {pat.q}-th root of unity")


@dataclass(frozen=True)
class CMatrix:
    """The p x p change of coordinates X = C x diagonalising I on CS matrices.

    C^2 = q * Id, so C^-1 = C / q and C is its own inverse projectively.
    """

    field: PrimeField
    q: int
    entries: tuple[tuple[int, ...], ...]

    @property
    def p(self) -> int:
        return len(self.entries)

    def rows(self) -> list[list[int]]:
        return [list(r) for r in self.entries]

    def apply(self, v: Sequence[int]) -> list[int]:
        return mat_vec_mod(self.rows(), v, self.field.modulus)

    def inverse(self) -> list[list[int]]:
        s = self.field.inv(self.q)
        return [[x * s % self.field.modulus for x in r] for r in self.entries]

    def squared(self) -> list[list[int]]:
        return mat_mul_mod(self.rows(), self.rows(), self.field.modulus)


def build_c_matrix(pat: Pattern, F: PrimeField) -> CMatrix:
    _require_cs(pat)
    _require_root(pat, F)
    q, p, P, w = pat.q, pat.p, F.modulus, F.root
    winv = pow(w, -1, P)
    rows = []
    for r in range(p):
        row = []
        for s in range(p):
            if s == 0:
                row.append(1)
            elif q % 2 == 0 and s == p - 1:
                row.append(1 if r % 2 == 0 else P - 1)
            else:
                row.append((pow(w, r * s, P) + pow(winv, r * s, P)) % P)
        rows.append(tuple(row))
    C = CMatrix(F, q, tuple(rows))
    qid = [[q % P if i == j else 0 for j in range(p)] for i in range(p)]
    if C.squared() != qid:
        raise ArithmeticError(f"C^2 != {q} Id for q={q}")
    return C


def spectral_frame(pat: Pattern, F: PrimeField) -> tuple[list[list[int]], list[list[int]]] | None:
    """(T, T^-1) with I = T^-1 o J o T projectively, for C and CS patterns.

    Eigenvalues of a circulant are linear in the class values, so matrix
    inversion becomes entrywise inversion in the eigenbasis. Returns None
    for patterns without such a frame.
    """
    if pat.kind is Kind.CYCLIC_SYMMETRIC:
        C = build_c_matrix(pat, F)
        return C.rows(), C.inverse()
    if pat.kind is Kind.CYCLIC:
        _require_root(pat, F)
        P, w, q = F.modulus, F.root, pat.q
        T = [[pow(w, r * k, P) for k in range(q)] for r in range(q)]
        return T, inverse_mod(T, P)
    return None


def normalize_point(v: Sequence[int], F: PrimeField) -> tuple[int, ...]:
    """Projective normal form: first nonzero coordinate scaled to 1."""
    P = F.modulus
    lead = next((x for x in v if x % P), None)
    if lead is None:
        raise ValueError("the zero vector is not a projective point")
    s = pow(lead, -1, P)
    return tuple(x * s % P for x in v)


def small_representative(v: Sequence[int], F: PrimeField, bound: int = 1000) -> tuple[int, ...] | None:
    """Integer representative with small entries, if one exists up to ``bound``."""
    base = normalize_point(v, F)
    P = F.modulus
    for scale in range(1, bound + 1):
        sym = tuple(F.symmetric(x * scale % P) for x in base)
        if all(abs(x) <= bound for x in sym):
            return sym
    return None


@dataclass(frozen=True)
class SingularPointSet:
    P: tuple[tuple[int, ...], ...]
    Q: tuple[tuple[int, ...], ...]
    R: dict
    Pi: tuple[int, ...]
    field: PrimeField


def singular_points(pat: Pattern, F: PrimeField) -> SingularPointSet:
    """P_k (coordinate points), Q_k = C^-1 P_k, R_s = I(P_s), and hyperplanes x_k = 0.

    R is keyed by s = 1..p-1 and holds the small-integer representative when
    one exists (entries +-1 for prime q), else the normalized field vector.
    """
    _require_cs(pat)
    C = build_c_matrix(pat, F)
    p, P = pat.p, F.modulus
    Pk = [tuple(int(i == k) for i in range(p)) for k in range(p)]
    Qk = [normalize_point(C.apply(e), F) for e in Pk]
    R = {}
    for s in range(1, p):
        X = C.apply(Pk[s])
        JX = [1] * p
        for k in range(p):
            prod = 1
            for j in range(p):
                if j != k:
                    prod = prod * X[j] % P
            JX[k] = prod
        img = C.apply(JX)
        if not any(img):
            R[s] = None
            continue
        R[s] = small_representative(img, F, bound=1) or normalize_point(img, F)
    return SingularPointSet(tuple(Pk), tuple(Qk), R, tuple(range(p)), F)


def default_cs_field(q: int, bits: int = 62) -> PrimeField:
    return find_field_with_root(q, bits)


__all__ = ["Kind", "Pattern", "build_pattern", "check_admissible", "CMatrix", "build_c_matrix",
           "spectral_frame", "singular_points", "SingularPointSet", "normalize_point",
           "small_representative", "cs_dimension", "identity"]
