"""Result containers shared by the degree, surface, recurrence and probe modules."""

from __future__ import annotations

import math
from dataclasses import dataclass, field


@dataclass
class DegreeRecord:
    pattern: str
    q: int
    granularity: str  # "half" or "full"
    values: list[int]
    method: str = "line"
    flags: list[int] = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.granularity not in ("half", "full"):
            raise ValueError("granularity must be 'half' or 'full'")

    def full_step(self) -> "DegreeRecord":
        if self.granularity == "full":
            return self
        return DegreeRecord(self.pattern, self.q, "full", self.values[::2], self.method,
                            sorted({f // 2 for f in self.flags if f % 2 == 0}), dict(self.meta))

    def check_bounds(self) -> list[str]:
        """Violations of d_0 = 1, positivity and d_n <= d_1^n (at full step)."""
        v = self.values
        problems = []
        if v and v[0] != 1:
            problems.append(f"d_0 = {v[0]} != 1")
        if any(x <= 0 for x in v):
            problems.append("nonpositive degree")
        if self.granularity == "full" and len(v) > 1:
            for n, x in enumerate(v):
                if x > v[1] ** n:
                    problems.append(f"d_{n} = {x} exceeds d_1^{n}")
        return problems

    def to_dict(self) -> dict:
        return {"pattern": self.pattern, "q": self.q, "granularity": self.granularity,
                "degrees": list(self.values), "flags": list(self.flags), "method": self.method}


@dataclass
class ExponentRecord:
    """Multiplicities per half-step n and coordinate class i.

    ``u[n][i]``: exponent of the i-th frame coordinate factored out of
    S_n(B_{n+1}(x)); ``v[n][i]``: the same for S_n(B_n(x)). Unknown entries
    are None. ``weights[i]`` counts how many coordinates share class i when
    classes are merged (all ones otherwise).
    """

    p: int
    u: list[list[int | None]]
    v: list[list[int | None]]
    labels: list[str] = field(default_factory=list)
    weights: list[int] = field(default_factory=list)

    def __post_init__(self):
        if not self.labels:
            self.labels = [f"x{i}" for i in range(len(self.u[0]) if self.u else self.p)]
        if not self.weights:
            self.weights = [1] * len(self.labels)

    def column(self, i: int, which: str = "u") -> list:
        rows = self.u if which == "u" else self.v
        return [r[i] for r in rows]

    def alpha(self) -> list[list[int | None]]:
        """Renamed view: alpha_n = u_n."""
        return self.u

    def beta(self) -> list[list[int | None]]:
        """Renamed view: beta_n = v_n."""
        return self.v

    def to_dict(self) -> dict:
        return {"labels": self.labels,
                "u": {lab: self.column(i, "u") for i, lab in enumerate(self.labels)},
                "v": {lab: self.column(i, "v") for i, lab in enumerate(self.labels)}}


@dataclass
class ComplexityEstimate:
    lam: float
    method: str
    uncertainty: float = 0.0
    exact_poly: list[int] | None = None  # integer coefficients, lowest degree first
    growth_order: int | None = None
    note: str = ""

    def __post_init__(self):
        if not self.lam >= 1 - 1e-12 and self.method != "arithmetic":
            raise ValueError(f"lambda = {self.lam} < 1")
        if self.uncertainty < 0:
            raise ValueError("uncertainty must be nonnegative")

    @property
    def entropy(self) -> float:
        return math.log(self.lam)

    def poly_residual(self) -> float | None:
        """|P(1/lambda)| after scaling P to unit max coefficient."""
        if not self.exact_poly:
            return None
        x = 1.0 / self.lam
        scale = max(abs(c) for c in self.exact_poly)
        return abs(sum(c * x ** k for k, c in enumerate(self.exact_poly))) / scale

    def to_dict(self) -> dict:
        out = {"lambda": self.lam, "entropy": self.entropy, "method": self.method,
               "uncertainty": self.uncertainty}
        if self.exact_poly is not None:
            out["exact_poly"] = list(self.exact_poly)
        if self.growth_order is not None:
            out["growth_order"] = self.growth_order
        if self.note:
            out["note"] = self.note
        return out
