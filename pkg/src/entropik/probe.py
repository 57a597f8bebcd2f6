"""Numerical complexity from the bit growth of K-iterates of random integer matrices."""

from __future__ import annotations

import logging
import math
import random
import time
from dataclasses import dataclass, field

import gmpy2
import numpy as np

from .algebra.linalg import SingularMatrixError, adjugate_integer
from .patterns import Kind, Pattern, build_pattern
from .recurrence import conjecture_lambda
from .records import ComplexityEstimate

log = logging.getLogger(__name__)

mpz = gmpy2.mpz


class ProbeAborted(ArithmeticError):
    pass


@dataclass
class ProbeTrace:
    pattern: str
    q: int
    seed: int
    entry_bits: int
    bits: list[int] = field(default_factory=list)  # bits[0]: starting matrix
    seconds: list[float] = field(default_factory=list)
    aborted: str | None = None
    order: str = "cofactor-first"

    @property
    def iters_completed(self) -> int:
        return len(self.bits) - 1

    def to_dict(self) -> dict:
        return {"pattern": self.pattern, "q": self.q, "seed": self.seed,
                "entry_bits": self.entry_bits, "bits": list(self.bits),
                "iters_completed": self.iters_completed, "aborted": self.aborted,
                "order": self.order}


def _normalize(vec: list) -> list:
    g = mpz(0)
    for x in vec:
        g = gmpy2.gcd(g, x)
        if g == 1:
            return vec
    if g == 0:
        raise ProbeAborted("all entries vanished")
    return [gmpy2.divexact(x, g) for x in vec]


def cofactor_step(pat: Pattern, vec: list) -> list:
    """Steps (ii)+(iii): cofactor matrix of the pattern matrix, divided by the gcd."""
    try:
        _, X = adjugate_integer(pat.matrix(vec))
    except SingularMatrixError:
        raise ProbeAborted("matrix became singular") from None
    # X = +-adj(M); the cofactor matrix is its transpose
    cof = [list(col) for col in zip(*X)]
    return _normalize([mpz(x) for x in pat.reduce(cof)])


def _lcm_tree(vals: list) -> mpz:
    layer = list(vals)
    while len(layer) > 1:
        nxt = [gmpy2.lcm(layer[i], layer[i + 1]) for i in range(0, len(layer) - 1, 2)]
        if len(layer) % 2:
            nxt.append(layer[-1])
        layer = nxt
    return abs(layer[0])


def hadamard_step(vec: list) -> list:
    """Steps (iv)+(v): entry k becomes the product of the others, then the gcd goes.

    The gcd of the products is prod / lcm, so the normalized result is
    lcm / x_k with the sign of the product kept.
    """
    if any(x == 0 for x in vec):
        raise ProbeAborted("zero entry before the Hadamard step")
    L = _lcm_tree(vec)
    sign = -1 if sum(1 for x in vec if x < 0) % 2 else 1
    return [sign * gmpy2.divexact(L, x) for x in vec]


def bit_size(vec: list) -> int:
    """Bits of a typical entry: the largest over the class representatives."""
    return max(int(gmpy2.bit_length(x)) for x in vec)


def iterate(pat: Pattern, vec: list, order: str = "cofactor-first") -> list:
    if order == "cofactor-first":
        return hadamard_step(cofactor_step(pat, vec))
    if order == "hadamard-first":
        return cofactor_step(pat, hadamard_step(vec))
    raise ValueError(f"unknown order {order!r}")


def step_back(pat: Pattern, vec: list, order: str = "cofactor-first") -> list:
    """Inverse of ``iterate`` (both elementary steps are involutions up to scale)."""
    other = "hadamard-first" if order == "cofactor-first" else "cofactor-first"
    return iterate(pat, vec, other)


def same_up_to_sign(a: list, b: list) -> bool:
    return a == b or a == [-x for x in b]


def random_start(pat: Pattern, entry_bits: int, rng: random.Random) -> list:
    return [mpz(rng.randrange(1, 1 << entry_bits)) for _ in range(pat.p)]


def probe(pat: Pattern, iters: int, seed=0, entry_bits: int = 16, order: str = "cofactor-first",
          max_bits: int | None = None, retries: int = 3, stop_bits: int | None = None,
          min_iters: int = 4) -> ProbeTrace:
    """Iterate K on a random pattern matrix ``iters`` times and record entry sizes.

    Stops early (trace kept, ``aborted`` set) on a singular matrix or when
    an entry exceeds ``max_bits``. With ``stop_bits`` the run ends normally
    once entries reach that size and at least ``min_iters`` are done.
    """
    if iters < 3:
        raise ValueError("iters must be >= 3")
    rng = random.Random(seed)
    trace = ProbeTrace(pat.kind.value, pat.q, seed, entry_bits, order=order)
    for attempt in range(retries):
        vec = random_start(pat, entry_bits, rng)
        trace.bits, trace.seconds = [bit_size(vec)], [0.0]
        start = time.monotonic()
        try:
            for n in range(1, iters + 1):
                vec = iterate(pat, vec, order)
                trace.bits.append(bit_size(vec))
                trace.seconds.append(time.monotonic() - start)
                log.debug("%s q=%d iter %d: %d bits (%.1fs)", pat.kind.value, pat.q, n,
                          trace.bits[-1], trace.seconds[-1])
                if n == iters:
                    break
                if max_bits is not None and trace.bits[-1] > max_bits:
                    trace.aborted = f"entry size cap {max_bits} bits reached"
                    return trace
                if stop_bits is not None and n >= min_iters and trace.bits[-1] >= stop_bits:
                    break
            return trace
        except ProbeAborted as exc:
            if "zero entry" in str(exc) and len(trace.bits) == 1:
                continue
            trace.aborted = str(exc)
            return trace
    trace.aborted = "starting matrices kept hitting zero entries"
    return trace


def estimate_lambda(trace: ProbeTrace | list[int], burn_in: int = 2) -> ComplexityEstimate:
    """exp(slope) of ln(bits) against n over the trailing half of the trace
    after ``burn_in`` (at least two points).

    Uncertainty: the slope's standard error carried through exp when the fit
    has residual degrees of freedom, else the change between the last two
    one-step ratios.
    """
    bits = trace.bits if isinstance(trace, ProbeTrace) else list(trace)
    if len(bits) < burn_in + 3:
        raise ValueError(f"trace of length {len(bits)} too short for burn_in={burn_in}")
    post = list(range(burn_in, len(bits)))
    window = post[-max(2, math.ceil(len(post) / 2)):]
    x = np.array(window, dtype=float)
    y = np.log(np.array([bits[i] for i in window], dtype=float))
    slope, icept = np.polyfit(x, y, 1)
    lam = math.exp(float(slope))
    if len(x) > 2:
        resid = y - (slope * x + icept)
        s2 = float(resid @ resid) / (len(x) - 2)
        err = lam * math.sqrt(s2 / float(((x - x.mean()) ** 2).sum()))
    else:
        n = len(bits) - 1
        err = abs(bits[n] / bits[n - 1] - bits[n - 1] / bits[n - 2])
    return ComplexityEstimate(lam, "arithmetic", err, note=f"window n={window[0]}..{window[-1]}")


# conjecture runs: at least 4 iterations (burn-in 2 plus a two-point tail), then
# stop once entries reach 2^21 bits; keeps q <= 7 runs within minutes
CONJECTURE_MIN_ITERS = 4
CONJECTURE_STOP_BITS = 1 << 21
CONJECTURE_MAX_ITERS = 10


@dataclass
class ConjectureReport:
    q: int
    analytic: float
    estimates: dict[str, float | None]
    deviations: dict[str, float | None]
    traces: dict[str, dict]
    partial: bool

    def to_dict(self) -> dict:
        return {"q": self.q, "analytic": self.analytic, "estimates": self.estimates,
                "relative_deviation": self.deviations, "partial": self.partial,
                "traces": self.traces}


def _probe_job(args):
    q, kind, iters, seed, entry_bits = args
    if iters is None:
        return probe(build_pattern(q, kind), CONJECTURE_MAX_ITERS, seed, entry_bits,
                     stop_bits=CONJECTURE_STOP_BITS, min_iters=CONJECTURE_MIN_ITERS)
    return probe(build_pattern(q, kind), iters, seed, entry_bits)


def conjecture_check(q: int, iters: int | dict | None = None, seed=0, entry_bits: int = 16,
                     jobs: int = 1) -> ConjectureReport:
    """Probe G, S and C at this q and compare with the conjectured lambda.

    ``iters`` None (or missing from a per-pattern dict) selects the adaptive
    stopping rule above.
    """
    if q < 5:
        raise ValueError("q must be >= 5")
    kinds = [Kind.GENERAL, Kind.SYMMETRIC, Kind.CYCLIC]
    if isinstance(iters, dict):
        per = {k: iters.get(k.value) for k in kinds}
    else:
        per = {k: iters for k in kinds}
    tasks = [(q, k, per[k], seed, entry_bits) for k in kinds]
    if jobs > 1:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            traces = list(ex.map(_probe_job, tasks))
    else:
        traces = [_probe_job(t) for t in tasks]
    analytic = conjecture_lambda(q).lam
    est, dev, partial = {}, {}, False
    for k, tr in zip(kinds, traces):
        partial = partial or tr.aborted is not None
        try:
            lam = estimate_lambda(tr).lam
        except ValueError:
            lam = None
        est[k.value] = lam
        dev[k.value] = None if lam is None else abs(lam - analytic) / analytic
    return ConjectureReport(q, analytic, est, dev, {k.value: t.to_dict() for k, t in zip(kinds, traces)},
                            partial)


__all__ = ["probe", "estimate_lambda", "conjecture_check", "ProbeTrace", "ConjectureReport",
           "cofactor_step", "hadamard_step", "step_back", "iterate", "same_up_to_sign",
           "ProbeAborted"]
