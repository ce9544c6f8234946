"""Evaluation/interpolation backend: small-prime runs, CRT, Lagrange, unshift."""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from qli.category import RibbonData
from qli.diagram import LinkDiagram, writhe
from qli.engine import Prepared, execute, framing_normalize, prepare
from qli.kernels import ModularBackend
from qli.planner import CostEstimate, estimate_cost
from qli.ring import LaurentPoly, Residue, crt_reconstruct, lagrange_interpolate, next_prime

__all__ = ["shift_bounds", "select_primes", "point_bits", "compute_via_modular",
           "ModularResult", "PRIME_FLOOR"]

# primes start above this floor; each residue fits a 64-bit word
PRIME_FLOOR = 2**61


def shift_bounds(est: CostEstimate) -> tuple[int, int]:
    """``(s, D)``: ``v^s P`` is an ordinary polynomial of degree at most ``D``."""
    s = max(0, -est.degree_lo)
    return s, max(0, est.degree_hi + s)


def point_bits(est: CostEstimate, D: int) -> int:
    """Bits bounding ``|x^s P(x)|`` for the evaluation points ``x = 1..D+1``."""
    return est.log2C + math.ceil((D + 1) * math.log2(D + 1)) if D else est.log2C


def select_primes(bitbound: int, start: int = 2) -> list[int]:
    """Smallest primes ``>= start`` whose product exceeds ``2^(bitbound+1)``."""
    target = 1 << (bitbound + 1)
    out, prod = [], 1
    p = next_prime(start)
    while prod <= target:
        out.append(p)
        prod *= p
        p = next_prime(p + 1)
    return out


@dataclass
class ModularResult:
    value: LaurentPoly
    raw: LaurentPoly
    points: int = 0
    primes: list[int] = field(default_factory=list)
    max_residue_bits: int = 0
    runs: int = 0


def _run(args):
    plan, cat, p, x = args
    val, _ = execute(plan, cat, ModularBackend(p, x))
    return val


def _piece(prep: Prepared, cat: RibbonData, jobs: int, extra_primes: int, pool):
    est = estimate_cost(prep.plan, cat)
    s, D = shift_bounds(est)
    bits = point_bits(est, D)
    primes = select_primes(bits, start=max(PRIME_FLOOR, D + 2))
    if extra_primes:
        more = primes[-1]
        for _ in range(extra_primes):
            more = next_prime(more + 1)
            primes.append(more)
    xs = list(range(1, D + 2))
    tasks = [(prep.plan, cat, p, x) for x in xs for p in primes]
    if pool is not None:
        residues = list(pool.map(_run, tasks, chunksize=max(1, len(tasks) // (4 * jobs))))
    else:
        residues = [_run(t) for t in tasks]
    values = []
    max_bits = 0
    it = iter(residues)
    for x in xs:
        # residues of P(x); x^s P(x) is the integer value of the shifted polynomial
        rs = [Residue(next(it) * pow(x, s, p), p) for p in primes]
        y = crt_reconstruct(rs)
        max_bits = max(max_bits, abs(y).bit_length())
        values.append((x, y))
    coeffs = lagrange_interpolate(values)
    if len(coeffs) > D + 1 and any(coeffs[D + 1:]):
        raise ArithmeticError("interpolated degree exceeds the bound")
    poly = LaurentPoly({e - s: c for e, c in enumerate(coeffs)}, cat.variable)
    return poly, len(xs), primes, max_bits, len(tasks)


def compute_via_modular(d: LinkDiagram, cat: RibbonData, colouring=None, *, strategy: str = "auto",
                        normalize: bool = False, jobs: int = 1, extra_primes: int = 0,
                        root_edge: int | None = None,
                        prepared: list[Prepared] | None = None) -> ModularResult:
    """Invariant via point evaluations mod primes; equals the exact backend's output."""
    prepared = prepared if prepared is not None else prepare(d, cat, colouring, strategy, root_edge)
    total = LaurentPoly.constant(1, cat.variable)
    res = ModularResult(total, total)
    jobs = max(1, jobs or os.cpu_count() or 1)
    pool = ProcessPoolExecutor(jobs) if jobs > 1 else None
    try:
        for prep in prepared:
            poly, npts, primes, mb, runs = _piece(prep, cat, jobs, extra_primes, pool)
            total = total * poly
            res.points += npts
            res.primes = sorted(set(res.primes) | set(primes))
            res.max_residue_bits = max(res.max_residue_bits, mb)
            res.runs += runs
    finally:
        if pool is not None:
            pool.shutdown()
    res.raw = total
    res.value = framing_normalize(total, writhe(d), cat) if normalize else total
    return res
