"""Exact Laurent polynomial arithmetic, residues, CRT and Lagrange interpolation.

Coefficients are Python ints, so no operand size overflows.  A
:class:`LaurentPoly` is immutable; all operations return new objects.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd, prod
from typing import Iterable, Mapping

__all__ = [
    "LaurentPoly",
    "Residue",
    "lp_add",
    "lp_mul",
    "lp_eval",
    "crt_reconstruct",
    "lagrange_interpolate",
    "is_prime",
    "next_prime",
]


class VariableMismatch(ValueError):
    pass


class LaurentPoly:
    """Element of Z[v, v^-1].

    Stored as a mapping ``exponent -> nonzero int``; the zero polynomial is
    the empty mapping.

    >>> v = LaurentPoly.monomial(1, "v")
    >>> str((v + v**-1) * (v - v**-1))
    'v^2 - v^-2'
    """

    __slots__ = ("_terms", "var", "_hash")

    def __init__(self, terms: Mapping[int, int] | None = None, var: str = "v"):
        clean = {}
        if terms:
            for e, c in terms.items():
                c = int(c)
                if c:
                    clean[int(e)] = c
        self._terms = clean
        self.var = var
        self._hash = None

    # -- constructors -----------------------------------------------------
    @classmethod
    def constant(cls, c: int, var: str = "v") -> LaurentPoly:
        return cls({0: c}, var)

    @classmethod
    def monomial(cls, e: int, var: str = "v", coeff: int = 1) -> LaurentPoly:
        return cls({e: coeff}, var)

    @classmethod
    def coerce(cls, x, var: str) -> LaurentPoly:
        if isinstance(x, LaurentPoly):
            return x
        if isinstance(x, int):
            return cls({0: x}, var)
        raise TypeError(f"cannot coerce {type(x).__name__} to LaurentPoly")

    # -- inspection -------------------------------------------------------
    @property
    def terms(self) -> dict[int, int]:
        return dict(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def is_monomial(self) -> bool:
        return len(self._terms) == 1

    @property
    def max_exp(self) -> int:
        if not self._terms:
            raise ValueError("zero polynomial has no degree")
        return max(self._terms)

    @property
    def min_exp(self) -> int:
        if not self._terms:
            raise ValueError("zero polynomial has no degree")
        return min(self._terms)

    def max_abs_coeff(self) -> int:
        return max((abs(c) for c in self._terms.values()), default=0)

    def coeff(self, e: int) -> int:
        return self._terms.get(e, 0)

    def items(self):
        return sorted(self._terms.items())

    # -- arithmetic -------------------------------------------------------
    def _other(self, other) -> LaurentPoly:
        if isinstance(other, int):
            return LaurentPoly({0: other}, self.var)
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        if other.var != self.var and other._terms and self._terms:
            # constants carry no variable information
            if not (other._terms.keys() == {0} or self._terms.keys() == {0}):
                raise VariableMismatch(f"variables differ: {self.var!r} vs {other.var!r}")
        return other

    def __add__(self, other):
        other = self._other(other)
        if other is NotImplemented:
            return other
        out = dict(self._terms)
        for e, c in other._terms.items():
            out[e] = out.get(e, 0) + c
        return LaurentPoly(out, self._pick_var(other))

    __radd__ = __add__

    def __neg__(self):
        return LaurentPoly({e: -c for e, c in self._terms.items()}, self.var)

    def __sub__(self, other):
        other = self._other(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._other(other)
        if other is NotImplemented:
            return other
        a, b = self._terms, other._terms
        out: dict[int, int] = {}
        for e1, c1 in a.items():
            for e2, c2 in b.items():
                e = e1 + e2
                out[e] = out.get(e, 0) + c1 * c2
        return LaurentPoly(out, self._pick_var(other))

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            if not self.is_monomial() or abs(next(iter(self._terms.values()))) != 1:
                raise ValueError("only unit monomials ±v^k have inverses")
            (e, c), = self._terms.items()
            return LaurentPoly({e * n: c ** (-n)}, self.var)
        result = LaurentPoly({0: 1}, self.var)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def exact_div(self, other: LaurentPoly) -> LaurentPoly:
        """Quotient ``self / other``; raises ``ValueError`` unless it is a Laurent polynomial."""
        if not other:
            raise ZeroDivisionError("division by the zero polynomial")
        top_e, lo = max(other._terms), min(other._terms)
        top_c = other._terms[top_e]
        rem = dict(self._terms)
        floor = min(rem, default=0) - lo  # smallest possible quotient exponent
        quot: dict[int, int] = {}
        while rem and max(rem) - top_e >= floor:
            e = max(rem)
            q, r = divmod(rem[e], top_c)
            if r:
                raise ValueError("division is not exact")
            k = e - top_e
            quot[k] = q
            for oe, oc in other._terms.items():
                v = rem.get(oe + k, 0) - q * oc
                if v:
                    rem[oe + k] = v
                else:
                    rem.pop(oe + k, None)
        if rem:
            raise ValueError("division is not exact")
        return LaurentPoly(quot, self._pick_var(other))

    def _pick_var(self, other: LaurentPoly) -> str:
        if self.var == other.var:
            return self.var
        return other.var if self._terms.keys() <= {0} else self.var

    # -- comparison -------------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, int):
            return self._terms == ({0: other} if other else {})
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        if self._terms != other._terms:
            return False
        return self.var == other.var or self._terms.keys() <= {0}

    def __hash__(self):
        if self._hash is None:
            key = frozenset(self._terms.items())
            self._hash = hash(key) if self._terms.keys() <= {0} else hash((self.var, key))
        return self._hash

    def __bool__(self):
        return bool(self._terms)

    # -- evaluation and substitution --------------------------------------
    def eval(self, x: int, modulus: int | None = None):
        """Value at ``x``, reduced modulo ``modulus`` if given.

        Without a modulus, negative exponents give a :class:`Fraction` unless
        the result happens to be integral.
        """
        if modulus is not None:
            x %= modulus
            if x == 0 and self._terms and min(self._terms) < 0:
                raise ZeroDivisionError("x = 0 with negative exponents present")
            inv = pow(x, -1, modulus) if self._terms and min(self._terms) < 0 else None
            total = 0
            for e, c in self._terms.items():
                p = pow(x, e, modulus) if e >= 0 else pow(inv, -e, modulus)
                total = (total + c * p) % modulus
            return total
        if not self._terms:
            return 0
        lo = min(self._terms)
        if lo < 0:
            if x == 0:
                raise ZeroDivisionError("x = 0 with negative exponents present")
            val = sum(Fraction(c) * Fraction(x) ** e for e, c in self._terms.items())
            return int(val) if val.denominator == 1 else val
        return sum(c * x**e for e, c in self._terms.items())

    def shift(self, s: int) -> LaurentPoly:
        """Multiply by v^s."""
        return LaurentPoly({e + s: c for e, c in self._terms.items()}, self.var)

    def substitute(self, var: str, power: int = 1, sign: int = 1) -> LaurentPoly:
        """Substitute ``v -> sign * w^power`` where ``w`` is the new variable ``var``."""
        return LaurentPoly(
            {e * power: c * (sign ** (e % 2)) for e, c in self._terms.items()}, var
        )

    def rename(self, var: str) -> LaurentPoly:
        return LaurentPoly(self._terms, var)

    def mirror(self) -> LaurentPoly:
        """v -> v^-1."""
        return LaurentPoly({-e: c for e, c in self._terms.items()}, self.var)

    # -- text -------------------------------------------------------------
    def __str__(self):
        if not self._terms:
            return "0"
        parts = []
        for e in sorted(self._terms, reverse=True):
            c = self._terms[e]
            mag = abs(c)
            if e == 0:
                body = str(mag)
            else:
                mono = self.var if e == 1 else f"{self.var}^{e}"
                body = mono if mag == 1 else f"{mag}*{mono}"
            if not parts:
                parts.append(("-" if c < 0 else "") + body)
            else:
                parts.append(("- " if c < 0 else "+ ") + body)
        return " ".join(parts)

    def __repr__(self):
        return f"LaurentPoly({str(self)!r}, var={self.var!r})"

    _TERM = re.compile(
        r"""\s*([+-])?\s*
        (?:(\d+)\s*(?:\*\s*([A-Za-z_]\w*)(?:\s*\^\s*\(?\s*(-?\d+)\s*\)?)?)?
          |([A-Za-z_]\w*)(?:\s*\^\s*\(?\s*(-?\d+)\s*\)?)?)""",
        re.VERBOSE,
    )

    @classmethod
    def parse(cls, text: str, var: str | None = None) -> LaurentPoly:
        """Parse the canonical rendering (``-v^4 + v^3 + 2*v^-1``)."""
        s = text.strip()
        if not s:
            raise ValueError("empty polynomial string")
        pos = 0
        terms: dict[int, int] = {}
        seen_var = var
        first = True
        while pos < len(s):
            m = cls._TERM.match(s, pos)
            if not m or m.end() == pos:
                raise ValueError(f"malformed polynomial {text!r} at offset {pos}")
            sign, num, nvar, nexp, bvar, bexp = m.groups()
            if sign is None and not first:
                raise ValueError(f"missing operator in {text!r} at offset {pos}")
            if num is None and bvar is None:
                raise ValueError(f"malformed polynomial {text!r} at offset {pos}")
            first = False
            c = -1 if sign == "-" else 1
            if num is not None:
                c *= int(num)
                name, e = nvar, (int(nexp) if nexp is not None else (1 if nvar else 0))
            else:
                name, e = bvar, (int(bexp) if bexp is not None else 1)
            if name is not None:
                if seen_var is None:
                    seen_var = name
                elif name != seen_var:
                    raise VariableMismatch(f"variable {name!r} in {text!r}, expected {seen_var!r}")
            terms[e] = terms.get(e, 0) + c
            pos = m.end()
            while pos < len(s) and s[pos].isspace():
                pos += 1
        return cls(terms, seen_var or "v")


def lp_add(p: LaurentPoly, q: LaurentPoly) -> LaurentPoly:
    if p.var != q.var:
        raise VariableMismatch(f"variables differ: {p.var!r} vs {q.var!r}")
    return p + q


def lp_mul(p: LaurentPoly, q: LaurentPoly) -> LaurentPoly:
    if p.var != q.var:
        raise VariableMismatch(f"variables differ: {p.var!r} vs {q.var!r}")
    return p * q


def lp_eval(p: LaurentPoly, x: int, m: int | None = None):
    """Evaluate ``p`` at ``x``; returns a :class:`Residue` when a modulus is given."""
    if m is None:
        return p.eval(x)
    return Residue(p.eval(x, m), m)


_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


@lru_cache(maxsize=4096)
def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, exact for ``n < 3.3e24``."""
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    if n >= 3_317_044_064_679_887_385_961_981:
        raise ValueError("primality test only certified below 3.3e24")
    d, r = n - 1, 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def next_prime(n: int) -> int:
    """Smallest prime >= n."""
    n = max(n, 2)
    while not is_prime(n):
        n += 1
    return n


@dataclass(frozen=True)
class Residue:
    value: int
    modulus: int

    def __post_init__(self):
        if self.modulus < 2:
            raise ValueError("modulus must be >= 2")
        object.__setattr__(self, "value", self.value % self.modulus)


def crt_reconstruct(residues: Iterable[Residue]) -> int:
    """Unique integer in (-M/2, M/2] congruent to every residue, M = product of moduli."""
    residues = list(residues)
    if not residues:
        raise ValueError("no residues")
    x, m = 0, 1
    for r in residues:
        if gcd(m, r.modulus) != 1:
            raise ValueError(f"moduli not coprime: {m} and {r.modulus}")
        # x + m*t = r.value (mod r.modulus)
        t = ((r.value - x) * pow(m, -1, r.modulus)) % r.modulus
        x += m * t
        m *= r.modulus
    if 2 * x > m:
        x -= m
    return x


def lagrange_interpolate(points: Iterable[tuple[int, int]]) -> list[int]:
    """Integer coefficients (constant term first) of the interpolating polynomial.

    Raises ``ValueError`` on duplicate abscissae or if a coefficient is not
    an integer, which means the caller's degree bound was wrong.
    """
    pts = [(int(x), Fraction(y)) for x, y in points]
    xs = [x for x, _ in pts]
    if len(set(xs)) != len(xs):
        raise ValueError("duplicate x values")
    n = len(pts)
    if n == 0:
        return []
    # Newton divided differences, then expand into the monomial basis.
    coef = [y for _, y in pts]
    for j in range(1, n):
        for i in range(n - 1, j - 1, -1):
            coef[i] = (coef[i] - coef[i - 1]) / (xs[i] - xs[i - j])
    poly = [Fraction(0)] * n
    poly[0] = coef[n - 1]
    deg = 0
    for k in range(n - 2, -1, -1):
        # poly = poly * (x - xs[k]) + coef[k]
        new = [Fraction(0)] * n
        for i in range(deg + 1):
            new[i + 1] += poly[i]
            new[i] -= poly[i] * xs[k]
        new[0] += coef[k]
        poly = new
        deg += 1
    out = []
    for c in poly:
        if c.denominator != 1:
            raise ValueError(f"non-integer interpolated coefficient {c}")
        out.append(int(c))
    while len(out) > 1 and out[-1] == 0:
        out.pop()
    return out


def product_of(moduli: Iterable[int]) -> int:
    return prod(moduli)
