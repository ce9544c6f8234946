"""The seven elementary composition kernels on flat row-major vectors.

Every kernel streams an index formula over ``id ⊗ M ⊗ id``-shaped products
and never materialises the identity factors.  Index arithmetic goes through
:func:`triples`, the one place where a flat index ``i`` is split as
``i = alpha*(mid*inner) + beta*inner + gamma`` (all 0-based).

Scalars are handled by a backend: :class:`ExactBackend` (Laurent
polynomials) or :class:`ModularBackend` (a ring element evaluated at an
integer point modulo a prime).  Backends also carry the operation counter.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import prod
from typing import Sequence

import numpy as np

from qli.ring import LaurentPoly

__all__ = [
    "ExactBackend",
    "ModularBackend",
    "MorphVec",
    "triples",
    "mid_compose",
    "eval_compose",
    "partial5",
    "partial6",
    "partial7",
    "kron_oracle",
    "to_dense",
    "from_dense",
    "ShapeError",
]

DENSE_CAP = 10**6


class ShapeError(ValueError):
    pass


class ExactBackend:
    name = "exact"

    def __init__(self, var: str = "v"):
        self.var = var
        self.zero = LaurentPoly({}, var)
        self.one = LaurentPoly({0: 1}, var)
        self.ops = 0

    def convert(self, p: LaurentPoly | int) -> LaurentPoly:
        return LaurentPoly.coerce(p, self.var)

    @staticmethod
    def add(x, y):
        return x + y

    @staticmethod
    def mul(x, y):
        return x * y

    @staticmethod
    def is_zero(x) -> bool:
        return not x


class ModularBackend:
    """Scalars are ints mod ``p``; ring elements are evaluated at ``v = x``."""

    name = "modular"

    def __init__(self, p: int, x: int):
        if x % p == 0:
            raise ValueError("evaluation point must be invertible mod p")
        self.p = p
        self.x = x % p
        self.zero = 0
        self.one = 1
        self.ops = 0

    def convert(self, poly: LaurentPoly | int) -> int:
        if isinstance(poly, int):
            return poly % self.p
        return poly.eval(self.x, self.p)

    def add(self, a, b):
        return (a + b) % self.p

    def mul(self, a, b):
        return (a * b) % self.p

    @staticmethod
    def is_zero(x) -> bool:
        return x == 0


@dataclass
class MorphVec:
    """Matrix of ring scalars with factored row/column shapes.

    ``rows``/``cols`` list the tensor-factor dimensions of the codomain and
    domain; a column vector has ``cols == ()`` and a row vector
    ``rows == ()``.  Entries are stored row-major in ``data``.
    """

    rows: tuple[int, ...]
    cols: tuple[int, ...]
    data: list
    backend: object = field(repr=False, default=None)

    def __post_init__(self):
        self.rows = tuple(self.rows)
        self.cols = tuple(self.cols)
        if len(self.data) != self.nrows * self.ncols:
            raise ShapeError(
                f"{len(self.data)} entries for shape {self.rows} x {self.cols}"
            )

    @property
    def nrows(self) -> int:
        return prod(self.rows)

    @property
    def ncols(self) -> int:
        return prod(self.cols)

    def __len__(self):
        return len(self.data)

    def entry(self, i: int, j: int):
        return self.data[i * self.ncols + j]

    def same_values(self, other: MorphVec) -> bool:
        return (self.nrows, self.ncols) == (other.nrows, other.ncols) and all(
            x == y for x, y in zip(self.data, other.data)
        )

    def transpose(self) -> MorphVec:
        n, m = self.nrows, self.ncols
        data = [self.data[i * m + j] for j in range(m) for i in range(n)]
        return MorphVec(self.cols, self.rows, data, self.backend)

    def as_column(self) -> MorphVec:
        """Reinterpret a row vector as a column (no data movement)."""
        if self.nrows != 1 and self.ncols != 1:
            raise ShapeError("not a vector")
        return MorphVec(self.rows + self.cols, (), self.data, self.backend)


def triples(a: int, mid: int, inner: int):
    """Yield ``(i, alpha, beta, gamma)`` with ``i = alpha*mid*inner + beta*inner + gamma``.

    Iterates ``i`` in increasing order over ``range(a*mid*inner)``.
    """
    i = 0
    for alpha in range(a):
        for beta in range(mid):
            for gamma in range(inner):
                yield i, alpha, beta, gamma
                i += 1


def _check(cond: bool, msg: str):
    if not cond:
        raise ShapeError(msg)


def _nonzero_rows(M: MorphVec, bk) -> list[list[tuple[int, object]]]:
    m, mp = M.nrows, M.ncols
    return [
        [(k, M.data[r * mp + k]) for k in range(mp) if not bk.is_zero(M.data[r * mp + k])]
        for r in range(m)
    ]


def mid_compose(f: MorphVec, M: MorphVec, a: int, m: int, mp: int, c: int) -> MorphVec:
    """h = (id_a ⊗ M ⊗ id_c) · f for a column ``f`` of length ``a*mp*c``.

    Covers braidings, twists and (co)evaluations inserted between strands:
    ``h[alpha*c*m + beta*c + gamma] = sum_k M[beta, k] * f[alpha*c*mp + k*c + gamma]``.
    """
    bk = f.backend
    _check(f.ncols == 1, "mid_compose needs a column vector")
    _check(len(f.data) == a * mp * c, f"f has {len(f.data)} entries, expected {a}*{mp}*{c}")
    _check((M.nrows, M.ncols) == (m, mp), f"M is {M.nrows}x{M.ncols}, expected {m}x{mp}")
    rows = _nonzero_rows(M, bk)
    fd = f.data
    add, mul, zero = bk.add, bk.mul, bk.zero
    out = [zero] * (a * m * c)
    ops = 0
    for i, alpha, beta, gamma in triples(a, m, c):
        base = alpha * c * mp + gamma
        acc = zero
        for k, coef in rows[beta]:
            x = fd[base + k * c]
            if not bk.is_zero(x):
                acc = add(acc, mul(coef, x))
                ops += 1
        out[i] = acc
    bk.ops += ops
    return MorphVec(_splice(f.rows, a, M.rows, mp, c), (), out, bk)


def _splice(factors: tuple[int, ...], a: int, middle: tuple[int, ...], mp: int, c: int):
    """Replace the factors spanning dimension ``mp`` after a prefix of size ``a``."""
    acc, i = 1, 0
    while acc < a and i < len(factors):
        acc *= factors[i]
        i += 1
    j, acc2 = i, 1
    while acc2 < mp and j < len(factors):
        acc2 *= factors[j]
        j += 1
    if acc == a and acc2 == mp and prod(factors[j:]) == c:
        return factors[:i] + tuple(middle) + factors[j:]
    return (a, *middle, c) if middle else (a * c,)


def eval_compose(dU: MorphVec, f: MorphVec) -> MorphVec:
    """Wrap an evaluation around a block: ``h[alpha*a*b + beta*a + gamma] = dU[alpha*a + gamma] * f[beta]``.

    ``dU`` is a ``1 x a^2`` row, ``f`` a ``b x 1`` column; the result is the
    ``1 x a^2 b`` row whose outer pair of indices is contracted by ``dU``.
    """
    bk = f.backend
    _check(dU.nrows == 1, "dU must be a row vector")
    aa = dU.ncols
    a = int(round(aa ** 0.5))
    _check(a * a == aa, f"dU has {aa} entries, not a square")
    _check(f.ncols == 1, "f must be a column vector")
    b = f.nrows
    mul, zero = bk.mul, bk.zero
    out = [zero] * (a * a * b)
    ops = 0
    for j, alpha, beta, gamma in triples(a, b, a):
        d = dU.data[alpha * a + gamma]
        x = f.data[beta]
        if not bk.is_zero(d) and not bk.is_zero(x):
            out[j] = mul(d, x)
            ops += 1
    bk.ops += ops
    outer = dU.cols if len(dU.cols) == 2 else (a, a)
    return MorphVec((), (outer[0], *f.rows, outer[1]), out, bk)


def partial5(f: MorphVec, g: MorphVec, a: int, b: int, c: int) -> MorphVec:
    """h = (g ⊗ id_c)(id_a ⊗ f), a ``c x a`` matrix; f is ``bc x 1``, g is ``1 x ab``."""
    bk = f.backend
    _check(len(f.data) == b * c and f.ncols == 1, "partial5: f must be bc x 1")
    _check(len(g.data) == a * b and g.nrows == 1, "partial5: g must be 1 x ab")
    add, mul, zero = bk.add, bk.mul, bk.zero
    out = [zero] * (c * a)
    ops = 0
    fd, gd = f.data, g.data
    for i in range(c):
        for j in range(a):
            acc = zero
            for k in range(b):
                x, y = gd[j * b + k], fd[k * c + i]
                if not bk.is_zero(x) and not bk.is_zero(y):
                    acc = add(acc, mul(x, y))
                    ops += 1
            out[i * a + j] = acc
    bk.ops += ops
    return MorphVec((c,), (a,), out, bk)


def partial6(f: MorphVec, g: MorphVec, a: int, b: int, c: int) -> MorphVec:
    """h = (id_a ⊗ g)(f ⊗ id_c), an ``a x c`` matrix; f is ``ab x 1``, g is ``1 x bc``."""
    bk = f.backend
    _check(len(f.data) == a * b and f.ncols == 1, "partial6: f must be ab x 1")
    _check(len(g.data) == b * c and g.nrows == 1, "partial6: g must be 1 x bc")
    add, mul, zero = bk.add, bk.mul, bk.zero
    out = [zero] * (a * c)
    ops = 0
    fd, gd = f.data, g.data
    for i in range(a):
        for j in range(c):
            acc = zero
            for k in range(b):
                x, y = gd[k * c + j], fd[i * b + k]
                if not bk.is_zero(x) and not bk.is_zero(y):
                    acc = add(acc, mul(x, y))
                    ops += 1
            out[i * c + j] = acc
    bk.ops += ops
    return MorphVec((a,), (c,), out, bk)


def partial7(f: MorphVec, g: MorphVec) -> MorphVec:
    """h = (id_a ⊗ g) · f for ``f`` of shape ``ab x 1`` and ``g`` of shape ``c x b``."""
    bk = f.backend
    b = g.ncols
    c = g.nrows
    _check(f.ncols == 1, "partial7: f must be a column")
    _check(b > 0 and len(f.data) % b == 0, "partial7: f length not divisible by b")
    a = len(f.data) // b
    add, mul, zero = bk.add, bk.mul, bk.zero
    out = [zero] * (a * c)
    ops = 0
    fd, gd = f.data, g.data
    for i, alpha, _, beta in triples(a, 1, c):
        acc = zero
        for k in range(b):
            x, y = gd[beta * b + k], fd[alpha * b + k]
            if not bk.is_zero(x) and not bk.is_zero(y):
                acc = add(acc, mul(x, y))
                ops += 1
        out[i] = acc
    bk.ops += ops
    return MorphVec((a, c), (), out, bk)


# -- dense oracle -------------------------------------------------------------

def to_dense(mv: MorphVec) -> np.ndarray:
    arr = np.empty((mv.nrows, mv.ncols), dtype=object)
    for i in range(mv.nrows):
        for j in range(mv.ncols):
            arr[i, j] = mv.entry(i, j)
    return arr


def from_dense(arr: np.ndarray, backend, rows=None, cols=None) -> MorphVec:
    n, m = arr.shape
    data = [backend.convert(x) if isinstance(x, int) else x for x in arr.reshape(-1)]
    return MorphVec(rows or (n,), cols or (m,), data, backend)


def _identity(n: int, backend) -> np.ndarray:
    arr = np.empty((n, n), dtype=object)
    for i in range(n):
        for j in range(n):
            arr[i, j] = backend.one if i == j else backend.zero
    return arr


def _reduce(arr: np.ndarray, backend) -> np.ndarray:
    if isinstance(backend, ModularBackend):
        return np.vectorize(lambda x: x % backend.p, otypes=[object])(arr)
    return arr


def kron_oracle(layers: Sequence[Sequence], backend) -> np.ndarray:
    """Dense evaluation of a composite of tensor products.

    ``layers`` are applied right-to-left like a composition ``L0 ∘ L1 ∘ ...``;
    each layer is a list of factors, a factor being a dense array,
    a :class:`MorphVec`, or an int ``n`` meaning ``id_n``.  Builds every
    Kronecker product explicitly.
    """
    result = None
    for layer in reversed(layers):
        mat = None
        for fac in layer:
            if isinstance(fac, int):
                fac = _identity(fac, backend)
            elif isinstance(fac, MorphVec):
                fac = to_dense(fac)
            mat = fac if mat is None else np.kron(mat, fac)
            if mat.size > DENSE_CAP:
                raise ValueError(f"dense oracle size cap exceeded ({mat.size} entries)")
        mat = _reduce(mat, backend)
        result = mat if result is None else _reduce(mat.dot(result), backend)
    return result
