"""Slow reference evaluators used to certify the engine."""

from __future__ import annotations

from itertools import product

import numpy as np

from qli.category import RibbonData, _eye, _kron
from qli.diagram import Dart, LinkDiagram
from qli.ring import LaurentPoly

__all__ = ["kauffman_bracket", "kauffman_unnormalized", "jones_from_bracket", "morse_evaluate",
           "BRACKET_LIMIT", "DENSE_LIMIT"]

BRACKET_LIMIT = 14
DENSE_LIMIT = 10**6


def _A(e: int, var: str = "A") -> LaurentPoly:
    return LaurentPoly({e: 1}, var)


def kauffman_bracket(d: LinkDiagram, var: str = "A") -> LaurentPoly:
    """Framed Kauffman bracket with ``<unknot> = 1``.

    A-smoothing joins arcs ``(a, b)`` and ``(c, d)`` of ``X[a,b,c,d]``, the
    B-smoothing ``(a, d)`` and ``(b, c)``.  Each twist token contributes
    ``(-A^3)^sign``.
    """
    n = len(d.crossings)
    if n > BRACKET_LIMIT:
        raise ValueError(f"state sum limited to {BRACKET_LIMIT} crossings")
    labels = sorted({a for arcs in d.component_arcs.values() for a in arcs})
    index = {a: i for i, a in enumerate(labels)}
    delta = -_A(2, var) - _A(-2, var)
    total = LaurentPoly({}, var)
    for state in product((0, 1), repeat=n):
        parent = list(range(len(labels)))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        def union(x, y):
            parent[find(index[x])] = find(index[y])

        for c, s in zip(d.crossings, state):
            a, b, cc, dd = c.arcs
            if s == 0:
                union(a, b)
                union(cc, dd)
            else:
                union(a, dd)
                union(b, cc)
        loops = len({find(i) for i in range(len(labels))})
        n_b = sum(state)
        total = total + _A(n - 2 * n_b, var) * delta ** (loops - 1)
    tw = sum(t.sign for t in d.twists)
    return total * LaurentPoly({3 * tw: (-1) ** (tw % 2)}, var)


def kauffman_unnormalized(d: LinkDiagram, var: str = "A") -> LaurentPoly:
    """Bracket scaled so the crossing-free loop evaluates to ``-A^2 - A^-2``."""
    return kauffman_bracket(d, var) * (-_A(2, var) - _A(-2, var))


def jones_from_bracket(bracket: LaurentPoly, w: int) -> LaurentPoly:
    """``(-A^3)^(-w) <D>`` rewritten in ``t = A^-4`` (exponents must be multiples of 4)."""
    norm = bracket * LaurentPoly({-3 * w: (-1) ** (w % 2)}, bracket.var)
    terms = {}
    for e, c in norm.items():
        if e % 4:
            raise ValueError("not a polynomial in A^4")
        terms[-e // 4] = c
    return LaurentPoly(terms, "t")


# -- dense sweep ------------------------------------------------------------

class _DenseSweep:
    def __init__(self, d: LinkDiagram, cat: RibbonData, col: dict[int, str]):
        self.d, self.cat, self.col = d, cat, col
        self.var = cat.variable

    def label(self, dart: Dart) -> str:
        name = self.col[self.d.segment_at(dart).component]
        return name if self.d.is_outgoing(dart) else self.cat.dual(name)

    def eye(self, objs) -> np.ndarray:
        n = 1
        for o in objs:
            n *= self.cat.dim(o)
        return _eye(n, self.var)

    def check(self, arr: np.ndarray):
        if arr.size > DENSE_LIMIT:
            raise ValueError("dense sweep exceeds the size limit")
        return arr

    def rotate_one(self, vec: np.ndarray, labels: list[str]) -> np.ndarray:
        """Move the first strand to the end by a planar cup/cap pair."""
        u, rest = labels[0], labels[1:]
        ud = self.cat.dual(u)
        cup = self.cat.coeval[ud]  # 1 -> U* (x) U
        mid = self.check(_kron(self.eye([ud]), vec, self.eye([u])))
        cap = _kron(self.cat.eval[u], self.eye(rest), self.eye([u]))
        return cap.dot(mid.dot(cup))

    def cap(self, vec: np.ndarray, labels: list[str], pos: int) -> np.ndarray:
        L = labels[pos]
        M = _kron(self.eye(labels[:pos]), self.cat.eval[self.cat.dual(L)], self.eye(labels[pos + 2:]))
        return M.dot(vec)

    def atom(self, v: int, start: int) -> tuple[np.ndarray, list[Dart]]:
        d, cat = self.d, self.cat
        deg = d.degree(v)
        darts = [(v, (start - i) % deg) for i in range(deg)]
        labels = [self.label(x) for x in darts]
        if deg == 4:
            u, w = labels[2], labels[1]
            cups = _kron(cat.coeval[cat.dual(u)], cat.coeval[w])
            if darts[0][1] in (1, 3):
                mid = cat.braiding[(u, w)]
            else:
                mid = cat.braiding_inv[(w, u)]
            vec = _kron(self.eye([cat.dual(u)]), mid, self.eye([cat.dual(w)])).dot(cups)
        else:
            w = labels[1]
            th = cat.twist[w] if d.vertex_sign(v) > 0 else cat.twist_inv[w]
            vec = _kron(self.eye([cat.dual(w)]), th).dot(cat.coeval[cat.dual(w)])
        # cap self-loops
        changed = True
        while changed:
            changed = False
            for i in range(len(darts) - 1):
                if d.mate(darts[i]) == darts[i + 1]:
                    vec = self.cap(vec, labels, i)
                    darts = darts[:i] + darts[i + 2:]
                    labels = labels[:i] + labels[i + 2:]
                    changed = True
                    break
        return vec, darts


def morse_evaluate(d: LinkDiagram, cat: RibbonData, colouring: dict[int, str] | None = None,
                   reverse: bool = False) -> LaurentPoly:
    """Dense vertex-by-vertex sweep with explicit Kronecker products.

    Vertices are absorbed one at a time along a sweep order (the reverse-rank
    order when ``reverse``).  Before each absorption the accumulated word is rotated
    with planar cups and caps so the shared strands sit at its right end.
    """
    from qli.carving import boundary_cycle, sweep_order
    from qli.diagram import split_components
    from qli.planner import resolve_colouring

    total = LaurentPoly.constant(1, cat.variable)
    pieces = split_components(d)
    for piece in pieces:
        col = resolve_colouring(piece, cat, _translate(d, piece, colouring))
        sw = _DenseSweep(piece, cat, col)
        order = sweep_order(piece, reverse=reverse)
        vec = _eye(1, cat.variable)
        word: list[Dart] = []
        inside: set[int] = set()
        for v in order:
            if not word:
                cyc = list(reversed(boundary_cycle(piece, frozenset([v])) or [(v, 0)]))
                vec, word = sw.atom(v, cyc[0][1])
                inside.add(v)
                continue
            bridge = [x for x in word if piece.mate(x)[0] == v]
            # rotate until the bridge block sits at the right end
            for _ in range(len(word)):
                if set(word[len(word) - len(bridge):]) == set(bridge) and word[0] not in bridge:
                    break
                vec = sw.rotate_one(vec, [sw.label(x) for x in word])
                word = word[1:] + word[:1]
            if bridge and len(bridge) == len(word):
                # every strand is shared: end on the mate of v's first bridged dart
                deg = piece.degree(v)
                cyc = [(v, -i % deg) for i in range(deg)]
                vb = {piece.mate(x) for x in word}
                first = [x for i, x in enumerate(cyc) if x in vb and cyc[i - 1] not in vb]
                if first:
                    for _ in range(len(word)):
                        if word[-1] == piece.mate(first[0]):
                            break
                        vec = sw.rotate_one(vec, [sw.label(x) for x in word])
                        word = word[1:] + word[:1]
            start = piece.mate(word[-1])
            avec, aword = sw.atom(v, start[1])
            vec = sw.check(_kron(vec, avec))
            word = word + aword
            labels = [sw.label(x) for x in word]
            m = len(word) - len(aword)
            for _ in bridge:
                if piece.mate(word[m - 1]) != word[m]:
                    raise RuntimeError("sweep strands do not pair up")
                vec = sw.cap(vec, labels, m - 1)
                word = word[:m - 1] + word[m + 1:]
                labels = labels[:m - 1] + labels[m + 1:]
                m -= 1
            inside.add(v)
        if vec.shape != (1, 1):
            raise RuntimeError("sweep did not close up")
        total = total * LaurentPoly.coerce(vec[0, 0], cat.variable)
    return total


def _translate(d, piece, colouring):
    if not colouring:
        return None
    out = {}
    for i, arcs in piece.component_arcs.items():
        orig = next(c for c, a0 in d.component_arcs.items() if arcs[0] in a0)
        if orig in colouring:
            out[i] = colouring[orig]
    return out
