"""Carving trees over diagram vertices and their planar realization.

Tree nodes ``0..n-1`` are leaves and coincide with diagram vertex ids
(crossings first, then twist tokens).  Internal nodes are numbered from
``n``.  Trees are stored unrooted together with a chosen root edge; the
rooted view puts a virtual node ``ROOT`` on that edge.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterator, Union

from qli.diagram import Dart, LinkDiagram

__all__ = [
    "ROOT",
    "CarvingTree",
    "Realization",
    "NotRealizable",
    "congestion",
    "exact_carving",
    "heuristic_carving",
    "sweep_carving",
    "realize",
    "cut_weight",
    "boundary_cycle",
    "realizable_roots",
]

ROOT = -1
EXACT_LIMIT = 12

Nested = Union[int, tuple]


class NotRealizable(RuntimeError):
    def __init__(self, message: str, node: int | None = None):
        super().__init__(message)
        self.node = node


# -- graph helpers ----------------------------------------------------------

def cut_weight(d: LinkDiagram, side: frozenset[int] | set[int]) -> int:
    """Number of graph edges with exactly one endpoint in ``side``."""
    return sum((s.tail[0] in side) != (s.head[0] in side) for s in d.segments)


def _neighbour_masks(d: LinkDiagram) -> list[int]:
    masks = [0] * d.n_vertices
    for s in d.segments:
        a, b = s.tail[0], s.head[0]
        if a != b:
            masks[a] |= 1 << b
            masks[b] |= 1 << a
    return masks


def _connected(mask: int, nbr: list[int]) -> bool:
    if mask == 0:
        return True
    low = mask & -mask
    seen = low
    frontier = low
    while frontier:
        v = frontier.bit_length() - 1
        frontier &= ~(1 << v)
        new = nbr[v] & mask & ~seen
        seen |= new
        frontier |= new
    return seen == mask


def _bits(mask: int) -> list[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


class _Admissible:
    """Memoised test: the vertex set is connected and bounded by one closed curve."""

    def __init__(self, d: LinkDiagram, nbr: list[int]):
        self.d, self.nbr = d, nbr
        self.memo: dict[int, bool] = {}

    def __call__(self, mask: int) -> bool:
        if mask not in self.memo:
            self.memo[mask] = _connected(mask, self.nbr) and (
                boundary_cycle(self.d, frozenset(_bits(mask))) is not None)
        return self.memo[mask]


def boundary_cycle(d: LinkDiagram, side: frozenset[int]) -> list[Dart] | None:
    """Counter-clockwise cyclic order of the darts leaving ``side``.

    Starts at the smallest cut dart.  Returns ``None`` if the cut darts do
    not lie on a single closed walk (the region is not a disk).
    """
    cut = sorted(
        (v, s) for v in side for s in range(d.degree(v)) if d.mate((v, s))[0] not in side
    )
    if not cut:
        return []
    order = [cut[0]]
    cur = cut[0]
    for _ in range(len(cut)):
        v, s = cur
        nxt = (v, (s + 1) % d.degree(v))
        guard = 0
        while d.mate(nxt)[0] in side:
            w, t = d.mate(nxt)
            nxt = (w, (t + 1) % d.degree(w))
            guard += 1
            if guard > 4 * len(d.segments) + 4:
                return None
        if nxt == order[0]:
            break
        order.append(nxt)
        cur = nxt
    if len(order) != len(cut) or set(order) != set(cut):
        return None
    return order


# -- tree -------------------------------------------------------------------

@dataclass
class CarvingTree:
    n_leaves: int
    adj: dict[int, tuple[int, ...]]
    weights: dict[tuple[int, int], int]
    root_edge: tuple[int, int] | None
    strategy: str = "custom"

    # construction -------------------------------------------------------
    @classmethod
    def from_nested(cls, d: LinkDiagram, nested: Nested, strategy: str = "custom",
                    root_edge: tuple[int, int] | None = None) -> CarvingTree:
        """Build from a nested-pair description such as ``((0, 1), 2)``.

        The root is placed on the minimum-weight edge (ties: lowest edge
        index in sorted order) among those giving a realizable rooting,
        unless ``root_edge`` is given.
        """
        n = d.n_vertices
        adj: dict[int, list[int]] = {v: [] for v in range(n)}
        counter = [n]
        seen: set[int] = set()

        def build(x) -> int:
            if isinstance(x, int):
                if not 0 <= x < n or x in seen:
                    raise ValueError(f"bad or repeated leaf {x}")
                seen.add(x)
                return x
            if len(x) != 2:
                raise ValueError("internal nodes must have exactly two children")
            a, b = build(x[0]), build(x[1])
            z = counter[0]
            counter[0] += 1
            adj[z] = [a, b]
            adj[a].append(z)
            adj[b].append(z)
            return z

        top = build(nested)
        if seen != set(range(n)):
            raise ValueError("tree leaves do not match the diagram vertices")
        if n >= 2:
            a, b = adj.pop(top)
            adj[a].remove(top)
            adj[b].remove(top)
            adj[a].append(b)
            adj[b].append(a)
            # renumber internals densely
            remap = {v: v for v in range(n)}
            for z in sorted(k for k in adj if k >= n):
                remap[z] = n + len([k for k in remap if k >= n])
            adj = {remap[k]: [remap[x] for x in v] for k, v in adj.items()}
        tree_adj = {k: tuple(v) for k, v in adj.items()}
        weights = _edge_weights(d, tree_adj, n)
        t = cls(n, tree_adj, weights, None, strategy)
        if root_edge is None and weights:
            roots = realizable_roots(t, d)
            root_edge = roots[0] if roots else min(weights, key=lambda e: (weights[e], e))
        t.root_edge = root_edge
        return t

    def reroot(self, edge: tuple[int, int]) -> CarvingTree:
        e = tuple(sorted(edge))
        if e not in self.weights:
            raise ValueError(f"{edge} is not a tree edge")
        return CarvingTree(self.n_leaves, self.adj, self.weights, e, self.strategy)

    # unrooted data ------------------------------------------------------
    @property
    def edges(self) -> list[tuple[int, int]]:
        return sorted(self.weights)

    def congestion(self) -> int:
        return max(self.weights.values(), default=0)

    def is_leaf(self, x: int) -> bool:
        return 0 <= x < self.n_leaves

    # rooted view --------------------------------------------------------
    @cached_property
    def _rooted(self):
        children: dict[int, tuple[int, int]] = {}
        parent: dict[int, int] = {}
        if self.root_edge is None:
            return children, parent
        u, v = self.root_edge
        children[ROOT] = (u, v)
        parent[u] = parent[v] = ROOT
        stack = [(u, v), (v, u)]
        while stack:
            x, p = stack.pop()
            kids = tuple(y for y in self.adj[x] if y != p)
            if kids:
                children[x] = kids
                for y in kids:
                    parent[y] = x
                    stack.append((y, x))
        return children, parent

    @property
    def root(self) -> int:
        return ROOT if self.root_edge is not None else 0

    def children(self, x: int) -> tuple[int, ...]:
        return self._rooted[0].get(x, ())

    def parent(self, x: int) -> int | None:
        return self._rooted[1].get(x)

    @cached_property
    def leafsets(self) -> dict[int, frozenset[int]]:
        out: dict[int, frozenset[int]] = {}
        for x in self.postorder():
            kids = self.children(x)
            out[x] = frozenset([x]) if not kids else frozenset().union(*(out[k] for k in kids))
        return out

    def postorder(self) -> Iterator[int]:
        order = []
        stack = [self.root]
        while stack:
            x = stack.pop()
            order.append(x)
            stack.extend(self.children(x))
        return iter(reversed(order))

    def edge_weight_above(self, x: int) -> int:
        p = self.parent(x)
        if p is None:
            return 0
        if p == ROOT:
            return self.weights[self.root_edge]
        return self.weights[tuple(sorted((x, p)))]

    def to_text(self, d: LinkDiagram | None = None) -> str:
        lines = []

        def name(x):
            if x == ROOT:
                return "root"
            if self.is_leaf(x):
                if d is not None and not d.is_crossing(x):
                    return f"twist {x - len(d.crossings)} (vertex {x})"
                return f"crossing {x}"
            return f"node {x}"

        def rec(x, depth):
            w = self.edge_weight_above(x)
            lines.append("  " * depth + f"{name(x)}  w={w}")
            for k in self.children(x):
                rec(k, depth + 1)

        rec(self.root, 0)
        return "\n".join(lines)


def realizable_roots(t: CarvingTree, d: LinkDiagram) -> list[tuple[int, int]]:
    """Tree edges, by (weight, index), whose rooting passes :func:`realize`."""
    out = []
    for e in sorted(t.weights, key=lambda e: (t.weights[e], e)):
        try:
            realize(t.reroot(e), d)
        except NotRealizable:
            continue
        out.append(e)
    return out


def _edge_weights(d: LinkDiagram, adj: dict[int, tuple[int, ...]], n: int) -> dict[tuple[int, int], int]:
    weights = {}
    for x, ys in adj.items():
        for y in ys:
            if x < y:
                side = _side(adj, x, y, n)
                weights[(x, y)] = cut_weight(d, side)
    return weights


def _side(adj, x: int, y: int, n: int) -> frozenset[int]:
    """Leaves reachable from ``x`` without crossing the edge ``x-y``."""
    out = set()
    stack = [(x, y)]
    while stack:
        a, p = stack.pop()
        if a < n:
            out.add(a)
        for b in adj[a]:
            if b != p:
                stack.append((b, a))
    return frozenset(out)


def congestion(t: CarvingTree) -> int:
    return t.congestion()


# -- strategies -------------------------------------------------------------

def _require_connected(d: LinkDiagram) -> list[int]:
    nbr = _neighbour_masks(d)
    if d.n_vertices == 0 or not _connected((1 << d.n_vertices) - 1, nbr):
        raise ValueError("carving needs a connected diagram with at least one vertex")
    return nbr


def exact_carving(d: LinkDiagram, max_leaves: int = EXACT_LIMIT) -> CarvingTree:
    """Minimum-congestion tree over disk-shaped vertex sets.

    Every subtree's vertex set must be connected and bounded by a single
    closed curve; this is the bond condition relaxed to allow cut vertices.
    """
    n = d.n_vertices
    if n > max_leaves:
        raise ValueError(f"exact carving limited to {max_leaves} leaves (diagram has {n})")
    nbr = _require_connected(d)
    if n == 1:
        return CarvingTree.from_nested(d, 0, "exact")
    full = (1 << n) - 1
    ok = _Admissible(d, nbr)
    weight = {}
    bonds = []
    for m in range(1, full):
        if ok(m):
            bonds.append(m)
            weight[m] = cut_weight(d, frozenset(_bits(m)))
    bondset = set(bonds)
    cost: dict[int, int] = {}
    choice: dict[int, int] = {}
    for m in sorted(bonds + [full], key=lambda x: (bin(x).count("1"), x)):
        if m & (m - 1) == 0:
            cost[m] = 0
            continue
        low = m & -m
        best = None
        sub = (m - 1) & m
        while sub:
            if sub & low and sub in bondset:
                other = m ^ sub
                if other in bondset and sub in cost and other in cost:
                    c = max(weight[sub], weight[other], cost[sub], cost[other])
                    if best is None or c < best:
                        best, choice[m] = c, sub
            sub = (sub - 1) & m
        if best is not None:
            cost[m] = best

    if full not in cost:
        raise NotRealizable("no disk carving exists")

    def nested(m):
        if m & (m - 1) == 0:
            return m.bit_length() - 1
        a = choice[m]
        return (nested(a), nested(m ^ a))

    return CarvingTree.from_nested(d, nested(full), "exact")


def heuristic_carving(d: LinkDiagram) -> CarvingTree:
    """Greedy bottom-up pairing of adjacent clusters by smallest merged cut."""
    n = d.n_vertices
    nbr = _require_connected(d)
    ok = _Admissible(d, nbr)
    clusters: list[tuple[int, Nested]] = [(1 << v, v) for v in range(n)]

    def nbr_of(mask):
        out = 0
        for v in _bits(mask):
            out |= nbr[v]
        return out & ~mask

    while len(clusters) > 2:
        best = None
        fallback = None
        for i in range(len(clusters)):
            ni = nbr_of(clusters[i][0])
            for j in range(i + 1, len(clusters)):
                if not ni & clusters[j][0]:
                    continue
                m = clusters[i][0] | clusters[j][0]
                key = (cut_weight(d, frozenset(_bits(m))), i, j)
                if fallback is None or key < fallback:
                    fallback = key
                if ok(m) and (best is None or key < best):
                    best = key
        _, i, j = best or fallback
        merged = (clusters[i][0] | clusters[j][0], (clusters[i][1], clusters[j][1]))
        clusters = [c for k, c in enumerate(clusters) if k not in (i, j)] + [merged]
    if len(clusters) == 1:
        return CarvingTree.from_nested(d, clusters[0][1], "heuristic")
    return CarvingTree.from_nested(d, (clusters[0][1], clusters[1][1]), "heuristic")


def _bfs_rank(d: LinkDiagram, start: int = 0) -> dict[int, int]:
    rank = {start: 0}
    queue = [start]
    for v in queue:
        for dart in d.darts(v):
            w = d.mate(dart)[0]
            if w not in rank:
                rank[w] = len(rank)
                queue.append(w)
    return rank


def sweep_order(d: LinkDiagram, reverse: bool = False) -> list[int]:
    """Vertex order whose every prefix is a disk-shaped region.

    With ``reverse`` the greedy search prefers vertices of highest BFS rank,
    giving a second, usually different, order.
    """
    n = d.n_vertices
    nbr = _require_connected(d)
    full = (1 << n) - 1
    rank = _bfs_rank(d)
    if reverse:
        rank = {v: -r for v, r in rank.items()}
    ok = _Admissible(d, nbr)

    def extend(seq: list[int], mask: int) -> list[int] | None:
        if mask == full:
            return seq
        frontier = 0
        for v in seq:
            frontier |= nbr[v]
        cands = sorted(_bits(frontier & ~mask), key=rank.__getitem__)
        for v in cands:
            m = mask | (1 << v)
            if ok(m):
                out = extend(seq + [v], m)
                if out is not None:
                    return out
        return None

    for v in sorted(range(n), key=rank.__getitem__):
        if ok(1 << v):
            out = extend([v], 1 << v)
            if out is not None:
                return out
    raise NotRealizable("no disk sweep order exists")


def sweep_carving(d: LinkDiagram) -> CarvingTree:
    """Caterpillar tree along :func:`sweep_order`."""
    order = sweep_order(d)
    nested: Nested = order[0]
    for v in order[1:]:
        nested = (nested, v)
    return CarvingTree.from_nested(d, nested, "sweep")


# -- realization ------------------------------------------------------------

@dataclass
class Realization:
    """Boundary words of every tree node.

    ``boundary[x]`` is the counter-clockwise cyclic order of the darts
    (inside endpoint) crossing the Jordan curve around node ``x``;
    ``bridges[x]`` holds the darts of ``x`` whose mate lies in the sibling.
    """

    tree: CarvingTree
    boundary: dict[int, tuple[Dart, ...]] = field(default_factory=dict)
    bridges: dict[int, frozenset[Dart]] = field(default_factory=dict)


def _is_block(cycle: list[Dart], block: frozenset[Dart]) -> bool:
    if not block or len(block) == len(cycle):
        return True
    flags = [x in block for x in cycle]
    changes = sum(flags[i] != flags[i - 1] for i in range(len(flags)))
    return changes == 2


def _rotate_from(cycle: list[Dart], block: frozenset[Dart]) -> list[Dart]:
    """Rotate so the cycle starts right after ``block`` (non-block part first)."""
    n = len(cycle)
    if not block or len(block) == n:
        return list(cycle)
    for i in range(n):
        if cycle[i - 1] in block and cycle[i] not in block:
            return cycle[i:] + cycle[:i]
    return list(cycle)


def _same_cycle(a: list, b: list) -> bool:
    if len(a) != len(b):
        return False
    if not a:
        return True
    try:
        i = b.index(a[0])
    except ValueError:
        return False
    return b[i:] + b[:i] == a


def realize(t: CarvingTree, d: LinkDiagram) -> Realization:
    """Check planar realizability and record boundary words.

    Raises :class:`NotRealizable` naming the first violating node.
    """
    r = Realization(t)
    for x in t.postorder():
        side = t.leafsets[x]
        cyc = boundary_cycle(d, side)
        if cyc is None:
            raise NotRealizable(f"node {x}: boundary is not a single closed curve", x)
        r.boundary[x] = tuple(cyc)
        kids = t.children(x)
        if not kids:
            continue
        a, b = kids
        sa, sb = t.leafsets[a], t.leafsets[b]
        ca, cb = list(r.boundary[a]), list(r.boundary[b])
        ba = frozenset(dt for dt in ca if d.mate(dt)[0] in sb)
        bb = frozenset(dt for dt in cb if d.mate(dt)[0] in sa)
        r.bridges[a], r.bridges[b] = ba, bb
        if not (_is_block(ca, ba) and _is_block(cb, bb)):
            raise NotRealizable(f"node {x}: bridge arcs are not contiguous", x)
        ra, rb = _rotate_from(ca, ba), _rotate_from(cb, bb)
        na = [dt for dt in ra if dt not in ba]
        nb = [dt for dt in rb if dt not in bb]
        if not _same_cycle(na + nb, list(cyc)):
            raise NotRealizable(f"node {x}: children do not concatenate to the parent word", x)
        bra = [d.mate(dt) for dt in ra if dt in ba]
        brb = [dt for dt in rb if dt in bb]
        if not _same_cycle(bra, brb[::-1]):
            raise NotRealizable(f"node {x}: bridge orders are not mirror images", x)
    return r
