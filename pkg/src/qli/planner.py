"""Compile a realized carving tree into a checked contraction plan.

A node's boundary word lists the strands crossing its Jordan curve in
clockwise order, starting just after the bullet.  The word read left to
right is the codomain ``V_1 ⊗ ... ⊗ V_w`` of the node's coupon.  A strand
leaving the region is labelled by its component's colour, a strand
entering it by the dual colour.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Union

from qli.carving import ROOT, CarvingTree, Realization
from qli.category import RibbonData, block_braid_ops, full_twist_ops
from qli.diagram import Dart, LinkDiagram

__all__ = [
    "Strand",
    "LeafAtom",
    "Slide",
    "Merge",
    "ContractionPlan",
    "CostEstimate",
    "PlanError",
    "build_plan",
    "validate_plan",
    "estimate_cost",
    "resolve_colouring",
    "SMALL",
    "LARGE",
]

SMALL = "SmallBridge"
LARGE = "LargeBridge"


class PlanError(ValueError):
    def __init__(self, message: str, step: int | None = None):
        super().__init__(message)
        self.step = step


@dataclass(frozen=True)
class Strand:
    seg: int
    dart: Dart
    obj: str
    out: bool

    def as_json(self):
        return {"strand": self.seg, "object": self.obj, "orientation": "out" if self.out else "in"}


State = tuple[Strand, ...]


@dataclass
class LeafAtom:
    node: int
    vertex: int
    kind: int
    objects: tuple[str, ...]
    word: State  # full atom word, loops included
    caps: tuple[tuple[int, str], ...]  # (position, object L) caps (L, L*) in order
    after: State

    def describe(self):
        return {"op": "leaf", "node": self.node, "vertex": self.vertex, "kind": self.kind,
                "objects": list(self.objects), "loop_caps": len(self.caps),
                "out": [s.as_json() for s in self.after]}


@dataclass
class Slide:
    node: int
    direction: str  # "left-to-right" moves the leading block to the end
    j: int
    i: int
    ops: tuple[tuple, ...]
    before: State
    after: State

    def describe(self):
        return {"op": "slide", "node": self.node, "direction": self.direction,
                "moved": self.j, "static": self.i,
                "emitted": [list(map(str, o)) for o in self.ops]}


@dataclass
class Merge:
    node: int
    left: int
    right: int
    k: int
    case: str
    left_state: State
    right_state: State
    after: State

    @property
    def dual(self) -> bool:
        return self.case == LARGE

    def describe(self):
        return {"op": "merge", "node": self.node, "g1": self.left, "g2": self.right,
                "k": self.k, "case": self.case, "dual": self.dual,
                "out": [s.as_json() for s in self.after]}


Step = Union[LeafAtom, Slide, Merge]


@dataclass
class ContractionPlan:
    steps: list[Step]
    root: int
    cw: int
    congestion: int
    max_dim: int
    colouring: dict[int, str]
    writhe: int
    n_slides: int = 0

    def to_json(self) -> dict:
        return {"root": self.root, "cw": self.cw, "congestion": self.congestion,
                "steps": [s.describe() for s in self.steps]}


@dataclass
class CostEstimate:
    peak_len: int
    scalar_ops: int
    degree_hi: int
    degree_lo: int
    coeff_bits: float
    max_abc: int

    @property
    def log2C(self) -> int:
        return int(math.ceil(self.coeff_bits))

    def to_json(self) -> dict:
        return {"peak_len": self.peak_len, "scalar_ops": self.scalar_ops,
                "degree_bound": self.degree_hi, "min_exponent_bound": self.degree_lo,
                "log2C": self.log2C, "max_abc": self.max_abc}


# -- helpers ----------------------------------------------------------------

def resolve_colouring(d: LinkDiagram, cat: RibbonData, colouring: dict[int, str] | None = None
                      ) -> dict[int, str]:
    """Per-component object names: explicit colouring, then header colours, then default."""
    from qli.category import CategoryError

    out = {}
    for comp in range(1, d.n_components + 1):
        name = (colouring or {}).get(comp) or d.colors.get(comp) or cat.default_object
        if name not in cat.objects:
            raise CategoryError(f"component {comp}: unknown object {name!r}")
        out[comp] = name
    return out


def _strand(d: LinkDiagram, cat: RibbonData, col: dict[int, str], dart: Dart) -> Strand:
    seg = d.segment_at(dart)
    out = d.is_outgoing(dart)
    name = col[seg.component]
    return Strand(seg.id, dart, name if out else cat.dual(name), out)


def _rotate(word: list, start) -> list:
    i = word.index(start)
    return word[i:] + word[:i]


def _slide_ops(objs: list[str], t: int) -> tuple[str, int, tuple]:
    """Operations turning word ``objs`` into ``objs[t:] + objs[:t]``."""
    n = len(objs)
    if t <= n - t:
        block, rest = objs[:t], objs[t:]
        ops = [("theta", p, o) for p, o in enumerate(block)]
        ops += [("braid", pos, a, b) for _, pos, a, b in full_twist_ops(block)]
        ops += [("braid", pos, a, b) for pos, a, b in block_braid_ops(block, rest)]
        return "left-to-right", t, tuple(ops)
    # move the trailing block W to the front: inverse of sliding W from the front
    block, rest = objs[t:], objs[:t]
    fwd = [("theta", p, o) for p, o in enumerate(block)]
    fwd += [("braid", pos, a, b) for _, pos, a, b in full_twist_ops(block)]
    fwd += [("braid", pos, a, b) for pos, a, b in block_braid_ops(block, rest)]
    inv = []
    for op in reversed(fwd):
        if op[0] == "theta":
            inv.append(("theta_inv", op[1], op[2]))
        else:
            inv.append(("braid_inv",) + op[1:])
    return "right-to-left", n - t, tuple(inv)


def apply_ops_to_labels(labels: list[str], ops) -> list[str]:
    labels = list(labels)
    for op in ops:
        kind, pos = op[0], op[1]
        if kind in ("theta", "theta_inv"):
            if labels[pos] != op[2]:
                raise PlanError(f"twist on {op[2]} but strand {pos} carries {labels[pos]}")
        elif kind == "braid":
            a, b = op[2], op[3]
            if labels[pos:pos + 2] != [a, b]:
                raise PlanError(f"braiding {a},{b} at {pos} over {labels[pos:pos + 2]}")
            labels[pos], labels[pos + 1] = b, a
        elif kind == "braid_inv":
            a, b = op[2], op[3]
            if labels[pos:pos + 2] != [b, a]:
                raise PlanError(f"inverse braiding {a},{b} at {pos} over {labels[pos:pos + 2]}")
            labels[pos], labels[pos + 1] = a, b
        else:
            raise PlanError(f"unknown operation {kind!r}")
    return labels


# -- plan construction ------------------------------------------------------

def build_plan(d: LinkDiagram, tree: CarvingTree, real: Realization, cat: RibbonData,
               colouring: dict[int, str] | None = None) -> ContractionPlan:
    """Leaf atoms, slides and merges for a postorder traversal of ``tree``."""
    from qli.diagram import writhe

    col = resolve_colouring(d, cat, colouring)
    cw_eff = max([tree.congestion()] + [d.degree(v) for v in range(d.n_vertices)])
    cw = tree.congestion()
    cycles = {x: list(reversed(c)) for x, c in real.boundary.items()}  # clockwise

    def seam(child: int) -> Dart | None:
        """First non-bridge dart after the bridge block (clockwise)."""
        cyc, br = cycles[child], real.bridges[child]
        for i, dt in enumerate(cyc):
            if dt not in br and cyc[i - 1] in br:
                return dt
        return None

    def bridge_start(child: int) -> Dart | None:
        cyc, br = cycles[child], real.bridges[child]
        for i, dt in enumerate(cyc):
            if dt in br and cyc[i - 1] not in br:
                return dt
        return None

    def forced_start(g1: int, g2: int) -> Dart | None:
        """Start of ``g1``'s word, or None when its rotation is free.

        A fully bridged ``g1`` must end on the mate of the first dart of
        ``g2``'s bridge block, so it starts on the mate of the block's last.
        """
        s1 = seam(g1)
        if s1 is not None:
            return s1
        s2 = seam(g2)
        if s2 is None:
            return None
        cyc = cycles[g2]
        return d.mate(cyc[cyc.index(s2) - 1])

    def rot_cost(x: int, have: Dart, want: Dart | None) -> int:
        if want is None or have == want or not cycles[x]:
            return 0
        cyc = cycles[x]
        t = (cyc.index(want) - cyc.index(have)) % len(cyc)
        return min(t, len(cyc) - t)

    sys.setrecursionlimit(max(sys.getrecursionlimit(), 10000))

    @lru_cache(maxsize=None)
    def solve(x: int, req: Dart | None):
        """(slide cost in subtree incl. x's own output slide, chosen g1, natural start)."""
        kids = tree.children(x)
        if not kids:
            cyc = cycles[x]
            start = req if req is not None else (cyc[0] if cyc else None)
            return 0, None, start
        best = None
        for g1, g2 in (kids, kids[::-1]):
            cost, start = _option(g1, g2)
            total = cost + rot_cost(x, start, req) if start is not None else cost
            key = (total, g1)
            if best is None or key < best[0]:
                best = (key, g1, start)
        return best[0][0], best[1], best[2]

    def _option(g1: int, g2: int):
        s1 = seam(g1)
        req1 = forced_start(g1, g2)
        if req1 is None:  # both children entirely bridged: free rotation
            c1, _, req1 = solve(g1, None)
        else:
            c1 = solve(g1, req1)[0]
        last = _rotate(cycles[g1], req1)[-1]
        c2 = solve(g2, d.mate(last))[0]
        start = s1 if s1 is not None else seam(g2)
        return c1 + c2, start

    steps: list[Step] = []
    states: dict[int, State] = {}

    def label_word(darts: list[Dart]) -> State:
        return tuple(_strand(d, cat, col, dt) for dt in darts)

    def emit(x: int, req: Dart | None) -> State:
        kids = tree.children(x)
        if not kids:
            st = _emit_leaf(x, req)
        else:
            _, g1, _ = solve(x, req)
            g2 = kids[1] if kids[0] == g1 else kids[0]
            req1 = forced_start(g1, g2)
            if req1 is None:
                left = emit(g1, None)
                req1 = left[0].dart if left else None
            else:
                left = emit(g1, req1)
            last = _rotate(cycles[g1], req1)[-1]
            right = emit(g2, d.mate(last))
            left = _maybe_slide(g1, left, req1)
            right = _maybe_slide(g2, right, d.mate(last))
            k = len(real.bridges[g1])
            for u, p in zip(left[len(left) - k:], reversed(right[:k])):
                if d.mate(u.dart) != p.dart:
                    raise PlanError(f"node {x}: bridge strands do not pair up")
            after = left[:len(left) - k] + right[k:]
            case = SMALL if 2 * k <= cw else LARGE
            steps.append(Merge(x, g1, g2, k, case, left, right, after))
            st = after
        states[x] = st
        return st

    def _maybe_slide(x: int, st: State, want: Dart | None) -> State:
        if want is None or not st or st[0].dart == want:
            return st
        darts = [s.dart for s in st]
        t = darts.index(want)
        direction, j, ops = _slide_ops([s.obj for s in st], t)
        after = st[t:] + st[:t]
        steps.append(Slide(x, direction, j, len(st) - j, ops, st, after))
        return after

    def _emit_leaf(v: int, req: Dart | None) -> State:
        deg = d.degree(v)
        if req is None:
            bnd = cycles[v]
            s = bnd[0][1] if bnd else 0
        else:
            s = req[1]
        darts = [(v, (s - i) % deg) for i in range(deg)]
        word = label_word(darts)
        if deg == 4:
            over = darts[0][1] in (1, 3)
            kind = 1 if over else 2
            objects = (word[2].obj, word[1].obj)  # (U, V)
        else:
            kind = 3 if d.vertex_sign(v) > 0 else 4
            objects = (word[1].obj,)
        cur = list(word)
        caps = []
        changed = True
        while changed:
            changed = False
            for i in range(len(cur) - 1):
                if d.mate(cur[i].dart) == cur[i + 1].dart:
                    caps.append((i, cur[i].obj))
                    cur = cur[:i] + cur[i + 2:]
                    changed = True
                    break
        after = tuple(cur)
        steps.append(LeafAtom(v, v, kind, objects, word, tuple(caps), after))
        return after

    root = tree.root
    final = emit(root, None)
    if final:
        raise PlanError("root state is not empty")
    plan = ContractionPlan(steps, root, cw_eff, cw, cat.max_dim, col, writhe(d))
    plan.n_slides = sum(isinstance(s, Slide) for s in steps)
    return plan


# -- validation -------------------------------------------------------------

def validate_plan(plan: ContractionPlan, cat: RibbonData | None = None) -> list[str]:
    """Replay ``plan`` on boundary labels; raises :class:`PlanError` at the first bad step."""
    live: dict[int, State] = {}
    log = []
    for idx, step in enumerate(plan.steps):
        try:
            if isinstance(step, LeafAtom):
                if step.node in live:
                    raise PlanError(f"node {step.node} produced twice")
                w = [s.obj for s in step.word]
                if cat is not None:
                    if step.kind in (1, 2):
                        u, v = step.objects
                        want = [cat.dual(u), v, u, cat.dual(v)]
                    else:
                        want = [cat.dual(step.objects[0]), step.objects[0]]
                    if w != want:
                        raise PlanError(f"leaf labels {w} do not match kind {step.kind} {want}")
                cur = list(step.word)
                for pos, obj in step.caps:
                    pair = [cur[pos].obj, cur[pos + 1].obj]
                    if cat is not None and pair != [obj, cat.dual(obj)]:
                        raise PlanError(f"loop cap on {pair}")
                    cur = cur[:pos] + cur[pos + 2:]
                if tuple(cur) != step.after:
                    raise PlanError("leaf output does not match recorded state")
                live[step.node] = step.after
            elif isinstance(step, Slide):
                cur = live.get(step.node)
                if cur is None:
                    raise PlanError(f"slide on missing node {step.node}")
                if cur != step.before:
                    raise PlanError(f"slide input mismatch on node {step.node}")
                labels = apply_ops_to_labels([s.obj for s in cur], step.ops)
                if labels != [s.obj for s in step.after]:
                    raise PlanError(f"slide output object mismatch on node {step.node}: "
                                    f"{labels} vs {[s.obj for s in step.after]}")
                if sorted(step.after, key=lambda s: s.dart) != sorted(cur, key=lambda s: s.dart):
                    raise PlanError("slide changed the strand set")
                live[step.node] = step.after
            elif isinstance(step, Merge):
                left, right = live.pop(step.left, None), live.pop(step.right, None)
                if left is None or right is None:
                    raise PlanError(f"merge at node {step.node} before its children exist")
                if left != step.left_state or right != step.right_state:
                    raise PlanError(f"merge input mismatch at node {step.node}")
                k = step.k
                us, ps = left[len(left) - k:], right[:k]
                for u, p in zip(us, reversed(ps)):
                    if u.seg != p.seg:
                        raise PlanError(f"merge at node {step.node}: strands {u.seg}/{p.seg} do not meet")
                    if cat is not None and p.obj != cat.dual(u.obj):
                        raise PlanError(f"merge at node {step.node}: object mismatch {u.obj}/{p.obj}")
                if left[:len(left) - k] + right[k:] != step.after:
                    raise PlanError("merge output does not match recorded state")
                want = SMALL if 2 * k <= plan.congestion else LARGE
                if step.case != want:
                    raise PlanError(f"merge at node {step.node} should be {want}")
                live[step.node] = step.after
            else:
                raise PlanError(f"unknown step {step!r}")
        except PlanError as exc:
            raise PlanError(f"step {idx}: {exc}", idx) from None
        log.append(f"step {idx} ok")
    if set(live) != {plan.root} or live[plan.root]:
        raise PlanError("plan does not end in a single empty state")
    return log


# -- cost -------------------------------------------------------------------

@dataclass
class _MatStat:
    lo: int
    hi: int
    rowmass: float  # max over rows of the sum of entry L1 norms
    nnz: int


def _mat_stat(arr) -> _MatStat:
    lo = hi = None
    rowmass = 0.0
    nnz = 0
    for row in arr:
        mass = 0
        for p in row:
            if not p.is_zero():
                nnz += 1
                mass += sum(abs(c) for _, c in p.items())
                lo = p.min_exp if lo is None else min(lo, p.min_exp)
                hi = p.max_exp if hi is None else max(hi, p.max_exp)
        rowmass = max(rowmass, mass)
    return _MatStat(lo or 0, hi or 0, rowmass, nnz)


class _Tracker:
    def __init__(self, cat: RibbonData):
        self.cat = cat
        self.cache: dict = {}

    def stat(self, key):
        if key not in self.cache:
            c = self.cat
            kind = key[0]
            arr = {
                "b": lambda: c.coeval[key[1]],
                "d": lambda: c.eval[key[1]],
                "dm": lambda: c.eval[key[1]].reshape(c.dim(key[1]), c.dim(key[1])),
                "t": lambda: c.twist[key[1]],
                "ti": lambda: c.twist_inv[key[1]],
                "c": lambda: c.braiding[(key[1], key[2])],
                "ci": lambda: c.braiding_inv[(key[1], key[2])],
            }[kind]()
            self.cache[key] = _mat_stat(arr)
        return self.cache[key]


@dataclass
class _VecBound:
    lo: int
    hi: int
    bits: float
    length: int

    def apply(self, s: _MatStat, new_len: int):
        return _VecBound(self.lo + s.lo, self.hi + s.hi,
                         self.bits + (math.log2(s.rowmass) if s.rowmass > 0 else 0), new_len)


def estimate_cost(plan: ContractionPlan, cat: RibbonData) -> CostEstimate:
    """Degree, coefficient-size, length and operation bounds for executing ``plan``."""
    tr = _Tracker(cat)
    dim = cat.dim
    vecs: dict[int, _VecBound] = {}
    peak, ops, max_abc = 1, 0, 0

    def size(st) -> int:
        return math.prod(dim(s.obj) for s in st)

    for step in plan.steps:
        if isinstance(step, LeafAtom):
            vb = _VecBound(0, 0, 0.0, 1)
            if step.kind in (1, 2):
                u, v = step.objects
                for key in (("b", cat.dual(u)), ("b", v)):
                    s = tr.stat(key)
                    vb = _VecBound(vb.lo + s.lo, vb.hi + s.hi,
                                   vb.bits + math.log2(max(s.rowmass, 1)), vb.length * dim(key[1]) ** 2)
                    ops += dim(key[1]) ** 2 * vb.length
                s = tr.stat(("c", u, v) if step.kind == 1 else ("ci", v, u))
                ops += s.nnz * dim(u) * dim(v)
                vb = vb.apply(s, vb.length)
            else:
                v = step.objects[0]
                s = tr.stat(("b", cat.dual(v)))
                vb = _VecBound(s.lo, s.hi, math.log2(max(s.rowmass, 1)), dim(v) ** 2)
                t = tr.stat(("t" if step.kind == 3 else "ti", v))
                ops += dim(v) ** 2 + t.nnz * dim(v)
                vb = vb.apply(t, vb.length)
            peak = max(peak, vb.length)
            cur = [s.obj for s in step.word]
            for pos, obj in step.caps:
                s = tr.stat(("d", cat.dual(obj)))
                new_len = vb.length // (dim(obj) ** 2)
                ops += s.nnz * new_len
                vb = vb.apply(s, new_len)
                cur = cur[:pos] + cur[pos + 2:]
            vecs[step.node] = vb
        elif isinstance(step, Slide):
            vb = vecs[step.node]
            labels = [s.obj for s in step.before]
            for op in step.ops:
                kind, pos = op[0], op[1]
                if kind in ("theta", "theta_inv"):
                    s = tr.stat(("t" if kind == "theta" else "ti", op[2]))
                    ops += s.nnz * vb.length // dim(op[2])
                else:
                    a, b = op[2], op[3]
                    s = tr.stat(("c" if kind == "braid" else "ci", a, b))
                    ops += s.nnz * vb.length // (dim(a) * dim(b))
                vb = vb.apply(s, vb.length)
                labels = apply_ops_to_labels(labels, [op])
            vecs[step.node] = vb
        else:
            v1, v2 = vecs.pop(step.left), vecs.pop(step.right)
            k = step.k
            U = [s.obj for s in step.left_state[len(step.left_state) - k:]]
            W = step.right_state[k:]
            X = step.left_state[:len(step.left_state) - k]
            a, c, x = size(step.left_state[len(step.left_state) - k:]), size(W), size(X)
            if step.case == SMALL:
                mass, lo, hi = 1.0, 0, 0
                for o in U:
                    s = tr.stat(("dm", cat.dual(o)))
                    mass *= max(s.rowmass, 1)
                    lo, hi = lo + s.lo, hi + s.hi
                h = _VecBound(v2.lo + lo, v2.hi + hi, v2.bits + math.log2(mass), a * c)
                abc = a * a * c
                ops += a * a + abc
                peak = max(peak, a * a)
            else:
                mass, lo, hi = 1.0, 0, 0
                for o in U:
                    s = tr.stat(("dm", cat.dual(o)))
                    mass *= max(s.rowmass, 1)
                    lo, hi = lo + s.lo, hi + s.hi
                for st in W:
                    s = tr.stat(("dm", st.obj))
                    mass *= max(s.rowmass, 1)
                    lo, hi = lo + s.lo, hi + s.hi
                    s = tr.stat(("b", st.obj))
                    mass *= max(s.rowmass, 1)
                    lo, hi = lo + s.lo, hi + s.hi
                h = _VecBound(v2.lo + lo, v2.hi + hi, v2.bits + math.log2(mass), a * c)
                abc = c * c * a
                ops += v2.length * sum(dim(o) for o in U + [s.obj for s in W]) + c * c + abc
                peak = max(peak, c * c)
            span = h.hi - h.lo + 1
            out = _VecBound(v1.lo + h.lo, v1.hi + h.hi,
                            v1.bits + h.bits + math.log2(max(a, 1)) + math.log2(span),
                            x * c)
            ops += x * a * c
            max_abc = max(max_abc, abc)
            vecs[step.node] = out
            peak = max(peak, v1.length, v2.length, out.length)
    final = vecs.get(plan.root, _VecBound(0, 0, 0.0, 1))
    return CostEstimate(peak, ops, final.hi, final.lo, final.bits, max_abc)
