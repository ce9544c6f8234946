"""Execute contraction plans and compute link invariants."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

from qli.carving import (
    EXACT_LIMIT,
    CarvingTree,
    NotRealizable,
    exact_carving,
    heuristic_carving,
    realizable_roots,
    realize,
    sweep_carving,
)
from qli.category import CategoryMatrices, RibbonData, dual_morphism
from qli.diagram import LinkDiagram, split_components, writhe
from qli.kernels import (
    ExactBackend,
    MorphVec,
    eval_compose,
    mid_compose,
    partial5,
    partial6,
    partial7,
)
from qli.planner import (
    LARGE,
    SMALL,
    ContractionPlan,
    LeafAtom,
    Merge,
    Slide,
    build_plan,
    validate_plan,
)
from qli.ring import LaurentPoly

__all__ = [
    "Stats",
    "BoundViolation",
    "leaf_init",
    "apply_slide",
    "merge_small",
    "merge_large",
    "execute",
    "framing_normalize",
    "choose_tree",
    "prepare",
    "compute_invariant",
    "loop_value",
]

STRATEGIES = ("auto", "exact", "heuristic", "sweep")


class BoundViolation(AssertionError):
    pass


@dataclass
class Stats:
    congestion: int = 0
    peak_len: int = 1
    scalar_ops: int = 0
    merges_small: int = 0
    merges_large: int = 0
    slides: int = 0
    slide_strands: int = 0
    max_abc: int = 0

    def absorb(self, other: Stats):
        self.congestion = max(self.congestion, other.congestion)
        self.peak_len = max(self.peak_len, other.peak_len)
        self.max_abc = max(self.max_abc, other.max_abc)
        for f in ("scalar_ops", "merges_small", "merges_large", "slides", "slide_strands"):
            setattr(self, f, getattr(self, f) + getattr(other, f))

    def to_json(self) -> dict:
        return asdict(self)


def _dims(mats: CategoryMatrices, objs) -> list[int]:
    return [mats.dim(o) for o in objs]


def _place(v: MorphVec, M: MorphVec, dims: list[int], pos: int, width: int) -> MorphVec:
    a = math.prod(dims[:pos])
    c = math.prod(dims[pos + width:])
    return mid_compose(v, M, a, M.nrows, M.ncols, c)


def _one(bk) -> MorphVec:
    return MorphVec((), (), [bk.one], bk)


# -- steps ------------------------------------------------------------------

def leaf_init(step: LeafAtom, mats: CategoryMatrices) -> MorphVec:
    """Column vector of a single crossing or twist, with its self-loops capped."""
    cat = mats.cat
    if step.kind in (1, 2):
        u, v = step.objects
        vec = mats.coeval(cat.dual(u))
        vec = MorphVec(vec.rows, (), list(vec.data), vec.backend)
        bv = mats.coeval(v)
        vec = mid_compose(vec, bv, len(vec.data), bv.nrows, 1, 1)
        dims = _dims(mats, [cat.dual(u), u, v, cat.dual(v)])
        M = mats.braid(u, v) if step.kind == 1 else mats.braid(v, u, inverse=True)
        vec = _place(vec, M, dims, 1, 2)
    else:
        (v,) = step.objects
        b = mats.coeval(cat.dual(v))
        vec = MorphVec(b.rows, (), list(b.data), b.backend)
        dims = _dims(mats, [cat.dual(v), v])
        vec = _place(vec, mats.theta(v, inverse=step.kind == 4), dims, 1, 1)
    labels = [s.obj for s in step.word]
    for pos, obj in step.caps:
        dims = _dims(mats, labels)
        vec = _place(vec, mats.eval(cat.dual(obj)), dims, pos, 2)
        labels = labels[:pos] + labels[pos + 2:]
    return vec


def apply_ops(vec: MorphVec, labels: list[str], ops, mats: CategoryMatrices) -> MorphVec:
    labels = list(labels)
    for op in ops:
        kind, pos = op[0], op[1]
        dims = _dims(mats, labels)
        if kind in ("theta", "theta_inv"):
            vec = _place(vec, mats.theta(op[2], inverse=kind == "theta_inv"), dims, pos, 1)
        elif kind == "braid":
            vec = _place(vec, mats.braid(op[2], op[3]), dims, pos, 2)
            labels[pos], labels[pos + 1] = op[3], op[2]
        elif kind == "braid_inv":
            vec = _place(vec, mats.braid(op[2], op[3], inverse=True), dims, pos, 2)
            labels[pos], labels[pos + 1] = op[2], op[3]
        else:
            raise ValueError(f"unknown operation {kind!r}")
    return vec


def apply_slide(vec: MorphVec, step: Slide, mats: CategoryMatrices) -> MorphVec:
    """Rotate the coupon's bullet by applying the slide's twists and braidings."""
    return apply_ops(vec, [s.obj for s in step.before], step.ops, mats)


def _split(step: Merge, mats: CategoryMatrices):
    k = step.k
    left, right = step.left_state, step.right_state
    U = [s.obj for s in left[len(left) - k:]]
    W = [s.obj for s in right[k:]]
    P = [s.obj for s in right[:k]]
    return U, P, W


def merge_small(v1: MorphVec, v2: MorphVec, step: Merge, mats: CategoryMatrices) -> MorphVec:
    """Contract the bridge with nested evaluations on the bridged block."""
    cat = mats.cat
    U, P, W = _split(step, mats)
    dblk = _one(v1.backend)
    for u in reversed(U):
        dblk = eval_compose(mats.eval(cat.dual(u)), dblk.as_column())
    a, b, c = math.prod(_dims(mats, U)), math.prod(_dims(mats, P)), math.prod(_dims(mats, W))
    g2 = MorphVec((b, c), (), v2.data, v2.backend)
    h = partial5(g2, dblk, a, b, c)
    g1 = MorphVec((len(v1.data) // a, a), (), v1.data, v1.backend)
    return partial7(g1, h)


def merge_large(v1: MorphVec, v2: MorphVec, step: Merge, mats: CategoryMatrices) -> MorphVec:
    """Contract the bridge through the dual of ``g2`` and co-evaluations on ``W``."""
    cat = mats.cat
    U, P, W = _split(step, mats)
    bk = v1.backend
    g2 = MorphVec(tuple(_dims(mats, P + W)), (), v2.data, bk)
    g2s = dual_morphism(g2, [], P + W, mats)  # row over [W* reversed, U]
    bblk = _one(bk)
    for ell, w in enumerate(W):
        inner = math.prod(_dims(mats, W[:ell]))
        bw = mats.coeval(w)
        bblk = mid_compose(MorphVec(bblk.rows, (), bblk.data, bk), bw, inner, bw.nrows, 1, inner)
    a, c = math.prod(_dims(mats, W)), math.prod(_dims(mats, U))
    h = partial6(MorphVec((a, a), (), bblk.data, bk), g2s, a, a, c)
    g1 = MorphVec((len(v1.data) // c, c), (), v1.data, bk)
    return partial7(g1, h)


def execute(plan: ContractionPlan, cat: RibbonData, backend=None, *,
            check_bounds: bool = True, force_case: str | None = None,
            mats: CategoryMatrices | None = None):
    """Run ``plan``; returns ``(scalar, Stats)``.

    ``force_case`` overrides the small/large choice (testing only).
    """
    bk = backend or ExactBackend(cat.variable)
    mats = mats or CategoryMatrices(cat, bk)
    N = cat.max_dim
    cw = plan.cw
    len_cap = N ** cw
    abc_cap = N ** math.ceil(3 * cw / 2)
    stats = Stats(congestion=plan.congestion)
    ops0 = bk.ops
    live: dict[int, MorphVec] = {}

    def check_len(v: MorphVec, where: str):
        stats.peak_len = max(stats.peak_len, len(v.data))
        if check_bounds and len(v.data) > len_cap:
            raise BoundViolation(f"{where}: length {len(v.data)} exceeds N^cw = {len_cap}")

    for step in plan.steps:
        if isinstance(step, LeafAtom):
            v = leaf_init(step, mats)
            check_len(v, f"leaf {step.node}")
            live[step.node] = v
        elif isinstance(step, Slide):
            live[step.node] = apply_slide(live[step.node], step, mats)
            stats.slides += 1
            stats.slide_strands += step.j
        else:
            v1, v2 = live.pop(step.left), live.pop(step.right)
            U, P, W = _split(step, mats)
            case = force_case or step.case
            if case == SMALL:
                a = math.prod(_dims(mats, U))
                abc = a * a * math.prod(_dims(mats, W))
                stats.merges_small += 1
                out = merge_small(v1, v2, step, mats)
            else:
                c = math.prod(_dims(mats, W))
                abc = c * c * math.prod(_dims(mats, U))
                stats.merges_large += 1
                out = merge_large(v1, v2, step, mats)
            stats.max_abc = max(stats.max_abc, abc)
            if check_bounds and force_case is None and abc > abc_cap:
                raise BoundViolation(f"merge {step.node}: abc = {abc} exceeds {abc_cap}")
            check_len(out, f"merge {step.node}")
            live[step.node] = MorphVec((len(out.data),), (), out.data, bk)
    final = live[plan.root]
    if len(final.data) != 1:
        raise BoundViolation("final vector is not a scalar")
    stats.scalar_ops = bk.ops - ops0
    return final.data[0], stats


def framing_normalize(s: LaurentPoly, w: int, cat: RibbonData) -> LaurentPoly:
    """``s * phi^(-w)`` for the category's framing unit ``phi``."""
    return s * cat.framing_unit ** (-w)


def loop_value(cat: RibbonData, obj: str | None = None) -> LaurentPoly:
    """Value of a crossing-free loop coloured ``obj``."""
    obj = obj or cat.default_object
    val = cat.eval[obj].dot(cat.coeval[cat.dual(obj)])[0, 0]
    return LaurentPoly.coerce(val, cat.variable)


# -- pipeline ---------------------------------------------------------------

def choose_tree(d: LinkDiagram, strategy: str = "auto") -> tuple[CarvingTree, object]:
    """Tree and realization; ``auto`` tries exact, then heuristic, then sweep."""
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown decomposition {strategy!r}")
    chain = {
        "auto": ["exact", "heuristic", "sweep"] if d.n_vertices <= EXACT_LIMIT else ["heuristic", "sweep"],
        "exact": ["exact", "sweep"],
        "heuristic": ["heuristic", "sweep"],
        "sweep": ["sweep"],
    }[strategy]
    makers = {"exact": exact_carving, "heuristic": heuristic_carving, "sweep": sweep_carving}
    err = None
    for name in chain:
        try:
            t = makers[name](d)
            return t, realize(t, d)
        except NotRealizable as exc:
            err = exc
    raise err


@dataclass
class Prepared:
    diagram: LinkDiagram
    tree: CarvingTree
    plan: ContractionPlan
    fallback: bool = False


def prepare(d: LinkDiagram, cat: RibbonData, colouring=None, strategy: str = "auto",
            root_edge: int | None = None) -> list[Prepared]:
    """Split into connected pieces and build a validated plan for each."""
    out = []
    for piece in split_components(d) if d.n_vertices else []:
        tree, _ = choose_tree(piece, strategy)
        fallback = strategy not in ("auto", tree.strategy)
        if root_edge is not None and tree.edges:
            roots = realizable_roots(tree, piece)
            tree = tree.reroot(roots[root_edge % len(roots)])
        real = realize(tree, piece)
        plan = build_plan(piece, tree, real, cat, _piece_colouring(d, piece, colouring))
        validate_plan(plan, cat)
        out.append(Prepared(piece, tree, plan, fallback))
    return out


def _piece_colouring(d: LinkDiagram, piece: LinkDiagram, colouring):
    """Translate a component colouring of ``d`` to ``piece``'s component numbering."""
    if not colouring:
        return None
    out = {}
    for i, arcs in piece.component_arcs.items():
        orig = next(c for c, a0 in d.component_arcs.items() if arcs[0] in a0)
        if orig in colouring:
            out[i] = colouring[orig]
    return out


@dataclass
class Result:
    value: LaurentPoly
    raw: LaurentPoly
    stats: Stats
    writhe: int
    strategy: list[str] = field(default_factory=list)


def compute_invariant(d: LinkDiagram, cat: RibbonData, colouring=None, *, strategy: str = "auto",
                      normalize: bool = False, root_edge: int | None = None,
                      prepared: list[Prepared] | None = None) -> Result:
    """Exact invariant of ``d``; pieces of a split diagram are multiplied."""
    prepared = prepared if prepared is not None else prepare(d, cat, colouring, strategy, root_edge)
    total = LaurentPoly.constant(1, cat.variable)
    stats = Stats()
    for p in prepared:
        val, st = execute(p.plan, cat)
        total = total * val
        stats.absorb(st)
    w = writhe(d)
    value = framing_normalize(total, w, cat) if normalize else total
    return Result(value, total, stats, w, [p.tree.strategy for p in prepared])
