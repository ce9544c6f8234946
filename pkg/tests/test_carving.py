import pytest

from qli.carving import (
    ROOT,
    CarvingTree,
    cut_weight,
    exact_carving,
    heuristic_carving,
    realizable_roots,
    realize,
    sweep_carving,
)
from qli.corpus import NAMED, torus2
from qli.diagram import parse_pd, split_components
from qli.engine import choose_tree

MAKERS = {"exact": exact_carving, "heuristic": heuristic_carving, "sweep": sweep_carving}


def rooted_trees(leaves):
    """Every rooted binary tree on ``leaves`` as nested tuples."""
    leaves = list(leaves)
    if len(leaves) == 1:
        yield leaves[0]
        return
    first, rest = leaves[0], leaves[1:]
    n = len(rest)
    for mask in range(1 << n):
        left = [first] + [rest[i] for i in range(n) if mask >> i & 1]
        right = [rest[i] for i in range(n) if not mask >> i & 1]
        if not right:
            continue
        for a in rooted_trees(left):
            for b in rooted_trees(right):
                yield (a, b)


def brute_force_congestion(d):
    if d.n_vertices == 1:
        return 0  # every edge is a self-loop
    best = None
    for nested in rooted_trees(range(d.n_vertices)):
        t = CarvingTree.from_nested(d, nested)
        if not realizable_roots(t, d):
            continue
        c = t.congestion()
        best = c if best is None else min(best, c)
    return best


def test_leaf_weights():
    d = parse_pd(NAMED["twisted_hopf"])
    t = sweep_carving(d)
    for v in range(d.n_vertices):
        assert t.edge_weight_above(v) == d.degree(v)


@pytest.mark.parametrize("name, cng", [
    ("left_trefoil", 4), ("hopf", 4), ("figure_eight", 4), ("torus_2_6", 4), ("unknot", 2),
])
def test_exact_congestion_examples(name, cng):
    assert exact_carving(parse_pd(NAMED[name])).congestion() == cng


@pytest.mark.parametrize("name", ["left_trefoil", "hopf", "figure_eight", "torus_2_5",
                                  "twisted_hopf", "torus_2_6", "kinked_unknot"])
def test_exact_matches_brute_force(name):
    d = parse_pd(NAMED[name])
    t = exact_carving(d)
    realize(t, d)
    assert t.congestion() == brute_force_congestion(d)


def test_heuristic_and_sweep_examples():
    tre = parse_pd(NAMED["left_trefoil"])
    assert heuristic_carving(tre).congestion() == 4
    assert heuristic_carving(parse_pd(torus2(6))).congestion() == 4
    assert sweep_carving(tre).congestion() == 4
    assert sweep_carving(parse_pd(NAMED["hopf"])).congestion() == 4
    assert sweep_carving(parse_pd("T[+,1] T[-,1]")).congestion() == 2


def test_sweep_is_caterpillar():
    d = parse_pd(torus2(7))
    t = sweep_carving(d)
    for x in t.postorder():
        kids = t.children(x)
        if kids:
            assert any(t.is_leaf(k) for k in kids)


def test_exact_size_limit():
    with pytest.raises(ValueError):
        exact_carving(parse_pd(torus2(13)))


def check_realization(t, d, real):
    """Boundary darts, contiguity of bridges and concatenation, from first principles."""
    sets = t.leafsets
    for x, S in sets.items():
        if x == ROOT:
            continue
        cut = {(v, s) for v in S for s in range(d.degree(v)) if d.mate((v, s))[0] not in S}
        assert set(real.boundary[x]) == cut
        assert len(real.boundary[x]) == cut_weight(d, S) == t.edge_weight_above(x)
    for x in t.postorder():
        kids = t.children(x)
        if not kids:
            continue
        pieces = []
        for k in kids:
            cyc = real.boundary[k]
            br = real.bridges[k]
            assert br == {dt for dt in cyc if d.mate(dt)[0] in sets[kids[0] if k == kids[1] else kids[1]]}
            flags = [dt in br for dt in cyc]
            changes = sum(flags[i] != flags[i - 1] for i in range(len(flags)))
            assert changes <= 2, "bridge block not contiguous"
            pieces.append([dt for dt in cyc if dt not in br])
        if x != ROOT:
            parent = real.boundary[x]
            assert sorted(parent) == sorted(pieces[0] + pieces[1])


@pytest.mark.parametrize("strategy", ["exact", "heuristic", "sweep"])
def test_realizations_on_corpus(diagrams, strategy):
    for name, d in diagrams.items():
        for piece in split_components(d):
            t, real = choose_tree(piece, strategy)
            if piece.n_vertices > 1:
                assert t.congestion() >= (4 if piece.crossings else 2)
            check_realization(t, piece, real)
            for e in realizable_roots(t, piece)[:3]:
                t2 = t.reroot(e)
                check_realization(t2, piece, realize(t2, piece))


def test_root_choice_minimum_weight(diagrams):
    for d in diagrams.values():
        for piece in split_components(d):
            t = exact_carving(piece) if piece.n_vertices <= 12 else heuristic_carving(piece)
            roots = realizable_roots(t, piece)
            if roots:
                assert t.root_edge == roots[0]
                assert t.weights[roots[0]] == min(t.weights[e] for e in roots)


def test_leaf_count_and_text(diagrams):
    d = diagrams["figure_eight"]
    t = exact_carving(d)
    leaves = [x for x in t.postorder() if t.is_leaf(x)]
    assert sorted(leaves) == list(range(d.n_vertices))
    text = t.to_text(d)
    assert text.startswith("root") and text.count("crossing") == 4


def test_cut_vertex_diagram_has_a_tree():
    # the twist sits on a kink loop, so its crossing is a cut vertex
    d = parse_pd("X[1,6,2,1] X[5,3,6,2] X[3,4,4,5] T[-,3] T[+,1]")
    for name, maker in MAKERS.items():
        t = maker(d)
        check_realization(t, d, realize(t, d))
