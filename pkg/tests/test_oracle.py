import pytest

from qli.corpus import NAMED, torus2
from qli.diagram import LinkDiagram, mirror, parse_pd, writhe
from qli.oracle import (
    BRACKET_LIMIT,
    jones_from_bracket,
    kauffman_bracket,
    kauffman_unnormalized,
    morse_evaluate,
)
from qli.ring import LaurentPoly


def A(e):
    return LaurentPoly.monomial(e, "A")


def t(e):
    return LaurentPoly.monomial(e, "t")


def jones(name):
    d = parse_pd(NAMED[name])
    return jones_from_bracket(kauffman_bracket(d), writhe(d))


def test_unknot_bracket():
    kinked = parse_pd("X[1,1,2,2]")
    assert kauffman_bracket(kinked) == -A(3 * writhe(kinked))
    assert kauffman_bracket(LinkDiagram.bare_unknot()) == 1
    assert kauffman_bracket(parse_pd("T[+,1] T[-,1]")) == 1


def test_hopf_bracket():
    assert kauffman_bracket(parse_pd(NAMED["hopf"])) == -A(4) - A(-4)


def test_known_jones_polynomials():
    assert jones("left_trefoil") == -t(-4) + t(-3) + t(-1)
    assert jones("figure_eight") == t(2) - t(1) + 1 - t(-1) + t(-2)


def test_jones_rejects_non_multiple_of_four():
    with pytest.raises(ValueError):
        jones_from_bracket(A(1) + A(-3), 0)


def test_mirror_bracket(diagrams):
    for name in ("left_trefoil", "figure_eight", "hopf"):
        d = diagrams[name]
        assert kauffman_bracket(mirror(d)) == kauffman_bracket(d).mirror()


def test_morse_matches_kauffman(diagrams, sl2):
    for name, d in diagrams.items():
        ref = kauffman_unnormalized(d)
        assert morse_evaluate(d, sl2) == ref, name
        assert morse_evaluate(d, sl2, reverse=True) == ref, name


def test_morse_trivial_category(diagrams, trivial):
    for d in diagrams.values():
        assert morse_evaluate(d, trivial) == 1


def test_bracket_size_cap():
    with pytest.raises(ValueError):
        kauffman_bracket(parse_pd(torus2(BRACKET_LIMIT + 1)))
