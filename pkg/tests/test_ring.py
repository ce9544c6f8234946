import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qli.ring import (
    LaurentPoly,
    Residue,
    VariableMismatch,
    crt_reconstruct,
    is_prime,
    lagrange_interpolate,
    lp_add,
    lp_eval,
    lp_mul,
    next_prime,
)


def P(s, var="v"):
    return LaurentPoly.parse(s, var)


polys = st.dictionaries(st.integers(-8, 8), st.integers(-10**6, 10**6), max_size=6).map(
    lambda t: LaurentPoly(t, "v"))


def test_add_examples():
    assert lp_add(P("v + 1"), P("-1")) == P("v")
    p = P("3*v^2 - v^-1")
    assert lp_add(p, LaurentPoly({}, "v")) == p
    assert lp_add(P("v^-1"), P("v^-1")) == P("2*v^-1")


def test_mul_examples():
    assert lp_mul(P("v + v^-1"), P("v - v^-1")) == P("v^2 - v^-2")
    p = P("-v^4 + v^3 + v^-1")
    assert lp_mul(p, LaurentPoly.constant(1, "v")) == p
    assert lp_mul(P("v^3"), P("v^-3")) == 1


def test_eval_examples():
    p = P("v^2 + 1")
    assert lp_eval(p, 3) == 10
    assert lp_eval(LaurentPoly.constant(1, "v"), 12345) == 1
    r = lp_eval(p, 3, 7)
    assert isinstance(r, Residue) and r.value == 3 and r.modulus == 7


def test_eval_negative_exponent():
    assert P("v^-1").eval(2) == pytest.approx(0.5)
    assert P("v^-1").eval(2, 7) == 4  # 2 * 4 = 8 = 1 mod 7
    with pytest.raises(ZeroDivisionError):
        P("v^-2").eval(0)


def test_crt_examples():
    assert crt_reconstruct([Residue(1, 3), Residue(3, 7)]) == 10
    assert crt_reconstruct([Residue(2, 3), Residue(2, 5)]) == 2
    assert crt_reconstruct([Residue(4, 11)]) == 4
    assert crt_reconstruct([Residue(10, 11)]) == -1
    with pytest.raises(ValueError):
        crt_reconstruct([Residue(1, 6), Residue(1, 4)])


def test_lagrange_examples():
    assert lagrange_interpolate([(0, 1), (1, 2), (2, 5)]) == [1, 0, 1]
    assert lagrange_interpolate([(0, 7)]) == [7]
    assert lagrange_interpolate([(0, 0), (1, 1), (2, 2)]) == [0, 1]
    with pytest.raises(ValueError):
        lagrange_interpolate([(0, 0), (1, 1), (2, 1)])  # 1/2 coefficients
    with pytest.raises(ValueError):
        lagrange_interpolate([(1, 0), (1, 1)])


def test_rendering():
    p = LaurentPoly({4: -1, 3: 1, -1: 1}, "v")
    assert str(p) == "-v^4 + v^3 + v^-1"
    assert str(LaurentPoly({}, "v")) == "0"
    assert str(LaurentPoly({1: 2, 0: -3}, "A")) == "2*A - 3"


@pytest.mark.parametrize("text", ["v^", "v + + v", "2 v", "", "v^x"])
def test_parse_rejects(text):
    with pytest.raises(ValueError):
        LaurentPoly.parse(text, "v")


def test_parse_variable_mismatch():
    with pytest.raises(VariableMismatch):
        LaurentPoly.parse("A + q")
    with pytest.raises(VariableMismatch):
        lp_add(P("v"), P("A", "A"))


@given(polys)
def test_parse_render_roundtrip(p):
    assert LaurentPoly.parse(str(p), "v") == p


def test_ring_laws_randomized():
    rng = random.Random(7)

    def rand():
        return LaurentPoly({rng.randint(-8, 8): rng.randint(-10**6, 10**6)
                            for _ in range(rng.randint(0, 5))}, "v")

    for _ in range(1000):
        a, b, c = rand(), rand(), rand()
        assert (a + b) + c == a + (b + c)
        assert (a * b) * c == a * (b * c)
        assert a + b == b + a and a * b == b * a
        assert a * (b + c) == a * b + a * c


@given(polys, polys, st.integers(1, 50))
def test_eval_is_homomorphism(p, q, x):
    assert (p * q).eval(x) == p.eval(x) * q.eval(x)
    assert (p + q).eval(x) == p.eval(x) + q.eval(x)
    m = 1_000_003
    assert (p * q).eval(x, m) == p.eval(x, m) * q.eval(x, m) % m


@given(polys, polys)
def test_exact_div_roundtrip(p, q):
    if q.is_zero():
        return
    assert (p * q).exact_div(q) == p


def test_exact_div_rejects():
    with pytest.raises(ValueError):
        P("v^2 + 1").exact_div(P("v + 1"))
    with pytest.raises(ZeroDivisionError):
        P("v").exact_div(LaurentPoly({}, "v"))


def test_unit_inverse_only():
    assert P("-v^3") ** -1 == P("-v^-3")
    with pytest.raises(ValueError):
        P("v + 1") ** -1


@settings(max_examples=100)
@given(st.lists(st.sampled_from([3, 5, 7, 11, 13, 17, 19, 23, 1_000_003, 2**61 - 1]),
                min_size=1, max_size=5, unique=True), st.data())
def test_crt_roundtrip(primes, data):
    M = 1
    for p in primes:
        M *= p
    x = data.draw(st.integers(-(M - 1) // 2, M // 2))
    assert crt_reconstruct([Residue(x, p) for p in primes]) == x


@settings(max_examples=40)
@given(st.lists(st.integers(-10**9, 10**9), min_size=1, max_size=33))
def test_interpolation_roundtrip(coeffs):
    while len(coeffs) > 1 and coeffs[-1] == 0:
        coeffs = coeffs[:-1]
    p = LaurentPoly(dict(enumerate(coeffs)), "x")
    pts = [(i, p.eval(i)) for i in range(len(coeffs))]
    assert lagrange_interpolate(pts) == coeffs


def test_primes():
    small = [n for n in range(200) if is_prime(n)]
    sieve = [n for n in range(2, 200) if all(n % d for d in range(2, n))]
    assert small == sieve
    assert is_prime(2**61 - 1)
    assert not is_prime(3_215_031_751)  # strong pseudoprime to bases 2, 3, 5, 7


def test_primes_against_sympy():
    sympy = pytest.importorskip("sympy")
    rng = random.Random(11)
    assert next_prime(2**61) == sympy.nextprime(2**61 - 1)
    for _ in range(300):
        n = rng.randrange(2**40, 2**64)
        assert is_prime(n) == sympy.isprime(n)
