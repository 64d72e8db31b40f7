import math
import random

import pytest

from zresolve.errors import ParseError, RingMismatchError
from zresolve.poly import DEGREVLEX, LEX, Poly, block_order, parse_poly


R2 = ("x", "y")


def p(text, ring=R2):
    return parse_poly(text, ring)


def test_difference_of_squares():
    assert p("x + y") * p("x - y") == p("x^2 - y^2")


def test_additive_inverse_and_scale():
    f = p("3*x^2 - 5*y + 7")
    assert (f + f.scale(-1)).is_zero()
    assert p("2*x").scale(3) == p("6*x")


def test_ring_mismatch_raises():
    with pytest.raises(RingMismatchError):
        p("x") + parse_poly("x", ("x", "z"))


def test_canonical_no_zero_terms():
    f = p("x") + p("-x") + p("y")
    assert list(f.terms.values()) == [1]
    assert f + Poly.zero(R2) == f


def test_order_at_origin():
    f = parse_poly("12 - u*v^2", ("u", "v"))
    assert f.order_at_origin() == 0  # nonzero constant term
    assert Poly.zero(R2).order_at_origin() == math.inf
    assert p("x^2 + x*y^3").order_at_origin(["x"]) == 1


def test_order_at_prime_rewrites():
    # 12 - u*v^2 has order 1 at <3,u,v> and order 2 at <2,u,v>
    f = parse_poly("12 - u*v^2", ("u", "v"))
    g3 = f.p_rewrite(3)
    assert g3 == parse_poly("4*P - u*v^2", ("u", "v", "P"))
    assert g3.order_at_origin() == 1
    g2 = f.p_rewrite(2)
    assert g2 == parse_poly("3*P^2 - u*v^2", ("u", "v", "P"))
    assert g2.order_at_origin() == 2


def test_taylor_shift_univariate():
    f = parse_poly("x^2", ("x",))
    g, shifts = f.taylor_shift(["x"])
    t = shifts["x"]
    assert g == parse_poly(f"x^2 + 2*x*{t} + {t}^2", g.ring)


def test_taylor_shift_coefficient_is_hasse():
    f = parse_poly("x^5", ("x",))
    g, shifts = f.taylor_shift(["x"])
    ti = g.ring.index(shifts["x"])
    coeff = {m[:1]: c for m, c in g.terms.items() if m[ti] == 2}
    assert coeff == {(3,): 10}  # binom(5,2) = 10
    assert f.hasse_derivative((2,)) == parse_poly("10*x^3", ("x",))


def test_taylor_shift_two_vars():
    f = p("x*y")
    g, shifts = f.taylor_shift(["x", "y"])
    tx, ty = shifts["x"], shifts["y"]
    expected = parse_poly(f"x*y + x*{ty} + y*{tx} + {tx}*{ty}", g.ring)
    assert g == expected


def test_hasse_self_derivative_is_one():
    f = p("x^3*y^2")
    assert f.hasse_derivative((3, 2)) == Poly.const(R2, 1)
    q = parse_poly("Q^2", ("Q",))
    assert q.hasse_derivative((2,)) == Poly.const(("Q",), 1)


def test_hasse_taylor_equivalence_randomized():
    rng = random.Random(20260811)
    ring = ("a", "b", "c", "d")
    for _ in range(1000):
        nterms = rng.randint(1, 8)
        terms = {}
        for _ in range(nterms):
            m = tuple(rng.randint(0, 4) for _ in ring)
            terms[m] = rng.randint(-10**6, 10**6)
        f = Poly(ring, terms)
        a = [0, 0, 0, 0]
        for _ in range(rng.randint(0, 6)):
            a[rng.randrange(4)] += 1
        a = tuple(a)
        g, shifts = f.taylor_shift()
        tpos = [g.ring.index(shifts[v]) for v in ring]
        coeff = {}
        for m, c in g.terms.items():
            if tuple(m[i] for i in tpos) == a:
                coeff[m[: len(ring)]] = c
        assert Poly(ring, coeff) == f.hasse_derivative(a)


def test_leibniz_first_order():
    rng = random.Random(7)
    for _ in range(200):
        f = Poly(R2, {(rng.randint(0, 3), rng.randint(0, 3)): rng.randint(-50, 50) for _ in range(3)})
        g = Poly(R2, {(rng.randint(0, 3), rng.randint(0, 3)): rng.randint(-50, 50) for _ in range(3)})
        lhs = (f * g).derivative("x")
        rhs = f * g.derivative("x") + g * f.derivative("x")
        assert lhs == rhs


def test_p_rewrite_examples():
    f = parse_poly("12 - u*v^2", ("u", "v"))
    assert f.p_rewrite(3) == parse_poly("4*P - u*v^2", ("u", "v", "P"))
    g = p("9*x^2 - 25*y^2").p_rewrite(5)
    assert g == parse_poly("9*x^2 - P^2*y^2", ("x", "y", "P"))
    h = p("x^2 - 1953125*y^3").p_rewrite(5)  # 5^9 = 1953125
    assert h == parse_poly("x^2 - P^9*y^3", ("x", "y", "P"))


def test_p_rewrite_zero_and_nonprime():
    z = Poly.zero(R2).p_rewrite(5)
    assert z.is_zero()
    with pytest.raises(ValueError):
        p("x").p_rewrite(6)


def test_p_rewrite_nested_placeholder_names():
    f = p("4*x").p_rewrite(2)
    assert "P" in f.ring
    g = f.p_rewrite(3)
    assert g.ring[-1] == "P2"


def test_substitute_round_trip():
    rng = random.Random(99)
    for _ in range(200):
        f = Poly(R2, {(rng.randint(0, 4), rng.randint(0, 4)): rng.randint(-10**4, 10**4) for _ in range(4)})
        for q in (2, 3, 5, 7):
            g = f.p_rewrite(q)
            assert g.substitute("P", q) == f
            assert all(c % q for c in g.terms.values()) or g.is_zero()


def test_substitute_examples():
    f = parse_poly("4*P - u*v^2", ("u", "v", "P"))
    assert f.substitute("P", 3) == parse_poly("12 - u*v^2", ("u", "v"))
    assert p("x^2").substitute("x", 0) == Poly.zero(("y",))


def test_substitute_blowup_style():
    # y -> y*x (x-chart substitution) on 9x^2 - 25y^2
    f = p("9*x^2 - 25*y^2")
    g = f.substitute("y", parse_poly("w*x", ("x", "w")).extend_ring(("x", "w")))
    assert g == parse_poly("9*x^2 - 25*w^2*x^2", ("x", "w"))


def test_parser_errors():
    with pytest.raises(ParseError):
        p("x**2")  # '**' is two tokens: '*' then '*...' -> missing operand
    with pytest.raises(ParseError):
        p("x 2")
    with pytest.raises(ParseError):
        p("q + 1")  # unknown variable
    with pytest.raises(ParseError):
        p("")


def test_parser_round_trip():
    rng = random.Random(3)
    for _ in range(100):
        f = Poly(R2, {(rng.randint(0, 5), rng.randint(0, 5)): rng.randint(-99, 99) for _ in range(5)})
        assert parse_poly(str(f), R2) == f


def test_orders_are_global_and_total():
    mons = [(2, 0, 0), (1, 1, 0), (0, 2, 0), (1, 0, 1), (0, 1, 1), (0, 0, 2)]
    key = DEGREVLEX.key
    ranked = sorted(mons, key=key, reverse=True)
    assert ranked == [(2, 0, 0), (1, 1, 0), (0, 2, 0), (1, 0, 1), (0, 1, 1), (0, 0, 2)]
    assert LEX.key((1, 0, 0)) > LEX.key((0, 9, 9))
    blk = block_order(1)
    # x-block dominates: any monomial with x beats any without
    assert blk.key((1, 0, 0)) > blk.key((0, 9, 9))
    for o in (DEGREVLEX, LEX, blk):
        assert o.key((0, 0, 0)) < o.key((0, 0, 1))  # 1 is minimal
