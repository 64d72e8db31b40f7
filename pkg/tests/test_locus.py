import math

import pytest

from zresolve.ideals import Ideal, is_unit_ideal, membership, nf_mod_ambient, strong_gb
from zresolve.locus import (
    ArithOrderResult,
    RefinedOrder,
    classify_component,
    hasse_deriv_list,
    interesting_primes,
    log_refined_locus,
    max_ord_arith,
    max_ord_char0,
    refined_order,
)
from zresolve.poly import Poly, parse_poly

from helpers import ideal, poly


P59 = 5**9  # 1953125
P79 = 7**9  # 40353607


def same_ideal(I, J):
    return I.groebner().elements == J.groebner().elements


# -- max_ord_char0 ------------------------------------------------------------


def test_char0_whitney_umbrella():
    R = ("t", "y", "z")
    res = max_ord_char0(Ideal.zero(R), ideal(R, "t^2 - y^2*z"))
    assert res.maxord == 2
    # V(locus) = V(t, y): t and y in the radical, z not
    assert membership(poly(R, "t"), res.locus)
    assert membership(poly(R, "y^2"), res.locus)
    assert not membership(poly(R, "z"), res.locus)


def test_char0_smooth_hypersurface():
    R = ("x", "y")
    res = max_ord_char0(Ideal.zero(R), ideal(R, "x"))
    assert res.maxord == 1
    assert same_ideal(res.locus, ideal(R, "x"))


def test_char0_vertical_weight():
    R = ("x", "y")
    res = max_ord_char0(Ideal.zero(R), ideal(R, f"x^2 - {P59}*y^3"))
    assert res.maxord == 2
    assert same_ideal(res.locus, ideal(R, "x", "y^2"))


def test_char0_nontrivial_ambient_toy():
    R = ("x", "y", "z")
    I_Z = ideal(R, "x - 4*y + 6*z")
    res = max_ord_char0(I_Z, I_Z + [poly(R, "3*x - y + 7*z")])
    assert res.maxord == 1  # smooth over Q


# -- interesting_primes --------------------------------------------------------


def test_primes_toy_eleven():
    R = ("x", "y", "z")
    I_Z = ideal(R, "x - 4*y + 6*z")
    I_X = I_Z + [poly(R, "3*x - y + 7*z")]
    assert interesting_primes(I_Z, I_X) == {11}


def test_primes_two_squares():
    R = ("x", "y")
    assert interesting_primes(Ideal.zero(R), ideal(R, "9*x^2 - 25*y^2")) == {2}
    # the x-chart transform picks up 3 as well
    assert interesting_primes(Ideal.zero(R), ideal(R, "9 - 25*y^2")) == {2, 3}


def test_primes_horizontal_blindness():
    R = ("x", "y")
    assert interesting_primes(Ideal.zero(R), ideal(R, f"x^2 - {P59}*y^3")) == {2}


def test_primes_ambient_contraction_branch():
    R = ("x", "y")
    assert interesting_primes(ideal(R, "7"), ideal(R, "7", "x")) == {7}


def test_primes_normal_form_necessity():
    R = ("u", "x", "y", "z")
    for m in (2, 3):
        I_Z = ideal(R, f"u - x^{m}")
        I_X = I_Z + [poly(R, f"{P79}*u - y^5 + x*z^3")]
        with_nf = interesting_primes(I_Z, I_X, use_normal_form=True)
        assert 7 in with_nf
        without_nf = interesting_primes(I_Z, I_X, use_normal_form=False)
        assert without_nf == {2, 3}


# -- hasse_deriv_list ------------------------------------------------------------


def test_hasse_list_x_squared():
    R = ("x",)
    J_X = ideal(R, "x^2")
    entries = hasse_deriv_list(Ideal.zero(R), J_X, params=R)
    assert len(entries) == 3
    assert same_ideal(entries[0], ideal(R, "x^2"))
    assert same_ideal(entries[1], ideal(R, "x^2", "2*x"))
    assert is_unit_ideal(entries[2])


def test_hasse_list_rewritten_at_two():
    R = ("x", "y", "P")
    J_X = ideal(R, "9*x^2 - 25*y^2")  # 2-rewriting leaves it unchanged
    entries = hasse_deriv_list(Ideal.zero(R), J_X, params=R)
    assert same_ideal(entries[1], ideal(R, "9*x^2 - 25*y^2", "18*x", "50*y"))
    assert is_unit_ideal(entries[2])  # gcd(9, 25) = 1


def test_hasse_list_nontrivial_ambient_chain_rule():
    from zresolve.ideals import choose_cover, jacobian_data

    R = ("x", "y", "z")
    J_Z = ideal(R, "x - 4*y + 6*z")
    f = poly(R, "(3*x - y + 7*z)^2")
    J_X = J_Z + [f]
    jac = jacobian_data(J_Z)
    minor = next(m for m in jac.minors if m.cols == (0,))
    entries = hasse_deriv_list(J_Z, J_X, params=("y", "z"), minor=minor)
    # the first derivative round contains 22*(3x - y + 7z)
    assert membership(poly(R, "22*(3*x - y + 7*z)"), entries[1])
    # and the loop stops once an integer (121) is reached
    from zresolve.ideals import contract_to_integers

    assert contract_to_integers(entries[-1]) != 0


# -- max_ord_arith ----------------------------------------------------------------


def test_arith_smooth():
    R = ("x", "y")
    res = max_ord_arith(Ideal.zero(R), ideal(R, "x"))
    assert res.maxord == 1
    assert len(res.pieces) == 1
    prime, I = res.pieces[0]
    assert prime == 0 and same_ideal(I, ideal(R, "x"))


def test_arith_no_piece_at_five():
    R = ("x", "y")
    res = max_ord_arith(Ideal.zero(R), ideal(R, f"x^2 - {P59}*y^3"))
    assert res.maxord == 2
    primes = sorted(p for p, _ in res.pieces)
    assert primes == [0, 2]
    char0 = dict(res.pieces)[0]
    assert same_ideal(char0, ideal(R, "x", "y^2"))
    at2 = dict(res.pieces)[2]
    assert same_ideal(at2, ideal(R, f"x^2 - {P59}*y^3", "2*x", f"{3 * P59}*y^2"))


def test_arith_two_squares_pieces():
    R = ("x", "y")
    res = max_ord_arith(Ideal.zero(R), ideal(R, "9*x^2 - 25*y^2"))
    assert res.maxord == 2
    by_prime = dict(res.pieces)
    assert same_ideal(by_prime[0], ideal(R, "x", "y"))
    assert same_ideal(by_prime[2], ideal(R, "9*x^2 - 25*y^2", "18*x", "50*y"))


# -- refined order -----------------------------------------------------------------


def test_refined_order_fiber_example():
    # X = V(7, t, v^2 - y^3, z^5 - y^2 w^5) in Z[t,v,w,y,z]: nu = (4, 2)
    R = ("t", "v", "w", "y", "z")
    I_X = ideal(R, "7", "t", "v^2 - y^3", "z^5 - y^2*w^5")
    nu, pieces = refined_order(Ideal.zero(R), I_X, N=6)
    assert (nu.alpha, nu.delta) == (4, 2)
    assert len(pieces) >= 1
    target = ideal(R, "7", "t", "v", "y", "z")
    assert any(
        all(membership(g, target) for g in I.gens)
        and all(radical_in(I, g) for g in target.gens)
        for _, I in pieces
    )


def radical_in(I, g):
    from zresolve.ideals import radical_contains

    return radical_contains(I, g)


def test_refined_order_mixed_surface():
    # X = V(x^2 - y^17, 5^5 - y^2 z^6): nu = (4, 2), locus V(5, x, y)
    R = ("x", "y", "z")
    I_X = ideal(R, "x^2 - y^17", f"{5**5} - y^2*z^6")
    nu, pieces = refined_order(Ideal.zero(R), I_X, N=4)
    assert (nu.alpha, nu.delta) == (4, 2)
    target = ideal(R, "5", "x", "y")
    assert any(
        all(membership(g, target) for g in I.gens) and all(radical_in(I, g) for g in target.gens)
        for _, I in pieces
    )


def test_refined_order_regular():
    R = ("x", "y")
    nu, pieces = refined_order(Ideal.zero(R), ideal(R, "x"), N=3)
    assert nu.delta == 1
    assert same_ideal(pieces[0][1], ideal(R, "x"))


# -- log-refined order ---------------------------------------------------------------


def test_log_refined_empty_boundary():
    R = ("x", "y")
    nu = RefinedOrder(3, 2)
    pieces = ((0, ideal(R, "x", "y")),)
    nu2, locus = log_refined_locus(nu, pieces, [], ideal(R, "x^2 - y^3"))
    assert nu2.sigma == 0
    assert locus == pieces


def test_log_refined_old_boundary_selects():
    # locus V(x,y) u V(x,z), old boundary {V(z)} -> sigma 1, locus V(x,z)
    R = ("x", "y", "z")
    pieces = ((0, ideal(R, "x", "y")), (0, ideal(R, "x", "z")))
    boundary = [(ideal(R, "z"), "old")]
    nu2, locus = log_refined_locus(RefinedOrder(2, 2), pieces, boundary, ideal(R, "x^2 - y^2*z^2"))
    assert nu2.sigma == 1
    assert len(locus) == 1
    assert same_ideal(locus[0][1], ideal(R, "x", "z"))


def test_log_refined_new_boundary_keeps_all():
    R = ("q", "x", "y")
    amb = ["5 - q*y"]
    pieces = (
        (5, ideal(R, "q", "x", *amb)),
        (5, ideal(R, "q", "y", *amb)),
    )
    boundary = [(ideal(R, "y"), "new")]
    nu2, locus = log_refined_locus(RefinedOrder(3, 2), pieces, boundary, ideal(R, *amb))
    assert nu2.sigma == 0
    assert locus == pieces


# -- classification -------------------------------------------------------------------


def test_classify_components():
    R = ("x", "y")
    assert classify_component(ideal(R, "x", "y")) == ("horizontal", None)
    assert classify_component(ideal(R, "x", "5")) == ("vertical", 5)
    assert classify_component(ideal(R, "x", "y - 2")) == ("horizontal", None)
    with pytest.raises(ValueError):
        classify_component(ideal(R, "15", "x"))
