"""Independent oracles and small builders shared by the test modules."""

import itertools

import sympy
from sympy.matrices.normalforms import smith_normal_form

from zresolve.ideals import Ideal
from zresolve.poly import Poly, parse_poly


def ideal(ring, *texts):
    ring = tuple(ring)
    return Ideal(ring, [parse_poly(t, ring) for t in texts])


def poly(ring, text):
    return parse_poly(text, tuple(ring))


def syzygy_membership(f, I, max_cofactor_degree=3):
    """Brute-force membership oracle: solve f = sum a_i g_i over Z.

    Cofactors a_i range over all monomials of total degree at most
    max_cofactor_degree; solvability of the integer linear system is decided
    via the Smith normal form.  Independent of the Groebner route.
    """
    ring = f.ring
    n = len(ring)
    monos = [
        m
        for m in itertools.product(range(max_cofactor_degree + 1), repeat=n)
        if sum(m) <= max_cofactor_degree
    ]
    columns = []
    support = set(f.terms)
    for g in I.gens:
        for m in monos:
            shifted = g.mul_term(m, 1)
            columns.append(shifted.terms)
            support |= set(shifted.terms)
    support = sorted(support)
    if not columns:
        return f.is_zero()
    A = sympy.Matrix([[col.get(s, 0) for col in columns] for s in support])
    b = sympy.Matrix([f.terms.get(s, 0) for s in support])
    # A x = b solvable over Z  iff  SNF divisibility conditions hold
    aug = A.row_join(b)
    snf_A = smith_normal_form(A)
    snf_aug = smith_normal_form(aug)
    d_A = [snf_A[i, i] for i in range(min(snf_A.shape)) if snf_A[i, i] != 0]
    d_aug = [snf_aug[i, i] for i in range(min(snf_aug.shape)) if snf_aug[i, i] != 0]
    return len(d_A) == len(d_aug) and all(
        int(x) == int(y) or int(x) == -int(y) for x, y in zip(d_A, d_aug)
    )
