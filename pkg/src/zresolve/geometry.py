"""Charts, irreducible components, and blow-up machinery.

A chart is one affine patch of the resolution: a variable list, the ambient
ideal cutting out Z, the X-ideal, the boundary divisors with their old/new
status, and bookkeeping (history, labels, cached invariant).  Blowing up a
center produces one chart per center generator; single-variable generators
are substituted away, prime integer generators are handled through p-power
rewriting with the relation p - t*h_i kept in the ambient ideal.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import sympy

from .errors import InternalError
from .ideals import (
    Ideal,
    contract_to_integers,
    eliminate,
    is_unit_ideal,
    membership,
    primefactors,
    radical_contains,
    saturate,
    scheme_codim,
)
from .locus import classify_component, minimal_pieces, refined_order
from .poly import Poly


@dataclass
class BoundaryComponent:
    ideal: Ideal
    birth_step: int
    status: str  # "old" or "new"


@dataclass
class Component:
    ideal: Ideal
    label: int | None = None
    kind: tuple = ("horizontal", None)
    decomposed: bool = True


@dataclass
class Chart:
    varlist: tuple
    ambient: Ideal
    x_ideal: Ideal
    boundary: list = field(default_factory=list)
    designated_prime: int | None = None
    history: tuple = ()
    N: int = 0
    components: list = field(default_factory=list)
    invariant: tuple | None = None  # (alpha, delta, sigma)
    nu: tuple | None = None  # (alpha, delta) driving the boundary epoch
    transition: dict | None = None  # blow-down data of the creating blow-up
    chart_id: int | None = None

    @classmethod
    def make(cls, varlist, ambient_gens, x_gens, boundary=None, designated_prime=None):
        varlist = tuple(varlist)
        ambient = Ideal(varlist, list(ambient_gens))
        x_ideal = ambient + list(x_gens)
        N = len(varlist) + 1 - scheme_codim(ambient)
        return cls(
            varlist=varlist,
            ambient=ambient,
            x_ideal=x_ideal,
            boundary=list(boundary or []),
            designated_prime=designated_prime,
            N=N,
        )

    def boundary_pairs(self):
        return [(b.ideal, b.status) for b in self.boundary]


# -- component decomposition ---------------------------------------------------


def _sympy_symbols(ring):
    return sympy.symbols([name.replace("'", "_pr_") for name in ring])


def _to_sympy(f, syms):
    expr = sympy.Integer(0)
    for m, c in f.terms.items():
        term = sympy.Integer(c)
        for s, e in zip(syms, m):
            if e:
                term *= s ** e
        expr += term
    return expr


def _from_sympy(p, ring):
    terms = {}
    for monom, coeff in p.terms():
        terms[tuple(int(e) for e in monom)] = int(coeff)
    return Poly(ring, terms)


def _split_atoms(g, ring):
    """Irreducible atoms of a generator: prime contents plus poly factors."""
    syms = _sympy_symbols(ring)
    if g.is_constant():
        n = abs(g.constant_value())
        return [Poly.const(ring, p) for p in sorted(primefactors(n))] if n > 1 else []
    sp = sympy.Poly(_to_sympy(g, syms), *syms, domain="ZZ")
    content, factors = sp.factor_list()
    atoms = [Poly.const(ring, p) for p in sorted(primefactors(abs(int(content))))]
    for fac, _exp in factors:
        atoms.append(_from_sympy(fac, ring).primitive())
    return atoms


def decompose(I):
    """Split an ideal into (conjecturally) irreducible components.

    Repeatedly factors generators into coprime atoms and branches; a
    generator with a single repeated atom is replaced by its radical (same
    minimal primes).  Returns inclusion-minimal components; when nothing
    splits, the single component is flagged decomposed=False.
    """
    ring = I.ring
    start = Ideal(ring, list(I.groebner().elements))
    if is_unit_ideal(start):
        return []
    work = [start]
    leaves = []
    guard = 0
    while work:
        guard += 1
        if guard > 400:
            raise InternalError("component splitter did not terminate")
        J = work.pop()
        if is_unit_ideal(J):
            continue
        J = Ideal(ring, list(J.groebner().elements))
        branched = False
        for g in J.groebner().elements:
            atoms = [a for a in _split_atoms(g, ring) if not membership(a, J)]
            if len(atoms) >= 2:
                work.extend(J + [a] for a in atoms)
                branched = True
                break
            if len(atoms) == 1 and atoms[0] != g and not membership(atoms[0], J):
                work.append(J + [atoms[0]])
                branched = True
                break
        if not branched:
            leaves.append(J)
    pieces = minimal_pieces([(0, J) for J in leaves])
    components = []
    for _, J in pieces:
        canonical = Ideal(ring, list(J.groebner().elements))
        try:
            kind = classify_component(canonical)
        except ValueError:
            components.append(Component(canonical, kind=("horizontal", None), decomposed=False))
            continue
        components.append(Component(canonical, kind=kind, decomposed=True))
    if len(components) == 1 and components[0].ideal == start:
        components[0].decomposed = False
    return components


# -- blow-up ---------------------------------------------------------------------


def _is_single_variable(h):
    if len(h.terms) != 1:
        return None
    ((m, c),) = h.terms.items()
    if abs(c) == 1 and sum(m) == 1:
        return h.ring[m.index(1)]
    return None


def _fresh(base, taken):
    name = base
    while name in taken:
        name += "'"
    taken.add(name)
    return name


def _carry(f, new_ring):
    """Re-home a polynomial onto new_ring; every used variable must survive."""
    pos = {}
    for v in f.variables_used():
        pos[v] = new_ring.index(v)
    width = len(new_ring)
    terms = {}
    for m, c in f.terms.items():
        e = [0] * width
        for i, ei in enumerate(m):
            if ei:
                e[pos[f.ring[i]]] = ei
        terms[tuple(e)] = c
    return Poly(new_ring, terms)


def _unit_multiple_member(g, J):
    """A positive u with u*g in J (0 when no multiple reduces to zero).

    Fraction-free reduction over Q against J's primitive basis, tracking the
    accumulated leading-coefficient multiplier.
    """
    from .ideals import groebner_field
    from .poly import DEGREVLEX

    G = groebner_field(J.gens, DEGREVLEX, None)
    basis = [(b.leading_monomial(DEGREVLEX), b.leading_coefficient(DEGREVLEX), b) for b in G]
    h, u = g, 1
    for _ in range(600):
        if h.is_zero():
            return u
        hm, hc = h.leading_term(DEGREVLEX)
        for gm, gc, b in basis:
            if all(a >= e for a, e in zip(hm, gm)):
                shift = tuple(a - e for a, e in zip(hm, gm))
                h = h * gc - b.mul_term(shift, hc)
                u *= abs(gc)
                break
        else:
            return 0  # a surviving term: g is not in J over Q
    return 0


def _minimal_center_gens(center, ambient):
    """Drop center generators redundant modulo the others plus the ambient.

    Besides exact membership, a generator g with u*g in <rest> for an
    integer u invertible along the center is dropped when <rest> stays empty
    over the primes of u (the two blow-ups then agree as morphisms).
    """
    import math

    gens = list(center.groebner().elements)
    n = contract_to_integers(center)
    changed = True
    while changed and len(gens) > 1:
        changed = False
        for k, g in enumerate(gens):
            rest = Ideal(center.ring, gens[:k] + gens[k + 1 :]) + list(ambient.gens)
            if membership(g, rest):
                gens.pop(k)
                changed = True
                break
            u = _unit_multiple_member(g, rest)
            if u > 1 and (n == 0 or math.gcd(u, n) == 1):
                if all(
                    is_unit_ideal(rest + [Poly.const(center.ring, p)])
                    for p in primefactors(u)
                ):
                    gens.pop(k)
                    changed = True
                    break
    return gens


def _make_transform(subst_map, prime_subst, new_ring):
    """Total-transform substitution: explicit bindings, safe to store."""

    def transform(f):
        g = f
        for p, placeholder, _expr in prime_subst:
            g = g.p_rewrite(p, placeholder)
        for v, expr in subst_map.items():
            g = g.substitute(v, expr)
        for _p, placeholder, expr in prime_subst:
            g = g.substitute(placeholder, expr)
        return g.extend_ring(new_ring)

    return transform


def blow_up(chart, center, step=None, center_record=None):
    """Blow up the chart at a regular center; one child chart per generator."""
    ring = chart.varlist
    for a in chart.ambient.gens:
        if not membership(a, center):
            raise ValueError("center does not contain the ambient ideal")
    if center == chart.x_ideal:
        raise ValueError("center equals X; the chart is already resolved")
    gens = _minimal_center_gens(center, chart.ambient)
    step = step if step is not None else (chart.history[-1][0] + 1 if chart.history else 1)
    charts = []
    for i, h_i in enumerate(gens):
        subst_vars = []  # (variable name, generator index)
        prime_gens = []  # (p, generator index)
        general_gens = []  # (poly, generator index)
        for j, h in enumerate(gens):
            if j == i:
                continue
            v = _is_single_variable(h)
            if v is not None:
                subst_vars.append((v, j))
            elif h.is_constant() and sympy.isprime(abs(h.constant_value())):
                prime_gens.append((abs(h.constant_value()), j))
            else:
                general_gens.append((h, j))

        taken = set(ring)
        renamed = {v: _fresh(v + "'", taken) for v, _j in subst_vars}
        fresh_prime = {j: _fresh("q", taken) for _p, j in prime_gens}
        fresh_general = {j: _fresh("s", taken) for _h, j in general_gens}
        new_ring = (
            tuple(renamed.get(v, v) for v in ring)
            + tuple(fresh_prime[j] for _p, j in prime_gens)
            + tuple(fresh_general[j] for _h, j in general_gens)
        )

        # the chart generator, carried over (reduced GBs keep it free of the
        # substituted variables and of the primes' powers)
        if h_i.is_constant():
            h_i_expr = Poly.const(new_ring, h_i.constant_value())
        else:
            h_i_expr = _carry(h_i, new_ring)
        exceptional = h_i_expr

        subst_map = {
            v: Poly.var(new_ring, renamed[v]) * h_i_expr for v, _j in subst_vars
        }
        prime_subst = [
            (p, f"@blow{j}", Poly.var(new_ring, fresh_prime[j]) * h_i_expr)
            for p, j in prime_gens
        ]
        transform = _make_transform(subst_map, prime_subst, new_ring)

        relations = [
            Poly.const(new_ring, p) - Poly.var(new_ring, fresh_prime[j]) * h_i_expr
            for p, j in prime_gens
        ]
        relations += [
            transform(h) - Poly.var(new_ring, fresh_general[j]) * h_i_expr
            for h, j in general_gens
        ]

        ambient_new = Ideal(new_ring, [transform(g) for g in chart.ambient.gens] + relations)
        total = ambient_new + [transform(g) for g in chart.x_ideal.gens]
        strict = saturate(total, exceptional)
        if is_unit_ideal(strict):
            continue  # X misses this chart entirely

        boundary_new = []
        for b in chart.boundary:
            bt = saturate(ambient_new + [transform(g) for g in b.ideal.gens], exceptional)
            if is_unit_ideal(bt):
                continue
            boundary_new.append(BoundaryComponent(bt, b.birth_step, b.status))
        boundary_new.append(BoundaryComponent(ambient_new + [exceptional], step, "new"))

        child = Chart(
            varlist=new_ring,
            ambient=ambient_new,
            x_ideal=strict,
            boundary=boundary_new,
            designated_prime=chart.designated_prime,
            history=chart.history + ((step, i),),
            N=len(new_ring) + 1 - scheme_codim(ambient_new),
            transition={
                "old_ring": ring,
                "substitutions": dict(subst_map),
                "exceptional": exceptional,
                "fresh": [renamed[v] for v, _ in subst_vars]
                + [fresh_prime[j] for _p, j in prime_gens]
                + [fresh_general[j] for _h, j in general_gens],
                "transform": transform,
            },
            chart_id=None,
        )
        charts.append(child)
    return charts


# -- domination and labels ----------------------------------------------------------


def blowdown_closure(chart, comp_ideal):
    """Ideal of the closure of the image of V(comp_ideal) in the parent chart."""
    tr = chart.transition
    if tr is None:
        raise ValueError("chart has no blow-down data")
    old_ring = tr["old_ring"]
    new_ring = chart.varlist
    restored = tuple(v for v in old_ring if v not in new_ring)
    big = new_ring + restored
    gens = [g.extend_ring(big) for g in comp_ideal.gens]
    for v in restored:
        expr = tr["substitutions"][v]
        gens.append(Poly.var(big, v) - expr.extend_ring(big))
    J = Ideal(big, gens)
    drop = [v for v in big if v not in old_ring]
    image = eliminate(J, drop)
    kept = [g.restrict_ring(old_ring) for g in image.gens]
    return Ideal(old_ring, kept)


def dominates(child_ideal, parent_component_ideal, chart):
    """The child component's blow-down image is dense in the parent component."""
    closure = blowdown_closure(chart, child_ideal)
    D = parent_component_ideal
    forward = all(radical_contains(closure, g) for g in D.gens)
    backward = all(radical_contains(D, g) for g in closure.gens)
    return forward and backward


def assign_labels(new_components, parent_components, center_record, chart, step):
    """Label child components: strict transforms inherit, dominators of an
    entire-component center inherit its label, everything else gets `step`."""
    tr = chart.transition
    transform = tr["transform"]
    exceptional = tr["exceptional"]
    strict_parents = []
    for pc in parent_components:
        st = saturate(
            chart.ambient + [transform(g) for g in pc.ideal.gens], exceptional
        )
        if not is_unit_ideal(st):
            strict_parents.append((st, pc))
    for comp in new_components:
        label = None
        for st, pc in strict_parents:
            if _same_variety(comp.ideal, st):
                label = pc.label
                break
        if label is None and center_record is not None and center_record.entire_component:
            if radical_contains(comp.ideal, exceptional):
                for c_ideal, c_label in center_record.component_labels:
                    if dominates(comp.ideal, c_ideal, chart):
                        label = c_label
                        break
        comp.label = step if label is None else label
    return new_components


def _same_variety(I, J):
    return all(radical_contains(I, g) for g in J.gens) and all(
        radical_contains(J, g) for g in I.gens
    )


# -- weak permissibility --------------------------------------------------------------


def is_weakly_permissible(candidate, chart, components=None):
    """Regular and snc with the boundary; returns (ok, defect ideal or None).

    Regularity asks the refined order of (ambient, candidate) to be delta=1;
    transversality asks the same for candidate + B over every boundary
    divisor B not containing the candidate.  The defect collects the failing
    loci (closed points on surface input).

    When the candidate is presented as a list of pairwise disjoint
    components, each component is tested on its own (the union inherits
    permissibility); intersecting components go through the union's refined
    order, which ranks the crossing defects correctly.
    """
    if components is not None and len(components) > 1:
        ideals = [c.ideal for c in components]
        disjoint = all(
            is_unit_ideal(ideals[i] + list(ideals[j].gens))
            for i in range(len(ideals))
            for j in range(i + 1, len(ideals))
        )
        if disjoint:
            defects = []
            for J in ideals:
                ok, defect = is_weakly_permissible(J, chart)
                if not ok:
                    defects.append((0, defect))
            if not defects:
                return True, None
            return False, _merge_defects(defects)
    full = chart.ambient + list(candidate.gens)
    defects = []
    nu, pieces = refined_order(chart.ambient, full, N=chart.N)
    if nu.delta not in (0, 1):
        defects.extend(pieces)
    for b in chart.boundary:
        if all(radical_contains(full, g) for g in b.ideal.gens):
            continue  # candidate lies inside this divisor
        joint = full + list(b.ideal.gens)
        if is_unit_ideal(joint):
            continue
        nu_b, pieces_b = refined_order(chart.ambient, joint, N=chart.N)
        if nu_b.delta not in (0, 1):
            defects.extend(pieces_b)
    if not defects:
        return True, None
    return False, _merge_defects(defects)


def _merge_defects(defects):
    from .ideals import intersect

    merged = minimal_pieces(defects)
    defect = merged[0][1]
    if merged[0][0]:
        defect = defect + [Poly.const(defect.ring, merged[0][0])]
    for p, J in merged[1:]:
        J_full = J + [Poly.const(J.ring, p)] if p else J
        defect = intersect(defect, J_full)
    return defect
