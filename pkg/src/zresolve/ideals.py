"""Ideal arithmetic over Z[x] and Q[x].

Strong (D-)Groebner bases over Z via Buchberger with S- and G-polynomials,
E-reduction with a least-absolute-value remainder, and a reduced canonical
form so that equal ideals have equal bases.  On top of that: normal form,
membership, intersection (t-trick), saturation (w-trick), elimination with
block orders, contraction to Z, Jacobian minors with their cofactor
matrices, constrained derivatives on a chart, and Krull dimension over Q.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import sympy

from .errors import CoverError, RingMismatchError
from .poly import DEGREVLEX, MonomialOrder, Poly, block_order


class Ideal:
    """Finitely generated ideal of Z[ring]; the zero ideal has no generators."""

    __slots__ = ("ring", "gens", "_gb_cache", "_hash")

    def __init__(self, ring, gens):
        self.ring = tuple(ring)
        cleaned = []
        for g in gens:
            if g.ring != self.ring:
                raise RingMismatchError(f"generator over {g.ring}, ideal over {self.ring}")
            if not g.is_zero():
                cleaned.append(g)
        self.gens = tuple(cleaned)
        self._gb_cache = {}
        self._hash = None

    @classmethod
    def zero(cls, ring):
        return cls(ring, [])

    def __add__(self, other):
        if isinstance(other, Ideal):
            if other.ring != self.ring:
                raise RingMismatchError("ideal sum over different rings")
            return Ideal(self.ring, self.gens + other.gens)
        return Ideal(self.ring, self.gens + tuple(other))

    def is_zero_ideal(self):
        return not self.gens

    def extend_ring(self, new_ring):
        return Ideal(new_ring, [g.extend_ring(new_ring) for g in self.gens])

    def restrict_ring(self, new_ring):
        return Ideal(new_ring, [g.restrict_ring(new_ring) for g in self.gens])

    def groebner(self, order=DEGREVLEX):
        if order not in self._gb_cache:
            self._gb_cache[order] = strong_gb(self, order)
        return self._gb_cache[order]

    def __eq__(self, other):
        if not isinstance(other, Ideal) or other.ring != self.ring:
            return False
        return self.groebner().elements == other.groebner().elements

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.ring, tuple(self.groebner().elements)))
        return self._hash

    def __str__(self):
        return "<" + ", ".join(str(g) for g in self.gens) + ">" if self.gens else "<0>"

    __repr__ = __str__


@dataclass(frozen=True)
class GroebnerBasis:
    elements: tuple
    order: MonomialOrder
    ring_tag: str = "integers"  # or "rationals" / "GF(p)"

    def __iter__(self):
        return iter(self.elements)

    def __len__(self):
        return len(self.elements)


# -- E-reduction over Z --------------------------------------------------------


def _sym_quot(c, b):
    """Quotient q with remainder c - q*b of least absolute value (ties positive).

    Assumes b > 0.
    """
    q, r = divmod(c, b)
    if 2 * r > b:
        q += 1
    return q


def normal_form(f, G, order=None):
    """Full strong-GB remainder of f; zero iff f lies in the ideal of G.

    A term is rewritten only by the least-absolute-remainder quotient, so a
    term survives exactly when no basis leading term divides it with a
    nonzero quotient (over Z this includes coefficient divisibility).
    """
    if isinstance(G, GroebnerBasis):
        basis = G.elements
        order = G.order
    else:
        basis = tuple(g for g in G if not g.is_zero())
        order = order or DEGREVLEX
    if f.is_zero() or not basis:
        return f
    lead = [(g.leading_monomial(order), g.leading_coefficient(order), g.terms) for g in basis]
    key = order.key
    keycache = {}

    def k(m):
        v = keycache.get(m)
        if v is None:
            v = key(m)
            keycache[m] = v
        return v

    work = dict(f.terms)
    result = {}
    while work:
        hm = max(work, key=k)
        hc = work[hm]
        for gm, gc, gterms in lead:
            if all(a >= b for a, b in zip(hm, gm)):
                q = _sym_quot(hc, gc) if gc > 0 else -_sym_quot(hc, -gc)
                if q:
                    shift = tuple(a - b for a, b in zip(hm, gm))
                    for m2, c2 in gterms.items():
                        mm = tuple(a + b for a, b in zip(m2, shift))
                        v = work.get(mm, 0) - q * c2
                        if v:
                            work[mm] = v
                        else:
                            work.pop(mm, None)
                    break
        else:
            result[hm] = hc
            del work[hm]
    return Poly(f.ring, result)


def _spoly(f, g, order):
    fm, fc = f.leading_term(order)
    gm, gc = g.leading_term(order)
    lcm_m = tuple(max(a, b) for a, b in zip(fm, gm))
    l = abs(fc * gc) // math.gcd(fc, gc)
    return f.mul_term(tuple(a - b for a, b in zip(lcm_m, fm)), l // fc) - g.mul_term(
        tuple(a - b for a, b in zip(lcm_m, gm)), l // gc
    )


def _gpoly(f, g, order):
    """gcd-combination with leading term gcd(lc f, lc g) * lcm(lm f, lm g).

    None when one leading coefficient divides the other: with cofactors
    (0, 1) or (1, 0) the G-polynomial is a monomial multiple of f or g and
    reduces to zero on its own.
    """
    fm, fc = f.leading_term(order)
    gm, gc = g.leading_term(order)
    if fc % gc == 0 or gc % fc == 0:
        return None
    lcm_m = tuple(max(a, b) for a, b in zip(fm, gm))
    u, v, _ = sympy.gcdex(fc, gc)
    return f.mul_term(tuple(a - b for a, b in zip(lcm_m, fm)), int(u)) + g.mul_term(
        tuple(a - b for a, b in zip(lcm_m, gm)), int(v)
    )


def _interreduce(gens, order):
    """Mutually E-reduce a generator list (cheap preprocessing, not a GB)."""
    gens = [g for g in gens if not g.is_zero()]
    for _ in range(4):
        gens.sort(
            key=lambda g: (order.key(g.leading_monomial(order)), abs(g.leading_coefficient(order)))
        )
        out = []
        changed = False
        for g in gens:
            r = normal_form(g, out, order)
            if r != g:
                changed = True
            if not r.is_zero():
                out.append(r)
        gens = out
        if not changed:
            break
    return gens


_GB_MEMO = {}


def strong_gb(I, order=DEGREVLEX):
    """Reduced canonical strong Groebner basis of an ideal over Z."""
    import heapq

    gens = I.gens if isinstance(I, Ideal) else tuple(g for g in I if not g.is_zero())
    ring = I.ring if isinstance(I, Ideal) else (gens[0].ring if gens else ())
    memo_key = (order, ring, frozenset(gens))
    cached = _GB_MEMO.get(memo_key)
    if cached is not None:
        return cached
    basis = _interreduce(list(gens), order)

    def pair_key(i, j):
        lcm = tuple(
            max(a, b)
            for a, b in zip(
                basis[i].leading_monomial(order), basis[j].leading_monomial(order)
            )
        )
        return order.key(lcm)

    queue = [(pair_key(i, j), i, j) for j in range(len(basis)) for i in range(j)]
    heapq.heapify(queue)
    while queue:
        _, i, j = heapq.heappop(queue)
        for cand in (_spoly(basis[i], basis[j], order), _gpoly(basis[i], basis[j], order)):
            if cand is None:
                continue
            r = normal_form(cand, basis, order)
            if not r.is_zero():
                basis.append(r)
                new = len(basis) - 1
                for k in range(new):
                    heapq.heappush(queue, (pair_key(k, new), k, new))
    result = _reduce_basis(basis, order)
    if len(_GB_MEMO) > 60000:
        _GB_MEMO.clear()
    _GB_MEMO[memo_key] = result
    return result


def _reduce_basis(basis, order):
    basis = [(-g if g.leading_coefficient(order) < 0 else g) for g in basis if not g.is_zero()]
    basis.sort(
        key=lambda g: (order.key(g.leading_monomial(order)), abs(g.leading_coefficient(order)))
    )
    minimal = []
    for g in basis:
        gm, gc = g.leading_term(order)
        if any(
            all(a >= b for a, b in zip(gm, h.leading_monomial(order)))
            and gc % h.leading_coefficient(order) == 0
            for h in minimal
        ):
            continue
        minimal.append(g)
    reduced = list(minimal)
    changed = True
    while changed:
        changed = False
        for i, g in enumerate(reduced):
            others = reduced[:i] + reduced[i + 1 :]
            r = normal_form(g, others, order)
            if r != g:
                changed = True
                if r.is_zero():
                    reduced.pop(i)
                else:
                    if r.leading_coefficient(order) < 0:
                        r = -r
                    reduced[i] = r
                break
    reduced.sort(key=lambda g: (order.key(g.leading_monomial(order)), sorted(g.terms.items())))
    return GroebnerBasis(tuple(reduced), order, "integers")


# -- membership and unit tests ---------------------------------------------------


def membership(f, I):
    G = I.groebner() if isinstance(I, Ideal) else I
    return normal_form(f, G).is_zero()


def is_unit_ideal(I):
    G = I.groebner() if isinstance(I, Ideal) else I
    return any(g.is_constant() and abs(g.constant_value()) == 1 for g in G)


# -- elimination, intersection, saturation, contraction ---------------------------


def eliminate(I, drop):
    """Generators of I inter Z[ring minus drop], presented over the same ring."""
    drop = list(drop)
    ring = I.ring
    perm = tuple(v for v in ring if v in drop) + tuple(v for v in ring if v not in drop)
    J = Ideal(perm, [g.extend_ring(perm) for g in I.gens])
    G = strong_gb(J, block_order(len(drop)))
    kept = [g for g in G if not (g.variables_used() & set(drop))]
    return Ideal(ring, [g.extend_ring(ring) for g in kept])


def _fresh_name(ring, base):
    name = base
    while name in ring:
        name += "_"
    return name


def intersect(I, J):
    """I inter J via eliminating t from t*I + (1-t)*J."""
    if I.ring != J.ring:
        raise RingMismatchError("intersection over different rings")
    ring = I.ring
    if I.is_zero_ideal() or J.is_zero_ideal():
        return Ideal.zero(ring)
    t = _fresh_name(ring, "t@")
    big = (t,) + ring
    tv = Poly.var(big, t)
    one_minus_t = Poly.const(big, 1) - tv
    gens = [tv * g.extend_ring(big) for g in I.gens]
    gens += [one_minus_t * g.extend_ring(big) for g in J.gens]
    G = strong_gb(Ideal(big, gens), block_order(1))
    kept = [g for g in G if t not in g.variables_used()]
    return Ideal(ring, [g.restrict_ring(ring) for g in kept])


def _strip_term_content(g, mono, primes):
    """Divide g by the largest power of the given monomial and primes.

    Sound inside a saturation by a term supported on mono/primes: the
    quotient lies in (I : f^inf) whenever g does.
    """
    changed = True
    while changed:
        changed = False
        for i, e in enumerate(mono):
            if e and all(m[i] >= 1 for m in g.terms):
                g = Poly(g.ring, {tuple(v - (1 if k == i else 0) for k, v in enumerate(m)): c for m, c in g.terms.items()})
                changed = True
        for p in primes:
            if all(c % p == 0 for c in g.terms.values()):
                g = Poly(g.ring, {m: c // p for m, c in g.terms.items()})
                changed = True
    return g


def saturate(I, f):
    """(I : f^infinity) via eliminating w from I + <1 - w*f>.

    When f is a single term, generators are first divided by their f-content
    (a cheap partial saturation that keeps the Groebner step small).
    """
    if isinstance(f, int):
        f = Poly.const(I.ring, f)
    if f.is_zero():
        raise ValueError("saturation by zero")
    ring = I.ring
    gens = list(I.gens)
    if len(f.terms) == 1:
        ((mono, coeff),) = f.terms.items()
        primes = primefactors(abs(coeff)) if abs(coeff) > 1 else set()
        gens = [_strip_term_content(g, mono, primes) for g in gens]
        if f.is_constant() and abs(coeff) == 1:
            return Ideal(ring, gens)
    stripped = list(gens)
    w = _fresh_name(ring, "w@")
    big = (w,) + ring
    gens = [g.extend_ring(big) for g in gens]
    gens.append(Poly.const(big, 1) - Poly.var(big, w) * f.extend_ring(big))
    G = strong_gb(Ideal(big, gens), block_order(1))
    kept = [g.restrict_ring(ring) for g in G if w not in g.variables_used()]
    return _small_presentation(ring, stripped, kept)


def _small_presentation(ring, candidates, kept):
    """Prefer a short generating set over the saturation's fat canonical GB.

    If the pre-division candidates already generate everything, use them;
    otherwise take a minimal size-sorted prefix of the basis.
    """
    target = Ideal(ring, kept)
    cand = Ideal(ring, candidates)
    if all(membership(g, cand) for g in kept):
        return cand
    ranked = sorted(kept, key=lambda g: (g.total_degree(), len(g.terms), max(abs(c) for c in g.terms.values())))
    for k in range(1, len(ranked)):
        head = Ideal(ring, ranked[:k])
        if all(membership(g, head) for g in ranked[k:]):
            return head
    return target


def contract_to_integers(I):
    """The nonnegative generator of I inter Z (0 for the zero contraction)."""
    consts = [abs(g.constant_value()) for g in I.groebner() if g.is_constant()]
    return min(consts) if consts else 0


def radical_contains(I, f):
    """f in rad(I), by the Rabinowitsch trick."""
    if isinstance(f, int):
        f = Poly.const(I.ring, f)
    ring = I.ring
    w = _fresh_name(ring, "w@")
    big = (w,) + ring
    gens = [g.extend_ring(big) for g in I.gens]
    gens.append(Poly.const(big, 1) - Poly.var(big, w) * f.extend_ring(big))
    return is_unit_ideal(Ideal(big, gens))


def primefactors(n):
    """Set of distinct prime divisors of n >= 1 (empty for 1)."""
    if n < 1:
        raise ValueError("primefactors needs a positive integer")
    if n == 1:
        return set()
    return {int(p) for p in sympy.factorint(int(n))}


# -- field Groebner bases (Q and F_p) with integer representatives ----------------


def _field_normalize(f, p):
    if p is None:
        return f.primitive()
    f = Poly(f.ring, {m: c % p for m, c in f.terms.items()})
    if f.is_zero():
        return f
    inv = pow(f.leading_coefficient(DEGREVLEX), -1, p)
    return Poly(f.ring, {m: (c * inv) % p for m, c in f.terms.items()})


def _field_reduce(f, basis, order, p):
    """Remainder of f modulo basis over Q (fraction-free) or F_p."""
    if p is not None:
        f = Poly(f.ring, {m: c % p for m, c in f.terms.items()})
    result = Poly.zero(f.ring)
    h = f
    lead = [(g.leading_monomial(order), g.leading_coefficient(order), g) for g in basis]
    while not h.is_zero():
        hm, hc = h.leading_term(order)
        for gm, gc, g in lead:
            if all(a >= b for a, b in zip(hm, gm)):
                shift = tuple(a - b for a, b in zip(hm, gm))
                if p is None:
                    # fraction-free: scale the whole running value by gc
                    result = result * gc
                    h = h * gc - g.mul_term(shift, hc)
                else:
                    h = Poly(
                        h.ring,
                        {
                            m: c % p
                            for m, c in (h - g.mul_term(shift, hc)).terms.items()
                        },
                    )
                break
        else:
            result = result + Poly(h.ring, {hm: hc})
            h = h - Poly(h.ring, {hm: hc})
    return _field_normalize(result, p) if not result.is_zero() else result


_FIELD_GB_MEMO = {}


def groebner_field(gens, order=DEGREVLEX, p=None):
    """Reduced GB over Q (p=None) or F_p, as normalized integer polynomials.

    Over Q the representatives are primitive with positive leading
    coefficient; over F_p monic with coefficients in [0, p).
    """
    gens = list(gens)
    memo_key = (order, p, frozenset(gens))
    cached = _FIELD_GB_MEMO.get(memo_key)
    if cached is not None:
        return cached
    basis = []
    for g in gens:
        r = _field_reduce(g, basis, order, p)
        if not r.is_zero():
            basis.append(r)
    queue = [(i, j) for j in range(len(basis)) for i in range(j)]
    while queue:
        i, j = queue.pop(0)
        f, g = basis[i], basis[j]
        fm = f.leading_monomial(order)
        gm = g.leading_monomial(order)
        lcm_m = tuple(max(a, b) for a, b in zip(fm, gm))
        if tuple(a + b for a, b in zip(fm, gm)) == lcm_m:
            continue  # coprime leading monomials: S-poly reduces to zero
        fc, gc = f.leading_coefficient(order), g.leading_coefficient(order)
        s = f.mul_term(tuple(a - b for a, b in zip(lcm_m, fm)), gc) - g.mul_term(
            tuple(a - b for a, b in zip(lcm_m, gm)), fc
        )
        r = _field_reduce(s, basis, order, p)
        if not r.is_zero():
            basis.append(r)
            queue.extend((k, len(basis) - 1) for k in range(len(basis) - 1))
    basis.sort(key=lambda g: order.key(g.leading_monomial(order)))
    minimal = []
    for g in basis:
        gm = g.leading_monomial(order)
        if any(all(a >= b for a, b in zip(gm, h.leading_monomial(order))) for h in minimal):
            continue
        minimal.append(g)
    reduced = []
    for i, g in enumerate(minimal):
        others = minimal[:i] + minimal[i + 1 :]
        r = _field_reduce(g, others, order, p)
        if not r.is_zero():
            reduced.append(r)
    reduced.sort(key=lambda g: (order.key(g.leading_monomial(order)), sorted(g.terms.items())))
    tag = "rationals" if p is None else f"GF({p})"
    result = GroebnerBasis(tuple(reduced), order, tag)
    if len(_FIELD_GB_MEMO) > 60000:
        _FIELD_GB_MEMO.clear()
    _FIELD_GB_MEMO[memo_key] = result
    return result


def is_unit_ideal_field(gens, p=None):
    return any(g.is_constant() for g in groebner_field(gens, DEGREVLEX, p))


def krull_dim_rational(I):
    """Krull dimension of Q[ring]/I via the leading-term ideal of a Q-GB."""
    if contract_to_integers(I) != 0:
        raise ValueError("ideal meets Z nontrivially; handle it in a p-local chart")
    return _combinatorial_dim(I.gens, I.ring, p=None)


def _combinatorial_dim(gens, ring, p):
    """dim of k[ring]/<gens> over k = Q or F_p; -1 for the unit ideal."""
    G = groebner_field(gens, DEGREVLEX, p)
    if any(g.is_constant() for g in G.elements):
        return -1
    n = len(ring)
    lead_supports = [
        frozenset(i for i, e in enumerate(g.leading_monomial(DEGREVLEX)) if e)
        for g in G.elements
    ]
    for size in range(n, -1, -1):
        for subset in itertools.combinations(range(n), size):
            s = set(subset)
            if all(not supp <= s for supp in lead_supports):
                return size
    return 0


def scheme_codim(I):
    """Codimension of V(I) inside Spec Z[ring] (which has dimension len(ring)+1)."""
    if I.is_zero_ideal():
        return 0
    n = len(I.ring)
    c = contract_to_integers(I)
    if c == 0:
        return n - krull_dim_rational(I)
    dims = [_combinatorial_dim(I.gens, I.ring, p) for p in primefactors(c)]
    dim = max(dims) if dims else -1
    if dim < 0:
        return n + 1  # empty scheme
    return n + 1 - dim


# -- Jacobian data and constrained derivatives -------------------------------------


@dataclass(frozen=True)
class Minor:
    rows: tuple  # indices into row_gens
    cols: tuple  # indices into the ring
    det: Poly
    adjugate: tuple  # adjugate[a][b], a over cols, b over rows; A*M = det*Id
    row_gens: tuple  # the ambient generators the rows differentiate


@dataclass
class JacobianData:
    gens: tuple
    ring: tuple
    matrix: list  # matrix[i][j] = d gens[i] / d ring[j]
    minors: list = field(default_factory=list)


def _det(matrix):
    n = len(matrix)
    if n == 1:
        return matrix[0][0]
    ring = matrix[0][0].ring
    total = Poly.zero(ring)
    for j in range(n):
        entry = matrix[0][j]
        if entry.is_zero():
            continue
        sub = [row[:j] + row[j + 1 :] for row in matrix[1:]]
        cof = _det(sub)
        total = total + entry * cof if j % 2 == 0 else total - entry * cof
    return total


def jacobian_data(I_Z, codim=None):
    """All codim-square minors of the Jacobian of I_Z, with dets and adjugates."""
    gens = I_Z.groebner().elements or I_Z.gens
    ring = I_Z.ring
    matrix = [[g.derivative(v) for v in ring] for g in gens]
    data = JacobianData(tuple(gens), ring, matrix)
    c = scheme_codim(I_Z) if codim is None else codim
    if c == 0 or not gens:
        return data
    c = min(c, len(gens), len(ring))
    for rows in itertools.combinations(range(len(gens)), c):
        for cols in itertools.combinations(range(len(ring)), c):
            sub = [[matrix[i][j] for j in cols] for i in rows]
            det = _det(sub)
            if det.is_zero():
                continue
            n = len(rows)
            adj = []
            for a in range(n):  # row of adjugate ~ column index of M
                adj_row = []
                for b in range(n):  # column of adjugate ~ row index of M
                    msub = [
                        [sub[r][cc] for cc in range(n) if cc != a]
                        for r in range(n)
                        if r != b
                    ]
                    cof = _det(msub) if msub else Poly.const(ring, 1)
                    adj_row.append(cof if (a + b) % 2 == 0 else -cof)
                adj.append(tuple(adj_row))
            data.minors.append(Minor(rows, cols, det, tuple(adj), tuple(gens)))
    data.minors.sort(
        key=lambda m: (
            m.det.total_degree(),
            len(m.det.terms),
            sorted(m.det.terms.items()),
            m.rows,
            m.cols,
        )
    )
    return data


def choose_cover(jac, I_X, within=None):
    """Greedy minor subset whose determinant opens cover X up to vertical slices.

    Coverage is declared once I_X + <selected dets> contains a nonzero
    integer (char-0 covering).  `within` is an optional open-set witness: a
    branch that only owns D(within) may discard the V(within) part before
    testing.  Exhausting all minors without coverage raises CoverError,
    signalling a non-regular ambient input.
    """
    if not jac.minors:
        raise CoverError("ambient Jacobian has no nonzero minors")

    def covered(acc):
        if contract_to_integers(acc) != 0:
            return True
        if within is not None and not (within.is_constant() and abs(within.constant_value()) == 1):
            local = saturate(acc, within.extend_ring(acc.ring))
            return is_unit_ideal(local) or contract_to_integers(local) != 0
        return False

    selected = []
    acc = I_X
    for m in jac.minors:
        if membership(m.det, acc):
            continue
        selected.append(m)
        acc = acc + [m.det]
        if covered(acc):
            return selected
    if covered(acc):
        return selected
    raise CoverError("Jacobian minors do not cover X; ambient not regular?")


def constrained_derivative(f, param, minor, I_Z, reduce_mod=True):
    """q * (df/d param) on Z inter D(q), by the cofactor chain rule.

    param must not be a column of the minor; the result is
    q * df/dparam - sum_{row l, col k} dg_l/dparam * A[k][l] * df/dx_k,
    optionally reduced modulo I_Z.
    """
    ring = f.ring
    if param in (ring[c] for c in minor.cols):
        raise ValueError(f"{param!r} is a column of the minor")
    result = minor.det * f.derivative(param)
    for a, k in enumerate(minor.cols):
        dfk = f.derivative(ring[k])
        if dfk.is_zero():
            continue
        for b, l in enumerate(minor.rows):
            dgl = minor.row_gens[l].derivative(param)
            if dgl.is_zero():
                continue
            result = result - dgl * minor.adjugate[a][b] * dfk
    if reduce_mod and not I_Z.is_zero_ideal():
        result = nf_mod_ambient(result, I_Z)
    return result


# -- normal form w.r.t. the ambient, solvable variables first ---------------------


def _solvable_variables(I_Z):
    """Variables v solved by a generator of the form +-v + (v-free terms)."""
    solvable = []
    candidates = list(I_Z.gens) + list(I_Z.groebner().elements)
    for v in I_Z.ring:
        i = I_Z.ring.index(v)
        for g in candidates:
            v_terms = {m: c for m, c in g.terms.items() if m[i]}
            if len(v_terms) == 1:
                ((m, c),) = v_terms.items()
                if abs(c) == 1 and sum(m) == 1:
                    solvable.append(v)
                    break
    return solvable


def ambient_nf_context(I_Z):
    """(permuted ring, GB) for normal forms with ambient-solvable variables first."""
    solvable = _solvable_variables(I_Z)
    perm = tuple(solvable) + tuple(v for v in I_Z.ring if v not in solvable)
    order = block_order(len(solvable)) if solvable else DEGREVLEX
    G = strong_gb(Ideal(perm, [g.extend_ring(perm) for g in I_Z.gens]), order)
    return perm, G


def nf_mod_ambient(f_or_ideal, I_Z, context=None):
    """Normal form(s) w.r.t. I_Z under a block order with solvable vars first."""
    if I_Z.is_zero_ideal():
        return f_or_ideal
    perm, G = context if context is not None else ambient_nf_context(I_Z)

    def nf_one(f):
        return normal_form(f.extend_ring(perm), G).extend_ring(I_Z.ring)

    if isinstance(f_or_ideal, Poly):
        return nf_one(f_or_ideal)
    return Ideal(I_Z.ring, [nf_one(g) for g in f_or_ideal.gens])
