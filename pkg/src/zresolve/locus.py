"""Maximal-order loci and the refined order invariant in mixed characteristic.

The four core routines: the characteristic-zero maximal-order locus (plain
derivative loops plus covered constrained-derivative loops), interesting
prime detection, Hasse-derivative ideal lists in the p-rewritten ring, and
their arithmetic combination.  On top sits the ambient descent that turns
maximal order into the refined order (alpha, delta), and the boundary
refinement producing (alpha, delta, sigma).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

from .errors import DescentError, InternalError
from .ideals import (
    Ideal,
    ambient_nf_context,
    choose_cover,
    constrained_derivative,
    contract_to_integers,
    groebner_field,
    intersect,
    is_unit_ideal,
    is_unit_ideal_field,
    jacobian_data,
    membership,
    nf_mod_ambient,
    primefactors,
    saturate,
    scheme_codim,
)
from .poly import Poly, is_placeholder_name

_MAX_ROUNDS = 120


@dataclass(frozen=True)
class OrderResult:
    maxord: int
    locus: Ideal


@dataclass(frozen=True)
class ArithOrderResult:
    maxord: int
    pieces: tuple  # ((prime or 0, Ideal), ...); prime 0 tags the char-0 piece


@dataclass(frozen=True)
class RefinedOrder:
    alpha: int
    delta: float  # int, or math.inf for the zero residual ideal
    sigma: int | None = None

    def key(self):
        base = (self.alpha, self.delta)
        return base if self.sigma is None else (self.alpha, self.delta, self.sigma)

    def as_tuple(self):
        return self.key()

    def __str__(self):
        return "(" + ", ".join(str(v) for v in self.key()) + ")"


def _x_only_gens(I_Z, I_X):
    """Generators of I_X whose image in R/I_Z is (possibly) nonzero."""
    if I_Z.is_zero_ideal():
        return list(I_X.gens)
    return [g for g in I_X.gens if not membership(g, I_Z)]


def _multi_indices(width, weight):
    if width == 0:
        if weight == 0:
            yield ()
        return
    if width == 1:
        yield (weight,)
        return
    for first in range(weight + 1):
        for rest in _multi_indices(width - 1, weight - first):
            yield (first,) + rest


# -- Algorithm: maximal order locus over Q ----------------------------------------


def saturate_content(f):
    """Primitive part; over Q a generator and its content-free form agree."""
    return f.primitive()


def max_ord_char0(I_Z, I_X, within=None):
    """Maximal order of X in Z over Q and the ideal of its locus.

    Returns (0, <1>) when X has no points over Q.  Locus generators are
    primitive integer representatives of the Q-ideal.
    """
    ring = I_X.ring
    if is_unit_ideal_field(list(I_X.gens)):
        return OrderResult(0, Ideal(ring, [Poly.const(ring, 1)]))
    if I_Z.is_zero_ideal():
        gens = [g for g in groebner_field(I_X.gens)]
        I_max = I_X
        I_temp = Ideal(ring, gens)
        maxord = 0
        for _ in range(_MAX_ROUNDS):
            if is_unit_ideal_field(list(I_temp.gens)):
                return OrderResult(maxord, I_max)
            I_max = I_temp
            new = [g.derivative(v) for g in gens for v in ring]
            new = [g for g in new if not g.is_zero()]
            nxt = Ideal(ring, list(groebner_field(list(I_temp.gens) + new)))
            if nxt.gens == I_temp.gens:
                # derivative chain stabilized below the unit ideal
                return OrderResult(maxord, I_max)
            I_temp = nxt
            gens = list(I_temp.gens)
            maxord += 1
        raise InternalError("char-0 derivative loop did not terminate")

    jac = jacobian_data(I_Z)
    cover = choose_cover(jac, I_X, within)
    ctx = ambient_nf_context(I_Z)
    maxord, I_max = 1, None
    for minor in cover:
        params = [v for i, v in enumerate(ring) if i not in minor.cols]
        gens = [
            g
            for g in (nf_mod_ambient(x, I_Z, ctx) for x in _x_only_gens(I_Z, I_X))
            if not g.is_zero()
        ]
        I_temp = I_X
        I_old = I_X
        thisord = 0
        for _ in range(_MAX_ROUNDS):
            if is_unit_ideal_field(list((I_temp + I_Z).gens)):
                break
            I_old = I_temp
            new = []
            for f in gens:
                for y in params:
                    d = constrained_derivative(f, y, minor, I_Z)
                    if not d.is_zero():
                        d = saturate_content(d)
                        new.append(d)
            nxt = saturate(I_temp + new, minor.det)
            if nxt == I_temp:
                break  # stabilized below the unit ideal
            I_temp = nxt
            # saturation may introduce fresh generators; rebuild the list
            gens = [
                g
                for g in (nf_mod_ambient(x, I_Z, ctx) for x in I_temp.groebner().elements)
                if not g.is_zero()
            ]
            thisord += 1
        else:
            raise InternalError("char-0 covered loop did not terminate")
        if thisord >= maxord:
            if thisord == maxord and I_max is not None:
                I_max = intersect(I_max, I_old)
            else:
                maxord, I_max = thisord, I_old
    return OrderResult(maxord, I_max if I_max is not None else I_X)


# -- Algorithm: interesting primes --------------------------------------------------


def ip_start(I_Z, I_X, use_normal_form=True, within=None):
    """Entry step: ("done", primes) for a vertical ambient, else the formal
    derivative branches ("split", [branch state, ...])."""
    ring = I_X.ring
    c = contract_to_integers(I_Z)
    if c != 0:
        return ("done", primefactors(c))
    if I_Z.is_zero_ideal():
        branch = {
            "I_Z": I_Z,
            "minor": None,
            "params": list(ring),
            "gens": list(I_X.gens),
            "I_temp": I_X,
            "n": 0,
            "rounds": 0,
            "use_nf": use_normal_form,
            "done": False,
        }
        return ("split", [branch])
    jac = jacobian_data(I_Z)
    cover = choose_cover(jac, I_X, within)
    ctx = ambient_nf_context(I_Z)
    branches = []
    for minor in cover:
        gens = _x_only_gens(I_Z, I_X)
        if use_normal_form:
            gens = [g for g in (nf_mod_ambient(x, I_Z, ctx) for x in gens) if not g.is_zero()]
        branches.append(
            {
                "I_Z": I_Z,
                "minor": minor,
                "params": [v for i, v in enumerate(ring) if i not in minor.cols],
                "gens": gens,
                "I_temp": I_X,
                "n": 0,
                "rounds": 0,
                "use_nf": use_normal_form,
                "done": False,
            }
        )
    return ("split", branches)


def ip_round(branch):
    """One formal derivative round; sets done and n (the contraction)."""
    if branch["rounds"] >= _MAX_ROUNDS:
        raise InternalError("interesting-prime loop did not terminate")
    I_Z, minor = branch["I_Z"], branch["minor"]
    new = []
    for f in branch["gens"]:
        for y in branch["params"]:
            if minor is not None and branch["use_nf"]:
                d = constrained_derivative(f, y, minor, I_Z)
            else:
                d = f.derivative(y)
            if not d.is_zero():
                new.append(d)
    nxt = branch["I_temp"] + new
    out = dict(branch)
    out["rounds"] = branch["rounds"] + 1
    if not new or nxt == branch["I_temp"]:
        out["done"] = True  # stabilized with contraction zero
        out["n"] = 0
        return out
    out["I_temp"] = nxt
    out["gens"] = new
    n = contract_to_integers(nxt + I_Z) if not I_Z.is_zero_ideal() else contract_to_integers(nxt)
    out["n"] = n
    out["done"] = n != 0
    return out


def ip_primes_of(branch):
    n = branch["n"]
    return primefactors(n) if n > 1 else set()


def interesting_primes(I_Z, I_X, use_normal_form=True, within=None):
    """Primes above which the maximal-order locus may have vertical components.

    With use_normal_form=False the loop mimics the characteristic-zero case
    on the raw generators with plain partial derivatives, reproducing the
    known failure mode on non-reduced generator presentations.
    """
    kind, payload = ip_start(I_Z, I_X, use_normal_form, within)
    if kind == "done":
        return payload
    result = set()
    for branch in payload:
        while not branch["done"]:
            branch = ip_round(branch)
        result |= ip_primes_of(branch)
    return result


# -- Algorithm: Hasse derivative lists ----------------------------------------------


def hasse_deriv_list(J_Z, J_X, params, minor=None):
    """RetList with RetList[i] = J_Z + <D_a f : f an X-generator, |a| <= i-1>.

    Trivial ambient: Hasse derivatives extracted termwise; the list stops at
    stabilization.  Nontrivial ambient (a covering minor is given): iterated
    constrained derivatives divided by the running multiplicity, with each
    round saturated by det(minor); the loop stops when the contraction to Z
    is nonzero.
    """
    ring = J_X.ring
    x_gens = _x_only_gens(J_Z, J_X)
    if minor is None:
        if not J_Z.is_zero_ideal():
            raise ValueError("nontrivial ambient needs a covering minor")
        current = J_X
        ret = [current]
        degree_cap = max((g.total_degree() for g in x_gens), default=0)
        for level in range(1, degree_cap + 2):
            new = []
            for g in x_gens:
                for a_params in _multi_indices(len(params), level):
                    a = [0] * len(ring)
                    for name, e in zip(params, a_params):
                        a[ring.index(name)] = e
                    d = g.hasse_derivative(tuple(a))
                    if not d.is_zero():
                        new.append(d)
            nxt = current + new
            if nxt == current:
                break
            ret.append(nxt)
            current = nxt
        return ret

    q = minor.det
    base = saturate(Ideal(ring, list(J_Z.gens) + x_gens), q)
    ret = [base]
    # layer holds the iterated divided derivatives of the previous weight:
    # multi-index over params -> {generator index -> polynomial}
    layer = {(0,) * len(params): {i: g for i, g in enumerate(x_gens)}}
    I_temp = Ideal(ring, list(J_Z.gens) + x_gens)
    for level in range(1, _MAX_ROUNDS):
        if contract_to_integers(I_temp) != 0:
            return ret
        new_layer = {}
        new_polys = []
        for a in _multi_indices(len(params), level):
            j0 = max(j for j, e in enumerate(a) if e)
            pred = tuple(e - 1 if j == j0 else e for j, e in enumerate(a))
            if pred not in layer:
                continue  # the whole path vanished
            for gi, f_prev in layer[pred].items():
                raw = constrained_derivative(f_prev, params[j0], minor, J_Z, reduce_mod=False)
                try:
                    d = raw.exact_div_int(a[j0]) if a[j0] > 1 else raw
                except ValueError as exc:
                    raise InternalError(
                        f"non-integer multiplicity correction at {a}: {exc}"
                    ) from exc
                if not d.is_zero():
                    new_layer.setdefault(a, {})[gi] = d
                    new_polys.append(d)
        if not new_polys:
            return ret
        I_temp = saturate(I_temp + new_polys, q)
        ret.append(I_temp)
        layer = new_layer
    raise InternalError("Hasse derivative loop did not terminate")


# -- Algorithm: maximal order locus over Z ------------------------------------------


def _fresh_placeholder(ring):
    name = "P"
    k = 2
    while name in ring:
        name = f"P{k}"
        k += 1
    return name


def _trimmed_length(entries, p):
    """Entries that are trivial in the stalk above p are trimmed from the tail.

    An entry is p-locally the unit ideal when it is <1> over Z or when its
    contraction to Z is nonzero and coprime to p.
    """
    m = len(entries)
    while m >= 1:
        e = entries[m - 1]
        if is_unit_ideal(e):
            m -= 1
            continue
        c = contract_to_integers(e)
        if c != 0 and c % p != 0:
            m -= 1
            continue
        break
    return m


def moa_prime_tokens(I_Z, I_X, p, use_normal_form=True, within=None):
    """Split & Replace: the rewritten per-stalk work items (p, J_X, J_Z, M)."""
    ring = I_X.ring
    if within is not None and is_unit_ideal(
        saturate(I_X + [Poly.const(ring, p)], within)
    ):
        return []  # the p-fiber is invisible on this branch's open set
    ctx = ambient_nf_context(I_Z) if not I_Z.is_zero_ideal() else None
    nf_gens = [
        g
        for g in (
            nf_mod_ambient(x, I_Z, ctx) if ctx is not None else x
            for x in _x_only_gens(I_Z, I_X)
        )
        if not g.is_zero()
    ]
    placeholder = _fresh_placeholder(ring)
    big = ring + (placeholder,)
    J_Z = Ideal(big, [g.p_rewrite(p, placeholder) for g in I_Z.gens])
    J_X = J_Z + [g.p_rewrite(p, placeholder) for g in nf_gens]
    if I_Z.is_zero_ideal():
        return [
            {"p": p, "J_Z": J_Z, "J_X": J_X, "minor": None, "params": list(big), "placeholder": placeholder, "ring": ring}
        ]
    jac = jacobian_data(J_Z)
    cover = choose_cover(jac, J_X, within)
    return [
        {
            "p": p,
            "J_Z": J_Z,
            "J_X": J_X,
            "minor": minor,
            "params": [v for i, v in enumerate(big) if i not in minor.cols],
            "placeholder": placeholder,
            "ring": ring,
        }
        for minor in cover
    ]


def moa_token_result(token):
    """HasseDer + Resubstitute & Eliminate on one work item: (p, m, ideal)."""
    entries = hasse_deriv_list(token["J_Z"], token["J_X"], token["params"], token["minor"])
    p, ph, ring = token["p"], token["placeholder"], token["ring"]
    subst = [Ideal(ring, [g.substitute(ph, p) for g in e.gens]) for e in entries]
    m = _trimmed_length(subst, p)
    if m == 0:
        return (p, 0, None)
    return (p, m, subst[m - 1])


def moa_merge(state, result):
    """Glue & Collect: fold a per-stalk result into the running bookkeeping."""
    p, m, I = result
    if m == 0 or I is None:
        return state
    per_prime = dict(state.get("per_prime", {}))
    if p in per_prime:
        locord, I_max = per_prime[p]
        if m > locord:
            per_prime[p] = (m, I)
        elif m == locord:
            per_prime[p] = (m, intersect(I_max, I))
    else:
        per_prime[p] = (m, I)
    out = dict(state)
    out["per_prime"] = per_prime
    return out


def moa_finish(state):
    """Final comparison: strictly-greater resets, equal appends."""
    maxord = state["maxord0"]
    pieces = list(state["pieces0"])
    for p in sorted(state.get("per_prime", {})):
        locord, I_max = state["per_prime"][p]
        if I_max is None or is_unit_ideal(I_max):
            continue
        if locord >= maxord:
            if locord > maxord:
                maxord, pieces = locord, [(p, I_max)]
            else:
                pieces.append((p, I_max))
    return ArithOrderResult(maxord, tuple(pieces))


def max_ord_arith(I_Z, I_X, primes=None, use_normal_form=True, within=None):
    """Maximal order of X in Z over Z with per-prime locus pieces.

    Pieces are (0, ideal) for the characteristic-zero locus and (p, ideal)
    for loci detected locally at an interesting prime p.
    """
    x_gens = _x_only_gens(I_Z, I_X)
    if not x_gens:
        return ArithOrderResult(0, ())
    char0 = max_ord_char0(I_Z, I_X, within)
    plist = (
        sorted(interesting_primes(I_Z, I_X, use_normal_form, within))
        if primes is None
        else sorted(primes)
    )
    state = {
        "maxord0": char0.maxord,
        "pieces0": [(0, char0.locus)] if char0.maxord >= 1 else [],
        "per_prime": {},
    }
    for p in plist:
        for token in moa_prime_tokens(I_Z, I_X, p, use_normal_form, within):
            state = moa_merge(state, moa_token_result(token))
    return moa_finish(state)


# -- refined order via ambient descent ----------------------------------------------


def ambient_dimension(I_Z, nvars):
    """N = dim Spec Z[x] - codim(Z) = nvars + 1 - codim."""
    return nvars + 1 - scheme_codim(I_Z)


def refined_order(chart_or_ambient, x_ideal=None, N=None):
    """Maximal refined order (alpha, delta) of X and its locus pieces.

    Accepts a chart-like object (attributes ambient, x_ideal, N) or the
    triple (I_Z, I_X, N).  Returns (RefinedOrder, pieces) where pieces is a
    tuple of (prime-or-0, Ideal); for delta = 1 the locus is X itself.
    """
    if x_ideal is None:
        chart = chart_or_ambient
        I_Z, I_X, N = chart.ambient, chart.x_ideal, chart.N
    else:
        I_Z, I_X = chart_or_ambient, x_ideal
        if N is None:
            N = ambient_dimension(I_Z, len(I_X.ring))
    stack = [descend_start(I_Z, I_X, N)]
    results = []
    while stack:
        kind, payload = descend_step(stack.pop())
        if kind == "report":
            results.append(payload)
        elif kind == "branches":
            stack.extend(payload)
    return descend_finish(results, I_X)


def descend_start(I_Z, I_X, N):
    return {"I_Z": I_Z, "I_X": I_X, "depth": 0, "witnesses": [], "N": N}


def descend_finish(results, I_X):
    """Lex-maximum over branch reports; pieces glued by witness saturation."""
    if not results:
        return RefinedOrder(0, 0), ()  # X empty on every branch
    best = max(r[0].key() for r in results)
    nu = RefinedOrder(*best)
    if nu.delta == 1:
        return nu, ((0, I_X),)
    merged = []
    for r_nu, r_pieces, witnesses in results:
        if r_nu.key() != best:
            continue
        for prime, piece in r_pieces:
            glued = piece
            for w in witnesses:
                if w.is_constant() and abs(w.constant_value()) == 1:
                    continue
                glued = saturate(glued, w)
            if is_unit_ideal(glued):
                continue
            if not any(p == prime and glued == existing for p, existing in merged):
                merged.append((prime, glued))
    return nu, minimal_pieces(merged)


def descend_step(state):
    """One descent move: ("report", (nu, pieces, witnesses)), ("branches",
    [state...]) to go one ambient dimension down, or ("empty", None)."""
    out = []
    _descend_once(
        state["I_Z"], state["I_X"], state["depth"], state["witnesses"], state["N"], out
    )
    return out[0] if out else ("empty", None)


def _descend_once(I_Z, I_X, depth, witnesses, N, out):
    within = None
    for w in witnesses:
        if w.is_constant() and abs(w.constant_value()) == 1:
            continue
        within = w if within is None else within * w

    def localized(J):
        if within is None:
            return J
        return saturate(J, within)

    if is_unit_ideal(I_X) or (within is not None and is_unit_ideal(localized(I_X))):
        return  # branch region misses X entirely
    if depth > N:
        raise DescentError("descent exceeded the ambient dimension; input not reduced?")
    ctx = ambient_nf_context(I_Z) if not I_Z.is_zero_ideal() else None
    nf_gens = [
        g
        for g in (
            nf_mod_ambient(x, I_Z, ctx) if ctx is not None else x
            for x in _x_only_gens(I_Z, I_X)
        )
        if not g.is_zero()
    ]
    if nf_gens and not I_Z.is_zero_ideal():
        # generators vanishing on the (localized) ambient as a set carry no
        # residual direction; X is reduced, so dropping them is exact
        from .ideals import radical_contains

        Z_loc = localized(I_Z)
        nf_gens = [g for g in nf_gens if not radical_contains(Z_loc, g)]
    if not nf_gens:
        # X coincides with the descended regular ambient: a regular point set
        out.append(("report", (RefinedOrder(N - depth, 1), ((0, I_X),), list(witnesses))))
        return

    res = max_ord_arith(I_Z, I_X, within=within)
    if res.maxord >= 2:
        out.append(
            ("report", (RefinedOrder(N - depth, res.maxord), res.pieces, list(witnesses)))
        )
        return

    ring = I_X.ring
    candidates = []
    for f in nf_gens:
        for v in ring:
            w = f.derivative(v)
            if not w.is_zero():
                candidates.append((f, w))
    candidates.sort(
        key=lambda fw: (
            fw[1].total_degree(),
            len(fw[1].terms),
            fw[0].total_degree(),
            len(fw[0].terms),
            max(abs(c) for c in fw[1].terms.values()),
        )
    )
    branches = []  # (hypersurface poly, witness poly)
    acc = I_X
    covered = False
    from .ideals import radical_contains

    for f, w in candidates:
        if radical_contains(acc, w):
            continue  # this open adds nothing new
        branches.append((f, w))
        acc = acc + [w]
        if is_unit_ideal(acc) or (within is not None and is_unit_ideal(localized(acc))):
            covered = True
            break
    if not covered and is_unit_ideal(localized(acc)):
        covered = True
    if not covered:
        n = contract_to_integers(localized(acc))
        if n == 0:
            raise DescentError("no invertible derivative covers X; descent stuck")
        for p in sorted(primefactors(n)):
            residual = acc + [Poly.const(ring, p)]
            if is_unit_ideal(localized(residual)):
                continue
            for f in nf_gens:
                fp = f.p_rewrite(p)
                w = fp.derivative(fp.ring[-1]).substitute(fp.ring[-1], p)
                if w.is_zero() or membership(w, residual):
                    continue
                branches.append((f, w))
                residual = residual + [w]
                if is_unit_ideal(localized(residual)):
                    break
            if not is_unit_ideal(localized(residual)):
                raise DescentError(f"descent cannot cover the fiber above {p}")
    out.append(
        (
            "branches",
            [
                {
                    "I_Z": I_Z + [f],
                    "I_X": I_X,
                    "depth": depth + 1,
                    "witnesses": witnesses + [w],
                    "N": N,
                }
                for f, w in branches
            ],
        )
    )


# -- boundary refinement: the log-refined order -------------------------------------


def _contains_variety(J, K):
    """V(J) is contained in V(K), i.e. every generator of K vanishes on V(J)."""
    from .ideals import radical_contains

    return all(radical_contains(J, g) for g in K.gens)


def minimal_pieces(pieces):
    """Drop pieces whose variety sits inside another piece's variety.

    A piece tagged with a prime p describes the stalk above p, so its
    variety is compared after adjoining p; the returned ideals stay raw.
    """
    pieces = list(pieces)

    def local(p, J):
        return J + [Poly.const(J.ring, p)] if p else J

    locals_ = [local(p, J) for p, J in pieces]
    kept = []
    for i, (p, J) in enumerate(pieces):
        redundant = False
        for j, (q, K) in enumerate(pieces):
            if i == j:
                continue
            if _contains_variety(locals_[i], locals_[j]):
                if _contains_variety(locals_[j], locals_[i]) and j > i:
                    continue  # same variety: keep the first occurrence
                redundant = True
                break
        if not redundant and not any(p == q and J == K for q, K in kept):
            kept.append((p, J))
    return tuple(kept)


def log_refined_locus(nu, pieces, boundary, x_ideal):
    """sigma = max old-boundary count on the nu-maximal locus, and that locus.

    boundary entries are (Ideal, status) pairs with status "old" or "new";
    for delta = 1 the base locus is X itself.
    """
    old = [b for b, status in boundary if status == "old"]
    base = pieces if nu.delta != 1 else ((0, x_ideal),)
    if not old:
        return RefinedOrder(nu.alpha, nu.delta, 0), base
    for b in range(len(old), 0, -1):
        found = []
        for subset in itertools.combinations(old, b):
            for prime, piece in base:
                J = piece
                for B in subset:
                    J = J + B.gens
                if not is_unit_ideal(J):
                    if not any(p == prime and J == e for p, e in found):
                        found.append((prime, J))
        if found:
            return RefinedOrder(nu.alpha, nu.delta, b), minimal_pieces(found)
    return RefinedOrder(nu.alpha, nu.delta, 0), base


def classify_component(I):
    """('horizontal', None) or ('vertical', p) for an irreducible component."""
    c = contract_to_integers(I)
    if c == 0:
        return ("horizontal", None)
    ps = primefactors(c)
    if len(ps) != 1:
        raise ValueError(f"contraction {c} has several primes; not a component")
    return ("vertical", next(iter(ps)))
