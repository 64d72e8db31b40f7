"""Sparse multivariate polynomials over Z.

A polynomial is a dict from exponent tuples to nonzero int coefficients,
tagged with the tuple of variable names it lives over.  Everything here is
exact integer arithmetic: Taylor shifts, Hasse derivatives (binomial rule,
always integral), and the p-power coefficient rewriting that introduces a
graded placeholder variable for a prime.
"""

from __future__ import annotations

import math
import re
from functools import reduce

from .errors import ParseError, RingMismatchError

# Names reserved for prime placeholders introduced by p_rewrite: P, P2, P3, ...
_PLACEHOLDER_RE = re.compile(r"^P[2-9]?[0-9]*$")


def is_placeholder_name(name: str) -> bool:
    return bool(_PLACEHOLDER_RE.match(name))


class MonomialOrder:
    """Global monomial order: degrevlex, lex, or a block order.

    block(k) compares the first k variables (degrevlex among themselves)
    before the rest, so it eliminates those k variables.
    """

    def __init__(self, kind="degrevlex", k=0):
        if kind not in ("degrevlex", "lex", "block"):
            raise ValueError(f"unknown order kind {kind!r}")
        self.kind = kind
        self.k = k

    def key(self, exps):
        if self.kind == "lex":
            return exps
        if self.kind == "degrevlex":
            return (sum(exps), tuple(-e for e in reversed(exps)))
        head, tail = exps[: self.k], exps[self.k :]
        return (
            (sum(head), tuple(-e for e in reversed(head))),
            (sum(tail), tuple(-e for e in reversed(tail))),
        )

    def __repr__(self):
        if self.kind == "block":
            return f"block({self.k})"
        return self.kind

    def __eq__(self, other):
        return (
            isinstance(other, MonomialOrder)
            and self.kind == other.kind
            and (self.kind != "block" or self.k == other.k)
        )

    def __hash__(self):
        return hash((self.kind, self.k if self.kind == "block" else 0))


DEGREVLEX = MonomialOrder("degrevlex")
LEX = MonomialOrder("lex")


def block_order(k: int) -> MonomialOrder:
    return MonomialOrder("block", k)


class Poly:
    """Immutable sparse polynomial with integer coefficients."""

    __slots__ = ("ring", "terms", "_hash", "_lead")

    def __init__(self, ring, terms):
        self.ring = tuple(ring)
        self.terms = {m: c for m, c in terms.items() if c}
        self._hash = None
        self._lead = None

    # -- constructors -------------------------------------------------

    @classmethod
    def zero(cls, ring):
        return cls(ring, {})

    @classmethod
    def const(cls, ring, c):
        ring = tuple(ring)
        if c == 0:
            return cls(ring, {})
        return cls(ring, {(0,) * len(ring): int(c)})

    @classmethod
    def var(cls, ring, name):
        ring = tuple(ring)
        i = ring.index(name)
        e = [0] * len(ring)
        e[i] = 1
        return cls(ring, {tuple(e): 1})

    # -- basics --------------------------------------------------------

    def is_zero(self):
        return not self.terms

    def is_constant(self):
        return all(sum(m) == 0 for m in self.terms)

    def constant_value(self):
        return self.terms.get((0,) * len(self.ring), 0)

    def total_degree(self):
        return max((sum(m) for m in self.terms), default=-1)

    def content(self):
        """Nonnegative gcd of the coefficients (0 for the zero polynomial)."""
        return reduce(math.gcd, (abs(c) for c in self.terms.values()), 0)

    def primitive(self):
        """Divide out the content; leading coefficient made positive."""
        c = self.content()
        if c == 0:
            return self
        f = self if c == 1 else Poly(self.ring, {m: v // c for m, v in self.terms.items()})
        if f.leading_coefficient(DEGREVLEX) < 0:
            f = -f
        return f

    def variables_used(self):
        used = set()
        for m in self.terms:
            for i, e in enumerate(m):
                if e:
                    used.add(self.ring[i])
        return used

    def sorted_terms(self, order=DEGREVLEX, reverse=True):
        return sorted(self.terms.items(), key=lambda t: order.key(t[0]), reverse=reverse)

    def leading_monomial(self, order=DEGREVLEX):
        if self._lead is None:
            self._lead = {}
        m = self._lead.get(order)
        if m is None:
            m = max(self.terms, key=order.key)
            self._lead[order] = m
        return m

    def leading_coefficient(self, order=DEGREVLEX):
        return self.terms[self.leading_monomial(order)]

    def leading_term(self, order=DEGREVLEX):
        m = self.leading_monomial(order)
        return m, self.terms[m]

    # -- ring surgery ----------------------------------------------------

    def extend_ring(self, new_ring):
        """Reinterpret over a larger variable list (superset, any positions)."""
        new_ring = tuple(new_ring)
        pos = [new_ring.index(v) for v in self.ring]
        n = len(new_ring)
        terms = {}
        for m, c in self.terms.items():
            e = [0] * n
            for i, ei in enumerate(m):
                e[pos[i]] = ei
            terms[tuple(e)] = c
        return Poly(new_ring, terms)

    def restrict_ring(self, new_ring):
        """Move to a smaller variable list; the dropped variables must be unused."""
        new_ring = tuple(new_ring)
        drop = [i for i, v in enumerate(self.ring) if v not in new_ring]
        for m in self.terms:
            if any(m[i] for i in drop):
                raise RingMismatchError(f"polynomial uses dropped variable: {self}")
        keep = [self.ring.index(v) for v in new_ring]
        return Poly(new_ring, {tuple(m[i] for i in keep): c for m, c in self.terms.items()})

    # -- arithmetic ------------------------------------------------------

    def _check(self, other):
        if self.ring != other.ring:
            raise RingMismatchError(f"{self.ring} vs {other.ring}")

    def __add__(self, other):
        if isinstance(other, int):
            other = Poly.const(self.ring, other)
        self._check(other)
        terms = dict(self.terms)
        for m, c in other.terms.items():
            v = terms.get(m, 0) + c
            if v:
                terms[m] = v
            else:
                terms.pop(m, None)
        return Poly(self.ring, terms)

    __radd__ = __add__

    def __neg__(self):
        return Poly(self.ring, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        if isinstance(other, int):
            other = Poly.const(self.ring, other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, int):
            if other == 0:
                return Poly.zero(self.ring)
            return Poly(self.ring, {m: c * other for m, c in self.terms.items()})
        self._check(other)
        terms = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = tuple(a + b for a, b in zip(m1, m2))
                v = terms.get(m, 0) + c1 * c2
                if v:
                    terms[m] = v
                else:
                    terms.pop(m, None)
        return Poly(self.ring, terms)

    __rmul__ = __mul__

    def __pow__(self, n):
        if n < 0:
            raise ValueError("negative power")
        result = Poly.const(self.ring, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def scale(self, c: int):
        return self * c

    def mul_term(self, mono, coeff):
        return Poly(
            self.ring,
            {tuple(a + b for a, b in zip(m, mono)): c * coeff for m, c in self.terms.items()},
        )

    def exact_div_int(self, d: int):
        """Divide every coefficient by d; raises if not exact."""
        if any(c % d for c in self.terms.values()):
            raise ValueError(f"non-exact integer division of {self} by {d}")
        return Poly(self.ring, {m: c // d for m, c in self.terms.items()})

    def __eq__(self, other):
        return isinstance(other, Poly) and self.ring == other.ring and self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.ring, frozenset(self.terms.items())))
        return self._hash

    # -- calculus ----------------------------------------------------------

    def derivative(self, name):
        i = self.ring.index(name)
        terms = {}
        for m, c in self.terms.items():
            if m[i]:
                e = list(m)
                e[i] -= 1
                terms[tuple(e)] = terms.get(tuple(e), 0) + c * m[i]
        return Poly(self.ring, terms)

    def hasse_derivative(self, a):
        """D_a f with D_a(x^b) = binom(b, a) x^(b-a); exact over Z."""
        a = tuple(a)
        if len(a) != len(self.ring):
            raise ValueError("multi-index length mismatch")
        terms = {}
        for m, c in self.terms.items():
            if all(mi >= ai for mi, ai in zip(m, a)):
                coeff = c
                for mi, ai in zip(m, a):
                    if ai:
                        coeff *= math.comb(mi, ai)
                e = tuple(mi - ai for mi, ai in zip(m, a))
                v = terms.get(e, 0) + coeff
                if v:
                    terms[e] = v
                else:
                    terms.pop(e, None)
        return Poly(self.ring, terms)

    def order_at_origin(self, names=None):
        """Minimal total degree in `names` over the nonzero terms; inf if zero.

        This is the order of the polynomial at the ideal generated by `names`
        (all variables when omitted).
        """
        if self.is_zero():
            return math.inf
        if names is None:
            idx = range(len(self.ring))
        else:
            idx = [self.ring.index(n) for n in names]
        return min(sum(m[i] for i in idx) for m in self.terms)

    def taylor_shift(self, names=None, shift_names=None):
        """Return (g, shifts) with g = f(x_i + t_i for i in names).

        g lives over ring + fresh shift variables; shifts maps each shifted
        variable name to its shift-variable name.  The coefficient of t^a in
        g is the a-th Hasse derivative of f.
        """
        if names is None:
            names = list(self.ring)
        if shift_names is None:
            shift_names = {}
            for n in names:
                t = f"t{n}"
                while t in self.ring or t in shift_names.values():
                    t += "_"
                shift_names[n] = t
        new_ring = self.ring + tuple(shift_names[n] for n in names)
        idx = {n: self.ring.index(n) for n in names}
        tpos = {n: len(self.ring) + j for j, n in enumerate(names)}
        width = len(new_ring)
        result = {}
        for m, c in self.terms.items():
            # expand prod_i (x_i + t_i)^{m_i} over the shifted positions
            expansion = {(): c}
            for n in names:
                i = idx[n]
                b = m[i]
                new_exp = {}
                for key, coeff in expansion.items():
                    for a in range(b + 1):
                        k2 = key + ((b - a, a),)
                        new_exp[k2] = new_exp.get(k2, 0) + coeff * math.comb(b, a)
                expansion = new_exp
            for key, coeff in expansion.items():
                e = [0] * width
                for i, ei in enumerate(m):
                    e[i] = ei
                for (xe, te), n in zip(key, names):
                    e[idx[n]] = xe
                    e[tpos[n]] = te
                e = tuple(e)
                v = result.get(e, 0) + coeff
                if v:
                    result[e] = v
                else:
                    result.pop(e, None)
        return Poly(new_ring, result), shift_names

    # -- substitution and p-rewriting ------------------------------------

    def substitute(self, name, value):
        """Exact evaluation homomorphism sending one variable to value.

        value may be an int or a Poly over the remaining (or full) ring.
        The variable is removed from the resulting ring.
        """
        i = self.ring.index(name)
        base_ring = self.ring[:i] + self.ring[i + 1 :]
        if isinstance(value, int):
            value = Poly.const(base_ring, value)
        if name in value.variables_used():
            raise RingMismatchError(f"substitution value still uses {name!r}")
        extra = tuple(v for v in value.ring if v not in base_ring and v != name)
        new_ring = base_ring + extra
        value = Poly(
            tuple(v for v in value.ring if v != name),
            {
                tuple(e for e, v in zip(m, value.ring) if v != name): c
                for m, c in value.terms.items()
            },
        ).extend_ring(new_ring)
        result = Poly.zero(new_ring)
        powers = {0: Poly.const(new_ring, 1)}
        for m, c in self.terms.items():
            e = m[:i] + m[i + 1 :] + (0,) * len(extra)
            k = m[i]
            if k not in powers:
                powers[k] = value ** k
            result = result + powers[k].mul_term(e, c)
        return result

    def rename(self, mapping):
        """Rename variables; mapping is old-name -> new-name."""
        new_ring = tuple(mapping.get(v, v) for v in self.ring)
        if len(set(new_ring)) != len(new_ring):
            raise RingMismatchError("renaming collides")
        return Poly(new_ring, dict(self.terms))

    def p_rewrite(self, p, placeholder=None):
        """Replace each coefficient c by (c / p^l) P^l with l maximal.

        P is a fresh placeholder variable appended to the ring; substituting
        P -> p recovers the polynomial exactly.  Every coefficient of the
        result is coprime to p.
        """
        from sympy import isprime

        if not isprime(p):
            raise ValueError(f"{p} is not prime")
        if placeholder is None:
            placeholder = "P"
            k = 2
            while placeholder in self.ring:
                placeholder = f"P{k}"
                k += 1
        new_ring = self.ring + (placeholder,)
        terms = {}
        for m, c in self.terms.items():
            l = 0
            while c % p == 0:
                c //= p
                l += 1
            terms[m + (l,)] = c
        return Poly(new_ring, terms)

    def evaluate(self, point):
        """Evaluate at a dict name -> int; all variables must be covered."""
        total = 0
        idx = [point[v] for v in self.ring]
        for m, c in self.terms.items():
            v = c
            for val, e in zip(idx, m):
                if e:
                    v *= val ** e
            total += v
        return total

    # -- text ----------------------------------------------------------------

    def __str__(self):
        if not self.terms:
            return "0"
        pieces = []
        for m, c in self.sorted_terms():
            factors = []
            for name, e in zip(self.ring, m):
                if e == 1:
                    factors.append(name)
                elif e > 1:
                    factors.append(f"{name}^{e}")
            if not factors:
                body = str(abs(c))
            else:
                body = "*".join(factors)
                if abs(c) != 1:
                    body = f"{abs(c)}*{body}"
            if not pieces:
                pieces.append(body if c > 0 else f"-{body}")
            else:
                pieces.append(f"+ {body}" if c > 0 else f"- {body}")
        return " ".join(pieces)

    def __repr__(self):
        return f"Poly({self})"


# -- parser -------------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<int>\d+)|(?P<name>[a-zA-Z][a-zA-Z0-9_']*)|(?P<op>[-+*^()]))"
)


def tokenize(text, line=None):
    pos, out = 0, []
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m or m.end() == pos:
            rest = text[pos:].lstrip()
            if not rest:
                break
            raise ParseError(f"unexpected character {rest[0]!r}", line, pos + 1)
        pos = m.end()
        if m.lastgroup:
            out.append((m.lastgroup, m.group(m.lastgroup), m.start(m.lastgroup) + 1))
    return out


def parse_poly(text, ring, line=None):
    """Parse the shared polynomial syntax: ints, names, + - * ^, parens."""
    ring = tuple(ring)
    tokens = tokenize(text, line)
    pos = 0

    def peek():
        return tokens[pos] if pos < len(tokens) else (None, None, len(text))

    def take():
        nonlocal pos
        tok = peek()
        pos += 1
        return tok

    def parse_expr():
        kind, val, col = peek()
        sign = 1
        while kind == "op" and val in "+-":
            take()
            if val == "-":
                sign = -sign
            kind, val, col = peek()
        term = parse_term()
        if sign < 0:
            term = -term
        while True:
            kind, val, col = peek()
            if kind == "op" and val in "+-":
                take()
                rhs = parse_term()
                term = term + rhs if val == "+" else term - rhs
            else:
                return term

    def parse_term():
        f = parse_factor()
        while True:
            kind, val, col = peek()
            if kind == "op" and val == "*":
                take()
                f = f * parse_factor()
            elif kind in ("int", "name") or (kind == "op" and val == "("):
                raise ParseError("missing operator (implicit products are not allowed)", line, col)
            else:
                return f

    def parse_factor():
        kind, val, col = peek()
        if kind == "op" and val == "-":
            take()
            return -parse_factor()
        base = parse_atom()
        kind, val, col = peek()
        if kind == "op" and val == "^":
            take()
            kind, val, col = take()
            if kind != "int":
                raise ParseError("exponent must be a nonnegative integer", line, col)
            return base ** int(val)
        return base

    def parse_atom():
        kind, val, col = take()
        if kind == "int":
            return Poly.const(ring, int(val))
        if kind == "name":
            if val not in ring:
                raise ParseError(f"unknown variable {val!r}", line, col)
            return Poly.var(ring, val)
        if kind == "op" and val == "(":
            inner = parse_expr()
            kind, val, col = take()
            if val != ")":
                raise ParseError("expected ')'", line, col)
            return inner
        raise ParseError(f"unexpected token {val!r}", line, col)

    if not tokens:
        raise ParseError("empty polynomial", line, 1)
    result = parse_expr()
    if pos != len(tokens):
        raise ParseError(f"trailing input {tokens[pos][1]!r}", line, tokens[pos][2])
    return result
