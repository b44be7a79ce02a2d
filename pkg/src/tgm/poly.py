"""Sparse multivariate polynomials over Q.

A :class:`MultiPoly` carries an ordered tuple of variable names and a dict
from exponent tuples to nonzero Fractions. Binary operations between
polynomials over different variable lists work in the union ring (left
operand's variables first).

Text syntax: integer or rational constants, alphanumeric variable names,
``+ - * / ^`` (``**`` is accepted for ``^``) and parentheses. Division is
only by constants.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .exactmath import as_rat, format_rat

Exp = tuple[int, ...]


class PolyError(ValueError):
    pass


class MultiPoly:
    __slots__ = ("variables", "terms")

    def __init__(self, variables: Sequence[str], terms: Mapping[Exp, object] | None = None):
        variables = tuple(variables)
        if len(set(variables)) != len(variables):
            raise PolyError(f"repeated variable in {variables}")
        clean = {}
        for exp, c in (terms or {}).items():
            exp = tuple(int(e) for e in exp)
            if len(exp) != len(variables) or any(e < 0 for e in exp):
                raise PolyError(f"bad exponent {exp} for variables {variables}")
            c = as_rat(c)
            if c:
                clean[exp] = clean.get(exp, 0) + c
                if not clean[exp]:
                    del clean[exp]
        object.__setattr__(self, "variables", variables)
        object.__setattr__(self, "terms", clean)

    def __setattr__(self, name, value):
        raise AttributeError("MultiPoly is immutable")

    # construction ---------------------------------------------------------

    @classmethod
    def const(cls, c, variables: Sequence[str] = ()) -> "MultiPoly":
        return cls(variables, {(0,) * len(tuple(variables)): c})

    @classmethod
    def var(cls, name: str, variables: Sequence[str] | None = None) -> "MultiPoly":
        variables = tuple(variables) if variables is not None else (name,)
        if name not in variables:
            variables = variables + (name,)
        exp = tuple(int(v == name) for v in variables)
        return cls(variables, {exp: 1})

    @classmethod
    def monomial(cls, variables: Sequence[str], exp: Sequence[int], c=1) -> "MultiPoly":
        return cls(variables, {tuple(exp): c})

    # ring bookkeeping -------------------------------------------------------

    def in_ring(self, variables: Sequence[str]) -> "MultiPoly":
        """Re-express over ``variables``; every used variable must be present."""
        variables = tuple(variables)
        if variables == self.variables:
            return self
        index = {v: i for i, v in enumerate(variables)}
        used = self.used_variables()
        missing = [v for v in used if v not in index]
        if missing:
            raise PolyError(f"variables {missing} not in target ring {variables}")
        terms = {}
        for exp, c in self.terms.items():
            new = [0] * len(variables)
            for v, e in zip(self.variables, exp):
                if e:
                    new[index[v]] = e
            terms[tuple(new)] = c
        return MultiPoly(variables, terms)

    def used_variables(self) -> tuple[str, ...]:
        return tuple(v for i, v in enumerate(self.variables)
                     if any(exp[i] for exp in self.terms))

    def _coerce(self, other) -> tuple["MultiPoly", "MultiPoly"]:
        if not isinstance(other, MultiPoly):
            other = MultiPoly.const(as_rat(other), self.variables)
        if other.variables == self.variables:
            return self, other
        union = self.variables + tuple(v for v in other.variables if v not in self.variables)
        return self.in_ring(union), other.in_ring(union)

    # arithmetic -------------------------------------------------------------

    def __add__(self, other):
        a, b = self._coerce(other)
        terms = dict(a.terms)
        for exp, c in b.terms.items():
            terms[exp] = terms.get(exp, 0) + c
        return MultiPoly(a.variables, terms)

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly(self.variables, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        a, b = self._coerce(other)
        return a + (-b)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        a, b = self._coerce(other)
        terms: dict[Exp, Fraction] = {}
        for e1, c1 in a.terms.items():
            for e2, c2 in b.terms.items():
                e = tuple(x + y for x, y in zip(e1, e2))
                terms[e] = terms.get(e, 0) + c1 * c2
        return MultiPoly(a.variables, terms)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise PolyError("exponent must be a nonnegative integer")
        result = MultiPoly.const(1, self.variables)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        if not isinstance(other, (MultiPoly, int, Fraction)):
            return NotImplemented
        a, b = self._coerce(other)
        return a.terms == b.terms

    __hash__ = None

    def __bool__(self):
        return bool(self.terms)

    # inspection -------------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(not any(e) for e in self.terms)

    def constant_term(self) -> Fraction:
        return self.terms.get((0,) * len(self.variables), Fraction(0))

    def total_degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def degree(self, var: str) -> int:
        if var not in self.variables:
            return 0 if self.terms else -1
        i = self.variables.index(var)
        return max((e[i] for e in self.terms), default=-1)

    def coeffs_in(self, var: str) -> dict[int, "MultiPoly"]:
        """Coefficients as a polynomial in ``var`` (same ring, ``var`` unused)."""
        p = self if var in self.variables else self.in_ring(self.variables + (var,))
        i = p.variables.index(var)
        parts: dict[int, dict] = {}
        for exp, c in p.terms.items():
            k = exp[i]
            parts.setdefault(k, {})[exp[:i] + (0,) + exp[i + 1:]] = c
        return {k: MultiPoly(p.variables, t) for k, t in parts.items()}

    def leading_term(self) -> tuple[Exp, Fraction]:
        if not self.terms:
            raise PolyError("zero polynomial has no leading term")
        exp = max(self.terms)
        return exp, self.terms[exp]

    def diff(self, var: str) -> "MultiPoly":
        if var not in self.variables:
            return MultiPoly(self.variables)
        i = self.variables.index(var)
        terms = {}
        for exp, c in self.terms.items():
            if exp[i]:
                terms[exp[:i] + (exp[i] - 1,) + exp[i + 1:]] = c * exp[i]
        return MultiPoly(self.variables, terms)

    def evaluate(self, point: Mapping[str, object]) -> Fraction:
        total = Fraction(0)
        for exp, c in self.terms.items():
            term = c
            for v, e in zip(self.variables, exp):
                if e:
                    term *= as_rat(point[v]) ** e
            total += term
        return total

    def univariate(self, var: str) -> list[Fraction]:
        """Dense coefficient list (constant first); other variables must be unused."""
        others = [v for v in self.used_variables() if v != var]
        if others:
            raise PolyError(f"not univariate in {var}: also uses {others}")
        deg = self.degree(var)
        out = [Fraction(0)] * (deg + 1)
        for k, c in self.coeffs_in(var).items():
            out[k] = c.constant_term()
        return out

    @classmethod
    def from_univariate(cls, coeffs: Sequence, var: str, variables: Sequence[str] | None = None):
        variables = tuple(variables) if variables is not None else (var,)
        i = variables.index(var)
        terms = {}
        for k, c in enumerate(coeffs):
            exp = [0] * len(variables)
            exp[i] = k
            terms[tuple(exp)] = c
        return cls(variables, terms)

    # printing ---------------------------------------------------------------

    def _sorted_terms(self):
        return sorted(self.terms.items(), key=lambda t: (sum(t[0]), t[0]), reverse=True)

    def __str__(self):
        if not self.terms:
            return "0"
        pieces = []
        for exp, c in self._sorted_terms():
            mono = "*".join(v if e == 1 else f"{v}^{e}"
                            for v, e in zip(self.variables, exp) if e)
            mag = abs(c)
            if not mono:
                body = format_rat(mag)
            elif mag == 1:
                body = mono
            else:
                body = f"{format_rat(mag)}*{mono}"
            pieces.append(("-" if c < 0 else "+", body))
        out = ("-" if pieces[0][0] == "-" else "") + pieces[0][1]
        for sign, body in pieces[1:]:
            out += f" {sign} {body}"
        return out

    def __repr__(self):
        return f"MultiPoly({str(self)!r}, variables={self.variables})"


# module-level operations -----------------------------------------------------


def substitute(f: MultiPoly, mapping: Mapping[str, object],
               variables: Sequence[str] | None = None) -> MultiPoly:
    """Replace each variable of ``f`` by its image and expand exactly.

    Images may be polynomials or constants. A variable of ``f`` that occurs
    in some term but has no image is an error.
    """
    used = f.used_variables()
    missing = [v for v in used if v not in mapping]
    if missing:
        raise PolyError(f"no image for variables {missing}")
    images = {}
    ring: tuple[str, ...] = tuple(variables) if variables is not None else ()
    for v in used:
        img = mapping[v]
        if not isinstance(img, MultiPoly):
            img = MultiPoly.const(as_rat(img))
        images[v] = img
        if variables is None:
            ring += tuple(x for x in img.variables if x not in ring)
    images = {v: img.in_ring(ring) for v, img in images.items()}
    powers: dict[tuple[str, int], MultiPoly] = {}
    result = MultiPoly(ring)
    for exp, c in f.terms.items():
        term = MultiPoly.const(c, ring)
        for v, e in zip(f.variables, exp):
            if e:
                key = (v, e)
                if key not in powers:
                    powers[key] = images[v] ** e
                term = term * powers[key]
        result = result + term
    return result


def exact_divide(f: MultiPoly, g: MultiPoly) -> MultiPoly:
    """The quotient ``q`` with ``f == q * g``; raises if the division is not exact."""
    f, g = f._coerce(g)
    if g.is_zero():
        raise PolyError("division by zero polynomial")
    g_exp, g_c = g.leading_term()
    quotient: dict[Exp, Fraction] = {}
    rest = f
    while rest.terms:
        exp, c = rest.leading_term()
        if any(a < b for a, b in zip(exp, g_exp)):
            raise PolyError("remainder nonzero")
        q_exp = tuple(a - b for a, b in zip(exp, g_exp))
        q_c = c / g_c
        quotient[q_exp] = q_c
        rest = rest - MultiPoly.monomial(f.variables, q_exp, q_c) * g
    return MultiPoly(f.variables, quotient)


def _det(matrix: list[list[MultiPoly]], ring: tuple[str, ...]) -> MultiPoly:
    # Bareiss elimination; every division is exact.
    n = len(matrix)
    if n == 0:
        return MultiPoly.const(1, ring)
    m = [row[:] for row in matrix]
    sign, prev = 1, MultiPoly.const(1, ring)
    for k in range(n - 1):
        if m[k][k].is_zero():
            for i in range(k + 1, n):
                if not m[i][k].is_zero():
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return MultiPoly(ring)
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = m[i][j] * m[k][k] - m[i][k] * m[k][j]
                m[i][j] = exact_divide(num, prev) if k else num
            m[i][k] = MultiPoly(ring)
        prev = m[k][k]
    return m[n - 1][n - 1] if sign > 0 else -m[n - 1][n - 1]


def sylvester_matrix(f: MultiPoly, g: MultiPoly, var: str) -> list[list[MultiPoly]]:
    f, g = f._coerce(g)
    if var not in f.variables:
        f, g = f.in_ring(f.variables + (var,)), g.in_ring(f.variables + (var,))
    m, n = f.degree(var), g.degree(var)
    zero = MultiPoly(f.variables)
    fc, gc = f.coeffs_in(var), g.coeffs_in(var)
    size = m + n
    rows = []
    for i in range(n):
        row = [zero] * size
        for k in range(m + 1):
            row[i + m - k] = fc.get(k, zero)
        rows.append(row)
    for i in range(m):
        row = [zero] * size
        for k in range(n + 1):
            row[i + n - k] = gc.get(k, zero)
        rows.append(row)
    return rows


def resultant(f: MultiPoly, g: MultiPoly, var: str) -> MultiPoly:
    """Sylvester resultant eliminating ``var``, computed by Bareiss elimination."""
    f, g = f._coerce(g)
    if f.is_zero() or g.is_zero():
        return MultiPoly(f.variables)
    if f.degree(var) <= 0 and g.degree(var) <= 0:
        raise PolyError(f"both polynomials are constant in {var}")
    ring = f.variables if var in f.variables else f.variables + (var,)
    return _det(sylvester_matrix(f, g, var), ring)


# univariate helpers over Q -----------------------------------------------------


def _trim(p: list[Fraction]) -> list[Fraction]:
    p = list(p)
    while p and p[-1] == 0:
        p.pop()
    return p


def uni_divmod(a: Sequence[Fraction], b: Sequence[Fraction]) -> tuple[list[Fraction], list[Fraction]]:
    a, b = _trim(a), _trim(b)
    if not b:
        raise PolyError("division by zero polynomial")
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 0)
    r = [Fraction(x) for x in a]
    while len(r) >= len(b):
        c = r[-1] / b[-1]
        k = len(r) - len(b)
        q[k] = c
        for i, x in enumerate(b):
            r[k + i] -= c * x
        r = _trim(r)
    return q, r


def uni_gcd(a: Sequence[Fraction], b: Sequence[Fraction]) -> list[Fraction]:
    """Monic gcd of two dense univariate polynomials (empty list for 0)."""
    a, b = _trim(a), _trim(b)
    while b:
        a, b = b, uni_divmod(a, b)[1]
    if not a:
        return []
    return [x / a[-1] for x in a]


def uni_derivative(a: Sequence[Fraction]) -> list[Fraction]:
    return [k * a[k] for k in range(1, len(a))]


def squarefree(f: MultiPoly, var: str | None = None) -> bool:
    """True iff the univariate ``f`` has no repeated roots (constants count)."""
    if f.is_zero():
        raise PolyError("squarefree test of the zero polynomial")
    used = f.used_variables()
    if var is None:
        if len(used) > 1:
            raise PolyError(f"squarefree expects a univariate polynomial, got {used}")
        if not used:
            return True
        var = used[0]
    coeffs = f.univariate(var)
    return len(uni_gcd(coeffs, uni_derivative(coeffs))) <= 1


def rational_roots(coeffs: Sequence[Fraction], limit: int = 10**6) -> list[Fraction]:
    """Rational roots of a dense univariate polynomial via the rational root test."""
    from math import gcd, lcm

    c = _trim(coeffs)
    if not c:
        raise PolyError("rational_roots of the zero polynomial")
    roots = []
    while c and c[0] == 0:
        roots.append(Fraction(0))
        c = c[1:]
    if len(c) <= 1:
        return sorted(set(roots))
    den = 1
    for x in c:
        den = lcm(den, x.denominator)
    ints = [int(x * den) for x in c]
    g = 0
    for x in ints:
        g = gcd(g, x)
    ints = [x // g for x in ints]
    a0, an = abs(ints[0]), abs(ints[-1])
    if a0 > limit or an > limit:
        raise PolyError("coefficients too large for the rational root test")
    divs = lambda n: [d for d in range(1, n + 1) if n % d == 0]
    for p in divs(a0):
        for q in divs(an):
            for cand in (Fraction(p, q), Fraction(-p, q)):
                val = Fraction(0)
                for x in reversed(c):
                    val = val * cand + x
                if val == 0:
                    roots.append(cand)
    return sorted(set(roots))


# parametrization certificates ---------------------------------------------------


@dataclass(frozen=True)
class ParametrizationReport:
    vanishes: bool
    injective: bool
    implicitizes: bool
    scale: Fraction | None

    @property
    def accepted(self) -> bool:
        return self.vanishes and self.injective and self.implicitizes


def parametrization_check(f: MultiPoly, p: MultiPoly, q: MultiPoly,
                          u: str = "u", v: str = "v", t: str = "t") -> ParametrizationReport:
    """Verify that ``t -> (p(t), q(t))`` parametrizes the curve ``f = 0`` injectively.

    Three independent checks: ``f(p, q) == 0``; the only common factor of
    ``p(t)-p(s)`` and ``q(t)-q(s)`` is ``t-s``; ``Res_t(p-u, q-v)`` is a
    nonzero constant multiple of ``f``.
    """
    if f.is_zero():
        raise PolyError("zero curve polynomial")
    for poly in (p, q):
        extra = [x for x in poly.used_variables() if x != t]
        if extra:
            raise PolyError(f"parametrization must only use {t}, found {extra}")
    if p.is_constant() and q.is_constant():
        raise PolyError("degenerate parametrization")

    composed = substitute(f, {u: p, v: q, **{x: MultiPoly.var(x) for x in f.used_variables()
                                               if x not in (u, v)}})
    vanishes = composed.is_zero()

    s = "_s" if t != "_s" else "_s2"
    ring = (t, s)
    diff_p = p.in_ring(ring) - substitute(p, {t: MultiPoly.var(s, ring)}, ring)
    diff_q = q.in_ring(ring) - substitute(q, {t: MultiPoly.var(s, ring)}, ring)
    line = MultiPoly.var(t, ring) - MultiPoly.var(s, ring)
    cof_p = exact_divide(diff_p, line)
    cof_q = exact_divide(diff_q, line)
    if cof_p.is_zero():
        injective = cof_q.is_constant()
    elif cof_q.is_zero():
        injective = cof_p.is_constant()
    elif cof_p.is_constant() or cof_q.is_constant():
        injective = True
    else:
        # neither cofactor has a factor in s alone, so a common factor
        # must involve t and shows up as a vanishing resultant
        injective = not resultant(cof_p, cof_q, t).is_zero()

    ring3 = (t, u, v)
    implicit = resultant(p.in_ring(ring3) - MultiPoly.var(u, ring3),
                         q.in_ring(ring3) - MultiPoly.var(v, ring3), t)
    scale = _proportionality(implicit, f)
    return ParametrizationReport(vanishes, injective, scale is not None, scale)


def _proportionality(a: MultiPoly, b: MultiPoly) -> Fraction | None:
    """``c`` with ``a == c * b`` for a nonzero constant ``c``, else None."""
    if a.is_zero() or b.is_zero():
        return None
    a, b = a._coerce(b)
    if set(a.terms) != set(b.terms):
        return None
    exp = next(iter(b.terms))
    c = a.terms[exp] / b.terms[exp]
    if all(a.terms[e] == c * b.terms[e] for e in b.terms):
        return c
    return None


# text syntax ------------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*)|(\*\*|[-+*/^()]))")


def _tokenize(text: str) -> list[tuple[str, str]]:
    tokens, pos = [], 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise PolyError(f"unexpected character {text[pos:].strip()[:1]!r} in {text!r}")
        num, name, op = m.groups()
        if num is not None:
            tokens.append(("num", num))
        elif name is not None:
            tokens.append(("name", name))
        else:
            tokens.append(("op", "^" if op == "**" else op))
        pos = m.end()
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else (None, None)

    def take(self, kind=None, value=None):
        tok = self.peek()
        if tok[0] is None or (kind and tok[0] != kind) or (value and tok[1] != value):
            raise PolyError(f"parse error in {self.text!r} near token {self.pos}")
        self.pos += 1
        return tok

    def parse(self) -> MultiPoly:
        if not self.tokens:
            raise PolyError("empty polynomial")
        result = self.expr()
        if self.pos != len(self.tokens):
            raise PolyError(f"trailing input in {self.text!r}")
        return result

    def expr(self):
        value = self.term()
        while self.peek() in (("op", "+"), ("op", "-")):
            op = self.take()[1]
            rhs = self.term()
            value = value + rhs if op == "+" else value - rhs
        return value

    def term(self):
        value = self.unary()
        while self.peek() in (("op", "*"), ("op", "/")):
            op = self.take()[1]
            rhs = self.unary()
            if op == "*":
                value = value * rhs
            else:
                if not rhs.is_constant() or rhs.is_zero():
                    raise PolyError("division only by nonzero constants")
                value = value * (1 / rhs.constant_term())
        return value

    def unary(self):
        tok = self.peek()
        if tok == ("op", "-"):
            self.take()
            return -self.unary()
        if tok == ("op", "+"):
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek() == ("op", "^"):
            self.take()
            exp = int(self.take("num")[1])
            base = base ** exp
        return base

    def atom(self):
        kind, value = self.peek()
        if kind == "num":
            self.take()
            return MultiPoly.const(int(value))
        if kind == "name":
            self.take()
            return MultiPoly.var(value)
        if (kind, value) == ("op", "("):
            self.take()
            inner = self.expr()
            self.take("op", ")")
            return inner
        raise PolyError(f"parse error in {self.text!r} near token {self.pos}")


def _natural_key(name: str):
    m = re.match(r"^(.*?)(\d*)$", name)
    return m.group(1), int(m.group(2)) if m.group(2) else -1


def parse_poly(text: str, variables: Iterable[str] | None = None) -> MultiPoly:
    """Parse the polynomial text syntax.

    Without ``variables`` the ring is the used names in natural order
    (``u < v``, ``x2 < x10``); with it, extra names are appended.
    """
    p = _Parser(text).parse()
    used = sorted(p.used_variables(), key=_natural_key)
    ring = tuple(variables) if variables is not None else ()
    ring += tuple(v for v in used if v not in ring)
    return p.in_ring(ring)
