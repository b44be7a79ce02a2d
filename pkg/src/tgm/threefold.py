"""Hyperbolic modifications, bi-cyclic covers and the checks behind the
smooth contractible threefold construction."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Sequence

from .downgrade import Section, WeightMatrix, proposition_formula, proposition_model
from .poly import (MultiPoly, PolyError, exact_divide, parametrization_check, rational_roots,
                   resultant, squarefree, substitute, uni_gcd)
from .segdiv import Segment, SegmentalDivisor, equivalent


def _x(i: int) -> str:
    return f"x{i}"


def hyperbolic_modification(f: MultiPoly, base: Sequence[str] | None = None) -> MultiPoly:
    """``f(x1*x2, ..., x1*xn) / x1`` where ``base`` lists the variables of
    ``f`` in order (default: the ring of ``f``)."""
    base = tuple(base) if base is not None else f.variables
    ring = tuple(_x(i) for i in range(1, len(base) + 2))
    if f.constant_term() != 0:
        raise PolyError("modification undefined: f(0)≠0")
    x1 = MultiPoly.var("x1", ring)
    images = {b: x1 * MultiPoly.var(_x(k + 2), ring) for k, b in enumerate(base)}
    return exact_divide(substitute(f, images, ring), x1)


@dataclass(frozen=True)
class Presentation:
    variables: tuple[str, ...]
    relations: tuple[MultiPoly, ...]

    def __post_init__(self):
        variables = tuple(self.variables)
        if len(set(variables)) != len(variables):
            raise ValueError("presentation variables must be distinct")
        rels = tuple(r.in_ring(variables) for r in self.relations)
        if any(r.is_zero() for r in rels):
            raise ValueError("presentation relations must be nonzero")
        object.__setattr__(self, "variables", variables)
        object.__setattr__(self, "relations", rels)

    @property
    def dimension(self) -> int:
        """Expected dimension ``#variables - #relations``."""
        return len(self.variables) - len(self.relations)

    def __str__(self):
        rels = ", ".join(str(r) for r in self.relations) or "(none)"
        return f"C[{', '.join(self.variables)}] / ({rels})"


def bicyclic_presentation(f: MultiPoly, g: MultiPoly, zeta: int, xi: int,
                          base: Sequence[str] = ("u", "v")) -> Presentation:
    if zeta < 1 or xi < 1:
        raise ValueError("cover orders must be positive integers")
    ring = tuple(_x(i) for i in range(1, 6))
    hf = hyperbolic_modification(f.in_ring(base), base).in_ring(ring)
    hg = hyperbolic_modification(g.in_ring(base), base).in_ring(ring)
    r1 = MultiPoly.var("x4", ring) ** zeta - hf
    r2 = MultiPoly.var("x5", ring) ** xi - hg
    return Presentation(ring, (r1, r2))


def _solvable_for(rel: MultiPoly, i: int) -> Fraction | None:
    """Coefficient of ``x_i`` if ``x_i`` occurs in ``rel`` only as the bare
    linear monomial, else None."""
    unit = tuple(int(k == i) for k in range(len(rel.variables)))
    coeff = None
    for exp, c in rel.terms.items():
        if exp == unit:
            coeff = c
        elif exp[i]:
            return None
    return coeff


def eliminate_linear(p: Presentation) -> Presentation:
    """Solve away variables that occur linearly and alone in a relation.

    Scans variables in order, then relations in order; after each
    elimination the scan restarts. The difference ``#vars - #relations``
    is unchanged.
    """
    variables, relations = list(p.variables), list(p.relations)
    progress = True
    while progress:
        progress = False
        for i, name in enumerate(variables):
            for j, rel in enumerate(relations):
                c = _solvable_for(rel, i)
                if c is None:
                    continue
                x = MultiPoly.var(name, variables)
                value = (x * c - rel) * (1 / c)
                rest = variables[:i] + variables[i + 1:]
                mapping = {v: MultiPoly.var(v, rest) for v in rest}
                mapping[name] = value.in_ring(rest)
                relations = [substitute(r, mapping, rest) for k, r in enumerate(relations) if k != j]
                variables = rest
                relations = [r for r in relations if not r.is_zero()]
                progress = True
                break
            if progress:
                break
    return Presentation(tuple(variables), tuple(relations))


# plane curves ------------------------------------------------------------------


@dataclass(frozen=True)
class Projection:
    """Eliminate ``var`` after the shear ``other -> w - shear*var``; the
    resulting polynomial lives in ``w``."""

    var: str
    other: str
    shear: int

    def apply(self, h: MultiPoly) -> MultiPoly:
        ring = (self.var, "w")
        w = MultiPoly.var("w", ring) - MultiPoly.var(self.var, ring) * self.shear
        return substitute(h.in_ring((self.var, self.other)),
                          {self.var: MultiPoly.var(self.var, ring), self.other: w}, ring)

    def __str__(self):
        if not self.shear:
            return f"eliminate {self.var}"
        return f"eliminate {self.var} along {self.other}+{self.shear}*{self.var}"


def _projections(u: str, v: str, max_shear: int = 3):
    for c in range(max_shear + 1):
        for s in ((c, -c) if c else (0,)):
            yield Projection(u, v, s)
            yield Projection(v, u, s)


def _monic_in(h: MultiPoly, var: str) -> bool:
    top = h.coeffs_in(var).get(h.degree(var))
    return h.degree(var) > 0 and top is not None and top.is_constant()


@dataclass(frozen=True)
class IntersectionReport:
    count: int
    transversal: bool
    origin: bool
    projection: str
    resultant: str
    squarefree_projection: str | None
    rational_points: tuple[tuple[Fraction, Fraction], ...]
    jacobian_ok: bool

    @property
    def d(self) -> int:
        return self.count

    @property
    def normal_with_origin(self) -> bool:
        return self.transversal and self.origin


def _rational_points(f, g, proj: Projection, res: MultiPoly, u: str, v: str):
    pts = []
    for w0 in rational_roots(res.univariate("w")):
        fu = substitute(proj.apply(f), {proj.var: MultiPoly.var(proj.var), "w": w0})
        gu = substitute(proj.apply(g), {proj.var: MultiPoly.var(proj.var), "w": w0})
        common = uni_gcd(fu.univariate(proj.var) if not fu.is_zero() else [],
                         gu.univariate(proj.var) if not gu.is_zero() else [])
        if len(common) < 2:
            continue
        for x0 in rational_roots(common):
            y0 = w0 - proj.shear * x0
            pts.append((x0, y0) if proj.var == u else (y0, x0))
    return tuple(sorted(set(pts)))


def _rename_w(res: MultiPoly, proj: Projection) -> MultiPoly:
    name = proj.other if proj.shear == 0 else "w"
    return substitute(res, {"w": MultiPoly.var(name)}, (name,))


def intersection_analysis(f: MultiPoly, g: MultiPoly, u: str = "u", v: str = "v") -> IntersectionReport:
    """Intersection count and transversality of two affine plane curves.

    Projections that keep one curve monic in the eliminated variable are
    tried in a fixed order (axes first, then shears ``+-1, +-2, +-3``). The
    first one fixes the count (degree of the resultant); the curves meet
    transversally when some such resultant is squarefree and the Jacobian
    does not vanish at any rational common point.
    """
    ring = (u, v)
    f, g = f.in_ring(ring), g.in_ring(ring)
    if f.is_zero() or g.is_zero():
        raise PolyError("intersection of the zero polynomial")
    origin = f.constant_term() == 0 and g.constant_term() == 0
    if f.is_constant() or g.is_constant():
        return IntersectionReport(0, True, False, "none", "1", None, (), True)
    primary = None
    sq = None
    for proj in _projections(u, v):
        pf, pg = proj.apply(f), proj.apply(g)
        if not (_monic_in(pf, proj.var) or _monic_in(pg, proj.var)):
            continue
        res = resultant(pf, pg, proj.var).in_ring(("w",))
        if res.is_zero():
            raise PolyError("curves share a component (resultant is identically zero)")
        if primary is None:
            primary = (proj, res)
        if squarefree(res, "w"):
            sq = proj
            break
    if primary is None:
        raise PolyError("no projection keeps either curve monic")
    proj, res = primary
    points = _rational_points(f, g, proj, res, u, v)
    jac_ok = True
    for x0, y0 in points:
        pt = {u: x0, v: y0}
        det = (f.diff(u).evaluate(pt) * g.diff(v).evaluate(pt)
               - f.diff(v).evaluate(pt) * g.diff(u).evaluate(pt))
        if det == 0:
            jac_ok = False
    return IntersectionReport(
        count=res.degree("w"), transversal=sq is not None and jac_ok, origin=origin,
        projection=str(proj), resultant=str(_rename_w(res, proj)),
        squarefree_projection=str(sq) if sq else None, rational_points=points, jacobian_ok=jac_ok)


def curve_is_smooth(f: MultiPoly, u: str = "u", v: str = "v") -> bool:
    """No common zero of ``f, f_u, f_v`` in the affine plane.

    For each projection the two elimination resultants ``Res(f, f_x)`` and
    ``Res(f, f_y)`` share a root whenever there is a singular point, so a
    constant gcd in any projection proves smoothness. A rational singular
    point found directly proves the opposite; otherwise every tried
    projection sharing a root counts as singular.
    """
    ring = (u, v)
    f = f.in_ring(ring)
    if f.is_constant():
        raise PolyError("constant polynomial does not define a curve")
    fu, fv = f.diff(u), f.diff(v)
    if fu.is_zero():
        return squarefree(f, v)
    if fv.is_zero():
        return squarefree(f, u)
    for proj in _projections(u, v):
        pf, pu, pv = proj.apply(f), proj.apply(fu), proj.apply(fv)
        if pf.degree(proj.var) <= 0:
            continue
        r1 = resultant(pf, pu, proj.var).in_ring(("w",))
        r2 = resultant(pf, pv, proj.var).in_ring(("w",))
        if r1.is_zero() or r2.is_zero():
            return False  # repeated component
        h = uni_gcd(r1.univariate("w"), r2.univariate("w"))
        if len(h) <= 1:
            return True
        for w0 in rational_roots(h):
            fiber = substitute(pf, {proj.var: MultiPoly.var(proj.var), "w": w0})
            if fiber.is_zero() or fiber.is_constant():
                continue
            for x0 in rational_roots(fiber.univariate(proj.var)):
                y0 = w0 - proj.shear * x0
                pt = {u: x0, v: y0} if proj.var == u else {u: y0, v: x0}
                if fu.evaluate(pt) == 0 and fv.evaluate(pt) == 0:
                    return False
    return False


def mu_homogeneous(f: MultiPoly, w_u: int, w_v: int, a1: int, u: str = "u", v: str = "v") -> bool:
    if a1 == 0:
        raise ValueError("a1 must be nonzero")
    m = abs(a1)
    f = f.in_ring((u, v))
    return len({(a * w_u + b * w_v) % m for a, b in f.terms}) <= 1


# theorem data -----------------------------------------------------------------


@dataclass(frozen=True)
class TheoremData:
    weights: tuple[int, int, int]
    section: Section
    f: MultiPoly
    g: MultiPoly
    param_f: tuple[MultiPoly, MultiPoly]
    param_g: tuple[MultiPoly, MultiPoly]
    mu_weights: tuple[int, int]


@dataclass(frozen=True)
class Condition:
    name: str
    passed: bool
    detail: str


@dataclass(frozen=True)
class TheoremReport:
    conditions: tuple[Condition, ...]
    warnings: tuple[str, ...] = field(default=())
    d: int | None = None

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.conditions)

    def condition(self, name: str) -> Condition:
        return next(c for c in self.conditions if c.name == name)


def validate_theorem_data(data: TheoremData) -> TheoremReport:
    """Check items (a), (b), (c)(i)-(iii); failures are report entries."""
    a1, a2, a3 = data.weights
    w = WeightMatrix(data.weights)
    conds, warns = [], []

    sign = -a1 > 0 and a2 > 0 and a3 > 0
    conds.append(Condition("a", sign and w.is_coprime(),
                           f"signs {'ok' if sign else 'bad'}, gcd {w.gcd()}"))

    s = data.section
    total = sum(c * a for c, a in zip(s.coeffs, data.weights))
    conds.append(Condition("b", s.splits(w), f"s.F = {total}"))
    if not all(c > 0 for c in s.coeffs):
        warns.append("section not strictly positive")

    wu, wv = data.mu_weights
    mu = [mu_homogeneous(h, wu, wv, a1) if a1 else False for h in (data.f, data.g)]
    conds.append(Condition("c.i", all(mu), f"f: {mu[0]}, g: {mu[1]}"))

    details, ok = [], True
    for label, h, (p, q) in (("f", data.f, data.param_f), ("g", data.g, data.param_g)):
        try:
            cert = parametrization_check(h, p, q).accepted
        except PolyError:
            cert = False
        smooth = curve_is_smooth(h)
        ok = ok and cert and smooth
        details.append(f"{label}: certificate {cert}, smooth {smooth}")
    conds.append(Condition("c.ii", ok, "; ".join(details)))

    d = None
    try:
        rep = intersection_analysis(data.f, data.g)
        d = rep.count
        conds.append(Condition("c.iii", rep.normal_with_origin,
                               f"{rep.count} points, transversal {rep.transversal}, origin {rep.origin}"))
    except PolyError as exc:
        conds.append(Condition("c.iii", False, str(exc)))
    return TheoremReport(tuple(conds), tuple(warns), d)


# smoothness template ---------------------------------------------------------------


@dataclass(frozen=True)
class SmoothnessReport:
    applicable: bool
    passed: bool
    reason: str
    match: tuple[int, int, int] | None = None


def smoothness_check(d: SegmentalDivisor, bound: int = 12) -> SmoothnessReport:
    """Template test for the local smoothness criterion.

    Only divisors on the blow-up of the origin (``d = 1``) are handled. The
    divisor must consist of two point coefficients and one interval on the
    exceptional divisor, and must match the closed formula for some
    admissible triple with entries up to ``bound``, up to shift, with the
    point terms standing in for the two frame divisors. Curve supports must
    meet pairwise transversally. Passing is a necessary condition only.
    """
    model = d.model
    if model.blowup_d != 1:
        return SmoothnessReport(False, False, "template only covers the blow-up of the origin")
    e = model.exceptional_name()
    points = [n for n, s in d.terms if s.is_point]
    intervals = [n for n, s in d.terms if not s.is_point]
    if intervals != [e] or len(points) > 2:
        return SmoothnessReport(True, False, "support is not two points plus an interval on E")
    curves = [model.curve_divisors[n] for n in d.curve_support()]
    for i in range(len(curves)):
        for j in range(i + 1, len(curves)):
            try:
                if not intersection_analysis(curves[i], curves[j]).transversal:
                    return SmoothnessReport(True, False, "curve supports meet non-transversally")
            except PolyError:
                return SmoothnessReport(True, False, "curve supports share a component")
    length = d.segment(e).length
    target = proposition_model()
    for a1 in range(-1, -bound - 1, -1):
        for a2 in range(1, bound + 1):
            for a3 in range(1, bound + 1):
                if gcd(gcd(a1, a2), a3) != 1:
                    continue
                delta = gcd(a2 // gcd(a1, a2), a3 // gcd(a1, a3))
                if Fraction(1, -delta * a1) != length:
                    continue
                formula = proposition_formula(a1, a2, a3)
                if _matches(d, formula, target):
                    return SmoothnessReport(True, True, "matches closed formula", (a1, a2, a3))
    return SmoothnessReport(True, False, f"no admissible triple up to {bound} matches")


def _matches(d: SegmentalDivisor, formula: SegmentalDivisor, target) -> bool:
    # the point terms play the roles of the two frame divisors, in either order
    points = [s for _, s in d.terms if s.is_point] + [Segment.point(0)] * 2
    e = d.segment(d.model.exceptional_name())
    for first, second in ((points[0], points[1]), (points[1], points[0])):
        virtual = SegmentalDivisor.of(target, {"D2": first, "D3": second, "E": e})
        if equivalent(virtual, formula) is not None:
            return True
    return False
