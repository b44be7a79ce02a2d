"""Downgrading a linear one-dimensional torus action on affine 3-space.

From the weights ``F`` we take the cokernel projection ``P`` (last two
rows of the Smith transform of ``F``), the primitive images of the
coordinate vectors as rays, and for every ray ``v`` the segment
``s(R^3_{>=0} cap P^{-1}(v))``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Sequence

from .exactmath import IntMat, ext_gcd, primitive, smith_normal_form, solve_integral
from .segdiv import Segment, SegmentalDivisor, equivalent, transport
from .surface import Fan2D, SurfaceModel, blowup_model, fan_from_weights, fan_isomorphisms, fan_model


@dataclass(frozen=True)
class WeightMatrix:
    weights: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "weights", tuple(int(a) for a in self.weights))
        if not self.weights:
            raise ValueError("empty weight matrix")

    @property
    def n(self) -> int:
        return len(self.weights)

    def gcd(self) -> int:
        g = 0
        for a in self.weights:
            g = gcd(g, a)
        return g

    def is_coprime(self) -> bool:
        return self.gcd() == 1

    def is_pairwise_coprime(self) -> bool:
        w = self.weights
        return all(gcd(w[i], w[j]) == 1 for i in range(len(w)) for j in range(i + 1, len(w)))

    def is_hyperbolic(self) -> bool:
        return any(a < 0 for a in self.weights) and any(a > 0 for a in self.weights)

    def as_matrix(self) -> IntMat:
        return IntMat.column(self.weights)


@dataclass(frozen=True)
class Section:
    coeffs: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(int(c) for c in self.coeffs))

    def __call__(self, x: Sequence) -> Fraction:
        return sum((Fraction(c) * xi for c, xi in zip(self.coeffs, x)), Fraction(0))

    def splits(self, f: WeightMatrix) -> bool:
        return len(self.coeffs) == f.n and sum(c * a for c, a in zip(self.coeffs, f.weights)) == 1


def _weights(f) -> WeightMatrix:
    return f if isinstance(f, WeightMatrix) else WeightMatrix(tuple(f))


def _section(s) -> Section:
    return s if isinstance(s, Section) else Section(tuple(s))


def make_section(f) -> Section:
    f = _weights(f)
    if not f.is_coprime():
        raise ValueError("weights not strictly coprime")
    _, coeffs = ext_gcd(list(f.weights))
    return Section(tuple(coeffs))


def cokernel_projection(f) -> IntMat:
    """Rows 2..n of the Smith transform ``U`` of the weight column."""
    f = _weights(f)
    u, s, _ = smith_normal_form(f.as_matrix())
    if s[0, 0] != 1:
        raise ValueError("weights not strictly coprime")
    return IntMat([u.row(i) for i in range(1, f.n)])


@dataclass(frozen=True)
class Downgrade:
    weights: WeightMatrix
    section: Section
    projection: IntMat
    fan: Fan2D
    divisor: SegmentalDivisor
    coordinates: tuple[tuple[str, tuple[int, ...]], ...]  # divisor name -> coordinate indices

    @property
    def model(self) -> SurfaceModel:
        return self.divisor.model


def fiber_segment(f: WeightMatrix, p: IntMat, s: Section, v: Sequence[int]) -> Segment:
    """``s`` applied to the nonnegative part of the line ``{x : P x = v}``."""
    x0 = solve_integral(p, list(v))
    t_lo: Fraction | None = None
    t_hi: Fraction | None = None
    for xi, a in zip(x0, f.weights):
        if a > 0:
            bound = Fraction(-xi, a)
            t_lo = bound if t_lo is None else max(t_lo, bound)
        elif a < 0:
            bound = Fraction(xi, -a)
            t_hi = bound if t_hi is None else min(t_hi, bound)
        elif xi < 0:
            raise ValueError(f"fiber over {tuple(v)} misses the orthant")
    if t_lo is None or t_hi is None:
        raise ValueError("action not hyperbolic")
    if t_lo > t_hi:
        raise ValueError(f"fiber over {tuple(v)} misses the orthant")
    base = s(x0)
    return Segment(base + t_lo, base + t_hi)


def downgrade(f, s=None) -> Downgrade:
    """Fan and segmental divisor of the linear action with weights ``f``.

    Extremal rays are named ``D<i>`` after the first coordinate mapping to
    them; rays interior to the support are named ``E`` (``E1``, ``E2``...
    if there are several).
    """
    f = _weights(f)
    if f.n != 3:
        raise ValueError("downgrade is implemented for three weights only")
    if not f.is_hyperbolic():
        raise ValueError("action not hyperbolic")
    s = make_section(f) if s is None else _section(s)
    if not s.splits(f):
        raise ValueError("section does not split the weights (s o F != 1)")
    p = cokernel_projection(f)
    ray_coords: dict[tuple[int, ...], list[int]] = {}
    for i in range(f.n):
        image = p.col(i)
        if not any(image):
            raise ValueError("degenerate coordinate")
        ray_coords.setdefault(primitive(image)[0], []).append(i)
    fan = fan_from_weights(list(ray_coords))
    interior = fan.interior_rays()
    names = {}
    for k, ray in enumerate(interior):
        names[ray] = "E" if len(interior) == 1 else f"E{k + 1}"
    for ray, coords in ray_coords.items():
        if ray not in names:
            names[ray] = f"D{coords[0] + 1}"
    model = fan_model(fan, names)
    terms = {names[ray]: fiber_segment(f, p, s, ray) for ray in fan.rays}
    divisor = SegmentalDivisor.of(model, terms)
    coords = tuple((names[r], tuple(c + 1 for c in ray_coords[r])) for r in fan.rays)
    return Downgrade(f, s, p, fan, divisor, coords)


PROPOSITION_NAMES = {(1, 0): "D2", (1, 1): "E", (0, 1): "D3"}


def proposition_model() -> SurfaceModel:
    return blowup_model(1, PROPOSITION_NAMES)


def proposition_formula(a1: int, a2: int, a3: int, s=None) -> SegmentalDivisor:
    """Closed-form divisor on the blow-up of the plane at the origin.

    ``{alpha*rho(a1,a2)/-a1} D2 + {beta*rho(a1,a3)/-a1} D3
    + [gamma/delta, gamma/delta + 1/(-delta*a1)] E`` where ``rho`` is the
    gcd and ``delta = gcd(a2/rho(a1,a2), a3/rho(a1,a3))``.

    ``s`` is a section in coordinate order (``s1*a1 + s2*a2 + s3*a3 = 1``);
    the coefficient attached to ``D2`` is the one on ``a2``, the one on
    ``D3`` the one on ``a3``, and ``gamma`` is the one on ``a1``. With this
    reading the formula reproduces the downgrade of (2, 3, -6) term by term.
    """
    if not (-a1 > 0 and a2 > 0 and a3 > 0):
        raise ValueError("Proposition requires -a1,a2,a3 > 0")
    f = WeightMatrix((a1, a2, a3))
    s = make_section(f) if s is None else _section(s)
    if not s.splits(f):
        raise ValueError("section does not split the weights (s o F != 1)")
    gamma, alpha, beta = s.coeffs
    rho12, rho13 = gcd(a1, a2), gcd(a1, a3)
    delta = gcd(a2 // rho12, a3 // rho13)
    lo = Fraction(gamma, delta)
    return SegmentalDivisor.of(proposition_model(), {
        "D2": Fraction(alpha * rho12, -a1),
        "D3": Fraction(beta * rho13, -a1),
        "E": Segment(lo, lo + Fraction(1, -delta * a1)),
    })


def proposition_order(f) -> tuple[int, int, int]:
    """Reorder so that a unique negative weight comes first."""
    w = _weights(f).weights
    neg = [a for a in w if a < 0]
    if len(neg) != 1 or len(w) != 3:
        raise ValueError("Proposition needs exactly one negative weight among three")
    rest = [a for a in w if a >= 0]
    return (neg[0], rest[0], rest[1])


def matches_on(model: SurfaceModel, d_source: SegmentalDivisor, target: SegmentalDivisor):
    """First fan isomorphism (with its shift witness) taking ``d_source``
    to a divisor equivalent to ``target``, or None."""
    for m in fan_isomorphisms(d_source.model.fan, model.fan):
        moved = transport(d_source, m, model)
        w = equivalent(moved, target)
        if w is not None:
            return m, w
    return None


def crosscheck(f) -> bool:
    """Do the downgrade and the closed-form Proposition divisor agree up to
    fan isomorphism and shift equivalence?"""
    a1, a2, a3 = proposition_order(f)
    geometric = downgrade((a1, a2, a3)).divisor
    formula = proposition_formula(a1, a2, a3)
    return matches_on(formula.model, geometric, formula) is not None
