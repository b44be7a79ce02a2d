"""Segmental divisors: sums of closed rational intervals times prime divisors.

Linear equivalence is modelled by integral character shifts: shifting by
``w`` adds ``<w, r>`` to both endpoints of the segment on the toric divisor
with ray ``r`` (absent toric divisors count as ``{0}``), which changes every
evaluation ``D(n)`` by the principal divisor of ``chi^(n w)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import floor
from typing import Mapping, Sequence

from .exactmath import IntMat, as_rat, format_rat, pairing, solve_integral
from .surface import QDivisor, SurfaceModel, apply


@dataclass(frozen=True, order=True)
class Segment:
    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        object.__setattr__(self, "lo", as_rat(self.lo))
        object.__setattr__(self, "hi", as_rat(self.hi))
        if self.lo > self.hi:
            raise ValueError(f"segment [{self.lo}, {self.hi}] has lo > hi")

    @classmethod
    def point(cls, q) -> "Segment":
        return cls(q, q)

    @property
    def is_point(self) -> bool:
        return self.lo == self.hi

    @property
    def length(self) -> Fraction:
        return self.hi - self.lo

    def is_zero(self) -> bool:
        return self.lo == 0 and self.hi == 0

    def __add__(self, k) -> "Segment":
        return Segment(self.lo + k, self.hi + k)

    def scaled(self, m) -> "Segment":
        a, b = self.lo * m, self.hi * m
        return Segment(min(a, b), max(a, b))

    def at(self, n: int) -> Fraction:
        return min(n * self.lo, n * self.hi)

    def __str__(self):
        if self.is_point:
            return "{" + format_rat(self.lo) + "}"
        return f"[{format_rat(self.lo)},{format_rat(self.hi)}]"


@dataclass(frozen=True)
class SegmentalDivisor:
    """``sum [lo_i, hi_i] (x) D_i`` over divisors of ``model``.

    Terms are kept in the model's name order; ``{0}`` terms are dropped.
    """

    model: SurfaceModel
    terms: tuple[tuple[str, Segment], ...] = field(default=())

    @classmethod
    def of(cls, model: SurfaceModel, terms: Mapping[str, object]) -> "SegmentalDivisor":
        known = model.names
        clean = {}
        for name, seg in terms.items():
            if name not in known:
                raise ValueError(f"divisor {name!r} is not in the model")
            if not isinstance(seg, Segment):
                if isinstance(seg, (tuple, list)):
                    seg = Segment(*seg)
                else:
                    seg = Segment.point(seg)
            if not seg.is_zero():
                clean[name] = seg
        return cls(model, tuple((n, clean[n]) for n in known if n in clean))

    def as_dict(self) -> dict[str, Segment]:
        return dict(self.terms)

    def segment(self, name: str) -> Segment:
        return self.as_dict().get(name, Segment.point(0))

    def support(self) -> list[str]:
        return [n for n, _ in self.terms]

    def curve_support(self) -> list[str]:
        return [n for n, _ in self.terms if not self.model.is_toric(n)]

    def __eq__(self, other):
        if not isinstance(other, SegmentalDivisor):
            return NotImplemented
        return self.model == other.model and self.as_dict() == other.as_dict()

    def __str__(self):
        if not self.terms:
            return "0"
        return " + ".join(f"{seg}*{name}" for name, seg in self.terms)


def evaluate(d: SegmentalDivisor, n: int) -> QDivisor:
    """``D(n) = sum min(n*lo, n*hi) D_i``."""
    return QDivisor.of({name: seg.at(n) for name, seg in d.terms})


def scale(d: SegmentalDivisor, m: int) -> SegmentalDivisor:
    if m < 1:
        raise ValueError("scale factor must be a positive integer")
    return SegmentalDivisor.of(d.model, {n: s.scaled(m) for n, s in d.terms})


def _require_toric(d: SegmentalDivisor) -> None:
    if d.curve_support():
        raise ValueError("shift undefined on non-toric support")


def shift(d: SegmentalDivisor, w: Sequence[int]) -> SegmentalDivisor:
    _require_toric(d)
    w = tuple(int(x) for x in w)
    terms = d.as_dict()
    out = {}
    for name, ray in d.model.toric:
        out[name] = terms.get(name, Segment.point(0)) + pairing(w, ray)
    return SegmentalDivisor.of(d.model, out)


def equivalent(d1: SegmentalDivisor, d2: SegmentalDivisor) -> tuple[int, int] | None:
    """An integral ``w`` with ``shift(d1, w) == d2``, or None.

    Curve-supported terms are untouched by shifts, so they must agree
    exactly for a witness to exist.
    """
    if d1.model != d2.model:
        raise ValueError("equivalence is only defined on a common model")
    model = d1.model
    for name, _ in model.curves:
        if d1.segment(name) != d2.segment(name):
            return None
    rays, diffs = [], []
    for name, ray in model.toric:
        s1, s2 = d1.segment(name), d2.segment(name)
        if s1.length != s2.length:
            return None
        rays.append(ray)
        diffs.append(s2.lo - s1.lo)
    try:
        w = solve_integral(IntMat(rays), diffs)
    except ValueError:
        return None
    return w[0], w[1]


FRAME = ((1, 0), (0, 1))


def normal_form_shift(d: SegmentalDivisor) -> tuple[int, int]:
    _require_toric(d)
    w = []
    for frame in FRAME:
        names = [n for n, r in d.model.toric if r == frame]
        lo = d.segment(names[0]).lo if names else Fraction(0)
        w.append(-floor(lo))
    return w[0], w[1]


def normal_form(d: SegmentalDivisor) -> SegmentalDivisor:
    """Canonical shift representative: the lo endpoints on the rays (1, 0)
    and (0, 1) are moved into [0, 1). A missing frame ray leaves that
    component of the shift at zero."""
    return shift(d, normal_form_shift(d))


def transport(d: SegmentalDivisor, matrix: IntMat, target: SurfaceModel) -> SegmentalDivisor:
    """Carry a toric-supported divisor along a lattice isomorphism onto ``target``."""
    _require_toric(d)
    terms = {}
    for name, seg in d.terms:
        image = apply(matrix, d.model.ray_of(name))
        terms[target.name_of_ray(image)] = seg
    return SegmentalDivisor.of(target, terms)


# properness on blow-up models ----------------------------------------------------


@dataclass(frozen=True)
class ProperReport:
    bound: int
    q_cartier: bool
    semi_ample_failures: tuple[int, ...]
    big_failures: tuple[int, ...]
    semi_ample_equalities: tuple[int, ...]

    @property
    def semi_ample(self) -> bool:
        return not self.semi_ample_failures

    @property
    def big(self) -> bool:
        return not self.big_failures

    @property
    def passed(self) -> bool:
        return self.q_cartier and self.semi_ample and self.big

    @property
    def failing(self) -> tuple[int, ...]:
        return tuple(sorted(set(self.semi_ample_failures) | set(self.big_failures)))


def check_proper(d: SegmentalDivisor, bound: int) -> ProperReport:
    """Check the ps-divisor conditions for ``0 < |n| <= bound``.

    Only blow-up models with toric support are handled. The model is
    simplicial, so every ``D(n)`` is Q-Cartier. Semi-ampleness is convexity
    of the support function across the exceptional ray, which reads
    ``q_E <= d*q_u + q_v``. Bigness asks the section polyhedron
    ``{m : <r, m> + q_r >= 0}`` for interior points.
    """
    model = d.model
    if model.blowup_d is None:
        raise ValueError("check_proper needs a blow-up model")
    _require_toric(d)
    k = model.blowup_d
    by_ray = {ray: name for name, ray in model.toric}
    n_u, n_e, n_v = by_ray[(1, 0)], by_ray[(k, 1)], by_ray[(0, 1)]
    fails_sa, fails_big, equal = [], [], []
    for n in range(-bound, bound + 1):
        if n == 0:
            continue
        q = evaluate(d, n)
        lhs, rhs = q[n_e], k * q[n_u] + q[n_v]
        if lhs > rhs:
            fails_sa.append(n)
        elif lhs == rhs:
            equal.append(n)
        if _interior_point(model, q) is None:
            fails_big.append(n)
    return ProperReport(bound, True, tuple(fails_sa), tuple(fails_big), tuple(equal))


def _interior_point(model: SurfaceModel, q: QDivisor) -> tuple[Fraction, Fraction] | None:
    rays = [r for _, r in model.toric]
    if not all(r[0] >= 0 and r[1] >= 0 for r in rays):
        return None
    # along the diagonal every constraint eventually holds strictly
    t = max([Fraction(-q[name], r[0] + r[1]) for name, r in model.toric] + [Fraction(0)]) + 1
    point = (t, t)
    assert all(pairing(r, point) + q[name] > 0 for name, r in model.toric)
    return point


# isotropy report ----------------------------------------------------------------


@dataclass(frozen=True)
class TermInfo:
    name: str
    segment: Segment
    kind: str  # "point" or "interval"
    order: int | None  # cyclic isotropy order for points


@dataclass(frozen=True)
class DescribeReport:
    terms: tuple[TermInfo, ...]
    interval_divisors: tuple[str, ...]
    unique_interval: bool
    interval_on_exceptional: bool

    @property
    def isotropy_orders(self) -> dict[str, int]:
        return {t.name: t.order for t in self.terms if t.kind == "point"}

    @property
    def nontrivial_orders(self) -> set[int]:
        return {t.order for t in self.terms if t.kind == "point" and t.order > 1}

    @property
    def fixed_point_divisor(self) -> str | None:
        return self.interval_divisors[0] if self.unique_interval else None


def describe(d: SegmentalDivisor, exceptional: str = "E") -> DescribeReport:
    """Point coefficient ``{a/b}``: finite cyclic isotropy of order ``b``.
    Interval with nonempty interior: fixed points over that divisor."""
    infos = []
    for name, seg in d.terms:
        if seg.is_point:
            infos.append(TermInfo(name, seg, "point", seg.lo.denominator))
        else:
            infos.append(TermInfo(name, seg, "interval", None))
    intervals = tuple(t.name for t in infos if t.kind == "interval")
    unique = len(intervals) == 1
    return DescribeReport(tuple(infos), intervals, unique, unique and intervals[0] == exceptional)
