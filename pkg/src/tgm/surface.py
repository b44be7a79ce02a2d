"""Toric surface models: 2D fans, named prime divisors and fan isomorphisms."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Mapping, Sequence

from .exactmath import IntMat, det2, ext_gcd, pairing, primitive
from .poly import MultiPoly

Ray = tuple[int, int]


def _half(r: Ray) -> int:
    # 0 for angles in [0, pi), 1 for [pi, 2pi)
    return 0 if r[1] > 0 or (r[1] == 0 and r[0] > 0) else 1


def ccw_sorted(rays) -> list[Ray]:
    """Sort by angle in [0, 2pi) measured from (1, 0), using exact cross products."""
    from functools import cmp_to_key

    def cmp(a, b):
        ha, hb = _half(a), _half(b)
        if ha != hb:
            return ha - hb
        return -det2(a, b)

    return sorted(rays, key=cmp_to_key(cmp))


@dataclass(frozen=True)
class Fan2D:
    """A 2D fan: primitive rays sorted counterclockwise, cones as index tuples.

    Maximal cones are pairs ``(i, j)`` with ``det(rays[i], rays[j]) > 0``;
    a ray not lying in any 2D cone is its own maximal cone ``(i,)``.
    """

    rays: tuple[Ray, ...]
    cones: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        for r in self.rays:
            if primitive(r)[0] != tuple(r):
                raise ValueError(f"ray {r} is not primitive")
        if len(set(self.rays)) != len(self.rays):
            raise ValueError("repeated ray")
        if list(self.rays) != ccw_sorted(self.rays):
            raise ValueError("rays must be sorted counterclockwise")
        for cone in self.cones:
            if len(cone) == 2 and det2(self.rays[cone[0]], self.rays[cone[1]]) <= 0:
                raise ValueError(f"cone {cone} is not positively oriented")

    def cone_rays(self) -> set[frozenset[Ray]]:
        return {frozenset(self.rays[i] for i in c) for c in self.cones}

    def two_cones(self) -> list[tuple[Ray, Ray]]:
        return [(self.rays[c[0]], self.rays[c[1]]) for c in self.cones if len(c) == 2]

    def is_smooth(self) -> bool:
        return all(det2(a, b) == 1 for a, b in self.two_cones())

    def interior_rays(self) -> list[Ray]:
        """Rays lying in two 2D cones (for a blow-up: the exceptional ray)."""
        count = {r: 0 for r in self.rays}
        for a, b in self.two_cones():
            count[a] += 1
            count[b] += 1
        return [r for r in self.rays if count[r] >= 2]

    def to_dict(self) -> dict:
        return {"rays": [list(r) for r in self.rays],
                "cones": [[list(self.rays[i]) for i in c] for c in self.cones]}


def fan_from_weights(vectors: Sequence[Sequence[int]]) -> Fan2D:
    """The coarsest fan whose support is the union of all cones spanned by
    subsets of ``vectors``, subdivided exactly at the given rays."""
    if not vectors:
        raise ValueError("fan_from_weights needs at least one ray")
    rays = ccw_sorted({primitive(v)[0] for v in vectors})
    n = len(rays)
    cones = []
    if n >= 2:
        pairs = [(i, i + 1) for i in range(n - 1)] + [(n - 1, 0)]
        for i, j in pairs:
            if det2(rays[i], rays[j]) > 0:
                cones.append((i, j))
    covered = {k for c in cones for k in c}
    for k in range(n):
        if k not in covered:
            cones.append((k,))
    cones.sort()
    return Fan2D(tuple(rays), tuple(cones))


def apply(matrix: IntMat, r: Sequence[int]) -> Ray:
    return tuple(matrix @ tuple(r))


def is_fan_isomorphism(matrix: IntMat, f1: Fan2D, f2: Fan2D) -> bool:
    if matrix.shape != (2, 2) or abs(matrix.det()) != 1:
        return False
    if {apply(matrix, r) for r in f1.rays} != set(f2.rays):
        return False
    mapped = {frozenset(apply(matrix, r) for r in c) for c in f1.cone_rays()}
    return mapped == f2.cone_rays()


def fan_isomorphisms(f1: Fan2D, f2: Fan2D) -> Iterator[IntMat]:
    """All unimodular maps carrying ``f1`` onto ``f2``, in a fixed order."""
    if len(f1.rays) != len(f2.rays) or len(f1.cones) != len(f2.cones):
        return
    basis = None
    for i, a in enumerate(f1.rays):
        for b in f1.rays[i + 1:]:
            if det2(a, b):
                basis = (a, b)
                break
        if basis:
            break
    if basis is None:
        # every ray on one line: at most two rays, map them directly
        for target in (f2.rays, tuple(reversed(f2.rays))):
            m = _line_map(f1.rays, target)
            if m is not None and is_fan_isomorphism(m, f1, f2):
                yield m
        return
    a, b = basis
    d = det2(a, b)
    seen = set()
    for s in f2.rays:
        for t in f2.rays:
            if s == t:
                continue
            # matrix M with M a = s, M b = t:  M = [s t] [a b]^{-1}
            num = [[s[0] * b[1] - t[0] * a[1], -s[0] * b[0] + t[0] * a[0]],
                   [s[1] * b[1] - t[1] * a[1], -s[1] * b[0] + t[1] * a[0]]]
            if any(x % d for row in num for x in row):
                continue
            m = IntMat([[x // d for x in row] for row in num])
            if m in seen:
                continue
            seen.add(m)
            if is_fan_isomorphism(m, f1, f2):
                yield m


def _line_map(src, dst):
    if len(src) != len(dst):
        return None
    a, b = _basis_to(src[0]), _basis_to(dst[0])
    # both have determinant one, so the adjugate inverts b
    binv = IntMat([[b[1, 1], -b[0, 1]], [-b[1, 0], b[0, 0]]])
    return binv @ a


def _basis_to(r: Ray) -> IntMat:
    """A determinant-one matrix sending the primitive vector ``r`` to (1, 0)."""
    _, (p, q) = ext_gcd(list(r))
    return IntMat([[p, q], [-r[1], r[0]]])


def fan_isomorphic(f1: Fan2D, f2: Fan2D) -> IntMat | None:
    return next(fan_isomorphisms(f1, f2), None)


def normalize_fan(fan: Fan2D) -> tuple[Fan2D, IntMat]:
    """A canonical unimodular image of ``fan`` and the matrix producing it.

    The first ray that starts a 2D cone without ending one (the first ray
    of a complete fan) goes to (1, 0); the next ray goes to (a, b) with
    0 <= a < b.
    """
    rays = fan.rays
    n = len(rays)
    if n == 1:
        m = _basis_to(rays[0])
        return Fan2D(((1, 0),), ((0,),)), m
    two = {c for c in fan.cones if len(c) == 2}
    start = next((k for k in range(n) if ((k - 1) % n, k) not in two), 0)
    m = _basis_to(rays[start])
    a, b = apply(m, rays[(start + 1) % n])
    if b != 0:
        if b < 0:
            m = IntMat([[1, 0], [0, -1]]) @ m
            a, b = apply(m, rays[(start + 1) % n])
        k = a // b
        m = IntMat([[1, -k], [0, 1]]) @ m
    image = fan_from_weights([apply(m, r) for r in rays])
    return image, m


# surface models ------------------------------------------------------------


@dataclass(frozen=True)
class SurfaceModel:
    """A toric surface with named toric divisors and named curve divisors.

    Every ray of the fan carries exactly one toric divisor name. Curve
    divisors are strict transforms of plane curves ``{h(u, v) = 0}``.
    ``blowup_d`` records the centre ``(u, v^d)`` when the model is a
    blow-up of the plane, else None.
    """

    fan: Fan2D
    toric: tuple[tuple[str, Ray], ...]
    curves: tuple[tuple[str, MultiPoly], ...] = ()
    blowup_d: int | None = None

    def __post_init__(self):
        names = [n for n, _ in self.toric] + [n for n, _ in self.curves]
        if len(set(names)) != len(names):
            raise ValueError("divisor names must be unique")
        if sorted(r for _, r in self.toric) != sorted(self.fan.rays):
            raise ValueError("toric divisors must name each ray of the fan exactly once")
        for name, h in self.curves:
            if h.is_zero() or h.constant_term() != 0:
                raise ValueError(f"curve {name} must be nonzero with zero constant term")

    @property
    def toric_divisors(self) -> dict[str, Ray]:
        return dict(self.toric)

    @property
    def curve_divisors(self) -> dict[str, MultiPoly]:
        return dict(self.curves)

    @property
    def names(self) -> list[str]:
        return [n for n, _ in self.toric] + [n for n, _ in self.curves]

    def ray_of(self, name: str) -> Ray | None:
        return self.toric_divisors.get(name)

    def name_of_ray(self, ray: Sequence[int]) -> str:
        ray = tuple(ray)
        for n, r in self.toric:
            if r == ray:
                return n
        raise KeyError(f"no divisor on ray {ray}")

    def is_toric(self, name: str) -> bool:
        if name in self.toric_divisors:
            return True
        if name in self.curve_divisors:
            return False
        raise KeyError(f"unknown divisor {name!r}")

    def exceptional_name(self) -> str | None:
        interior = self.fan.interior_rays()
        return self.name_of_ray(interior[0]) if len(interior) == 1 else None


def blowup_fan(d: int) -> Fan2D:
    return fan_from_weights([(1, 0), (d, 1), (0, 1)])


def blowup_model(d: int, names: Mapping[Ray, str] | None = None,
                 curves: Mapping[str, MultiPoly] | None = None) -> SurfaceModel:
    """The blow-up of the plane with centre ``(u, v^d)``.

    Its fan has rays (1, 0), (d, 1), (0, 1), named ``D_u``, ``E``, ``D_v``
    unless ``names`` overrides some of them.
    """
    if d < 1:
        raise ValueError("blow-up exponent d must be positive")
    default = {(1, 0): "D_u", (d, 1): "E", (0, 1): "D_v"}
    if names:
        unknown = set(names) - set(default)
        if unknown:
            raise ValueError(f"rays {sorted(unknown)} are not rays of the d={d} blow-up")
        default.update(names)
    fan = blowup_fan(d)
    toric = tuple((default[r], r) for r in fan.rays)
    return SurfaceModel(fan, toric, tuple((curves or {}).items()), blowup_d=d)


def fan_model(fan: Fan2D, names: Mapping[Ray, str] | None = None,
              curves: Mapping[str, MultiPoly] | None = None) -> SurfaceModel:
    names = dict(names or {})
    toric = tuple((names.get(r, f"R{r[0]}_{r[1]}".replace("-", "m")), r) for r in fan.rays)
    d = None
    if len(fan.rays) == 3 and fan.rays[0] == (1, 0) and fan.rays[2] == (0, 1) \
            and fan.rays[1][1] == 1 and fan.rays[1][0] >= 1:
        d = fan.rays[1][0]
    return SurfaceModel(fan, toric, tuple((curves or {}).items()), blowup_d=d)


# Q-divisors ----------------------------------------------------------------------


@dataclass(frozen=True)
class QDivisor:
    """Rational Weil divisor; zero coefficients are never stored."""

    coefficients: tuple[tuple[str, Fraction], ...] = field(default=())

    @classmethod
    def of(cls, mapping: Mapping[str, object]) -> "QDivisor":
        items = tuple((n, Fraction(c)) for n, c in mapping.items() if Fraction(c) != 0)
        return cls(items)

    def as_dict(self) -> dict[str, Fraction]:
        return dict(self.coefficients)

    def __getitem__(self, name: str) -> Fraction:
        return self.as_dict().get(name, Fraction(0))

    def __add__(self, other: "QDivisor") -> "QDivisor":
        out = self.as_dict()
        for n, c in other.coefficients:
            out[n] = out.get(n, Fraction(0)) + c
        return QDivisor.of(out)

    def scaled(self, k) -> "QDivisor":
        return QDivisor.of({n: c * k for n, c in self.coefficients})

    def __eq__(self, other):
        if not isinstance(other, QDivisor):
            return NotImplemented
        return self.as_dict() == other.as_dict()

    def __hash__(self):
        return hash(frozenset(self.coefficients))

    def is_zero(self) -> bool:
        return not self.coefficients

    def __str__(self):
        from .exactmath import format_rat
        if not self.coefficients:
            return "0"
        return " + ".join(f"{format_rat(c)}*{n}" for n, c in self.coefficients)


def div_of_monomial(model: SurfaceModel, a: int, b: int) -> QDivisor:
    """Principal divisor of the Laurent monomial ``u^a v^b`` on the model."""
    for name, h in model.curves:
        if len(h.terms) == 1:
            (exp, _), = h.terms.items()
            idx = {v: i for i, v in enumerate(h.variables)}
            mono = {"u": a, "v": b}
            if any(exp[idx[v]] and mono.get(v, 0) for v in idx):
                raise ValueError("monomial not coprime to curve divisor")
    return QDivisor.of({name: pairing(r, (a, b)) for name, r in model.toric})


def multiplicity_along(h: MultiPoly, ray: Sequence[int], u: str = "u", v: str = "v") -> int:
    """Order of vanishing of ``h(u, v)`` along the toric divisor of ``ray``:
    the minimum of ``<ray, (a, b)>`` over the monomials ``u^a v^b`` of ``h``."""
    if h.is_zero():
        raise ValueError("multiplicity of the zero polynomial")
    h = h.in_ring((u, v) + tuple(x for x in h.variables if x not in (u, v)))
    return min(ray[0] * e[0] + ray[1] * e[1] for e in h.terms)
