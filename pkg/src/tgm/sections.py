"""Graded pieces ``A_n = H^0(Y, O(D(n)))`` for toric-supported divisors.

A Laurent monomial ``u^a v^b`` is a section of ``sum q_r D_r`` iff
``<r, (a, b)> >= ceil(-q_r)`` for every ray ``r``. On the models used here
all rays lie in the closed first quadrant and include (1, 0) and (0, 1), so
each graded piece is a monomial module with finitely many staircase
generators.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import ceil, floor

from .exactmath import pairing
from .segdiv import SegmentalDivisor, evaluate

Point = tuple[int, int]
DEFAULT_VERIFY_BOUND = 8


def verify_bound() -> int:
    return int(os.environ.get("TGM_VERIFY_BOUND", DEFAULT_VERIFY_BOUND))


@dataclass(frozen=True)
class Staircase:
    constraints: tuple[tuple[tuple[int, int], int], ...]  # (ray, lower bound)
    generators: tuple[Point, ...]

    def contains(self, m: Point) -> bool:
        return all(pairing(r, m) >= c for r, c in self.constraints)


def minimal_elements(points) -> list[Point]:
    """Componentwise-minimal points, sorted by first coordinate."""
    best: dict[int, int] = {}
    for a, b in points:
        if a not in best or b < best[a]:
            best[a] = b
    out, floor_b = [], None
    for a in sorted(best):
        b = best[a]
        if floor_b is None or b < floor_b:
            out.append((a, b))
            floor_b = b
    return out


def _constraints(d: SegmentalDivisor, n: int) -> tuple[tuple[tuple[int, int], int], ...]:
    if d.curve_support():
        raise ValueError("sections need monomial support")
    q = evaluate(d, n)
    return tuple((ray, ceil(-q[name])) for name, ray in d.model.toric)


def _box(constraints) -> tuple[int, int, int, int]:
    rays = [r for r, _ in constraints]
    if (1, 0) not in rays or (0, 1) not in rays or any(r[0] < 0 or r[1] < 0 for r in rays):
        raise ValueError("weight spaces need rays (1,0), (0,1) and rays in the first quadrant")
    vertices = []
    for (r1, c1), (r2, c2) in combinations(constraints, 2):
        det = r1[0] * r2[1] - r1[1] * r2[0]
        if det == 0:
            continue
        x = Fraction(c1 * r2[1] - c2 * r1[1], det)
        y = Fraction(r1[0] * c2 - r2[0] * c1, det)
        if all(pairing(r, (x, y)) >= c for r, c in constraints):
            vertices.append((x, y))
    xs = [v[0] for v in vertices]
    ys = [v[1] for v in vertices]
    return floor(min(xs)) - 2, ceil(max(xs)) + 2, floor(min(ys)) - 2, ceil(max(ys)) + 2


def weight_space(d: SegmentalDivisor, n: int) -> Staircase:
    """Staircase generators of the weight-``n`` piece by bounded enumeration.

    The box is spanned by the vertices of the section polyhedron, padded
    by 2. Since all constraint normals are nonnegative, every minimal
    lattice point lies inside it.
    """
    cons = _constraints(d, n)
    a0, a1, b0, b1 = _box(cons)
    pts = [(a, b) for a in range(a0, a1 + 1) for b in range(b0, b1 + 1)
           if all(r[0] * a + r[1] * b >= c for r, c in cons)]
    return Staircase(cons, tuple(minimal_elements(pts)))


def _sum_sets(left, right) -> list[Point]:
    return minimal_elements({(a + c, b + e) for a, b in left for c, e in right})


def _generated(gens_d, zero: Staircase, target: Staircase, k: int) -> bool:
    powers = list(gens_d)
    for _ in range(k - 1):
        powers = _sum_sets(powers, gens_d)
    for g in target.generators:
        if not any(zero.contains((g[0] - h[0], g[1] - h[1])) for h in powers):
            return False
    return True


def generates(d: SegmentalDivisor, step: int, verify: int | None = None) -> bool:
    """Is ``A_{step*k}`` spanned by ``A_0``-multiples of ``A_{+-step}^|k|``
    for every ``0 < |k| <= verify``? Mixed products reduce to pure powers
    because ``A_step * A_-step`` lies in ``A_0``."""
    verify = verify_bound() if verify is None else verify
    zero = weight_space(d, 0)
    plus, minus = weight_space(d, step), weight_space(d, -step)
    for k in range(2, verify + 1):
        if not _generated(plus.generators, zero, weight_space(d, step * k), k):
            return False
        if not _generated(minus.generators, zero, weight_space(d, -step * k), k):
            return False
    return True


def find_d(d: SegmentalDivisor, search_bound: int, verify: int | None = None) -> int:
    """Smallest positive ``d <= search_bound`` passing :func:`generates`."""
    for step in range(1, search_bound + 1):
        if generates(d, step, verify):
            return step
    raise ValueError(f"no generating degree ≤ {search_bound}")


def center_ideal(d: SegmentalDivisor, step: int) -> list[Point]:
    """Minimal exponents of the monomial ideal ``<A_step * A_-step>`` in ``A_0``."""
    plus, minus = weight_space(d, step), weight_space(d, -step)
    return _sum_sets(plus.generators, minus.generators)


def monomial_str(m: Point, u: str = "u", v: str = "v") -> str:
    parts = []
    for name, e in ((u, m[0]), (v, m[1])):
        if e == 1:
            parts.append(name)
        elif e:
            parts.append(f"{name}^{e}")
    return "*".join(parts) or "1"
