"""Exact integer and rational linear algebra.

Rationals are :class:`fractions.Fraction` throughout; integer matrices are
small immutable :class:`IntMat` values. Nothing here touches floating point.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence

Rat = Fraction


def as_rat(value) -> Fraction:
    """Coerce ints, Fractions and strings like ``"-1/3"`` to a Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot interpret {value!r} as an exact rational")


def format_rat(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


class IntMat:
    """Immutable integer matrix stored row-major."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, data: Iterable[Iterable[int]]):
        rows = [tuple(int(x) for x in row) for row in data]
        if not rows:
            raise ValueError("matrix needs at least one row")
        ncols = len(rows[0])
        if any(len(r) != ncols for r in rows):
            raise ValueError("ragged matrix")
        object.__setattr__(self, "rows", len(rows))
        object.__setattr__(self, "cols", ncols)
        object.__setattr__(self, "entries", tuple(x for r in rows for x in r))

    def __setattr__(self, name, value):
        raise AttributeError("IntMat is immutable")

    @classmethod
    def identity(cls, n: int) -> "IntMat":
        return cls([[int(i == j) for j in range(n)] for i in range(n)])

    @classmethod
    def column(cls, values: Sequence[int]) -> "IntMat":
        return cls([[v] for v in values])

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> tuple[int, ...]:
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def col(self, j: int) -> tuple[int, ...]:
        return tuple(self.entries[i * self.cols + j] for i in range(self.rows))

    def tolist(self) -> list[list[int]]:
        return [list(self.row(i)) for i in range(self.rows)]

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    def transpose(self) -> "IntMat":
        return IntMat([self.col(j) for j in range(self.cols)])

    def __matmul__(self, other):
        if isinstance(other, IntMat):
            if self.cols != other.rows:
                raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
            cols = [other.col(j) for j in range(other.cols)]
            return IntMat([[sum(a * b for a, b in zip(self.row(i), c)) for c in cols]
                           for i in range(self.rows)])
        vec = tuple(other)
        if len(vec) != self.cols:
            raise ValueError("vector length mismatch")
        return tuple(sum(a * b for a, b in zip(self.row(i), vec)) for i in range(self.rows))

    def __eq__(self, other):
        return isinstance(other, IntMat) and self.shape == other.shape and self.entries == other.entries

    def __hash__(self):
        return hash((self.shape, self.entries))

    def __repr__(self):
        return f"IntMat({self.tolist()})"

    def det(self) -> int:
        if self.rows != self.cols:
            raise ValueError("determinant of a non-square matrix")
        return bareiss_det([list(self.row(i)) for i in range(self.rows)])


def bareiss_det(m: list[list[int]]) -> int:
    """Fraction-free determinant of an integer matrix (the input is consumed)."""
    n = len(m)
    if n == 0:
        return 1
    sign, prev = 1, 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k] != 0:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    # x*a + y*b == g throughout; g may come out negative.
    x, next_x = 1, 0
    y, next_y = 0, 1
    g, next_g = a, b
    while next_g:
        q = g // next_g
        x, next_x = next_x, x - q * next_x
        y, next_y = next_y, y - q * next_y
        g, next_g = next_g, g - q * next_g
    return x, y, g


def ext_gcd(values: Sequence[int]) -> tuple[int, list[int]]:
    """Return ``(g, c)`` with ``g = gcd(values) > 0`` and ``sum(c_i * a_i) == g``.

    The coefficients are built left to right; whenever the running gcd
    already divides the next entry that entry gets coefficient zero.

    >>> ext_gcd([2, 3, -6])
    (1, [-1, 1, 0])
    """
    values = [int(v) for v in values]
    if not values or all(v == 0 for v in values):
        raise ValueError("degenerate gcd input")
    g, coeffs = 0, []
    for a in values:
        if g == 0:
            if a == 0:
                coeffs.append(0)
                continue
            g = abs(a)
            coeffs.append(1 if a > 0 else -1)
            continue
        if a % g == 0:
            coeffs.append(0)
            continue
        x, y, h = _xgcd(g, a)
        if h < 0:
            x, y, h = -x, -y, -h
        coeffs = [x * c for c in coeffs]
        coeffs.append(y)
        g = h
    assert sum(c * a for c, a in zip(coeffs, values)) == g
    return g, coeffs


def smith_normal_form(m: IntMat) -> tuple[IntMat, IntMat, IntMat]:
    """Smith normal form with transforms: ``U @ M @ V == S``.

    Pivoting is deterministic (smallest nonzero absolute value, first in
    row-major order), so repeated calls give identical transforms. A matrix
    already in Smith form comes back with identity transforms.
    """
    if all(x == 0 for x in m.entries):
        raise ValueError("smith_normal_form of the zero matrix")
    nr, nc = m.shape
    a = m.tolist()
    u = IntMat.identity(nr).tolist()
    v = IntMat.identity(nc).tolist()

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for row in a:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]

    def add_row(dst, src, k):
        # row_dst += k * row_src
        a[dst] = [x + k * y for x, y in zip(a[dst], a[src])]
        u[dst] = [x + k * y for x, y in zip(u[dst], u[src])]

    def add_col(dst, src, k):
        for row in a:
            row[dst] += k * row[src]
        for row in v:
            row[dst] += k * row[src]

    t = 0
    while t < min(nr, nc):
        nonzero = [(abs(a[i][j]), i, j) for i in range(t, nr) for j in range(t, nc) if a[i][j]]
        if not nonzero:
            break
        while True:
            _, pi, pj = min(nonzero)
            if pi != t:
                swap_rows(t, pi)
            if pj != t:
                swap_cols(t, pj)
            done = True
            for i in range(t + 1, nr):
                if a[i][t]:
                    add_row(i, t, -(a[i][t] // a[t][t]))
                    done = done and a[i][t] == 0
            for j in range(t + 1, nc):
                if a[t][j]:
                    add_col(j, t, -(a[t][j] // a[t][t]))
                    done = done and a[t][j] == 0
            if done:
                # enforce divisibility of the remaining block
                bad = [(i, j) for i in range(t + 1, nr) for j in range(t + 1, nc)
                       if a[i][j] % a[t][t]]
                if not bad:
                    break
                add_row(t, bad[0][0], 1)
            nonzero = [(abs(a[i][j]), i, j) for i in range(t, nr) for j in range(t, nc) if a[i][j]]
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            u[t] = [-x for x in u[t]]
        t += 1
    return IntMat(u), IntMat(a), IntMat(v)


def primitive(vec: Sequence[int]) -> tuple[tuple[int, ...], int]:
    """Split ``vec`` as ``lam * w`` with ``w`` primitive on the same ray."""
    vec = tuple(int(x) for x in vec)
    lam = 0
    for x in vec:
        lam = gcd(lam, x)
    if lam == 0:
        raise ValueError("zero vector has no ray")
    return tuple(x // lam for x in vec), lam


def solve_integral(p: IntMat, rhs: Sequence) -> tuple[int, ...]:
    """An integer ``x`` with ``p @ x == rhs``, free coordinates set to zero.

    ``rhs`` may hold Fractions; a non-integral or inconsistent right-hand
    side raises ``ValueError("not in image lattice")``.
    """
    rhs = [as_rat(x) for x in rhs]
    if len(rhs) != p.rows:
        raise ValueError("right-hand side length mismatch")
    if any(x.denominator != 1 for x in rhs):
        raise ValueError("not in image lattice")
    b = [int(x) for x in rhs]
    if all(x == 0 for x in p.entries):
        if any(b):
            raise ValueError("not in image lattice")
        return (0,) * p.cols
    u, s, v = smith_normal_form(p)
    ub = u @ b
    y = [0] * p.cols
    for i in range(p.rows):
        d = s[i, i] if i < p.cols else 0
        if d == 0:
            if ub[i] != 0:
                raise ValueError("not in image lattice")
            continue
        if ub[i] % d:
            raise ValueError("not in image lattice")
        y[i] = ub[i] // d
    x = v @ y
    assert p @ x == tuple(b)
    return x


def pairing(w: Sequence, r: Sequence):
    return sum(a * b for a, b in zip(w, r))


def det2(a: Sequence[int], b: Sequence[int]) -> int:
    return a[0] * b[1] - a[1] * b[0]
