"""Randomized law checks (acceptance criterion 6)."""

import json
from fractions import Fraction as F
from math import gcd

import pytest
import sympy
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from tgm.downgrade import downgrade, make_section
from tgm.exactmath import IntMat, ext_gcd, primitive, smith_normal_form
from tgm.formats import divisor_from_json, divisor_to_json, dumps, format_divisor, parse_divisor
from tgm.poly import MultiPoly, exact_divide, resultant, substitute
from tgm.sections import weight_space
from tgm.segdiv import Segment, SegmentalDivisor, equivalent, evaluate, normal_form, scale, shift
from tgm.surface import blowup_model, div_of_monomial
from tgm.threefold import hyperbolic_modification

from _support import tick

pytestmark = pytest.mark.criterion(6)

FAST = settings(max_examples=1500, deadline=None, suppress_health_check=[HealthCheck.too_slow])
MEDIUM = settings(max_examples=600, deadline=None, suppress_health_check=[HealthCheck.too_slow])
SLOW = settings(max_examples=250, deadline=None, suppress_health_check=[HealthCheck.too_slow])

UV = ("u", "v")

rats = st.builds(F, st.integers(-12, 12), st.integers(1, 7))


@st.composite
def segments(draw):
    a, b = draw(rats), draw(rats)
    return Segment(min(a, b), max(a, b))


@st.composite
def divisors(draw, max_d=4):
    d = draw(st.integers(1, max_d))
    model = blowup_model(d)
    terms = {name: draw(segments()) for name in model.names if draw(st.booleans())}
    return SegmentalDivisor.of(model, terms)


@st.composite
def polys(draw, ring=UV, max_exp=3, max_terms=4):
    terms = draw(st.dictionaries(st.tuples(*[st.integers(0, max_exp)] * len(ring)),
                                 st.integers(-5, 5), max_size=max_terms))
    return MultiPoly(ring, terms)


vectors = st.tuples(st.integers(-6, 6), st.integers(-6, 6))


# segmental divisors ----------------------------------------------------------------


@FAST
@given(divisors(), st.integers(-20, 20), st.integers(-20, 20))
def test_evaluate_superadditive(d, n, m):
    tick("superadditive")
    total, a, b = evaluate(d, n + m), evaluate(d, n), evaluate(d, m)
    for name in d.model.names:
        assert total[name] >= a[name] + b[name]


@FAST
@given(divisors(), st.integers(1, 9), st.integers(-15, 15))
def test_evaluate_scale_law(d, m, n):
    tick("evaluate-scale")
    assert evaluate(scale(d, m), n) == evaluate(d, m * n)


@FAST
@given(divisors(), vectors)
def test_equivalence_round_trip(d, w):
    tick("shift-round-trip")
    moved = shift(d, w)
    assert equivalent(d, moved) == w
    assert equivalent(moved, d) == (-w[0], -w[1])
    assert all(moved.segment(n).length == d.segment(n).length for n in d.model.names)


@FAST
@given(divisors(), vectors, st.integers(-10, 10))
def test_shift_changes_evaluation_by_principal_divisor(d, w, n):
    tick("shift-principal")
    lhs = evaluate(shift(d, w), n)
    rhs = evaluate(d, n) + div_of_monomial(d.model, n * w[0], n * w[1])
    assert lhs == rhs


@MEDIUM
@given(divisors(), vectors)
def test_normal_form_is_shift_invariant(d, w):
    tick("normal-form")
    nf = normal_form(d)
    assert normal_form(shift(d, w)) == nf
    assert normal_form(nf) == nf


# sections ----------------------------------------------------------------------


def _dominates(p, q):
    return p[0] >= q[0] and p[1] >= q[1]


@MEDIUM
@given(divisors(max_d=3), st.integers(-8, 8), st.data())
def test_staircase_minimality(d, n, data):
    tick("staircase-minimal")
    stc = weight_space(d, n)
    gens = stc.generators
    assert gens
    for g in gens:
        assert stc.contains(g)
        assert not any(h != g and _dominates(g, h) for h in gens)
    lo_a = min(g[0] for g in gens)
    lo_b = min(g[1] for g in gens)
    for _ in range(5):
        p = (data.draw(st.integers(lo_a - 3, lo_a + 15)), data.draw(st.integers(lo_b - 3, lo_b + 15)))
        if stc.contains(p):
            assert any(_dominates(p, g) for g in gens)


@MEDIUM
@given(divisors(max_d=3), st.integers(-6, 6), st.integers(-6, 6))
def test_staircase_multiplicativity(d, n, m):
    tick("staircase-multiplicative")
    target = weight_space(d, n + m)
    for g in weight_space(d, n).generators:
        for h in weight_space(d, m).generators:
            assert target.contains((g[0] + h[0], g[1] + h[1]))


# polynomials ----------------------------------------------------------------------


X = ("x1", "x2", "x3")


@MEDIUM
@given(polys(), polys(), polys(X, 2, 3), polys(X, 2, 3))
def test_substitute_is_a_ring_map(f, g, a, b):
    tick("substitute")
    images = {"u": a, "v": b}
    assert substitute(f * g, images, X) == substitute(f, images, X) * substitute(g, images, X)
    assert substitute(f + g, images, X) == substitute(f, images, X) + substitute(g, images, X)


@MEDIUM
@given(polys(), polys())
def test_exact_divide_inverts_multiplication(f, g):
    tick("exact-divide")
    if g.is_zero():
        return
    assert exact_divide(f * g, g) == f


def _sym(p):
    u, v = sympy.symbols("u v")
    return sum(sympy.Rational(c.numerator, c.denominator) * u ** e[0] * v ** e[1]
               for e, c in p.terms.items())


@SLOW
@given(polys(max_exp=2, max_terms=3), polys(max_exp=2, max_terms=3), polys(max_exp=2, max_terms=3))
def test_resultant_detects_common_factors(h, a, b):
    tick("resultant")
    if h.degree("u") < 1 or a.is_zero() or b.is_zero():
        return
    assert resultant(h * a, h * b, "u").is_zero()
    if a.degree("u") < 1 and b.degree("u") < 1:
        return
    common = sympy.gcd(_sym(a), _sym(b))
    shares = sympy.degree(common, sympy.Symbol("u")) > 0
    assert resultant(a, b, "u").is_zero() == shares


@MEDIUM
@given(polys(max_exp=3, max_terms=4))
def test_hyperbolic_modification_semi_invariant(f):
    tick("hypmod")
    f = f - MultiPoly.const(f.constant_term(), UV)
    if f.is_zero():
        return
    h = hyperbolic_modification(f)
    for exp in h.terms:
        assert exp[0] == exp[1] + exp[2] - 1


# integer linear algebra and downgrading -------------------------------------------


@FAST
@given(st.lists(st.lists(st.integers(-9, 9), min_size=3, max_size=3), min_size=1, max_size=3)
       .filter(lambda rows: any(any(r) for r in rows)))
def test_smith_normal_form_invariants(rows):
    tick("snf")
    m = IntMat(rows)
    u, s, v = smith_normal_form(m)
    assert u @ m @ v == s
    assert abs(u.det()) == 1 and abs(v.det()) == 1
    diag = [s[i, i] for i in range(min(s.rows, s.cols)) if s[i, i]]
    assert all(b % a == 0 for a, b in zip(diag, diag[1:]))


@FAST
@given(st.lists(st.integers(-30, 30).filter(bool), min_size=1, max_size=4))
def test_ext_gcd_identity(values):
    tick("ext-gcd")
    g, c = ext_gcd(values)
    assert g > 0 and sum(x * y for x, y in zip(c, values)) == g
    assert all(x % g == 0 for x in values)


@FAST
@given(vectors.filter(lambda w: w != (0, 0) and gcd(*w) == 1), st.integers(1, 20))
def test_primitive_of_multiple(w, k):
    tick("primitive")
    assert primitive((k * w[0], k * w[1])) == (w, k)


@st.composite
def hyperbolic_triples(draw):
    b = draw(st.integers(1, 12))
    a2, a3 = draw(st.integers(1, 12)), draw(st.integers(1, 12))
    if gcd(gcd(b, a2), a3) != 1:
        a2 = 1
    triple = [-b, a2, a3]
    return tuple(draw(st.permutations(triple)))


@MEDIUM
@given(hyperbolic_triples(), st.integers(-3, 3), st.integers(-3, 3))
def test_downgrade_section_choice_is_a_shift(f, k1, k2):
    tick("downgrade-section")
    s = make_section(f)
    # add integer combinations of kernel vectors of s -> s.F
    kernel = [(f[1], -f[0], 0), (0, f[2], -f[1])]
    s2 = tuple(c + k1 * x + k2 * y for c, x, y in zip(s.coeffs, *kernel))
    a, b = downgrade(f, s).divisor, downgrade(f, s2).divisor
    assert equivalent(a, b) is not None


@MEDIUM
@given(divisors())
def test_divisor_serialization_round_trips(d):
    tick("serialization")
    doc = dumps(divisor_to_json(d))
    assert dumps(divisor_to_json(divisor_from_json(json.loads(doc)))) == doc
    assert parse_divisor(format_divisor(d)) == d
