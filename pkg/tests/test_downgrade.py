from fractions import Fraction as F
from math import gcd

import pytest

from tgm.downgrade import (WeightMatrix, cokernel_projection, crosscheck, downgrade,
                           make_section, matches_on, proposition_formula, proposition_model)
from tgm.segdiv import Segment, SegmentalDivisor, equivalent, normal_form
from tgm.surface import blowup_model, fan_isomorphic

from _support import minus_e, cusp_divisor, frame_model


def test_make_section_examples():
    assert make_section((-1, 1, 1)).splits(WeightMatrix((-1, 1, 1)))
    assert make_section((2, 3, -6)).coeffs == (-1, 1, 0)
    with pytest.raises(ValueError, match="weights not strictly coprime"):
        make_section((2, 4, -6))


def test_weight_matrix_predicates():
    w = WeightMatrix((6, 10, -15))
    assert w.is_coprime() and not w.is_pairwise_coprime() and w.is_hyperbolic()
    assert not WeightMatrix((1, 1, 1)).is_hyperbolic()


@pytest.mark.parametrize("weights", [(2, 3, -6), (-1, 1, 1), (6, 10, -15), (-7, 3, 5), (1, -2, -3)])
def test_projection_kills_weights_and_is_surjective(weights):
    p = cokernel_projection(weights)
    assert p @ list(weights) == (0, 0)
    # surjective onto Z^2: the 2x2 minors have gcd 1
    minors = [p[0, i] * p[1, j] - p[0, j] * p[1, i] for i in range(3) for j in range(i + 1, 3)]
    g = 0
    for m in minors:
        g = gcd(g, m)
    assert g == 1


def test_downgrade_cusp_weights():
    res = downgrade((2, 3, -6))
    assert res.fan.rays == ((1, 1), (0, 1), (-1, 0))
    assert str(res.divisor) == "{-1/3}*D1 + [0,1/6]*E + {1/2}*D2"
    assert fan_isomorphic(res.fan, blowup_model(1).fan) is not None
    assert matches_on(frame_model(), res.divisor, cusp_divisor()) is not None


def test_downgrade_minus_one_one_one():
    res = downgrade((-1, 1, 1))
    assert res.fan == blowup_model(1).fan
    found = matches_on(frame_model(), res.divisor, minus_e())
    assert found is not None


def test_downgrade_not_hyperbolic():
    with pytest.raises(ValueError, match="action not hyperbolic"):
        downgrade((1, 1, 1))


def test_downgrade_section_independence():
    a = downgrade((2, 3, -6), (-1, 1, 0)).divisor
    b = downgrade((2, 3, -6), (2, -1, 0)).divisor
    assert equivalent(a, b) is not None


def test_downgrade_bad_section():
    with pytest.raises(ValueError):
        downgrade((2, 3, -6), (1, 1, 1))


def test_single_interval_on_interior_ray():
    for weights in [(-6, 2, 3), (-5, 2, 7), (-1, 1, 1), (-12, 5, 7)]:
        res = downgrade(weights)
        intervals = [n for n, s in res.divisor.terms if not s.is_point]
        assert intervals == ["E"]
        interior = res.fan.interior_rays()
        assert len(interior) == 1 and res.model.name_of_ray(interior[0]) == "E"


def test_proposition_formula_examples():
    d = proposition_formula(-1, 1, 1, (0, 1, 0))
    assert d == SegmentalDivisor.of(proposition_model(), {"D2": 1, "E": Segment(0, 1)})
    target = SegmentalDivisor.of(proposition_model(), {"E": Segment(-1, 0)})
    assert normal_form(d) == target
    d = proposition_formula(-6, 2, 3, (0, -1, 1))
    assert d == SegmentalDivisor.of(proposition_model(),
                                    {"D2": F(-1, 3), "D3": F(1, 2), "E": Segment(0, F(1, 6))})
    with pytest.raises(ValueError):
        proposition_formula(-6, 2, 3, (1, 1, 1))
    with pytest.raises(ValueError):
        proposition_formula(6, 2, 3)


def test_proposition_matches_cusp_divisor_termwise():
    prop = proposition_formula(-6, 2, 3, (0, -1, 1))
    geo = downgrade((-6, 2, 3), (0, -1, 1))
    assert matches_on(prop.model, geo.divisor, prop) is not None


def test_crosscheck_examples():
    assert crosscheck((-1, 1, 1))
    assert crosscheck((-6, 2, 3))
    assert crosscheck((2, 3, -6))


def test_crosscheck_fails_off_the_blowup_fan():
    # the downgraded fan is a weighted blow-up here, not the blow-up of the origin
    assert not crosscheck((-1, 1, 2))
    assert fan_isomorphic(downgrade((-1, 1, 2)).fan, blowup_model(1).fan) is None


def _formula_applies(a1, a2, a3):
    return -a1 * gcd(a2, a3) == a2 * gcd(a1, a3) == a3 * gcd(a1, a2)


def test_crosscheck_agreement_set_is_characterized():
    agree, total = 0, 0
    for b in range(1, 13):
        for a2 in range(1, 13):
            for a3 in range(a2, 13):
                if gcd(gcd(b, a2), a3) != 1:
                    continue
                total += 1
                ok = crosscheck((-b, a2, a3))
                fan_ok = fan_isomorphic(downgrade((-b, a2, a3)).fan, blowup_model(1).fan) is not None
                assert ok == fan_ok == _formula_applies(-b, a2, a3)
                agree += ok
    assert (agree, total) == (32, 769)
