import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from cmtorus.galois_cm import DatumError, make_quadratic_datum, preset
from cmtorus.weil_numbers import (
    CyclotomicElement, WeilError, alpha_construction, character_span_check,
    evaluate_character, gaussian, is_weil_number, quadratic, slopes, unit_index,
)

F = Fraction


def test_gaussian_certificates():
    c = is_weil_number(gaussian(1, 2), 5)
    assert c.accepted and c.weight == 1 and c.norm == 5
    c = is_weil_number(gaussian(-7, 24), 625)
    assert c.accepted and c.weight == 1
    assert is_weil_number(gaussian(-7, 24), 5).weight == 4


def test_rejection_carries_witness():
    r = is_weil_number(gaussian(1, 1), 5)
    assert not r.accepted and r.witness == 2


def test_zero_is_not_weil():
    with pytest.raises(WeilError):
        is_weil_number(gaussian(0, 0), 5)
    with pytest.raises(WeilError):
        is_weil_number(gaussian(1, 2), 6)


def test_rational_weil_numbers():
    c = is_weil_number(gaussian(5), 5)
    assert c.weight == 2
    # negative weights are allowed
    assert is_weil_number(gaussian(F(1, 5)), 5).weight == -2


def test_quadratic_arithmetic():
    a = quadratic(-5, 2, 1)
    assert a.norm() == 9
    assert str(a) == "2+sqrt(-5)"
    assert a * a.inverse() == quadratic(-5, 1)
    assert (gaussian(2, 1) ** 4) == gaussian(-7, 24)
    assert str(gaussian(-7, 24)) == "-7+24i"
    assert gaussian(2, 1) ** -1 * gaussian(2, 1) == gaussian(1)


def test_half_integral_elements():
    w = quadratic(-3, F(1, 2), F(1, 2))
    assert w.is_integral() and w.norm() == 1
    assert not quadratic(-1, F(1, 2), F(1, 2)).is_integral()


def test_cyclotomic_predicate():
    # sqrt(-2) = z + z^3 in Q(zeta8); 1 + sqrt(-2) has absolute value sqrt(3) everywhere
    pi = CyclotomicElement(8, (1, 1, 0, 1))
    c = is_weil_number(pi, 3)
    assert c.accepted and c.weight == 1
    assert not is_weil_number(CyclotomicElement(8, (1, 1)), 2).accepted
    z = CyclotomicElement.zeta(5)
    assert (z * z.conj()).is_rational()


@given(st.integers(-30, 30), st.integers(-30, 30), st.integers(1, 4))
def test_powers_keep_weight(x, y, k):
    pi = gaussian(x, y)
    if pi.is_zero():
        return
    for q in (2, 5, 13):
        c = is_weil_number(pi, q)
        ck = is_weil_number(pi ** k, q ** k)
        assert c.accepted == ck.accepted
        if c.accepted:
            assert ck.weight == c.weight


def test_slope_examples():
    d5 = preset("Q(i)", 5)
    # 2+i generates the first place above 5; 1+2i = i(2-i) generates its conjugate
    assert slopes(gaussian(2, 1), d5, 5).slopes == (1, 0)
    rep = slopes(gaussian(1, 2), d5, 5)
    assert rep.slopes == (0, 1) and rep.ordinary and rep.in_weil_lattice
    d3 = preset("Q(i)", 3)
    inert = slopes(gaussian(3), d3, 9)
    assert inert.slopes == (F(1, 2),) and inert.f == (1,)
    assert slopes(gaussian(5), d5, 5).slopes == (1, 1)


def test_slopes_at_ramified_prime():
    d = make_quadratic_datum(-5, p=5)
    rep = slopes(quadratic(-5, 0, 1), d, 5)
    assert rep.slopes == (F(1, 2),) and rep.f == (1,)


def test_slopes_errors():
    with pytest.raises(WeilError):
        slopes(gaussian(1, 1), preset("Q(i)", 5), 5)
    with pytest.raises(WeilError):
        slopes(gaussian(1, 2), preset("Q(i)", 5), 25 * 3)
    with pytest.raises((WeilError, DatumError)):
        slopes(gaussian(1, 2), preset("Q(zeta5)", 5), 5)


@given(st.integers(0, 6), st.integers(0, 6), st.integers(0, 3))
def test_split_slopes_from_factorization(a, b, unit):
    # pi = i^unit (2+i)^a (2-i)^b; with q = 5^gcd(a, b) its slopes are integral
    n = math.gcd(a, b)
    if n == 0:
        return
    pi = gaussian(0, 1) ** unit * gaussian(2, 1) ** a * gaussian(2, -1) ** b
    rep = slopes(pi, preset("Q(i)", 5), 5 ** n)
    assert rep.slopes == (F(a, n), F(b, n))
    assert sum(rep.slopes) == rep.cert.weight == (a + b) // n


def test_non_integral_slopes_are_not_in_the_lattice():
    with pytest.raises(WeilError):
        slopes(gaussian(5), preset("Q(i)", 5), 25)


def test_unit_index():
    assert unit_index(-1) == 2 and unit_index(-3) == 3 and unit_index(-5) == 1


def test_alpha_gaussian_five():
    ad = alpha_construction(preset("Q(i)", 5))
    assert ad.a == gaussian(2, 1) and ad.h == 1 and ad.n == 2
    assert ad.alpha == gaussian(-7, 24) and ad.q == 625
    assert ad.cert.weight == 1


def test_alpha_sqrt_minus_five():
    ad = alpha_construction(preset("Q(sqrt-5)", 3))
    assert ad.h == 2 and ad.n == 1 and ad.a.norm() == 9
    # no element of norm 3, so the prime above 3 is not principal
    assert not any(x * x + 5 * y * y == 3 for x in range(2) for y in range(2))
    # a is not divisible by 3, so (a) is the square of one prime above 3
    assert not (ad.a / 3).is_integral()
    assert ad.alpha == ad.a ** 2 and ad.q == 81


def test_alpha_gaussian_thirteen():
    ad = alpha_construction(preset("Q(i)", 13))
    assert ad.a == gaussian(3, 2) and ad.alpha == gaussian(3, 2) ** 4


def test_alpha_needs_split_prime():
    with pytest.raises(DatumError):
        alpha_construction(preset("Q(i)", 3))


def test_evaluate_character_examples():
    ad = alpha_construction(preset("Q(i)", 5))
    cv = evaluate_character((1, 0, 1), ad)
    assert cv.value == gaussian(-7, 24) and cv.cert.weight == 1
    assert cv.slopes.slopes == (1, 0) and cv.matches_rho
    w = evaluate_character((1, 1, 2), ad)
    assert w.value == gaussian(625) and w.cert.weight == 2
    z = evaluate_character((0, 0, 0), ad)
    assert z.value == gaussian(1) and z.cert.weight == 0
    with pytest.raises(WeilError):
        evaluate_character((1, 0, 2), ad)


@pytest.mark.parametrize("d,p", [(-1, 5), (-1, 13), (-5, 3), (-5, 7), (-3, 7), (-23, 2),
                                 (-7, 2), (-47, 3), (-15, 2)])
def test_character_span(d, p):
    checks = character_span_check(make_quadratic_datum(d, p=p))
    assert all(checks.values()), checks
