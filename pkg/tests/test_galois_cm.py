import json

import pytest
from sympy import Poly, cyclotomic_poly, symbols

from cmtorus.galois_cm import (
    INF, PRESETS, CMDatum, DatumError, all_presets, cyclotomic_tower, identity_tower,
    make_cyclotomic_datum, make_quadratic_datum, places, preset, transition,
)

x = symbols("x")


def labels_of(datum, elems):
    return sorted(datum.group.labels[s] for s in elems)


def factor_count_mod(n, ell):
    """Number of irreducible factors of Phi_n mod ell (ell unramified)."""
    return len(Poly(cyclotomic_poly(n, x), x, modulus=ell).factor_list()[1])


def test_cyclotomic_decomposition_examples():
    d = make_cyclotomic_datum(4, p=5)
    assert labels_of(d, d.decomposition(5)) == [1]
    assert len(places(d, 5).X) == 2
    d13 = make_cyclotomic_datum(13, p=3)
    assert labels_of(d13, d13.D_p) == [1, 3, 9]
    assert d13.local(3).f == 3 and d13.local(3).e == 1
    assert not d13.iota_in_D()
    d15 = make_cyclotomic_datum(15, p=19)
    assert labels_of(d15, d15.D_p) == [1, 4]
    assert d15.local_degree == 2 and not d15.iota_in_D()


def test_quadratic_splitting_types():
    d = make_quadratic_datum(-1, p=5)
    assert len(d.decomposition(5)) == 1
    assert len(d.decomposition(3)) == 2 and d.local(3).f == 2
    r = make_quadratic_datum(-5, p=5)
    assert r.local(5).e == 2


def test_place_counts():
    d = preset("Q(i)", 5)
    ps = places(d)
    assert (len(ps.X), len(ps.Y), ps.iota_in_D) == (2, 1, False)
    ps3 = places(preset("Q(i)", 3))
    assert (len(ps3.X), len(ps3.Y), ps3.iota_in_D) == (1, 1, True)
    ps13 = places(preset("Q(zeta13)", 3))
    assert (len(ps13.X), len(ps13.Y), ps13.iota_in_D) == (4, 2, False)


@pytest.mark.parametrize("n", [5, 7, 8, 12, 13, 15, 20, 21])
def test_place_counts_match_factorization(n):
    d = make_cyclotomic_datum(n)
    for ell in d.primes():
        if n % ell == 0:
            continue
        assert len(places(d, ell).X) == factor_count_mod(n, ell)


def test_decomposition_orbits_brute_force():
    # D_ell for unramified ell is generated by Frobenius = ell mod n
    for n in (5, 8, 13, 15, 20, 24):
        d = make_cyclotomic_datum(n)
        for ell in d.primes():
            if n % ell == 0:
                continue
            orbit = set()
            a = 1
            while a not in orbit:
                orbit.add(a)
                a = a * ell % n
            assert set(labels_of(d, d.decomposition(ell))) == orbit


def test_ramified_primes_in_cyclotomic_fields():
    d = make_cyclotomic_datum(20)
    assert d.local(5).e == 4 and d.local(2).e == 2
    # |D| = e * f always
    for ell in d.primes():
        ld = d.local(ell)
        assert len(ld.decomposition) == ld.e * ld.f


def test_infinite_place():
    d = preset("Q(zeta5)", 19)
    assert d.iota_in_D(INF)
    assert len(places(d, INF).Y) == 2


def test_invalid_inputs():
    with pytest.raises(DatumError):
        make_cyclotomic_datum(2)
    with pytest.raises(DatumError):
        make_cyclotomic_datum(6)
    with pytest.raises(DatumError):
        make_quadratic_datum(3)
    with pytest.raises(DatumError):
        make_quadratic_datum(-4)
    with pytest.raises(DatumError):
        preset("Q(zeta7)", 3)


def test_tower_local_degrees():
    t = cyclotomic_tower(4, 20, 3)
    assert t.local_degree_at_p == 2
    assert identity_tower(preset("Q(zeta13)", 3)).local_degree_at_p == 1
    t = cyclotomic_tower(5, 15, 19)
    ls, ll = t.small.local(19), t.large.local(19)
    assert t.local_degree_at_p == (ll.e * ll.f) // (ls.e * ls.f)


def test_tower_rejects_bad_surjection():
    s = make_cyclotomic_datum(5, p=19)
    big = make_cyclotomic_datum(15, p=19)
    with pytest.raises(DatumError):
        transition(s, big, [0] * big.group.order)
    with pytest.raises(DatumError):
        cyclotomic_tower(5, 13, 3)


def test_json_round_trip():
    for d in all_presets():
        back = CMDatum.from_json(json.loads(d.dumps()))
        assert back.dumps() == d.dumps()
        assert back.local_degree == d.local_degree


def test_presets_cover_all_names():
    assert len(all_presets()) == 3 * len(PRESETS)
