import random
from fractions import Fraction

import pytest

from cmtorus.exact_lattice import AbGroupStructure
from cmtorus.galois_cm import INF, cyclotomic_tower, identity_tower, preset
from cmtorus.brauer_adelic import (
    BrauerElement, BrauerError, ProbeSetError, adelic_sum, corestriction, h1_model,
    h2_arises_globally, hasse_cokernel_P, random_brauer_element, restriction, standard_fields,
    torus_h2_sequence, transition_vanishing,
)
from cmtorus.galois_cm import all_presets
from cmtorus.tate_cohomology import trivial_lattice

F = Fraction


def fields(name, p):
    return standard_fields(preset(name, p))


def test_reciprocity_is_enforced():
    Q = fields("Q(i)", 5)["Q"]
    with pytest.raises(BrauerError):
        BrauerElement(Q, {(5, 0): F(1, 2)})
    with pytest.raises(BrauerError):
        BrauerElement(Q, {(INF, 0): F(1, 3), (5, 0): F(2, 3)})


def test_complex_places_carry_zero():
    K = fields("Q(i)", 5)["K"]
    with pytest.raises(BrauerError):
        BrauerElement(K, {(INF, 0): F(1, 2), (5, 0): F(1, 2)})


def test_restriction_to_gaussian_field():
    fs = fields("Q(i)", 5)
    x = BrauerElement(fs["Q"], {(5, 0): F(1, 2), (3, 0): F(-1, 2)})
    y = restriction(x, fs["K"])
    assert y.invariants == {(5, 0): F(1, 2), (5, 1): F(1, 2)}


def test_restriction_zero_and_degree_one():
    fs = fields("Q(zeta13)", 3)
    zero = BrauerElement(fs["Q"], {})
    assert restriction(zero, fs["K"]).is_zero()
    x = BrauerElement(fs["K"], {(3, 0): F(1, 3), (3, 1): F(2, 3)})
    assert restriction(x, fs["K"]).invariants == x.invariants


def test_corestriction_examples():
    fs = fields("Q(i)", 5)
    # 13 splits in Q(i)
    x = BrauerElement(fs["K"], {(13, 0): F(1, 3), (13, 1): F(-1, 3)})
    assert corestriction(x, fs["Q"]).is_zero()
    inert = BrauerElement(fs["K"], {(3, 0): F(1, 2), (5, 0): F(1, 2)})
    assert corestriction(inert, fs["Q"]).invariants == {(3, 0): F(1, 2), (5, 0): F(1, 2)}
    assert corestriction(BrauerElement(fs["K"], {}), fs["Q"]).is_zero()


def test_restriction_needs_larger_field():
    fs = fields("Q(i)", 5)
    with pytest.raises(BrauerError):
        restriction(BrauerElement(fs["K"], {}), fs["Q"])


@pytest.mark.parametrize("name,p", [("Q(zeta15)", 19), ("Q(zeta20)", 3), ("Q(zeta13)", 3),
                                    ("Q(sqrt-5)", 3)])
def test_cor_res_is_multiplication_by_degree(name, p):
    rng = random.Random(7)
    fs = fields(name, p)
    pairs = [(a, b) for a in fs.values() for b in fs.values() if b.contains(a) and a != b]
    for _ in range(30):
        small, big = rng.choice(pairs)
        x = random_brauer_element(small, rng)
        back = corestriction(restriction(x, big), small)
        assert back == x.scale(big.degree // small.degree)


def test_hasse_cokernel_table():
    assert hasse_cokernel_P(preset("Q(zeta15)", 19)).structure == AbGroupStructure.cyclic(2)
    assert hasse_cokernel_P(preset("Q(zeta13)", 3)).structure.is_trivial()
    assert hasse_cokernel_P(preset("Q(i)", 5)).structure.is_trivial()


@pytest.mark.parametrize("datum", all_presets(), ids=lambda d: f"{d.label}-p{d.p}")
def test_hasse_cokernel_cross_check(datum):
    h = hasse_cokernel_P(datum)
    assert h.cross_check
    expected = 2 if datum.local_degree % 2 == 0 and not datum.iota_in_D() else 1
    assert h.structure.order == expected


@pytest.mark.parametrize("datum", all_presets(), ids=lambda d: f"{d.label}-p{d.p}")
def test_serre_torus_global_to_adelic_bijective(datum):
    rep = torus_h2_sequence(datum, "S")
    assert rep.injective and rep.bijective


def test_weil_torus_gaussian_split_prime():
    m = h1_model(preset("Q(i)", 5), "P")
    assert m.global_kernel.structure.is_trivial()
    assert m.adelic_kernel.structure.is_trivial()


def test_h1_model_rejects_unknown_probe():
    with pytest.raises(ProbeSetError):
        h1_model(preset("Q(i)", 5), "P", [5, 97, INF])
    with pytest.raises(BrauerError):
        h1_model(preset("Q(i)", 5), "X")


def test_h2_arises_globally_for_restricted_pairs():
    d = preset("Q(i)", 5)
    fs = standard_fields(d)
    probe = d.primes() + [INF]
    rng = random.Random(3)
    for _ in range(10):
        x = random_brauer_element(fs["Q"], rng)
        assert h2_arises_globally(d, "S", restriction(x, fs["K"]), x, probe)
    # a class on K that is not a restriction from Q: different invariants at the two places over 5
    y = BrauerElement(fs["K"], {(5, 0): F(1, 3), (5, 1): F(-1, 3)})
    assert not h2_arises_globally(d, "S", y, BrauerElement(fs["Q"], {}), probe)


@pytest.mark.parametrize("n,m,p", [(5, 15, 11), (5, 15, 41), (5, 20, 11), (5, 15, 71)])
def test_even_degree_transitions_vanish(n, m, p):
    t = transition_vanishing(cyclotomic_tower(n, m, p))
    assert t.local_degree % 2 == 0
    assert t.vanishes and t.matches_rule


@pytest.mark.parametrize("n,m,p", [(5, 15, 31), (5, 15, 61), (5, 20, 41)])
def test_odd_degree_transitions_do_not_vanish(n, m, p):
    t = transition_vanishing(cyclotomic_tower(n, m, p))
    assert t.local_degree % 2 == 1
    assert not t.vanishes and t.image_order == t.target_order > 1


def test_identity_transition_on_nontrivial_model():
    d = preset("Q(zeta15)", 19)
    assert not h1_model(d, "P").global_kernel.structure.is_trivial()
    assert not transition_vanishing(identity_tower(d)).vanishes


def test_adelic_sum_multiplicative_group():
    d = preset("Q(i)", 5)
    gm = trivial_lattice(d.group)
    s = adelic_sum(d, gm, 2, [3, 5, INF], strict=False)
    assert s.summands[3] == AbGroupStructure.cyclic(2)
    assert s.summands[5].is_trivial()
    assert s.summands[INF] == AbGroupStructure.cyclic(2)
    assert s.structure == AbGroupStructure(0, (2, 2))
    assert 2 in s.omitted_nonzero
    with pytest.raises(ProbeSetError):
        adelic_sum(d, gm, 2, [3, 5, INF])
    assert adelic_sum(d, gm, 2, []).structure.is_trivial()
    assert adelic_sum(d, gm, 1, d.primes() + [INF]).structure.is_trivial()
