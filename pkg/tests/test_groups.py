import pytest

from cmtorus.groups import (
    FiniteGroup, GroupError, cyclic_group, dihedral_group, direct_product, quaternion_group,
    small_groups, symmetric_group, units_mod,
)


def test_rejects_non_group_tables():
    with pytest.raises(GroupError):
        FiniteGroup([[0, 1], [0, 1]])
    with pytest.raises(GroupError):
        FiniteGroup([])


def test_units_mod_structure():
    g = units_mod(15)
    assert g.order == 8 and g.is_abelian()
    assert not g.is_cyclic()
    assert units_mod(13).is_cyclic()
    assert sorted(g.element_order(x) for x in g.elements()) == [1, 2, 2, 2, 4, 4, 4, 4]


def test_small_groups_are_groups():
    for name, g in small_groups(12):
        # revalidate the table from scratch
        FiniteGroup(g.table)
        for x in g.elements():
            assert g.mul(x, g.inv(x)) == g.identity
            assert g.power(x, g.element_order(x)) == g.identity


def test_nonabelian_examples():
    assert not symmetric_group(3).is_abelian()
    assert not dihedral_group(4).is_abelian()
    q = quaternion_group()
    assert q.order == 8 and not q.is_abelian()
    central = [x for x in q.elements() if q.is_central(x)]
    assert len(central) == 2


def test_cosets_partition_the_group():
    g = direct_product(cyclic_group(2), cyclic_group(4))
    h = g.closure([1])
    cosets = g.left_cosets(h)
    assert sum(len(c) for c in cosets) == g.order
    assert len(cosets) == g.order // len(h)
    dc = g.double_cosets(h, g.closure([2]))
    assert sum(len(c) for c in dc) == g.order


def test_homomorphism_check():
    c4, c2 = cyclic_group(4), cyclic_group(2)
    assert c4.is_homomorphism(c2, [x % 2 for x in range(4)])
    assert not c4.is_homomorphism(c2, [0, 1, 1, 0])
