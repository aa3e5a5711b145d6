import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st
from sympy import Matrix
from sympy.polys.domains import ZZ
from sympy.polys.matrices import DM
from sympy.polys.matrices.normalforms import invariant_factors as sympy_invariant_factors

from cmtorus.exact_lattice import (
    AbGroupStructure, DimensionError, IntMatrix, cokernel_structure, hermite_column_basis,
    homology_at, invariant_factors, is_exact_at, kernel_basis, presented_homology, qz_kernel,
    qz_solvable, rank, smith_normal_form, solve_integer, structure_from_kill_counts, subquotient,
)


def matrices(max_dim=6, bound=50):
    return st.integers(1, max_dim).flatmap(lambda m: st.integers(1, max_dim).flatmap(
        lambda n: st.lists(st.lists(st.integers(-bound, bound), min_size=n, max_size=n),
                           min_size=m, max_size=m)))


def oracle_factors(rows):
    return [abs(int(x)) for x in sympy_invariant_factors(DM(rows, ZZ)) if x]


def is_smith_form(D):
    d = D.diagonal()
    off = all(D[i, j] == 0 for i in range(D.rows) for j in range(D.cols) if i != j)
    nz = [x for x in d if x]
    chain = all(b % a == 0 for a, b in zip(nz, nz[1:]))
    zeros_last = d == nz + [0] * (len(d) - len(nz))
    return off and chain and zeros_last and all(x >= 0 for x in d)


def test_snf_identity():
    U, D, V = smith_normal_form(IntMatrix.identity(3))
    assert D == IntMatrix.identity(3)


def test_snf_small_examples():
    assert smith_normal_form(IntMatrix([[2, 0], [0, 3]]))[1] == IntMatrix.diag([1, 6])
    assert smith_normal_form(IntMatrix([[2, 4], [4, 8]]))[1] == IntMatrix.diag([2, 0])


def test_snf_empty_matrix():
    U, D, V = smith_normal_form(IntMatrix.zeros(0, 3))
    assert D.shape == (0, 3) and V.shape == (3, 3)


@given(matrices())
def test_snf_decomposition(rows):
    M = IntMatrix(rows)
    U, D, V = smith_normal_form(M)
    assert U @ M @ V == D
    assert abs(U.det()) == 1 and abs(V.det()) == 1
    assert is_smith_form(D)


@given(matrices(max_dim=5, bound=200))
def test_invariant_factors_match_sympy(rows):
    assert invariant_factors(IntMatrix(rows)) == oracle_factors(rows)


@given(matrices())
def test_rank_matches_rational_rank(rows):
    assert rank(IntMatrix(rows)) == Matrix(rows).rank()


def test_cokernel_examples():
    assert cokernel_structure(IntMatrix.zeros(2, 2)) == AbGroupStructure(2)
    assert cokernel_structure(IntMatrix.diag([2, 3])) == AbGroupStructure(0, (6,))
    assert cokernel_structure(IntMatrix([[2, 4], [4, 8]])) == AbGroupStructure(1, (2,))
    assert str(cokernel_structure(IntMatrix([[2, 4], [4, 8]]))) == "Z/2 + Z"


def test_group_structure_canonical_form():
    assert AbGroupStructure.from_invariants([2, 3]) == AbGroupStructure(0, (6,))
    assert AbGroupStructure.from_invariants([4, 6, 1, 0]) == AbGroupStructure(1, (2, 12))
    assert AbGroupStructure.cyclic(1).is_trivial()
    with pytest.raises(ValueError):
        AbGroupStructure(0, (3, 2))


def test_kernel_examples():
    assert kernel_basis(IntMatrix.identity(3)).cols == 0
    K = kernel_basis(IntMatrix([[1, 1]]))
    assert K.cols == 1 and K.column(0) in ((1, -1), (-1, 1))


@given(matrices())
def test_kernel_basis_is_saturated_kernel(rows):
    M = IntMatrix(rows)
    K = kernel_basis(M)
    assert (M @ K).is_zero()
    assert K.cols == M.cols - rank(M)
    # saturation: Z^n / ker is torsion free
    assert not cokernel_structure(K).torsion


def test_exactness_examples():
    one = IntMatrix([[1]])
    assert is_exact_at(one, IntMatrix.zeros(0, 1))
    assert not is_exact_at(IntMatrix([[2]]), IntMatrix([[0]]))
    assert homology_at(IntMatrix([[2]]), IntMatrix([[0]])) == AbGroupStructure.cyclic(2)


def test_exactness_dimension_mismatch():
    with pytest.raises(DimensionError):
        is_exact_at(IntMatrix.identity(2), IntMatrix.identity(3))


def test_exactness_on_built_sequences(rng):
    from conftest import random_unimodular
    for _ in range(40):
        k = rng.randint(2, 6)
        r = rng.randint(0, k)
        P = random_unimodular(rng, k)
        d = [rng.choice([1, 1, 2]) for _ in range(r)]
        f = P @ IntMatrix.diag(d, k, r)
        Pinv = solve_integer(P, IntMatrix.identity(k))
        g = IntMatrix([[int(i == j - r) for j in range(k)] for i in range(k - r)], k - r, k) @ Pinv
        assert is_exact_at(f, g) == all(x == 1 for x in d)
        assert homology_at(f, g).order == max(1, math.prod(d))


def test_hermite_basis_spans_same_lattice():
    M = IntMatrix([[2, 4, 6], [0, 0, 0], [1, 2, 5]])
    H = hermite_column_basis(M)
    assert H.cols == rank(M)
    assert solve_integer(H, M) is not None and solve_integer(M, H) is not None


def test_subquotient_coordinates():
    N = IntMatrix.identity(2)
    S = IntMatrix.diag([2, 3])
    q = subquotient(N, S)
    assert q.structure == AbGroupStructure.cyclic(6)
    assert q.order_of((1, 1)) == 6
    assert q.is_zero((2, 3))


def test_presented_homology_with_relations():
    # Z/4 --x2--> Z/4 --x2--> Z/4 is exact in the middle
    rel = IntMatrix([[4]])
    two = IntMatrix([[2]])
    assert presented_homology(two, two, rel, rel).structure.is_trivial()
    # Z/4 --0--> Z/4 --x2--> Z/4: kernel of x2 is Z/2
    assert presented_homology(IntMatrix([[0]]), two, rel, rel).structure == AbGroupStructure.cyclic(2)


def test_qz_kernel():
    # {x in Q/Z : 2x = 0, 3x = 0} = 0 ; {x : 2x = 0} = Z/2 ; {(x, y): x + y = 0} is divisible
    assert qz_kernel(IntMatrix([[2], [3]])).structure.is_trivial()
    assert qz_kernel(IntMatrix([[2]])).structure == AbGroupStructure.cyclic(2)
    k = qz_kernel(IntMatrix([[1, 1]]))
    assert k.divisible_rank == 1 and not k.is_finite
    assert qz_solvable(IntMatrix([[2]]), [Fraction(1, 2)])
    assert qz_solvable(IntMatrix([[2], [4]]), [Fraction(1, 2), Fraction(0)])
    assert not qz_solvable(IntMatrix([[2], [4]]), [Fraction(1, 2), Fraction(1, 2)])


@given(st.lists(st.lists(st.integers(-6, 6), min_size=2, max_size=2), min_size=1, max_size=3))
def test_qz_kernel_elements_are_solutions(rows):
    M = IntMatrix(rows)
    k = qz_kernel(M)
    if not k.is_finite or k.order > 200:
        return
    elts = k.elements()
    assert len(set(elts)) == k.order
    for x in elts:
        assert all(sum(a * b for a, b in zip(r, x)) % 1 == 0 for r in rows)


def test_structure_from_kill_counts():
    # Z/2 + Z/2: three elements of order 2, all killed by 2
    assert structure_from_kill_counts({1: 1, 2: 4, 4: 4}, 4) == AbGroupStructure(0, (2, 2))
    assert structure_from_kill_counts({1: 1, 2: 2, 4: 4}, 4) == AbGroupStructure.cyclic(4)
