"""Tate cohomology of finite groups with coefficients in lattices and finite modules.

Modules are *presented*: M = Z^k / im(R) with G acting through integer
matrices A_g that preserve im(R).  A lattice has R empty; a finite module
Z/d_1 + ... + Z/d_k has R = diag(d_i).

Three free Z[G]-resolutions are available and interchangeable:

``"cyclic"``
    the 2-periodic resolution (s - 1, N, s - 1, ...) of a cyclic group;
``"bar"``
    the normalized bar resolution (small groups only, its ranks grow as
    (|G|-1)^i);
``"resolution"``
    a free resolution computed degree by degree from integer kernels.

For r >= 1 the answer is H^r of Hom_G(F, M).  In degrees 0 and -1 the
``bar`` and ``resolution`` methods use M^G / N M and ker N / I_G M, and in
degree -2 they use H_1(G, M) from F tensor M.  The ``cyclic`` method instead
reads every degree off H^1 or H^2 through 2-periodicity, so comparing
methods compares two different routes.
"""

from __future__ import annotations

import logging
import os
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product
from math import gcd
from typing import Sequence

from .exact_lattice import (AbGroupStructure, IntMatrix, Subquotient, cokernel_structure,
                            kernel_basis, presented_homology, solve_integer,
                            structure_from_kill_counts)
from .groups import FiniteGroup, cyclic_group, direct_product

log = logging.getLogger(__name__)

DEFAULT_MAX_GROUP_ORDER = 64
BAR_BUDGET = 900  # largest cochain rank the bar method will build


class CohomologyError(ValueError):
    pass


def max_group_order() -> int:
    return int(os.environ.get("CMTORUS_MAX_GROUP_ORDER", DEFAULT_MAX_GROUP_ORDER))


def generating_set(G: FiniteGroup) -> list[int]:
    gens: list[int] = []
    span = G.closure([])
    for g in G.elements():
        if g not in span:
            gens.append(g)
            span = G.closure(gens)
    return gens


# modules

class GModule:
    """Presented G-module Z^k / im(relations) with action matrices per element."""

    def __init__(self, group: FiniteGroup, actions: Sequence[IntMatrix],
                 relations: IntMatrix | None = None, check: bool = True):
        self.group = group
        self.actions = tuple(actions)
        if len(self.actions) != group.order:
            raise CohomologyError("need one action matrix per group element")
        self.rank = self.actions[0].rows
        self.relations = IntMatrix.zeros(self.rank, 0) if relations is None else relations
        if check:
            self._check()

    def _in_relations(self, M: IntMatrix) -> bool:
        if M.is_zero():
            return True
        if self.relations.cols == 0:
            return False
        return solve_integer(self.relations, M) is not None

    def _check(self):
        G, k = self.group, self.rank
        if any(a.shape != (k, k) for a in self.actions):
            raise CohomologyError("action matrices must be square of the module rank")
        if not self._in_relations(self.actions[G.identity] - IntMatrix.identity(k)):
            raise CohomologyError("identity does not act trivially")
        for s in generating_set(G):
            a = self.actions[s]
            if self.relations.cols and solve_integer(self.relations, a @ self.relations) is None:
                raise CohomologyError("action does not preserve the relations")
            for h in G.elements():
                if not self._in_relations(a @ self.actions[h] - self.actions[G.mul(s, h)]):
                    raise CohomologyError("action is not a homomorphism")

    def act(self, g: int) -> IntMatrix:
        return self.actions[g]

    @property
    def is_lattice(self) -> bool:
        return self.relations.cols == 0

    def norm_matrix(self, elems=None) -> IntMatrix:
        elems = self.group.elements() if elems is None else elems
        out = IntMatrix.zeros(self.rank, self.rank)
        for g in elems:
            out = out + self.actions[g]
        return out

    def structure(self) -> AbGroupStructure:
        return cokernel_structure(self.relations)

    def restrict(self, elems) -> "GModule":
        """Restriction to the subgroup on ``elems``."""
        H, emb = self.group.subgroup(elems)
        return GModule(H, [self.actions[g] for g in emb], self.relations, check=False)

    def dual(self) -> "GModule":
        """Hom(M, Z) with (g.phi)(m) = phi(g^-1 m); lattices only."""
        if not self.is_lattice:
            raise CohomologyError("dual is only defined for lattices")
        G = self.group
        return GModule(G, [self.actions[G.inv(g)].T for g in G.elements()], check=False)

    def __repr__(self) -> str:
        return f"GModule(order={self.group.order}, rank={self.rank}, relations={self.relations.cols})"


class GLattice(GModule):
    def __init__(self, group: FiniteGroup, actions: Sequence[IntMatrix], check: bool = True):
        super().__init__(group, actions, None, check)


class FiniteGModule(GModule):
    """Z/d_1 + ... + Z/d_k with action matrices read modulo the d_i."""

    def __init__(self, group: FiniteGroup, divisors: Sequence[int],
                 actions: Sequence[IntMatrix], check: bool = True):
        self.divisors = tuple(int(d) for d in divisors)
        if any(d < 1 for d in self.divisors):
            raise CohomologyError("finite modules need positive divisors")
        k = len(self.divisors)
        if check:
            for a in actions:
                for i in range(k):
                    for j in range(k):
                        if (a[i, j] * self.divisors[j]) % self.divisors[i]:
                            raise CohomologyError("action is not well defined modulo the divisors")
        super().__init__(group, actions, IntMatrix.diag(self.divisors), check)

    def order(self) -> int:
        out = 1
        for d in self.divisors:
            out *= d
        return out

    def elements(self) -> list[tuple[int, ...]]:
        return list(product(*(range(d) for d in self.divisors)))

    def reduce(self, v) -> tuple[int, ...]:
        return tuple(x % d for x, d in zip(v, self.divisors))

    def apply(self, g: int, v) -> tuple[int, ...]:
        return self.reduce(self.actions[g].apply(v))


def trivial_lattice(G: FiniteGroup, rank: int = 1) -> GLattice:
    return GLattice(G, [IntMatrix.identity(rank)] * G.order, check=False)


def character_lattice(G: FiniteGroup, signs: Sequence[int]) -> GLattice:
    """Z with g acting by signs[g] (must be a homomorphism to {+1, -1})."""
    return GLattice(G, [IntMatrix([[s]]) for s in signs])


def regular_lattice(G: FiniteGroup) -> GLattice:
    """Z[G] with left multiplication; basis e_h."""
    n = G.order
    acts = []
    for g in G.elements():
        m = [[0] * n for _ in range(n)]
        for h in G.elements():
            m[G.mul(g, h)][h] = 1
        acts.append(IntMatrix(m, n, n))
    return GLattice(G, acts, check=False)


def permutation_lattice(G: FiniteGroup, cosets: Sequence[frozenset]) -> GLattice:
    """Z[G/H] for a list of left cosets, g acting by left multiplication."""
    idx = {}
    for i, c in enumerate(cosets):
        for x in c:
            idx[x] = i
    k = len(cosets)
    acts = []
    for g in G.elements():
        m = [[0] * k for _ in range(k)]
        for i, c in enumerate(cosets):
            m[idx[G.mul(g, min(c))]][i] = 1
        acts.append(IntMatrix(m, k, k))
    return GLattice(G, acts, check=False)


def trivial_finite_module(G: FiniteGroup, divisors: Sequence[int]) -> FiniteGModule:
    k = len(divisors)
    return FiniteGModule(G, divisors, [IntMatrix.identity(k)] * G.order, check=False)


def scalar_finite_module(G: FiniteGroup, divisors: Sequence[int], signs: Sequence[int]) -> FiniteGModule:
    k = len(divisors)
    return FiniteGModule(G, divisors, [IntMatrix.identity(k).scale(s) for s in signs])


# Z[G]-matrices and resolutions

@dataclass(frozen=True)
class ZGMatrix:
    """Matrix over Z[G]: entries[(row, col)] = {g: coefficient}.

    Column j is the boundary of the j-th basis vector of the source, written
    as a Z[G]-combination of the target basis vectors.
    """
    rows: int
    cols: int
    entries: tuple  # ((row, col, ((g, c), ...)), ...)

    def items(self):
        for r, c, coeffs in self.entries:
            yield r, c, coeffs

    def z_matrix(self, G: FiniteGroup) -> IntMatrix:
        """The Z-linear map Z[G]^cols -> Z[G]^rows; coordinate (l, h) -> l*n + h."""
        n = G.order
        out = [[0] * (self.cols * n) for _ in range(self.rows * n)]
        for l, j, coeffs in self.entries:
            for h in G.elements():
                col = j * n + h
                for g, c in coeffs:
                    out[l * n + G.mul(h, g)][col] += c
        return IntMatrix(out, self.rows * n, self.cols * n)


def _zg_from_vectors(G: FiniteGroup, vectors: Sequence[Sequence[int]], rows: int) -> ZGMatrix:
    n = G.order
    ents = []
    for j, x in enumerate(vectors):
        for l in range(rows):
            coeffs = tuple((g, x[l * n + g]) for g in G.elements() if x[l * n + g])
            if coeffs:
                ents.append((l, j, coeffs))
    return ZGMatrix(rows, len(vectors), tuple(ents))


def _translate(G: FiniteGroup, x: Sequence[int], g: int, k: int) -> list[int]:
    n = G.order
    out = [0] * len(x)
    for l in range(k):
        for h in G.elements():
            out[l * n + G.mul(g, h)] = x[l * n + h]
    return out


def cyclic_resolution(G: FiniteGroup, length: int) -> list[ZGMatrix]:
    s = G.generator()
    if s is None:
        raise CohomologyError("group is not cyclic")
    if G.order == 1:
        # F_i = Z[G] = Z; complex Z <-0- Z <-1- Z <-0- ... is not exact, use zero ranks
        return [ZGMatrix(1, 0, ())] + [ZGMatrix(0, 0, ())] * (length - 1)
    e = G.identity
    diff = ZGMatrix(1, 1, ((0, 0, ((e, -1), (s, 1))),))
    norm = ZGMatrix(1, 1, ((0, 0, tuple((g, 1) for g in G.elements())),))
    return [diff if i % 2 == 0 else norm for i in range(length)]


def bar_resolution(G: FiniteGroup, length: int) -> list[ZGMatrix]:
    """Normalized bar resolution; entry i is the boundary F_{i+1} -> F_i."""
    nonid = [g for g in G.elements() if g != G.identity]
    bases = [list(product(nonid, repeat=i)) for i in range(length + 1)]
    if len(bases[-1]) > BAR_BUDGET:
        raise CohomologyError(f"bar resolution too large ({len(bases[-1])} generators)")
    out = []
    for i in range(1, length + 1):
        pos = {t: j for j, t in enumerate(bases[i - 1])}
        ents: dict[tuple[int, int], dict[int, int]] = {}

        def add(row_t, col, g, c):
            if G.identity in row_t:
                return
            d = ents.setdefault((pos[row_t], col), {})
            d[g] = d.get(g, 0) + c

        for j, t in enumerate(bases[i]):
            add(t[1:], j, t[0], 1)
            for k in range(i - 1):
                add(t[:k] + (G.mul(t[k], t[k + 1]),) + t[k + 2:], j, G.identity, (-1) ** (k + 1))
            add(t[:-1], j, G.identity, (-1) ** i)
        flat = tuple((r, c, tuple((g, v) for g, v in sorted(d.items()) if v))
                     for (r, c), d in sorted(ents.items()))
        out.append(ZGMatrix(len(bases[i - 1]), len(bases[i]),
                            tuple(e for e in flat if e[2])))
    return out


@lru_cache(maxsize=64)
def _computed_resolution(table: tuple, length: int) -> tuple[ZGMatrix, ...]:
    G = FiniteGroup(table, check=False)
    n = G.order
    out: list[ZGMatrix] = []
    prev = IntMatrix([[1] * n], 1, n)  # augmentation Z[G] -> Z
    k_prev = 1
    for _ in range(length):
        K = kernel_basis(prev)
        cands = sorted(K.columns(), key=lambda v: (sum(1 for x in v if x), sum(abs(x) for x in v)))
        chosen: list[list[int]] = []
        span_cols: list[tuple[int, ...]] = []
        span = IntMatrix.zeros(K.rows, 0)
        for v in cands:
            if span.cols and solve_integer(span, IntMatrix.from_columns([v], K.rows)) is not None:
                continue
            chosen.append(list(v))
            span_cols += [tuple(_translate(G, v, g, k_prev)) for g in G.elements()]
            span = IntMatrix.from_columns(span_cols, K.rows)
            if Subquotient(K, span).structure.is_trivial():
                break
        d = _zg_from_vectors(G, chosen, k_prev)
        out.append(d)
        prev = d.z_matrix(G)
        k_prev = len(chosen)
    return tuple(out)


def computed_resolution(G: FiniteGroup, length: int) -> list[ZGMatrix]:
    return list(_computed_resolution(G.table, length))


def resolution(G: FiniteGroup, method: str, length: int) -> list[ZGMatrix]:
    if method == "cyclic":
        return cyclic_resolution(G, length)
    if method == "bar":
        return bar_resolution(G, length)
    if method == "resolution":
        return computed_resolution(G, length)
    raise CohomologyError(f"unknown method {method!r}")


# cochains

def _block(M: GModule, entry, use_inverse: bool = False) -> IntMatrix:
    k = M.rank
    out = IntMatrix.zeros(k, k)
    for g, c in entry:
        a = M.actions[M.group.inv(g)] if use_inverse else M.actions[g]
        out = out + a.scale(c)
    return out


def _assemble(blocks: dict, nrows: int, ncols: int, k: int) -> IntMatrix:
    out = [[0] * (ncols * k) for _ in range(nrows * k)]
    for (i, j), b in blocks.items():
        for a in range(k):
            row = b.row(a)
            out[i * k + a][j * k:(j + 1) * k] = [x + y for x, y in zip(out[i * k + a][j * k:(j + 1) * k], row)]
    return IntMatrix(out, nrows * k, ncols * k)


def cochain_differential(M: GModule, d: ZGMatrix) -> IntMatrix:
    """Hom_G(F_i, M) -> Hom_G(F_{i+1}, M) for the boundary d: F_{i+1} -> F_i."""
    blocks = {(j, l): _block(M, coeffs) for l, j, coeffs in d.items()}
    return _assemble(blocks, d.cols, d.rows, M.rank)


def chain_differential(M: GModule, d: ZGMatrix) -> IntMatrix:
    """F_{i+1} (x)_G M -> F_i (x)_G M."""
    blocks = {(l, j): _block(M, coeffs, use_inverse=True) for l, j, coeffs in d.items()}
    return _assemble(blocks, d.rows, d.cols, M.rank)


def _rels(M: GModule, copies: int) -> IntMatrix:
    if copies == 0:
        return IntMatrix.zeros(0, 0)
    return IntMatrix.block_diag(*([M.relations] * copies))


def _check_order(G: FiniteGroup):
    if G.order > max_group_order():
        raise CohomologyError(
            f"group order {G.order} exceeds the cap {max_group_order()} (set CMTORUS_MAX_GROUP_ORDER)")


def group_cohomology(G: FiniteGroup, M: GModule, r: int, method: str = "resolution") -> Subquotient:
    """Ordinary H^r(G, M) for r >= 0 as a subquotient of the cochain group."""
    if r < 0:
        raise CohomologyError("ordinary cohomology needs r >= 0")
    _check_order(G)
    res = resolution(G, method, r + 1)
    ranks = [1] + [d.cols for d in res]
    d_out = cochain_differential(M, res[r])
    if r == 0:
        d_in = IntMatrix.zeros(M.rank, 0)
    else:
        d_in = cochain_differential(M, res[r - 1])
    return presented_homology(d_in, d_out, _rels(M, ranks[r]), _rels(M, ranks[r + 1]))


def group_homology_1(G: FiniteGroup, M: GModule, method: str = "resolution") -> Subquotient:
    res = resolution(G, method, 2)
    d1 = chain_differential(M, res[0])
    d2 = chain_differential(M, res[1])
    return presented_homology(d2, d1, _rels(M, res[0].cols), _rels(M, 1))


def tate_zero(G: FiniteGroup, M: GModule) -> Subquotient:
    """M^G / N M."""
    gens = generating_set(G) or [G.identity]
    k = M.rank
    d_out = IntMatrix.vstack(*[M.actions[g] - IntMatrix.identity(k) for g in gens])
    return presented_homology(M.norm_matrix(), d_out, M.relations, _rels(M, len(gens)))


def tate_minus_one(G: FiniteGroup, M: GModule) -> Subquotient:
    """ker N / I_G M."""
    gens = generating_set(G) or [G.identity]
    k = M.rank
    d_in = IntMatrix.hstack(*[M.actions[g] - IntMatrix.identity(k) for g in gens])
    return presented_homology(d_in, M.norm_matrix(), M.relations, M.relations)


def default_method(G: FiniteGroup) -> str:
    return "cyclic" if G.is_cyclic() else "resolution"


def tate_cohomology_group(G: FiniteGroup, M: GModule, r: int, method: str | None = None,
                          max_degree: int = 3) -> Subquotient:
    if not (-2 <= r <= max_degree):
        raise CohomologyError(f"degree {r} outside [-2, {max_degree}]")
    if M.group is not G and M.group.table != G.table:
        raise CohomologyError("module is over a different group")
    _check_order(G)
    method = method or default_method(G)
    if G.order == 1:
        return Subquotient(IntMatrix.zeros(M.rank, 0), IntMatrix.zeros(M.rank, 0))
    if method == "cyclic":
        return group_cohomology(G, M, 2 if r % 2 == 0 else 1, "cyclic")
    if r >= 1:
        return group_cohomology(G, M, r, method)
    if r == 0:
        return tate_zero(G, M)
    if r == -1:
        return tate_minus_one(G, M)
    return group_homology_1(G, M, method)


def tate_cohomology(G: FiniteGroup, M: GModule, r: int, method: str | None = None) -> AbGroupStructure:
    """Structure of the Tate cohomology group in degree r (-2 <= r <= 3)."""
    return tate_cohomology_group(G, M, r, method).structure


def cyclic_periodicity_check(G: FiniteGroup, M: GModule, r: int) -> bool:
    """Compare degree r and r + 2 computed through the non-periodic routes."""
    if not G.is_cyclic():
        raise CohomologyError("periodicity check needs a cyclic group")
    if G.order == 1:
        return True
    small = M.rank * (G.order - 1) ** (r + 3) <= BAR_BUDGET
    left = tate_cohomology_group(G, M, r, "bar" if small else "resolution").structure
    right = tate_cohomology_group(G, M, r + 2, "resolution", max_degree=5).structure
    return left == right


# hypercohomology of A -> B in degrees [0, 1]

class CrossedModule:
    """A G-equivariant map rho: A -> B between presented modules."""

    def __init__(self, A: GModule, B: GModule, rho: IntMatrix):
        if A.group.table != B.group.table:
            raise CohomologyError("A and B must be modules over the same group")
        if rho.shape != (B.rank, A.rank):
            raise CohomologyError("rho has the wrong shape")
        self.A, self.B, self.rho = A, B, rho
        if A.relations.cols and not B._in_relations(rho @ A.relations):
            raise CohomologyError("rho is not well defined on A")
        for g in A.group.elements():
            if not B._in_relations(rho @ A.actions[g] - B.actions[g] @ rho):
                raise CohomologyError("rho is not equivariant")

    @property
    def group(self) -> FiniteGroup:
        return self.A.group


def _total_differential(cm: CrossedModule, res: list[ZGMatrix], n: int) -> IntMatrix:
    """Tot^n = C^n(A) + C^{n-1}(B) -> Tot^{n+1};  (a, b) -> (da, rho a - db)."""
    A, B, rho = cm.A, cm.B, cm.rho
    ranks = [1] + [d.cols for d in res]
    dA = cochain_differential(A, res[n])
    rho_n = IntMatrix.block_diag(*([rho] * ranks[n])) if ranks[n] else IntMatrix.zeros(0, 0)
    if n == 0:
        return IntMatrix.vstack(dA, rho_n)
    dB = cochain_differential(B, res[n - 1])
    top = IntMatrix.hstack(dA, IntMatrix.zeros(dA.rows, dB.cols))
    return IntMatrix.vstack(top, IntMatrix.hstack(rho_n, -dB))


def _total_relations(cm: CrossedModule, res: list[ZGMatrix], n: int) -> IntMatrix:
    ranks = [1] + [d.cols for d in res]
    parts = [_rels(cm.A, ranks[n])]
    if n >= 1:
        parts.append(_rels(cm.B, ranks[n - 1]))
    parts = [p for p in parts if p.rows]
    return IntMatrix.block_diag(*parts)


def hyper_h(G: FiniteGroup, cm: CrossedModule, r: int, method: str = "resolution") -> AbGroupStructure:
    """Hypercohomology H^r(G, A -> B), A in degree 0 and B in degree 1."""
    if r not in (0, 1, 2):
        raise CohomologyError("hypercohomology degree must be 0, 1 or 2")
    _check_order(G)
    res = resolution(G, method, r + 1)
    d_out = _total_differential(cm, res, r)
    if r == 0:
        d_in = IntMatrix.zeros(d_out.cols, 0)
    else:
        d_in = _total_differential(cm, res, r - 1)
    return presented_homology(d_in, d_out, _total_relations(cm, res, r),
                              _total_relations(cm, res, r + 1)).structure


# brute force oracle on normalized inhomogeneous cochains

def _structure_from_sets(cycles: list, boundaries: set, scale) -> AbGroupStructure:
    """Structure of Z/B from explicit element lists using kill counts."""
    size = len(cycles) // len(boundaries)
    if size == 1:
        return AbGroupStructure()
    # count[k] = #{z in Z/B : k z = 0}
    counts = {}
    for k in _divisors(size):
        counts[k] = sum(1 for z in cycles if scale(z, k) in boundaries) // len(boundaries)
    return structure_from_kill_counts(counts, size)


def _divisors(n: int) -> list[int]:
    return [d for d in range(1, n + 1) if n % d == 0]


class _Cochains:
    def __init__(self, M: FiniteGModule, n: int):
        G = M.group
        self.M = M
        self.n = n
        self.nonid = [g for g in G.elements() if g != G.identity]
        self.keys = list(product(self.nonid, repeat=n))
        self.pos = {k: i for i, k in enumerate(self.keys)}
        self.zero = tuple(0 for _ in M.divisors)

    def all(self):
        elems = self.M.elements()
        return product(elems, repeat=len(self.keys))

    def value(self, phi, args):
        if self.M.group.identity in args:
            return self.zero
        return phi[self.pos[args]]


def _coboundary(C: _Cochains, Cn1: _Cochains, phi) -> tuple:
    M, G = C.M, C.M.group
    n = C.n
    out = []
    for args in Cn1.keys:
        v = list(M.apply(args[0], C.value(phi, args[1:])))
        for i in range(1, n + 1):
            merged = args[:i - 1] + (G.mul(args[i - 1], args[i]),) + args[i + 1:]
            w = C.value(phi, merged)
            s = (-1) ** i
            v = [a + s * b for a, b in zip(v, w)]
        w = C.value(phi, args[:n])
        s = (-1) ** (n + 1)
        v = [a + s * b for a, b in zip(v, w)]
        out.append(M.reduce(v))
    return tuple(out)


def _apply_rho(cm: CrossedModule, phi) -> tuple:
    B = cm.B
    return tuple(B.reduce(cm.rho.apply(a)) for a in phi)


def hyper_h_bruteforce(cm: CrossedModule, r: int, limit: int = 2_000_000) -> AbGroupStructure:
    """H^r(G, A -> B) by enumerating normalized cochains of the total complex."""
    A, B = cm.A, cm.B
    if not (isinstance(A, FiniteGModule) and isinstance(B, FiniteGModule)):
        raise CohomologyError("brute force needs finite modules")
    CA = [_Cochains(A, n) for n in range(r + 2)]
    CB = [_Cochains(B, n) for n in range(r + 1)]

    def tot(n):
        a_space = list(CA[n].all())
        b_space = list(CB[n - 1].all()) if n >= 1 else [()]
        return a_space, b_space

    def size(n):
        s = A.order() ** len(CA[n].keys)
        if n >= 1:
            s *= B.order() ** len(CB[n - 1].keys)
        return s

    if size(r) > limit or (r >= 1 and size(r - 1) > limit):
        raise CohomologyError("cochain space too large for brute force")

    def D(n, a, b):
        da = _coboundary(CA[n], CA[n + 1], a)
        ra = _apply_rho(cm, a)
        if n >= 1:
            db = _coboundary(CB[n - 1], CB[n], b)
            second = tuple(B.reduce([x - y for x, y in zip(u, v)]) for u, v in zip(ra, db))
        else:
            second = ra
        return da, second

    def is_zero(pair):
        return all(all(x == 0 for x in v) for part in pair for v in part)

    a_sp, b_sp = tot(r)
    # a cycle needs da = 0 and rho(a) = db; tabulate db once
    if r >= 1:
        db_table = {}
        for b in b_sp:
            db_table.setdefault(_coboundary(CB[r - 1], CB[r], b), []).append(b)
    cycles = []
    for a in a_sp:
        if not is_zero((_coboundary(CA[r], CA[r + 1], a),)):
            continue
        ra = _apply_rho(cm, a)
        if r == 0:
            if is_zero((ra,)):
                cycles.append((a, ()))
        else:
            cycles += [(a, b) for b in db_table.get(ra, [])]
    if r == 0:
        boundaries = {(tuple(CA[0].zero for _ in CA[0].keys), ())}
    else:
        a_sp0, b_sp0 = tot(r - 1)
        boundaries = {D(r - 1, a, b) for a in a_sp0 for b in b_sp0}
        boundaries = {(da, db) for da, db in boundaries}

    def scale(z, k):
        a, b = z
        return (tuple(A.reduce([k * x for x in v]) for v in a),
                tuple(B.reduce([k * x for x in v]) for v in b))

    return _structure_from_sets(cycles, boundaries, scale)


def group_cohomology_bruteforce(M: FiniteGModule, r: int) -> AbGroupStructure:
    """Ordinary H^r(G, M) for r = 0, 1, 2 by enumeration."""
    G = M.group
    zero = trivial_finite_module(G, [1])
    cm = CrossedModule(M, zero, IntMatrix.zeros(1, M.rank))
    return hyper_h_bruteforce(cm, r)


@dataclass(frozen=True)
class CrossedIsoReport:
    h0: AbGroupStructure
    h1: AbGroupStructure
    h2: AbGroupStructure
    c_invariants: AbGroupStructure
    c_h1: AbGroupStructure
    bruteforce: dict

    @property
    def h0_vanishes(self) -> bool:
        return self.h0.is_trivial()

    @property
    def h1_matches(self) -> bool:
        return self.h1 == self.c_invariants

    @property
    def h2_matches(self) -> bool:
        return self.h2 == self.c_h1

    @property
    def bruteforce_agrees(self) -> bool:
        return all(self.bruteforce.values())

    @property
    def ok(self) -> bool:
        return self.h0_vanishes and self.h1_matches and self.h2_matches and self.bruteforce_agrees


def check_short_exact(A: GModule, B: GModule, C: GModule, f: IntMatrix, g: IntMatrix) -> list[str]:
    """Failures of 0 -> A -f-> B -g-> C -> 0 being exact (empty list if exact)."""
    problems = []
    zA = IntMatrix.zeros(A.rank, 0)
    if not presented_homology(zA, f, A.relations, B.relations).structure.is_trivial():
        problems.append("A -> B is not injective")
    if not (g @ f).is_zero() and not C._in_relations(g @ f):
        problems.append("g f != 0")
    elif not presented_homology(f, g, B.relations, C.relations).structure.is_trivial():
        problems.append("not exact at B")
    if not cokernel_structure(IntMatrix.hstack(g, C.relations)).is_trivial():
        problems.append("B -> C is not surjective")
    return problems


def crossed_module_isos_check(G: FiniteGroup, A: GModule, B: GModule, C: GModule,
                              f: IntMatrix, g: IntMatrix, method: str = "resolution",
                              bruteforce: bool = True) -> CrossedIsoReport:
    """Compare H^i(G, A -> B) with 0, C^G and H^1(G, C) for 0 -> A -> B -> C -> 0."""
    problems = check_short_exact(A, B, C, f, g)
    if problems:
        raise CohomologyError("input is not a short exact sequence: " + "; ".join(problems))
    cm = CrossedModule(A, B, f)
    CrossedModule(B, C, g)  # equivariance of g
    h = [hyper_h(G, cm, r, method) for r in range(3)]
    c0 = group_cohomology(G, C, 0, method).structure
    c1 = group_cohomology(G, C, 1, method).structure
    brute: dict[str, bool] = {}
    if bruteforce and all(isinstance(M, FiniteGModule) for M in (A, B, C)):
        for r in range(3):
            try:
                brute[f"H{r}(A->B)"] = hyper_h_bruteforce(cm, r) == h[r]
            except CohomologyError:
                pass
        brute["H0(C)"] = group_cohomology_bruteforce(C, 0) == c0
        brute["H1(C)"] = group_cohomology_bruteforce(C, 1) == c1
    return CrossedIsoReport(h[0], h[1], h[2], c0, c1, brute)


def cyclic_extension(G: FiniteGroup, a: int, b: int, signs: Sequence[int] | None = None):
    """0 -> Z/a -> Z/ab -> Z/b -> 0 (multiplication by b, then reduction), with G
    acting on all three by the same signs.  Returns (A, B, C, f, g)."""
    signs = list(signs) if signs is not None else [1] * G.order
    A = scalar_finite_module(G, [a], signs)
    B = scalar_finite_module(G, [a * b], signs)
    C = scalar_finite_module(G, [b], signs)
    return A, B, C, IntMatrix([[b]]), IntMatrix([[1]])


def swap_extension():
    """Z/2 (diagonal) -> (Z/2)^2 with the swap action -> Z/2 (sum), group C2."""
    G = cyclic_group(2)
    swap = IntMatrix([[0, 1], [1, 0]])
    A = trivial_finite_module(G, [2])
    B = FiniteGModule(G, [2, 2], [IntMatrix.identity(2), swap])
    C = trivial_finite_module(G, [2])
    return G, (A, B, C, IntMatrix([[1], [1]]), IntMatrix([[1, 1]]))


def standard_crossed_instances() -> list[tuple[str, FiniteGroup, tuple]]:
    """Short exact sequences of finite G-modules with |G| <= 4 and |B| <= 16."""
    c2, c3, c4 = cyclic_group(2), cyclic_group(3), cyclic_group(4)
    v4 = direct_product(c2, c2)
    out = [
        ("C2: Z/2 -> Z/4 -> Z/2", c2, cyclic_extension(c2, 2, 2)),
        ("C3: Z/3 -> Z/9 -> Z/3", c3, cyclic_extension(c3, 3, 3)),
        ("C2 sign: Z/3 -> Z/9 -> Z/3", c2, cyclic_extension(c2, 3, 3, [1, -1])),
        ("C4: Z/2 -> Z/4 -> Z/2", c4, cyclic_extension(c4, 2, 2)),
        ("C2xC2: Z/2 -> Z/4 -> Z/2", v4, cyclic_extension(v4, 2, 2)),
        ("C2: Z/2 -> Z/8 -> Z/4", c2, cyclic_extension(c2, 2, 4)),
        ("C2 sign: Z/4 -> Z/16 -> Z/4", c2, cyclic_extension(c2, 4, 4, [1, -1])),
    ]
    G, seq = swap_extension()
    out.append(("C2 swap: Z/2 -> (Z/2)^2 -> Z/2", G, seq))
    return out


# local torus cohomology (Tate-Nakayama model)

def local_torus_cohomology(datum, ell, charlattice: GModule, r: int) -> AbGroupStructure:
    """Ĥ^{r-2}(D_ell, X_*) where X_* is the dual of the character lattice.

    ``ell`` may be a prime in the datum or ``"inf"`` (decomposition group
    <iota>).  The model is exact for unramified places; a warning is logged
    when e > 1.
    """
    if r not in (1, 2):
        raise CohomologyError("local torus cohomology is modelled for r = 1, 2")
    local = datum.local(ell)
    if local.e > 1 and ell != "inf":
        log.warning("place over %s is ramified (e=%d); local model is the Tate-Nakayama group",
                    ell, local.e)
    cochars = charlattice.dual().restrict(local.decomposition)
    return tate_cohomology(cochars.group, cochars, r - 2)


@dataclass(frozen=True)
class LocalClass:
    structure: AbGroupStructure
    coordinates: tuple
    order: int | None
    multiplier: int
    integral_cocharacter: tuple

    @property
    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coordinates)


def pushforward_local_class(cochar: Sequence[Fraction], datum, ell,
                            charlattice: GModule) -> LocalClass:
    """Class in Ĥ^0(D_ell, X_*) of a D-invariant rational cocharacter.

    The cocharacter is given by its values on the basis of the character
    lattice.  It is multiplied by the least common denominator c (which must
    divide |D_ell|) and the resulting integral cocharacter is reduced modulo
    norms.  With this normalization the identity cocharacter of G_m maps to
    the generator 1 of Z/|D|.
    """
    vals = [Fraction(x) for x in cochar]
    if len(vals) != charlattice.rank:
        raise CohomologyError("cocharacter length does not match the lattice rank")
    D = datum.decomposition(ell)
    c = 1
    for v in vals:
        c = c * v.denominator // gcd(c, v.denominator)
    if len(D) % c:
        raise CohomologyError(f"denominator {c} does not divide |D| = {len(D)}")
    y = tuple(int(v * c) for v in vals)
    cochars = charlattice.dual().restrict(D)
    for g in cochars.group.elements():
        if cochars.actions[g].apply(y) != y:
            raise CohomologyError("cocharacter is not invariant under the decomposition group")
    H0 = tate_zero(cochars.group, cochars) if cochars.group.order > 1 else None
    if H0 is None:
        return LocalClass(AbGroupStructure(), (), 1, c, y)
    return LocalClass(H0.structure, H0.coordinates(y), H0.order_of(y), c, y)
