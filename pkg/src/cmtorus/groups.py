"""Finite groups given by multiplication tables.

Elements are the integers 0..n-1; ``labels`` keeps a printable name for each
(for (Z/n)^x the residues themselves).
"""

from __future__ import annotations

from itertools import product
from math import gcd
from typing import Iterable, Sequence


class GroupError(ValueError):
    pass


class FiniteGroup:
    def __init__(self, table: Sequence[Sequence[int]], labels: Sequence | None = None,
                 check: bool = True):
        self.table = tuple(tuple(int(x) for x in row) for row in table)
        n = len(self.table)
        self.labels = tuple(labels) if labels is not None else tuple(range(n))
        if len(self.labels) != n:
            raise GroupError("label count does not match table size")
        if check:
            self._validate()
        self.identity = next(e for e in range(n)
                             if all(self.table[e][x] == x for x in range(n)))
        self._inv = tuple(next(y for y in range(n) if self.table[x][y] == self.identity)
                          for x in range(n))

    def _validate(self):
        n = len(self.table)
        if n == 0:
            raise GroupError("empty group")
        rng = set(range(n))
        for row in self.table:
            if len(row) != n or set(row) != rng:
                raise GroupError("table is not a Latin square")
        if not any(all(self.table[e][x] == x == self.table[x][e] for x in range(n))
                   for e in range(n)):
            raise GroupError("no identity element")
        t = self.table
        for a, b, c in product(range(n), repeat=3):
            if t[t[a][b]][c] != t[a][t[b][c]]:
                raise GroupError(f"not associative at {a},{b},{c}")

    @property
    def order(self) -> int:
        return len(self.table)

    def __len__(self) -> int:
        return len(self.table)

    def elements(self) -> range:
        return range(len(self.table))

    def mul(self, a: int, b: int) -> int:
        return self.table[a][b]

    def inv(self, a: int) -> int:
        return self._inv[a]

    def power(self, a: int, k: int) -> int:
        if k < 0:
            a, k = self.inv(a), -k
        out = self.identity
        for _ in range(k):
            out = self.table[out][a]
        return out

    def element_order(self, a: int) -> int:
        k, x = 1, a
        while x != self.identity:
            x = self.table[x][a]
            k += 1
        return k

    def is_abelian(self) -> bool:
        return all(self.table[a][b] == self.table[b][a]
                   for a in self.elements() for b in self.elements())

    def is_central(self, a: int) -> bool:
        return all(self.table[a][b] == self.table[b][a] for b in self.elements())

    def generator(self) -> int | None:
        """A generator if the group is cyclic, else None."""
        for a in self.elements():
            if self.element_order(a) == self.order:
                return a
        return None

    def is_cyclic(self) -> bool:
        return self.generator() is not None

    def closure(self, gens: Iterable[int]) -> frozenset[int]:
        out = {self.identity}
        frontier = list(out)
        gens = list(gens)
        while frontier:
            x = frontier.pop()
            for g in gens:
                y = self.table[x][g]
                if y not in out:
                    out.add(y)
                    frontier.append(y)
        return frozenset(out)

    def is_subgroup(self, h: Iterable[int]) -> bool:
        h = set(h)
        return (self.identity in h
                and all(self.table[a][self._inv[b]] in h for a in h for b in h))

    def left_cosets(self, h: Iterable[int]) -> list[frozenset[int]]:
        """Cosets sigma*H, ordered by their smallest element."""
        h = frozenset(h)
        seen: set[int] = set()
        out = []
        for s in self.elements():
            if s in seen:
                continue
            c = frozenset(self.table[s][x] for x in h)
            seen |= c
            out.append(c)
        return out

    def double_cosets(self, h: Iterable[int], k: Iterable[int]) -> list[frozenset[int]]:
        """Double cosets H sigma K, ordered by smallest element."""
        h, k = frozenset(h), frozenset(k)
        seen: set[int] = set()
        out = []
        for s in self.elements():
            if s in seen:
                continue
            c = frozenset(self.table[self.table[a][s]][b] for a in h for b in k)
            seen |= c
            out.append(c)
        return out

    def subgroup(self, elems: Iterable[int]) -> tuple["FiniteGroup", list[int]]:
        """The subgroup on ``elems`` as a group in its own right, plus the
        embedding list (local index -> element of self)."""
        emb = sorted(set(elems))
        if not self.is_subgroup(emb):
            raise GroupError("not a subgroup")
        pos = {g: i for i, g in enumerate(emb)}
        table = [[pos[self.table[a][b]] for b in emb] for a in emb]
        return FiniteGroup(table, [self.labels[g] for g in emb], check=False), emb

    def is_homomorphism(self, other: "FiniteGroup", phi: Sequence[int]) -> bool:
        """Is phi: self -> other (phi[g] = image) a homomorphism?"""
        return len(phi) == self.order and all(
            phi[self.table[a][b]] == other.table[phi[a]][phi[b]]
            for a in self.elements() for b in self.elements())

    def index_of_label(self, label) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise GroupError(f"no element labelled {label!r}") from None

    def __repr__(self) -> str:
        return f"FiniteGroup(order={self.order})"


def cyclic_group(n: int) -> FiniteGroup:
    return FiniteGroup([[(a + b) % n for b in range(n)] for a in range(n)], check=False)


def units_mod(n: int) -> FiniteGroup:
    """(Z/n)^x with labels equal to the residues."""
    units = [a for a in range(1, n) if gcd(a, n) == 1] if n > 1 else [0]
    pos = {a: i for i, a in enumerate(units)}
    table = [[pos[(a * b) % n] if n > 1 else 0 for b in units] for a in units]
    return FiniteGroup(table, units, check=False)


def direct_product(g: FiniteGroup, h: FiniteGroup) -> FiniteGroup:
    n, m = g.order, h.order
    table = [[g.table[a // m][b // m] * m + h.table[a % m][b % m] for b in range(n * m)]
             for a in range(n * m)]
    labels = [(g.labels[a // m], h.labels[a % m]) for a in range(n * m)]
    return FiniteGroup(table, labels, check=False)


def symmetric_group(k: int) -> FiniteGroup:
    from itertools import permutations
    perms = list(permutations(range(k)))
    pos = {p: i for i, p in enumerate(perms)}
    table = [[pos[tuple(p[q[i]] for i in range(k))] for q in perms] for p in perms]
    return FiniteGroup(table, perms, check=False)


def dihedral_group(n: int) -> FiniteGroup:
    """Symmetries of the n-gon; element (k, s) = rotation^k * reflection^s."""
    elems = [(k, s) for s in (0, 1) for k in range(n)]
    pos = {e: i for i, e in enumerate(elems)}

    def mul(a, b):
        (k1, s1), (k2, s2) = a, b
        return ((k1 + (k2 if s1 == 0 else -k2)) % n, s1 ^ s2)

    return FiniteGroup([[pos[mul(a, b)] for b in elems] for a in elems], elems, check=False)


def quaternion_group() -> FiniteGroup:
    # elements +-1, +-i, +-j, +-k as (sign, unit) with unit in 1,i,j,k
    units = {("1", "1"): (1, "1"), ("1", "i"): (1, "i"), ("1", "j"): (1, "j"), ("1", "k"): (1, "k"),
             ("i", "1"): (1, "i"), ("i", "i"): (-1, "1"), ("i", "j"): (1, "k"), ("i", "k"): (-1, "j"),
             ("j", "1"): (1, "j"), ("j", "i"): (-1, "k"), ("j", "j"): (-1, "1"), ("j", "k"): (1, "i"),
             ("k", "1"): (1, "k"), ("k", "i"): (1, "j"), ("k", "j"): (-1, "i"), ("k", "k"): (-1, "1")}
    elems = [(s, u) for s in (1, -1) for u in "1ijk"]
    pos = {e: i for i, e in enumerate(elems)}
    table = []
    for s1, u1 in elems:
        row = []
        for s2, u2 in elems:
            s, u = units[(u1, u2)]
            row.append(pos[(s1 * s2 * s, u)])
        table.append(row)
    return FiniteGroup(table, elems, check=False)


def alternating_group(k: int) -> FiniteGroup:
    from itertools import permutations

    def sign(p):
        inv = sum(1 for i in range(len(p)) for j in range(i + 1, len(p)) if p[i] > p[j])
        return -1 if inv % 2 else 1

    perms = [p for p in permutations(range(k)) if sign(p) == 1]
    pos = {p: i for i, p in enumerate(perms)}
    table = [[pos[tuple(p[q[i]] for i in range(k))] for q in perms] for p in perms]
    return FiniteGroup(table, perms, check=False)


def small_groups(max_order: int) -> list[tuple[str, FiniteGroup]]:
    """A sample of groups of order <= max_order, abelian and not."""
    out = [(f"C{n}", cyclic_group(n)) for n in range(1, max_order + 1)]
    c2 = cyclic_group(2)
    extra = [("C2xC2", direct_product(c2, c2)), ("S3", symmetric_group(3)),
             ("C2xC4", direct_product(c2, cyclic_group(4))),
             ("C2xC2xC2", direct_product(c2, direct_product(c2, c2))),
             ("D4", dihedral_group(4)), ("Q8", quaternion_group()),
             ("C3xC3", direct_product(cyclic_group(3), cyclic_group(3))),
             ("D5", dihedral_group(5)), ("C2xC6", direct_product(c2, cyclic_group(6))),
             ("A4", alternating_group(4)), ("D6", dihedral_group(6))]
    return out + [(name, g) for name, g in extra if g.order <= max_order]
