"""Galois data of CM fields that are Galois over Q.

A :class:`CMDatum` records the Galois group, complex conjugation ``iota``,
and for finitely many rational primes the decomposition group together with
ramification index and residue degree.  Nothing here does number-field
arithmetic: cyclotomic and imaginary quadratic data come from closed
formulas, anything else must be supplied by the caller and is only validated.

Conventions
-----------
* Element 0 of every preset group is the identity.
* X (places of K above l) is the list of cosets sigma*D_l; Y (places of K+)
  is the list of cosets of D_l<iota>.  Both are ordered by their smallest
  element index, so coset 0 always contains the identity and is the
  distinguished place w.
* ``INF`` stands for the archimedean place; its decomposition group is <iota>.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from math import gcd
from typing import Mapping, Sequence

from .groups import FiniteGroup, GroupError, cyclic_group, units_mod

INF = "inf"

DEFAULT_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43)


class DatumError(ValueError):
    pass


@dataclass(frozen=True)
class LocalData:
    decomposition: frozenset
    e: int
    f: int

    @property
    def degree(self) -> int:
        return self.e * self.f


@dataclass(frozen=True)
class CMDatum:
    group: FiniteGroup
    iota: int
    local_data: Mapping[int, LocalData]
    p: int
    label: str = ""
    field: tuple = ()  # ("cyclotomic", n) or ("quadratic", d) for presets

    def __post_init__(self):
        g = self.group
        i = self.iota
        if not (0 <= i < g.order):
            raise DatumError("iota is not a group element")
        if i == g.identity or g.mul(i, i) != g.identity:
            raise DatumError("iota must be an involution different from 1")
        if not g.is_central(i):
            raise DatumError("iota must be central")
        for ell, ld in self.local_data.items():
            if not g.is_subgroup(ld.decomposition):
                raise DatumError(f"decomposition group at {ell} is not a subgroup")
            if len(ld.decomposition) != ld.e * ld.f:
                raise DatumError(f"|D_{ell}| = {len(ld.decomposition)} but e*f = {ld.e * ld.f}")
        if self.p not in self.local_data:
            raise DatumError(f"no local data at the distinguished prime {self.p}")

    def local(self, ell) -> LocalData:
        if ell == INF:
            return LocalData(frozenset({self.group.identity, self.iota}), 2, 1)
        try:
            return self.local_data[ell]
        except KeyError:
            raise DatumError(f"no local data at {ell}") from None

    def decomposition(self, ell) -> frozenset:
        return self.local(ell).decomposition

    @property
    def D_p(self) -> frozenset:
        return self.local_data[self.p].decomposition

    @property
    def local_degree(self) -> int:
        """n(w) = e_p f_p = [K_w : Q_p]."""
        return self.local_data[self.p].degree

    def iota_in_D(self, ell=None) -> bool:
        return self.iota in self.decomposition(self.p if ell is None else ell)

    def plus_local_degree(self, ell=None) -> int:
        """Local degree of K+ at the place below w: |D<iota>| / 2."""
        d = self.decomposition(self.p if ell is None else ell)
        return len(d) if self.iota not in d else len(d) // 2

    @property
    def iota_subgroup(self) -> frozenset:
        return frozenset({self.group.identity, self.iota})

    def primes(self) -> list[int]:
        return sorted(self.local_data)

    def ramified_primes(self) -> list[int]:
        return [ell for ell in self.primes() if self.local_data[ell].e > 1]

    def describe(self) -> dict:
        return {"label": self.label, "order": self.group.order, "p": self.p,
                "iota": _label_json(self.group.labels[self.iota]),
                "local_degree": self.local_degree, "iota_in_D": self.iota_in_D()}

    # serialization

    def to_json(self) -> dict:
        g = self.group
        return {
            "label": self.label,
            "field": list(self.field),
            "group": {"table": [list(r) for r in g.table],
                      "labels": [_label_json(x) for x in g.labels]},
            "iota": self.iota,
            "p": self.p,
            "local_data": {str(ell): {"decomposition": sorted(ld.decomposition), "e": ld.e,
                                      "f": ld.f}
                           for ell, ld in sorted(self.local_data.items())},
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)

    @classmethod
    def from_json(cls, obj: Mapping) -> "CMDatum":
        try:
            g = FiniteGroup(obj["group"]["table"], obj["group"].get("labels"))
        except GroupError as exc:
            raise DatumError(str(exc)) from exc
        local = {int(k): LocalData(frozenset(v["decomposition"]), int(v["e"]), int(v["f"]))
                 for k, v in obj["local_data"].items()}
        return cls(g, int(obj["iota"]), local, int(obj["p"]), obj.get("label", ""),
                   tuple(obj.get("field", ())))


def _label_json(x):
    return list(x) if isinstance(x, tuple) else x


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    k = 2
    while k * k <= n:
        if n % k == 0:
            return False
        k += 1
    return True


def _mult_order(a: int, m: int) -> int:
    if m == 1:
        return 1
    k, x = 1, a % m
    while x != 1:
        x = x * a % m
        k += 1
    return k


def _phi(n: int) -> int:
    return sum(1 for a in range(1, n + 1) if gcd(a, n) == 1)


def make_cyclotomic_datum(n: int, primes: Sequence[int] | None = None, p: int | None = None,
                          label: str | None = None) -> CMDatum:
    """Galois data of Q(zeta_n); group (Z/n)^x with iota = -1."""
    if n < 3:
        raise DatumError("Q(zeta_n) is CM only for n >= 3")
    if n % 4 == 2:
        raise DatumError(f"use n = {n // 2}: Q(zeta_{n}) = Q(zeta_{n // 2})")
    primes = list(DEFAULT_PRIMES if primes is None else primes)
    if p is not None and p not in primes:
        primes.append(p)
    primes += [q for q in range(2, n + 1) if n % q == 0 and _is_prime(q) and q not in primes]
    g = units_mod(n)
    labels = list(g.labels)
    iota = labels.index(n - 1)
    local = {}
    for ell in primes:
        if not _is_prime(ell):
            raise DatumError(f"{ell} is not prime")
        if n % ell:
            f = _mult_order(ell, n)
            dec = frozenset(labels.index(pow(ell, k, n)) for k in range(f))
            local[ell] = LocalData(dec, 1, f)
        else:
            a, m = 0, n
            while m % ell == 0:
                m //= ell
                a += 1
            f = _mult_order(ell, m)
            frob = {pow(ell, k, m) for k in range(f)} if m > 1 else {0}
            dec = frozenset(i for i, x in enumerate(labels) if (x % m) in frob)
            local[ell] = LocalData(dec, _phi(ell ** a), f)
    return CMDatum(g, iota, local, primes[0] if p is None else p,
                   label or f"Q(zeta{n})", ("cyclotomic", n))


def _squarefree(d: int) -> bool:
    d = abs(d)
    k = 2
    while k * k <= d:
        if d % (k * k) == 0:
            return False
        k += 1
    return True


def field_discriminant(d: int) -> int:
    return d if d % 4 == 1 else 4 * d


def kronecker(D: int, ell: int) -> int:
    """Kronecker symbol (D/ell) for a prime ell."""
    if ell == 2:
        if D % 2 == 0:
            return 0
        return 1 if D % 8 in (1, 7) else -1
    r = pow(D % ell, (ell - 1) // 2, ell)
    return 0 if r == 0 else (1 if r == 1 else -1)


def make_quadratic_datum(d: int, primes: Sequence[int] | None = None, p: int | None = None,
                         label: str | None = None) -> CMDatum:
    """Galois data of Q(sqrt d) for squarefree d < 0; group Z/2 = {1, iota}."""
    if d >= 0:
        raise DatumError("need d < 0 for an imaginary quadratic field")
    if not _squarefree(d):
        raise DatumError(f"{d} is not squarefree")
    primes = list(DEFAULT_PRIMES if primes is None else primes)
    if p is not None and p not in primes:
        primes.append(p)
    disc = field_discriminant(d)
    primes += [q for q in range(2, abs(disc) + 1)
               if disc % q == 0 and _is_prime(q) and q not in primes]
    g = FiniteGroup(cyclic_group(2).table, ["1", "iota"], check=False)
    local = {}
    for ell in primes:
        if not _is_prime(ell):
            raise DatumError(f"{ell} is not prime")
        k = kronecker(disc, ell)
        if k == 1:
            local[ell] = LocalData(frozenset({0}), 1, 1)
        elif k == -1:
            local[ell] = LocalData(frozenset({0, 1}), 1, 2)
        else:
            local[ell] = LocalData(frozenset({0, 1}), 2, 1)
    return CMDatum(g, 1, local, primes[0] if p is None else p,
                   label or f"Q(sqrt{d})", ("quadratic", d))


def quadratic_d(datum: CMDatum) -> int | None:
    """d with K = Q(sqrt d) when the datum is an imaginary quadratic preset."""
    kind = datum.field[:1]
    if kind == ("quadratic",):
        return datum.field[1]
    if datum.field in (("cyclotomic", 4),):
        return -1
    if datum.field in (("cyclotomic", 3),):
        return -3
    return None


@dataclass(frozen=True)
class PlaceSet:
    ell: object
    X: tuple[frozenset, ...]
    Y: tuple[frozenset, ...]
    x_to_y: tuple[int, ...]
    iota_in_D: bool
    decomposition: frozenset

    def fiber(self, y: int) -> list[int]:
        return [i for i, j in enumerate(self.x_to_y) if j == y]

    def x_index(self, sigma: int) -> int:
        return next(i for i, c in enumerate(self.X) if sigma in c)

    def y_index(self, sigma: int) -> int:
        return next(i for i, c in enumerate(self.Y) if sigma in c)


def places(datum: CMDatum, ell=None) -> PlaceSet:
    ell = datum.p if ell is None else ell
    g = datum.group
    d = datum.decomposition(ell)
    di = g.closure(list(d) + [datum.iota])
    X = tuple(g.left_cosets(d))
    Y = tuple(g.left_cosets(di))
    x_to_y = tuple(next(j for j, y in enumerate(Y) if x <= y) for x in X)
    return PlaceSet(ell, X, Y, x_to_y, datum.iota in d, d)


@dataclass(frozen=True)
class TowerMap:
    small: CMDatum
    large: CMDatum
    surjection: tuple[int, ...]  # large element -> small element
    local_degree_at_p: int
    plus_local_degree_at_p: int = field(default=1)

    def place_map(self) -> tuple[int, ...]:
        """Index of the image in X(K) of each place of X(K')."""
        ps, pl = places(self.small), places(self.large)
        return tuple(ps.x_index(self.surjection[min(c)]) for c in pl.X)

    def plus_place_map(self) -> tuple[int, ...]:
        ps, pl = places(self.small), places(self.large)
        return tuple(ps.y_index(self.surjection[min(c)]) for c in pl.Y)


def transition(small: CMDatum, large: CMDatum, surjection: Sequence[int]) -> TowerMap:
    """Validate a tower K in K' given by Gal(K'/Q) -> Gal(K/Q)."""
    phi = tuple(int(x) for x in surjection)
    if small.p != large.p:
        raise DatumError("tower data must share the distinguished prime")
    if len(phi) != large.group.order or set(phi) != set(small.group.elements()):
        raise DatumError("surjection: map is not onto the smaller group")
    if not large.group.is_homomorphism(small.group, phi):
        raise DatumError("surjection: not a group homomorphism")
    if phi[large.iota] != small.iota:
        raise DatumError("surjection: iota' does not map to iota")
    for ell in sorted(set(small.local_data) & set(large.local_data)):
        image = frozenset(phi[x] for x in large.local_data[ell].decomposition)
        if image != small.local_data[ell].decomposition:
            raise DatumError(f"surjection: image of D'_{ell} is not D_{ell}")
        ls, ll = small.local_data[ell], large.local_data[ell]
        if ll.e % ls.e or ll.f % ls.f:
            raise DatumError(f"surjection: e or f at {ell} does not divide upward")
    deg = len(large.D_p) // len(small.D_p)
    plus = large.plus_local_degree() // small.plus_local_degree()
    return TowerMap(small, large, phi, deg, plus)


def cyclotomic_surjection(small: CMDatum, large: CMDatum) -> tuple[int, ...]:
    """Restriction (Z/n')^x -> (Z/n)^x for cyclotomic presets with n | n'."""
    n, n2 = small.field[1], large.field[1]
    if n2 % n:
        raise DatumError(f"Q(zeta{n}) is not contained in Q(zeta{n2})")
    sl = list(small.group.labels)
    return tuple(sl.index(a % n) for a in large.group.labels)


def cyclotomic_tower(n_small: int, n_large: int, p: int, primes=None) -> TowerMap:
    s = make_cyclotomic_datum(n_small, primes, p)
    big = make_cyclotomic_datum(n_large, primes, p)
    return transition(s, big, cyclotomic_surjection(s, big))


def identity_tower(datum: CMDatum) -> TowerMap:
    return transition(datum, datum, tuple(datum.group.elements()))


PRESETS = {
    "Q(i)": ("cyclotomic", 4),
    "Q(sqrt-5)": ("quadratic", -5),
    "Q(zeta5)": ("cyclotomic", 5),
    "Q(zeta13)": ("cyclotomic", 13),
    "Q(zeta15)": ("cyclotomic", 15),
    "Q(zeta20)": ("cyclotomic", 20),
}

PRESET_PRIMES = (3, 5, 19)


def preset(name: str, p: int) -> CMDatum:
    try:
        kind, arg = PRESETS[name]
    except KeyError:
        raise DatumError(f"unknown preset {name!r}; known: {sorted(PRESETS)}") from None
    if kind == "cyclotomic":
        return make_cyclotomic_datum(arg, p=p, label=name)
    return make_quadratic_datum(arg, p=p, label=name)


def all_presets(primes: Sequence[int] = PRESET_PRIMES) -> list[CMDatum]:
    return [preset(name, p) for name in PRESETS for p in primes]
