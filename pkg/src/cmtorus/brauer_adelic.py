"""Brauer groups through local invariants, and H^1 of S^K and P^K.

Brauer groups are never materialized.  An element of Br(F) is a finitely
supported vector of local invariants in Q/Z (real places in 1/2 Z/Z,
complex places 0) with total sum 0.  Restriction multiplies each invariant
by the local degree, corestriction sums over the places above.

H^1(Q, T) for T = S^K or P^K is modelled as the kernel of

    Br(F+) --(Res, c Cor)--> Br(F) + Br(Q)

with (F, F+, c) = (K, K+, 1) for S^K and (K(w), K(w)+, n_+) for P^K.  All
of these kernels are finite subgroups of (Q/Z)^places and are computed by
Smith normal form; global and adelic versions differ only by the
reciprocity row.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .exact_lattice import AbGroupStructure, IntMatrix, qz_kernel, qz_solvable
from .galois_cm import INF, CMDatum, TowerMap
from .tate_cohomology import GModule, local_torus_cohomology


class BrauerError(ValueError):
    pass


class ProbeSetError(BrauerError):
    pass


@dataclass(frozen=True)
class Field:
    """The subfield K^H of the CM field of ``datum``."""
    datum: CMDatum
    subgroup: frozenset
    tag: str = ""

    def __post_init__(self):
        if not self.datum.group.is_subgroup(self.subgroup):
            raise BrauerError("field must be given by a subgroup")

    def __eq__(self, other):
        return (isinstance(other, Field) and other.datum is self.datum
                and other.subgroup == self.subgroup)

    def __hash__(self):
        return hash((id(self.datum), self.subgroup))

    @property
    def degree(self) -> int:
        return self.datum.group.order // len(self.subgroup)

    def places(self, ell) -> list[frozenset]:
        """Places above ell as double cosets H sigma D_ell."""
        return self.datum.group.double_cosets(self.subgroup, self.datum.decomposition(ell))

    def local_degree(self, ell, index: int) -> int:
        return len(self.places(ell)[index]) // len(self.subgroup)

    def is_real(self, index: int) -> bool:
        return self.local_degree(INF, index) == 1

    def contains(self, other: "Field") -> bool:
        """K^H contains K^H' iff H is inside H'."""
        return other.datum is self.datum and self.subgroup <= other.subgroup

    def name(self) -> str:
        return self.tag or f"K^{sorted(self.subgroup)}"


def standard_fields(datum: CMDatum) -> dict[str, Field]:
    G = datum.group
    D = datum.D_p
    iota = datum.iota_subgroup
    return {
        "Q": Field(datum, frozenset(G.elements()), "Q"),
        "K": Field(datum, frozenset({G.identity}), "K"),
        "K+": Field(datum, iota, "K+"),
        "K(w)": Field(datum, frozenset(D), "K(w)"),
        "K(w)+": Field(datum, G.closure(list(D) + [datum.iota]), "K(w)+"),
    }


Place = tuple  # (ell, index)


@dataclass(frozen=True)
class BrauerElement:
    field: Field
    invariants: Mapping  # (ell, index) -> Fraction in [0, 1)

    def __post_init__(self):
        inv = {}
        for (ell, idx), v in dict(self.invariants).items():
            v = Fraction(v) % 1
            nplaces = len(self.field.places(ell))
            if not (0 <= idx < nplaces):
                raise BrauerError(f"no place {idx} above {ell}")
            if ell == INF:
                if not self.field.is_real(idx) and v:
                    raise BrauerError("complex places carry invariant 0")
                if 2 * v % 1:
                    raise BrauerError("real places carry invariants in 1/2 Z/Z")
            if v:
                inv[(ell, idx)] = v
        object.__setattr__(self, "invariants", inv)
        if sum(inv.values(), Fraction(0)) % 1:
            raise BrauerError("invariants must sum to 0 (reciprocity)")

    def invariant(self, place: Place) -> Fraction:
        return self.invariants.get(place, Fraction(0))

    def support(self) -> list:
        return sorted(self.invariants, key=lambda pl: (pl[0] == INF, str(pl[0]), pl[1]))

    def is_zero(self) -> bool:
        return not self.invariants

    def __add__(self, other: "BrauerElement") -> "BrauerElement":
        if other.field != self.field:
            raise BrauerError("elements live in different Brauer groups")
        keys = set(self.invariants) | set(other.invariants)
        return BrauerElement(self.field, {k: self.invariant(k) + other.invariant(k) for k in keys})

    def scale(self, k: int) -> "BrauerElement":
        return BrauerElement(self.field, {pl: k * v for pl, v in self.invariants.items()})

    def to_json(self) -> dict:
        return {"field": self.field.name(),
                "invariants": {f"{ell}:{i}": str(v) for (ell, i), v in
                               sorted(self.invariants.items(), key=lambda kv: str(kv[0]))}}


def random_brauer_element(field: Field, rng, max_den: int = 12, max_support: int = 4) -> BrauerElement:
    """A random element of Br(field) supported on the primes of its datum.

    The last finite place absorbs the total so that reciprocity holds.
    """
    finite = [(ell, i) for ell in field.datum.primes() for i, _ in enumerate(field.places(ell))]
    real = [(INF, i) for i, _ in enumerate(field.places(INF)) if field.is_real(i)]
    support = rng.sample(finite, min(len(finite), rng.randint(2, max_support)))
    inv = {pl: Fraction(rng.randrange(max_den), rng.randint(1, max_den)) for pl in support[:-1]}
    for pl in real:
        if rng.random() < 0.3:
            inv[pl] = Fraction(1, 2)
    inv[support[-1]] = -sum(inv.values(), Fraction(0))
    return BrauerElement(field, inv)


def _place_over(small: Field, large: Field, ell, index: int, phi=None) -> int:
    """Index of the place of ``small`` below place ``index`` of ``large``."""
    sigma = min(large.places(ell)[index])
    if phi is not None:
        sigma = phi[sigma]
    return next(i for i, c in enumerate(small.places(ell)) if sigma in c)


def restriction(elt: BrauerElement, target: Field) -> BrauerElement:
    """Res from F to a larger field E: inv_w = [E_w : F_v] inv_v."""
    F = elt.field
    if not target.contains(F):
        raise BrauerError(f"{target.name()} does not contain {F.name()}")
    out = {}
    for (ell, i), v in elt.invariants.items():
        dv = F.local_degree(ell, i)
        for j, _ in enumerate(target.places(ell)):
            if _place_over(F, target, ell, j) == i:
                out[(ell, j)] = out.get((ell, j), 0) + v * (target.local_degree(ell, j) // dv)
    res = BrauerElement(target, out)
    return res


def corestriction(elt: BrauerElement, target: Field, phi: Sequence[int] | None = None) -> BrauerElement:
    """Cor from E down to a smaller field F: inv_v = sum of inv_w over w | v.

    ``phi`` (a tower surjection) allows F to belong to a smaller datum.
    """
    E = elt.field
    if phi is None and not E.contains(target):
        raise BrauerError(f"{E.name()} does not contain {target.name()}")
    if phi is not None:
        image = frozenset(phi[x] for x in E.subgroup)
        if not image <= target.subgroup:
            raise BrauerError(f"{E.name()} does not contain {target.name()}")
    out: dict = {}
    for (ell, j), v in elt.invariants.items():
        i = _place_over(target, E, ell, j, phi)
        out[(ell, i)] = out.get((ell, i), 0) + v
    return BrauerElement(target, out)


def lift_field(tower: TowerMap, F: Field) -> Field:
    """The same field viewed inside the larger CM field of the tower."""
    pre = frozenset(g for g in tower.large.group.elements() if tower.surjection[g] in F.subgroup)
    return Field(tower.large, pre, F.tag)


# H^1 of the Serre and Weil tori


def _probe_default(datum: CMDatum) -> list:
    return sorted(set([datum.p] + datum.ramified_primes())) + [INF]


def _check_probe(datum: CMDatum, probe: Iterable) -> list:
    probe = list(probe)
    for ell in probe:
        if ell != INF and ell not in datum.local_data:
            raise ProbeSetError(f"no local data at {ell}")
    missing = [x for x in [datum.p, INF] + datum.ramified_primes() if x not in probe]
    if missing:
        raise ProbeSetError(f"probe set must contain p, inf and the ramified primes; missing {missing}")
    finite = sorted(x for x in probe if x != INF)
    return finite + ([INF] if INF in probe else [])


@dataclass
class H1Model:
    which: str
    big: Field
    small: Field
    c: int
    places: list            # list of (ell, index) of the small field
    local_rows: IntMatrix   # per place: kernel of Res and the local Brauer group
    cor_rows: IntMatrix     # per prime: c * sum over places above it
    global_kernel: object
    adelic_kernel: object

    def matrix(self, with_reciprocity: bool) -> IntMatrix:
        mats = [self.local_rows, self.cor_rows]
        if with_reciprocity:
            mats.append(IntMatrix([[1] * len(self.places)], 1, len(self.places)))
        return IntMatrix.vstack(*mats)

    def element(self, vec) -> BrauerElement:
        return BrauerElement(self.small, {pl: v for pl, v in zip(self.places, vec) if v % 1})

    def global_elements(self) -> list[BrauerElement]:
        return [self.element(v) for v in self.global_kernel.elements()]


def h1_model(datum: CMDatum, which: str, probe: Iterable | None = None) -> H1Model:
    fields = standard_fields(datum)
    if which == "S":
        big, small, c = fields["K"], fields["K+"], 1
    elif which == "P":
        big, small, c = fields["K(w)"], fields["K(w)+"], datum.plus_local_degree()
    else:
        raise BrauerError("which must be 'S' or 'P'")
    probe = _check_probe(datum, _probe_default(datum) if probe is None else probe)
    pls, local, cor = [], [], []
    for ell in probe:
        start = len(pls)
        for i, _ in enumerate(small.places(ell)):
            pls.append((ell, i))
            # [F_w : F+_u] for any w above u (Galois: all equal)
            j = next(j for j, _ in enumerate(big.places(ell)) if _place_over(small, big, ell, j) == i)
            d = big.local_degree(ell, j) // small.local_degree(ell, i)
            local.append((len(pls) - 1, d))
            if ell == INF:
                local.append((len(pls) - 1, 2 if small.is_real(i) else 1))
        cor.append((start, len(pls), c))
    k = len(pls)
    lrows = [[d if col == pos else 0 for col in range(k)] for pos, d in local]
    crows = [[c if a <= col < b else 0 for col in range(k)] for a, b, c in cor]
    L = IntMatrix(lrows, len(lrows), k)
    C = IntMatrix(crows, len(crows), k)
    model = H1Model(which, big, small, c, pls, L, C, None, None)
    model.global_kernel = qz_kernel(model.matrix(True))
    model.adelic_kernel = qz_kernel(model.matrix(False))
    return model


@dataclass
class TorusH2Report:
    which: str
    fields: tuple
    local_degrees: dict
    global_h1: AbGroupStructure
    adelic_h1: AbGroupStructure
    hasse_cokernel: AbGroupStructure
    injective: bool
    bijective: bool
    model: H1Model = field(repr=False)

    def to_json(self) -> dict:
        return {"which": self.which, "fields": list(self.fields),
                "local_degrees": {f"{k[0]}:{k[1]}": v for k, v in self.local_degrees.items()},
                "global_h1": str(self.global_h1), "adelic_h1": str(self.adelic_h1),
                "hasse_cokernel": str(self.hasse_cokernel), "injective": self.injective,
                "bijective": self.bijective}


def torus_h2_sequence(datum: CMDatum, which: str, probe: Iterable | None = None) -> TorusH2Report:
    """H^1(Q, T) and H^1(A, T) as kernels of (Res, c Cor) on invariant vectors."""
    m = h1_model(datum, which, probe)
    g, a = m.global_kernel, m.adelic_kernel
    if not (g.is_finite and a.is_finite):
        raise BrauerError("kernel model is not finite; local data incomplete")
    # global classes sit inside the adelic ones; the quotient is cyclic (a subgroup of Q/Z)
    # the localization map is the inclusion of invariant vectors; check it lands in the adelic kernel
    adelic = m.matrix(False)
    injective = all(all(sum((Fraction(a) * x for a, x in zip(row, vec)), Fraction(0)) % 1 == 0
                        for row in adelic.tolist()) for vec in g.generators)
    coker = AbGroupStructure.cyclic(a.order // g.order)
    degs = {pl: m.small.local_degree(*pl) for pl in m.places}
    return TorusH2Report(which, (m.big.name(), m.small.name()), degs, g.structure, a.structure,
                         coker, injective, coker.is_trivial(), m)


def h2_arises_globally(datum: CMDatum, which: str, b_big: BrauerElement, b_q: BrauerElement,
                       probe: Iterable | None = None) -> bool:
    """Is (b_big, b_q) in the image of Br(F+) -> Br(F) + Br(Q), i.e. zero in H^2(Q, T)?"""
    m = h1_model(datum, which, probe)
    Q = standard_fields(datum)["Q"]
    if b_big.field != m.big or b_q.field != Q:
        raise BrauerError("elements must live in Br(F) and Br(Q)")
    for pl in list(b_big.invariants) + list(b_q.invariants):
        if pl[0] not in {p for p, _ in m.places}:
            raise BrauerError(f"element is supported at {pl[0]}, outside the probe set")
    rows, target = [], []
    k = len(m.places)
    for ell in sorted({p for p, _ in m.places}, key=lambda x: (x == INF, str(x))):
        idx = [t for t, pl in enumerate(m.places) if pl[0] == ell]
        for j, _ in enumerate(m.big.places(ell)):
            i = _place_over(m.small, m.big, ell, j)
            t = m.places.index((ell, i))
            d = m.big.local_degree(ell, j) // m.small.local_degree(ell, i)
            rows.append([d if col == t else 0 for col in range(k)])
            target.append(b_big.invariant((ell, j)))
        for i in idx:
            if ell == INF:
                rows.append([2 if col == i else 0 for col in range(k)])
                target.append(Fraction(0))
        rows.append([m.c if col in idx else 0 for col in range(k)])
        target.append(b_q.invariant((ell, 0)))
    rows.append([1] * k)
    target.append(Fraction(0))
    return qz_solvable(IntMatrix(rows, len(rows), k), target)


@dataclass
class HasseCokernel:
    structure: AbGroupStructure
    local_degree: int
    note: str = ""
    cross_check: bool | None = None


def hasse_cokernel_P(datum: CMDatum, cross_check: bool = True) -> HasseCokernel:
    """Cokernel of H^1(Q, P^K) -> H^1(A, P^K).

    Computed by the snake lemma for x -> (2x, n x) on Q/Z (real places
    versus the p-adic local degree n = n(w)); the kernel of that map is
    Z/gcd(2, n).  When iota lies in D(w), P^K = G_m and the answer is 0.
    """
    n = datum.local_degree
    if datum.iota_in_D():
        res = HasseCokernel(AbGroupStructure(), n, "iota in D(w): P^K = G_m, H^1 vanishes")
    else:
        k = qz_kernel(IntMatrix([[2], [n]]))
        res = HasseCokernel(k.structure, n)
    if cross_check:
        res.cross_check = torus_h2_sequence(datum, "P").hasse_cokernel == res.structure
    return res


@dataclass
class TransitionVanishing:
    vanishes: bool
    local_degree: int
    plus_degree: int
    image_order: int
    target_order: int
    images: list

    @property
    def rule(self) -> bool:
        """Expected vanishing: even local degree, or nothing to hit."""
        return self.local_degree % 2 == 0 or self.target_order == 1

    @property
    def matches_rule(self) -> bool:
        if self.local_degree % 2 == 0:
            return self.vanishes
        # odd degree: the map is onto the global group
        return self.image_order == self.target_order and self.vanishes == (self.target_order == 1)


def _generated_order(vectors: list) -> int:
    """Order of the subgroup of (Q/Z)^k generated by the given vectors."""
    if not vectors:
        return 1
    k = len(vectors[0])
    seen = {tuple(Fraction(0) for _ in range(k))}
    frontier = list(seen)
    while frontier:
        x = frontier.pop()
        for v in vectors:
            y = tuple((a + b) % 1 for a, b in zip(x, v))
            if y not in seen:
                seen.add(y)
                frontier.append(y)
    return len(seen)


def transition_vanishing(tower: TowerMap, probe: Iterable | None = None) -> TransitionVanishing:
    """Apply b = d_+ Cor (the norm power on K'(w)+) to H^1(Q, P^K') and test for zero."""
    small, large = tower.small, tower.large
    if small.iota_in_D():
        raise BrauerError("iota lies in D(w) for the smaller field; P^K = G_m")
    if probe is None:
        probe = sorted(set(_probe_default(small)[:-1] + _probe_default(large)[:-1])) + [INF]
    m_large = h1_model(large, "P", probe)
    m_small = h1_model(small, "P", probe)
    target = m_small.small
    d_plus = tower.plus_local_degree_at_p
    images = []
    for g in m_large.global_kernel.generators:
        elt = m_large.element(g)
        images.append(corestriction(elt, target, tower.surjection).scale(d_plus))
    vanishes = all(x.is_zero() for x in images)
    vecs = [tuple(x.invariant(pl) for pl in m_small.places) for x in images]
    return TransitionVanishing(vanishes, tower.local_degree_at_p, d_plus, _generated_order(vecs),
                               m_small.global_kernel.order, images)


@dataclass
class AdelicSum:
    summands: dict
    structure: AbGroupStructure
    omitted_nonzero: list


def adelic_sum(datum: CMDatum, charlattice: GModule, r: int, probe: Iterable,
               strict: bool = True) -> AdelicSum:
    """Direct sum of the local groups H^r(Q_ell, T) over the probe set.

    Every prime of the datum outside the probe set is examined; with
    ``strict`` a nonzero contribution there raises ProbeSetError.  The empty
    probe set is the empty sum.
    """
    probe = list(probe)
    summands = {}
    total = AbGroupStructure()
    for ell in probe:
        if ell != INF and ell not in datum.local_data:
            raise ProbeSetError(f"no local data at {ell}")
        s = local_torus_cohomology(datum, ell, charlattice, r)
        summands[ell] = s
        total = total + s
    omitted = []
    if probe:
        for ell in datum.primes() + [INF]:
            if ell not in probe and not local_torus_cohomology(datum, ell, charlattice, r).is_trivial():
                omitted.append(ell)
        if omitted and strict:
            raise ProbeSetError(f"probe set omits places with nonzero contribution: {omitted}")
    return AdelicSum(summands, total, omitted)
