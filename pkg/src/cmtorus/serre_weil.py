"""Character lattices of the Serre torus S^K and the Weil-number torus P^K.

Both lattices are built as kernels inside an ambient permutation lattice
plus a weight slot:

* X*(S^K) lives in Z^G x Z: functions f on the Galois group together with a
  weight m, subject to f(s) + f(iota s) = m for every s.
* W^K lives in Z^X x Z, X the places of K above p: functions g on X with a
  weight m such that the sum of g over the places above each place y of K+
  equals n_+ * m, where n_+ is the local degree of K+ at y.

When iota is not in D(w), n_+ equals the local degree n(w) = e f.  When
iota is in D(w) every place y has a single place above it and n_+ = n(w)/2;
this keeps the real Weil number p (weight 1 for q = p^2 in an inert field)
inside the lattice and makes the map from X*(S^K) land in W^K.

The Galois group acts on Z^G by (t f)(s) = f(t^-1 s) and on Z^X through its
action on cosets; the weight is fixed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from math import gcd

from .exact_lattice import (IntMatrix, cokernel_structure, is_exact_at, kernel_basis,
                            solve_integer)
from .galois_cm import CMDatum, PlaceSet, TowerMap, places
from .tate_cohomology import GLattice


class DiagramError(ArithmeticError):
    """A diagram that must commute does not (signals a construction bug)."""


@dataclass
class CharacterLattice:
    name: str
    datum: CMDatum
    ambient_labels: list
    basis: IntMatrix              # ambient_dim x rank
    ambient_actions: tuple        # per group element, ambient_dim x ambient_dim
    constraint: IntMatrix         # ambient -> quotient lattice; lattice = kernel
    lattice: GLattice = field(init=False)

    def __post_init__(self):
        acts = []
        for a in self.ambient_actions:
            c = solve_integer(self.basis, a @ self.basis)
            if c is None:
                raise DiagramError(f"{self.name} is not stable under the Galois action")
            acts.append(c)
        self.lattice = GLattice(self.datum.group, acts, check=False)

    @property
    def rank(self) -> int:
        return self.basis.cols

    @property
    def ambient_dim(self) -> int:
        return self.basis.rows

    def contains(self, v) -> bool:
        return all(x == 0 for x in self.constraint.apply(v))

    def coordinates(self, v) -> tuple[int, ...]:
        c = solve_integer(self.basis, IntMatrix([[x] for x in v], len(v), 1))
        if c is None:
            raise ValueError(f"{list(v)} is not in {self.name}")
        return c.column(0)

    def element(self, coords) -> tuple[int, ...]:
        return self.basis.apply(coords)

    def weight(self, v) -> int:
        return v[-1]

    def functional_on_basis(self, ambient_functional) -> tuple[Fraction, ...]:
        """Values of an ambient linear functional on the lattice basis."""
        return tuple(sum((Fraction(a) * b for a, b in zip(ambient_functional, col)), Fraction(0))
                     for col in self.basis.columns())

    def to_json(self) -> dict:
        return {"name": self.name, "rank": self.rank,
                "ambient": [str(x) for x in self.ambient_labels],
                "basis": self.basis.T.tolist(),
                "action": {str(self.datum.group.labels[g]): self.lattice.actions[g].tolist()
                           for g in self.datum.group.elements()}}


def _perm_matrix(n: int, image) -> list[list[int]]:
    m = [[0] * n for _ in range(n)]
    for i in range(n):
        m[image(i)][i] = 1
    return m


def _with_weight(m: list[list[int]]) -> IntMatrix:
    n = len(m)
    return IntMatrix([row + [0] for row in m] + [[0] * n + [1]], n + 1, n + 1)


def iota_orbits(datum: CMDatum) -> list[tuple[int, int]]:
    G = datum.group
    return [(s, G.mul(datum.iota, s)) for s in G.elements() if s < G.mul(datum.iota, s)]


def serre_constraint(datum: CMDatum) -> IntMatrix:
    """Z^G x Z -> Z^{G/<iota>}, (f, m) -> f(s) + f(iota s) - m."""
    n = datum.group.order
    rows = []
    for s, t in iota_orbits(datum):
        r = [0] * (n + 1)
        r[s] += 1
        r[t] += 1
        r[n] = -1
        rows.append(r)
    return IntMatrix(rows, len(rows), n + 1)


def _serre_ambient_actions(datum: CMDatum) -> tuple:
    G = datum.group
    n = G.order
    return tuple(_with_weight(_perm_matrix(n, lambda s, t=t: G.mul(t, s))) for t in G.elements())


def serre_character_lattice(datum: CMDatum) -> CharacterLattice:
    E = serre_constraint(datum)
    B = kernel_basis(E)
    labels = [datum.group.labels[s] for s in datum.group.elements()] + ["wt"]
    return CharacterLattice("X*(S^K)", datum, labels, B, _serre_ambient_actions(datum), E)


def serre_sequence_exact(datum: CMDatum, lat: CharacterLattice | None = None) -> bool:
    """0 -> X*(S^K) -> Z^G x Z -> Z^{G/<iota>} -> 0 is exact."""
    lat = lat or serre_character_lattice(datum)
    E = lat.constraint
    B = lat.basis
    return (is_exact_at(IntMatrix.zeros(B.cols, 0), B) and is_exact_at(B, E)
            and cokernel_structure(E).is_trivial())


def _x_actions(datum: CMDatum, ps: PlaceSet) -> tuple:
    G = datum.group
    k = len(ps.X)
    return tuple(_with_weight(_perm_matrix(k, lambda i, t=t: ps.x_index(G.mul(t, min(ps.X[i])))))
                 for t in G.elements())


def weil_constraint(datum: CMDatum, ps: PlaceSet | None = None) -> IntMatrix:
    """Z^X x Z -> Z^Y, (g, m) -> (sum of g over the places above y) - n_+ m."""
    ps = ps or places(datum)
    k = len(ps.X)
    n_plus = datum.plus_local_degree()
    rows = []
    for y in range(len(ps.Y)):
        r = [0] * (k + 1)
        for x in ps.fiber(y):
            r[x] = 1
        r[k] = -n_plus
        rows.append(r)
    return IntMatrix(rows, len(rows), k + 1)


def weil_character_lattice(datum: CMDatum) -> CharacterLattice:
    ps = places(datum)
    E = weil_constraint(datum, ps)
    B = kernel_basis(E)
    labels = [f"v{i}" for i in range(len(ps.X))] + ["wt"]
    return CharacterLattice("W^K", datum, labels, B, _x_actions(datum, ps), E)


def weil_sequence_exact(datum: CMDatum, lat: CharacterLattice | None = None) -> bool:
    """0 -> W^K -> Z^X x Z -> Z^Y -> 0 is exact."""
    lat = lat or weil_character_lattice(datum)
    B, E = lat.basis, lat.constraint
    return (is_exact_at(IntMatrix.zeros(B.cols, 0), B) and is_exact_at(B, E)
            and cokernel_structure(E).is_trivial())


def torus_presentation_map(datum: CMDatum) -> IntMatrix:
    """Character map of the torus presentation of P^K built from the tori
    themselves: restriction of characters along the inclusion of the norm
    tori of the decomposition field and its real subfield, Z[G/D] -> Z[G/D<iota>],
    joined with -n_+ times the norm character on the weight slot."""
    G = datum.group
    D = datum.D_p
    X = G.left_cosets(D)
    Y = G.left_cosets(G.closure(list(D) + [datum.iota]))
    res = [[int(x <= y) for x in X] for y in Y]
    n_plus = datum.plus_local_degree()
    return IntMatrix([r + [-n_plus] for r in res], len(Y), len(X) + 1)


def torus_presentation_exact(datum: CMDatum, lat: CharacterLattice | None = None) -> bool:
    """The presentation sequence is exact and cuts out the same lattice as W^K."""
    lat = lat or weil_character_lattice(datum)
    M = torus_presentation_map(datum)
    K = kernel_basis(M)
    same = (solve_integer(K, lat.basis) is not None and solve_integer(lat.basis, K) is not None)
    return (same and is_exact_at(IntMatrix.zeros(K.cols, 0), K) and is_exact_at(K, M)
            and cokernel_structure(M).is_trivial())


@dataclass
class RhoMap:
    serre: CharacterLattice
    weil: CharacterLattice
    ambient: IntMatrix   # Z^G x Z -> Z^X x Z
    matrix: IntMatrix    # lattice coordinates
    left: IntMatrix      # Z^{G/<iota>} -> Z^Y

    @property
    def cokernel(self):
        return cokernel_structure(self.matrix)

    @property
    def surjective(self) -> bool:
        return self.cokernel.is_trivial()

    def diagram_commutes(self) -> bool:
        """Both squares of the map between the two presentations commute."""
        s, w = self.serre, self.weil
        right = w.constraint @ self.ambient == self.left @ s.constraint
        middle = w.basis @ self.matrix == self.ambient @ s.basis
        return right and middle

    def equivariant(self) -> bool:
        s, w = self.serre.lattice, self.weil.lattice
        return all(self.matrix @ s.actions[g] == w.actions[g] @ self.matrix
                   for g in self.serre.datum.group.elements())

    def apply(self, f) -> tuple[int, ...]:
        """Image in Z^X x Z of an ambient Serre character f."""
        return self.ambient.apply(f)


def rho_characters(datum: CMDatum, serre: CharacterLattice | None = None,
                   weil: CharacterLattice | None = None) -> RhoMap:
    """X*(S^K) -> W^K: sum f over each coset sigma D(w), keep the weight."""
    serre = serre or serre_character_lattice(datum)
    weil = weil or weil_character_lattice(datum)
    ps = places(datum)
    G = datum.group
    n, k = G.order, len(ps.X)
    amb = [[0] * (n + 1) for _ in range(k + 1)]
    for s in G.elements():
        amb[ps.x_index(s)][s] = 1
    amb[k][n] = 1
    ambient = IntMatrix(amb, k + 1, n + 1)
    orbits = iota_orbits(datum)
    left = IntMatrix([[int(ps.y_index(s) == y) for s, _ in orbits] for y in range(len(ps.Y))],
                     len(ps.Y), len(orbits))
    mat = solve_integer(weil.basis, ambient @ serre.basis)
    if mat is None:
        raise DiagramError("rho does not land in W^K")
    rho = RhoMap(serre, weil, ambient, mat, left)
    if not rho.diagram_commutes():
        raise DiagramError("presentation diagram for rho does not commute")
    return rho


@dataclass(frozen=True)
class RationalCocharacter:
    name: str
    values: tuple        # values on the lattice basis (Fractions)
    ambient: tuple       # ambient functional (Fractions)

    @property
    def denominator(self) -> int:
        return reduce(lambda a, b: a * b // gcd(a, b), (v.denominator for v in self.values), 1)

    @property
    def is_integral(self) -> bool:
        return self.denominator == 1

    def pair(self, v) -> Fraction:
        """Pairing with an ambient vector."""
        return sum((Fraction(a) * b for a, b in zip(self.ambient, v)), Fraction(0))

    def to_json(self) -> dict:
        return {"name": self.name, "values": [str(v) for v in self.values],
                "denominator": self.denominator}


@dataclass
class Cocharacters:
    w_can: RationalCocharacter
    mu_can: RationalCocharacter
    x_p: RationalCocharacter
    x_inf: RationalCocharacter
    x_p_weil: RationalCocharacter
    checks: dict

    def as_dict(self) -> dict:
        return {"w_can": self.w_can, "mu_can": self.mu_can, "x_p": self.x_p, "x_inf": self.x_inf}


def cocharacters(datum: CMDatum, serre: CharacterLattice | None = None,
                 weil: CharacterLattice | None = None) -> Cocharacters:
    """w_can, mu_can, x_p and x_inf on X*(S^K), plus x_p on W^K, with their relations checked."""
    serre = serre or serre_character_lattice(datum)
    weil = weil or weil_character_lattice(datum)
    G = datum.group
    n = G.order
    D = datum.D_p

    def make(name, amb, lat=serre):
        amb = tuple(Fraction(x) for x in amb)
        return RationalCocharacter(name, lat.functional_on_basis(amb), amb)

    w_can = make("w_can", [0] * n + [1])
    mu = [0] * (n + 1)
    mu[G.identity] = 1
    mu_can = make("mu_can", mu)
    xp = [Fraction(0)] * (n + 1)
    for s in D:
        xp[s] = Fraction(1, len(D))
    x_p = make("x_p", xp)
    # iota acting on mu_can: (iota mu)(f) = mu(iota^-1 f) = f(iota)
    iota_mu = [0] * (n + 1)
    iota_mu[datum.iota] = 1
    x_inf = make("x_inf", [a + b for a, b in zip(mu, iota_mu)])

    k = len(places(datum).X)
    xpw = [Fraction(0)] * (k + 1)
    xpw[0] = Fraction(1, len(D))
    x_p_weil = make("x_p on W^K", xpw, weil)

    rho = rho_characters(datum, serre, weil)
    through_rho = tuple(sum((x_p_weil.values[i] * rho.matrix[i, j] for i in range(weil.rank)),
                            Fraction(0)) for j in range(serre.rank))
    checks = {
        "x_inf == w_can": x_inf.values == w_can.values,
        "x_p denominator divides |D|": len(D) % x_p.denominator == 0,
        "x_p on W^K denominator divides |D|": len(D) % x_p_weil.denominator == 0,
        "x_p factors through rho": through_rho == x_p.values,
        "w_can, mu_can, x_inf integral": w_can.is_integral and mu_can.is_integral and x_inf.is_integral,
    }
    if len(D) == n:
        checks["x_p == w_can / 2"] = all(a == b / 2 for a, b in zip(x_p.values, w_can.values))
    return Cocharacters(w_can, mu_can, x_p, x_inf, x_p_weil, checks)


@dataclass
class WeilTransition:
    tower: TowerMap
    small: CharacterLattice
    large: CharacterLattice
    ambient: IntMatrix   # Z^X x Z -> Z^X' x Z
    matrix: IntMatrix    # lattice coordinates
    right: IntMatrix     # Z^Y -> Z^Y'

    def diagram_commutes(self) -> bool:
        return (self.large.constraint @ self.ambient == self.right @ self.small.constraint
                and self.large.basis @ self.matrix == self.ambient @ self.small.basis)

    def equivariant(self) -> bool:
        phi = self.tower.surjection
        s, l = self.small.lattice, self.large.lattice
        return all(self.matrix @ s.actions[phi[g]] == l.actions[g] @ self.matrix
                   for g in self.tower.large.group.elements())


def transition_weil(tower: TowerMap) -> WeilTransition:
    """W^K -> W^K': g'(v') = [K'_w:K_w] g(image of v'), weight kept.

    The matching map on Z^Y -> Z^Y' is (n'_+/n_+) times pull-back along
    Y' -> Y, where n_+ is the local degree of the real subfield; this is the
    local degree [K'_w:K_w] whenever iota lies in both or neither
    decomposition group.
    """
    small = weil_character_lattice(tower.small)
    large = weil_character_lattice(tower.large)
    d = tower.local_degree_at_p
    xmap = tower.place_map()
    ymap = tower.plus_place_map()
    k, k2 = small.ambient_dim - 1, large.ambient_dim - 1
    amb = [[0] * (k + 1) for _ in range(k2 + 1)]
    for i, j in enumerate(xmap):
        amb[i][j] = d
    amb[k2][k] = 1
    ambient = IntMatrix(amb, k2 + 1, k + 1)
    c = tower.large.plus_local_degree() // tower.small.plus_local_degree()
    ny = small.constraint.rows
    right = IntMatrix([[c * int(ymap[i] == j) for j in range(ny)] for i in range(len(ymap))],
                      len(ymap), ny)
    mat = solve_integer(large.basis, ambient @ small.basis)
    if mat is None:
        raise DiagramError("transition does not map W^K into W^K'")
    tr = WeilTransition(tower, small, large, ambient, mat, right)
    if not tr.diagram_commutes():
        raise DiagramError("transition diagram does not commute")
    return tr


@dataclass
class WeightSplit:
    weight_zero_basis: IntMatrix   # lattice coordinates, columns
    complement: tuple              # lattice coordinates of the weight line generator
    weight_index: int              # generator of the weight image
    splits: bool                   # Z-module direct sum verified
    equivariant: bool              # a Galois-invariant complement exists
    note: str = ""

    def to_json(self) -> dict:
        return {"weight_zero_rank": self.weight_zero_basis.cols, "complement": list(self.complement),
                "weight_index": self.weight_index, "splits": self.splits,
                "equivariant": self.equivariant, "note": self.note}


def weight_split(datum: CMDatum, weil: CharacterLattice | None = None) -> WeightSplit:
    """Split W^K into weight-zero characters plus a weight line.

    ``splits`` is the Z-module statement (checked by a unimodular change of
    basis); ``equivariant`` records whether the complement can be chosen
    Galois-stable, i.e. P^K = P_0^K x G_m as tori at this level.
    """
    weil = weil or weil_character_lattice(datum)
    wt = IntMatrix([[weil.basis[weil.ambient_dim - 1, j] for j in range(weil.rank)]], 1, weil.rank)
    W0 = kernel_basis(wt)
    g = reduce(gcd, wt.row(0), 0)
    if g == 0:
        return WeightSplit(W0, (), 0, False, False, "weight functional vanishes")
    # a vector of weight g: solve wt x = g
    x = solve_integer(wt, IntMatrix([[g]]))
    comp = x.column(0)
    full = IntMatrix.hstack(W0, IntMatrix.from_columns([comp], weil.rank))
    splits = abs(full.det()) == 1
    lat = weil.lattice
    k = weil.rank
    inv_rows = IntMatrix.vstack(*[lat.actions[s] - IntMatrix.identity(k)
                                  for s in datum.group.elements()])
    inv = kernel_basis(inv_rows)
    inv_weights = [sum(wt[0, i] * inv[i, j] for i in range(k)) for j in range(inv.cols)]
    equivariant = reduce(gcd, inv_weights, 0) == g
    note = "" if equivariant else "no Galois-invariant character of minimal weight at this level"
    return WeightSplit(W0, comp, g, splits, equivariant, note)


def verify_lattices(datum: CMDatum) -> dict:
    """Every lattice-level statement for one datum, as name -> bool."""
    serre = serre_character_lattice(datum)
    weil = weil_character_lattice(datum)
    ps = places(datum)
    rho = rho_characters(datum, serre, weil)
    co = cocharacters(datum, serre, weil)
    out = {
        "serre rank = |G|/2 + 1": serre.rank == datum.group.order // 2 + 1,
        "weil rank = |X| + 1 - |Y|": weil.rank == len(ps.X) + 1 - len(ps.Y),
        "serre sequence exact": serre_sequence_exact(datum, serre),
        "weil sequence exact": weil_sequence_exact(datum, weil),
        "torus presentation exact": torus_presentation_exact(datum, weil),
        "rho surjective": rho.surjective,
        "rho diagram commutes": rho.diagram_commutes(),
        "rho equivariant": rho.equivariant(),
    }
    if ps.iota_in_D:
        out["iota in D gives W^K = Z"] = weil.rank == 1
    out.update(co.checks)
    return out
