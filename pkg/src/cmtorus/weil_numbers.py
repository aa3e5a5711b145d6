"""Weil numbers in CM fields, their slopes, and the alpha construction.

Imaginary quadratic fields get full support (valuations at the places above
p); cyclotomic fields only the Weil-number predicate.

Places above a split prime p are ordered (w, iota w) where w is the prime
dividing the generator ``a`` picked by :func:`alpha_construction`; this is
the same ordering the Galois-coset places use (identity coset first), so
slope vectors line up with the coordinates of W^K.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .classfield_data import cyclotomic_polynomial, prime_form
from .exact_lattice import IntMatrix, cokernel_structure, solve_integer
from .galois_cm import CMDatum, DatumError, field_discriminant, places, quadratic_d
from .serre_weil import rho_characters, serre_character_lattice, weil_character_lattice


class WeilError(ValueError):
    pass


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


def _vp(n: int, p: int) -> int:
    n = abs(n)
    k = 0
    while n % p == 0:
        n //= p
        k += 1
    return k


def _vp_frac(x: Fraction, p: int) -> int:
    return _vp(x.numerator, p) - _vp(x.denominator, p)


@dataclass(frozen=True)
class QuadraticElement:
    """x + y sqrt(d) in Q(sqrt d), d < 0 squarefree."""
    d: int
    x: Fraction
    y: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "x", _frac(self.x))
        object.__setattr__(self, "y", _frac(self.y))

    def _lift(self, other) -> "QuadraticElement":
        if isinstance(other, QuadraticElement):
            if other.d != self.d:
                raise WeilError("elements of different fields")
            return other
        return QuadraticElement(self.d, _frac(other))

    def __add__(self, other):
        o = self._lift(other)
        return QuadraticElement(self.d, self.x + o.x, self.y + o.y)

    __radd__ = __add__

    def __neg__(self):
        return QuadraticElement(self.d, -self.x, -self.y)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __mul__(self, other):
        o = self._lift(other)
        return QuadraticElement(self.d, self.x * o.x + self.d * self.y * o.y,
                                self.x * o.y + self.y * o.x)

    __rmul__ = __mul__

    def conj(self) -> "QuadraticElement":
        return QuadraticElement(self.d, self.x, -self.y)

    def norm(self) -> Fraction:
        return self.x * self.x - self.d * self.y * self.y

    def is_zero(self) -> bool:
        return self.x == 0 and self.y == 0

    def inverse(self) -> "QuadraticElement":
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("inverse of zero")
        c = self.conj()
        return QuadraticElement(self.d, c.x / n, c.y / n)

    def __truediv__(self, other):
        return self * self._lift(other).inverse()

    def __pow__(self, k: int):
        base = self if k >= 0 else self.inverse()
        out = QuadraticElement(self.d, 1)
        for _ in range(abs(k)):
            out = out * base
        return out

    def omega_coords(self) -> tuple[Fraction, Fraction]:
        """(u, v) with self = u + v omega, omega = sqrt d or (1 + sqrt d)/2."""
        if self.d % 4 == 1:
            return self.x - self.y, 2 * self.y
        return self.x, self.y

    def is_integral(self) -> bool:
        u, v = self.omega_coords()
        return u.denominator == 1 and v.denominator == 1

    def is_rational(self) -> bool:
        return self.y == 0

    def to_json(self) -> dict:
        return {"field": f"Q(sqrt({self.d}))", "x": str(self.x), "y": str(self.y)}

    def __str__(self) -> str:
        root = "i" if self.d == -1 else f"sqrt({self.d})"
        if self.y == 0:
            return str(self.x)
        yabs = abs(self.y)
        ypart = root if yabs == 1 else f"{yabs}{'' if self.d == -1 else '*'}{root}"
        if self.x == 0:
            return ("-" if self.y < 0 else "") + ypart
        return f"{self.x}{'-' if self.y < 0 else '+'}{ypart}"


def gaussian(x, y=0) -> QuadraticElement:
    return QuadraticElement(-1, x, y)


def quadratic(d: int, x, y=0) -> QuadraticElement:
    return QuadraticElement(d, x, y)


@dataclass(frozen=True)
class CyclotomicElement:
    """A polynomial in zeta_n reduced mod Phi_n, rational coefficients (lowest degree first)."""
    n: int
    coeffs: tuple

    def __post_init__(self):
        phi = cyclotomic_polynomial(self.n)
        deg = len(phi) - 1
        c = [_frac(a) for a in self.coeffs]
        for i in range(len(c) - 1, deg - 1, -1):
            top = c[i]
            if top:
                for j in range(deg + 1):
                    c[i - deg + j] -= top * phi[j]
        c = (c + [Fraction(0)] * deg)[:deg]
        object.__setattr__(self, "coeffs", tuple(c))

    @classmethod
    def zeta(cls, n: int, k: int = 1) -> "CyclotomicElement":
        c = [0] * (k % n + 1)
        c[k % n] = 1
        return cls(n, tuple(c))

    def __add__(self, other):
        o = other if isinstance(other, CyclotomicElement) else CyclotomicElement(self.n, (other,))
        m = max(len(self.coeffs), len(o.coeffs))
        a = self.coeffs + (Fraction(0),) * (m - len(self.coeffs))
        b = o.coeffs + (Fraction(0),) * (m - len(o.coeffs))
        return CyclotomicElement(self.n, tuple(x + y for x, y in zip(a, b)))

    def __mul__(self, other):
        o = other if isinstance(other, CyclotomicElement) else CyclotomicElement(self.n, (other,))
        prod = [Fraction(0)] * (len(self.coeffs) + len(o.coeffs))
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(o.coeffs):
                    prod[i + j] += a * b
        return CyclotomicElement(self.n, tuple(prod))

    def conj(self) -> "CyclotomicElement":
        """zeta -> zeta^{n-1}."""
        out = [Fraction(0)] * self.n
        for i, a in enumerate(self.coeffs):
            out[(-i) % self.n] += a
        return CyclotomicElement(self.n, tuple(out))

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def is_rational(self) -> bool:
        return not any(self.coeffs[1:])

    def rational_value(self) -> Fraction:
        if not self.is_rational():
            raise WeilError("element is not rational")
        return self.coeffs[0] if self.coeffs else Fraction(0)

    def norm(self):
        """pi * iota(pi); a Fraction when rational, else the element itself."""
        t = self * self.conj()
        return t.rational_value() if t.is_rational() else t

    def to_json(self) -> dict:
        return {"field": f"Q(zeta{self.n})", "coeffs": [str(a) for a in self.coeffs]}

    def __str__(self) -> str:
        terms = [f"{a}*z^{i}" if i else str(a) for i, a in enumerate(self.coeffs) if a]
        return " + ".join(terms) or "0"


def _prime_power_base(q: int) -> tuple[int, int]:
    if q < 2:
        raise WeilError(f"{q} is not a prime power")
    p = next(k for k in range(2, q + 1) if q % k == 0)
    n = _vp(q, p)
    if p ** n != q:
        raise WeilError(f"{q} is not a prime power")
    return p, n


@dataclass(frozen=True)
class WeilNumberCert:
    element: object
    q: int
    weight: int
    norm: Fraction
    accepted: bool = True

    def to_json(self) -> dict:
        return {"element": self.element.to_json(), "q": self.q, "weight": self.weight,
                "norm": str(self.norm), "accepted": True}


@dataclass(frozen=True)
class WeilRejection:
    element: object
    q: int
    witness: object   # the exact value of pi * iota(pi)
    reason: str
    accepted: bool = False

    def to_json(self) -> dict:
        return {"element": self.element.to_json(), "q": self.q, "witness": str(self.witness),
                "reason": self.reason, "accepted": False}


def is_weil_number(pi, q: int) -> WeilNumberCert | WeilRejection:
    """Certify pi * iota(pi) = q^m for an integer m (any sign), or reject with the witness."""
    if pi.is_zero():
        raise WeilError("zero is not a Weil number")
    p, _ = _prime_power_base(q)
    N = pi.norm()
    if not isinstance(N, Fraction):
        return WeilRejection(pi, q, N, "pi * iota(pi) is not rational")
    if N <= 0:
        return WeilRejection(pi, q, N, "pi * iota(pi) is not positive")
    v = _vp_frac(N, p)
    _, n = _prime_power_base(q)
    if v % n == 0 and Fraction(q) ** (v // n) == N:
        return WeilNumberCert(pi, q, v // n, N)
    return WeilRejection(pi, q, N, f"pi * iota(pi) = {N} is not a power of {q}")


# valuations in imaginary quadratic fields

def _require_quadratic(datum: CMDatum) -> int:
    d = quadratic_d(datum)
    if d is None:
        raise WeilError("slopes and the alpha construction need an imaginary quadratic field")
    return d


def _omega_root(d: int, p: int, k: int, r0: int) -> int:
    """Lift a simple root r0 mod p of the minimal polynomial of omega to Z/p^k."""
    if d % 4 == 1:
        f = lambda t: t * t - t - (d - 1) // 4
        df = lambda t: 2 * t - 1
    else:
        f = lambda t: t * t - d
        df = lambda t: 2 * t
    r, mod = r0 % p, p
    while mod < p ** k:
        mod = min(mod * mod, p ** k)
        r = (r - f(r) * pow(df(r), -1, mod)) % mod
    return r


def _omega_roots_mod_p(d: int, p: int) -> list[int]:
    if d % 4 == 1:
        return [t for t in range(p) if (t * t - t - (d - 1) // 4) % p == 0]
    return [t for t in range(p) if (t * t - d) % p == 0]


def _ord_split(beta: QuadraticElement, p: int, r0: int) -> int:
    """ord at the split prime (p, omega - r0) of a nonzero element."""
    u, v = beta.omega_coords()
    den = u.denominator * v.denominator
    a, b = int(u * den), int(v * den)
    bound = _vp(int(beta.norm() * den * den), p)
    k = 0
    while k < bound and (a + b * _omega_root(beta.d, p, k + 1, r0)) % p ** (k + 1) == 0:
        k += 1
    return k - _vp(den, p)


@dataclass(frozen=True)
class SplitPlaces:
    p: int
    roots: tuple     # omega mod p at (w, iota w)


@lru_cache(maxsize=None)
def _canonical_roots(d: int, p: int) -> tuple[int, int]:
    a = _search_generator(d, p)[0]
    u, v = a.omega_coords()
    roots = _omega_roots_mod_p(d, p)
    w = next(r for r in roots if (int(u) + int(v) * r) % p == 0)
    return w, next(r for r in roots if r != w)


def place_valuations(pi: QuadraticElement, datum: CMDatum) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """(ord_v(pi), ord_v(p)) for the places v above p, in coset order."""
    d = _require_quadratic(datum)
    p = datum.p
    loc = datum.local(p)
    if len(places(datum).X) == 2:
        roots = _canonical_roots(d, p)
        return tuple(_ord_split(pi, p, r) for r in roots), (1, 1)
    v = _vp_frac(pi.norm(), p)
    if loc.e == 2:
        return (v,), (2,)
    if v % 2:
        raise ArithmeticError("odd valuation of a norm at an inert prime")
    return (v // 2,), (1,)


@dataclass(frozen=True)
class SlopeReport:
    cert: WeilNumberCert
    slopes: tuple          # s_pi(v)
    local_degrees: tuple   # [K_v : Q_p]
    f: tuple               # s_pi(v) [K_v : Q_p]
    in_weil_lattice: bool

    @property
    def ordinary(self) -> bool:
        return any(s == 0 for s in self.slopes)

    def to_json(self) -> dict:
        return {"cert": self.cert.to_json(), "slopes": [str(s) for s in self.slopes],
                "local_degrees": list(self.local_degrees), "f": list(self.f),
                "in_weil_lattice": self.in_weil_lattice}


def slopes(pi: QuadraticElement, datum: CMDatum, q: int) -> SlopeReport:
    """Slope vector of a Weil q-number at the places above p = datum.p."""
    _require_quadratic(datum)
    cert = is_weil_number(pi, q)
    if not cert.accepted:
        raise WeilError(f"{pi} is not a Weil {q}-number: {cert.reason}")
    p, n = _prime_power_base(q)
    if p != datum.p:
        raise WeilError(f"q = {q} is not a power of the datum prime {datum.p}")
    ords, ord_p = place_valuations(pi, datum)
    s = tuple(Fraction(o, op * n) for o, op in zip(ords, ord_p))
    deg = datum.local_degree
    fvals = tuple(x * deg for x in s)
    if any(x.denominator != 1 for x in fvals):
        raise WeilError(f"f_pi = {[str(x) for x in fvals]} is not integral; {pi} is not in W^K")
    f = tuple(int(x) for x in fvals)
    weil = weil_character_lattice(datum)
    inside = weil.contains(list(f) + [cert.weight])
    if not inside:
        raise ArithmeticError(f"(f_pi, m) = {f, cert.weight} is not in W^K")
    return SlopeReport(cert, s, (deg,) * len(s), f, inside)


# the alpha construction

def unit_index(d: int) -> int:
    """(U(K) : U(K+)) with U(K+) = {+-1}: half the number of roots of unity."""
    return {-1: 2, -3: 3}.get(d, 1)


def _search_generator(d: int, p: int, h: int | None = None) -> tuple[QuadraticElement, int]:
    D = field_discriminant(d)
    if h is None:
        h = prime_form(D, p).order()
    target = p ** h
    bound = p ** h
    for v in range(1, bound + 1):
        for u in range(bound, -bound - 1, -1):
            if u % p == 0 and v % p == 0:
                continue
            if d % 4 == 1:
                a = QuadraticElement(d, Fraction(2 * u + v, 2), Fraction(v, 2))
            else:
                a = QuadraticElement(d, u, v)
            if a.norm() == target:
                return a, h
    raise WeilError(f"no generator of norm {p}^{h} with coefficients bounded by {bound}")


@dataclass(frozen=True)
class AlphaData:
    datum: CMDatum
    a: QuadraticElement
    h: int
    n: int
    alpha: QuadraticElement
    q: int                 # p^(2 n h f), f = 1 at a split prime
    base_exponent: int
    cert: WeilNumberCert

    def to_json(self) -> dict:
        return {"a": self.a.to_json(), "a_str": str(self.a), "h": self.h, "n": self.n,
                "alpha": self.alpha.to_json(), "alpha_str": str(self.alpha), "q": self.q,
                "base_exponent": self.base_exponent, "cert": self.cert.to_json()}


def alpha_construction(datum: CMDatum) -> AlphaData:
    """p^h = (a) for the prime p above p, n = (U(K):U(K+)), alpha = a^(2n)."""
    d = _require_quadratic(datum)
    p = datum.p
    if datum.iota_in_D():
        raise DatumError("the alpha construction needs p split (iota not in D(w))")
    a, h = _search_generator(d, p)
    n = unit_index(d)
    alpha = a ** (2 * n)
    f_res = datum.local(p).f
    e_exp = 2 * n * h * f_res
    q = p ** e_exp
    cert = is_weil_number(alpha, q)
    if not cert.accepted or cert.weight != 1:
        raise ArithmeticError("alpha is not a Weil number of weight 1")
    return AlphaData(datum, a, h, n, alpha, q, e_exp, cert)


@dataclass(frozen=True)
class CharacterValue:
    f: tuple
    value: QuadraticElement
    cert: WeilNumberCert
    slopes: SlopeReport
    rho_image: tuple
    matches_rho: bool

    def to_json(self) -> dict:
        return {"f": list(self.f), "value": str(self.value), "cert": self.cert.to_json(),
                "slopes": self.slopes.to_json(), "rho_image": list(self.rho_image),
                "matches_rho": self.matches_rho}


def evaluate_character(f, alpha: AlphaData) -> CharacterValue:
    """f(alpha) = prod over sigma of sigma(alpha)^f(sigma) for an ambient Serre character f."""
    datum = alpha.datum
    serre = serre_character_lattice(datum)
    f = tuple(int(x) for x in f)
    if len(f) != serre.ambient_dim or not serre.contains(f):
        raise WeilError(f"{list(f)} is not in X*(S^K)")
    G = datum.group
    value = QuadraticElement(alpha.alpha.d, 1)
    for s in G.elements():
        conj = alpha.alpha if s == G.identity else alpha.alpha.conj()
        value = value * conj ** f[s]
    cert = is_weil_number(value, alpha.q)
    if not cert.accepted or cert.weight != f[-1]:
        raise ArithmeticError("f(alpha) does not have weight wt(f)")
    rep = slopes(value, datum, alpha.q)
    rho = rho_characters(datum, serre)
    image = rho.apply(f)
    return CharacterValue(f, value, cert, rep, image, tuple(rep.f) + (cert.weight,) == image)


def character_span_check(datum: CMDatum, alpha: AlphaData | None = None) -> dict:
    """Evaluate every Serre basis character at alpha: each lands in W^K, agrees with rho,
    and together they generate W^K."""
    alpha = alpha or alpha_construction(datum)
    serre = serre_character_lattice(datum)
    weil = weil_character_lattice(datum)
    values = [evaluate_character(col, alpha) for col in serre.basis.columns()]
    coords = []
    for cv in values:
        vec = list(cv.slopes.f) + [cv.cert.weight]
        c = solve_integer(weil.basis, IntMatrix([[x] for x in vec], len(vec), 1))
        coords.append(c.column(0) if c is not None else None)
    in_lattice = all(c is not None for c in coords)
    spans = in_lattice and cokernel_structure(
        IntMatrix.from_columns(coords, weil.rank)).is_trivial()
    return {"in W^K": in_lattice, "matches rho": all(cv.matches_rho for cv in values),
            "generates W^K": spans}
