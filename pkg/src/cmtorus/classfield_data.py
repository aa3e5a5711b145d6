"""Class groups of imaginary quadratic fields, relative class numbers of
Q(zeta_l), and irregular primes.

* Class groups come from reduced primitive positive definite binary
  quadratic forms under Gaussian composition.
* h^-(Q(zeta_l)) for a prime l is w * prod over odd characters chi of
  (-B_{1,chi} / 2) with w = 2l.  The product is evaluated exactly in
  Z[zeta_{l-1}]; a second route evaluates every B_{1,chi} in finite fields
  F_P with P = 1 mod (l-1) and recovers h^- by the Chinese remainder theorem.
* Irregular primes come from exact Bernoulli numbers, whose denominators are
  checked against the von Staudt-Clausen theorem.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb, gcd, isqrt

from .exact_lattice import AbGroupStructure, structure_from_kill_counts

HMINUS_CAP = 103
IRREGULAR_CAP = 400


class ClassFieldError(ValueError):
    pass


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    k = 3
    while k * k <= n:
        if n % k == 0:
            return False
        k += 2
    return True


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    """(g, x, y) with a x + b y = g = gcd(a, b) >= 0."""
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


# binary quadratic forms

@dataclass(frozen=True)
class QuadForm:
    a: int
    b: int
    c: int

    @property
    def discriminant(self) -> int:
        return self.b * self.b - 4 * self.a * self.c

    def is_reduced(self) -> bool:
        a, b, c = self.a, self.b, self.c
        if not (abs(b) <= a <= c):
            return False
        if (abs(b) == a or a == c) and b < 0:
            return False
        return True

    def is_primitive(self) -> bool:
        return gcd(gcd(self.a, self.b), self.c) == 1

    def reduce(self) -> "QuadForm":
        a, b, c = self.a, self.b, self.c
        if a <= 0 or b * b - 4 * a * c >= 0:
            raise ClassFieldError("only positive definite forms are reduced here")
        while True:
            # bring b into (-a, a]
            if not (-a < b <= a):
                k = (a - b) // (2 * a)
                b, c = b + 2 * k * a, a * k * k + b * k + c
            if a > c:
                a, b, c = c, -b, a
                continue
            if a == c and b < 0:
                b = -b
            return QuadForm(a, b, c)

    def inverse(self) -> "QuadForm":
        return QuadForm(self.a, -self.b, self.c).reduce()

    def compose(self, other: "QuadForm") -> "QuadForm":
        """Gaussian composition (united-form formula), reduced."""
        D = self.discriminant
        if other.discriminant != D:
            raise ClassFieldError("forms have different discriminants")
        a1, b1, _ = self.a, self.b, self.c
        a2, b2 = other.a, other.b
        beta = (b1 + b2) // 2
        g1, u1, v1 = _xgcd(a1, a2)
        e, s, w = _xgcd(g1, beta)
        u, v = s * u1, s * v1       # u a1 + v a2 + w beta = e
        a3 = a1 * a2 // (e * e)
        b3 = (u * a1 * b2 + v * a2 * b1 + w * (b1 * b2 + D) // 2) // e
        b3 %= 2 * a3
        c3 = (b3 * b3 - D) // (4 * a3)
        return QuadForm(a3, b3, c3).reduce()

    def __mul__(self, other: "QuadForm") -> "QuadForm":
        return self.compose(other)

    def power(self, k: int) -> "QuadForm":
        base = self if k >= 0 else self.inverse()
        out = principal_form(self.discriminant)
        for _ in range(abs(k)):
            out = out.compose(base)
        return out

    def order(self) -> int:
        e = principal_form(self.discriminant)
        x, k = self.reduce(), 1
        while x != e:
            x = x.compose(self)
            k += 1
        return k

    def __str__(self) -> str:
        return f"({self.a},{self.b},{self.c})"


def principal_form(D: int) -> QuadForm:
    k = D % 2
    return QuadForm(1, k, (k - D) // 4)


def _check_disc(D: int):
    if D >= 0 or D % 4 not in (0, 1):
        raise ClassFieldError(f"{D} is not a negative discriminant")


def reduced_forms(D: int) -> list[QuadForm]:
    """All reduced primitive forms of discriminant D, by enumeration."""
    _check_disc(D)
    out = []
    amax = isqrt(-D // 3)
    for a in range(1, amax + 1):
        for b in range(-a + 1, a + 1):
            if (b - D) % 2:
                continue
            num = b * b - D
            if num % (4 * a):
                continue
            c = num // (4 * a)
            f = QuadForm(a, b, c)
            if c >= a and f.is_reduced() and f.is_primitive():
                out.append(f)
    return out


@dataclass(frozen=True)
class FormClassGroup:
    discriminant: int
    forms: tuple
    structure: AbGroupStructure

    @property
    def order(self) -> int:
        return len(self.forms)


def form_class_group(D: int) -> FormClassGroup:
    forms = reduced_forms(D)
    h = len(forms)
    counts = {}
    for k in range(1, h + 1):
        if h % k == 0:
            counts[k] = sum(1 for f in forms if h == 1 or _power_is_identity(f, k))
    return FormClassGroup(D, tuple(forms), structure_from_kill_counts(counts, h))


def _power_is_identity(f: QuadForm, k: int) -> bool:
    return f.power(k) == principal_form(f.discriminant)


def prime_form(D: int, p: int) -> QuadForm:
    """A form (p, b, c) of discriminant D representing the prime p (p not inert)."""
    for b in range(0, 2 * p):
        if (b - D) % 2 == 0 and (b * b - D) % (4 * p) == 0:
            return QuadForm(p, b, (b * b - D) // (4 * p))
    raise ClassFieldError(f"{p} is inert for discriminant {D}")


# relative class numbers

def primitive_root(l: int) -> int:
    factors = [q for q in range(2, l) if (l - 1) % q == 0 and is_prime(q)]
    for g in range(2, l):
        if all(pow(g, (l - 1) // q, l) != 1 for q in factors):
            return g
    return 1


@lru_cache(maxsize=None)
def cyclotomic_polynomial(m: int) -> tuple[int, ...]:
    """Coefficients of Phi_m, lowest degree first."""
    num = [-1] + [0] * (m - 1) + [1]
    for d in range(1, m):
        if m % d == 0:
            num = _poly_divexact(num, list(cyclotomic_polynomial(d)))
    return tuple(num)


def _poly_divexact(num: list[int], den: list[int]) -> list[int]:
    num = num[:]
    q = [0] * (len(num) - len(den) + 1)
    for i in range(len(q) - 1, -1, -1):
        coef = num[i + len(den) - 1] // den[-1]
        q[i] = coef
        for j, d in enumerate(den):
            num[i + j] -= coef * d
    if any(num):
        raise ArithmeticError("inexact polynomial division")
    return q


def _poly_mulmod(x: list, y: list, phi: tuple) -> list:
    deg = len(phi) - 1
    prod = [0] * (len(x) + len(y) - 1)
    for i, a in enumerate(x):
        if a:
            for j, b in enumerate(y):
                if b:
                    prod[i + j] += a * b
    for i in range(len(prod) - 1, deg - 1, -1):
        c = prod[i]
        if c:
            for j in range(deg + 1):
                prod[i - deg + j] -= c * phi[j]
    return (prod + [0] * deg)[:deg]


@dataclass(frozen=True)
class DirichletChar:
    """chi_j mod a prime l: chi(g^k) = zeta_{l-1}^{jk} for the least primitive root g.

    Values are stored as exponents of zeta_{l-1}; None marks chi(a) = 0.
    """
    modulus: int
    index: int

    @property
    def order_of_values(self) -> int:
        return self.modulus - 1

    @property
    def is_odd(self) -> bool:
        return self.index % 2 == 1

    def exponent(self, a: int) -> int | None:
        l = self.modulus
        a %= l
        if a == 0:
            return None
        return (self.index * _dlog_table(l)[a]) % (l - 1)


@lru_cache(maxsize=None)
def _dlog_table(l: int) -> dict[int, int]:
    g = primitive_root(l)
    out, x = {}, 1
    for k in range(l - 1):
        out[x] = k
        x = x * g % l
    return out


def odd_characters(l: int) -> list[DirichletChar]:
    return [DirichletChar(l, j) for j in range(1, l - 1, 2)]


def bernoulli_character_sum(l: int, j: int) -> list[int]:
    """l * B_{1,chi_j} in Z[zeta_{l-1}] (coefficients mod Phi_{l-1}),
    where chi_j(g^k) = zeta^{jk} for the least primitive root g."""
    m = l - 1
    phi = cyclotomic_polynomial(m)
    g = primitive_root(l)
    power = [0] * m
    a = 1
    for k in range(m):
        power[(j * k) % m] += a
        a = a * g % l
    return _poly_mulmod(power, [1], phi) if m > 1 else [sum(power)]


def _hminus_exact(l: int) -> int:
    m = l - 1
    phi = cyclotomic_polynomial(m)
    prod = [1] + [0] * (len(phi) - 2)
    odd = [j for j in range(m) if j % 2 == 1]
    for j in odd:
        prod = _poly_mulmod(prod, bernoulli_character_sum(l, j), phi)
    if any(prod[1:]):
        raise ArithmeticError("character product is not rational")
    k = len(odd)
    # h^- = 2l * prod_j (-S_j / (2l)), S_j = l B_{1,chi_j}
    num = (-1) ** k * prod[0]
    den = (2 * l) ** (k - 1)
    if num % den:
        raise ArithmeticError("relative class number is not an integer")
    return num // den


def _prime_1_mod(m: int, start: int) -> int:
    P = start + (1 - start) % m
    while not is_prime(P):
        P += m
    return P


def bernoulli_direct_mod(l: int, j: int, P: int, zeta: int) -> int:
    """sum_{a=1}^{l-1} a chi_j(a) in F_P, chi_j read off its Dirichlet-character values."""
    chi = DirichletChar(l, j)
    return sum(a * pow(zeta, chi.exponent(a), P) for a in range(1, l)) % P


def _hminus_modular(l: int) -> int:
    m = l - 1
    odd = [j for j in range(m) if j % 2 == 1]
    k = len(odd)
    bound = (l * (l - 1) // 2) ** k // (2 * l) ** (k - 1) + 1
    residues, mod, P = 0, 1, 2 * l
    while mod <= 2 * bound:
        P = _prime_1_mod(m, P + 1)
        if P == l:
            continue
        gen = primitive_root(P)
        zeta = pow(gen, (P - 1) // m, P)
        prod = 1
        for j in odd:
            prod = prod * bernoulli_direct_mod(l, j, P, zeta) % P
        val = (-1) ** k * prod * pow(pow(2 * l, k - 1, P), -1, P) % P
        # combine by CRT
        g0, s, t = _xgcd(mod, P)
        residues = (residues * t * P + val * s * mod) % (mod * P)
        mod *= P
    return residues if residues <= mod // 2 else residues - mod


def bernoulli_routes_agree(l: int, P: int | None = None) -> bool:
    """Every odd B_{1,chi} computed in Z[zeta] reduces to the direct F_P sum."""
    m = l - 1
    P = P or _prime_1_mod(m, 10 * l)
    gen = primitive_root(P)
    zeta = pow(gen, (P - 1) // m, P)
    for j in range(1, m, 2):
        exact = bernoulli_character_sum(l, j)
        reduced = sum(c * pow(zeta, i, P) for i, c in enumerate(exact)) % P
        if reduced != bernoulli_direct_mod(l, j, P, zeta):
            return False
    return True


def relative_class_number(l: int, method: str = "cyclotomic") -> int:
    """h^-(Q(zeta_l)) for a prime 3 <= l <= HMINUS_CAP."""
    if not is_prime(l) or l < 3:
        raise ClassFieldError("relative class numbers are computed for odd prime conductors")
    if l > HMINUS_CAP:
        raise ClassFieldError(f"conductor {l} exceeds the cap {HMINUS_CAP}")
    if method == "cyclotomic":
        return _hminus_exact(l)
    if method == "modular":
        return _hminus_modular(l)
    raise ClassFieldError(f"unknown method {method!r}")


# Bernoulli numbers and irregular primes

@lru_cache(maxsize=None)
def bernoulli_numbers(n: int) -> tuple[Fraction, ...]:
    """B_0 .. B_n with B_1 = -1/2, from sum_{j<=k} C(k+1, j) B_j = 0."""
    B = [Fraction(1)]
    for k in range(1, n + 1):
        B.append(-sum((comb(k + 1, j) * B[j] for j in range(k)), Fraction(0)) / (k + 1))
    return tuple(B)


def von_staudt_clausen_ok(n: int) -> bool:
    """Denominator of B_k equals the product of primes p with (p-1) | k, for even k <= n."""
    B = bernoulli_numbers(n)
    for k in range(2, n + 1, 2):
        expected = 1
        for p in range(2, k + 2):
            if k % (p - 1) == 0 and is_prime(p):
                expected *= p
        if B[k].denominator != expected:
            return False
    return True


def is_irregular(l: int) -> bool:
    if l < 3:
        return False
    B = bernoulli_numbers(max(l - 3, 2))
    return any(B[k].numerator % l == 0 for k in range(2, l - 2, 2))


def irregular_primes(bound: int) -> list[int]:
    if bound > IRREGULAR_CAP:
        raise ClassFieldError(f"bound {bound} exceeds the cap {IRREGULAR_CAP}")
    if not von_staudt_clausen_ok(max(bound - 3, 2)):
        raise ArithmeticError("Bernoulli denominators fail von Staudt-Clausen")
    return [l for l in range(3, bound + 1) if is_prime(l) and is_irregular(l)]


@dataclass(frozen=True)
class MinusDivisibility:
    l: int
    irregular: bool
    hminus: int
    divides: bool

    @property
    def holds(self) -> bool:
        return (not self.irregular) or self.divides


def minus_divisibility_check(l: int) -> MinusDivisibility:
    """Irregular l must divide h^-(Q(zeta_l)); both sides are computed."""
    h = relative_class_number(l)
    return MinusDivisibility(l, is_irregular(l), h, h % l == 0)
