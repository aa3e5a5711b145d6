"""Exact integer linear algebra.

Everything here works over Python ints, so entries never overflow.  The
central routine is :func:`smith_normal_form`; kernels, cokernels, integer
solving and subquotients of lattices are built on it.

>>> m = IntMatrix([[2, 4], [4, 8]])
>>> smith_normal_form(m)[1].diagonal()
[2, 0]
>>> cokernel_structure(m)
AbGroupStructure(free_rank=1, torsion=(2,))
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from math import gcd
from typing import Iterable, Sequence


class DimensionError(ValueError):
    pass


class IntMatrix:
    """Immutable integer matrix.

    Zero-sized matrices are legal: ``IntMatrix.zeros(0, 3)`` is the unique
    map Z^3 -> 0.
    """

    __slots__ = ("rows", "cols", "_data")

    def __init__(self, data: Iterable[Iterable[int]] = (), rows: int | None = None,
                 cols: int | None = None):
        body = tuple(tuple(int(x) for x in row) for row in data)
        if rows is None:
            rows = len(body)
        if cols is None:
            cols = len(body[0]) if body else 0
        if len(body) != rows or any(len(r) != cols for r in body):
            raise DimensionError(f"ragged or mis-sized data for {rows}x{cols} matrix")
        self.rows = rows
        self.cols = cols
        self._data = body

    # constructors

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "IntMatrix":
        return cls([[0] * cols for _ in range(rows)], rows, cols)

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls([[int(i == j) for j in range(n)] for i in range(n)], n, n)

    @classmethod
    def diag(cls, entries: Sequence[int], rows: int | None = None,
             cols: int | None = None) -> "IntMatrix":
        rows = len(entries) if rows is None else rows
        cols = len(entries) if cols is None else cols
        out = [[0] * cols for _ in range(rows)]
        for i, e in enumerate(entries):
            out[i][i] = e
        return cls(out, rows, cols)

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence[int]], rows: int) -> "IntMatrix":
        cols = len(columns)
        return cls([[columns[j][i] for j in range(cols)] for i in range(rows)], rows, cols)

    @classmethod
    def hstack(cls, *mats: "IntMatrix") -> "IntMatrix":
        rows = mats[0].rows
        if any(m.rows != rows for m in mats):
            raise DimensionError("hstack needs equal row counts")
        return cls([sum((m._data[i] for m in mats), ()) for i in range(rows)], rows,
                   sum(m.cols for m in mats))

    @classmethod
    def vstack(cls, *mats: "IntMatrix") -> "IntMatrix":
        cols = mats[0].cols
        if any(m.cols != cols for m in mats):
            raise DimensionError("vstack needs equal column counts")
        return cls([r for m in mats for r in m._data], sum(m.rows for m in mats), cols)

    @classmethod
    def block_diag(cls, *mats: "IntMatrix") -> "IntMatrix":
        rows = sum(m.rows for m in mats)
        cols = sum(m.cols for m in mats)
        out = [[0] * cols for _ in range(rows)]
        r0 = c0 = 0
        for m in mats:
            for i in range(m.rows):
                out[r0 + i][c0:c0 + m.cols] = m._data[i]
            r0 += m.rows
            c0 += m.cols
        return cls(out, rows, cols)

    # access

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        if not (0 <= i < self.rows and 0 <= j < self.cols):
            raise IndexError(f"entry {ij} outside {self.rows}x{self.cols}")
        return self._data[i][j]

    def tolist(self) -> list[list[int]]:
        return [list(r) for r in self._data]

    def row(self, i: int) -> tuple[int, ...]:
        return self._data[i]

    def column(self, j: int) -> tuple[int, ...]:
        return tuple(r[j] for r in self._data)

    def columns(self) -> list[tuple[int, ...]]:
        return [self.column(j) for j in range(self.cols)]

    def diagonal(self) -> list[int]:
        return [self._data[i][i] for i in range(min(self.rows, self.cols))]

    def submatrix(self, rows: Sequence[int] | range, cols: Sequence[int] | range) -> "IntMatrix":
        return IntMatrix([[self._data[i][j] for j in cols] for i in rows], len(rows), len(cols))

    # arithmetic

    def __eq__(self, other: object) -> bool:
        return (isinstance(other, IntMatrix) and self.shape == other.shape
                and self._data == other._data)

    def __hash__(self) -> int:
        return hash((self.rows, self.cols, self._data))

    def __repr__(self) -> str:
        return f"IntMatrix({self.tolist()!r})" if self.rows else f"IntMatrix.zeros(0, {self.cols})"

    def __add__(self, other: "IntMatrix") -> "IntMatrix":
        if self.shape != other.shape:
            raise DimensionError("shape mismatch in addition")
        return IntMatrix([[a + b for a, b in zip(r, s)] for r, s in zip(self._data, other._data)],
                         self.rows, self.cols)

    def __sub__(self, other: "IntMatrix") -> "IntMatrix":
        return self + (-other)

    def __neg__(self) -> "IntMatrix":
        return IntMatrix([[-a for a in r] for r in self._data], self.rows, self.cols)

    def scale(self, k: int) -> "IntMatrix":
        return IntMatrix([[k * a for a in r] for r in self._data], self.rows, self.cols)

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise DimensionError(f"cannot multiply {self.shape} by {other.shape}")
        cols_b = list(zip(*other._data)) if other.rows else [()] * other.cols
        out = []
        for r in self._data:
            nz = [(k, a) for k, a in enumerate(r) if a]
            out.append([sum(a * c[k] for k, a in nz) for c in cols_b])
        return IntMatrix(out, self.rows, other.cols)

    def apply(self, v: Sequence[int]) -> tuple[int, ...]:
        if len(v) != self.cols:
            raise DimensionError("vector length mismatch")
        return tuple(sum(a * b for a, b in zip(r, v) if a) for r in self._data)

    @property
    def T(self) -> "IntMatrix":
        return IntMatrix(zip(*self._data), self.cols, self.rows) if self.rows else IntMatrix.zeros(self.cols, 0)

    def is_zero(self) -> bool:
        return all(a == 0 for r in self._data for a in r)

    def det(self) -> int:
        """Determinant by fraction-free Bareiss elimination."""
        if self.rows != self.cols:
            raise DimensionError("determinant of non-square matrix")
        n = self.rows
        a = self.tolist()
        sign, prev = 1, 1
        for k in range(n - 1):
            if a[k][k] == 0:
                for i in range(k + 1, n):
                    if a[i][k]:
                        a[k], a[i] = a[i], a[k]
                        sign = -sign
                        break
                else:
                    return 0
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
            prev = a[k][k]
        return sign * a[n - 1][n - 1] if n else 1


@dataclass(frozen=True)
class AbGroupStructure:
    """A finitely generated abelian group Z^free_rank + sum Z/d_i with d_1 | d_2 | ..."""

    free_rank: int = 0
    torsion: tuple[int, ...] = ()

    def __post_init__(self):
        if self.free_rank < 0:
            raise ValueError("negative free rank")
        t = tuple(self.torsion)
        if any(d < 2 for d in t) or any(t[i + 1] % t[i] for i in range(len(t) - 1)):
            raise ValueError(f"torsion {t} is not a divisor chain of integers >= 2")
        object.__setattr__(self, "torsion", t)

    @classmethod
    def from_invariants(cls, invariants: Iterable[int], free_rank: int = 0) -> "AbGroupStructure":
        """Canonical form of Z^free_rank + sum Z/n for arbitrary n (0 means Z, 1 is dropped)."""
        prime_powers: dict[int, list[int]] = {}
        for n in invariants:
            n = abs(int(n))
            if n == 0:
                free_rank += 1
                continue
            for q, e in _factorize(n).items():
                prime_powers.setdefault(q, []).append(q ** e)
        length = max((len(v) for v in prime_powers.values()), default=0)
        chain = [1] * length
        for powers in prime_powers.values():
            powers.sort()
            for k, pp in enumerate(powers):
                chain[length - len(powers) + k] *= pp
        return cls(free_rank, tuple(chain))

    @classmethod
    def cyclic(cls, n: int) -> "AbGroupStructure":
        return cls.from_invariants([n])

    @property
    def order(self) -> int | None:
        """Group order, or None when infinite."""
        if self.free_rank:
            return None
        return reduce(lambda a, b: a * b, self.torsion, 1)

    @property
    def exponent(self) -> int | None:
        if self.free_rank:
            return None
        return self.torsion[-1] if self.torsion else 1

    def is_trivial(self) -> bool:
        return self.free_rank == 0 and not self.torsion

    def __add__(self, other: "AbGroupStructure") -> "AbGroupStructure":
        return AbGroupStructure.from_invariants(self.torsion + other.torsion,
                                                self.free_rank + other.free_rank)

    def __str__(self) -> str:
        parts = [f"Z/{d}" for d in self.torsion]
        if self.free_rank:
            parts.append("Z" if self.free_rank == 1 else f"Z^{self.free_rank}")
        return " + ".join(parts) if parts else "0"

    def to_json(self) -> dict:
        return {"free_rank": self.free_rank, "torsion": list(self.torsion)}


def _factorize(n: int) -> dict[int, int]:
    out: dict[int, int] = {}
    q = 2
    while q * q <= n:
        while n % q == 0:
            out[q] = out.get(q, 0) + 1
            n //= q
        q += 1 if q == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


# Smith normal form

def _snf_in_place(a: list[list[int]], m: int, n: int, u: list[list[int]] | None,
                  v: list[list[int]] | None) -> int:
    """Reduce ``a`` to Smith form.  Row ops are mirrored into ``u``, column ops
    into ``v`` (so that u_final * A * v_final = D).  Returns the rank."""

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        if u is not None:
            u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for r in a:
            r[i], r[j] = r[j], r[i]
        if v is not None:
            for r in v:
                r[i], r[j] = r[j], r[i]

    def add_row(dst, src, q):  # row_dst -= q * row_src
        rs, rd = a[src], a[dst]
        for k in range(n):
            if rs[k]:
                rd[k] -= q * rs[k]
        if u is not None:
            us, ud = u[src], u[dst]
            for k in range(m):
                if us[k]:
                    ud[k] -= q * us[k]

    def add_col(dst, src, q):  # col_dst -= q * col_src
        for r in a:
            if r[src]:
                r[dst] -= q * r[src]
        if v is not None:
            for r in v:
                if r[src]:
                    r[dst] -= q * r[src]

    t = 0
    while t < min(m, n):
        best = None
        for i in range(t, m):
            row = a[i]
            for j in range(t, n):
                x = row[j]
                if x and (best is None or abs(x) < best[0]):
                    best = (abs(x), i, j)
                    if best[0] == 1:
                        break
            if best is not None and best[0] == 1:
                break
        if best is None:
            break
        _, i0, j0 = best
        if i0 != t:
            swap_rows(i0, t)
        if j0 != t:
            swap_cols(j0, t)
        while True:
            p = a[t][t]
            dirty = False
            for i in range(t + 1, m):
                x = a[i][t]
                if x:
                    q = x // p
                    if q:
                        add_row(i, t, q)
                    if a[i][t]:
                        dirty = True
            for j in range(t + 1, n):
                x = a[t][j]
                if x:
                    q = x // p
                    if q:
                        add_col(j, t, q)
                    if a[t][j]:
                        dirty = True
            if dirty:
                # move the smallest remainder in row/column t onto the pivot
                cand = [(abs(a[i][t]), i, t) for i in range(t + 1, m) if a[i][t]]
                cand += [(abs(a[t][j]), t, j) for j in range(t + 1, n) if a[t][j]]
                _, i1, j1 = min(cand)
                if i1 != t:
                    swap_rows(i1, t)
                else:
                    swap_cols(j1, t)
                continue
            bad = None
            for i in range(t + 1, m):
                if any(x % p for x in a[i][t + 1:]):
                    bad = i
                    break
            if bad is None:
                break
            add_row(t, bad, -1)
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            if u is not None:
                u[t] = [-x for x in u[t]]
        t += 1
    return t


def smith_normal_form(M: IntMatrix) -> tuple[IntMatrix, IntMatrix, IntMatrix]:
    """Return (U, D, V) with U*M*V = D, U and V unimodular and D in Smith form."""
    m, n = M.shape
    a = M.tolist()
    u = [[int(i == j) for j in range(m)] for i in range(m)]
    v = [[int(i == j) for j in range(n)] for i in range(n)]
    _snf_in_place(a, m, n, u, v)
    return IntMatrix(u, m, m), IntMatrix(a, m, n), IntMatrix(v, n, n)


def invariant_factors(M: IntMatrix) -> list[int]:
    """Nonzero diagonal entries of the Smith form (1's included)."""
    m, n = M.shape
    a = M.tolist()
    r = _snf_in_place(a, m, n, None, None)
    return [a[i][i] for i in range(r)]


def rank(M: IntMatrix) -> int:
    return len(invariant_factors(M))


def cokernel_structure(M: IntMatrix) -> AbGroupStructure:
    """Structure of Z^rows / M(Z^cols)."""
    inv = invariant_factors(M)
    return AbGroupStructure.from_invariants([d for d in inv if d > 1], M.rows - len(inv))


def kernel_basis(M: IntMatrix) -> IntMatrix:
    """Columns form a Z-basis of ker M; the span is saturated in Z^cols."""
    m, n = M.shape
    a = M.tolist()
    v = [[int(i == j) for j in range(n)] for i in range(n)]
    r = _snf_in_place(a, m, n, None, v)
    return IntMatrix([row[r:] for row in v], n, n - r)


def is_exact_at(f: IntMatrix, g: IntMatrix) -> bool:
    """True iff  . --f--> Z^k --g--> .  is exact at the middle lattice."""
    if g.cols != f.rows:
        raise DimensionError(f"g has {g.cols} columns but f has {f.rows} rows")
    if not (g @ f).is_zero():
        return False
    return subquotient(kernel_basis(g), f).structure.is_trivial()


def homology_at(f: IntMatrix, g: IntMatrix) -> AbGroupStructure:
    """ker g / im f, assuming g*f = 0."""
    if g.cols != f.rows:
        raise DimensionError(f"g has {g.cols} columns but f has {f.rows} rows")
    if not (g @ f).is_zero():
        raise ValueError("g*f != 0")
    return subquotient(kernel_basis(g), f).structure


def solve_integer(A: IntMatrix, B: IntMatrix) -> IntMatrix | None:
    """Integer X with A X = B, or None if there is none.

    When A has independent columns the solution is unique.
    """
    if A.rows != B.rows:
        raise DimensionError("row mismatch in solve")
    U, D, V = smith_normal_form(A)
    ub = (U @ B).tolist()
    d = D.diagonal()
    r = sum(1 for x in d if x)
    y = [[0] * B.cols for _ in range(A.cols)]
    for i in range(A.rows):
        for j in range(B.cols):
            x = ub[i][j]
            if i < r:
                if x % d[i]:
                    return None
                y[i][j] = x // d[i]
            elif x:
                return None
    return V @ IntMatrix(y, A.cols, B.cols)


def hermite_column_basis(M: IntMatrix) -> IntMatrix:
    """A basis (as columns) of the lattice spanned by the columns of M."""
    U, D, V = smith_normal_form(M)
    r = sum(1 for x in D.diagonal() if x)
    # M V = U^-1 D, so the first r columns of M V span the image
    return (M @ V).submatrix(range(M.rows), range(r))


class Subquotient:
    """The group span(N) / span(S) for lattices S inside N in Z^m.

    ``N`` must have independent columns.  Besides the abstract structure the
    object can express any element of span(N) in the cyclic decomposition:
    ``coordinates(x)`` returns one integer per factor (reduced modulo the
    factor's order, unreduced for free factors).
    """

    def __init__(self, N: IntMatrix, S: IntMatrix):
        if N.rows != S.rows:
            raise DimensionError("ambient mismatch in subquotient")
        self.N = N
        if N.cols == 0:
            if not S.is_zero():
                raise ValueError("relations are not contained in the numerator lattice")
            self._factors: list[int] = []
            self._rows: list[int] = []
            self._U = IntMatrix.identity(0)
            self.structure = AbGroupStructure()
            return
        C = solve_integer(N, S)
        if C is None:
            raise ValueError("relations are not contained in the numerator lattice")
        U, D, _ = smith_normal_form(C)
        d = D.diagonal() + [0] * (N.cols - min(D.rows, D.cols))
        self._U = U
        self._rows = [i for i, x in enumerate(d) if x != 1]
        self._factors = [d[i] for i in self._rows]
        self.structure = AbGroupStructure.from_invariants(self._factors)

    @property
    def factors(self) -> list[int]:
        """Orders of the cyclic factors (0 = infinite) in coordinate order."""
        return list(self._factors)

    def coordinates(self, x: Sequence[int]) -> tuple[int, ...]:
        if not self._factors:
            return ()
        c = solve_integer(self.N, IntMatrix([[v] for v in x], len(x), 1))
        if c is None:
            raise ValueError("element is not in the numerator lattice")
        w = self._U @ c
        return tuple(w[i, 0] % d if d else w[i, 0] for i, d in zip(self._rows, self._factors))

    def is_zero(self, x: Sequence[int]) -> bool:
        return all(c == 0 for c in self.coordinates(x))

    def order_of(self, x: Sequence[int]) -> int | None:
        out = 1
        for c, d in zip(self.coordinates(x), self._factors):
            if d == 0:
                if c:
                    return None
                continue
            out = out * (d // gcd(c, d)) // gcd(out, d // gcd(c, d))
        return out


def subquotient(N: IntMatrix, S: IntMatrix) -> Subquotient:
    return Subquotient(N, S)


def presented_homology(d_in: IntMatrix, d_out: IntMatrix, rel_mid: IntMatrix,
                       rel_out: IntMatrix) -> Subquotient:
    """Homology at the middle of  A --d_in--> B --d_out--> C  where
    B = Z^b / rel_mid and C = Z^c / rel_out are presented groups.

    The result is {x : d_out x in im rel_out} / (im d_in + im rel_mid).
    Relation matrices must have independent columns.
    """
    b = d_out.cols
    if d_in.rows != b or rel_mid.rows != b or rel_out.rows != d_out.rows:
        raise DimensionError("inconsistent shapes in presented complex")
    K = kernel_basis(IntMatrix.hstack(d_out, -rel_out))
    cycles = K.submatrix(range(b), range(K.cols))
    return Subquotient(cycles, IntMatrix.hstack(d_in, rel_mid))


def rational_solve(A: Sequence[Sequence[Fraction]], b: Sequence[Fraction]) -> list[Fraction] | None:
    """Solve A x = b over Q (A with independent columns); None if inconsistent."""
    rows = [list(map(Fraction, r)) + [Fraction(v)] for r, v in zip(A, b)]
    ncols = len(A[0]) if A else 0
    piv_cols = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        pv = rows[r][c]
        rows[r] = [x / pv for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        piv_cols.append(c)
        r += 1
    if any(row[-1] != 0 for row in rows[r:]):
        return None
    x = [Fraction(0)] * ncols
    for i, c in enumerate(piv_cols):
        x[c] = rows[i][-1]
    return x


@dataclass(frozen=True)
class QZKernel:
    """Kernel of an integer matrix acting on (Q/Z)^k.

    The kernel is sum Z/d_i (generated by ``generators``) plus a divisible
    part (Q/Z)^divisible_rank spanned by ``divisible_directions``.
    """

    generators: tuple[tuple[Fraction, ...], ...]
    orders: tuple[int, ...]
    divisible_directions: tuple[tuple[int, ...], ...]
    inverse_basis: IntMatrix

    @property
    def divisible_rank(self) -> int:
        return len(self.divisible_directions)

    @property
    def is_finite(self) -> bool:
        return not self.divisible_directions

    @property
    def structure(self) -> AbGroupStructure:
        """Structure of the finite part (the divisible part is reported separately)."""
        return AbGroupStructure.from_invariants(self.orders)

    @property
    def order(self) -> int | None:
        if self.divisible_directions:
            return None
        return reduce(lambda a, b: a * b, self.orders, 1)

    def coordinates(self, x: Sequence[Fraction]) -> tuple[int, ...]:
        """Coordinates of a finite-part element with respect to ``generators``."""
        y = [sum((Fraction(c) * v for c, v in zip(row, x)), Fraction(0))
             for row in self.inverse_basis.tolist()]
        out = []
        for yi, d in zip(y, self.orders):
            t = yi * d
            if t.denominator != 1:
                raise ValueError("element is not in the kernel")
            out.append(int(t) % d)
        return tuple(out)

    def elements(self) -> list[tuple[Fraction, ...]]:
        """All elements of a finite kernel, reduced into [0, 1)."""
        if not self.is_finite:
            raise ValueError("kernel is infinite")
        k = self.inverse_basis.cols
        out = [tuple(Fraction(0) for _ in range(k))]
        for g, d in zip(self.generators, self.orders):
            out = [tuple((a + c * b) % 1 for a, b in zip(e, g)) for e in out for c in range(d)]
        return out


def qz_kernel(M: IntMatrix) -> QZKernel:
    """Kernel of M : (Q/Z)^cols -> (Q/Z)^rows."""
    U, D, V = smith_normal_form(M)
    k = M.cols
    d = D.diagonal() + [0] * (k - min(M.rows, k))
    Vinv = solve_integer(V, IntMatrix.identity(k))
    gens, orders, div = [], [], []
    for i in range(k):
        col = V.column(i)
        if d[i] == 0:
            div.append(col)
        elif d[i] > 1:
            gens.append(tuple(Fraction(c, d[i]) % 1 for c in col))
            orders.append(d[i])
    # Vinv rows paired with nontrivial finite factors, in the same order
    rows = [i for i in range(k) if d[i] > 1]
    return QZKernel(tuple(gens), tuple(orders), tuple(div),
                    Vinv.submatrix(rows, range(k)) if rows else IntMatrix.zeros(0, k))


def qz_solvable(M: IntMatrix, target: Sequence[Fraction]) -> bool:
    """Does M x = target have a solution x in (Q/Z)^cols?  (target read mod 1)"""
    if len(target) != M.rows:
        raise DimensionError("target length mismatch")
    U, D, _ = smith_normal_form(M)
    r = sum(1 for x in D.diagonal() if x)
    t = [Fraction(x) for x in target]
    for i in range(r, M.rows):
        v = sum((U[i, j] * t[j] for j in range(M.rows)), Fraction(0))
        if v.denominator != 1:
            return False
    return True


def structure_from_kill_counts(counts: dict, size: int) -> AbGroupStructure:
    """Recover a finite abelian group of order ``size`` from counts[k] = #{x : kx = 0}
    for every divisor k of ``size``."""
    inv = []
    for q in _factorize(size):
        # number of cyclic factors of order >= q^j is log_q(c(q^j)/c(q^{j-1}))
        j, parts = 1, []
        while size % q ** j == 0:
            ratio = counts[q ** j] // counts[q ** (j - 1)]
            m = 0
            while q ** m < ratio:
                m += 1
            parts.append(m)
            j += 1
        parts.append(0)
        for j in range(len(parts) - 1):
            inv += [q ** (j + 1)] * (parts[j] - parts[j + 1])
    return AbGroupStructure.from_invariants(inv)
