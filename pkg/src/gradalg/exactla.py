"""Exact linear algebra over the rationals and integers.

Dense matrices with arbitrary-precision entries, reduced echelon forms,
Smith/Hermite normal forms with transformation matrices, simultaneous
eigenspace decompositions of commuting rational matrices, and the
Jordan-Chevalley semisimple part.  Everything is exact; non-rational
spectra raise NonSplitError instead of being approximated.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import sympy

from .errors import (
    NonSplitError,
    NotCommutingError,
    NotDiagonalizableError,
    ShapeError,
)

Q = Fraction


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"cannot build an exact rational from {x!r}")


class RatMatrix:
    """Immutable dense matrix of exact rationals."""

    __slots__ = ("rows", "cols", "data")

    def __init__(self, rows: Iterable[Iterable]):
        data = tuple(tuple(_frac(x) for x in row) for row in rows)
        if data and any(len(r) != len(data[0]) for r in data):
            raise ShapeError("ragged rows")
        object.__setattr__(self, "data", data)
        object.__setattr__(self, "rows", len(data))
        object.__setattr__(self, "cols", len(data[0]) if data else 0)

    def __setattr__(self, name, value):
        raise AttributeError("RatMatrix is immutable")

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "RatMatrix":
        return cls([[0] * cols for _ in range(rows)])

    @classmethod
    def identity(cls, n: int) -> "RatMatrix":
        return cls([[1 if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def from_columns(cls, cols: Sequence[Sequence], rows: int | None = None) -> "RatMatrix":
        cols = [tuple(_frac(x) for x in c) for c in cols]
        if rows is None:
            if not cols:
                raise ShapeError("row count needed for a matrix with no columns")
            rows = len(cols[0])
        if any(len(c) != rows for c in cols):
            raise ShapeError("ragged columns")
        return cls([[c[i] for c in cols] for i in range(rows)])

    @classmethod
    def column_vector(cls, entries: Sequence) -> "RatMatrix":
        return cls([[x] for x in entries])

    @classmethod
    def diagonal(cls, entries: Sequence) -> "RatMatrix":
        n = len(entries)
        return cls([[entries[i] if i == j else 0 for j in range(n)] for i in range(n)])

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def __getitem__(self, ij) -> Fraction:
        i, j = ij
        return self.data[i][j]

    def row(self, i: int) -> tuple[Fraction, ...]:
        return self.data[i]

    def column(self, j: int) -> tuple[Fraction, ...]:
        return tuple(self.data[i][j] for i in range(self.rows))

    def columns(self) -> list[tuple[Fraction, ...]]:
        return [self.column(j) for j in range(self.cols)]

    def __eq__(self, other) -> bool:
        return isinstance(other, RatMatrix) and self.data == other.data

    def __hash__(self) -> int:
        return hash(("RatMatrix", self.data))

    def __repr__(self) -> str:
        return f"RatMatrix({[list(map(str, r)) for r in self.data]})"

    def __add__(self, other: "RatMatrix") -> "RatMatrix":
        if self.shape != other.shape:
            raise ShapeError("shape mismatch in addition")
        return RatMatrix(
            [
                [a + b for a, b in zip(ra, rb)]
                for ra, rb in zip(self.data, other.data)
            ]
        )

    def __sub__(self, other: "RatMatrix") -> "RatMatrix":
        return self + (-other)

    def __neg__(self) -> "RatMatrix":
        return RatMatrix([[-x for x in row] for row in self.data])

    def scale(self, c) -> "RatMatrix":
        c = _frac(c)
        return RatMatrix([[c * x for x in row] for row in self.data])

    def __mul__(self, other: "RatMatrix") -> "RatMatrix":
        if not isinstance(other, RatMatrix):
            return NotImplemented
        if self.cols != other.rows:
            raise ShapeError("shape mismatch in multiplication")
        bt = list(zip(*other.data)) if other.data else []
        return RatMatrix(
            [
                [sum(a * b for a, b in zip(row, col) if a and b) for col in bt]
                for row in self.data
            ]
        )

    def matvec(self, v: Sequence) -> tuple[Fraction, ...]:
        v = [_frac(x) for x in v]
        if len(v) != self.cols:
            raise ShapeError("shape mismatch in matvec")
        return tuple(sum(a * b for a, b in zip(row, v) if a and b) for row in self.data)

    def transpose(self) -> "RatMatrix":
        return RatMatrix(list(zip(*self.data))) if self.data else RatMatrix([])

    def trace(self) -> Fraction:
        return sum((self.data[i][i] for i in range(min(self.rows, self.cols))), Q(0))

    def is_zero(self) -> bool:
        return all(x == 0 for row in self.data for x in row)

    def is_square(self) -> bool:
        return self.rows == self.cols

    def hstack(self, other: "RatMatrix") -> "RatMatrix":
        if self.rows != other.rows:
            raise ShapeError("row mismatch in hstack")
        return RatMatrix([ra + rb for ra, rb in zip(self.data, other.data)])

    def submatrix(self, row_idx: Sequence[int], col_idx: Sequence[int]) -> "RatMatrix":
        return RatMatrix([[self.data[i][j] for j in col_idx] for i in row_idx])

    def power(self, k: int) -> "RatMatrix":
        if not self.is_square():
            raise ShapeError("power of a non-square matrix")
        result = RatMatrix.identity(self.rows)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base if k > 1 else base
            k >>= 1
        return result

    def flatten(self) -> tuple[Fraction, ...]:
        return tuple(x for row in self.data for x in row)


def mat_from_flat(entries: Sequence, rows: int, cols: int) -> RatMatrix:
    if len(entries) != rows * cols:
        raise ShapeError("flat length mismatch")
    return RatMatrix([entries[i * cols : (i + 1) * cols] for i in range(rows)])


# ---------------------------------------------------------------------------
# Echelon forms and linear solving
# ---------------------------------------------------------------------------


def rref(m: RatMatrix) -> tuple[RatMatrix, tuple[int, ...]]:
    """Reduced row echelon form and pivot column indices."""
    a = [list(row) for row in m.data]
    rows, cols = m.rows, m.cols
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        pr = next((i for i in range(r, rows) if a[i][c] != 0), None)
        if pr is None:
            continue
        a[r], a[pr] = a[pr], a[r]
        inv = 1 / a[r][c]
        a[r] = [x * inv for x in a[r]]
        for i in range(rows):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return RatMatrix(a), tuple(pivots)


def rank(m: RatMatrix) -> int:
    return len(rref(m)[1])


def nullspace(a: RatMatrix) -> RatMatrix:
    """Basis of the right kernel of ``a`` as columns in a canonical
    (reduced column echelon) form."""
    r, pivots = rref(a)
    free = [c for c in range(a.cols) if c not in pivots]
    cols = []
    for fc in free:
        v = [Q(0)] * a.cols
        v[fc] = Q(1)
        for i, pc in enumerate(pivots):
            v[pc] = -r[i, fc]
        cols.append(v)
    return column_echelon(RatMatrix.from_columns(cols, rows=a.cols)) if cols else RatMatrix.zeros(a.cols, 0)


def column_echelon(m: RatMatrix) -> RatMatrix:
    """Canonical reduced column echelon form with zero columns dropped.

    The result is the unique reduced basis of the column space, so two
    subspaces are equal iff their column_echelon forms are equal.
    """
    r, pivots = rref(m.transpose())
    cols = [r.row(i) for i in range(len(pivots))]
    return RatMatrix.from_columns(cols, rows=m.rows)


@dataclass(frozen=True)
class SolveResult:
    """Affine solution set of A X = B: a particular solution (or None if
    inconsistent) and a canonical basis of the kernel of A."""

    particular: RatMatrix | None
    nullspace: RatMatrix

    @property
    def consistent(self) -> bool:
        return self.particular is not None


def rational_solve(a: RatMatrix, b: RatMatrix) -> SolveResult:
    """Exact solution description of the linear system A X = B."""
    if a.rows != b.rows:
        raise ShapeError("A and B must have equal row counts")
    aug, pivots = rref(a.hstack(b))
    ns = nullspace(a)
    # Inconsistent iff some pivot falls in the B block.
    if any(p >= a.cols for p in pivots):
        return SolveResult(None, ns)
    part = [[Q(0)] * b.cols for _ in range(a.cols)]
    for i, p in enumerate(pivots):
        for j in range(b.cols):
            part[p][j] = aug[i, a.cols + j]
    return SolveResult(RatMatrix(part), ns)


def solve_unique(a: RatMatrix, b: RatMatrix) -> RatMatrix:
    """Solve A X = B expecting a unique solution; raises on failure."""
    res = rational_solve(a, b)
    if not res.consistent:
        raise ShapeError("inconsistent system where a solution was expected")
    if res.nullspace.cols:
        raise ShapeError("underdetermined system where uniqueness was expected")
    return res.particular


def inverse(m: RatMatrix) -> RatMatrix:
    if not m.is_square():
        raise ShapeError("inverse of a non-square matrix")
    aug, pivots = rref(m.hstack(RatMatrix.identity(m.rows)))
    if len(pivots) != m.rows:
        raise ShapeError("matrix is singular")
    return aug.submatrix(range(m.rows), range(m.cols, 2 * m.cols))


def det(m: RatMatrix) -> Fraction:
    if not m.is_square():
        raise ShapeError("determinant of a non-square matrix")
    a = [list(row) for row in m.data]
    n = m.rows
    d = Q(1)
    for c in range(n):
        pr = next((i for i in range(c, n) if a[i][c] != 0), None)
        if pr is None:
            return Q(0)
        if pr != c:
            a[c], a[pr] = a[pr], a[c]
            d = -d
        d *= a[c][c]
        inv = 1 / a[c][c]
        for i in range(c + 1, n):
            if a[i][c] != 0:
                f = a[i][c] * inv
                a[i] = [x - f * y for x, y in zip(a[i], a[c])]
    return d


# ---------------------------------------------------------------------------
# Subspace helpers (columns = basis vectors)
# ---------------------------------------------------------------------------


def subspace_contains(basis: RatMatrix, vec: Sequence) -> bool:
    if basis.cols == 0:
        return all(_frac(x) == 0 for x in vec)
    return rational_solve(basis, RatMatrix.column_vector(list(vec))).consistent


def subspace_coords(basis: RatMatrix, vec: Sequence) -> tuple[Fraction, ...] | None:
    """Coordinates of ``vec`` in ``basis`` columns, or None if outside."""
    if basis.cols == 0:
        return () if all(_frac(x) == 0 for x in vec) else None
    res = rational_solve(basis, RatMatrix.column_vector(list(vec)))
    if not res.consistent or res.nullspace.cols:
        if not res.consistent:
            return None
        raise ShapeError("basis columns are dependent")
    return res.particular.column(0)


def subspace_sum(a: RatMatrix, b: RatMatrix) -> RatMatrix:
    return column_echelon(a.hstack(b))


def subspace_intersection(a: RatMatrix, b: RatMatrix) -> RatMatrix:
    """Canonical basis of the intersection of two column spaces."""
    if a.cols == 0 or b.cols == 0:
        return RatMatrix.zeros(a.rows, 0)
    ker = nullspace(a.hstack(b.scale(-1)))
    cols = []
    for j in range(ker.cols):
        coeffs = ker.column(j)[: a.cols]
        cols.append(a.matvec(coeffs))
    if not cols:
        return RatMatrix.zeros(a.rows, 0)
    return column_echelon(RatMatrix.from_columns(cols, rows=a.rows))


# ---------------------------------------------------------------------------
# Polynomials over Q (coefficient lists, low degree first)
# ---------------------------------------------------------------------------


def charpoly(m: RatMatrix) -> tuple[Fraction, ...]:
    """Characteristic polynomial det(xI - M) by Faddeev-LeVerrier."""
    if not m.is_square():
        raise ShapeError("charpoly of a non-square matrix")
    n = m.rows
    coeffs = [Q(0)] * (n + 1)
    coeffs[n] = Q(1)
    mk = RatMatrix.identity(n)
    for k in range(1, n + 1):
        mk = m * mk
        c = -mk.trace() / k
        coeffs[n - k] = c
        if k < n:
            mk = mk + RatMatrix.identity(n).scale(c)
    return tuple(coeffs)


def minimal_polynomial(m: RatMatrix) -> tuple[Fraction, ...]:
    """Monic minimal polynomial via the first dependency among powers of M."""
    if not m.is_square():
        raise ShapeError("minimal polynomial of a non-square matrix")
    n = m.rows
    powers = [RatMatrix.identity(n)]
    for _ in range(n):
        powers.append(m * powers[-1])
    flat = [p.flatten() for p in powers]
    for d in range(1, n + 2):
        # Is M^d a combination of lower powers?
        a = RatMatrix.from_columns(flat[:d], rows=n * n)
        res = rational_solve(a, RatMatrix.column_vector(flat[d]))
        if res.consistent:
            c = res.particular.column(0)
            return tuple(-x for x in c) + (Q(1),)
    raise AssertionError("unreachable: minimal polynomial has degree <= n")


def poly_eval_matrix(poly: Sequence[Fraction], m: RatMatrix) -> RatMatrix:
    acc = RatMatrix.zeros(m.rows, m.cols)
    for c in reversed(list(poly)):
        acc = acc * m if not acc.is_zero() else acc
        if c:
            acc = acc + RatMatrix.identity(m.rows).scale(c)
    return acc


def poly_derivative(poly: Sequence[Fraction]) -> tuple[Fraction, ...]:
    return tuple(Q(k) * poly[k] for k in range(1, len(poly)))


def poly_normalize(poly: Sequence[Fraction]) -> tuple[Fraction, ...]:
    p = list(poly)
    while p and p[-1] == 0:
        p.pop()
    if p:
        lead = p[-1]
        p = [x / lead for x in p]
    return tuple(p)


def poly_divmod(a: Sequence[Fraction], b: Sequence[Fraction]):
    a = list(a)
    b = list(poly_normalize(b))
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    q = [Q(0)] * max(len(a) - len(b) + 1, 0)
    while len(a) >= len(b) and any(a):
        while a and a[-1] == 0:
            a.pop()
        if len(a) < len(b):
            break
        f = a[-1]
        shift = len(a) - len(b)
        q[shift] = f
        for i, c in enumerate(b):
            a[shift + i] -= f * c
        a.pop()
    while a and a[-1] == 0:
        a.pop()
    return tuple(q), tuple(a)


def poly_gcd(a: Sequence[Fraction], b: Sequence[Fraction]) -> tuple[Fraction, ...]:
    a, b = poly_normalize(a), poly_normalize(b)
    while b:
        _, r = poly_divmod(a, b)
        a, b = b, poly_normalize(r)
    return a


def squarefree_part(poly: Sequence[Fraction]) -> tuple[Fraction, ...]:
    p = poly_normalize(poly)
    g = poly_gcd(p, poly_derivative(p))
    if len(g) <= 1:
        return p
    q, r = poly_divmod(p, g)
    assert not r
    return poly_normalize(q)


def rational_roots(poly: Sequence[Fraction]) -> list[Fraction] | None:
    """All roots of ``poly`` if they are rational, else None.

    Returns the distinct roots (multiplicities ignored).
    """
    p = poly_normalize(poly)
    if len(p) <= 1:
        return []
    x = sympy.Symbol("x")
    expr = sum(sympy.Rational(c.numerator, c.denominator) * x**k for k, c in enumerate(p))
    _, factors = sympy.Poly(expr, x, domain="QQ").factor_list()
    roots = []
    for fac, _mult in factors:
        if fac.degree() > 1:
            return None
        if fac.degree() == 1:
            a1, a0 = fac.all_coeffs()
            roots.append(Q(int(sympy.numer(-a0 / a1)), int(sympy.denom(-a0 / a1))))
    return sorted(set(roots))


# ---------------------------------------------------------------------------
# Simultaneous eigenspaces and Jordan-Chevalley
# ---------------------------------------------------------------------------


def _eigen_split(basis: RatMatrix, op: RatMatrix) -> list[tuple[Fraction, RatMatrix]]:
    """Split the column space of ``basis`` into eigenspaces of ``op``.

    ``op`` must preserve the space; raises if the restriction is not
    diagonalizable with rational spectrum.
    """
    restricted = solve_unique(basis, op * basis)
    mp = minimal_polynomial(restricted)
    roots = rational_roots(mp)
    if roots is None:
        raise NonSplitError("operator has an irrational eigenvalue")
    if len(roots) < len(mp) - 1:
        raise NotDiagonalizableError("minimal polynomial has a repeated root")
    pieces = []
    total = 0
    for lam in roots:
        shifted = restricted - RatMatrix.identity(restricted.rows).scale(lam)
        ker = nullspace(shifted)
        if ker.cols == 0:
            continue
        pieces.append((lam, column_echelon(basis * ker)))
        total += ker.cols
    if total != basis.cols:
        raise NotDiagonalizableError("eigenspaces do not fill the space")
    return pieces


def simultaneous_eigenspaces(
    ops: Sequence[RatMatrix], dim: int | None = None
) -> list[tuple[tuple[Fraction, ...], RatMatrix]]:
    """Joint eigenspace decomposition of commuting diagonalizable matrices.

    Returns (weight vector, canonical subspace basis) pairs sorted by
    weight; the subspaces are a direct-sum decomposition of the full space.
    """
    ops = list(ops)
    if not ops:
        if dim is None:
            raise ShapeError("ambient dimension needed when there are no operators")
        return [((), RatMatrix.identity(dim))]
    n = ops[0].rows
    for op in ops:
        if not op.is_square() or op.rows != n:
            raise ShapeError("operators must be square of equal size")
    for i in range(len(ops)):
        for j in range(i + 1, len(ops)):
            if ops[i] * ops[j] != ops[j] * ops[i]:
                raise NotCommutingError(f"operators {i} and {j} do not commute")
    spaces: list[tuple[tuple[Fraction, ...], RatMatrix]] = [((), RatMatrix.identity(n))]
    for op in ops:
        refined = []
        for weight, basis in spaces:
            for lam, piece in _eigen_split(basis, op):
                refined.append((weight + (lam,), piece))
        spaces = refined
    return sorted(spaces, key=lambda t: t[0])


def semisimple_part(m: RatMatrix) -> RatMatrix:
    """Semisimple summand of the Jordan-Chevalley decomposition M = S + N.

    S is a polynomial in M; requires the characteristic polynomial to split
    over the rationals (NonSplitError otherwise).  Newton iteration on the
    squarefree part of the minimal polynomial.
    """
    if not m.is_square():
        raise ShapeError("semisimple part of a non-square matrix")
    mp = minimal_polynomial(m)
    roots = rational_roots(mp)
    if roots is None:
        raise NonSplitError("spectrum is not rational")
    # squarefree split polynomial with the same roots: prod (x - r)
    pred: tuple[Fraction, ...] = (Q(1),)
    for r in roots:
        pred = tuple(
            (pred[k - 1] if k >= 1 else Q(0)) - r * (pred[k] if k < len(pred) else Q(0))
            for k in range(len(pred) + 1)
        )
    dp = poly_derivative(pred)
    s = m
    for _ in range(m.rows.bit_length() + 1):
        val = poly_eval_matrix(pred, s)
        if val.is_zero():
            return s
        dval = poly_eval_matrix(dp, s)
        s = s - inverse(dval) * val
    if not poly_eval_matrix(pred, s).is_zero():
        raise AssertionError("Newton iteration failed to converge")
    return s


# ---------------------------------------------------------------------------
# Integer matrices, Hermite and Smith normal forms
# ---------------------------------------------------------------------------


class IntMatrix:
    """Immutable dense matrix of arbitrary-precision integers."""

    __slots__ = ("rows", "cols", "data")

    def __init__(self, rows: Iterable[Iterable[int]]):
        data = tuple(tuple(int(x) for x in row) for row in rows)
        if data and any(len(r) != len(data[0]) for r in data):
            raise ShapeError("ragged rows")
        for row in data:
            for x in row:
                if not isinstance(x, int):
                    raise TypeError("integer entries required")
        object.__setattr__(self, "data", data)
        object.__setattr__(self, "rows", len(data))
        object.__setattr__(self, "cols", len(data[0]) if data else 0)

    def __setattr__(self, name, value):
        raise AttributeError("IntMatrix is immutable")

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "IntMatrix":
        return cls([[0] * cols for _ in range(rows)])

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls([[1 if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def from_columns(cls, cols: Sequence[Sequence[int]], rows: int | None = None) -> "IntMatrix":
        cols = [tuple(int(x) for x in c) for c in cols]
        if rows is None:
            if not cols:
                raise ShapeError("row count needed for a matrix with no columns")
            rows = len(cols[0])
        if any(len(c) != rows for c in cols):
            raise ShapeError("ragged columns")
        return cls([[c[i] for c in cols] for i in range(rows)])

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def __getitem__(self, ij) -> int:
        i, j = ij
        return self.data[i][j]

    def column(self, j: int) -> tuple[int, ...]:
        return tuple(self.data[i][j] for i in range(self.rows))

    def columns(self) -> list[tuple[int, ...]]:
        return [self.column(j) for j in range(self.cols)]

    def __eq__(self, other) -> bool:
        return isinstance(other, IntMatrix) and self.data == other.data

    def __hash__(self) -> int:
        return hash(("IntMatrix", self.data))

    def __repr__(self) -> str:
        return f"IntMatrix({[list(r) for r in self.data]})"

    def __mul__(self, other: "IntMatrix") -> "IntMatrix":
        if not isinstance(other, IntMatrix):
            return NotImplemented
        if self.cols != other.rows:
            raise ShapeError("shape mismatch in multiplication")
        bt = list(zip(*other.data)) if other.data else []
        return IntMatrix(
            [[sum(a * b for a, b in zip(row, col)) for col in bt] for row in self.data]
        )

    def matvec(self, v: Sequence[int]) -> tuple[int, ...]:
        if len(v) != self.cols:
            raise ShapeError("shape mismatch in matvec")
        return tuple(sum(a * b for a, b in zip(row, v)) for row in self.data)

    def transpose(self) -> "IntMatrix":
        return IntMatrix(list(zip(*self.data))) if self.data else IntMatrix([])

    def hstack(self, other: "IntMatrix") -> "IntMatrix":
        if self.rows != other.rows:
            raise ShapeError("row mismatch in hstack")
        return IntMatrix([ra + rb for ra, rb in zip(self.data, other.data)])

    def to_rational(self) -> RatMatrix:
        return RatMatrix(self.data)

    def is_zero(self) -> bool:
        return all(x == 0 for row in self.data for x in row)


def int_det(m: IntMatrix) -> int:
    d = det(m.to_rational())
    assert d.denominator == 1
    return d.numerator


@dataclass(frozen=True)
class SnfResult:
    """Smith normal form S = U M V with U, V unimodular and
    nonnegative diagonal entries in a divisibility chain."""

    S: IntMatrix
    U: IntMatrix
    V: IntMatrix

    def diagonal(self) -> tuple[int, ...]:
        return tuple(
            self.S[i, i] for i in range(min(self.S.rows, self.S.cols))
        )


def smith_normal_form(m: IntMatrix) -> SnfResult:
    """Smith normal form with transformation matrices: U*M*V = S."""
    a = [list(row) for row in m.data]
    rows, cols = m.rows, m.cols
    u = [[1 if i == j else 0 for j in range(rows)] for i in range(rows)]
    v = [[1 if i == j else 0 for j in range(cols)] for i in range(cols)]

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for r in a:
            r[i], r[j] = r[j], r[i]
        for r in v:
            r[i], r[j] = r[j], r[i]

    def add_row(src, dst, f):
        a[dst] = [x + f * y for x, y in zip(a[dst], a[src])]
        u[dst] = [x + f * y for x, y in zip(u[dst], u[src])]

    def add_col(src, dst, f):
        for r in a:
            r[dst] += f * r[src]
        for r in v:
            r[dst] += f * r[src]

    def negate_row(i):
        a[i] = [-x for x in a[i]]
        u[i] = [-x for x in u[i]]

    def nearest_q(x, p):
        # quotient minimizing |x - q*p|, keeps entries near gcd scale
        q, r = divmod(x, p)
        if 2 * r > p:
            q += 1
        return q

    t = 0
    n = min(rows, cols)
    while t < n:
        # Move the smallest nonzero entry of the trailing block to (t, t).
        pivot = None
        for i in range(t, rows):
            for j in range(t, cols):
                if a[i][j] != 0:
                    if pivot is None or abs(a[i][j]) < abs(a[pivot[0]][pivot[1]]):
                        pivot = (i, j)
        if pivot is None:
            break
        swap_rows(t, pivot[0])
        swap_cols(t, pivot[1])
        while True:
            if a[t][t] < 0:
                negate_row(t)
            p = a[t][t]
            for i in range(t + 1, rows):
                if a[i][t] != 0:
                    add_row(t, i, -nearest_q(a[i][t], p))
            for j in range(t + 1, cols):
                if a[t][j] != 0:
                    add_col(t, j, -nearest_q(a[t][j], p))
            # residues (all smaller than the pivot) restart the reduction
            best = None
            for i in range(t + 1, rows):
                if a[i][t] != 0 and (best is None or abs(a[i][t]) < best[0]):
                    best = (abs(a[i][t]), i, None)
            for j in range(t + 1, cols):
                if a[t][j] != 0 and (best is None or abs(a[t][j]) < best[0]):
                    best = (abs(a[t][j]), None, j)
            if best is not None:
                if best[1] is not None:
                    swap_rows(t, best[1])
                else:
                    swap_cols(t, best[2])
                continue
            # pull any non-multiple of the pivot into row t and keep going,
            # so the pivot ends up dividing the whole trailing block
            culprit = None
            for i in range(t + 1, rows):
                for j in range(t + 1, cols):
                    if a[i][j] % p:
                        culprit = i
                        break
                if culprit is not None:
                    break
            if culprit is None:
                break
            add_row(culprit, t, 1)
        t += 1

    # Enforce the divisibility chain d_i | d_{i+1}.
    changed = True
    while changed:
        changed = False
        for i in range(n - 1):
            di, dj = a[i][i], a[i + 1][i + 1]
            if di == 0 and dj != 0:
                swap_rows(i, i + 1)
                swap_cols(i, i + 1)
                changed = True
                continue
            if dj % di if di else 0:
                # Standard 2x2 fix: fold d_{i+1} into row i and re-reduce.
                add_col(i + 1, i, 1)
                while a[i + 1][i] != 0:
                    q = a[i + 1][i] // a[i][i] if a[i][i] else 0
                    if a[i][i] != 0:
                        add_row(i, i + 1, -q)
                    if a[i + 1][i] != 0:
                        swap_rows(i, i + 1)
                # Clear the fill-in in row i.
                q = a[i][i + 1] // a[i][i]
                add_col(i, i + 1, -q)
                assert a[i][i + 1] == 0
                if a[i][i] < 0:
                    negate_row(i)
                if a[i + 1][i + 1] < 0:
                    negate_row(i + 1)
                changed = True
    return SnfResult(IntMatrix(a), IntMatrix(u), IntMatrix(v))


def column_hnf(m: IntMatrix) -> IntMatrix:
    """Canonical column-style Hermite normal form of the column lattice.

    Columns are in echelon form with positive pivots; entries left of a
    pivot (in its row) are reduced into [0, pivot).  Zero columns are
    dropped, so equal lattices give equal results.
    """
    cols = [list(c) for c in m.columns()]
    rows = m.rows
    out: list[list[int]] = []
    work = cols
    for r in range(rows):
        live = [c for c in work if c[r] != 0]
        rest = [c for c in work if c[r] == 0]
        if not live:
            work = rest
            continue
        # gcd-reduce all live columns into one pivot column
        while len(live) > 1:
            live.sort(key=lambda c: abs(c[r]))
            c0 = live[0]
            for c in live[1:]:
                q = c[r] // c0[r]
                for i in range(rows):
                    c[i] -= q * c0[i]
            dead = [c for c in live[1:] if c[r] == 0]
            live = [c0] + [c for c in live[1:] if c[r] != 0]
            rest.extend(dead)
        pivot = live[0]
        if pivot[r] < 0:
            for i in range(rows):
                pivot[i] = -pivot[i]
        # reduce previously fixed columns at row r
        for c in out:
            q = c[r] // pivot[r]
            if q:
                for i in range(rows):
                    c[i] -= q * pivot[i]
        out.append(pivot)
        work = rest
    return IntMatrix.from_columns(out, rows=rows) if out else IntMatrix.zeros(rows, 0)


def hnf_solve(h: IntMatrix, v: Sequence[int]) -> list[int] | None:
    """Solve H x = v over the integers for H in column HNF; None if no
    solution (i.e. v is outside the lattice)."""
    v = [int(x) for x in v]
    if len(v) != h.rows:
        raise ShapeError("vector length mismatch")
    res = [0] * h.cols
    residual = list(v)
    pivots = []
    for j in range(h.cols):
        r = next(i for i in range(h.rows) if h[i, j] != 0)
        pivots.append(r)
    for j in range(h.cols):
        r = pivots[j]
        if residual[r] % h[r, j] != 0:
            return None
        q = residual[r] // h[r, j]
        res[j] = q
        for i in range(h.rows):
            residual[i] -= q * h[i, j]
    if any(residual):
        return None
    return res


def integer_kernel(m: IntMatrix) -> IntMatrix:
    """Basis of the integer kernel {x : M x = 0} as columns (canonical HNF)."""
    snf = smith_normal_form(m)
    d = snf.diagonal()
    r = sum(1 for x in d if x != 0)
    # kernel basis = last cols-r columns of V
    cols = [snf.V.column(j) for j in range(r, m.cols)]
    if not cols:
        return IntMatrix.zeros(m.cols, 0)
    return column_hnf(IntMatrix.from_columns(cols, rows=m.cols))


def integer_solve(m: IntMatrix, v: Sequence[int]) -> list[int] | None:
    """One integer solution x of M x = v, or None if none exists."""
    v = [int(x) for x in v]
    if len(v) != m.rows:
        raise ShapeError("vector length mismatch")
    snf = smith_normal_form(m)
    uv = snf.U.matvec(v)
    d = snf.diagonal()
    z = [0] * m.cols
    for i in range(m.rows):
        di = d[i] if i < len(d) else 0
        if di == 0:
            if uv[i] != 0:
                return None
        else:
            if uv[i] % di != 0:
                return None
            if i < m.cols:
                z[i] = uv[i] // di
    return list(snf.V.matvec(z))


def lattice_contains(h: IntMatrix, v: Sequence[int]) -> bool:
    return hnf_solve(h, v) is not None


def lattice_sum(a: IntMatrix, b: IntMatrix) -> IntMatrix:
    return column_hnf(a.hstack(b))
