"""Exact linear algebra over the rationals and prime fields.

Matrices are numpy arrays of dtype ``object`` whose entries are
``gmpy2.mpq`` (rationals) or Python ints reduced modulo ``p`` (prime
fields).  Every routine takes the :class:`Field` explicitly so that the
same code serves both cases.  Nothing here ever touches floating point.
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from fractions import Fraction

import gmpy2
import numpy as np
from gmpy2 import mpq

Matrix = np.ndarray


class FieldError(ValueError):
    """Raised for invalid field descriptions or elements."""


class Field:
    """The rationals (``p is None``) or the prime field with ``p`` elements."""

    __slots__ = ("p",)

    def __init__(self, p: int | None = None):
        if p is not None:
            p = int(p)
            if p < 2 or not gmpy2.is_prime(p):
                raise FieldError(f"{p} is not prime")
        self.p = p

    # -- identity -------------------------------------------------------
    @property
    def characteristic(self) -> int:
        return 0 if self.p is None else self.p

    @property
    def is_rational(self) -> bool:
        return self.p is None

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Field) and other.p == self.p

    def __hash__(self) -> int:
        return hash(("Field", self.p))

    def __repr__(self) -> str:
        return "Field(Q)" if self.p is None else f"Field(F_{self.p})"

    def describe(self) -> str:
        return "Q" if self.p is None else f"F {self.p}"

    # -- scalars --------------------------------------------------------
    @property
    def zero(self):
        return mpq(0) if self.p is None else 0

    @property
    def one(self):
        return mpq(1) if self.p is None else 1

    def __call__(self, x) -> object:
        """Coerce ``x`` (int, str, Fraction, mpq) into the field."""
        if isinstance(x, str):
            x = x.strip()
            try:
                x = Fraction(x)
            except ValueError as exc:
                raise FieldError(f"not a field element: {x!r}") from exc
        if self.p is None:
            if isinstance(x, float):
                raise FieldError("floating point values are not exact")
            return mpq(x)
        q = mpq(x)
        num, den = int(q.numerator), int(q.denominator)
        if den % self.p == 0:
            raise FieldError(f"denominator divisible by {self.p}")
        return (num * pow(den, -1, self.p)) % self.p

    def inv(self, x):
        if x == 0:
            raise ZeroDivisionError("inverse of zero")
        if self.p is None:
            return 1 / mpq(x)
        return pow(int(x), -1, self.p)

    def to_fraction(self, x) -> Fraction:
        if self.p is None:
            return Fraction(int(x.numerator), int(x.denominator))
        return Fraction(int(x))

    def format(self, x) -> str:
        if self.p is None:
            x = mpq(x)
            if x.denominator == 1:
                return str(x.numerator)
            return f"{x.numerator}/{x.denominator}"
        return str(int(x))

    # -- matrices -------------------------------------------------------
    def red(self, a: Matrix) -> Matrix:
        """Bring an object array back to canonical representatives."""
        if self.p is None:
            return a
        return a % self.p

    def zeros(self, rows: int, cols: int) -> Matrix:
        a = np.empty((rows, cols), dtype=object)
        a.fill(self.zero)
        return a

    def zero_vector(self, n: int) -> Matrix:
        a = np.empty(n, dtype=object)
        a.fill(self.zero)
        return a

    def eye(self, n: int) -> Matrix:
        a = self.zeros(n, n)
        for i in range(n):
            a[i, i] = self.one
        return a

    def matrix(self, rows: Iterable[Iterable], cols: int | None = None) -> Matrix:
        data = [[self(x) for x in row] for row in rows]
        if not data:
            return self.zeros(0, cols or 0)
        width = len(data[0])
        if any(len(r) != width for r in data):
            raise FieldError("ragged matrix")
        a = np.empty((len(data), width), dtype=object)
        for i, row in enumerate(data):
            for j, x in enumerate(row):
                a[i, j] = x
        return a

    def vector(self, entries: Iterable) -> Matrix:
        data = [self(x) for x in entries]
        a = np.empty(len(data), dtype=object)
        for i, x in enumerate(data):
            a[i] = x
        return a

    def coerce(self, a: Matrix) -> Matrix:
        """Coerce every entry of an array into the field."""
        out = np.empty(a.shape, dtype=object)
        flat_in = a.reshape(-1)
        flat_out = out.reshape(-1)
        for i, x in enumerate(flat_in):
            flat_out[i] = self(x)
        return out

    def mul(self, a: Matrix, b: Matrix) -> Matrix:
        """Matrix product that also handles empty shapes."""
        if a.shape[-1] == 0:
            shape = a.shape[:-1] + b.shape[1:]
            out = np.empty(shape, dtype=object)
            out.fill(self.zero)
            return out
        if a.ndim == 2 and a.shape[0] * a.shape[1] * b.shape[-1] > _SPARSE_WORK:
            mask = a != 0
            if np.count_nonzero(mask) < _SPARSE_DENSITY * a.size:
                return self._sparse_mul(a, b, mask)
        return self.red(a @ b)

    def _sparse_mul(self, a: Matrix, b: Matrix, mask: np.ndarray) -> Matrix:
        out = np.empty((a.shape[0],) + b.shape[1:], dtype=object)
        out.fill(self.zero)
        for i in range(a.shape[0]):
            idx = np.flatnonzero(mask[i])
            if idx.size:
                out[i] = a[i, idx] @ b[idx]
        return self.red(out)

    def random_matrix(self, rng, rows: int, cols: int, bound: int = 3) -> Matrix:
        a = self.zeros(rows, cols)
        for i in range(rows):
            for j in range(cols):
                a[i, j] = self(rng.randint(-bound, bound))
        return a


QQ = Field()

# object-array products switch to row-sparse evaluation above this many scalar
# multiplications when the left factor is mostly zero
_SPARSE_WORK = 20000
_SPARSE_DENSITY = 0.25


def is_zero(a: Matrix) -> bool:
    return a.size == 0 or not np.any(a != 0)


def rref(F: Field, M: Matrix) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form with leftmost-pivot tie-breaking.

    Returns the nonzero rows of the reduced form and the pivot columns.
    The result depends only on the row space of ``M``.
    """
    rows, cols = M.shape
    if rows == 0 or cols == 0:
        return F.zeros(0, cols), []
    A = M.copy()
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(A[r:, c])[0]
        if len(nz) == 0:
            continue
        p = r + int(nz[0])
        if p != r:
            A[[r, p]] = A[[p, r]]
        piv = A[r, c]
        if piv != 1:
            A[r] = F.red(A[r] * F.inv(piv))
        col = A[:, c].copy()
        col[r] = 0
        idx = np.nonzero(col)[0]
        if len(idx):
            A[idx] = F.red(A[idx] - np.multiply.outer(col[idx], A[r]))
        pivots.append(c)
        r += 1
    return A[:r].copy(), pivots


def rank(F: Field, M: Matrix) -> int:
    return len(rref(F, M)[1])


def kernel_basis(F: Field, M: Matrix) -> Matrix:
    """Rows spanning ``{x : M x = 0}``, in reduced echelon form."""
    rows, cols = M.shape
    R, pivots = rref(F, M)
    free = [c for c in range(cols) if c not in set(pivots)]
    K = F.zeros(len(free), cols)
    for k, f in enumerate(free):
        K[k, f] = F.one
        for i, p in enumerate(pivots):
            K[k, p] = F.red(-R[i, f])
    return rref(F, K)[0] if len(free) else K


def left_kernel(F: Field, M: Matrix) -> Matrix:
    """Rows ``y`` with ``y M = 0``, in reduced echelon form."""
    return kernel_basis(F, M.T)


def row_space(F: Field, M: Matrix) -> Matrix:
    return rref(F, M)[0]


def image_basis(F: Field, M: Matrix) -> Matrix:
    """Basis of the column space of ``M``, returned as rows."""
    return rref(F, M.T)[0]


def row_reduce(F: Field, M: Matrix) -> Matrix:
    return rref(F, M)[0]


def solve_linear(F: Field, A: Matrix, B: Matrix):
    """Solve ``A X = B``.

    Returns ``(X0, K)`` with ``A X0 = B`` and ``K`` a row basis of
    ``ker A``, or ``None`` when the system has no solution.
    """
    if A.shape[0] != B.shape[0]:
        raise ValueError(f"shape mismatch: {A.shape} vs {B.shape}")
    n = A.shape[1]
    vec = B.ndim == 1
    Bm = B.reshape(-1, 1) if vec else B
    aug = np.hstack([A, Bm]) if A.shape[0] else F.zeros(0, n + Bm.shape[1])
    R, pivots = rref(F, aug)
    if any(p >= n for p in pivots):
        return None
    X0 = F.zeros(n, Bm.shape[1])
    for i, p in enumerate(pivots):
        X0[p] = R[i, n:]
    K = kernel_basis(F, A) if A.shape[0] else F.eye(n)
    return (X0.reshape(-1) if vec else X0), K


def solve_left(F: Field, A: Matrix, B: Matrix):
    """Solve ``X A = B``; returns ``(X0, K)`` with ``K`` rows of the left kernel."""
    res = solve_linear(F, A.T, B.T)
    if res is None:
        return None
    X0, K = res
    return X0.T, K


def inverse(F: Field, M: Matrix) -> Matrix:
    n = M.shape[0]
    if M.shape != (n, n):
        raise ValueError("inverse of a non-square matrix")
    res = solve_linear(F, M, F.eye(n))
    if res is None or res[1].shape[0]:
        raise ZeroDivisionError("singular matrix")
    return res[0]


def block_diag(F: Field, blocks: Sequence[Matrix]) -> Matrix:
    rows = sum(b.shape[0] for b in blocks)
    cols = sum(b.shape[1] for b in blocks)
    out = F.zeros(rows, cols)
    r = c = 0
    for b in blocks:
        out[r : r + b.shape[0], c : c + b.shape[1]] = b
        r += b.shape[0]
        c += b.shape[1]
    return out


def hstack(F: Field, blocks: Sequence[Matrix], rows: int) -> Matrix:
    blocks = [b for b in blocks if b.shape[1]]
    if not blocks:
        return F.zeros(rows, 0)
    return np.hstack(blocks)


def vstack(F: Field, blocks: Sequence[Matrix], cols: int) -> Matrix:
    blocks = [b for b in blocks if b.shape[0]]
    if not blocks:
        return F.zeros(0, cols)
    return np.vstack(blocks)


class Subspace:
    """A subspace of ``F^n`` stored by its reduced echelon basis.

    Coordinates of a member are its entries at the pivot columns, which is
    what makes the echelon basis convenient for quotients and restrictions.
    """

    __slots__ = ("F", "_nonpivots", "basis", "n", "pivots")

    def __init__(self, F: Field, n: int, rows: Matrix | None = None, reduced: bool = False):
        self.F = F
        self.n = n
        if rows is None or rows.shape[0] == 0:
            self.basis = F.zeros(0, n)
            self.pivots: list[int] = []
        elif reduced:
            self.basis = rows
            self.pivots = [int(np.nonzero(r)[0][0]) for r in rows]
        else:
            self.basis, self.pivots = rref(F, rows)
        self._nonpivots: list[int] | None = None

    @classmethod
    def full(cls, F: Field, n: int) -> Subspace:
        return cls(F, n, F.eye(n), reduced=True)

    @property
    def dim(self) -> int:
        return len(self.pivots)

    @property
    def codim(self) -> int:
        return self.n - len(self.pivots)

    @property
    def nonpivots(self) -> list[int]:
        if self._nonpivots is None:
            ps = set(self.pivots)
            self._nonpivots = [c for c in range(self.n) if c not in ps]
        return self._nonpivots

    def reduce(self, v: Matrix) -> Matrix:
        """Canonical representative of ``v`` modulo the subspace (rows allowed)."""
        if not self.pivots:
            return v.copy()
        coeff = v[..., self.pivots]
        return self.F.red(v - self.F.mul(coeff, self.basis))

    def contains(self, v: Matrix) -> bool:
        return is_zero(self.reduce(v))

    def contains_space(self, other: Subspace) -> bool:
        return other.dim == 0 or is_zero(self.reduce(other.basis))

    def coords(self, v: Matrix) -> Matrix:
        """Coordinates in the echelon basis; ``v`` must lie in the subspace."""
        return v[..., self.pivots].copy()

    def quotient_matrix(self) -> Matrix:
        """Matrix of ``F^n -> F^n / U`` in the basis of non-pivot unit vectors."""
        F = self.F
        Q = F.zeros(self.n, self.codim)
        npv = self.nonpivots
        for j, c in enumerate(npv):
            Q[c, j] = F.one
        for i, p in enumerate(self.pivots):
            Q[p] = F.red(-self.basis[i, npv]) if npv else Q[p]
        return Q

    def complement_basis(self) -> Matrix:
        """Unit vectors at the non-pivot columns."""
        E = self.F.zeros(self.codim, self.n)
        for j, c in enumerate(self.nonpivots):
            E[j, c] = self.F.one
        return E

    def add(self, rows: Matrix) -> Subspace:
        if rows.shape[0] == 0:
            return self
        return Subspace(self.F, self.n, np.vstack([self.basis, rows]) if self.dim else rows)

    def intersect(self, other: Subspace) -> Subspace:
        F = self.F
        if self.dim == 0 or other.dim == 0:
            return Subspace(F, self.n)
        K = left_kernel(F, np.vstack([self.basis, other.basis]))
        if K.shape[0] == 0:
            return Subspace(F, self.n)
        return Subspace(F, self.n, F.mul(K[:, : self.dim], self.basis))

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, Subspace)
            and other.n == self.n
            and other.pivots == self.pivots
            and bool(np.all(other.basis == self.basis))
        )

    def __repr__(self) -> str:
        return f"Subspace(dim={self.dim}, ambient={self.n})"


class SparseEchelon:
    """Incremental reduced echelon basis for sparse vectors.

    Vectors are dicts ``{column: value}``.  Columns are compared by their
    natural order; the leftmost nonzero column becomes the pivot.
    """

    def __init__(self, F: Field):
        self.F = F
        self.rows: dict[int, dict[int, object]] = {}

    def reduce(self, v: dict) -> dict:
        F = self.F
        v = {c: x for c, x in v.items() if x != 0}
        changed = True
        while changed and v:
            changed = False
            for c in sorted(v):
                if c in self.rows:
                    x = v[c]
                    for cc, y in self.rows[c].items():
                        val = v.get(cc, F.zero) - x * y
                        if F.p is not None:
                            val %= F.p
                        if val == 0:
                            v.pop(cc, None)
                        else:
                            v[cc] = val
                    changed = True
                    break
        return v

    def insert(self, v: dict) -> bool:
        """Insert a vector; returns whether the span grew."""
        F = self.F
        v = self.reduce(v)
        if not v:
            return False
        p = min(v)
        inv = F.inv(v[p])
        row = {c: (x * inv if F.p is None else (x * inv) % F.p) for c, x in v.items()}
        for q, other in self.rows.items():
            x = other.get(p)
            if x:
                for cc, y in row.items():
                    val = other.get(cc, F.zero) - x * y
                    if F.p is not None:
                        val %= F.p
                    if val == 0:
                        other.pop(cc, None)
                    else:
                        other[cc] = val
        self.rows[p] = row
        return True

    @property
    def pivots(self) -> list[int]:
        return sorted(self.rows)


# -- polynomials over the field ---------------------------------------------

def min_poly(F: Field, mats: Sequence[Matrix]) -> list:
    """Minimal polynomial of a block-diagonal operator, lowest degree first."""
    blocks = [m for m in mats if m.shape[0]]
    if not blocks:
        return [F.one]

    def flat(ms):
        return np.concatenate([m.reshape(-1) for m in ms])

    current = [F.eye(m.shape[0]) for m in blocks]
    vecs = [flat(current)]
    while True:
        current = [F.mul(p, m) for p, m in zip(current, blocks)]
        v = flat(current)
        res = solve_left(F, np.vstack(vecs), v.reshape(1, -1))
        if res is not None:
            c = res[0].reshape(-1)
            return [F.red(np.array([-x], dtype=object))[0] for x in c] + [F.one]
        vecs.append(v)


def poly_eval(F: Field, coeffs: Sequence, mats: Sequence[Matrix]) -> list[Matrix]:
    """Evaluate a polynomial (lowest degree first) at a block-diagonal operator."""
    out = []
    for m in mats:
        d = m.shape[0]
        acc = F.zeros(d, d)
        for c in reversed(coeffs):
            acc = F.red(F.mul(acc, m) + c * F.eye(d)) if d else acc
        out.append(acc)
    return out


def factor_poly(F: Field, coeffs: Sequence) -> list[tuple[list, int]]:
    """Factor a monic polynomial into monic irreducibles with multiplicity."""
    import sympy

    x = sympy.Symbol("x")
    if F.p is None:
        expr = sum(sympy.Rational(int(c.numerator), int(c.denominator)) * x**i for i, c in enumerate(coeffs))
        poly = sympy.Poly(expr, x, domain=sympy.QQ)
    else:
        expr = sum(int(c) * x**i for i, c in enumerate(coeffs))
        poly = sympy.Poly(expr, x, modulus=F.p)
    _, factors = poly.factor_list()
    out = []
    for fac, mult in factors:
        cs = fac.all_coeffs()[::-1]
        lead = cs[-1]
        if F.p is None:
            vals = [F(Fraction(int(sympy.fraction(sympy.Rational(c) / lead)[0]), int(sympy.fraction(sympy.Rational(c) / lead)[1]))) for c in cs]
        else:
            li = pow(int(lead) % F.p, -1, F.p)
            vals = [(int(c) * li) % F.p for c in cs]
        out.append((vals, int(mult)))
    out.sort(key=lambda t: (len(t[0]), [F.to_fraction(v) for v in t[0]]))
    return out


def poly_mul(F: Field, a: Sequence, b: Sequence) -> list:
    out = [F.zero] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] = out[i + j] + x * y
    if F.p is not None:
        out = [v % F.p for v in out]
    return out


def poly_pow(F: Field, a: Sequence, k: int) -> list:
    out = [F.one]
    for _ in range(k):
        out = poly_mul(F, out, a)
    return out
