"""Scalar, vector and matrix arithmetic over two numeric backends.

Every quantity in the workbench is either an exact rational (``fractions.Fraction``)
or a double with an absolute comparison tolerance.  A :class:`Backend` value tags
which of the two regimes a system lives in; mixing regimes is an error at
construction time, never a silent coercion, so that "exact" really means exact.

Vectors are plain tuples of scalars and matrices are tuples of row tuples.  All
operations are pure functions; nothing here mutates its arguments.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction


class NumericsError(Exception):
    """Base class for numeric-kernel errors."""


class BackendMismatch(NumericsError):
    """A value of the wrong numeric regime was handed to a backend."""


class DimensionMismatch(NumericsError):
    """Vector/matrix shapes do not line up."""


RATIONAL_KIND = "rational"
FLOAT_KIND = "float"

DEFAULT_FLOAT_EPS = 1e-9


@dataclass(frozen=True)
class Backend:
    """Numeric regime: exact rationals, or floats with absolute tolerance ``eps``."""

    kind: str
    eps: float = DEFAULT_FLOAT_EPS

    @property
    def exact(self) -> bool:
        return self.kind == RATIONAL_KIND

    # -- scalar construction -------------------------------------------------

    def check(self, value):
        """Return ``value`` if it belongs to this backend, else raise."""
        if self.exact:
            if isinstance(value, bool) or not isinstance(value, (int, Fraction)):
                raise BackendMismatch(
                    f"rational backend got {type(value).__name__} value {value!r}"
                )
        else:
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise BackendMismatch(
                    f"float backend got {type(value).__name__} value {value!r}"
                )
        return value

    def coerce(self, value):
        """Parse ints, strings ("3/4", "0.25") and same-regime scalars.

        Floats are never turned into rationals and rationals never into floats.
        """
        if isinstance(value, str):
            if self.exact:
                return Fraction(value)
            return float(Fraction(value)) if "/" in value else float(value)
        if isinstance(value, bool):
            raise BackendMismatch("bool is not a scalar")
        if isinstance(value, int):
            return Fraction(value) if self.exact else float(value)
        self.check(value)
        return value if self.exact else float(value)

    @property
    def zero(self):
        return Fraction(0) if self.exact else 0.0

    @property
    def one(self):
        return Fraction(1) if self.exact else 1.0

    # -- comparisons ---------------------------------------------------------

    def eq(self, a, b) -> bool:
        self.check(a)
        self.check(b)
        if self.exact:
            return a == b
        return abs(a - b) <= self.eps

    def is_zero(self, a) -> bool:
        self.check(a)
        return a == 0 if self.exact else abs(a) <= self.eps

    def lt(self, a, b) -> bool:
        """Strictly less, beyond tolerance on the float backend."""
        self.check(a)
        self.check(b)
        if self.exact:
            return a < b
        return a < b - self.eps

    def le(self, a, b) -> bool:
        self.check(a)
        self.check(b)
        if self.exact:
            return a <= b
        return a <= b + self.eps

    def sign(self, a) -> int:
        if self.is_zero(a):
            return 0
        return 1 if a > 0 else -1


RATIONAL = Backend(RATIONAL_KIND)


def float_backend(eps: float = DEFAULT_FLOAT_EPS) -> Backend:
    return Backend(FLOAT_KIND, eps)


def scalar_eq(a, b, backend: Backend) -> bool:
    """Equality in the backend's sense; raises on cross-backend operands."""
    return backend.eq(a, b)


# ---------------------------------------------------------------------------
# vectors and matrices
# ---------------------------------------------------------------------------

def vec(values, backend: Backend) -> tuple:
    return tuple(backend.coerce(v) for v in values)


def mat(rows, backend: Backend) -> tuple:
    out = tuple(vec(r, backend) for r in rows)
    if out and any(len(r) != len(out[0]) for r in out):
        raise DimensionMismatch("ragged matrix")
    return out


def zeros(n: int, backend: Backend) -> tuple:
    return (backend.zero,) * n


def identity(n: int, backend: Backend) -> tuple:
    z, o = backend.zero, backend.one
    return tuple(tuple(o if i == j else z for j in range(n)) for i in range(n))


def dot(a, b):
    if len(a) != len(b):
        raise DimensionMismatch(f"dot of lengths {len(a)} and {len(b)}")
    acc = a[0] * 0 if a else 0
    for x, y in zip(a, b):
        if x and y:
            acc += x * y
    return acc


def vec_add(a, b):
    if len(a) != len(b):
        raise DimensionMismatch("vector sum of different lengths")
    return tuple(x + y for x, y in zip(a, b))


def vec_sub(a, b):
    if len(a) != len(b):
        raise DimensionMismatch("vector difference of different lengths")
    return tuple(x - y for x, y in zip(a, b))


def vec_scale(c, a):
    return tuple(c * x for x in a)


def mat_vec(A, x) -> tuple:
    """A @ x, skipping zero entries (the workbench's matrices are often sparse)."""
    if A and len(A[0]) != len(x):
        raise DimensionMismatch("matrix/vector mismatch")
    return tuple(dot(row, x) for row in A)


def vec_mat(x, A) -> tuple:
    """Row vector times matrix (effect pullback direction)."""
    if len(x) != len(A):
        raise DimensionMismatch("row-vector/matrix mismatch")
    if not A:
        return ()
    zero = x[0] * 0
    out = [zero] * len(A[0])
    for xi, row in zip(x, A):
        if not xi:
            continue
        for j, aij in enumerate(row):
            if aij:
                out[j] = out[j] + xi * aij
    return tuple(out)


def mat_mul(A, B) -> tuple:
    if not A:
        return ()
    if len(A[0]) != len(B):
        raise DimensionMismatch("matrix product shapes")
    Bt = transpose(B)
    return tuple(tuple(dot(row, col) for col in Bt) for row in A)


def transpose(A) -> tuple:
    return tuple(zip(*A)) if A else ()


def kron(a, b) -> tuple:
    """Kronecker product of two vectors (the composite product map on coordinates)."""
    return tuple(x * y for x in a for y in b)


def kron_mat(A, B) -> tuple:
    """Kronecker product of two matrices."""
    if not A or not B:
        return ()
    return tuple(
        tuple(a * b for a in arow for b in brow)
        for arow in A
        for brow in B
    )


# ---------------------------------------------------------------------------
# linear solving
# ---------------------------------------------------------------------------

def _eliminate(A, b, backend: Backend):
    """Forward elimination; returns (rows, rhs, pivot columns)."""
    rows = [list(r) for r in A]
    rhs = list(b) if b is not None else None
    m = len(rows)
    n = len(rows[0]) if rows else 0
    pivots = []
    r = 0
    for c in range(n):
        if r >= m:
            break
        if backend.exact:
            pivot_row = next(
                (i for i in range(r, m) if rows[i][c] != 0), None
            )
        else:
            idx = max(range(r, m), key=lambda i: (abs(rows[i][c]), -i))
            pivot_row = idx if abs(rows[idx][c]) > backend.eps else None
        if pivot_row is None:
            continue
        rows[r], rows[pivot_row] = rows[pivot_row], rows[r]
        if rhs is not None:
            rhs[r], rhs[pivot_row] = rhs[pivot_row], rhs[r]
        piv = rows[r][c]
        for i in range(m):
            if i == r or not rows[i][c]:
                continue
            factor = rows[i][c] / piv
            rows[i] = [x - factor * y for x, y in zip(rows[i], rows[r])]
            rows[i][c] = backend.zero
            if rhs is not None:
                rhs[i] = rhs[i] - factor * rhs[r]
        pivots.append(c)
        r += 1
    return rows, rhs, pivots


def solve_linear_system(A, b, backend: Backend):
    """Solve A x = b; returns None when inconsistent.

    Underdetermined systems get the Gaussian-elimination solution with all free
    variables set to zero.  Exact on the rational backend, within eps otherwise.
    """
    if len(A) != len(b):
        raise DimensionMismatch(f"{len(A)} equations but {len(b)} right-hand sides")
    if not A:
        return ()
    n = len(A[0])
    rows, rhs, pivots = _eliminate(A, b, backend)
    for i in range(len(pivots), len(rows)):
        if not backend.is_zero(rhs[i]):
            return None
    x = [backend.zero] * n
    for i, c in enumerate(pivots):
        x[c] = rhs[i] / rows[i][c]
    return tuple(x)


def matrix_rank(A, backend: Backend) -> int:
    if not A:
        return 0
    _, _, pivots = _eliminate(A, None, backend)
    return len(pivots)


def null_space(A, backend: Backend) -> list:
    """Basis of {x : A x = 0}, via back-substitution on the echelon form."""
    if not A:
        return []
    n = len(A[0])
    rows, _, pivots = _eliminate(A, None, backend)
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for f in free:
        x = [backend.zero] * n
        x[f] = backend.one
        for i, c in enumerate(pivots):
            x[c] = -rows[i][f] / rows[i][c]
        basis.append(tuple(x))
    return basis


def invert_matrix(A, backend: Backend):
    """Inverse of a square matrix, or None if singular."""
    n = len(A)
    if any(len(r) != n for r in A):
        raise DimensionMismatch("inverse of non-square matrix")
    aug = [list(r) + list(row) for r, row in zip(A, identity(n, backend))]
    rows, _, pivots = _eliminate(aug, None, backend)
    if len(pivots) < n or pivots != list(range(n)):
        return None
    inv = []
    for i in range(n):
        piv = rows[i][i]
        inv.append(tuple(x / piv for x in rows[i][n:]))
    return tuple(inv)


def row_space_basis(A, backend: Backend) -> list:
    """Linearly independent rows spanning the row space of A (original rows)."""
    basis = []
    taken = []
    for row in A:
        candidate = taken + [list(row)]
        if matrix_rank(candidate, backend) > len(taken):
            taken = candidate
            basis.append(tuple(row))
    return basis
