"""Complex matrices over the Gaussian rationals (a + b*i with a, b exact).

Enough linear algebra to manipulate permutation-type gates, Hermitian basis
elements and projectors exactly: products, conjugation, Hermitian checks, and
an exact positive-semidefiniteness test by symmetric congruence elimination.
Matrices are dicts {(row, col): (re, im)} holding only nonzero entries, since
everything in the stabilizer orbit is sparse.
"""

from __future__ import annotations

from fractions import Fraction

ZERO = (Fraction(0), Fraction(0))
ONE = (Fraction(1), Fraction(0))
I_UNIT = (Fraction(0), Fraction(1))


def cadd(a, b):
    return (a[0] + b[0], a[1] + b[1])


def csub(a, b):
    return (a[0] - b[0], a[1] - b[1])


def cmul(a, b):
    return (a[0] * b[0] - a[1] * b[1], a[0] * b[1] + a[1] * b[0])


def cconj(a):
    return (a[0], -a[1])


def cdiv(a, b):
    d = b[0] * b[0] + b[1] * b[1]
    n = cmul(a, cconj(b))
    return (n[0] / d, n[1] / d)


def centry(value) -> tuple:
    """Coerce int/Fraction/(re, im) to a Gaussian rational."""
    if isinstance(value, tuple):
        return (Fraction(value[0]), Fraction(value[1]))
    return (Fraction(value), Fraction(0))


class CMatrix:
    """Sparse exact complex matrix."""

    __slots__ = ("n", "entries")

    def __init__(self, n: int, entries: dict | None = None):
        self.n = n
        self.entries = {}
        if entries:
            for k, v in entries.items():
                v = centry(v)
                if v != ZERO:
                    self.entries[k] = v

    @classmethod
    def identity(cls, n: int) -> "CMatrix":
        return cls(n, {(i, i): ONE for i in range(n)})

    @classmethod
    def from_rows(cls, rows) -> "CMatrix":
        n = len(rows)
        ent = {}
        for i, row in enumerate(rows):
            for j, v in enumerate(row):
                c = centry(v)
                if c != ZERO:
                    ent[(i, j)] = c
        return cls(n, ent)

    def get(self, i, j):
        return self.entries.get((i, j), ZERO)

    def __eq__(self, other):
        return isinstance(other, CMatrix) and self.n == other.n and self.entries == other.entries

    def __hash__(self):
        return hash((self.n, tuple(sorted(self.entries.items()))))

    def __add__(self, other):
        out = dict(self.entries)
        for k, v in other.entries.items():
            s = cadd(out.get(k, ZERO), v)
            if s == ZERO:
                out.pop(k, None)
            else:
                out[k] = s
        return CMatrix(self.n, out)

    def __sub__(self, other):
        return self + other.scale((Fraction(-1), Fraction(0)))

    def scale(self, c) -> "CMatrix":
        c = centry(c)
        return CMatrix(self.n, {k: cmul(c, v) for k, v in self.entries.items()})

    def __matmul__(self, other: "CMatrix") -> "CMatrix":
        out: dict = {}
        cols: dict = {}
        for (i, j), v in other.entries.items():
            cols.setdefault(i, []).append((j, v))
        for (i, k), a in self.entries.items():
            for j, b in cols.get(k, ()):
                key = (i, j)
                s = cadd(out.get(key, ZERO), cmul(a, b))
                if s == ZERO:
                    out.pop(key, None)
                else:
                    out[key] = s
        return CMatrix(self.n, out)

    def dagger(self) -> "CMatrix":
        return CMatrix(self.n, {(j, i): cconj(v) for (i, j), v in self.entries.items()})

    def is_hermitian(self) -> bool:
        return self == self.dagger()

    def is_unitary(self) -> bool:
        return (self.dagger() @ self) == CMatrix.identity(self.n)

    def trace(self):
        t = ZERO
        for i in range(self.n):
            t = cadd(t, self.get(i, i))
        return t

    def hs_inner(self, other: "CMatrix"):
        """tr(self . other); real for Hermitian pairs."""
        return (self @ other).trace()

    def conjugate_by(self, U: "CMatrix") -> "CMatrix":
        return U @ self @ U.dagger()

    def kron(self, other: "CMatrix") -> "CMatrix":
        m = other.n
        ent = {}
        for (i, j), a in self.entries.items():
            for (k, l), b in other.entries.items():
                ent[(i * m + k, j * m + l)] = cmul(a, b)
        return CMatrix(self.n * m, ent)

    def is_psd(self) -> bool:
        """Exact PSD test for a Hermitian matrix via congruence elimination.

        Repeatedly eliminates with a strictly positive diagonal pivot; a zero
        diagonal entry forces its whole row/column to vanish, else the matrix
        is indefinite.  Works for singular matrices.
        """
        work = {k: v for k, v in self.entries.items()}
        n = self.n

        def get(i, j):
            return work.get((i, j), ZERO)

        remaining = list(range(n))
        while remaining:
            i = remaining[0]
            d = get(i, i)
            if d[1] != 0:
                raise ValueError("PSD test on a non-Hermitian matrix")
            if d[0] < 0:
                return False
            if d[0] == 0:
                if any(get(i, j) != ZERO or get(j, i) != ZERO for j in remaining[1:]):
                    return False
                remaining = remaining[1:]
                continue
            col = {j: get(j, i) for j in remaining[1:] if get(j, i) != ZERO}
            rowi = {k: get(i, k) for k in remaining[1:] if get(i, k) != ZERO}
            for j, aji in col.items():
                fj = cdiv(aji, d)
                for k, aik in rowi.items():
                    upd = csub(get(j, k), cmul(fj, aik))
                    if upd == ZERO:
                        work.pop((j, k), None)
                    else:
                        work[(j, k)] = upd
            remaining = remaining[1:]
        return True


def permutation_unitary(perm) -> CMatrix:
    """Unitary sending basis vector k to basis vector perm[k]."""
    n = len(perm)
    return CMatrix(n, {(perm[k], k): ONE for k in range(n)})
