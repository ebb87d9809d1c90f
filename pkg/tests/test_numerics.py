"""Numeric kernel: backends, exact solving, arithmetic laws."""

from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from gptdarwin import numerics as nm
from gptdarwin.numerics import RATIONAL, BackendMismatch, float_backend, scalar_eq

FLOAT = float_backend()

rationals = st.builds(
    Fraction,
    st.integers(min_value=-50, max_value=50),
    st.integers(min_value=1, max_value=20),
)


def test_scalar_eq_rational():
    assert scalar_eq(Fraction(1, 3), Fraction(2, 6), RATIONAL)
    assert not scalar_eq(Fraction(1, 3), Fraction(1, 4), RATIONAL)


def test_scalar_eq_float_tolerance():
    assert scalar_eq(0.1 + 0.2, 0.3, FLOAT)
    assert not scalar_eq(0.1, 0.2, FLOAT)


def test_scalar_eq_cross_backend_is_error():
    with pytest.raises(BackendMismatch):
        scalar_eq(Fraction(1, 3), 0.3333, RATIONAL)
    with pytest.raises(BackendMismatch):
        scalar_eq(Fraction(1, 3), 0.3333, FLOAT)


def test_coerce_parses_fraction_strings():
    assert RATIONAL.coerce("3/4") == Fraction(3, 4)
    assert RATIONAL.coerce(2) == Fraction(2)
    with pytest.raises(BackendMismatch):
        RATIONAL.coerce(0.5)


def test_solve_identity():
    A = nm.identity(3, RATIONAL)
    x = nm.solve_linear_system(A, nm.vec([1, 2, 3], RATIONAL), RATIONAL)
    assert x == nm.vec([1, 2, 3], RATIONAL)


def test_solve_free_variables_zeroed():
    A = nm.mat([[1, 1]], RATIONAL)
    x = nm.solve_linear_system(A, nm.vec([0], RATIONAL), RATIONAL)
    assert x == (Fraction(0), Fraction(0))


def test_solve_inconsistent_returns_none():
    A = nm.mat([[1, 1], [1, 1]], RATIONAL)
    assert nm.solve_linear_system(A, nm.vec([1, 2], RATIONAL), RATIONAL) is None


def test_solve_float_partial_pivoting():
    A = nm.mat([[1e-12, 1.0], [1.0, 1.0]], float_backend())
    x = nm.solve_linear_system(A, (1.0, 2.0), float_backend())
    assert abs(x[0] - 1.0) < 1e-6 and abs(x[1] - 1.0) < 1e-6


@given(st.lists(rationals, min_size=4, max_size=4),
       st.lists(rationals, min_size=2, max_size=2))
def test_solve_recovers_consistent_rhs(entries, sol):
    A = (tuple(entries[:2]), tuple(entries[2:]))
    b = nm.mat_vec(A, tuple(sol))
    x = nm.solve_linear_system(A, b, RATIONAL)
    assert x is not None
    assert nm.mat_vec(A, x) == b


@given(rationals, rationals, rationals)
def test_rational_arithmetic_laws(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert a * b == b * a
    assert a * (b + c) == a * b + a * c


def test_rank_and_nullspace():
    A = nm.mat([[1, 2, 3], [2, 4, 6], [0, 1, 1]], RATIONAL)
    assert nm.matrix_rank(list(A), RATIONAL) == 2
    for v in nm.null_space(list(A), RATIONAL):
        assert nm.mat_vec(A, v) == nm.zeros(3, RATIONAL)


def test_invert_round_trip():
    A = nm.mat([[1, 2], [3, 5]], RATIONAL)
    inv = nm.invert_matrix(A, RATIONAL)
    assert nm.mat_mul(A, inv) == nm.identity(2, RATIONAL)
    assert nm.invert_matrix(nm.mat([[1, 2], [2, 4]], RATIONAL), RATIONAL) is None


def test_kron_vectors():
    a = nm.vec([1, 2], RATIONAL)
    b = nm.vec([3, 4], RATIONAL)
    assert nm.kron(a, b) == nm.vec([3, 4, 6, 8], RATIONAL)
