import numpy as np
import pytest

from invspec.errors import InputError, SingularMatrixError
from invspec.linalg import lu_det, lu_solve, pivot_ratio


def cofactor_det(a: np.ndarray) -> complex:
    a = np.asarray(a, dtype=complex)
    n = a.shape[0]
    if n == 1:
        return complex(a[0, 0])
    total = 0j
    for col in range(n):
        minor = np.delete(np.delete(a, 0, axis=0), col, axis=1)
        total += (-1) ** col * a[0, col] * cofactor_det(minor)
    return total


def test_identity_and_diagonal():
    assert lu_det(np.eye(5)) == pytest.approx(1.0)
    assert lu_det(np.diag([2.0, 3j])) == pytest.approx(6j)


def test_det_matches_cofactor_oracle(rng):
    for _ in range(10):
        a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        expected = cofactor_det(a)
        assert abs(lu_det(a) - expected) <= 1e-12 * abs(expected)


def test_det_multiplicative(rng):
    for _ in range(5):
        a = rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6))
        b = rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6))
        lhs = lu_det(a @ b)
        rhs = lu_det(a) * lu_det(b)
        assert abs(lhs - rhs) <= 1e-10 * abs(rhs)


def test_singular_det_is_zero():
    a = np.array([[1.0, 2.0], [2.0, 4.0]])
    assert lu_det(a) == pytest.approx(0.0, abs=1e-14)


def test_solve_simple():
    assert np.allclose(lu_solve(np.eye(3), [1, 2, 3]), [1, 2, 3])
    assert np.allclose(lu_solve(np.diag([2.0, 4.0]), [2.0, 8.0]), [1.0, 2.0])


def test_solve_residual(rng):
    for _ in range(5):
        a = rng.normal(size=(10, 10)) + 1j * rng.normal(size=(10, 10))
        b = rng.normal(size=10) + 1j * rng.normal(size=10)
        x = lu_solve(a, b)
        assert np.abs(a @ x - b).max() <= 1e-11 * np.abs(b).max()


def test_solve_singular_raises_with_pivot():
    a = np.array([[1.0, 2.0], [2.0, 4.0]])
    with pytest.raises(SingularMatrixError) as err:
        lu_solve(a, [1.0, 1.0])
    assert err.value.pivot_index >= 0


def test_shape_validation():
    with pytest.raises(InputError):
        lu_det(np.zeros((2, 3)))
    with pytest.raises(InputError):
        lu_solve(np.eye(2), [1.0, 2.0, 3.0])


def test_pivot_ratio_detects_bad_conditioning():
    assert pivot_ratio(np.eye(4)) == pytest.approx(1.0)
    assert pivot_ratio(np.diag([1.0, 1e-14])) > 1e12
