import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from spectra.eig import (complex_eigenvalues, gram_eigenvalues, hermitian_eigenvalues,
                         least_singular_value, singular_values)
from spectra.ensembles import EnsembleSpec, Kind, build, deterministic_part
from spectra.rng import SeedStream


def _sorted_c(z):
    z = np.asarray(z, dtype=complex)
    return z[np.lexsort((np.round(z.imag, 8), np.round(z.real, 8)))]


def _random_complex(n, seed):
    rng = np.random.default_rng(seed)
    return rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))


def test_hermitian_2x2():
    assert np.allclose(hermitian_eigenvalues([[2, 1], [1, 2]]).values, [1, 3])


def test_hermitian_identity():
    assert np.array_equal(hermitian_eigenvalues(np.eye(7)).values, np.ones(7))


def test_hermitian_frobenius_identity():
    X = _random_complex(6, 0)
    H = X + X.conj().T
    vals = hermitian_eigenvalues(H).values
    assert abs(np.sum(vals ** 2) - np.linalg.norm(H) ** 2) <= 1e-8 * np.linalg.norm(H) ** 2
    assert np.all(np.diff(vals) >= 0)
    assert vals.dtype == float


def test_hermitian_rejects_non_hermitian():
    with pytest.raises(ValueError):
        hermitian_eigenvalues([[1, 2], [0, 1]])


def test_hermitian_matches_lapack():
    for n in (2, 5, 40, 128):
        X = _random_complex(n, n)
        H = X + X.conj().T
        assert np.allclose(hermitian_eigenvalues(H).values, np.linalg.eigvalsh(H), atol=1e-9 * n)


def test_rank_deficient_hermitian():
    # many exact zeros and tiny Householder columns
    P = deterministic_part(EnsembleSpec(Kind.CHECKERBOARD, 32, 2))
    vals = hermitian_eigenvalues(P.conj().T @ P).values
    assert np.allclose(vals, np.linalg.eigvalsh(P.conj().T @ P), atol=1e-10)


def test_triangular_eigenvalues():
    T = np.array([[1, 5, 2], [0, 2j, 7], [0, 0, -3]], dtype=complex)
    assert np.allclose(_sorted_c(complex_eigenvalues(T).values), _sorted_c([1, 2j, -3]))


def test_checkerboard_deterministic_part():
    P = deterministic_part(EnsembleSpec(Kind.CHECKERBOARD, 8, 2))
    vals = complex_eigenvalues(P).values
    assert np.allclose(np.sort(vals.real), [0, 0, 0, 0, 0, 0, 4, 4], atol=1e-10)
    assert np.allclose(vals.imag, 0, atol=1e-10)


def test_companion():
    vals = complex_eigenvalues([[0, 1], [1, 0]]).values
    assert np.allclose(np.sort(vals.real), [-1, 1])


def test_complex_matches_lapack():
    for n in (3, 30, 150):
        X = _random_complex(n, 100 + n)
        ours = _sorted_c(complex_eigenvalues(X).values)
        ref = _sorted_c(np.linalg.eigvals(X))
        assert np.allclose(ours, ref, atol=1e-8 * n)


def test_singular_values_examples():
    assert np.allclose(singular_values(np.eye(4)).values, 1)
    assert np.allclose(singular_values(np.diag([3, 4j])).values, [3, 4])
    assert least_singular_value(np.diag([1.0, 2.0])) == pytest.approx(1.0)
    sing = np.array([[1, 2, 3], [1, 2, 3], [0, 1, 5]], dtype=complex)
    assert least_singular_value(sing) <= 1e-7


def test_blip_singular_value_location():
    A = build(EnsembleSpec(Kind.CHECKERBOARD, 100, 2), SeedStream(4))
    assert abs(singular_values(A).values[-1] - 50) <= 15


def test_gram_nonnegative():
    P = deterministic_part(EnsembleSpec(Kind.CHECKERBOARD, 16, 4))
    assert np.all(gram_eigenvalues(P) >= 0)


@given(st.integers(2, 24), st.integers(0, 10_000))
@settings(max_examples=25, deadline=None)
def test_trace_identities(n, seed):
    A = _random_complex(n, seed)
    spec = complex_eigenvalues(A)
    fro = np.linalg.norm(A)
    assert abs(np.trace(A) - spec.values.sum()) <= 1e-6 * (1 + fro)
    assert abs(np.trace(A @ A) - np.sum(spec.values ** 2)) <= 1e-6 * (1 + fro ** 2)
    sv = singular_values(A)
    assert abs(fro ** 2 - np.sum(sv.values ** 2)) <= 1e-8 * fro ** 2


@given(st.integers(2, 16), st.integers(0, 10_000))
@settings(max_examples=20, deadline=None)
def test_unitary_invariance(n, seed):
    rng = np.random.default_rng(seed)
    A = _random_complex(n, seed)
    D1 = np.diag(np.exp(2j * np.pi * rng.random(n)))
    D2 = np.diag(np.exp(2j * np.pi * rng.random(n)))
    a = singular_values(A).values
    b = singular_values(D1 @ A @ D2).values
    assert np.allclose(a, b, atol=1e-8 * max(1.0, a.max()))
