"""Dense eigenvalue and singular value routines.

Hermitian matrices go through Householder tridiagonalization followed by
implicit QL with Wilkinson shifts. General complex matrices are reduced to
upper Hessenberg form and iterated with single-shift complex QR. Only
eigenvalues are computed. Singular values come from the Gram matrix A*A.

The inner loops are compiled with numba; each call is single threaded.
"""
from __future__ import annotations

from dataclasses import dataclass

import numba
import numpy as np

from .errors import NoConvergence, NumericalFailure

EPS = np.finfo(float).eps
MAX_SWEEPS_PER_EIGENVALUE = 30
NEGATIVE_CLAMP = 1e-8


@dataclass
class Spectrum:
    """Eigenvalues (or singular values) plus a trace-identity residual.

    ``residual`` is ``max(|Tr A - sum l|, |Tr A^2 - sum l^2|)`` for
    eigenvalues, and ``|‖A‖_F^2 - sum s^2|`` for singular values.
    """

    values: np.ndarray
    residual: float = 0.0

    def __len__(self):
        return len(self.values)


# ---------------------------------------------------------------- kernels

@numba.njit(cache=True)
def _householder_vector(x):
    """v, beta with (I - beta v v^H) x = -phase(x0) ||x|| e_1."""
    s = 0.0
    for i in range(x.shape[0]):
        s = max(s, abs(x[i]))
    if s == 0.0:
        return x.copy(), 0.0, 0.0
    # work with x / s so tiny columns neither underflow nor give beta = inf
    v = x / s
    alpha = v[0]
    norm = np.sqrt(np.sum(v.real ** 2 + v.imag ** 2))
    a = abs(alpha)
    phase = alpha / a if a > 0.0 else 1.0 + 0.0j
    v[0] = alpha + phase * norm
    vv = np.sum(v.real ** 2 + v.imag ** 2)
    return v, 2.0 / vv, norm * s


@numba.njit(cache=True)
def _tridiagonalize(H):
    """Diagonal and |off-diagonal| of a Hermitian matrix's tridiagonal form."""
    n = H.shape[0]
    A = H.copy()
    d = np.zeros(n)
    e = np.zeros(n)
    for k in range(n - 2):
        x = A[k + 1:, k]
        v, beta, norm = _householder_vector(x)
        d[k] = A[k, k].real
        if beta == 0.0:
            e[k] = 0.0
            continue
        e[k] = norm
        S = A[k + 1:, k + 1:]
        m = S.shape[0]
        p = np.zeros(m, dtype=np.complex128)
        for i in range(m):
            acc = 0.0 + 0.0j
            for j in range(m):
                acc += S[i, j] * v[j]
            p[i] = beta * acc
        vp = 0.0 + 0.0j
        for i in range(m):
            vp += np.conj(v[i]) * p[i]
        K = 0.5 * beta * vp
        q = p - K * v
        for i in range(m):
            vi = v[i]
            qi = q[i]
            for j in range(m):
                S[i, j] -= vi * np.conj(q[j]) + qi * np.conj(v[j])
    if n >= 2:
        d[n - 2] = A[n - 2, n - 2].real
        e[n - 2] = abs(A[n - 1, n - 2])
    d[n - 1] = A[n - 1, n - 1].real
    return d, e


@numba.njit(cache=True)
def _tql_eigenvalues(d, e, max_iter):
    """Implicit QL with Wilkinson shift on a real symmetric tridiagonal.

    ``e[i]`` couples ``d[i]`` and ``d[i+1]``. Returns (eigenvalues, ok).
    """
    n = d.shape[0]
    d = d.copy()
    e = e.copy()
    # couplings below eps * ||T|| cannot move any eigenvalue by more than roundoff
    anorm = 0.0
    for i in range(n):
        anorm = max(anorm, abs(d[i]) + abs(e[i]) + (abs(e[i - 1]) if i > 0 else 0.0))
    floor = EPS * anorm
    for l in range(n):
        it = 0
        while True:
            m = l
            while m < n - 1:
                dd = abs(d[m]) + abs(d[m + 1])
                if abs(e[m]) <= EPS * dd or abs(e[m]) <= floor:
                    break
                m += 1
            if m == l:
                break
            it += 1
            if it > max_iter:
                return d, False
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = np.hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + (r if g >= 0.0 else -r))
            s = 1.0
            c = 1.0
            p = 0.0
            i = m - 1
            underflow = False
            while i >= l:
                f = s * e[i]
                b = c * e[i]
                r = np.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    underflow = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                i -= 1
            if underflow:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0.0
    return d, True


@numba.njit(cache=True)
def _hessenberg(A):
    n = A.shape[0]
    H = A.copy()
    for k in range(n - 2):
        v, beta, norm = _householder_vector(H[k + 1:, k])
        if beta == 0.0:
            continue
        # left: rows k+1.., columns k..
        for j in range(k, n):
            acc = 0.0 + 0.0j
            for i in range(k + 1, n):
                acc += np.conj(v[i - k - 1]) * H[i, j]
            acc *= beta
            for i in range(k + 1, n):
                H[i, j] -= v[i - k - 1] * acc
        # right: all rows, columns k+1..
        for i in range(n):
            acc = 0.0 + 0.0j
            for j in range(k + 1, n):
                acc += H[i, j] * v[j - k - 1]
            acc *= beta
            for j in range(k + 1, n):
                H[i, j] -= acc * np.conj(v[j - k - 1])
        for i in range(k + 2, n):
            H[i, k] = 0.0
    return H


@numba.njit(cache=True)
def _wilkinson_shift(a, b, c, d):
    """Eigenvalue of [[a, b], [c, d]] closest to d."""
    tr = 0.5 * (a + d)
    det = a * d - b * c
    disc = np.sqrt(tr * tr - det)
    l1 = tr + disc
    l2 = tr - disc
    return l1 if abs(l1 - d) <= abs(l2 - d) else l2


@numba.njit(cache=True)
def _hessenberg_qr(H, max_total):
    """Eigenvalues of an upper Hessenberg matrix by shifted complex QR.

    Only the active diagonal block is updated, which is enough for
    eigenvalues. Returns (eigenvalues, ok).
    """
    n = H.shape[0]
    H = H.copy()
    w = np.zeros(n, dtype=np.complex128)
    cs = np.zeros(n, dtype=np.complex128)
    sn = np.zeros(n, dtype=np.complex128)
    scale = 0.0
    for i in range(n):
        for j in range(n):
            scale = max(scale, abs(H[i, j]))
    tiny = EPS * max(scale, 1e-300)
    hi = n - 1
    its = 0
    total = 0
    while hi >= 0:
        l = hi
        while l > 0:
            local = abs(H[l - 1, l - 1]) + abs(H[l, l])
            if local == 0.0:
                local = tiny / EPS
            if abs(H[l, l - 1]) <= EPS * local:
                H[l, l - 1] = 0.0
                break
            l -= 1
        if l == hi:
            w[hi] = H[hi, hi]
            hi -= 1
            its = 0
            continue
        its += 1
        total += 1
        if total > max_total:
            return w, False
        if its % 10 == 0:
            # exceptional shift against stagnation
            mu = H[hi, hi] + abs(H[hi, hi - 1].real) + abs(H[hi - 1, hi - 2].real if hi - 2 >= l else 0.0)
        else:
            mu = _wilkinson_shift(H[hi - 1, hi - 1], H[hi - 1, hi], H[hi, hi - 1], H[hi, hi])
        for i in range(l, hi + 1):
            H[i, i] -= mu
        for k in range(l, hi):
            a = H[k, k]
            b = H[k + 1, k]
            r = np.sqrt(abs(a) ** 2 + abs(b) ** 2)
            if r == 0.0:
                c = 1.0 + 0.0j
                s = 0.0 + 0.0j
            else:
                c = a / r
                s = b / r
            cs[k] = c
            sn[k] = s
            cc = np.conj(c)
            sc = np.conj(s)
            for j in range(k, hi + 1):
                x = H[k, j]
                y = H[k + 1, j]
                H[k, j] = cc * x + sc * y
                H[k + 1, j] = -s * x + c * y
        for k in range(l, hi):
            c = cs[k]
            s = sn[k]
            cc = np.conj(c)
            sc = np.conj(s)
            top = min(k + 2, hi)
            for i in range(l, top + 1):
                x = H[i, k]
                y = H[i, k + 1]
                H[i, k] = x * c + y * s
                H[i, k + 1] = -x * sc + y * cc
        for i in range(l, hi + 1):
            H[i, i] += mu
    return w, True


# ---------------------------------------------------------------- public API

def _as_square(A) -> np.ndarray:
    A = np.ascontiguousarray(A, dtype=np.complex128)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {A.shape}")
    return A


def hermitian_eigenvalues(H) -> Spectrum:
    """Real eigenvalues of a Hermitian matrix, ascending."""
    H = _as_square(H)
    n = H.shape[0]
    if n == 0:
        return Spectrum(np.zeros(0))
    fro = np.linalg.norm(H)
    skew = np.linalg.norm(H - H.conj().T)
    if skew > 1e-10 * max(fro, 1e-300) and skew > 0:
        raise ValueError(f"matrix is not Hermitian (skew part {skew:.3e})")
    H = 0.5 * (H + H.conj().T)
    if n == 1:
        vals = np.array([H[0, 0].real])
    else:
        d, e = _tridiagonalize(H)
        vals, ok = _tql_eigenvalues(d, e, MAX_SWEEPS_PER_EIGENVALUE)
        if not ok:
            raise NoConvergence("tridiagonal QL exceeded the sweep limit")
        vals = np.sort(vals)
    tr = np.trace(H).real
    residual = max(abs(tr - vals.sum()), abs(fro ** 2 - np.sum(vals ** 2)))
    return Spectrum(vals, residual)


def complex_eigenvalues(A) -> Spectrum:
    """All eigenvalues of a general complex square matrix (unordered)."""
    A = _as_square(A)
    n = A.shape[0]
    if n == 0:
        return Spectrum(np.zeros(0, dtype=complex))
    if n == 1:
        vals = A[0].copy()
    else:
        H = _hessenberg(A)
        vals, ok = _hessenberg_qr(H, MAX_SWEEPS_PER_EIGENVALUE * n)
        if not ok:
            raise NoConvergence(f"Hessenberg QR exceeded {MAX_SWEEPS_PER_EIGENVALUE * n} iterations")
    residual = max(abs(np.trace(A) - vals.sum()),
                   abs(np.sum(A * A.T) - np.sum(vals ** 2)))
    return Spectrum(vals, float(residual))


def gram_eigenvalues(A) -> np.ndarray:
    """Squared singular values of A (eigenvalues of A*A), ascending and >= 0."""
    A = _as_square(A)
    G = A.conj().T @ A
    vals = hermitian_eigenvalues(G).values
    fro2 = np.linalg.norm(A) ** 2
    floor = -NEGATIVE_CLAMP * fro2
    if vals.size and vals[0] < floor:
        raise NumericalFailure(f"Gram eigenvalue {vals[0]:.3e} below clamp threshold {floor:.3e}")
    return np.maximum(vals, 0.0)


def singular_values(A) -> Spectrum:
    """Singular values of A, ascending, via the eigenvalues of A*A."""
    sq = gram_eigenvalues(A)
    fro2 = np.linalg.norm(A) ** 2
    return Spectrum(np.sqrt(sq), float(abs(fro2 - sq.sum())))


def least_singular_value(A) -> float:
    return float(singular_values(A).values[0])
