"""Empirical moments and exact moment targets.

Closed forms return floats; combinatorial oracles stay in exact integer or
rational arithmetic until the caller converts.
"""
from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterator, List, Optional, Sequence, Tuple

import numpy as np

from .eig import gram_eigenvalues
from .errors import BadParams, EmptyMeasure, TooLarge
from .measures import BlipWeightParams, SpectralSample, WeightedPointMeasure, ebsssm

MAX_GOE_K = 5
MAX_GOE_R = 8
MAX_CJR_R = 6
MAX_IDENTITY_R = 4
MAX_IDENTITY_N = 256
MAX_ALTERNATING_M = 64


@dataclass
class MomentReport:
    r: int
    estimate: complex
    target: float
    tolerance: float
    relative: bool = True

    @property
    def abs_error(self) -> float:
        return float(abs(self.estimate - self.target))

    @property
    def rel_error(self) -> float:
        if self.target == 0:
            return math.inf if self.abs_error else 0.0
        return self.abs_error / abs(self.target)

    @property
    def passed(self) -> bool:
        err = self.rel_error if self.relative else self.abs_error
        return err <= self.tolerance


def empirical_moment(measure: WeightedPointMeasure, r: int, centered: bool = False,
                     normalized: bool = False):
    """sum_i w_i x_i^r, optionally about the weighted mean and/or divided by the mass."""
    if r < 0:
        raise ValueError("moment order must be nonnegative")
    if len(measure) == 0:
        raise EmptyMeasure("measure has no atoms")
    x, w = measure.locations, measure.weights
    mass = w.sum()
    if centered or normalized:
        if mass <= 0:
            raise EmptyMeasure("measure has zero total mass")
    if centered:
        x = x - np.sum(w * x) / mass
    value = np.sum(w * x ** r)
    if normalized:
        value = value / mass
    if np.iscomplexobj(value) and measure.domain == "real":
        value = value.real
    return value.item() if hasattr(value, "item") else value


def catalan(r: int) -> int:
    if r < 0:
        raise ValueError("r must be nonnegative")
    return math.comb(2 * r, r) // (r + 1)


def quarter_circle_target(r: int, k: int, m: int = 1) -> float:
    """C_r (1 - m/k)^r: bulk moments of the squared singular values over N."""
    if not 1 <= m < k:
        raise BadParams(f"need 1 <= m < k, got m={m}, k={k}")
    return catalan(r) * (1.0 - m / k) ** r


# --------------------------------------------------------------- hollow GOE

def _double_factorial_odd(m: int) -> int:
    """(2m - 1)!! = E[x^(2m)] for a standard normal x."""
    out = 1
    for j in range(1, 2 * m, 2):
        out *= j
    return out


@lru_cache(maxsize=None)
def hollow_goe_trace_moment(k: int, r: int) -> Fraction:
    """E[Tr B^r] for the k x k hollow GOE, by summing over closed index cycles."""
    if k < 1 or r < 0:
        raise ValueError("need k >= 1 and r >= 0")
    if k > MAX_GOE_K or r > MAX_GOE_R:
        raise TooLarge(f"enumeration capped at k <= {MAX_GOE_K}, r <= {MAX_GOE_R}")
    if r == 0:
        return Fraction(k)
    total = 0
    for idx in itertools.product(range(k), repeat=r):
        edges = Counter()
        for a, b in zip(idx, idx[1:] + idx[:1]):
            if a == b:
                break
            edges[(a, b) if a < b else (b, a)] += 1
        else:
            term = 1
            for count in edges.values():
                if count % 2:
                    term = 0
                    break
                term *= _double_factorial_odd(count // 2)
            total += term
    return Fraction(total)


def blip_centered_target(k: int, r: int) -> float:
    """Limit of the rth centered blip moment: (sqrt2/k)^r (1/k) E Tr B^r."""
    return (math.sqrt(2) / k) ** r / k * float(hollow_goe_trace_moment(k, r))


def blip_first_moment_target(k: int) -> float:
    return 2.0 * (k - 1) / k


# --------------------------------------------------------------- Hermitized moments

@dataclass(frozen=True)
class HermitizedPolynomial:
    """M_z^(r) = sum_j c_j |z|^(2j)."""

    r: int
    coefficients: Tuple[int, ...]

    def __post_init__(self):
        if len(self.coefficients) != self.r + 1:
            raise ValueError("need r + 1 coefficients")


def _dyck_matchings(length: int) -> Iterator[List[Tuple[int, int]]]:
    """Every balanced bracket word of the given length, as its list of matched pairs."""
    pairs: List[Tuple[int, int]] = []
    stack: List[int] = []

    def rec(pos):
        if pos == length:
            if not stack:
                yield list(pairs)
            return
        if len(stack) < length - pos:
            stack.append(pos)
            yield from rec(pos + 1)
            stack.pop()
        if stack:
            p = stack.pop()
            pairs.append((p, pos))
            yield from rec(pos + 1)
            pairs.pop()
            stack.append(p)

    yield from rec(0)


# Each factor of (X - z)^*(X - z) picks one of four products. Only the random
# letters contribute to the walk; '+' stands for X and '-' for X^*.
_LETTERS = {"alpha": "-+", "beta": "+", "gamma": "-", "delta": ""}


@lru_cache(maxsize=None)
def _signed_walk_count(word: str) -> int:
    """Closed tree walks on ``word``: every matched step pair has opposite signs."""
    if len(word) % 2:
        return 0
    return sum(1 for pairs in _dyck_matchings(len(word))
               if all(word[i] != word[j] for i, j in pairs))


def cjr_coefficients(r: int) -> HermitizedPolynomial:
    """Coefficients c_j of the rth Hermitized moment, by exhaustive enumeration.

    Each of the r factors (X^* - conj z)(X - z) expands into one of
    X^*X, -z X^*, -conj(z) X or |z|^2. A choice contributes to |z|^(2j) with
    j = (#X-only picks) + (#|z|^2 picks); its weight is the number of signed
    closed walks on plane trees that its word of X, X^* letters admits.
    """
    if r < 0:
        raise ValueError("r must be nonnegative")
    if r > MAX_CJR_R:
        raise TooLarge(f"cjr enumeration capped at r <= {MAX_CJR_R}")
    coeffs = [0] * (r + 1)
    for psi in itertools.product(_LETTERS, repeat=r):
        n_beta = psi.count("beta")
        if n_beta != psi.count("gamma"):
            continue
        word = "".join(_LETTERS[p] for p in psi)
        coeffs[n_beta + psi.count("delta")] += _signed_walk_count(word)
    return HermitizedPolynomial(r, tuple(coeffs))


def hermitized_moment_eval(poly: HermitizedPolynomial, z: complex) -> float:
    s = abs(z) ** 2
    return float(sum(c * s ** j for j, c in enumerate(poly.coefficients)))


def hermitized_empirical_moments(A: np.ndarray, z: complex, r_max: int,
                                 scale: float = 1.0) -> np.ndarray:
    """(1/N) Tr B^r for r = 1..r_max with B = (A/(scale sqrt N) - z)^*(A/(scale sqrt N) - z)."""
    N = A.shape[0]
    X = A / (scale * math.sqrt(N)) - z * np.eye(N)
    ev = gram_eigenvalues(X)
    return np.array([np.mean(ev ** r) for r in range(1, r_max + 1)])


# --------------------------------------------------------------- identities

def alternating_identity(m: int, p: int) -> int:
    """sum_j (-1)^(m-j) C(m, j) j^p; zero for p < m and m! for p = m."""
    if not 0 <= p <= m <= MAX_ALTERNATING_M:
        raise ValueError(f"need 0 <= p <= m <= {MAX_ALTERNATING_M}")
    return sum((-1) ** (m - j) * math.comb(m, j) * j ** p for j in range(m + 1))


def ebsssm_identity_check(A: np.ndarray, params: BlipWeightParams, r: int) -> float:
    """Relative gap between the direct blip moment and its trace expansion.

    The direct side sums w x^r over the blip measure built from the Gram
    eigenvalues. The gap is divided by sum w (|x| + N/k^2)^r. The trace side only uses powers of A*A computed by repeated
    multiplication, so the two routes share no eigenvalue computation.
    """
    A = np.asarray(A, dtype=complex)
    N, k, n = params.N, params.k, params.n
    if A.shape != (N, N):
        raise ValueError(f"matrix shape {A.shape} does not match N={N}")
    if r > MAX_IDENTITY_R or N > MAX_IDENTITY_N:
        raise TooLarge(f"identity check capped at r <= {MAX_IDENTITY_R}, N <= {MAX_IDENTITY_N}")
    if r < 0:
        raise ValueError("r must be nonnegative")

    sample = SpectralSample(singular_values=np.sqrt(gram_eigenvalues(A)))
    blip = ebsssm(sample, params)
    terms = blip.weights * blip.locations ** r
    lhs = float(terms.sum())

    G = (k / N) ** 2 * (A.conj().T @ A)
    G = 0.5 * (G + G.conj().T)
    top = 2 * n + r + 2 * n
    traces = [float(N)]
    P = np.eye(N, dtype=complex)
    for _ in range(top):
        P = P @ G
        traces.append(float(np.trace(P).real))
    rhs = 0.0
    scale = 0.0
    for j in range(2 * n + 1):
        for i in range(r + j + 1):
            t = math.comb(2 * n, j) * math.comb(r + j, i) * (-1) ** (r - i) * traces[2 * n + i]
            rhs += t
            scale += abs(t)
    factor = N ** r / k ** (2 * r + 1)
    rhs *= factor
    scale *= factor

    # Locations are measured against the blip centre scale N/k^2, so atoms
    # sitting exactly on the centre do not turn roundoff into O(1) residuals.
    denom = float(np.sum(blip.weights * (np.abs(blip.locations) + N / k ** 2) ** r))
    if denom == 0.0:
        return 0.0 if rhs == 0.0 else abs(rhs) / scale
    return abs(lhs - rhs) / denom


# --------------------------------------------------------------- non-regular example

NONREGULAR_PATTERN = [[1, None], [None, None]]


def nonregular_bulk_targets() -> Tuple[float, ...]:
    """Bulk squared-singular moments M_1..M_4 for the 2x2 pattern [[1, *], [*, *]]."""
    return (3 / 4, 10 / 8, 42 / 16, 198 / 32)


def pattern_bulk_moment(random_mask: Sequence[Sequence[bool]], r: int) -> Fraction:
    """Bulk moment M_r for a k x k pattern, counted over colored plane trees.

    Each vertex of an ordered tree with r edges gets a residue class in
    {0..k-1}; a coloring counts when every edge joins a pair of classes whose
    pattern cell is random. The moment is the count times k^-(r+1).
    """
    mask = np.asarray(random_mask, dtype=bool)
    k = mask.shape[0]
    if not np.array_equal(mask, mask.T):
        raise BadParams("pattern mask must be symmetric")
    if r == 0:
        return Fraction(1)
    if k ** (r + 1) * catalan(r) > 10 ** 7:
        raise TooLarge("pattern enumeration too large")
    total = 0
    for pairs in _dyck_matchings(2 * r):
        parent = _tree_parents(pairs, 2 * r)
        nodes = len(parent)
        for colors in itertools.product(range(k), repeat=nodes):
            if all(mask[colors[p], colors[c]] for c, p in enumerate(parent) if p is not None):
                total += 1
    return Fraction(total, k ** (r + 1))


def _tree_parents(pairs, length) -> List[Optional[int]]:
    """Parent array of the plane tree encoded by a bracket word (node 0 is the root)."""
    opens = {i for i, _ in pairs}
    parent: List[Optional[int]] = [None]
    stack = [0]
    for pos in range(length):
        if pos in opens:
            parent.append(stack[-1])
            stack.append(len(parent) - 1)
        else:
            stack.pop()
    return parent
