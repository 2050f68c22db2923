"""Empirical point measures built from spectra.

A measure is a list of atoms (location, weight). Locations stay in full
precision; any binning happens downstream in plotting or statistics.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

from .errors import BadWeightExponent, CountMismatch, OmegaTooLarge

REAL = "real"
COMPLEX = "complex"
BULK_TRIM = 4.0
DEFAULT_EPSILON = 0.5


@dataclass
class SpectralSample:
    """One trial's eigenvalues and/or singular values with provenance."""

    eigenvalues: Optional[np.ndarray] = None
    singular_values: Optional[np.ndarray] = None
    seed: Optional[int] = None
    trial: Optional[int] = None

    @property
    def squared_singular_values(self) -> np.ndarray:
        if self.singular_values is None:
            raise CountMismatch("sample carries no singular values")
        return np.asarray(self.singular_values, dtype=float) ** 2


@dataclass
class WeightedPointMeasure:
    locations: np.ndarray
    weights: np.ndarray
    domain: str = REAL

    def __post_init__(self):
        dtype = complex if self.domain == COMPLEX else float
        self.locations = np.asarray(self.locations, dtype=dtype).ravel()
        self.weights = np.asarray(self.weights, dtype=float).ravel()
        if self.locations.shape != self.weights.shape:
            raise CountMismatch("locations and weights differ in length")
        if np.any(self.weights < 0):
            raise ValueError("weights must be nonnegative")

    def __len__(self):
        return self.locations.size

    @property
    def total_mass(self) -> float:
        return float(self.weights.sum())

    def select(self, keep: np.ndarray) -> "WeightedPointMeasure":
        return WeightedPointMeasure(self.locations[keep], self.weights[keep], self.domain)

    def to_jsonl(self) -> str:
        lines = []
        for x, w in zip(self.locations, self.weights):
            loc = [x.real, x.imag] if self.domain == COMPLEX else float(x)
            lines.append(json.dumps({"loc": loc, "w": float(w)}))
        return "\n".join(lines) + ("\n" if lines else "")

    @classmethod
    def from_jsonl(cls, text: str) -> "WeightedPointMeasure":
        locs, ws = [], []
        domain = REAL
        for line in text.splitlines():
            if not line.strip():
                continue
            atom = json.loads(line)
            loc = atom["loc"]
            if isinstance(loc, list):
                domain = COMPLEX
                loc = complex(loc[0], loc[1])
            locs.append(loc)
            ws.append(atom["w"])
        return cls(np.array(locs), np.array(ws), domain)


@dataclass(frozen=True)
class BlipWeightParams:
    """Weight exponent n for the blip measure of an N x N, k-patterned matrix.

    The exponent must satisfy ``4**n <= N``.
    """

    n: int
    k: int
    N: int

    def __post_init__(self):
        if self.n < 1:
            raise BadWeightExponent("weight exponent must be >= 1")
        if 4 ** self.n > self.N:
            raise BadWeightExponent(f"4**{self.n} exceeds N={self.N}")
        if self.k < 1 or self.N % self.k:
            raise CountMismatch(f"k={self.k} does not divide N={self.N}")

    @classmethod
    def for_size(cls, N: int, k: int) -> "BlipWeightParams":
        return cls(default_weight_exponent(N), k, N)


def default_weight_exponent(N: int) -> int:
    """n(N) = max(1, floor(3 log2(N) / 8))."""
    return max(1, int(math.floor(3 * math.log2(N) / 8)))


def weight_fn(x, n: int):
    """x^(2n) (x - 2)^(2n), evaluated through logarithms to avoid overflow."""
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore"):
        logs = 2 * n * (np.log(np.abs(x)) + np.log(np.abs(x - 2.0)))
    out = np.exp(logs)
    out = np.where((x == 0.0) | (x == 2.0), 0.0, out)
    return out if out.ndim else float(out)


def bulk_sq_singular_measure(sample: SpectralSample, N: int) -> WeightedPointMeasure:
    """Atoms at sigma^2 / N with weight 1/N each."""
    sq = sample.squared_singular_values
    if sq.size != N:
        raise CountMismatch(f"expected {N} singular values, got {sq.size}")
    return WeightedPointMeasure(sq / N, np.full(N, 1.0 / N), REAL)


def trim(measure: WeightedPointMeasure, upper: float = BULK_TRIM) -> WeightedPointMeasure:
    """Drop atoms located above ``upper`` (the blip of the squared bulk measure)."""
    return measure.select(measure.locations.real <= upper)


def ebsssm(sample: SpectralSample, params: BlipWeightParams) -> WeightedPointMeasure:
    """Blip measure of squared singular values.

    Atom at ``(sigma^2 - N^2/k^2) / N`` with weight ``f_n(k^2 sigma^2 / N^2) / k``.
    """
    N, k, n = params.N, params.k, params.n
    sq = sample.squared_singular_values
    if sq.size != N:
        raise CountMismatch(f"expected {N} singular values, got {sq.size}")
    centre = N * N / (k * k)
    locs = (sq - centre) / N
    weights = weight_fn(sq / centre, n) / k
    return WeightedPointMeasure(locs, weights, REAL)


def renormalized_spectral_measure(sample: SpectralSample, k: int,
                                  N: Optional[int] = None) -> WeightedPointMeasure:
    """Atoms at (k/N) lambda with weight 1/k; total mass N/k."""
    if sample.eigenvalues is None:
        raise CountMismatch("sample carries no eigenvalues")
    lam = np.asarray(sample.eigenvalues, dtype=complex)
    if N is None:
        N = lam.size
    if lam.size != N or N == 0:
        raise CountMismatch(f"expected {N} eigenvalues, got {lam.size}")
    return WeightedPointMeasure(lam * (k / N), np.full(N, 1.0 / k), COMPLEX)


def restrict(measure: WeightedPointMeasure, epsilon: float) -> WeightedPointMeasure:
    """Keep only atoms with |location| > epsilon."""
    return measure.select(np.abs(measure.locations) > epsilon)


def check_epsilon(epsilon: float, targets: Iterable[complex]) -> None:
    """Raise OmegaTooLarge unless epsilon is below every nonzero |target|."""
    mags = [abs(t) for t in targets if abs(t) > 1e-12]
    if epsilon <= 0:
        raise OmegaTooLarge("epsilon must be positive")
    if mags and epsilon >= min(mags):
        raise OmegaTooLarge(f"epsilon={epsilon} is not below min |eigenvalue| {min(mags):.4g}")
