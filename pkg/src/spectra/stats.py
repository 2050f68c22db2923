"""Distributional checks: CDF targets, KS distances, circular-law and blip tests."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from .errors import BadR, Empty
from .measures import DEFAULT_EPSILON, WeightedPointMeasure, check_epsilon, restrict

BLIP_DELTA = 0.1
OUTSIDE_MARGIN = 0.1


def _check_radius(R: float) -> None:
    if not R > 0 or not math.isfinite(R):
        raise BadR(f"radius must be positive and finite, got {R}")


def quarter_circle_cdf(x, R: float):
    """CDF of the density (4/(pi R^2)) sqrt(R^2 - t^2) on [0, R]."""
    _check_radius(R)
    u = np.clip(np.asarray(x, dtype=float) / R, 0.0, 1.0)
    out = (2.0 / np.pi) * (np.arcsin(u) + u * np.sqrt(1.0 - u * u))
    out = np.clip(out, 0.0, 1.0)
    return out if out.ndim else float(out)


def circular_radial_cdf(r, R: float):
    """P(|z| <= r) for z uniform on the disc of radius R."""
    _check_radius(R)
    out = np.clip(np.maximum(np.asarray(r, dtype=float), 0.0) / R, 0.0, 1.0) ** 2
    return out if out.ndim else float(out)


def rayleigh_cdf(sigma, N: int):
    s = np.maximum(np.asarray(sigma, dtype=float), 0.0)
    out = -np.expm1(-N * s * s / 2.0)
    return out if out.ndim else float(out)


def uniform_cdf(u):
    out = np.clip(np.asarray(u, dtype=float), 0.0, 1.0)
    return out if out.ndim else float(out)


def rayleigh_transform(samples, N: int) -> np.ndarray:
    """exp(-N s^2 / 2); uniform on [0, 1] when s follows p(s) = N s exp(-N s^2 / 2)."""
    s = np.asarray(samples, dtype=float)
    if np.any(s < 0):
        raise ValueError("singular values must be nonnegative")
    return np.exp(-N * s * s / 2.0)


@dataclass(frozen=True)
class CdfTarget:
    """A named one-dimensional CDF usable as a KS reference."""

    name: str
    param: float = 1.0
    _fn: Optional[Callable] = field(default=None, repr=False, compare=False)

    @classmethod
    def quarter_circle(cls, R: float) -> "CdfTarget":
        _check_radius(R)
        return cls("quarter-circle", R)

    @classmethod
    def circular_radial(cls, R: float) -> "CdfTarget":
        _check_radius(R)
        return cls("circular-radial", R)

    @classmethod
    def rayleigh(cls, N: int) -> "CdfTarget":
        return cls("rayleigh", N)

    @classmethod
    def uniform(cls) -> "CdfTarget":
        return cls("uniform")

    @classmethod
    def custom(cls, name: str, fn: Callable) -> "CdfTarget":
        return cls(name, 0.0, fn)

    def __call__(self, x):
        if self._fn is not None:
            return self._fn(x)
        if self.name == "quarter-circle":
            return quarter_circle_cdf(x, self.param)
        if self.name == "circular-radial":
            return circular_radial_cdf(x, self.param)
        if self.name == "rayleigh":
            return rayleigh_cdf(x, int(self.param))
        if self.name == "uniform":
            return uniform_cdf(x)
        raise ValueError(f"unknown CDF {self.name!r}")


def ks_distance(samples, target: Callable) -> float:
    """Kolmogorov-Smirnov distance between the empirical CDF of ``samples`` and ``target``."""
    x = np.sort(np.asarray(samples, dtype=float).ravel())
    n = x.size
    if n == 0:
        raise Empty("no samples")
    F = np.asarray(target(x), dtype=float)
    i = np.arange(1, n + 1)
    return float(max(np.max(np.abs(F - (i - 1) / n)), np.max(np.abs(F - i / n))))


# --------------------------------------------------------------- circular law

def bulk_eigenvalues(eigenvalues, n_blip: int) -> np.ndarray:
    """Drop the ``n_blip`` largest-modulus eigenvalues and scale the rest by 1/sqrt(N)."""
    lam = np.asarray(eigenvalues, dtype=complex)
    N = lam.size
    order = np.argsort(-np.abs(lam), kind="stable")
    return lam[order[n_blip:]] / math.sqrt(N)


@dataclass
class CircularLawReport:
    radial_ks: float
    angular_ks: float
    outside_fraction: float
    n_points: int


def circular_law_check(points, R: float, margin: float = OUTSIDE_MARGIN) -> CircularLawReport:
    """Radial KS against r^2/R^2, angular KS against uniform, and the share beyond R + margin."""
    z = np.asarray(points, dtype=complex).ravel()
    if z.size == 0:
        raise Empty("no points")
    radial = ks_distance(np.abs(z), CdfTarget.circular_radial(R))
    angles = np.mod(np.angle(z), 2 * np.pi) / (2 * np.pi)
    angular = ks_distance(angles, CdfTarget.uniform())
    outside = float(np.mean(np.abs(z) > R + margin))
    return CircularLawReport(radial, angular, outside, z.size)


# --------------------------------------------------------------- eigenvalue blip

@dataclass
class BlipMatch:
    max_distance: float
    deficit: int
    bulk_count: int
    n_atoms: int
    bulk_radius: float


def blip_match(measure: WeightedPointMeasure, targets: Sequence[complex],
               epsilon: float = DEFAULT_EPSILON, N: Optional[int] = None,
               delta: float = BLIP_DELTA) -> BlipMatch:
    """Match renormalized eigenvalues outside the epsilon ball to the nonzero spectrum of B.

    Pairs are taken greedily, nearest first. ``bulk_count`` counts atoms of
    the full measure within N^(-1/2 + delta) of the origin.
    """
    targets = [complex(t) for t in targets if abs(t) > 1e-12]
    check_epsilon(epsilon, targets)
    N = len(measure) if N is None else N
    outer = restrict(measure, epsilon).locations
    deficit = abs(outer.size - len(targets))

    max_dist = 0.0
    if targets and outer.size:
        D = np.abs(outer[:, None] - np.asarray(targets)[None, :])
        used_a, used_t = set(), set()
        for flat in np.argsort(D, axis=None, kind="stable"):
            a, t = np.unravel_index(flat, D.shape)
            if a in used_a or t in used_t:
                continue
            used_a.add(a)
            used_t.add(t)
            max_dist = max(max_dist, float(D[a, t]))
            if len(used_t) == len(targets) or len(used_a) == outer.size:
                break
    elif targets:
        max_dist = math.inf

    radius = N ** (-0.5 + delta) if N > 0 else 0.0
    bulk_count = int(np.sum(np.abs(measure.locations) <= radius))
    return BlipMatch(max_dist, deficit, bulk_count, outer.size, radius)


# --------------------------------------------------------------- joint density

def joint_density_unnormalized(x: Iterable[float]) -> float:
    """prod_{i<j} |x_i^2 - x_j^2| * prod_j x_j * exp(-sum_j x_j^2 / 2)."""
    # sorting first makes the value exactly permutation invariant
    x = np.sort(np.asarray(list(x), dtype=float))
    if np.any(x < 0):
        raise ValueError("singular values must be nonnegative")
    sq = x * x
    vdm = 1.0
    for i in range(x.size):
        for j in range(i + 1, x.size):
            vdm *= abs(sq[i] - sq[j])
    return float(vdm * np.prod(x) * np.exp(-sq.sum() / 2.0))


def joint_density_discrepancy(pairs, bins: int = 50, upper: float = 4.0) -> float:
    """Relative L1 gap between binned 2x2 singular-value pairs and the joint density.

    Pairs are symmetrized, so the histogram estimates the density of the
    unordered pair; the formula is evaluated at bin centres and normalized
    over the grid.
    """
    s = np.asarray(pairs, dtype=float)
    if s.ndim != 2 or s.shape[1] != 2:
        raise ValueError("expected an (n, 2) array of singular value pairs")
    if s.shape[0] == 0:
        raise Empty("no samples")
    a = np.concatenate([s[:, 0], s[:, 1]])
    b = np.concatenate([s[:, 1], s[:, 0]])
    H, edges, _ = np.histogram2d(a, b, bins=bins, range=[[0, upper], [0, upper]])
    H = H / H.sum()
    c = 0.5 * (edges[:-1] + edges[1:])
    X, Y = np.meshgrid(c, c, indexing="ij")
    F = np.abs(X ** 2 - Y ** 2) * X * Y * np.exp(-(X ** 2 + Y ** 2) / 2.0)
    F = F / F.sum()
    return float(np.abs(H - F).sum())

