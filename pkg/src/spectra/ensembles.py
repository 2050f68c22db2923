"""Structured random matrix ensembles.

All builders are pure functions of an :class:`EnsembleSpec` and a
:class:`~spectra.rng.SeedStream`. Random cells are filled in a fixed order
(row-major over the upper triangle for symmetric kinds, row-major over all
random cells otherwise) so that equal streams give bit-identical matrices.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence, Union

import numpy as np

from .errors import AsymmetricPattern, BadSpec, NonDivisible
from .rng import SeedStream

MAX_N = 4096


class Kind(str, Enum):
    CHECKERBOARD = "checkerboard"
    HOLLOW_CHECKERBOARD = "hollow-checkerboard"
    GENERALIZED = "generalized"
    GAUSSIAN_COMPLEX_SYMMETRIC = "gaussian-complex-symmetric"
    GAUSSIAN_COMPLEX_ASYMMETRIC = "gaussian-complex-asymmetric"
    HOLLOW_GOE = "hollow-goe"

    @classmethod
    def parse(cls, name: Union[str, "Kind"]) -> "Kind":
        if isinstance(name, Kind):
            return name
        key = str(name).lower().replace("-", "").replace("_", "")
        for kind in cls:
            if kind.value.replace("-", "") == key:
                return kind
        raise BadSpec(f"unknown ensemble kind {name!r}")


PATTERNED = (Kind.CHECKERBOARD, Kind.HOLLOW_CHECKERBOARD, Kind.GENERALIZED)


@dataclass(frozen=True)
class RandomSlot:
    """A pattern cell filled with an independent complex Gaussian."""

    variance: float = 1.0


Cell = Union[complex, RandomSlot]


@dataclass(frozen=True)
class PatternMatrix:
    """k x k grid of deterministic values and random slots, tiled over the matrix."""

    cells: tuple

    def __post_init__(self):
        rows = tuple(tuple(_coerce_cell(c) for c in row) for row in self.cells)
        k = len(rows)
        if k == 0 or any(len(row) != k for row in rows):
            raise BadSpec("pattern must be a nonempty square grid")
        object.__setattr__(self, "cells", rows)

    @property
    def k(self) -> int:
        return len(self.cells)

    @classmethod
    def from_numeric(cls, values, random_mask) -> "PatternMatrix":
        values = np.asarray(values, dtype=complex)
        random_mask = np.asarray(random_mask, dtype=bool)
        return cls(tuple(
            tuple(RandomSlot() if random_mask[i, j] else complex(values[i, j])
                  for j in range(values.shape[1]))
            for i in range(values.shape[0])))

    def deterministic_mask(self) -> np.ndarray:
        return np.array([[not isinstance(c, RandomSlot) for c in row] for row in self.cells])

    def numeric(self) -> np.ndarray:
        """The matrix B: deterministic values, random slots replaced by 0."""
        return np.array([[0j if isinstance(c, RandomSlot) else c for c in row]
                         for row in self.cells], dtype=complex)

    def variances(self) -> np.ndarray:
        return np.array([[c.variance if isinstance(c, RandomSlot) else 0.0 for c in row]
                         for row in self.cells])

    def is_symmetric(self) -> bool:
        det = self.deterministic_mask()
        if not np.array_equal(det, det.T):
            return False
        B = self.numeric()
        var = self.variances()
        return bool(np.array_equal(B, B.T) and np.array_equal(var, var.T))

    def to_json(self) -> list:
        return [[_cell_to_json(c) for c in row] for row in self.cells]

    @classmethod
    def from_json(cls, rows: Sequence[Sequence]) -> "PatternMatrix":
        return cls(tuple(tuple(_cell_from_json(c) for c in row) for row in rows))


def _coerce_cell(c) -> Cell:
    if isinstance(c, RandomSlot):
        return c
    if c is None:
        return RandomSlot()
    return complex(c)


def _cell_to_json(c: Cell):
    if isinstance(c, RandomSlot):
        return "rand" if c.variance == 1.0 else {"rand": {"var": c.variance}}
    return {"det": {"re": c.real, "im": c.imag}}


def _cell_from_json(c) -> Cell:
    if c == "rand":
        return RandomSlot()
    if isinstance(c, dict) and "rand" in c:
        return RandomSlot(float(c["rand"].get("var", 1.0)))
    if isinstance(c, dict) and "det" in c:
        return _complex_from_json(c["det"])
    raise BadSpec(f"bad pattern cell {c!r}")


def _complex_from_json(obj) -> complex:
    if isinstance(obj, dict):
        return complex(float(obj.get("re", 0.0)), float(obj.get("im", 0.0)))
    return complex(obj)


@dataclass(frozen=True)
class EnsembleSpec:
    """Recipe for drawing one N x N matrix."""

    kind: Kind
    N: int
    k: int = 1
    w: complex = 1.0 + 0j
    pattern: Optional[PatternMatrix] = None
    symmetric: bool = True

    def __post_init__(self):
        object.__setattr__(self, "kind", Kind.parse(self.kind))
        object.__setattr__(self, "w", complex(self.w))
        if self.pattern is not None and not isinstance(self.pattern, PatternMatrix):
            object.__setattr__(self, "pattern", PatternMatrix(self.pattern))
        if self.N < 1 or self.k < 1:
            raise BadSpec("N and k must be positive")
        if self.N > MAX_N:
            raise BadSpec(f"N={self.N} exceeds the cap {MAX_N}")
        if self.kind is Kind.GENERALIZED:
            if self.pattern is None:
                raise BadSpec("generalized ensembles need a pattern")
            if self.pattern.k != self.k:
                raise BadSpec(f"pattern is {self.pattern.k}x{self.pattern.k}, expected k={self.k}")
            if self.symmetric and not self.pattern.is_symmetric():
                raise AsymmetricPattern("symmetric ensemble needs a transpose-symmetric pattern")
        if self.kind is Kind.HOLLOW_GOE and self.N != self.k:
            raise BadSpec("hollow GOE is k x k; set N = k")
        if self.kind in PATTERNED and self.N % self.k:
            raise NonDivisible(f"k={self.k} does not divide N={self.N}")

    def with_N(self, N: int) -> "EnsembleSpec":
        return EnsembleSpec(self.kind, N, self.k, self.w, self.pattern, self.symmetric)

    def to_json(self) -> dict:
        out = {"kind": self.kind.value, "k": self.k, "N": self.N,
               "w": {"re": self.w.real, "im": self.w.imag}, "symmetric": self.symmetric}
        if self.pattern is not None:
            out["pattern"] = self.pattern.to_json()
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "EnsembleSpec":
        pattern = obj.get("pattern")
        return cls(
            kind=Kind.parse(obj["kind"]),
            N=int(obj["N"]),
            k=int(obj.get("k", 1)),
            w=_complex_from_json(obj.get("w", 1.0)),
            pattern=PatternMatrix.from_json(pattern) if pattern is not None else None,
            symmetric=bool(obj.get("symmetric", True)),
        )


def _fill(det_mask, det_values, variances, symmetric, stream):
    """Place deterministic values and draw the random cells in canonical order."""
    N = det_mask.shape[0]
    A = np.where(det_mask, det_values, 0j).astype(complex)
    rand = ~det_mask
    if symmetric:
        rows, cols = np.nonzero(np.triu(rand))
    else:
        rows, cols = np.nonzero(rand)
    draws = stream.complex_normals(rows.size)
    draws *= np.sqrt(variances[rows, cols])
    A[rows, cols] = draws
    if symmetric:
        A[cols, rows] = draws
    if not np.all(np.isfinite(A)):
        raise BadSpec("non-finite entries produced")
    return A


def _tiled(spec: EnsembleSpec, pattern: PatternMatrix):
    reps = spec.N // spec.k
    det = np.tile(pattern.deterministic_mask(), (reps, reps))
    vals = np.tile(pattern.numeric(), (reps, reps))
    var = np.tile(pattern.variances(), (reps, reps))
    return det, vals, var


def pattern_of(spec: EnsembleSpec) -> PatternMatrix:
    """The k x k pattern that tiles a checkerboard-type matrix."""
    if spec.kind is Kind.GENERALIZED:
        return spec.pattern
    if spec.kind not in PATTERNED:
        raise BadSpec(f"{spec.kind.value} has no pattern")
    w = 0j if spec.kind is Kind.HOLLOW_CHECKERBOARD else spec.w
    return PatternMatrix(tuple(
        tuple(w if i == j else RandomSlot() for j in range(spec.k)) for i in range(spec.k)))


def regularity_of(pattern: PatternMatrix) -> Optional[int]:
    """m if every pattern row holds exactly m deterministic cells, else None."""
    counts = set(pattern.deterministic_mask().sum(axis=1).tolist())
    if len(counts) == 1:
        m = counts.pop()
        return m if m > 0 else None
    return None


def build_checkerboard(spec: EnsembleSpec, stream: SeedStream) -> np.ndarray:
    if spec.kind not in (Kind.CHECKERBOARD, Kind.HOLLOW_CHECKERBOARD):
        raise BadSpec(f"build_checkerboard got kind {spec.kind.value}")
    if spec.N % spec.k:
        raise NonDivisible(f"k={spec.k} does not divide N={spec.N}")
    det, vals, var = _tiled(spec, pattern_of(spec))
    return _fill(det, vals, var, spec.symmetric, stream)


def build_generalized(spec: EnsembleSpec, stream: SeedStream) -> np.ndarray:
    if spec.kind is not Kind.GENERALIZED:
        raise BadSpec(f"build_generalized got kind {spec.kind.value}")
    if spec.N % spec.k:
        raise NonDivisible(f"k={spec.k} does not divide N={spec.N}")
    if spec.symmetric and not spec.pattern.is_symmetric():
        raise AsymmetricPattern("symmetric ensemble needs a transpose-symmetric pattern")
    det, vals, var = _tiled(spec, spec.pattern)
    return _fill(det, vals, var, spec.symmetric, stream)


def build_gaussian(spec: EnsembleSpec, stream: SeedStream) -> np.ndarray:
    """Unstructured complex Gaussian matrices.

    The symmetric kind has density proportional to ``exp(-Tr A*A / 2)``:
    off-diagonal entries have ``E|a|^2 = 1`` and diagonal entries ``E|a|^2 = 2``.
    The asymmetric kind has iid entries with ``E|a|^2 = 1``.
    """
    N = spec.N
    det = np.zeros((N, N), dtype=bool)
    if spec.kind is Kind.GAUSSIAN_COMPLEX_SYMMETRIC:
        var = np.ones((N, N)) + np.eye(N)
        return _fill(det, det, var, True, stream)
    if spec.kind is Kind.GAUSSIAN_COMPLEX_ASYMMETRIC:
        return _fill(det, det, np.ones((N, N)), False, stream)
    raise BadSpec(f"build_gaussian got kind {spec.kind.value}")


def build_hollow_goe(k: int, stream: SeedStream) -> np.ndarray:
    """k x k real symmetric matrix, zero diagonal, iid N(0,1) above it."""
    if k < 1:
        raise BadSpec("k must be positive")
    rows, cols = np.triu_indices(k, 1)
    x = stream.normals(rows.size)
    B = np.zeros((k, k), dtype=complex)
    B[rows, cols] = x
    B[cols, rows] = x
    return B


def build(spec: EnsembleSpec, stream: SeedStream) -> np.ndarray:
    """Dispatch on ``spec.kind``."""
    if spec.kind in (Kind.CHECKERBOARD, Kind.HOLLOW_CHECKERBOARD):
        return build_checkerboard(spec, stream)
    if spec.kind is Kind.GENERALIZED:
        return build_generalized(spec, stream)
    if spec.kind is Kind.HOLLOW_GOE:
        return build_hollow_goe(spec.k, stream)
    return build_gaussian(spec, stream)


def hollow_of(spec: EnsembleSpec) -> EnsembleSpec:
    """Same ensemble with every deterministic cell set to 0."""
    if spec.kind in (Kind.CHECKERBOARD, Kind.HOLLOW_CHECKERBOARD):
        return EnsembleSpec(Kind.HOLLOW_CHECKERBOARD, spec.N, spec.k, 0j, None, spec.symmetric)
    if spec.kind is Kind.GENERALIZED:
        p = spec.pattern
        zeroed = tuple(tuple(c if isinstance(c, RandomSlot) else 0j for c in row) for row in p.cells)
        return EnsembleSpec(Kind.GENERALIZED, spec.N, spec.k, spec.w, PatternMatrix(zeroed), spec.symmetric)
    raise BadSpec(f"{spec.kind.value} has no deterministic part")


def deterministic_part(spec: EnsembleSpec) -> np.ndarray:
    """The N x N matrix P of tiled deterministic values (random cells zeroed)."""
    reps = spec.N // spec.k
    return np.tile(pattern_of(spec).numeric(), (reps, reps))


def roots_of_unity_pattern(k: int) -> PatternMatrix:
    """Diagonal k-th roots of unity, random elsewhere (the 'satellites' demo)."""
    return PatternMatrix(tuple(
        tuple(cmath.exp(2j * math.pi * i / k) if i == j else RandomSlot() for j in range(k))
        for i in range(k)))


def ring_pattern(k: int, seed: int) -> PatternMatrix:
    """Diagonal cells drawn once, uniformly on the unit circle, random elsewhere."""
    phases = SeedStream(seed, 0).uniforms(k)
    return PatternMatrix(tuple(
        tuple(cmath.exp(2j * math.pi * phases[i]) if i == j else RandomSlot() for j in range(k))
        for i in range(k)))
