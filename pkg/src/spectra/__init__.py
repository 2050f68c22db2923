"""Spectra of structured complex symmetric random matrices."""
from .ensembles import EnsembleSpec, Kind, PatternMatrix, RandomSlot, build
from .eig import complex_eigenvalues, hermitian_eigenvalues, singular_values
from .measures import BlipWeightParams, SpectralSample, WeightedPointMeasure
from .rng import SeedStream

__all__ = [
    "BlipWeightParams",
    "EnsembleSpec",
    "Kind",
    "PatternMatrix",
    "RandomSlot",
    "SeedStream",
    "SpectralSample",
    "WeightedPointMeasure",
    "build",
    "complex_eigenvalues",
    "hermitian_eigenvalues",
    "singular_values",
]
