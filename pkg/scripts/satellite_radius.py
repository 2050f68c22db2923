"""Compare the bulk radius of the satellite ensemble with the N^-0.4 window.

The blip-eig bulk-count condition needs every renormalized bulk eigenvalue
inside |z| <= N^-0.4. The bulk edge sits near k R / sqrt(N), so the
condition can only hold once that edge drops under the window.

    python scripts/satellite_radius.py
"""
import math

import numpy as np

from spectra.eig import complex_eigenvalues
from spectra.ensembles import EnsembleSpec, Kind, build, roots_of_unity_pattern
from spectra.measures import SpectralSample, renormalized_spectral_measure
from spectra.rng import SeedStream


def main():
    k, m = 3, 1
    R = math.sqrt(1 - m / k)
    print("N,predicted_edge,window,observed_max_bulk")
    for N in (129, 258, 513):
        spec = EnsembleSpec(Kind.GENERALIZED, N, k, pattern=roots_of_unity_pattern(k))
        lam = complex_eigenvalues(build(spec, SeedStream(11))).values
        locs = renormalized_spectral_measure(SpectralSample(eigenvalues=lam), k).locations
        bulk = np.sort(np.abs(locs))[:-k]
        print(f"{N},{k * R / math.sqrt(N):.4f},{N ** -0.4:.4f},{bulk.max():.4f}")
    # k R / sqrt(N) < N^-0.4 exactly when N > (k R)^10
    print(f"k R = {k * R:.3f}; the window contains the bulk once N > {(k * R) ** 10:.0f}")


if __name__ == "__main__":
    main()
