"""Centered EBSSSM moments for k=2, N=256 as the weight exponent n varies.

Diagnostic for the blip-sv criterion: shows the finite-N bias of the
centered second moment and how the spread shrinks with more trials.

    python scripts/blip_exponent_sweep.py --trials 3000
"""
import argparse

import numpy as np

from spectra.eig import singular_values
from spectra.ensembles import EnsembleSpec, Kind, build
from spectra.measures import BlipWeightParams, SpectralSample, ebsssm
from spectra.moments import empirical_moment
from spectra.rng import SeedStream


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--N", type=int, default=256)
    ap.add_argument("--trials", type=int, default=500)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--exponents", type=int, nargs="+", default=[2, 3, 4])
    args = ap.parse_args()

    spec = EnsembleSpec(Kind.CHECKERBOARD, args.N, 2)
    svs = [singular_values(build(spec, SeedStream(args.seed, t))).values for t in range(args.trials)]
    print("n,first,centered2,centered2_se,centered3")
    for n in args.exponents:
        params = BlipWeightParams(n, 2, args.N)
        rows = []
        for s in svs:
            m = ebsssm(SpectralSample(singular_values=s), params)
            rows.append([empirical_moment(m, 1), empirical_moment(m, 2, centered=True),
                         empirical_moment(m, 3, centered=True)])
        rows = np.array(rows)
        se = rows[:, 1].std(ddof=1) / np.sqrt(len(rows))
        print(f"{n},{rows[:, 0].mean():.4f},{rows[:, 1].mean():.4f},{se:.4f},{rows[:, 2].mean():.4f}")


if __name__ == "__main__":
    main()
