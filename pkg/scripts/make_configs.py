"""Regenerate the demo and acceptance run configs under configs/.

    python scripts/make_configs.py
"""
from __future__ import annotations

import json
from pathlib import Path

from spectra.ensembles import (EnsembleSpec, Kind, PatternMatrix, RandomSlot, ring_pattern,
                               roots_of_unity_pattern)

ROOT = Path(__file__).resolve().parents[1] / "configs"
SEED = 20240517  # fixed once for every shipped config; never tuned

SV = ["singular_values"]
EIG = ["eigenvalues"]


def config(spec: EnsembleSpec, trials: int, compute, checks, outputs: str) -> dict:
    return {"ensemble": spec.to_json(), "trials": trials, "seed": SEED, "compute": compute,
            "checks": checks, "outputs": outputs}


def demos() -> dict:
    ring_k = 12
    variance = PatternMatrix((
        (1, RandomSlot(1.0), RandomSlot(4.0)),
        (RandomSlot(1.0), 1, RandomSlot(9.0)),
        (RandomSlot(4.0), RandomSlot(9.0), 1),
    ))
    return {
        "fig3.json": config(
            EnsembleSpec(Kind.CHECKERBOARD, 100, 2), 2000, SV,
            [{"name": "bulk-sv", "tolerance": 0.05, "moments": [1, 2, 3]}], "runs/fig3"),
        "satellites.json": config(
            EnsembleSpec(Kind.GENERALIZED, 513, 3, pattern=roots_of_unity_pattern(3)), 20, EIG,
            [{"name": "blip-eig", "tolerance": 0.1, "epsilon": 0.5, "min_fraction": 0.9},
             {"name": "bulk-eig", "tolerance": 0.05, "outside_tolerance": 0.01}], "runs/satellites"),
        "ring.json": config(
            EnsembleSpec(Kind.GENERALIZED, 516, ring_k, pattern=ring_pattern(ring_k, SEED)), 6, EIG,
            [{"name": "blip-eig", "tolerance": 0.1, "epsilon": 0.75, "min_fraction": 0.9}], "runs/ring"),
        "variance-stack.json": config(
            EnsembleSpec(Kind.GENERALIZED, 510, 3, pattern=variance), 6, EIG + SV, [],
            "runs/variance-stack"),
    }


def acceptance() -> dict:
    nonregular = PatternMatrix(((1, RandomSlot()), (RandomSlot(), RandomSlot())))
    bulk = [{"name": "bulk-sv", "tolerance": 0.05, "moments": [1, 2, 3]}]
    return {
        "bulk-sv-k2.json": config(EnsembleSpec(Kind.CHECKERBOARD, 512, 2), 40, SV, bulk, "runs/bulk-sv-k2"),
        "bulk-sv-k4.json": config(EnsembleSpec(Kind.CHECKERBOARD, 512, 4), 40, SV, bulk, "runs/bulk-sv-k4"),
        "bulk-sv-nonregular.json": config(
            EnsembleSpec(Kind.GENERALIZED, 512, 2, pattern=nonregular), 40, SV, bulk,
            "runs/bulk-sv-nonregular"),
        "blip-sv.json": config(
            EnsembleSpec(Kind.CHECKERBOARD, 256, 2), 500, SV,
            [{"name": "blip-sv", "tolerance": 0.10, "odd_tolerance": 0.10, "window": 8.0}],
            "runs/blip-sv"),
        "bulk-eig.json": config(
            EnsembleSpec(Kind.CHECKERBOARD, 512, 2), 20, EIG,
            [{"name": "bulk-eig", "tolerance": 0.05, "outside_tolerance": 0.01, "margin": 0.1}],
            "runs/bulk-eig"),
        "blip-eig-k2.json": config(
            EnsembleSpec(Kind.CHECKERBOARD, 512, 2), 20, EIG,
            [{"name": "blip-eig", "tolerance": 0.1, "epsilon": 0.5, "min_fraction": 0.9}],
            "runs/blip-eig-k2"),
        "blip-eig-satellites.json": config(
            EnsembleSpec(Kind.GENERALIZED, 513, 3, pattern=roots_of_unity_pattern(3)), 20, EIG,
            [{"name": "blip-eig", "tolerance": 0.1, "epsilon": 0.5, "min_fraction": 0.9}],
            "runs/blip-eig-satellites"),
        "hermitized.json": config(
            EnsembleSpec(Kind.HOLLOW_CHECKERBOARD, 256, 2, w=0), 40, [],
            [{"name": "hermitized", "tolerance": 0.07, "z": [0, 1, [1, 1]], "r_max": 3}],
            "runs/hermitized"),
        "least-sv.json": config(
            EnsembleSpec(Kind.GAUSSIAN_COMPLEX_SYMMETRIC, 64), 2000, SV,
            [{"name": "least-sv", "tolerance": 0.05}], "runs/least-sv"),
        "joint-density.json": config(
            EnsembleSpec(Kind.GAUSSIAN_COMPLEX_SYMMETRIC, 2), 100000, SV,
            [{"name": "joint-density", "tolerance": 0.1, "bins": 50, "upper": 4.0}],
            "runs/joint-density"),
    }


def main() -> None:
    for sub, table in (("", demos()), ("acceptance", acceptance())):
        folder = ROOT / sub
        folder.mkdir(parents=True, exist_ok=True)
        for name, cfg in table.items():
            (folder / name).write_text(json.dumps(cfg, indent=2) + "\n")
            print(folder / name)


if __name__ == "__main__":
    main()
