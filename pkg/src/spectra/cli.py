"""Command line entry point: ``spectra simulate|verify|plot|oracle``."""
from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path
from typing import List, Optional

from . import moments
from . import simulate as sim
from .ensembles import EnsembleSpec, Kind, build
from .errors import SpectraError
from .measures import BlipWeightParams
from .rng import SeedStream


def _cmd_simulate(args) -> int:
    config = sim.RunConfig.load(args.config)
    records = sim.run_simulation(config, args.out, workers=args.workers)
    manifest = sim.load_manifest(args.out)
    state = "reused" if manifest["reused_cached_records"] else "wrote"
    print(f"{state} {len(records)} trial records in {args.out} (config {manifest['config_hash'][:12]})")
    return 0


def _cmd_verify(args) -> int:
    config = sim.RunConfig.load(args.config)
    manifest = sim.load_manifest(args.records)
    if manifest.get("records_key") != config.records_key():
        raise sim.MissingRecords(
            f"records in {args.records} were produced for a different ensemble, seed, trial count "
            "or compute list; rerun simulate")
    records = sim.load_records(args.records)
    verdicts = sim.run_verification(config, records)
    text = sim.verdicts_csv(verdicts)
    (Path(args.records) / sim.VERDICTS_FILE).write_text(text)
    sys.stdout.write(text)
    return 0 if all(v.passed for v in verdicts) else 1


def _cmd_plot(args) -> int:
    manifest = sim.load_manifest(args.records)
    spec = EnsembleSpec.from_json(manifest["config"]["ensemble"])
    records = sim.load_records(args.records)
    path = sim.emit_plot(records, args.kind, args.out, spec)
    print(f"wrote {path}")
    return 0


def _oracle_rows(table: str, r: Optional[int], k: Optional[int]) -> List[list]:
    rows = []
    if table == "catalan":
        for i in range(0, (r if r is not None else 10) + 1):
            rows.append([i, moments.catalan(i), "binom(2r,r)/(r+1)"])
    elif table == "cjr":
        for i in range(1, (r if r is not None else 4) + 1):
            coeffs = moments.cjr_coefficients(i).coefficients
            rows.append([i, " ".join(str(c) for c in coeffs), "signed tree-walk enumeration"])
    elif table == "hollow-goe":
        kk = k if k is not None else 2
        for i in range(0, (r if r is not None else 6) + 1):
            rows.append([i, str(moments.hollow_goe_trace_moment(kk, i)), f"Wick enumeration, k={kk}"])
    elif table == "identity":
        kk = k if k is not None else 2
        N = 32 * kk
        params = BlipWeightParams.for_size(N, kk)
        A = build(EnsembleSpec(Kind.CHECKERBOARD, N, kk), SeedStream(0, 0))
        for i in range(1, (r if r is not None else 2) + 1):
            rows.append([i, repr(moments.ebsssm_identity_check(A, params, i)),
                         f"relative residual, N={N}, k={kk}, n={params.n}"])
    elif table == "targets":
        kk = k if k is not None else 2
        for i in range(1, (r if r is not None else 4) + 1):
            rows.append([i, repr(moments.quarter_circle_target(i, kk)), f"bulk C_r(1-1/k)^r, k={kk}"])
        for i in range(1, (r if r is not None else 4) + 1):
            rows.append([i, repr(moments.blip_centered_target(kk, i)), f"blip centered, k={kk}"])
        rows.append([1, repr(moments.blip_first_moment_target(kk)), f"blip first moment, k={kk}"])
        for i, v in enumerate(moments.nonregular_bulk_targets(), start=1):
            rows.append([i, repr(v), "bulk, pattern [[1,*],[*,*]]"])
    else:
        raise ValueError(f"unknown oracle table {table!r}")
    return rows


def _cmd_oracle(args) -> int:
    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(["r", "value", "provenance"])
    writer.writerows(_oracle_rows(args.table, args.r, args.k))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="spectra", description="Structured random matrix spectra.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run trials and write records")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--workers", type=int, default=None)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("verify", help="check records against targets, write verdicts.csv")
    p.add_argument("--config", required=True)
    p.add_argument("--records", required=True)
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("plot", help="render an SVG from records")
    p.add_argument("--records", required=True)
    p.add_argument("--kind", required=True, choices=sim.PLOT_KINDS)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_plot)

    p = sub.add_parser("oracle", help="print an exact target table as CSV")
    p.add_argument("table", choices=["catalan", "cjr", "hollow-goe", "identity", "targets"])
    p.add_argument("--r", type=int, default=None)
    p.add_argument("--k", type=int, default=None)
    p.set_defaults(func=_cmd_oracle)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (SpectraError, OSError, json.JSONDecodeError) as exc:
        print(f"spectra: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
