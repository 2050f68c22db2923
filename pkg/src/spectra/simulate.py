"""Batch driver: run trials, store records, verify against targets, plot.

A run directory holds

* ``records.jsonl``: one TrialRecord per line, sorted by trial index;
* ``timings.jsonl``: wall time per trial (kept apart so records are byte-stable);
* ``manifest.json``: config, config hash and the content key of the records;
* ``verdicts.csv``: written by verification.
"""
from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np

from . import ensembles as ens
from .eig import complex_eigenvalues, gram_eigenvalues
from .errors import BadSpec, MissingRecords, NumericalFailure
from .measures import (BlipWeightParams, SpectralSample, bulk_sq_singular_measure, ebsssm,
                       renormalized_spectral_measure, trim)
from .moments import (blip_centered_target, blip_first_moment_target, cjr_coefficients,
                      ebsssm_identity_check, empirical_moment, hermitized_empirical_moments,
                      hermitized_moment_eval, pattern_bulk_moment, quarter_circle_target)
from .rng import SeedStream
from .stats import (CdfTarget, blip_match, bulk_eigenvalues, circular_law_check,
                    joint_density_discrepancy, ks_distance, rayleigh_transform)
from . import svg

EIGENVALUES = "eigenvalues"
SINGULAR_VALUES = "singular_values"
RECORDS_FILE = "records.jsonl"
TIMINGS_FILE = "timings.jsonl"
MANIFEST_FILE = "manifest.json"
VERDICTS_FILE = "verdicts.csv"
SEED_ENV = "SPECTRA_SEED"


@dataclass
class RunConfig:
    ensemble: ens.EnsembleSpec
    trials: int
    seed: int
    outputs: str = "runs/default"
    checks: List[dict] = field(default_factory=list)
    compute: List[str] = field(default_factory=lambda: [EIGENVALUES, SINGULAR_VALUES])
    workers: Optional[int] = None

    def __post_init__(self):
        if self.trials < 1:
            raise BadSpec("trials must be >= 1")
        self.seed = int(self.seed) & ((1 << 64) - 1)
        unknown = [c for c in self.compute if c not in (EIGENVALUES, SINGULAR_VALUES)]
        if unknown:
            raise BadSpec(f"unknown compute targets {unknown}")
        for check in self.checks:
            if check.get("name") not in CHECKS:
                raise BadSpec(f"unknown check {check.get('name')!r}; known: {sorted(CHECKS)}")

    def to_json(self) -> dict:
        return {"ensemble": self.ensemble.to_json(), "trials": self.trials, "seed": self.seed,
                "outputs": self.outputs, "checks": self.checks, "compute": list(self.compute),
                "workers": self.workers}

    @classmethod
    def from_json(cls, obj: dict, env: Optional[dict] = None) -> "RunConfig":
        env = os.environ if env is None else env
        seed = int(env[SEED_ENV]) if env.get(SEED_ENV) else int(obj.get("seed", 0))
        return cls(
            ensemble=ens.EnsembleSpec.from_json(obj["ensemble"]),
            trials=int(obj["trials"]),
            seed=seed,
            outputs=obj.get("outputs", "runs/default"),
            checks=list(obj.get("checks", [])),
            compute=list(obj.get("compute", [EIGENVALUES, SINGULAR_VALUES])),
            workers=obj.get("workers"),
        )

    @classmethod
    def load(cls, path, env: Optional[dict] = None) -> "RunConfig":
        with open(path) as fh:
            return cls.from_json(json.load(fh), env)

    def config_hash(self) -> str:
        return _sha256(self.to_json())

    def records_key(self) -> str:
        """Content address of the trial records: ensemble, seed, trials and what was computed."""
        return _sha256({"ensemble": self.ensemble.to_json(), "seed": self.seed,
                        "trials": self.trials, "compute": sorted(self.compute)})


def _sha256(obj) -> str:
    return hashlib.sha256(json.dumps(obj, sort_keys=True).encode()).hexdigest()


@dataclass
class TrialRecord:
    trial: int
    seed: int
    eigenvalues: Optional[np.ndarray] = None
    singular_values: Optional[np.ndarray] = None
    wall_time: float = 0.0

    @property
    def stream_key(self):
        """The (seed, trial) key of the Philox stream that produced this trial."""
        return [self.seed, self.trial]

    def sample(self) -> SpectralSample:
        return SpectralSample(self.eigenvalues, self.singular_values, self.seed, self.trial)

    def to_json_line(self) -> str:
        out = {"trial": self.trial, "seed": self.seed, "stream_key": self.stream_key}
        if self.eigenvalues is not None:
            out["eigenvalues"] = [[float(z.real), float(z.imag)] for z in self.eigenvalues]
        if self.singular_values is not None:
            out["singular_values"] = [float(s) for s in self.singular_values]
        return json.dumps(out)

    @classmethod
    def from_json_line(cls, line: str) -> "TrialRecord":
        obj = json.loads(line)
        eig = obj.get("eigenvalues")
        sv = obj.get("singular_values")
        return cls(
            trial=obj["trial"],
            seed=obj["seed"],
            eigenvalues=None if eig is None else np.array([complex(a, b) for a, b in eig], dtype=complex),
            singular_values=None if sv is None else np.array(sv, dtype=float),
        )


# --------------------------------------------------------------- simulation

def draw_matrix(spec: ens.EnsembleSpec, seed: int, trial: int) -> np.ndarray:
    return ens.build(spec, SeedStream(seed, trial))


def run_trial(spec: ens.EnsembleSpec, seed: int, trial: int, compute: Sequence[str]) -> TrialRecord:
    start = time.perf_counter()
    A = draw_matrix(spec, seed, trial)
    eig = sv = None
    try:
        if EIGENVALUES in compute:
            eig = np.sort_complex(complex_eigenvalues(A).values)
        if SINGULAR_VALUES in compute:
            sv = np.sqrt(gram_eigenvalues(A))
    except NumericalFailure as exc:
        err = NumericalFailure(f"trial {trial}: {exc}")
        err.trial = trial
        raise err from exc
    return TrialRecord(trial, seed, eig, sv, time.perf_counter() - start)


def _run_chunk(args) -> List[TrialRecord]:
    spec_json, seed, trials, compute = args
    spec = ens.EnsembleSpec.from_json(spec_json)
    return [run_trial(spec, seed, t, compute) for t in trials]


def _chunks(n: int, parts: int) -> List[List[int]]:
    size = max(1, math.ceil(n / parts))
    return [list(range(i, min(n, i + size))) for i in range(0, n, size)]


def simulate_records(config: RunConfig, workers: Optional[int] = None) -> List[TrialRecord]:
    """Run every trial; the result depends only on (ensemble, seed, trials)."""
    workers = workers or config.workers or os.cpu_count() or 1
    if workers <= 1 or config.trials == 1:
        return [run_trial(config.ensemble, config.seed, t, config.compute) for t in range(config.trials)]
    jobs = [(config.ensemble.to_json(), config.seed, chunk, list(config.compute))
            for chunk in _chunks(config.trials, 4 * workers)]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        out = [rec for chunk in pool.map(_run_chunk, jobs) for rec in chunk]
    return sorted(out, key=lambda r: r.trial)


def _file_sha(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 20), b""):
            h.update(block)
    return h.hexdigest()


def run_simulation(config: RunConfig, out_dir=None, workers: Optional[int] = None,
                   reuse: bool = True) -> List[TrialRecord]:
    """Simulate into ``out_dir`` and return the records.

    Existing records are reused when their content key matches, so a config
    that only changes check tolerances does not rerun any trial.
    """
    out = Path(out_dir or config.outputs)
    out.mkdir(parents=True, exist_ok=True)
    records_path = out / RECORDS_FILE
    manifest_path = out / MANIFEST_FILE
    key = config.records_key()

    if reuse and manifest_path.exists() and records_path.exists():
        old = json.loads(manifest_path.read_text())
        if old.get("records_key") == key and old.get("records_sha256") == _file_sha(records_path):
            records = load_records(out)
            _write_manifest(manifest_path, config, key, old["records_sha256"], reused=True)
            return records

    records = simulate_records(config, workers)
    with open(records_path, "w") as fh:
        for rec in records:
            fh.write(rec.to_json_line() + "\n")
    with open(out / TIMINGS_FILE, "w") as fh:
        for rec in records:
            fh.write(json.dumps({"trial": rec.trial, "wall_time": rec.wall_time}) + "\n")
    _write_manifest(manifest_path, config, key, _file_sha(records_path), reused=False)
    return records


def _write_manifest(path: Path, config: RunConfig, key: str, sha: str, reused: bool) -> None:
    manifest = {"config": config.to_json(), "config_hash": config.config_hash(),
                "records_key": key, "records_sha256": sha, "trials": config.trials,
                "reused_cached_records": reused}
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")


def load_records(records_dir) -> List[TrialRecord]:
    path = Path(records_dir) / RECORDS_FILE
    if not path.exists():
        raise MissingRecords(f"no {RECORDS_FILE} in {records_dir}")
    with open(path) as fh:
        records = [TrialRecord.from_json_line(line) for line in fh if line.strip()]
    return sorted(records, key=lambda r: r.trial)


def load_manifest(records_dir) -> dict:
    path = Path(records_dir) / MANIFEST_FILE
    if not path.exists():
        raise MissingRecords(f"no {MANIFEST_FILE} in {records_dir}")
    return json.loads(path.read_text())


# --------------------------------------------------------------- verification

@dataclass
class Verdict:
    check: str
    statistic: float
    target: float
    tolerance: float
    passed: bool

    def row(self) -> List:
        return [self.check, repr(float(self.statistic)), repr(float(self.target)),
                repr(float(self.tolerance)), "pass" if self.passed else "fail"]


def _need(records: Sequence[TrialRecord], attr: str, check: str):
    if not records:
        raise MissingRecords(f"{check}: no trial records")
    if any(getattr(r, attr) is None for r in records):
        raise MissingRecords(f"{check}: records lack {attr}")


def _regularity(spec: ens.EnsembleSpec) -> Optional[int]:
    return ens.regularity_of(ens.pattern_of(spec))


def _blip_targets(spec: ens.EnsembleSpec) -> np.ndarray:
    B = ens.pattern_of(spec).numeric()
    vals = np.linalg.eigvals(B)
    return vals[np.abs(vals) > 1e-12]


def check_bulk_sv(config: RunConfig, records, opts) -> List[Verdict]:
    """Trimmed bulk moments of sigma^2 / N against their limits."""
    _need(records, "singular_values", "bulk-sv")
    spec = config.ensemble
    tol = float(opts.get("tolerance", 0.05))
    orders = opts.get("moments", [1, 2, 3])
    upper = float(opts.get("trim", 4.0))
    m = _regularity(spec)
    mask = ~ens.pattern_of(spec).deterministic_mask()
    out = []
    for r in orders:
        if m is not None and m < spec.k:
            target = quarter_circle_target(r, spec.k, m)
        else:
            target = float(pattern_bulk_moment(mask, r))
        est = float(np.mean([empirical_moment(trim(bulk_sq_singular_measure(rec.sample(), spec.N), upper),
                                              r, normalized=True) for rec in records]))
        rel = abs(est - target) / abs(target)
        out.append(Verdict(f"bulk-sv.M{r}", est, target, tol, rel <= tol))
    return out


def _blip_sv_checkerboard(spec: ens.EnsembleSpec) -> None:
    if spec.kind not in (ens.Kind.CHECKERBOARD,) or spec.w != 1:
        raise BadSpec("blip-sv targets need a checkerboard ensemble with w = 1")


def check_blip_sv(config: RunConfig, records, opts) -> List[Verdict]:
    """Blip squared-singular measure: first moment, centered moments and blip window."""
    _need(records, "singular_values", "blip-sv")
    spec = config.ensemble
    _blip_sv_checkerboard(spec)
    N, k = spec.N, spec.k
    params = BlipWeightParams(int(opts["n"]), k, N) if "n" in opts else BlipWeightParams.for_size(N, k)
    rel_tol = float(opts.get("tolerance", 0.10))
    abs_tol = float(opts.get("odd_tolerance", 0.10))
    window = float(opts.get("window", 8.0))

    first, c2, c3 = [], [], []
    in_window = 0
    centre = N * N / (k * k)
    for rec in records:
        blip = ebsssm(rec.sample(), params)
        first.append(empirical_moment(blip, 1))
        c2.append(empirical_moment(blip, 2, centered=True))
        c3.append(empirical_moment(blip, 3, centered=True))
        top = np.sort(rec.sample().squared_singular_values)[-k:]
        in_window += bool(np.all(np.abs(top - centre) <= window * N ** 1.5))

    out = []
    t1 = blip_first_moment_target(k)
    e1 = float(np.mean(first))
    out.append(Verdict("blip-sv.first", e1, t1, rel_tol, abs(e1 - t1) <= rel_tol * abs(t1)))
    t2 = blip_centered_target(k, 2)
    e2 = float(np.mean(c2))
    out.append(Verdict("blip-sv.centered2", e2, t2, rel_tol, abs(e2 - t2) <= rel_tol * abs(t2)))
    t3 = blip_centered_target(k, 3)
    e3 = float(np.mean(c3))
    out.append(Verdict("blip-sv.centered3", e3, t3, abs_tol, abs(e3 - t3) <= abs_tol))
    frac = in_window / len(records)
    out.append(Verdict("blip-sv.window", frac, 1.0, 0.0, in_window == len(records)))
    return out


def check_bulk_eig(config: RunConfig, records, opts) -> List[Verdict]:
    """Pooled circular-law test on the bulk eigenvalues over sqrt(N)."""
    _need(records, "eigenvalues", "bulk-eig")
    spec = config.ensemble
    m = _regularity(spec)
    if m is None:
        raise BadSpec("bulk-eig needs an m-regular pattern")
    R = math.sqrt(1.0 - m / spec.k)
    n_blip = len(_blip_targets(spec))
    tol = float(opts.get("tolerance", 0.05))
    outside_tol = float(opts.get("outside_tolerance", 0.01))
    pts = np.concatenate([bulk_eigenvalues(rec.eigenvalues, n_blip) for rec in records])
    rep = circular_law_check(pts, R, float(opts.get("margin", 0.1)))
    return [
        Verdict("bulk-eig.radial-ks", rep.radial_ks, 0.0, tol, rep.radial_ks <= tol),
        Verdict("bulk-eig.angular-ks", rep.angular_ks, 0.0, tol, rep.angular_ks <= tol),
        Verdict("bulk-eig.outside", rep.outside_fraction, 0.0, outside_tol,
                rep.outside_fraction <= outside_tol),
    ]


def check_blip_eig(config: RunConfig, records, opts) -> List[Verdict]:
    """Per-trial matching of the renormalized eigenvalues to spec(B)."""
    _need(records, "eigenvalues", "blip-eig")
    spec = config.ensemble
    targets = _blip_targets(spec)
    tol = float(opts.get("tolerance", 0.1))
    eps = float(opts.get("epsilon", 0.5))
    need = float(opts.get("min_fraction", 0.9))
    matched = bulk_ok = both = 0
    worst = 0.0
    for rec in records:
        res = blip_match(renormalized_spectral_measure(rec.sample(), spec.k), targets, eps, spec.N)
        ok_match = res.max_distance <= tol and res.deficit == 0
        ok_bulk = res.bulk_count == spec.N - len(targets)
        matched += ok_match
        bulk_ok += ok_bulk
        both += ok_match and ok_bulk
        worst = max(worst, res.max_distance)
    n = len(records)
    return [
        Verdict("blip-eig.match", matched / n, need, tol, matched >= need * n),
        Verdict("blip-eig.bulk-count", bulk_ok / n, need, 0.0, bulk_ok >= need * n),
        Verdict("blip-eig", both / n, need, tol, both >= need * n),
        Verdict("blip-eig.max-distance", worst, 0.0, tol, worst <= tol),
    ]


def check_hermitized(config: RunConfig, records, opts) -> List[Verdict]:
    """Hermitized moments of regenerated matrices against the c_j polynomials."""
    if not records:
        raise MissingRecords("hermitized: no trial records")
    spec = config.ensemble
    tol = float(opts.get("tolerance", 0.07))
    zs = [complex(*z) if isinstance(z, list) else complex(z) for z in opts.get("z", [0, 1, [1, 1]])]
    r_max = int(opts.get("r_max", 3))
    m = _regularity(spec) or 1
    scale = math.sqrt(1.0 - m / spec.k) if spec.kind in ens.PATTERNED else 1.0
    out = []
    for z in zs:
        acc = np.zeros(r_max)
        for rec in records:
            A = draw_matrix(spec, rec.seed, rec.trial)
            acc += hermitized_empirical_moments(A, z, r_max, scale)
        acc /= len(records)
        for r in range(1, r_max + 1):
            target = hermitized_moment_eval(cjr_coefficients(r), z)
            est = float(acc[r - 1])
            out.append(Verdict(f"hermitized.z={z.real:g}{z.imag:+g}i.r{r}", est, target, tol,
                               abs(est - target) <= tol * abs(target)))
    return out


def check_least_sv(config: RunConfig, records, opts) -> List[Verdict]:
    _need(records, "singular_values", "least-sv")
    tol = float(opts.get("tolerance", 0.05))
    smin = np.array([np.min(rec.singular_values) for rec in records])
    d = ks_distance(rayleigh_transform(smin, config.ensemble.N), CdfTarget.uniform())
    return [Verdict("least-sv.ks", d, 0.0, tol, d <= tol)]


def check_joint_density(config: RunConfig, records, opts) -> List[Verdict]:
    _need(records, "singular_values", "joint-density")
    if config.ensemble.N != 2:
        raise BadSpec("joint-density check is for 2 x 2 matrices")
    tol = float(opts.get("tolerance", 0.1))
    pairs = np.array([rec.singular_values for rec in records])
    d = joint_density_discrepancy(pairs, int(opts.get("bins", 50)), float(opts.get("upper", 4.0)))
    return [Verdict("joint-density.l1", d, 0.0, tol, d <= tol)]


def check_ebsssm_identity(config: RunConfig, records, opts) -> List[Verdict]:
    if not records:
        raise MissingRecords("ebsssm-identity: no trial records")
    spec = config.ensemble
    tol = float(opts.get("tolerance", 1e-6))
    params = BlipWeightParams.for_size(spec.N, spec.k)
    worst = 0.0
    for rec in records:
        A = draw_matrix(spec, rec.seed, rec.trial)
        for r in opts.get("orders", [1, 2]):
            worst = max(worst, ebsssm_identity_check(A, params, int(r)))
    return [Verdict("ebsssm-identity.max-residual", worst, 0.0, tol, worst <= tol)]


CHECKS: Dict[str, Callable] = {
    "bulk-sv": check_bulk_sv,
    "blip-sv": check_blip_sv,
    "bulk-eig": check_bulk_eig,
    "blip-eig": check_blip_eig,
    "hermitized": check_hermitized,
    "least-sv": check_least_sv,
    "joint-density": check_joint_density,
    "ebsssm-identity": check_ebsssm_identity,
}


def run_verification(config: RunConfig, records: Sequence[TrialRecord]) -> List[Verdict]:
    if config.checks and not records:
        raise MissingRecords("no trial records to verify")
    verdicts: List[Verdict] = []
    for check in config.checks:
        verdicts.extend(CHECKS[check["name"]](config, list(records), check))
    return verdicts


def verdicts_csv(verdicts: Sequence[Verdict]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["check", "statistic", "target", "tolerance", "pass"])
    for v in verdicts:
        writer.writerow(v.row())
    return buf.getvalue()


# --------------------------------------------------------------- plots

PLOT_KINDS = ("ScatterEig", "HistSV", "HistBlip")


def emit_plot(records: Sequence[TrialRecord], kind: str, path, spec: ens.EnsembleSpec) -> Path:
    """Render one of PLOT_KINDS to a standalone SVG file."""
    if not records:
        raise MissingRecords("no records to plot")
    N, k = spec.N, spec.k
    if kind == "ScatterEig":
        _need(records, "eigenvalues", kind)
        pts = np.concatenate([rec.eigenvalues for rec in records]) / math.sqrt(N)
        R = None
        if spec.kind in ens.PATTERNED:
            m = _regularity(spec)
            R = math.sqrt(1.0 - m / k) if m is not None and m < k else None
        elif spec.kind is ens.Kind.GAUSSIAN_COMPLEX_ASYMMETRIC or spec.kind is ens.Kind.GAUSSIAN_COMPLEX_SYMMETRIC:
            R = 1.0
        text = svg.scatter(pts, f"Eigenvalues / sqrt(N), N={N}, k={k}, {len(records)} trials", R)
    elif kind == "HistSV":
        _need(records, "singular_values", kind)
        vals = np.concatenate([rec.singular_values for rec in records]) / math.sqrt(N)
        text = svg.histogram(vals, bins=120, title=f"Singular values / sqrt(N), N={N}, k={k}",
                             xlabel="sigma / sqrt(N)")
    elif kind == "HistBlip":
        _need(records, "singular_values", kind)
        params = BlipWeightParams.for_size(N, k)
        locs, ws = [], []
        for rec in records:
            blip = ebsssm(rec.sample(), params)
            keep = blip.weights > 1e-6 * blip.weights.max() if blip.weights.max() > 0 else blip.weights > 0
            locs.append(blip.locations[keep])
            ws.append(blip.weights[keep])
        text = svg.histogram(np.concatenate(locs), np.concatenate(ws), bins=60,
                             title=f"Blip measure atoms (n={params.n}), N={N}, k={k}",
                             xlabel="(sigma^2 - N^2/k^2) / N")
    else:
        raise ValueError(f"unknown plot kind {kind!r}; choose from {PLOT_KINDS}")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)
    return path
