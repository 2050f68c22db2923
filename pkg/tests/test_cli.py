import csv
import io
import json

import numpy as np
import pytest

from spectra import simulate as sim
from spectra.cli import main
from spectra.ensembles import EnsembleSpec, Kind
from spectra.errors import BadSpec, MissingRecords


def _config(tmp_path, name="c.json", **over):
    cfg = {
        "ensemble": EnsembleSpec(Kind.CHECKERBOARD, 4, 2).to_json(),
        "trials": 1,
        "seed": 7,
        "checks": [],
    }
    cfg.update(over)
    path = tmp_path / name
    path.write_text(json.dumps(cfg))
    return path


def test_simulate_twice_is_byte_identical(tmp_path):
    cfg = _config(tmp_path)
    assert main(["simulate", "--config", str(cfg), "--out", str(tmp_path / "a"), "--workers", "1"]) == 0
    assert main(["simulate", "--config", str(cfg), "--out", str(tmp_path / "b"), "--workers", "1"]) == 0
    a = (tmp_path / "a" / sim.RECORDS_FILE).read_bytes()
    b = (tmp_path / "b" / sim.RECORDS_FILE).read_bytes()
    assert a == b
    rec = json.loads(a.decode().splitlines()[0])
    assert len(rec["eigenvalues"]) == 4 and len(rec["singular_values"]) == 4
    assert rec["stream_key"] == [7, 0]


def test_worker_count_does_not_change_records(tmp_path):
    spec = EnsembleSpec(Kind.CHECKERBOARD, 8, 2)
    config = sim.RunConfig(spec, trials=8, seed=3)
    one = sim.simulate_records(config, workers=1)
    many = sim.simulate_records(config, workers=4)
    assert [r.to_json_line() for r in one] == [r.to_json_line() for r in many]


def test_seed_env_override(tmp_path):
    cfg = _config(tmp_path)
    assert sim.RunConfig.load(cfg, env={"SPECTRA_SEED": "99"}).seed == 99
    assert sim.RunConfig.load(cfg, env={}).seed == 7


def test_cache_reused_when_only_tolerance_changes(tmp_path):
    out = tmp_path / "run"
    c1 = sim.RunConfig.from_json(json.loads(_config(
        tmp_path, checks=[{"name": "bulk-sv", "tolerance": 0.5}]).read_text()), env={})
    c2 = sim.RunConfig.from_json(json.loads(_config(
        tmp_path, checks=[{"name": "bulk-sv", "tolerance": 0.9}]).read_text()), env={})
    sim.run_simulation(c1, out, workers=1)
    before = (out / sim.RECORDS_FILE).read_bytes()
    sim.run_simulation(c2, out, workers=1)
    manifest = sim.load_manifest(out)
    assert manifest["reused_cached_records"] is True
    assert manifest["config_hash"] == c2.config_hash() != c1.config_hash()
    assert (out / sim.RECORDS_FILE).read_bytes() == before


def test_cache_not_reused_for_new_seed(tmp_path):
    out = tmp_path / "run"
    base = json.loads(_config(tmp_path).read_text())
    sim.run_simulation(sim.RunConfig.from_json(base, env={}), out, workers=1)
    base["seed"] = 8
    sim.run_simulation(sim.RunConfig.from_json(base, env={}), out, workers=1)
    assert sim.load_manifest(out)["reused_cached_records"] is False
    assert sim.load_records(out)[0].seed == 8


def test_verify_empty_check_list(tmp_path, capsys):
    cfg = _config(tmp_path)
    main(["simulate", "--config", str(cfg), "--out", str(tmp_path / "r"), "--workers", "1"])
    capsys.readouterr()
    assert main(["verify", "--config", str(cfg), "--records", str(tmp_path / "r")]) == 0
    rows = list(csv.reader(io.StringIO(capsys.readouterr().out)))
    assert rows == [["check", "statistic", "target", "tolerance", "pass"]]


def test_verify_exit_code_follows_verdicts(tmp_path, capsys):
    spec = EnsembleSpec(Kind.CHECKERBOARD, 64, 2).to_json()
    good = _config(tmp_path, "g.json", ensemble=spec, trials=4, compute=["singular_values"],
                   checks=[{"name": "bulk-sv", "tolerance": 0.5, "moments": [1]}])
    bad = _config(tmp_path, "b.json", ensemble=spec, trials=4, compute=["singular_values"],
                  checks=[{"name": "bulk-sv", "tolerance": 1e-9, "moments": [1]}])
    main(["simulate", "--config", str(good), "--out", str(tmp_path / "r"), "--workers", "1"])
    assert main(["verify", "--config", str(good), "--records", str(tmp_path / "r")]) == 0
    assert main(["verify", "--config", str(bad), "--records", str(tmp_path / "r")]) == 1
    text = (tmp_path / "r" / sim.VERDICTS_FILE).read_text()
    assert text.splitlines()[1].startswith("bulk-sv.M1,") and text.strip().endswith("fail")


def test_verify_rejects_foreign_records(tmp_path, capsys):
    cfg = _config(tmp_path)
    other = _config(tmp_path, "o.json", seed=8)
    main(["simulate", "--config", str(cfg), "--out", str(tmp_path / "r"), "--workers", "1"])
    assert main(["verify", "--config", str(other), "--records", str(tmp_path / "r")]) == 2
    assert "different" in capsys.readouterr().err


def test_verify_without_records(tmp_path):
    assert main(["verify", "--config", str(_config(tmp_path)), "--records", str(tmp_path / "none")]) == 2
    with pytest.raises(MissingRecords):
        sim.run_verification(sim.RunConfig(EnsembleSpec(Kind.CHECKERBOARD, 4, 2), 1, 0,
                                           checks=[{"name": "least-sv"}]), [])


def test_unknown_check_rejected():
    with pytest.raises(BadSpec):
        sim.RunConfig(EnsembleSpec(Kind.CHECKERBOARD, 4, 2), 1, 0, checks=[{"name": "nope"}])
    with pytest.raises(BadSpec):
        sim.RunConfig(EnsembleSpec(Kind.CHECKERBOARD, 4, 2), 0, 0)


@pytest.mark.parametrize("kind", sim.PLOT_KINDS)
def test_plot_kinds(tmp_path, kind):
    cfg = _config(tmp_path, ensemble=EnsembleSpec(Kind.CHECKERBOARD, 16, 2).to_json(), trials=3)
    main(["simulate", "--config", str(cfg), "--out", str(tmp_path / "r"), "--workers", "1"])
    out = tmp_path / f"{kind}.svg"
    assert main(["plot", "--records", str(tmp_path / "r"), "--kind", kind, "--out", str(out)]) == 0
    text = out.read_text()
    assert text.startswith("<svg") and text.rstrip().endswith("</svg>")


def test_plot_without_records_writes_nothing(tmp_path):
    out = tmp_path / "p.svg"
    with pytest.raises(MissingRecords):
        sim.emit_plot([], "HistSV", out, EnsembleSpec(Kind.CHECKERBOARD, 4, 2))
    assert not out.exists()


def test_oracle_tables(capsys):
    assert main(["oracle", "catalan", "--r", "3"]) == 0
    rows = list(csv.reader(io.StringIO(capsys.readouterr().out)))
    assert rows[0] == ["r", "value", "provenance"]
    assert [r[1] for r in rows[1:]] == ["1", "1", "2", "5"]
    assert main(["oracle", "cjr", "--r", "2"]) == 0
    rows = list(csv.reader(io.StringIO(capsys.readouterr().out)))
    assert rows[1][1] == "1 1"
    assert main(["oracle", "hollow-goe", "--k", "2", "--r", "4"]) == 0
    rows = list(csv.reader(io.StringIO(capsys.readouterr().out)))
    assert rows[-1][1] == "6"
    for table in ("identity", "targets"):
        assert main(["oracle", table]) == 0
    assert "blip first moment" in capsys.readouterr().out


def test_record_round_trip():
    rec = sim.TrialRecord(3, 5, np.array([1 + 2j, -0.5j]), np.array([0.1, 2.0]), wall_time=1.5)
    back = sim.TrialRecord.from_json_line(rec.to_json_line())
    assert back.trial == 3 and back.seed == 5
    assert np.array_equal(back.eigenvalues, rec.eigenvalues)
    assert np.array_equal(back.singular_values, rec.singular_values)
    assert "wall_time" not in rec.to_json_line()
