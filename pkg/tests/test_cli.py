import csv
import hashlib
import json

import pytest

from holosense.cli import ConfigError, load_config, main, run_experiment


def write_config(path, **overrides):
    cfg = {
        "geometry": {"n_v": 16, "n_h": 16},
        "scenario": {"users": [{"theta_deg": 70.0, "phi_deg": 40.0}]},
        "noise": {"snr_db": [10], "trials": 2, "seed": 5},
        "output_prefix": "t",
    }
    cfg.update(overrides)
    path.write_text(json.dumps(cfg))
    return path


def read_csv(path):
    with open(path) as fh:
        return list(csv.reader(fh))


def test_load_config_applies_defaults(tmp_path):
    p = write_config(tmp_path / "c.json")
    cfg = load_config(str(p))
    assert cfg["geometry"]["spacing_wavelengths"] == 0.5
    assert cfg["geometry"]["f_c_hz"] == 3.5e9
    assert cfg["pmcs"]["n_users"] == 1


def test_load_config_aggregates_errors(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text(json.dumps({
        "geometry": {"n_v": -1},
        "scenario": {"users": [{"theta_deg": 200.0, "phi_deg": 0.0}]},
    }))
    with pytest.raises(ConfigError) as exc:
        load_config(str(p))
    msg = str(exc.value)
    assert "geometry.n_v" in msg and "theta_deg" in msg


def test_load_config_rejects_bad_json(tmp_path):
    p = tmp_path / "syntax.json"
    p.write_text("{not json")
    with pytest.raises(ConfigError, match="syntax error"):
        load_config(str(p))


def test_pattern_raw_experiment(tmp_path):
    p = write_config(tmp_path / "c.json")
    files = run_experiment("pattern-raw", str(p), out_dir=str(tmp_path))
    names = {f.split("/")[-1] for f in files}
    assert names == {"t_results.csv", "t_pattern.csv", "t_manifest.json"}
    rows = read_csv(tmp_path / "t_results.csv")
    assert rows[0] == ["peak_theta_deg", "peak_phi_deg", "gain_db"]
    peaks = {(float(r[0]), float(r[1])) for r in rows[1:]}
    # Raw weights show the DC lobe plus the conjugate twin of the user.
    assert (90.0, 0.0) in peaks
    assert (70.0, 40.0) in peaks
    assert (110.0, -40.0) in peaks


def test_pattern_psis_experiment(tmp_path):
    p = write_config(tmp_path / "c.json")
    files = run_experiment("pattern-psis", str(p), out_dir=str(tmp_path))
    rows = read_csv(tmp_path / "t_results.csv")
    top = rows[1]
    assert (float(top[0]), float(top[1])) == (70.0, 40.0)


def test_manifest_hashes_outputs(tmp_path):
    p = write_config(tmp_path / "c.json")
    run_experiment("pattern-psis", str(p), out_dir=str(tmp_path))
    manifest = json.loads((tmp_path / "t_manifest.json").read_text())
    assert manifest["experiment"] == "pattern-psis"
    assert manifest["version"].startswith("holosense-")
    digest = hashlib.sha256((tmp_path / "t_pattern.csv").read_bytes()).hexdigest()
    assert manifest["outputs"]["t_pattern.csv"] == digest


def test_nmse_snr_experiment_monotone(tmp_path):
    p = write_config(tmp_path / "c.json",
                     noise={"snr_db": [0, 20], "trials": 3, "seed": 5})
    run_experiment("nmse-snr", str(p), out_dir=str(tmp_path))
    rows = read_csv(tmp_path / "t_results.csv")
    assert rows[0] == ["snr_db", "mean_nmse_db"]
    vals = {float(r[0]): float(r[1]) for r in rows[1:]}
    assert vals[20.0] < vals[0.0]


def test_seed_override_changes_outputs(tmp_path):
    p = write_config(tmp_path / "c.json",
                     noise={"snr_db": [10], "trials": 2, "seed": 5})
    run_experiment("nmse-snr", str(p), seed=5, out_dir=str(tmp_path / "a"))
    run_experiment("nmse-snr", str(p), seed=6, out_dir=str(tmp_path / "b"))
    run_experiment("nmse-snr", str(p), seed=5, out_dir=str(tmp_path / "c"))
    a = (tmp_path / "a" / "t_results.csv").read_text()
    b = (tmp_path / "b" / "t_results.csv").read_text()
    c = (tmp_path / "c" / "t_results.csv").read_text()
    assert a == c
    assert a != b


def test_parallel_jobs_reproduce_serial(tmp_path):
    p = write_config(tmp_path / "c.json",
                     noise={"snr_db": [10], "trials": 4, "seed": 5})
    run_experiment("nmse-snr", str(p), jobs=1, out_dir=str(tmp_path / "s"))
    run_experiment("nmse-snr", str(p), jobs=2, out_dir=str(tmp_path / "p"))
    assert ((tmp_path / "s" / "t_results.csv").read_text()
            == (tmp_path / "p" / "t_results.csv").read_text())


def test_bounds_experiment_no_violations(tmp_path):
    p = write_config(tmp_path / "c.json",
                     noise={"snr_db": [10], "trials": 5, "seed": 1})
    run_experiment("bounds", str(p), out_dir=str(tmp_path))
    rows = read_csv(tmp_path / "t_results.csv")
    assert rows[0] == ["bound_name", "instance_id", "measured", "bound", "holds"]
    assert all(r[4] == "true" for r in rows[1:])
    manifest = json.loads((tmp_path / "t_manifest.json").read_text())
    assert manifest["violations"] == 0


def test_main_exit_codes(tmp_path, capsys):
    good = write_config(tmp_path / "c.json")
    assert main(["pattern-psis", "--config", str(good),
                 "--out", str(tmp_path)]) == 0
    out = capsys.readouterr().out
    assert "t_manifest.json" in out

    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"scenario": {"users": []}}))
    assert main(["pattern-psis", "--config", str(bad),
                 "--out", str(tmp_path)]) == 1
    assert "error:" in capsys.readouterr().err


def test_main_rejects_unknown_experiment(tmp_path):
    good = write_config(tmp_path / "c.json")
    with pytest.raises(SystemExit):
        main(["frobnicate", "--config", str(good)])
