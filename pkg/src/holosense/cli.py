"""Experiment runner: JSON config in, CSV results + JSON manifest out.

Subcommands map one-to-one to the figure-level experiments: radiation
patterns from raw and PSIS-cleaned holograms, PSIS recovery noise floor,
and the NMSE sweeps over SNR, array size and estimation order, plus the
bound-verification experiment.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import json
import logging
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import __version__, analysis, pmcs
from .channel import UserScenario, received_field_grid
from .geometry import UpaGeometry, grid_to_vec
from .holography import NoiseModel, ReferenceWave, naive_reconstruction_weights, \
    psis_recover, record, record_psi_set
from .patterns import AngularGrid, array_pattern
from .prony import fit_amplitudes
from .seeding import derive_seed

log = logging.getLogger("holosense")

EXPERIMENTS = (
    "pattern-raw", "pattern-psis", "psis-demo",
    "nmse-snr", "nmse-size", "nmse-order", "bounds",
)

DEFAULT_SNR_SWEEP = list(range(-10, 31, 5))


class ConfigError(ValueError):
    pass


def _fmt(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{float(x):.12g}"


def load_config(path: str) -> dict:
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(
            f"config syntax error at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc
    errors = []
    geom_cfg = raw.get("geometry", {})
    for key, default in (("n_v", 16), ("n_h", 16),
                         ("spacing_wavelengths", 0.5), ("f_c_hz", 3.5e9)):
        geom_cfg.setdefault(key, default)
        if not isinstance(geom_cfg[key], (int, float)) or geom_cfg[key] <= 0:
            errors.append(f"geometry.{key} must be a positive number")
    users = raw.get("scenario", {}).get("users", [])
    if not users:
        errors.append("scenario.users must list at least one user")
    for i, u in enumerate(users):
        if "theta_deg" not in u or "phi_deg" not in u:
            errors.append(f"scenario.users[{i}] needs theta_deg and phi_deg")
        elif not (0 <= u["theta_deg"] <= 180):
            errors.append(f"scenario.users[{i}].theta_deg outside [0, 180]")
        elif not (-90 <= u["phi_deg"] <= 90):
            errors.append(f"scenario.users[{i}].phi_deg outside [-90, 90] "
                          "(behind-array azimuths are not resolvable)")
    noise = raw.setdefault("noise", {})
    noise.setdefault("snr_db", DEFAULT_SNR_SWEEP)
    noise.setdefault("trials", 100)
    noise.setdefault("seed", 0)
    if noise["trials"] < 1:
        errors.append("noise.trials must be >= 1")
    pm = raw.setdefault("pmcs", {})
    pm.setdefault("n_users", len(users))
    pm.setdefault("est_order", None)
    raw.setdefault("output_prefix", "run")
    if errors:
        raise ConfigError("invalid config:\n  " + "\n  ".join(errors))
    return raw


def _geometry(cfg: dict) -> UpaGeometry:
    g = cfg["geometry"]
    from .geometry import SPEED_OF_LIGHT
    lam = SPEED_OF_LIGHT / g["f_c_hz"]
    return UpaGeometry(n_v=int(g["n_v"]), n_h=int(g["n_h"]),
                       d_v=g["spacing_wavelengths"] * lam,
                       d_h=g["spacing_wavelengths"] * lam, f_c=g["f_c_hz"])


def _scenarios(cfg: dict):
    out = []
    for u in cfg["scenario"]["users"]:
        amp = u.get("b_amplitude", 1.0)
        phase = math.radians(u.get("b_phase_deg", 0.0))
        out.append(UserScenario.los(
            math.radians(u["theta_deg"]), math.radians(u["phi_deg"]),
            beta=amp * complex(math.cos(phase), math.sin(phase)),
        ))
    return out


def _pmcs_config(cfg: dict, geom: UpaGeometry, est_order=None) -> pmcs.PmcsConfig:
    pm = cfg["pmcs"]
    order = est_order if est_order is not None else pm["est_order"]
    return pmcs.PmcsConfig.for_geometry(geom, int(pm["n_users"]), est_order=order)


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([v if isinstance(v, str) else _fmt(v) for v in row])


def _trial_ratio(args):
    geom, scenarios, cfg, snr_db, seed = args
    return analysis.nmse_trial(geom, scenarios, cfg, snr_db, seed)


def _mc_mean_ratio(geom, scenarios, cfg, snr_db, trials, root_seed, jobs=1):
    """Mean error ratio; summation order is fixed regardless of jobs."""
    tasks = [(geom, scenarios, cfg, snr_db, derive_seed(root_seed, t))
             for t in range(trials)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            ratios = list(pool.map(_trial_ratio, tasks, chunksize=8))
    else:
        ratios = [_trial_ratio(t) for t in tasks]
    return sum(ratios) / trials


def run_pattern(cfg, geom, seed, out_prefix, psis: bool):
    scenarios = _scenarios(cfg)
    field = received_field_grid(geom, scenarios)
    ref = ReferenceWave()
    noise = NoiseModel(sigma=0.0, seed=seed)
    if psis:
        holos = record_psi_set(field, ref, noise, geom)
        weights = psis_recover(holos, ref)
    else:
        holo = record(field, ref, noise, geom)
        weights = naive_reconstruction_weights(holo, ref)
    result = array_pattern(grid_to_vec(weights), geom, AngularGrid())
    pattern_path = f"{out_prefix}_pattern.csv"
    result.to_csv(pattern_path)
    rows = [(t, p, g) for t, p, g in result.peaks]
    results_path = f"{out_prefix}_results.csv"
    _write_csv(results_path, ["peak_theta_deg", "peak_phi_deg", "gain_db"], rows)
    return [results_path, pattern_path], {"peaks": result.peaks[:8]}


def run_psis_demo(cfg, geom, seed, out_prefix, jobs):
    scenarios = _scenarios(cfg)
    field = received_field_grid(geom, scenarios)
    ref = ReferenceWave()
    power = float(np.mean(np.abs(field) ** 2))
    trials = int(cfg["noise"]["trials"])
    rows = []
    for i, snr_db in enumerate(cfg["noise"]["snr_db"]):
        total = 0.0
        for t in range(trials):
            noise = NoiseModel.from_snr_db(snr_db, power,
                                           derive_seed(seed, i, t))
            rec = psis_recover(record_psi_set(field, ref, noise, geom), ref)
            total += float(np.mean(np.abs(rec - field) ** 2))
        rows.append((snr_db, total / trials))
    path = f"{out_prefix}_results.csv"
    _write_csv(path, ["snr_db", "mean_recovery_mse"], rows)
    return [path], {}


def run_nmse_snr(cfg, geom, seed, out_prefix, jobs):
    scenarios = _scenarios(cfg)
    pcfg = _pmcs_config(cfg, geom)
    trials = int(cfg["noise"]["trials"])
    rows = []
    for i, snr_db in enumerate(cfg["noise"]["snr_db"]):
        ratio = _mc_mean_ratio(geom, scenarios, pcfg, snr_db, trials,
                               derive_seed(seed, i), jobs)
        rows.append((snr_db, pmcs.ratio_to_db(ratio)))
        log.info("snr %s dB -> NMSE %.2f dB", snr_db, rows[-1][1])
    path = f"{out_prefix}_results.csv"
    _write_csv(path, ["snr_db", "mean_nmse_db"], rows)
    return [path], {}


def run_nmse_size(cfg, geom, seed, out_prefix, jobs):
    users = [(u["theta_deg"], u["phi_deg"],
              u.get("b_amplitude", 1.0)) for u in cfg["scenario"]["users"]]
    sizes = cfg.get("experiment", {}).get("sizes", [16, 64, 256, 1024])
    snr_db = cfg.get("experiment", {}).get("snr_db", 10)
    trials = int(cfg["noise"]["trials"])
    trend = analysis.theorem1_trend(users, snr_db, sizes, trials, root_seed=seed,
                                    est_order=cfg["pmcs"]["est_order"])
    path = f"{out_prefix}_results.csv"
    _write_csv(path, ["n_units", "mean_nmse_db"], trend)
    return [path], {}


def run_nmse_order(cfg, geom, seed, out_prefix, jobs):
    scenarios = _scenarios(cfg)
    n = int(cfg["pmcs"]["n_users"])
    snr_db = cfg.get("experiment", {}).get("snr_db", 20)
    trials = int(cfg["noise"]["trials"])
    k = min(geom.n_v, geom.n_h)
    rows = []
    for i, order in enumerate(range(n, k - n + 1)):
        pcfg = _pmcs_config(cfg, geom, est_order=order)
        ratio = _mc_mean_ratio(geom, scenarios, pcfg, snr_db, trials,
                               derive_seed(seed, i), jobs)
        rows.append((order, pmcs.ratio_to_db(ratio)))
    path = f"{out_prefix}_results.csv"
    _write_csv(path, ["est_order", "mean_nmse_db"], rows)
    return [path], {}


def run_bounds(cfg, geom, seed, out_prefix, jobs):
    """Bound-verification instances for the three lemmas."""
    trials = int(cfg["noise"]["trials"])
    rng = np.random.default_rng(derive_seed(seed, 0xB0))
    rows = []
    k, n, pe, eps = 16, 2, 4, 1e-3
    for i in range(trials):
        omega = _separated_frequencies(rng, n, min_gap=0.8)
        z = np.exp(1j * omega)
        b = rng.uniform(0.5, 1.5, n) * np.exp(1j * rng.uniform(-np.pi, np.pi, n))
        y = np.power.outer(z, np.arange(k)).T @ b
        w = _disk_noise(rng, k, eps)
        err, bound = analysis.measure_lemma1_instance(y, y + w, n, pe, z)
        rows.append(("lemma1", i, err, bound, err <= bound))
    for i in range(trials):
        kk = int(rng.choice([16, 64, 256]))
        nn = int(rng.integers(1, 5))
        omega = _separated_frequencies(
            rng, nn, min_gap=math.pi * math.sqrt(2 * kk) / kk * 1.001)
        chk = analysis.lemma2_check(np.exp(1j * omega), kk)
        rows.append(("lemma2", i, chk["norm_L_sq"], chk["bound"], chk["holds"]))
    k3, n3 = 64, 2
    for i in range(trials):
        omega = _separated_frequencies(rng, n3, min_gap=0.6)
        z = np.exp(1j * omega)
        b = rng.uniform(0.5, 1.5, n3) * np.exp(1j * rng.uniform(-np.pi, np.pi, n3))
        y = np.power.outer(z, np.arange(k3)).T @ b
        w = _disk_noise(rng, k3, 1e-3)
        dw = rng.uniform(-1e-4, 1e-4, n3)
        b_hat = fit_amplitudes(y + w, np.exp(1j * (omega + dw)))
        err = float(np.linalg.norm(b_hat - b))
        inp = analysis.BoundInputs(
            epsilon=float(np.max(np.abs(w))), delta=float(np.max(np.abs(dw))),
            K=k3, N=n3, P_e=n3, sigma1=1.0, delta_sigma1_sq=0.0, norm_Y1=0.0,
            norm_y0=0.0, norm_h=0.0, beta0_abs=1.0, q=0.0)
        bound = analysis.lemma3_bound(inp, float(np.linalg.norm(y)))
        rows.append(("lemma3", i, err, bound, err <= bound))
    path = f"{out_prefix}_results.csv"
    _write_csv(path, ["bound_name", "instance_id", "measured", "bound", "holds"],
               [(name, i, m, b, str(h).lower()) for name, i, m, b, h in rows])
    n_viol = sum(1 for r in rows if not r[4])
    return [path], {"violations": n_viol}


def _separated_frequencies(rng, n, min_gap):
    while True:
        omega = np.sort(rng.uniform(0, 2 * np.pi, n))
        gaps = np.diff(np.concatenate([omega, [omega[0] + 2 * np.pi]]))
        if n == 1 or gaps.min() > min_gap:
            return omega


def _disk_noise(rng, k, eps):
    r = eps * np.sqrt(rng.uniform(0, 1, k))
    ang = rng.uniform(0, 2 * np.pi, k)
    return r * np.exp(1j * ang)


RUNNERS = {
    "pattern-raw": lambda cfg, geom, seed, prefix, jobs: run_pattern(cfg, geom, seed, prefix, psis=False),
    "pattern-psis": lambda cfg, geom, seed, prefix, jobs: run_pattern(cfg, geom, seed, prefix, psis=True),
    "psis-demo": run_psis_demo,
    "nmse-snr": run_nmse_snr,
    "nmse-size": run_nmse_size,
    "nmse-order": run_nmse_order,
    "bounds": run_bounds,
}


def _sha256(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


def run_experiment(kind: str, config_path: str, seed=None, jobs=1, out_dir="."):
    cfg = load_config(config_path)
    geom = _geometry(cfg)
    seed = int(cfg["noise"]["seed"] if seed is None else seed)
    os.makedirs(out_dir, exist_ok=True)
    prefix = os.path.join(out_dir, cfg["output_prefix"])
    t0 = time.time()
    outputs, extra = RUNNERS[kind](cfg, geom, seed, prefix, jobs)
    manifest = {
        "experiment": kind,
        "version": f"holosense-{__version__}",
        "seed": seed,
        "config": cfg,
        "wall_time_s": round(time.time() - t0, 3),
        "outputs": {os.path.basename(p): _sha256(p) for p in outputs},
    }
    manifest.update(extra)
    manifest_path = f"{prefix}_manifest.json"
    with open(manifest_path, "w") as fh:
        json.dump(manifest, fh, indent=2, default=str)
        fh.write("\n")
    return outputs + [manifest_path]


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="holosense", description="Holographic channel sensing experiments")
    parser.add_argument("experiment", choices=EXPERIMENTS)
    parser.add_argument("--config", required=True, help="JSON experiment config")
    parser.add_argument("--seed", type=int, default=None, help="root seed override")
    parser.add_argument("--jobs", type=int, default=1, help="worker pool size")
    parser.add_argument("--out", default=".", help="output directory")
    args = parser.parse_args(argv)

    logging.basicConfig(
        level=os.environ.get("HOLOSENSE_LOG", "warning").upper(),
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        files = run_experiment(args.experiment, args.config,
                               seed=args.seed, jobs=args.jobs, out_dir=args.out)
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    for f in files:
        print(f)
    return 0


if __name__ == "__main__":
    sys.exit(main())
