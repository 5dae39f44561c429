"""Figure renderer for holosense CSV outputs.

Presentation only: reads the experiment CSVs (and optionally the run
manifest for peak annotations), never recomputes results, and writes a PNG.
Usage: python plots/render.py --spec spec.json

Spec JSON fields:
  kind      one of pattern-heatmap, nmse-curve, size-curve, order-curve
  input     CSV path (the experiment's *_pattern.csv or *_results.csv)
  output    PNG path to write
  title     optional figure title
  manifest  optional run-manifest JSON; pattern-heatmap annotates its peaks
"""
import argparse
import csv
import json
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

KINDS = ("pattern-heatmap", "nmse-curve", "size-curve", "order-curve")

CURVE_SCHEMAS = {
    "nmse-curve": ("snr_db", "mean_nmse_db", "SNR (dB)"),
    "size-curve": ("n_units", "mean_nmse_db", "array units"),
    "order-curve": ("est_order", "mean_nmse_db", "estimation order"),
}

HEATMAP_COLUMNS = ("theta_deg", "phi_deg", "gain_db")


class SpecError(ValueError):
    pass


def load_spec(path):
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise SpecError(f"cannot read spec: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise SpecError(f"spec syntax error: {exc}") from exc
    for key in ("kind", "input", "output"):
        if key not in raw:
            raise SpecError(f"spec is missing required field {key!r}")
    if raw["kind"] not in KINDS:
        raise SpecError(f"unknown kind {raw['kind']!r}; expected one of {KINDS}")
    return raw


def read_csv_columns(path, expected):
    try:
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise SpecError(f"cannot read CSV: {exc}") from exc
    if not rows:
        raise SpecError(f"{path}: empty CSV")
    header = rows[0]
    missing = [c for c in expected if c not in header]
    if missing:
        raise SpecError(
            f"{path}: missing column(s) {missing}; header is {header}")
    if len(rows) < 2:
        raise SpecError(f"{path}: no data rows")
    idx = [header.index(c) for c in expected]
    try:
        data = np.array([[float(r[i]) for i in idx] for r in rows[1:]])
    except (ValueError, IndexError) as exc:
        raise SpecError(f"{path}: malformed data row: {exc}") from exc
    return data


def manifest_peaks(path):
    with open(path) as fh:
        manifest = json.load(fh)
    return manifest.get("peaks", [])


def render_heatmap(spec, ax):
    data = read_csv_columns(spec["input"], HEATMAP_COLUMNS)
    thetas = np.unique(data[:, 0])
    phis = np.unique(data[:, 1])
    if thetas.size * phis.size != data.shape[0]:
        raise SpecError(f"{spec['input']}: rows do not form a full grid")
    gain = data[:, 2].reshape(thetas.size, phis.size)
    im = ax.imshow(
        gain,
        origin="lower",
        aspect="auto",
        extent=(phis[0], phis[-1], thetas[0], thetas[-1]),
        cmap="viridis",
        vmin=-40.0,
        vmax=0.0,
    )
    ax.set_xlabel("azimuth (deg)")
    ax.set_ylabel("zenith angle (deg)")
    plt.colorbar(im, ax=ax, label="gain (dB)")
    for peak in manifest_peaks(spec["manifest"]) if spec.get("manifest") else []:
        th, ph, g = peak[0], peak[1], peak[2]
        ax.plot(ph, th, "wx", markersize=8)
        ax.annotate(f"({th:.0f}, {ph:.0f}) {g:.1f} dB", (ph, th),
                    color="white", fontsize=8,
                    textcoords="offset points", xytext=(6, 6))


def render_curve(spec, ax):
    x_col, y_col, x_label = CURVE_SCHEMAS[spec["kind"]]
    data = read_csv_columns(spec["input"], (x_col, y_col))
    ax.plot(data[:, 0], data[:, 1], marker="o")
    if spec["kind"] == "size-curve":
        ax.set_xscale("log", base=2)
    ax.set_xlabel(x_label)
    ax.set_ylabel("mean NMSE (dB)")
    ax.grid(True)


def render(spec):
    fig, ax = plt.subplots(figsize=(6.0, 4.5), dpi=120)
    if spec["kind"] == "pattern-heatmap":
        render_heatmap(spec, ax)
    else:
        render_curve(spec, ax)
    if spec.get("title"):
        ax.set_title(spec["title"])
    fig.tight_layout()
    # Strip the library version tag so identical inputs give identical bytes.
    fig.savefig(spec["output"], metadata={"Software": None})
    plt.close(fig)
    return spec["output"]


def main(argv=None):
    parser = argparse.ArgumentParser(
        description="Render a holosense experiment CSV to a PNG figure")
    parser.add_argument("--spec", required=True, help="plot-spec JSON path")
    args = parser.parse_args(argv)
    try:
        out = render(load_spec(args.spec))
    except SpecError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
