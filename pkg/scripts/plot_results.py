"""Plot spectral efficiency vs SNR from the JSON files written by reproduce_figures.py.

Needs matplotlib (``pip install -e .[plot]``).

    python3 scripts/plot_results.py results/*.json --out results/
"""

import argparse
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from cia_sim.harness import load_results  # noqa: E402

STYLE = {"cia": ("CIA", "-o"), "vfdm": ("VFDM", "--s"), "nonunitary": ("non-unitary", ":^")}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("files", nargs="+")
    ap.add_argument("--out", default=".")
    ap.add_argument("--delivered", action="store_true",
                    help="count failed VFDM trials as zero rate")
    args = ap.parse_args()

    for f in args.files:
        r = load_results(f)
        fig, ax = plt.subplots(figsize=(5, 3.6))
        for kind in r.config.precoders:
            pts = r.curve(kind)
            y = [p.delivered_se if args.delivered else p.mean_se for p in pts]
            x = [p.snr_db for p, v in zip(pts, y) if v is not None]
            y = [v for v in y if v is not None]
            label, fmt = STYLE[kind.value]
            ax.plot(x, y, fmt, label=label, markersize=4)
        ax.set_xlabel("SNR [dB]")
        ax.set_ylabel("spectral efficiency [bit/s/Hz]")
        pdp = r.config.pdp
        tag = pdp.kind.value
        if tag != "uniform":
            tag += f" Ts/tau={pdp.decay_ratio}"
        ax.set_title(f"{tag}, N={r.config.cfg.n_subcarriers}")
        ax.grid(alpha=0.3)
        ax.legend()
        fig.tight_layout()
        dest = Path(args.out) / (Path(f).stem + ".png")
        fig.savefig(dest, dpi=150)
        print(dest)


if __name__ == "__main__":
    main()
