"""Write the data behind every figure sweep to CSV files in one directory."""

import argparse
import pathlib

from uwenergy.cli import _csv_text
from uwenergy.experiments import FIGURES, freq_sweep


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("outdir", type=pathlib.Path)
    ap.add_argument("--skip", nargs="*", default=[], help="figure names to leave out, e.g. fig6")
    args = ap.parse_args()
    args.outdir.mkdir(parents=True, exist_ok=True)
    sweeps = {"freq": freq_sweep}
    sweeps.update({k: v for k, v in FIGURES.items() if k not in args.skip})
    for name, fn in sweeps.items():
        sweep = fn()
        path = args.outdir / f"{name}.csv"
        path.write_text(_csv_text(sweep.columns, sweep.rows, sweep.checks), newline="")
        failed = [k for k, ok in sweep.checks.items() if not ok]
        print(f"{path}: {len(sweep.rows)} rows, failed checks: {failed or 'none'}")


if __name__ == "__main__":
    main()
