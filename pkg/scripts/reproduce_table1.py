"""Print the relative-error grid of the closed-form design and its checks."""

import argparse
import time

from uwenergy.experiments import TABLE1_D, table1


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()
    t0 = time.perf_counter()
    sweep, rows = table1(workers=args.workers)
    print("P_acc0 \\ d [km]  " + "  ".join(f"{d / 1000:6.0f}" for d in TABLE1_D))
    for r in sweep.rows:
        print(f"{r[0]:<16.3f} " + "  ".join(f"{v:6.4f}" for v in r[1:]))
    print()
    for name, ok in sweep.checks.items():
        print(f"{name}: {'pass' if ok else 'fail'}")
    print(f"elapsed {time.perf_counter() - t0:.1f} s")


if __name__ == "__main__":
    main()
