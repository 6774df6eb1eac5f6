"""Monte Carlo check of the closed-form design over a range of distances."""

import argparse

import numpy as np

from uwenergy.kkt import solve_case2_approx
from uwenergy.objective import DesignPoint, ProblemInstance
from uwenergy.simulator import SimConfig, simulate


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--pacc0", type=float, default=0.99)
    ap.add_argument("--trials", type=int, default=100_000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--mode", choices=("packet", "bit"), default="packet")
    args = ap.parse_args()
    print(f"{'d [m]':>8} {'P_acc':>9} {'sim':>9} {'z':>6} {'E_b [J/bit]':>12} {'sim':>12} {'z':>6}")
    for i, d in enumerate(np.geomspace(1e3, 1e5, 7)):
        inst = ProblemInstance.at(float(d), args.pacc0)
        pt = solve_case2_approx(inst).point
        if args.mode == "bit":
            pt = DesignPoint(pt.P_t, float(round(pt.L)))
        r = simulate(pt, inst.f, inst.d, inst.env, SimConfig(args.trials, args.seed + i, args.mode))
        zp = (r.empirical_P_acc - r.analytic_P_acc) / r.P_acc_stderr
        ze = (r.empirical_E_b - r.analytic_E_b) / r.E_b_stderr
        print(f"{d:8.0f} {r.analytic_P_acc:9.6f} {r.empirical_P_acc:9.6f} {zp:+6.2f} "
              f"{r.analytic_E_b:12.4e} {r.empirical_E_b:12.4e} {ze:+6.2f}")


if __name__ == "__main__":
    main()
