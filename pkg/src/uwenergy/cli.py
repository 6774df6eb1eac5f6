"""Command-line front end: ``uwenergy {freq,solve,table1,figdata,simulate}``.

Values come from, in decreasing precedence, command-line flags, a JSON config
file (``--config``) and built-in defaults.  The config file layout::

    {
      "schema": 1,
      "env":  {"H": 10, "P_c": 1e-6, "mu": 16, "tau": 16, "v": 1500},
      "grid": {"n_power": 400, "n_length": 400, "n_freq": 41},
      "d": 10000, "pacc0": 0.98, "trials": 100000, "seed": 0
    }

Every key is optional.  The exit status is 0 only if every qualitative check
embedded in the output passes; invalid parameters exit with status 2.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import fields

import numpy as np

from uwenergy import experiments
from uwenergy.channel import ChannelEnv
from uwenergy.errors import BracketError, DomainError
from uwenergy.kkt import Case, solve
from uwenergy.objective import DesignPoint, ProblemInstance
from uwenergy.oracle import GridSpec, minimize_reduced, relative_error
from uwenergy.simulator import SimConfig, simulate

SCHEMA = 1
_ENV_FLAGS = {"depth": "H", "pc": "P_c", "mu": "mu", "tau": "tau", "v": "v"}


class UsageError(Exception):
    pass


def _load_config(path):
    if path is None:
        return {}
    with open(path, encoding="utf-8") as fh:
        cfg = json.load(fh)
    if cfg.get("schema", SCHEMA) != SCHEMA:
        raise UsageError(f"unsupported config schema {cfg.get('schema')!r}")
    return cfg


def _pick(args, cfg, name, default):
    val = getattr(args, name, None)
    if val is not None:
        return val
    return cfg.get(name, default)


def _env(args, cfg) -> ChannelEnv:
    values = dict(cfg.get("env", {}))
    unknown = set(values) - {f.name for f in fields(ChannelEnv)}
    if unknown:
        raise UsageError(f"unknown env keys in config: {sorted(unknown)}")
    for flag, key in _ENV_FLAGS.items():
        v = getattr(args, flag, None)
        if v is not None:
            values[key] = v
    return ChannelEnv(**values)


def _grid(cfg) -> GridSpec:
    values = dict(cfg.get("grid", {}))
    unknown = set(values) - {f.name for f in fields(GridSpec)}
    if unknown:
        raise UsageError(f"unknown grid keys in config: {sorted(unknown)}")
    if "freq_range" in values:
        values["freq_range"] = tuple(values["freq_range"])
    return GridSpec(**values)


def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def _csv_text(columns, rows, checks=None) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_fmt(v) for v in r])
    for name, ok in (checks or {}).items():
        w.writerow(["#check", name, "pass" if ok else "fail"])
    return buf.getvalue()


def _json_text(obj) -> str:
    return json.dumps(obj, indent=2, allow_nan=False) + "\n"


def _emit(text: str, out):
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _sweep_output(sweep, fmt):
    if fmt == "json":
        return _json_text(sweep.to_dict())
    return _csv_text(sweep.columns, sweep.rows, sweep.checks)


def cmd_freq(args, cfg):
    d_min = _pick(args, cfg, "d_min", 100.0)
    d_max = _pick(args, cfg, "d_max", 100_000.0)
    points = _pick(args, cfg, "points", 50)
    if not (100.0 <= d_min < d_max <= 100_000.0):
        raise UsageError("distance range must satisfy 100 <= d-min < d-max <= 100000 (meters)")
    if points < 2:
        raise UsageError("--points must be >= 2")
    sweep = experiments.freq_sweep(d_min, d_max, points)
    return _sweep_output(sweep, args.format or "csv"), sweep.ok


def cmd_solve(args, cfg):
    env = _env(args, cfg)
    d = _pick(args, cfg, "d", 10_000.0)
    p = _pick(args, cfg, "pacc0", 0.98)
    inst = ProblemInstance.at(d, p, env)
    analysis = solve(inst)
    oracle = minimize_reduced(inst, _grid(cfg))
    case2 = analysis.by_tag(Case.CASE2_APPROX)
    rel = relative_error(math.exp(case2.objective), math.exp(oracle.objective))
    rel_log = relative_error(case2.objective, oracle.objective)
    checks = {
        "case1_feasible": analysis.by_tag(Case.CASE1).feasible,
        "oracle_le_case1": oracle.objective <= analysis.by_tag(Case.CASE1).objective + 1e-12,
    }
    c = inst.constants
    payload = {
        "schema": SCHEMA,
        "command": "solve",
        "inputs": {"d_m": d, "P_acc0": p},
        "env": {k: getattr(env, k) for k in ("H", "P_c", "mu", "tau", "v")},
        "constants": {"f_star_kHz": c.f_star, "C0_W": c.C0, "C1": c.C1, "C2_s_per_bit": c.C2},
        "cases": [s.to_dict() for s in analysis.cases],
        "selected": analysis.best.case_tag.value,
        "oracle": oracle.to_dict(),
        "relative_error_Eb_percent": rel,
        "relative_error_lnEb_percent": rel_log,
        "checks": checks,
    }
    if (args.format or "json") == "csv":
        cols = list(payload["cases"][0])
        return _csv_text(cols, [list(s.values()) for s in payload["cases"]], checks), all(checks.values())
    return _json_text(payload), all(checks.values())


def cmd_table1(args, cfg):
    env = _env(args, cfg)
    sweep, _ = experiments.table1(env, grid=_grid(cfg), workers=args.workers)
    return _sweep_output(sweep, args.format or "csv"), sweep.ok


def cmd_figdata(args, cfg):
    env = _env(args, cfg)
    kwargs = {"env": env}
    d_min = _pick(args, cfg, "d_min", None)
    d_max = _pick(args, cfg, "d_max", None)
    points = _pick(args, cfg, "points", None)
    if any(v is not None for v in (d_min, d_max, points)):
        d_min = d_min or (100.0 if args.which == "fig4" else 1_000.0)
        d_max = d_max or 100_000.0
        if not (100.0 <= d_min < d_max <= 100_000.0):
            raise UsageError("distance range must satisfy 100 <= d-min < d-max <= 100000 (meters)")
        kwargs["ds"] = np.geomspace(d_min, d_max, points or 20)
    paccs = args.pacc0 if args.pacc0 is not None else cfg.get("pacc0")
    if paccs is not None:
        paccs = paccs if isinstance(paccs, list) else [paccs]
        if args.which == "fig4":
            kwargs["P_acc0"] = paccs[0]
        else:
            kwargs["paccs"] = tuple(paccs)
    if args.which in ("fig6", "fig8"):
        kwargs["grid"] = _grid(cfg)
    sweep = experiments.FIGURES[args.which](**kwargs)
    return _sweep_output(sweep, args.format or "csv"), sweep.ok


def cmd_simulate(args, cfg):
    env = _env(args, cfg)
    d = _pick(args, cfg, "d", 10_000.0)
    p = _pick(args, cfg, "pacc0", 0.99)
    sim = SimConfig(
        trials=_pick(args, cfg, "trials", 100_000),
        seed=_pick(args, cfg, "seed", 0),
        mode=_pick(args, cfg, "mode", "packet"),
    )
    inst = ProblemInstance.at(d, p, env)
    design = solve(inst).by_tag(Case.CASE2_APPROX).point
    if sim.mode == "bit":
        # per-bit sampling needs whole bits
        design = DesignPoint(design.P_t, float(round(design.L)))
    rep = simulate(design, inst.f, d, env, sim)
    deltas = {
        "P_acc": rep.empirical_P_acc - rep.analytic_P_acc,
        "E_b_J_per_bit": rep.empirical_E_b - rep.analytic_E_b,
    }
    checks = {}
    if not rep.degenerate_stderr:
        if rep.P_acc_stderr > 0:
            deltas["P_acc_in_stderr"] = deltas["P_acc"] / rep.P_acc_stderr
            checks["P_acc_within_4_stderr"] = abs(deltas["P_acc_in_stderr"]) <= 4.0
        if rep.E_b_stderr > 0:
            deltas["E_b_in_stderr"] = deltas["E_b_J_per_bit"] / rep.E_b_stderr
            checks["E_b_within_4_stderr"] = abs(deltas["E_b_in_stderr"]) <= 4.0
    payload = {
        "schema": SCHEMA,
        "command": "simulate",
        "inputs": {"d_m": d, "P_acc0": p, "trials": sim.trials, "seed": sim.seed, "mode": sim.mode},
        "design": {"case": Case.CASE2_APPROX.value, "P_t_W": float(design.P_t), "L_bits": float(design.L),
                   "f_kHz": inst.f},
        "report": rep.to_dict(),
        "deltas": deltas,
        "checks": checks,
    }
    return _json_text(payload), all(checks.values())


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config file")
    common.add_argument("--out", help="write output to this path instead of stdout")
    common.add_argument("--format", choices=("csv", "json"))
    common.add_argument("--depth", type=float, help="water depth H, m")
    common.add_argument("--pc", type=float, help="electronics power P_c, W")
    common.add_argument("--mu", type=float, help="header length, bits")
    common.add_argument("--tau", type=float, help="trailer length, bits")
    common.add_argument("--v", type=float, help="sound speed, m/s")

    parser = argparse.ArgumentParser(prog="uwenergy", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("freq", parents=[common], help="power-optimal carrier f*(d)")
    p.add_argument("--d-min", dest="d_min", type=float)
    p.add_argument("--d-max", dest="d_max", type=float)
    p.add_argument("--points", type=int)
    p.set_defaults(func=cmd_freq)

    p = sub.add_parser("solve", parents=[common], help="all KKT cases plus the numerical optimum")
    p.add_argument("--d", type=float, help="node distance, m")
    p.add_argument("--pacc0", type=float, help="reliability threshold in (0.5, 1)")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("table1", parents=[common], help="relative error grid of the closed-form solution")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_table1)

    p = sub.add_parser("figdata", parents=[common], help="data behind the figure sweeps")
    p.add_argument("which", choices=sorted(experiments.FIGURES))
    p.add_argument("--d-min", dest="d_min", type=float)
    p.add_argument("--d-max", dest="d_max", type=float)
    p.add_argument("--points", type=int)
    p.add_argument("--pacc0", type=float, nargs="+")
    p.set_defaults(func=cmd_figdata)

    p = sub.add_parser("simulate", parents=[common], help="Monte Carlo check of the closed-form design")
    p.add_argument("--d", type=float)
    p.add_argument("--pacc0", type=float)
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--mode", choices=("packet", "bit"))
    p.set_defaults(func=cmd_simulate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _load_config(args.config)
        text, ok = args.func(args, cfg)
    except (UsageError, DomainError, BracketError, OSError, json.JSONDecodeError) as exc:
        print(f"uwenergy {args.command}: error: {exc}", file=sys.stderr)
        return 2
    _emit(text, args.out)
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
