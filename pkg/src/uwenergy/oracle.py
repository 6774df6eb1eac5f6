"""Brute-force minimizers used to certify the analytic KKT solutions.

Both oracles search a feasible grid first and then refine the best cell with
nested derivative-free 1-D searches (bounded golden-section/Brent).  The
innermost search runs over ``u = ln(P_t / P_min(L))`` with ``u >= 0``, so the
reliability boundary is an endpoint of the search and is evaluated
explicitly; nothing assumes in advance that it binds.

``minimize_reduced`` works on the two-variable problem at ``f*(d)``.
``minimize_original`` searches ``(P_t, L, f)`` jointly and evaluates energy
and reliability through the full channel chain, not the reduced constants.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from uwenergy.channel import ChannelEnv, packet_acceptance, power_from_source_level, snr_per_bit, source_level
from uwenergy.errors import DomainError
from uwenergy.objective import (
    DesignPoint,
    ProblemInstance,
    check_threshold,
    constraints,
    energy_per_bit,
    log_reduced_objective,
    min_power_for_reliability,
)


@dataclass(frozen=True)
class GridSpec:
    """Resolution of the global grid stage and tolerances of the refinement.

    ``power_span`` is the ratio between the highest and lowest grid power;
    ``length_factor`` sets the initial upper packet length as a multiple of
    the header+trailer overhead.  Both ranges grow automatically when the
    best grid point lands on their upper edge.
    """

    n_power: int = 400
    n_length: int = 400
    n_freq: int = 41
    power_span: float = 1e6
    length_factor: float = 20.0
    freq_range: tuple[float, float] = (0.01, 10_000.0)
    power_xtol: float = 1e-11
    length_rtol: float = 1e-10
    freq_rtol: float = 1e-8
    max_expansions: int = 8

    def doubled(self) -> "GridSpec":
        return GridSpec(**{
            **self.__dict__,
            "n_power": 2 * self.n_power,
            "n_length": 2 * self.n_length,
            "n_freq": 2 * self.n_freq - 1,
        })

    def to_dict(self) -> dict:
        return {k: (list(v) if isinstance(v, tuple) else v) for k, v in self.__dict__.items()}


@dataclass(frozen=True)
class OracleResult:
    point: DesignPoint
    objective: float
    grid_spec: GridSpec
    refined: bool
    grid_objective: float
    f: float | None = None

    def to_dict(self) -> dict:
        out = {
            "P_t_W": float(self.point.P_t),
            "L_bits": float(self.point.L),
            "objective_ln_J_per_bit": float(self.objective),
            "grid_objective_ln_J_per_bit": float(self.grid_objective),
            "refined": self.refined,
        }
        if self.f is not None:
            out["f_kHz"] = float(self.f)
        return out


def relative_error(analytic: float, oracle: float) -> float:
    """``100 |analytic - oracle| / |oracle|``, in percent."""
    if not (math.isfinite(analytic) and math.isfinite(oracle)):
        raise DomainError("relative_error needs finite inputs")
    if abs(oracle) < 1e-300:
        raise DomainError("oracle value is numerically zero")
    return 100.0 * abs(analytic - oracle) / abs(oracle)


def _line_min(fun, a: float, b: float, xatol: float) -> tuple[float, float]:
    """Minimize ``fun`` on ``[a, b]``; the endpoints are candidates too."""
    candidates = [(fun(a), a), (fun(b), b)]
    if b - a > xatol:
        res = minimize_scalar(fun, bounds=(a, b), method="bounded", options={"xatol": xatol, "maxiter": 500})
        candidates.append((float(res.fun), float(res.x)))
    fx, x = min(candidates)
    return x, fx


def _bracketed_min(fun, a: float, b: float, xatol: float, lo: float = -math.inf, hi: float = math.inf,
                   max_shifts: int = 40) -> tuple[float, float]:
    """:func:`_line_min`, shifting the bracket while the minimum sits on a
    soft edge; ``lo`` and ``hi`` are hard limits that may be the answer."""
    for _ in range(max_shifts):
        x, fx = _line_min(fun, a, b, xatol)
        w = b - a
        if x <= a + 2 * xatol and a > lo:
            a, b = max(lo, x - w), x + 0.5 * w
        elif x >= b - 2 * xatol and b < hi:
            a, b = x - 0.5 * w, min(hi, x + w)
        else:
            return x, fx
    return x, fx


def _neighbours(axis: np.ndarray, i: int, k: int = 2) -> tuple[float, float]:
    return float(axis[max(i - k, 0)]), float(axis[min(i + k, len(axis) - 1)])


# --- reduced two-variable problem -------------------------------------------------


def _reduced_grid(inst: ProblemInstance, grid: GridSpec, L_hi: float, P_hi_factor: float):
    p_floor = float(min_power_for_reliability(inst.L_min, inst))
    powers = np.geomspace(p_floor, p_floor * P_hi_factor, grid.n_power)
    lengths = np.linspace(inst.L_min, L_hi, grid.n_length)
    P, L = np.meshgrid(powers, lengths, indexing="ij")
    pts = DesignPoint(P, L)
    values = np.asarray(log_reduced_objective(pts, inst))
    h1, _ = constraints(pts, inst)
    values = np.where(np.asarray(h1) >= 0, values, np.inf)
    boundary = np.asarray(min_power_for_reliability(lengths, inst))
    edge_values = np.asarray(log_reduced_objective(DesignPoint(boundary, lengths), inst))
    return powers, lengths, values, edge_values


def minimize_reduced(inst: ProblemInstance, grid: GridSpec | None = None) -> OracleResult:
    """Numerical minimum of ln E'_b subject to both constraints."""
    grid = grid or GridSpec()
    L_hi = inst.L_min + grid.length_factor * max(inst.overhead, 1.0)
    P_hi_factor = grid.power_span
    for _ in range(grid.max_expansions + 1):
        powers, lengths, values, edge_values = _reduced_grid(inst, grid, L_hi, P_hi_factor)
        i, j = np.unravel_index(np.argmin(values), values.shape)
        j_edge = int(np.argmin(edge_values))
        at_edge_L = max(j, j_edge) == len(lengths) - 1
        at_edge_P = i == len(powers) - 1
        if not (at_edge_L or at_edge_P):
            break
        if at_edge_L:
            L_hi = inst.L_min + 2.0 * (L_hi - inst.L_min)
        if at_edge_P:
            P_hi_factor *= 100.0
    if edge_values[j_edge] <= values[i, j]:
        grid_best = float(edge_values[j_edge])
        grid_point = DesignPoint(float(min_power_for_reliability(lengths[j_edge], inst)), float(lengths[j_edge]))
        j = j_edge
    else:
        grid_best = float(values[i, j])
        grid_point = DesignPoint(float(powers[i]), float(lengths[j]))

    def F(P, L):
        return float(log_reduced_objective(DesignPoint(P, L), inst))

    P_top = float(powers[min(i + 2, len(powers) - 1)])

    def profile(L):
        p_min = float(min_power_for_reliability(L, inst))
        u_hi = max(math.log(P_top / p_min), 0.1)
        u, val = _bracketed_min(lambda u: F(p_min * math.exp(u), L), 0.0, u_hi, grid.power_xtol, lo=0.0)
        return val, p_min * math.exp(u)

    L_a, L_b = _neighbours(lengths, j)
    L_best, _ = _bracketed_min(lambda L: profile(L)[0], L_a, L_b, grid.length_rtol * L_b, lo=inst.L_min)
    val, P_best = profile(L_best)
    if val > grid_best:
        return OracleResult(grid_point, grid_best, grid, False, grid_best)
    return OracleResult(DesignPoint(P_best, L_best), val, grid, True, grid_best)


# --- original three-variable problem ------------------------------------------------


def min_power_full_chain(L, f, d: float, env: ChannelEnv, P_acc0: float):
    """Transmit power at which the full channel chain gives ``P_acc = P_acc0``."""
    L = np.asarray(L, dtype=float)
    t = math.log(P_acc0) / L
    y, one_minus_y = np.exp(t), -np.expm1(t)
    # per-bit success y = (1 + X)/2 with X^2 = g/(1+g)  =>  g = (2y-1)^2 / (4y(1-y))
    g = (2.0 * y - 1.0) ** 2 / (4.0 * y * one_minus_y)
    return power_from_source_level(source_level(10.0 * np.log10(g), d, f), env)


def _log_energy(P, L, f, d, env):
    return np.log(energy_per_bit(DesignPoint(P, L), f, d, env))


def minimize_original(d: float, env: ChannelEnv, P_acc0: float, grid: GridSpec | None = None) -> OracleResult:
    """Numerical minimum of ln E_b over power, packet length and carrier."""
    check_threshold(P_acc0)
    grid = grid or GridSpec()
    m = env.overhead
    L_min = m + 1.0
    f_lo, f_hi = grid.freq_range
    L_hi = L_min + grid.length_factor * max(m, 1.0)
    u_span = math.log(grid.power_span)
    n_u = max(grid.n_power // 4, 20)
    n_l = max(grid.n_length // 4, 20)
    for _ in range(grid.max_expansions + 1):
        freqs = np.geomspace(f_lo, f_hi, grid.n_freq)
        lengths = np.linspace(L_min, L_hi, n_l)
        us = np.linspace(0.0, u_span, n_u)
        F3, L3, U3 = np.meshgrid(freqs, lengths, us, indexing="ij")
        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            P3 = min_power_full_chain(L3, F3, d, env, P_acc0) * np.exp(U3)
            values = np.where(np.isfinite(P3) & (P3 > 0), _log_energy(np.where(P3 > 0, P3, 1.0), L3, F3, d, env), np.inf)
        k, j, i = np.unravel_index(np.argmin(values), values.shape)
        edges = (k == 0, k == len(freqs) - 1, j == len(lengths) - 1, i == len(us) - 1)
        if not any(edges):
            break
        if edges[0]:
            f_lo /= 10.0
        if edges[1]:
            f_hi *= 10.0
        if edges[2]:
            L_hi = L_min + 2.0 * (L_hi - L_min)
        if edges[3]:
            u_span *= 2.0
    grid_best = float(values[k, j, i])
    grid_point = (float(P3[k, j, i]), float(lengths[j]), float(freqs[k]))
    u_top = float(us[min(i + 2, len(us) - 1)])

    def inner(L, f):
        p_min = float(min_power_full_chain(L, f, d, env, P_acc0))

        def g(u):
            return float(_log_energy(p_min * math.exp(u), L, f, d, env))

        u, val = _bracketed_min(g, 0.0, max(u_top, 0.1), grid.power_xtol, lo=0.0)
        return val, p_min * math.exp(u)

    def over_length(f):
        L_a, L_b = _neighbours(lengths, j)
        L, val = _bracketed_min(lambda L: inner(L, f)[0], L_a, L_b, grid.length_rtol * 1e2 * L_b, lo=L_min)
        return val, L

    lf_a, lf_b = (math.log(x) for x in _neighbours(freqs, k))
    lf, _ = _bracketed_min(lambda lf: over_length(math.exp(lf))[0], lf_a, lf_b, grid.freq_rtol)
    f_best = math.exp(lf)
    _, L_best = over_length(f_best)
    val, P_best = inner(L_best, f_best)
    if val > grid_best:
        P, L, f = grid_point
        return OracleResult(DesignPoint(P, L), grid_best, grid, False, grid_best, f=f)
    return OracleResult(DesignPoint(P_best, L_best), val, grid, True, grid_best, f=f_best)


def is_feasible_original(result: OracleResult, d: float, env: ChannelEnv, P_acc0: float, rtol: float = 1e-9) -> bool:
    """Whether an original-problem point meets reliability through the full chain."""
    gamma = snr_per_bit(result.point.P_t, d, result.f, env)
    return bool(packet_acceptance(gamma, result.point.L) >= P_acc0 * (1.0 - rtol) and result.point.L >= env.overhead + 1)
