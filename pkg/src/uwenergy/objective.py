"""Energy per successful payload bit and the constraints of the design problem.

Design variables are the transmit power ``P_t`` (W) and the packet length
``L`` (bits, treated as a positive real).  ``DesignPoint`` fields may be numpy
arrays, in which case every function here evaluates elementwise; the oracles
rely on this for grid evaluation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from uwenergy.channel import ChannelEnv, packet_acceptance, snr_per_bit, _out
from uwenergy.errors import DomainError
from uwenergy.frequency import DerivedConstants, derive_constants

#: Guard band applied to the open interval (0.5, 1) for the reliability threshold.
PACC0_GUARD = 1e-12


@dataclass(frozen=True)
class DesignPoint:
    P_t: float
    L: float

    def __post_init__(self):
        if np.any(~(np.asarray(self.P_t) >= 0)):
            raise DomainError("transmit power P_t must be >= 0")
        if np.any(~(np.asarray(self.L) > 0)):
            raise DomainError("packet length L must be > 0")


@dataclass(frozen=True)
class ProblemInstance:
    """Environment, reduced constants and reliability threshold of one problem."""

    env: ChannelEnv
    constants: DerivedConstants
    P_acc0: float

    def __post_init__(self):
        check_threshold(self.P_acc0)

    @classmethod
    def at(cls, d: float, P_acc0: float, env: ChannelEnv | None = None) -> "ProblemInstance":
        """Instance for distance ``d`` at its power-optimal carrier."""
        env = env or ChannelEnv()
        check_threshold(P_acc0)
        return cls(env=env, constants=derive_constants(d, env), P_acc0=P_acc0)

    @property
    def d(self) -> float:
        return self.constants.d

    @property
    def f(self) -> float:
        return self.constants.f_star

    @property
    def overhead(self) -> float:
        return self.env.overhead

    @property
    def L_min(self) -> float:
        return self.env.overhead + 1.0


def check_threshold(P_acc0: float) -> None:
    if not (0.5 + PACC0_GUARD < P_acc0 < 1.0 - PACC0_GUARD):
        raise DomainError(f"reliability threshold P_acc0={P_acc0} must lie in the open interval (0.5, 1)")


def _payload(L, env: ChannelEnv):
    L = np.asarray(L, dtype=float)
    Lp = L - env.overhead
    if np.any(~(Lp > 0)):
        raise DomainError(f"packet length must exceed the {env.overhead:g} overhead bits")
    return L, Lp


def energy_per_attempt(point: DesignPoint, f, env: ChannelEnv):
    """Energy of one transmission attempt in joules.

    The bit rate is ``f`` kb/s and the receiver spends one fifth of the
    transmit power, hence the ``6/5`` factor.
    """
    f = np.asarray(f, dtype=float)
    L = np.asarray(point.L, dtype=float)
    if np.any(~(f > 0)):
        raise DomainError("frequency f must be > 0")
    if np.any(~(L >= 1)):
        raise DomainError("packet length L must be >= 1 bit")
    return _out(L / (1000.0 * f) * (1.2 * np.asarray(point.P_t, dtype=float) + env.P_c))


def energy_per_bit(point: DesignPoint, f, d, env: ChannelEnv):
    """Expected energy per delivered payload bit through the full channel chain."""
    L, Lp = _payload(point.L, env)
    if np.any(~(np.asarray(point.P_t) > 0)):
        raise DomainError("transmit power P_t must be > 0")
    p_acc = np.asarray(packet_acceptance(snr_per_bit(point.P_t, d, f, env), L))
    return _out(np.asarray(energy_per_attempt(point, f, env)) / (p_acc * Lp))


def x_from_power(P_t, const: DerivedConstants):
    """``X = sqrt(C1 P_t / (C0 + C1 P_t))``, so that per-bit success is ``(1 + X) / 2``."""
    P_t = np.asarray(P_t, dtype=float)
    return _out(np.sqrt(const.C1 * P_t / (const.C0 + const.C1 * P_t)))


def power_from_x(X, const: DerivedConstants):
    X = np.asarray(X, dtype=float)
    return _out(const.C0 * X * X / (const.C1 * (1.0 - X * X)))


def _log_bit_success(P_t, const: DerivedConstants):
    # ln((1 + X) / 2) via 1 - X = (C0 / (C0 + C1 P)) / (1 + X)
    P_t = np.asarray(P_t, dtype=float)
    denom = const.C0 + const.C1 * P_t
    X = np.sqrt(const.C1 * P_t / denom)
    one_minus_x = (const.C0 / denom) / (1.0 + X)
    return np.log1p(-0.5 * one_minus_x)


def acceptance(point: DesignPoint, inst: ProblemInstance):
    """Packet acceptance ratio in the reduced model."""
    L = np.asarray(point.L, dtype=float)
    return _out(np.exp(L * _log_bit_success(point.P_t, inst.constants)))


def reduced_objective(point: DesignPoint, inst: ProblemInstance):
    """Energy per payload bit of the reduced problem, joules/bit."""
    c = inst.constants
    L, Lp = _payload(point.L, inst.env)
    P_t = np.asarray(point.P_t, dtype=float)
    p_acc = np.exp(L * _log_bit_success(P_t, c))
    return _out(c.C2 * L * (5.0 * inst.env.P_c + 6.0 * P_t) / (Lp * p_acc))


def log_reduced_objective(point: DesignPoint, inst: ProblemInstance):
    """Natural log of :func:`reduced_objective`, evaluated term by term."""
    c = inst.constants
    L, Lp = _payload(point.L, inst.env)
    P_t = np.asarray(point.P_t, dtype=float)
    val = (
        math.log(c.C2)
        + np.log(L)
        + np.log(5.0 * inst.env.P_c + 6.0 * P_t)
        - np.log(Lp)
        - L * _log_bit_success(P_t, c)
    )
    return _out(val)


def _per_bit_threshold(L, P_acc0):
    # y = P_acc0**(1/L) and 1 - y, both without cancellation
    t = math.log(P_acc0) / np.asarray(L, dtype=float)
    return np.exp(t), -np.expm1(t)


def min_power_for_reliability(L, inst: ProblemInstance):
    """Smallest transmit power (W) meeting ``P_acc >= P_acc0`` at length ``L``."""
    check_threshold(inst.P_acc0)
    L = np.asarray(L, dtype=float)
    if np.any(~(L >= 1)):
        raise DomainError("packet length L must be >= 1 bit")
    c = inst.constants
    y, one_minus_y = _per_bit_threshold(L, inst.P_acc0)
    return _out(c.C0 * (2.0 * y - 1.0) ** 2 / (4.0 * c.C1 * y * one_minus_y))


def constraints(point: DesignPoint, inst: ProblemInstance):
    """Return ``(h1, h2)``; the point is feasible iff both are nonnegative."""
    h1 = np.asarray(point.P_t, dtype=float) - np.asarray(min_power_for_reliability(point.L, inst))
    h2 = np.asarray(point.L, dtype=float) - inst.L_min
    return _out(h1), _out(h2)


def dh1_dL(L, inst: ProblemInstance):
    """Partial derivative of ``h1`` with respect to ``L`` (W/bit)."""
    c = inst.constants
    L = np.asarray(L, dtype=float)
    y, one_minus_y = _per_bit_threshold(L, inst.P_acc0)
    lnp = math.log(inst.P_acc0)
    return _out(c.C0 * (2.0 * y - 1.0) * lnp / (4.0 * c.C1 * L * L * y * one_minus_y**2))


def gradient(point: DesignPoint, inst: ProblemInstance):
    """Analytic gradient ``(d/dP_t, d/dL)`` of the log objective."""
    c = inst.constants
    L, Lp = _payload(point.L, inst.env)
    P_t = np.asarray(point.P_t, dtype=float)
    denom = c.C0 + c.C1 * P_t
    X = np.sqrt(c.C1 * P_t / denom)
    # dX/dP_t = C1 C0 / (2 X denom^2)
    dX = c.C1 * c.C0 / (2.0 * X * denom * denom)
    d_power = 6.0 / (5.0 * inst.env.P_c + 6.0 * P_t) - L * dX / (1.0 + X)
    d_length = 1.0 / L - 1.0 / Lp - _log_bit_success(P_t, c)
    return _out(d_power), _out(d_length)
