"""Acoustic physical layer: absorption, noise, loss, source level, SNR and BER.

Units are fixed across the package: distances in meters, frequencies in kHz,
powers in watts, levels in dB and packet lengths in bits.  Every function
accepts scalars or numpy arrays and broadcasts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from uwenergy.errors import DomainError

#: Reference intensity of the source-level scale, W/m^2.
I_REF = 0.67e-18
#: Lower end of the distance range where the link model is used, meters.
D_MIN = 100.0
#: Upper end of the distance range where the link model is used, meters.
D_MAX = 100_000.0

_LN10 = math.log(10.0)


@dataclass(frozen=True)
class ChannelEnv:
    """Physical environment and protocol constants of one link.

    Defaults are 10 m depth, 1 uW electronics power, 16-bit header and
    trailer and 1500 m/s sound speed.
    """

    H: float = 10.0
    P_c: float = 1e-6
    mu: float = 16.0
    tau: float = 16.0
    v: float = 1500.0
    DI: float = 0.0
    I_ref: float = I_REF

    def __post_init__(self):
        if not self.H > 0:
            raise DomainError(f"water depth H must be > 0, got {self.H}")
        if not self.P_c >= 0:
            raise DomainError(f"electronics power P_c must be >= 0, got {self.P_c}")
        if not (self.mu >= 0 and self.tau >= 0):
            raise DomainError(f"header/trailer lengths must be >= 0, got {self.mu}, {self.tau}")
        if not self.v > 0:
            raise DomainError(f"sound speed v must be > 0, got {self.v}")
        if self.DI != 0.0:
            raise DomainError("only omnidirectional hydrophones are modelled (DI = 0)")

    @property
    def overhead(self) -> float:
        """Header plus trailer length, bits."""
        return self.mu + self.tau

    def replace(self, **changes) -> "ChannelEnv":
        return type(self)(**{**self.__dict__, **changes})


@dataclass(frozen=True)
class LinkPoint:
    """A fully specified transmission: distance, carrier, power and length."""

    d: float
    f: float
    P_t: float
    L: float

    def __post_init__(self):
        if not (self.d > 0 and self.f > 0):
            raise DomainError(f"d and f must be positive, got d={self.d}, f={self.f}")
        if not self.P_t >= 0:
            raise DomainError(f"P_t must be >= 0, got {self.P_t}")
        if not self.L > 0:
            raise DomainError(f"L must be > 0, got {self.L}")

    def validate_for(self, env: ChannelEnv) -> None:
        if not self.L > env.overhead:
            raise DomainError(f"L={self.L} leaves no payload after {env.overhead} overhead bits")


def _positive(name, x):
    arr = np.asarray(x, dtype=float)
    if np.any(~(arr > 0)):
        raise DomainError(f"{name} must be > 0")
    return arr


def _out(arr):
    return arr.item() if np.ndim(arr) == 0 else arr


def absorption(f):
    """Thorp absorption coefficient in dB/km for a carrier of ``f`` kHz."""
    f = _positive("frequency f", f)
    f2 = f * f
    return _out(0.11 * f2 / (1.0 + f2) + 44.0 * f2 / (4100.0 + f2) + 2.75e-4 * f2 + 0.003)


def noise_level(f):
    """Ambient noise level in dB: ``50 - 18 lg f``."""
    f = _positive("frequency f", f)
    return _out(50.0 - 18.0 * np.log10(f))


def transmission_loss(d, f):
    """Spherical spreading plus absorption loss over ``d`` meters, dB."""
    d = _positive("distance d", d)
    return _out(10.0 * np.log10(d) + np.asarray(absorption(f)) * d * 1e-3)


def source_level(gamma_b, d, f):
    """Source level needed for SNR per bit ``gamma_b`` (dB) at the receiver."""
    gamma_b = np.asarray(gamma_b, dtype=float)
    return _out(gamma_b + np.asarray(transmission_loss(d, f)) + np.asarray(noise_level(f)))


def power_from_source_level(SL, env: ChannelEnv):
    """Transmit power in watts producing source level ``SL`` dB at 1 m."""
    SL = np.asarray(SL, dtype=float)
    intensity = 10.0 ** (SL / 10.0) * env.I_ref
    return _out(2.0 * math.pi * env.H * intensity)


def snr_per_bit(P_t, d, f, env: ChannelEnv):
    """SNR per bit in dB at distance ``d`` for transmit power ``P_t``.

    This is the exact inverse of ``power_from_source_level(source_level(...))``;
    the noise-level constant of 50 dB is part of it.
    """
    P_t = _positive("transmit power P_t", P_t)
    d = _positive("distance d", d)
    f = _positive("frequency f", f)
    gamma = (
        10.0 * (np.log10(P_t) - math.log10(2.0 * math.pi * env.H * env.I_ref) - np.log10(d))
        - 50.0
        - np.asarray(absorption(f)) * d * 1e-3
        + 18.0 * np.log10(f)
    )
    return _out(gamma)


def ber_bpsk(gamma_b):
    """Average BPSK bit error rate over Rayleigh fading at SNR ``gamma_b`` dB.

    Evaluated as ``0.5 / ((1 + g)(1 + sqrt(g / (1 + g))))``, which equals
    ``0.5 (1 - sqrt(g / (1 + g)))`` without the cancellation at high SNR.
    """
    g = 10.0 ** (np.asarray(gamma_b, dtype=float) / 10.0)
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        root = np.where(np.isinf(g), 1.0, np.sqrt(g / (1.0 + g)))
        ber = 0.5 / ((1.0 + g) * (1.0 + root))
    return _out(ber)


def packet_acceptance(gamma_b, L):
    """Probability that all ``L`` bits of a packet arrive error free."""
    L = np.asarray(L, dtype=float)
    if np.any(~(L >= 1)):
        raise DomainError("packet length L must be >= 1 bit")
    ber = np.asarray(ber_bpsk(gamma_b))
    return _out(np.exp(L * np.log1p(-ber)))
