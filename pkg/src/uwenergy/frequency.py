"""Power-optimal carrier frequency and the reduced-model constants.

For a fixed distance the source level needed for a given SNR is convex-like
in the carrier: noise falls with frequency while absorption grows.  The
minimizing carrier ``f*(d)`` is the root of the source-level derivative.  At
``f*`` the linear SNR per bit collapses to ``C1 * P_t / C0`` and the airtime
factor to ``C2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import bisect

from uwenergy.channel import D_MAX, D_MIN, ChannelEnv, absorption, source_level, _positive, _out
from uwenergy.errors import BracketError, DomainError

F_LO = 1e-3
F_HI = 200.0
#: Geometric bracket expansion stops here (kHz); beyond it the model is misused.
F_HI_LIMIT = 1e5
#: Leading constant of C0: 2*pi*I_ref*1e5, the 1e5 coming from the noise level.
C0_LEADING = 2.0 * math.pi * 0.67e-18 * 1e5

_LN10 = math.log(10.0)


@dataclass(frozen=True)
class DerivedConstants:
    """Per-distance constants of the reduced two-variable problem."""

    d: float
    f_star: float
    C0: float
    C1: float
    C2: float

    def linear_snr(self, P_t):
        """Linear SNR per bit at the reduced model's carrier."""
        return self.C1 * np.asarray(P_t, dtype=float) / self.C0


def dSL_df(f, d):
    """Derivative of the source level with respect to the carrier, dB/kHz."""
    f = _positive("frequency f", f)
    d = _positive("distance d", d)
    f2 = f * f
    slope = (2.2e-4 / (1.0 + f2) ** 2 + 360.8 / (4100.0 + f2) ** 2 + 5.5e-7) * f * d
    return _out(slope - 18.0 / (f * _LN10))


def _check_distance(d):
    if not (D_MIN <= d <= D_MAX):
        raise DomainError(f"distance d={d} m outside the supported [{D_MIN:g}, {D_MAX:g}] m range")


def find_bracket(d: float, lo: float = F_LO, hi: float = F_HI) -> tuple[float, float]:
    """Return ``(lo, hi)`` with ``dSL_df(lo) < 0 < dSL_df(hi)``.

    The upper end is doubled until the derivative turns positive; short
    links have their optimum above 200 kHz.
    """
    while dSL_df(lo, d) >= 0:
        lo /= 10.0
        if lo < 1e-12:
            raise BracketError(f"no negative slope found below {F_LO} kHz at d={d}")
    while dSL_df(hi, d) <= 0:
        hi *= 2.0
        if hi > F_HI_LIMIT:
            raise BracketError(f"no sign change of dSL/df up to {F_HI_LIMIT:g} kHz at d={d}")
    return lo, hi


def optimal_frequency(d: float) -> float:
    """Carrier frequency (kHz) minimizing the source level at distance ``d``."""
    _check_distance(d)
    lo, hi = find_bracket(d)
    f = bisect(dSL_df, lo, hi, args=(d,), xtol=1e-300, rtol=1e-13, maxiter=500)
    sl = source_level(0.0, d, f)
    if sl > source_level(0.0, d, f * (1 - 1e-3)) or sl > source_level(0.0, d, f * (1 + 1e-3)):
        raise BracketError(f"root f={f} of dSL/df at d={d} is not a local minimum of SL")
    return f


def constants_at(d: float, f: float, env: ChannelEnv) -> DerivedConstants:
    """Reduced-model constants for an explicit carrier ``f`` (kHz)."""
    C0 = 2.0 * math.pi * env.I_ref * 1e5 * 10.0 ** (absorption(f) * d * 1e-4) * d * env.H
    return DerivedConstants(d=d, f_star=f, C0=C0, C1=f ** 1.8, C2=1.0 / (5000.0 * f))


def derive_constants(d: float, env: ChannelEnv) -> DerivedConstants:
    """Constants of the reduced problem at the power-optimal carrier."""
    return constants_at(d, optimal_frequency(d), env)
