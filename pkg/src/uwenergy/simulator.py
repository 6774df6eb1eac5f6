"""Monte Carlo stop-and-wait delivery over the averaged Rayleigh BPSK channel.

A delivery repeats the same packet until one attempt arrives without bit
errors.  Bit errors are i.i.d. with the averaged BER, which is exactly the
independence the closed-form acceptance ratio assumes; no fading-block
correlation and no ACK energy are modelled.

Deliveries are grouped in fixed-size chunks, each with its own random
substream spawned from the master seed, so the report does not depend on how
many workers evaluate the chunks.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from uwenergy.channel import ChannelEnv, ber_bpsk, packet_acceptance, snr_per_bit
from uwenergy.errors import DomainError
from uwenergy.objective import DesignPoint, energy_per_attempt, energy_per_bit

CHUNK = 4096
MODES = ("packet", "bit")


@dataclass(frozen=True)
class SimConfig:
    trials: int = 100_000
    seed: int = 0
    mode: str = "packet"
    max_attempts_cap: int = 1_000_000
    workers: int = 1

    def __post_init__(self):
        if self.trials < 1:
            raise DomainError("trials must be >= 1")
        if self.max_attempts_cap < 1:
            raise DomainError("max_attempts_cap must be >= 1")
        if self.mode not in MODES:
            raise DomainError(f"mode must be one of {MODES}, got {self.mode!r}")


@dataclass(frozen=True)
class SimReport:
    trials: int
    completed: int
    capped: int
    total_attempts: int
    empirical_P_acc: float
    P_acc_stderr: float
    mean_attempts: float
    attempts_stderr: float
    empirical_E_b: float
    E_b_stderr: float
    analytic_P_acc: float
    analytic_E_b: float
    T1: float
    T2: float
    delay_ratio: float
    degenerate_stderr: bool

    def to_dict(self) -> dict:
        out = asdict(self)
        # NaN is not valid JSON
        return {k: (None if isinstance(v, float) and math.isnan(v) else v) for k, v in out.items()}


def delay_ratio(point: DesignPoint, f: float, d: float, env: ChannelEnv) -> float:
    """Propagation delay over packet airtime, ``(d / v) / (L / (1000 f))``."""
    if not (f > 0 and d > 0):
        raise DomainError("f and d must be positive")
    if not point.L >= 1:
        raise DomainError("packet length L must be >= 1 bit")
    return (d / env.v) / (point.L / (1000.0 * f))


def _chunk_attempts(rng: np.random.Generator, n: int, mode: str, p_acc: float, ber: float,
                    L: int, cap: int) -> np.ndarray:
    """Attempts used by each of ``n`` deliveries; ``cap + 1`` marks a capped one."""
    if mode == "packet":
        if p_acc >= 1.0:
            return np.ones(n, dtype=np.int64)
        if p_acc <= 0.0:
            return np.full(n, cap + 1, dtype=np.int64)
        return np.minimum(rng.geometric(p_acc, size=n), cap + 1)
    attempts = np.zeros(n, dtype=np.int64)
    pending = np.arange(n)
    for _ in range(cap):
        if pending.size == 0:
            break
        attempts[pending] += 1
        errors = rng.random((pending.size, L)) < ber
        pending = pending[errors.any(axis=1)]
    attempts[pending] = cap + 1
    return attempts


def simulate(point: DesignPoint, f: float, d: float, env: ChannelEnv, cfg: SimConfig) -> SimReport:
    """Simulate ``cfg.trials`` deliveries of packets designed as ``point``.

    Per-bit mode needs an integral packet length.  Capped deliveries count
    towards the attempt-level acceptance estimate but not towards energy.
    """
    L_real = float(point.L)
    Lp = L_real - env.overhead
    if not Lp > 0:
        raise DomainError("packet carries no payload")
    if cfg.mode == "bit" and L_real != round(L_real):
        raise DomainError("per-bit sampling needs an integer packet length")
    gamma = snr_per_bit(point.P_t, d, f, env)
    ber = float(ber_bpsk(gamma))
    p_acc = float(packet_acceptance(gamma, L_real))
    e_attempt = float(energy_per_attempt(point, f, env))

    sizes = [min(CHUNK, cfg.trials - start) for start in range(0, cfg.trials, CHUNK)]
    streams = np.random.SeedSequence(cfg.seed).spawn(len(sizes))

    def run(args):
        seq, n = args
        rng = np.random.Generator(np.random.PCG64(seq))
        return _chunk_attempts(rng, n, cfg.mode, p_acc, ber, int(round(L_real)), cfg.max_attempts_cap)

    jobs = list(zip(streams, sizes))
    if cfg.workers > 1:
        with ThreadPoolExecutor(cfg.workers) as pool:
            parts = list(pool.map(run, jobs))
    else:
        parts = [run(j) for j in jobs]
    attempts = np.concatenate(parts)

    done = attempts <= cfg.max_attempts_cap
    capped = int((~done).sum())
    used = np.where(done, attempts, cfg.max_attempts_cap)
    total_attempts = int(used.sum())
    a = attempts[done].astype(float)
    n = a.size

    p_hat = n / total_attempts if total_attempts else math.nan
    mean_a = float(a.mean()) if n else math.nan
    degenerate = n < 2
    if degenerate:
        sd_a = math.nan
        p_se = math.nan
    else:
        sd_a = float(a.std(ddof=1))
        # negative-binomial sampling: var(n / N) ~ p^2 (1 - p) / n
        p_se = p_hat * math.sqrt(max(1.0 - p_hat, 0.0) / n)
    a_se = sd_a / math.sqrt(n) if n else math.nan
    scale = e_attempt / Lp
    t1 = d / env.v
    t2 = L_real / (1000.0 * f)
    return SimReport(
        trials=cfg.trials,
        completed=n,
        capped=capped,
        total_attempts=total_attempts,
        empirical_P_acc=p_hat,
        P_acc_stderr=p_se,
        mean_attempts=mean_a,
        attempts_stderr=a_se,
        empirical_E_b=mean_a * scale,
        E_b_stderr=a_se * scale,
        analytic_P_acc=p_acc,
        analytic_E_b=float(energy_per_bit(point, f, d, env)),
        T1=t1,
        T2=t2,
        delay_ratio=t1 / t2,
        degenerate_stderr=degenerate,
    )
