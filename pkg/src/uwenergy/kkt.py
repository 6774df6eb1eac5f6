"""Four-case KKT analysis of the reduced energy problem.

Each case fixes which of the two inequality multipliers is nonzero:

* Case 1, both active: reliability and minimum length both bind.
* Case 2, reliability only: closed-form approximation obtained by linearizing
  ``P_acc0 ** (1/L)`` around ``1 + ln(P_acc0) / L``.
* Case 3, length only: stationarity in ``P_t`` at the shortest packet, a cubic
  in ``X = sqrt(C1 P_t / (C0 + C1 P_t))``.
* Case 4, neither: interior stationary point.

Cases 3 and 4 are solved by bisection in ``s = 1 - X`` so that roots close to
``X = 1`` keep full relative precision.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

from scipy.optimize import bisect

from uwenergy.errors import BracketError, DomainError, StationarityError
from uwenergy.objective import (
    DesignPoint,
    ProblemInstance,
    acceptance,
    constraints,
    dh1_dL,
    gradient,
    log_reduced_objective,
    min_power_for_reliability,
)

#: A solution counts as feasible if its exact P_acc is at most this far below P_acc0.
PACC_TOLERANCE = 1e-3
#: Relative slack on h1 for the strict feasibility flag (floating point only).
STRICT_H1_RTOL = 1e-12
#: Bound on the dimensionless gradient at a Case 4 interior point.
STATIONARITY_TOL = 1e-4
FD_STEP = 1e-5

_S_LO = 1e-300
_S_HI = 1.0 - 1e-16


class Case(str, enum.Enum):
    CASE1 = "Case1"
    CASE2_APPROX = "Case2Approx"
    CASE3 = "Case3"
    CASE4 = "Case4"

    @property
    def multipliers_active(self) -> tuple[bool, bool]:
        return _ACTIVE[self]


_ACTIVE = {
    Case.CASE1: (True, True),
    Case.CASE2_APPROX: (True, False),
    Case.CASE3: (False, True),
    Case.CASE4: (False, False),
}


@dataclass(frozen=True)
class KktSolution:
    """One KKT candidate; ``objective`` is the exact ln E'_b at ``point``."""

    case_tag: Case
    point: DesignPoint
    objective: float
    P_acc: float
    feasible: bool
    feasible_strict: bool
    residual: float = 0.0

    @property
    def multipliers_active(self) -> tuple[bool, bool]:
        return self.case_tag.multipliers_active

    def to_dict(self) -> dict:
        return {
            "case": self.case_tag.value,
            "P_t_W": float(self.point.P_t),
            "L_bits": float(self.point.L),
            "objective_ln_J_per_bit": float(self.objective),
            "P_acc": float(self.P_acc),
            "feasible": bool(self.feasible),
            "feasible_strict": bool(self.feasible_strict),
            "lambda1_active": self.multipliers_active[0],
            "lambda2_active": self.multipliers_active[1],
            "residual": float(self.residual),
        }


@dataclass(frozen=True)
class Case2Intermediates:
    A: float
    B: float
    per_bit_threshold: float
    """Linearized ``P_acc0 ** (1/L)``, i.e. ``1 + ln(P_acc0) / L``."""


@dataclass(frozen=True)
class CaseAnalysis:
    cases: list[KktSolution] = field(default_factory=list)
    best: KktSolution | None = None

    def by_tag(self, tag: Case | str) -> KktSolution:
        tag = Case(tag)
        return next(c for c in self.cases if c.case_tag is tag)


def _finish(tag: Case, point: DesignPoint, inst: ProblemInstance, residual: float = 0.0) -> KktSolution:
    h1, h2 = constraints(point, inst)
    p_acc = float(acceptance(point, inst))
    p_min = float(min_power_for_reliability(point.L, inst))
    feasible_h2 = h2 >= -1e-12
    return KktSolution(
        case_tag=tag,
        point=point,
        objective=float(log_reduced_objective(point, inst)),
        P_acc=p_acc,
        feasible=bool(p_acc >= inst.P_acc0 - PACC_TOLERANCE and feasible_h2),
        feasible_strict=bool(h1 >= -STRICT_H1_RTOL * p_min and feasible_h2),
        residual=residual,
    )


def _power_from_s(s: float, inst: ProblemInstance) -> float:
    c = inst.constants
    return c.C0 * (1.0 - s) ** 2 / (c.C1 * s * (2.0 - s))


def solve_case1(inst: ProblemInstance) -> KktSolution:
    """Both constraints active: shortest packet at the reliability boundary."""
    c = inst.constants
    L = inst.L_min
    Y = inst.P_acc0 ** (1.0 / L)
    P_t = c.C0 * (1.0 - 2.0 * Y) ** 2 / (Y * 4.0 * c.C1 * (1.0 - Y))
    return _finish(Case.CASE1, DesignPoint(P_t, L), inst)


def case1_closed_form_objective(inst: ProblemInstance) -> float:
    """ln E'_b of the Case 1 point written directly in terms of ``Y``."""
    c = inst.constants
    m = inst.overhead
    Y = inst.P_acc0 ** (1.0 / (1.0 + m))
    return (
        math.log(c.C2)
        + math.log(5.0 * inst.env.P_c - 3.0 * c.C0 * (1.0 - 2.0 * Y) ** 2 / (2.0 * c.C1 * (Y - 1.0) * Y))
        + (-1.0 - m) * math.log(Y)
        + math.log(1.0 + m)
    )


def case2_intermediates(inst: ProblemInstance) -> Case2Intermediates:
    c = inst.constants
    m = inst.overhead
    lnp = math.log(inst.P_acc0)
    Pc = inst.env.P_c
    A = lnp * m * (9.0 * c.C0 - 10.0 * c.C1 * Pc) + 3.0 * c.C0 * lnp**2 + 3.0 * c.C0 * m**2
    B = (lnp * (10.0 * c.C1 * Pc - 9.0 * c.C0) - 6.0 * c.C0 * m) / (2.0 * c.C1 * lnp)
    if not A > 0:
        raise DomainError(f"Case 2 constant A={A} is not positive for this parameter set")
    L = m + math.sqrt(A / (3.0 * c.C0))
    return Case2Intermediates(A=A, B=B, per_bit_threshold=1.0 + lnp / L)


def case2_power(L: float, inst: ProblemInstance) -> float:
    """Reliability-boundary power under the linearized threshold (W)."""
    c = inst.constants
    lnp = math.log(inst.P_acc0)
    return -(c.C0 / (4.0 * c.C1)) * (lnp / L + L / lnp + 3.0)


def case2_linearized_energy(L: float, inst: ProblemInstance, mid: Case2Intermediates) -> float:
    """E'_b along the linearized boundary expressed through ``A`` and ``B``."""
    c = inst.constants
    lnp = math.log(inst.P_acc0)
    Lp = L - inst.overhead
    return c.C2 / inst.P_acc0 * (-(mid.A / Lp + 3.0 * c.C0 * Lp) / (2.0 * c.C1 * lnp) + mid.B)


def solve_case2_approx(inst: ProblemInstance) -> KktSolution:
    """Reliability active only, via the linearized threshold (closed form)."""
    mid = case2_intermediates(inst)
    L = inst.overhead + math.sqrt(mid.A / (3.0 * inst.constants.C0))
    return _finish(Case.CASE2_APPROX, DesignPoint(case2_power(L, inst), L), inst)


def case3_coefficients(L: float, inst: ProblemInstance) -> tuple[float, float, float, float]:
    """Coefficients ``a0..a3`` of the ``P_t``-stationarity cubic in ``X``."""
    c = inst.constants
    Pc = inst.env.P_c
    k = 6.0 * c.C0 - 5.0 * c.C1 * Pc
    return (5.0 * c.C1 * Pc * L, -12.0 * c.C0 - 5.0 * c.C1 * Pc * L, k * L, -k * L)


def case3_polynomial(X: float, L: float, inst: ProblemInstance) -> float:
    a0, a1, a2, a3 = case3_coefficients(L, inst)
    return a0 + X * (a1 + X * (a2 + X * a3))


def _stationary_power_gap(s: float, L: float, inst: ProblemInstance) -> float:
    # cubic in factored form, written in s = 1 - X; sign is opposite to T3
    c = inst.constants
    Pc = inst.env.P_c
    return L * s * (5.0 * c.C1 * Pc * s * (2.0 - s) + 6.0 * c.C0 * (1.0 - s) ** 2) - 12.0 * c.C0 * (1.0 - s)


def _bisect_s(fn, what: str) -> float:
    lo_val, hi_val = fn(_S_LO), fn(_S_HI)
    if lo_val * hi_val >= 0:
        raise BracketError(f"{what}: no sign change on (0, 1)")
    return bisect(fn, _S_LO, _S_HI, xtol=1e-300, rtol=1e-15, maxiter=500)


def solve_case3(inst: ProblemInstance) -> KktSolution:
    """Shortest packet, power stationary: solve the cubic by bisection."""
    L = inst.L_min
    s = _bisect_s(lambda s: _stationary_power_gap(s, L, inst), "Case 3 cubic")
    X = 1.0 - s
    coeffs = case3_coefficients(L, inst)
    residual = abs(case3_polynomial(X, L, inst)) / max(abs(a) for a in coeffs)
    return _finish(Case.CASE3, DesignPoint(_power_from_s(s, inst), L), inst, residual)


def _length_from_power_stationarity(s: float, inst: ProblemInstance) -> float:
    # the cubic solved for L given X = 1 - s
    c = inst.constants
    Pc = inst.env.P_c
    return 12.0 * c.C0 * (1.0 - s) / (s * (5.0 * c.C1 * Pc * s * (2.0 - s) + 6.0 * c.C0 * (1.0 - s) ** 2))


def _length_from_length_stationarity(s: float, inst: ProblemInstance) -> float:
    # 1/L - 1/(L - m) = ln((1 + X)/2), positive root
    m = inst.overhead
    g = math.log1p(-0.5 * s)
    return 0.5 * m + 0.5 * math.sqrt(m * m - 4.0 * m / g)


def case4_terms(X: float, inst: ProblemInstance) -> tuple[float, float]:
    """``(f1, f2)`` whose sum minus ``(mu + tau) / 2`` vanishes at the interior point.

    Literal form in ``X``; loses relative precision as ``X -> 1``.  See
    :func:`case4_terms_s` for the form used by the solver.
    """
    c = inst.constants
    Pc = inst.env.P_c
    m = inst.overhead
    f1 = 0.5 * 24.0 * c.C0 * X / ((X - 1.0) * (-6.0 * c.C0 * X * X + 5.0 * c.C1 * Pc * (X * X - 1.0)))
    g = math.log((1.0 + X) / 2.0)
    f2 = math.sqrt(m * (math.log(16.0) + m * g * g - 4.0 * math.log(1.0 + X))) / (2.0 * g)
    return f1, f2


def case4_terms_s(s: float, inst: ProblemInstance) -> tuple[float, float]:
    """:func:`case4_terms` evaluated at ``X = 1 - s`` without cancellation."""
    half_m = 0.5 * inst.overhead
    f1 = _length_from_power_stationarity(s, inst)
    f2 = -(_length_from_length_stationarity(s, inst) - half_m)
    return f1, f2


def log_elasticities(point: DesignPoint, inst: ProblemInstance, h: float = FD_STEP) -> tuple[float, float]:
    """Central-difference ``P_t d/dP_t`` and ``L d/dL`` of ln E'_b."""
    P, L = float(point.P_t), float(point.L)

    def F(p, l):
        return float(log_reduced_objective(DesignPoint(p, l), inst))

    e_p = (F(P * (1 + h), L) - F(P * (1 - h), L)) / (2 * h)
    e_l = (F(P, L * (1 + h)) - F(P, L * (1 - h))) / (2 * h)
    return e_p, e_l


def solve_case4(inst: ProblemInstance) -> KktSolution:
    """Interior stationary point: bisection on the difference of the two
    stationarity conditions, each solved for ``L``."""
    s = _bisect_s(
        lambda s: _length_from_power_stationarity(s, inst) - _length_from_length_stationarity(s, inst),
        "Case 4 equation",
    )
    L = _length_from_power_stationarity(s, inst)
    point = DesignPoint(_power_from_s(s, inst), L)
    f1, f2 = case4_terms_s(s, inst)
    half_m = 0.5 * inst.overhead
    residual = abs(f1 + f2 - half_m) / max(abs(f1), abs(f2), half_m)
    grad = log_elasticities(point, inst)
    if max(abs(g) for g in grad) > STATIONARITY_TOL:
        raise StationarityError(f"Case 4 point {point} has finite-difference gradient {grad}")
    return _finish(Case.CASE4, point, inst, residual)


def recover_multipliers(sol: KktSolution, inst: ProblemInstance) -> tuple[float, float]:
    """Multipliers ``(lambda1, lambda2)`` implied by the two stationarity equations.

    ``lambda1`` is in 1/W, ``lambda2`` in 1/bit.  Inactive multipliers are 0.
    ``grad h1 = (1, dh1/dL)`` and ``grad h2 = (0, 1)``.
    """
    d_p, d_l = gradient(sol.point, inst)
    active1, active2 = sol.multipliers_active
    lam1 = float(d_p) if active1 else 0.0
    lam2 = float(d_l - lam1 * dh1_dL(sol.point.L, inst)) if active2 else 0.0
    return lam1, lam2


def solve(inst: ProblemInstance) -> CaseAnalysis:
    """Run all four cases and pick the feasible candidate with least ln E'_b."""
    cases = [solve_case1(inst), solve_case2_approx(inst), solve_case3(inst), solve_case4(inst)]
    feasible = [c for c in cases if c.feasible]
    if not feasible:
        raise RuntimeError("no KKT case produced a feasible solution")
    return CaseAnalysis(cases=cases, best=min(feasible, key=lambda c: c.objective))
