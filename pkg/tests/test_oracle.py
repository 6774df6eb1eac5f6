import math

import numpy as np
import pytest

from uwenergy.channel import ChannelEnv, packet_acceptance, snr_per_bit
from uwenergy.errors import DomainError
from uwenergy.experiments import table1
from uwenergy.frequency import optimal_frequency
from uwenergy.kkt import solve
from uwenergy.objective import ProblemInstance, constraints, min_power_for_reliability
from uwenergy.oracle import (
    GridSpec,
    is_feasible_original,
    min_power_full_chain,
    minimize_original,
    minimize_reduced,
    relative_error,
)

# printed relative errors (%), rounded to three decimals
PRINTED = {
    0.980: (0.012, 0.015, 0.015, 0.015, 0.015, 0.015, 0.015, 0.015, 0.015, 0.015),
    0.985: (0.009, 0.011, 0.011, 0.012, 0.012, 0.012, 0.012, 0.012, 0.012, 0.012),
    0.990: (0.007, 0.000, 0.000, 0.000, 0.000, 0.000, 0.000, 0.000, 0.000, 0.000),
}


@pytest.fixture(scope="module")
def table_rows():
    return table1()


@pytest.fixture(scope="module")
def reduced_results():
    cells = [(1e3, 0.99), (1e4, 0.98), (1e5, 0.99), (100.0, 0.99)]
    return {c: (ProblemInstance.at(*c), minimize_reduced(ProblemInstance.at(*c))) for c in cells}


def test_relative_error():
    assert relative_error(1.01, 1.0) == pytest.approx(1.0)
    assert relative_error(-2.0, -2.0) == 0.0
    assert relative_error(0.99, 1.0) == relative_error(1.01, 1.0)
    with pytest.raises(DomainError):
        relative_error(1.0, 0.0)
    with pytest.raises(DomainError):
        relative_error(math.nan, 1.0)


def test_grid_doubling():
    g = GridSpec()
    d = g.doubled()
    assert (d.n_power, d.n_length, d.n_freq) == (800, 800, 81)
    assert d.power_xtol == g.power_xtol
    assert g.to_dict()["freq_range"] == [0.01, 10_000.0]


def test_reduced_oracle_feasible_and_active(reduced_results):
    for inst, res in reduced_results.values():
        h1, h2 = constraints(res.point, inst)
        p_min = float(min_power_for_reliability(res.point.L, inst))
        assert h1 >= -1e-12 * p_min and h2 >= 0
        assert res.refined and res.objective <= res.grid_objective


def test_reduced_oracle_beats_feasible_cases(reduced_results):
    for inst, res in reduced_results.values():
        for c in solve(inst).cases:
            if c.feasible_strict:
                assert res.objective <= c.objective + 1e-12, c.case_tag


def test_reduced_oracle_interior_at_short_range(reduced_results):
    # at 100 m the unconstrained stationary point is already reliable enough
    inst, res = reduced_results[(100.0, 0.99)]
    best = solve(inst).best
    assert res.objective == pytest.approx(best.objective, abs=1e-9)
    assert res.point.L > 1000


@pytest.mark.parametrize("cell", [(1e4, 0.98), (1e5, 0.99)])
def test_reduced_oracle_grid_stable(cell, reduced_results):
    inst, res = reduced_results[cell]
    fine = minimize_reduced(inst, GridSpec().doubled())
    assert relative_error(math.exp(res.objective), math.exp(fine.objective)) < 1e-4


def test_min_power_full_chain_round_trip():
    env = ChannelEnv()
    L = np.array([40.0, 100.0, 500.0])
    for f in (2.0, 10.0, 40.0):
        P = min_power_full_chain(L, f, 1e4, env, 0.98)
        acc = packet_acceptance(snr_per_bit(P, 1e4, f, env), L)
        assert np.max(np.abs(acc - 0.98)) < 1e-9


@pytest.fixture(scope="module")
def original_1km():
    env = ChannelEnv()
    return minimize_original(1e3, env, 0.99), env


def test_original_oracle_feasible(original_1km):
    res, env = original_1km
    assert res.refined
    assert is_feasible_original(res, 1e3, env, 0.99)


def test_original_not_worse_than_two_step(original_1km, reduced_results):
    res, _ = original_1km
    inst, red = reduced_results[(1e3, 0.99)]
    # the reduced problem fixes f at f*, a restriction of the joint search
    assert res.objective <= red.objective + 1e-9
    # both use the same energy model except for the carrier choice
    assert res.f >= optimal_frequency(1e3)


def test_original_grid_stable(original_1km):
    res, env = original_1km
    fine = minimize_original(1e3, env, 0.99, GridSpec().doubled())
    assert relative_error(math.exp(res.objective), math.exp(fine.objective)) < 1e-4


def test_table_within_bound(table_rows):
    sweep, rows = table_rows
    assert sweep.ok
    assert len(rows) == 30
    assert max(r.relative_error for r in rows) <= 0.05


@pytest.mark.parametrize("p", [0.980, 0.985])
def test_table_matches_printed_rows(p, table_rows):
    _, rows = table_rows
    ours = [r.relative_error for r in rows if r.P_acc0 == p]
    assert np.max(np.abs(np.array(ours) - PRINTED[p])) <= 1e-3


def test_table_printed_first_cell_of_last_row(table_rows):
    _, rows = table_rows
    first = next(r for r in rows if r.P_acc0 == 0.990 and r.d == 1e4)
    assert abs(first.relative_error - PRINTED[0.990][0]) <= 1e-3
