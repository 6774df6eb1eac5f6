import numpy as np
import pytest

from uwenergy.channel import snr_per_bit, source_level
from uwenergy.errors import BracketError, DomainError
from uwenergy.frequency import (
    C0_LEADING,
    F_HI,
    F_LO,
    derive_constants,
    dSL_df,
    find_bracket,
    optimal_frequency,
)


def test_dsl_df_signs():
    assert dSL_df(1e-6, 1000.0) < 0
    assert dSL_df(1e-3, 1e5) < 0
    assert dSL_df(1e3, 1000.0) > 0


@pytest.mark.parametrize("f", [5.0, 20.0, 80.0])
@pytest.mark.parametrize("d", [1e3, 1e5])
def test_dsl_df_matches_finite_difference(f, d):
    h = 1e-5 * f
    fd = (source_level(0.0, d, f + h) - source_level(0.0, d, f - h)) / (2 * h)
    assert abs(dSL_df(f, d) - fd) < 1e-6 * (1 + abs(fd))


def test_dsl_df_domain():
    with pytest.raises(DomainError):
        dSL_df(0.0, 1e3)


def _grid_argmin(d, n=10_000, f_max=200.0):
    f = np.linspace(f_max / n, f_max, n)
    return f[np.argmin(source_level(0.0, d, f))]


def test_optimal_frequency_1km():
    f = optimal_frequency(1000.0)
    assert f == pytest.approx(20.8, abs=0.2)
    assert abs(f - _grid_argmin(1000.0)) < 0.05


@pytest.mark.parametrize("d", [1e2, 1e3, 1e4, 1e5])
def test_root_residual_and_minimality(d):
    f = optimal_frequency(d)
    assert abs(dSL_df(f, d)) < 1e-8
    sl = source_level(0.0, d, f)
    assert sl <= source_level(0.0, d, f * 0.999)
    assert sl <= source_level(0.0, d, f * 1.001)


def test_short_links_need_bracket_expansion():
    # at 100 m the optimum lies above the initial 200 kHz bracket
    lo, hi = find_bracket(100.0)
    assert hi > F_HI
    assert optimal_frequency(100.0) == pytest.approx(_grid_argmin(100.0, 40_000, 800.0), abs=0.05)


def test_brackets_over_range():
    for d in np.geomspace(100, 1e5, 50):
        lo, hi = find_bracket(d)
        assert lo == F_LO
        assert dSL_df(lo, d) < 0 < dSL_df(hi, d)


def test_optimal_frequency_decreasing():
    fs = [optimal_frequency(d) for d in np.geomspace(100, 1e5, 50)]
    assert np.all(np.diff(fs) < 0)


def test_distance_range_enforced():
    with pytest.raises(DomainError):
        optimal_frequency(50.0)
    with pytest.raises(DomainError):
        optimal_frequency(2e5)


def test_bracket_failure():
    with pytest.raises(BracketError):
        find_bracket(1e-9)


def test_leading_constant():
    assert C0_LEADING == pytest.approx(4.209734155810323e-13, rel=1e-14)


def test_constants_1km(env):
    c = derive_constants(1000.0, env)
    # from an independent brentq-based evaluation
    assert c.f_star == pytest.approx(20.769033673171, rel=1e-9)
    assert c.C0 == pytest.approx(1.1647704255453907e-08, rel=1e-8)
    assert c.C1 == pytest.approx(235.15234978002204, rel=1e-8)
    assert c.C2 == pytest.approx(9.62972101385515e-06, rel=1e-9)
    assert c.C1 == c.f_star ** 1.8
    assert c.C2 == 1.0 / (5000.0 * c.f_star)


@pytest.mark.parametrize("d", [1e2, 1e3, 3e4, 1e5])
@pytest.mark.parametrize("P_t", [1e-9, 1.0, 10.0])
def test_linear_snr_identity(env, d, P_t):
    c = derive_constants(d, env)
    lin = 10 ** (snr_per_bit(P_t, d, c.f_star, env) / 10)
    assert abs(c.linear_snr(P_t) / lin - 1) < 1e-9
