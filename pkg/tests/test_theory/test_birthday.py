"""Tests for birthday-problem probabilities."""

import math

import pytest

from collision_kit.exceptions import ParameterRegimeError
from collision_kit.theory.birthday import (
    CLOSE_TOLERANCE,
    discrepancy_experiment,
    in_regime,
    monte_carlo,
    p_approx,
    p_clean,
    p_collision,
    p_exact,
    p_cross,
    p_mixed,
)
from collision_kit.theory.models import BirthdayParams

WEIGHT_REGIME = BirthdayParams(n=128, s=1 << 16, s_a=1 << 8, s_b=(1 << 16) - (1 << 8), p_a=0.99, p_b=0.01)


def test_p_exact_classic_value():
    assert p_exact(23, 365) == pytest.approx(0.5073, abs=1e-4)


def test_p_exact_edges():
    assert p_exact(1, 365) == 0.0
    assert p_exact(366, 365) == 1.0


def test_p_exact_large_n_uses_log_space():
    s = 1 << 48
    n = 2_000_000
    assert p_exact(n, s) == pytest.approx(p_approx(n, s), rel=1e-3)


def test_p_approx_classic_value():
    assert p_approx(23, 365) == pytest.approx(0.5155, abs=1e-4)
    assert abs(p_approx(23, 365) - p_exact(23, 365)) <= 0.02


def test_p_approx_tracks_exact_when_n_squared_below_s():
    for n in range(1, 20):
        assert abs(p_exact(n, 365) - p_approx(n, 365)) <= 0.02


def test_p_approx_small_n_near_zero():
    assert p_approx(1, 1 << 32) < 1e-9


def test_p_clean_reduces_to_p_approx():
    params = BirthdayParams(n=23, s=365, s_a=365, s_b=365, p_a=1.0, p_b=0.0)
    assert p_clean(params) == pytest.approx(p_approx(23, 365))
    assert p_collision(params) == 0.0


def test_p_clean_saturates_for_small_vocabulary():
    params = BirthdayParams(n=10_000, s=1 << 16, s_a=1000, s_b=1 << 15, p_a=0.99, p_b=0.01)
    assert p_clean(params) == pytest.approx(1.0)


def test_p_mixed_flags_degenerate_regime(caplog):
    params = BirthdayParams(n=23, s=365, s_a=365, s_b=365, p_a=1.0, p_b=0.0)
    result = p_mixed(params)
    assert result.raw == pytest.approx(2.0)
    assert result.value == 1.0
    assert result.clamped
    assert "clamped" in caplog.text


def test_p_mixed_in_range_not_flagged():
    params = BirthdayParams(n=1000, s=1 << 16, s_a=1 << 8, s_b=1 << 12, p_a=0.5, p_b=0.5)
    result = p_mixed(params)
    assert not result.clamped
    assert 0.0 <= result.value <= 1.0


@pytest.mark.parametrize(
    "kwargs",
    [
        {"n": 0, "s": 10, "s_a": 1, "s_b": 1, "p_a": 1.0, "p_b": 0.0},
        {"n": 5, "s": 10, "s_a": 8, "s_b": 4, "p_a": 0.5, "p_b": 0.5},
        {"n": 5, "s": 10, "s_a": 4, "s_b": 20, "p_a": 0.5, "p_b": 0.5},
        {"n": 5, "s": 10, "s_a": 4, "s_b": 8, "p_a": 0.6, "p_b": 0.6},
    ],
)
def test_invalid_params_rejected(kwargs):
    with pytest.raises(ParameterRegimeError):
        BirthdayParams(**kwargs)


def test_monte_carlo_classic_value():
    result = monte_carlo(23, 365, 100_000, seed=0)
    assert abs(result.estimate - 0.5073) <= 0.01
    assert result.probability == pytest.approx(p_exact(23, 365))
    assert result.standard_error == pytest.approx(
        math.sqrt(result.estimate * (1 - result.estimate) / 100_000)
    )


@pytest.mark.parametrize("n,s", [(10, 100), (23, 365), (40, 1000), (300, 1 << 16)])
def test_monte_carlo_within_three_standard_errors(n, s):
    result = monte_carlo(n, s, 20_000, seed=n)
    assert abs(result.discrepancy) <= 3 * result.standard_error + 1e-9


def test_monte_carlo_single_draw_never_repeats():
    assert monte_carlo(1, 365, 1000).estimate == 0.0


def test_monte_carlo_deterministic_per_seed():
    assert monte_carlo(23, 365, 5000, seed=7) == monte_carlo(23, 365, 5000, seed=7)
    assert monte_carlo(23, 365, 5000, seed=7, workers=3) == monte_carlo(
        23, 365, 5000, seed=7, workers=3
    )


def test_monte_carlo_workers_agree_statistically():
    result = monte_carlo(23, 365, 40_000, seed=1, workers=4)
    assert abs(result.discrepancy) <= 3 * result.standard_error


def test_monte_carlo_rejects_zero_trials():
    with pytest.raises(ParameterRegimeError, match="at least one trial"):
        monte_carlo(23, 365, 0)


def test_doubling_trials_shrinks_standard_error():
    small = monte_carlo(23, 365, 20_000, seed=2)
    large = monte_carlo(23, 365, 40_000, seed=3)
    assert small.standard_error / large.standard_error == pytest.approx(math.sqrt(2), rel=0.05)


def test_discrepancy_ordering_in_regime():
    assert in_regime(WEIGHT_REGIME)
    result = discrepancy_experiment(WEIGHT_REGIME, trials=2000, seed=0)
    assert result.clean.estimate >= 0.99
    assert result.collision.estimate <= 0.05
    assert abs(result.collision.estimate - result.mixed.estimate) <= 0.05
    assert result.ordering_holds is True


def test_discrepancy_reports_formula_next_to_simulation():
    result = discrepancy_experiment(WEIGHT_REGIME, trials=500, seed=1)
    assert result.clean.probability == pytest.approx(p_clean(WEIGHT_REGIME))
    assert result.collision.probability == pytest.approx(p_collision(WEIGHT_REGIME))
    assert result.mixed.probability == result.mixed_formula.value


def test_discrepancy_outside_regime_not_asserted():
    params = BirthdayParams(n=64, s=1 << 16, s_a=1 << 10, s_b=1 << 10, p_a=0.5, p_b=0.5)
    result = discrepancy_experiment(params, trials=500, seed=0)
    assert not result.in_regime
    assert result.ordering_holds is None


def test_discrepancy_window_override():
    result = discrepancy_experiment(WEIGHT_REGIME, window_tokens=64, trials=200)
    assert result.params.n == 64


def test_discrepancy_deterministic():
    a = discrepancy_experiment(WEIGHT_REGIME, trials=300, seed=5, workers=2)
    b = discrepancy_experiment(WEIGHT_REGIME, trials=300, seed=5, workers=2)
    assert a == b


def test_p_cross_edges():
    params = BirthdayParams(n=64, s=1 << 16, s_a=1 << 8, s_b=1 << 12, p_a=1.0, p_b=0.0)
    assert p_cross(params) == 0.0
    single = BirthdayParams(n=2, s=1 << 16, s_a=1, s_b=1, p_a=0.5, p_b=0.5)
    assert p_cross(single) == 1.0


def test_p_cross_one_token_each():
    params = BirthdayParams(n=2, s=1 << 16, s_a=100, s_b=400, p_a=0.5, p_b=0.5)
    assert p_cross(params) == pytest.approx(1 / 400)


def test_mixed_windows_share_tokens_across_shares():
    params = BirthdayParams(n=128, s=1024, s_a=64, s_b=960, p_a=0.5, p_b=0.5)
    result = discrepancy_experiment(params, trials=4000, seed=0)
    assert result.mixed.estimate > 0.5
    assert result.mixed_pairwise == pytest.approx(p_cross(params))
    assert abs(result.mixed.estimate - result.mixed_pairwise) <= 0.02
    assert result.mixed_formula.clamped


def test_mixed_tracks_pairwise_prediction_in_weight_regime():
    result = discrepancy_experiment(WEIGHT_REGIME, trials=20_000, seed=3)
    assert result.mixed.estimate > 0
    assert abs(result.mixed.estimate - result.mixed_pairwise) <= 3 * result.mixed.standard_error + 1e-3


def test_ordering_fails_when_collision_shares_clean_tokens(caplog):
    params = BirthdayParams(n=128, s=1 << 16, s_a=1 << 8, s_b=1 << 12, p_a=0.95, p_b=0.05)
    assert in_regime(params)
    result = discrepancy_experiment(params, trials=4000, seed=0)
    assert result.mixed.estimate > result.collision.estimate + CLOSE_TOLERANCE
    assert result.ordering_holds is False
    assert "Ordering not observed" in caplog.text
