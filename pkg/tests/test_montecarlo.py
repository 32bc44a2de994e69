import math

import numpy as np
import pytest

from paretolab.dirichlet import ClassMix, find_tail_root
from paretolab.exceptions import OutOfRange, StationarityUnavailable
from paretolab.montecarlo import (CHUNK, AgentPopulation, mc_step, run_mc, survival_slope,
                                  uniforms)
from paretolab.params import ModelParams


def test_uniform_stream_is_per_agent():
    full = uniforms(99, 7, 0, 64)
    parts = np.concatenate([uniforms(99, 7, 0, 12), uniforms(99, 7, 12, 52)])
    np.testing.assert_array_equal(full, parts)
    assert not np.array_equal(uniforms(99, 7, 0, 8), uniforms(99, 8, 0, 8))
    assert not np.array_equal(uniforms(99, 7, 0, 8), uniforms(98, 7, 0, 8))


def test_critical_kappa_is_plus_minus_lambda_walk():
    params = ModelParams(0.6, 0.5, 1.0)
    pop = AgentPopulation.at_reinjection(10_000, seed=1)
    nxt = mc_step(pop, params)
    steps = (nxt.log_wealth - pop.log_wealth) / params.lam
    np.testing.assert_allclose(np.abs(steps), 1.0, rtol=1e-12)
    assert nxt.size == pop.size and nxt.step_count == 1


def test_sure_win_is_deterministic():
    mix = ClassMix([(1.0, 0.0, 0.5)], 1.0)
    pop = AgentPopulation.at_reinjection(1000, seed=3, reinject_at=2.0)
    for _ in range(5):
        pop = mc_step(pop, mix)
    np.testing.assert_allclose(pop.wealths, 2.0 * 1.5**5, rtol=1e-13)


def test_one_step_mean_multiplier():
    p, gamma = 0.6, 0.5
    pop = AgentPopulation.at_reinjection(1_000_000, seed=11)
    w = mc_step(pop, ModelParams(p, gamma, 1.0), workers=4).wealths
    expected = p * (1 + gamma) + (1 - p) / (1 + gamma)
    se = w.std(ddof=1) / math.sqrt(w.size)
    assert abs(w.mean() - expected) <= 3 * se


def test_drift_without_dissipation():
    params = ModelParams(0.6, 0.5, 1.0)
    pop = AgentPopulation.at_reinjection(100_000, seed=5)
    for _ in range(20):
        pop = mc_step(pop, params)
    drift = pop.log_wealth / 20
    se = drift.std(ddof=1) / math.sqrt(drift.size)
    assert abs(drift.mean() - (2 * 0.6 - 1) * params.lam) <= 3 * se


def test_kills_reset_to_reinjection_point():
    params = ModelParams(0.6, 0.5, 2.0)
    pop = AgentPopulation.at_reinjection(50_000, seed=2, reinject_at=3.0)
    for _ in range(10):
        pop = mc_step(pop, params)
    share = np.mean(np.isclose(pop.wealths, 3.0, rtol=1e-12))
    # killed at the last step (1/2) plus walkers that returned to the start
    assert share >= 0.5


def test_parallel_matches_serial():
    params = ModelParams(0.6, 0.5, 1.2)
    n = 2 * CHUNK + 1234
    a = run_mc(params, n, 30, 10, seed=42, workers=1, estimate_tail=False)
    b = run_mc(params, n, 30, 10, seed=42, workers=6, estimate_tail=False)
    assert a.samples.tobytes() == b.samples.tobytes()
    c = run_mc(params, n, 30, 10, seed=43, workers=6, estimate_tail=False)
    assert c.samples.tobytes() != a.samples.tobytes()


def test_prefix_agents_do_not_depend_on_population_size():
    params = ModelParams(0.6, 0.5, 1.2)
    small = run_mc(params, 1000, 20, 5, seed=8, estimate_tail=False)
    large = run_mc(params, CHUNK + 7, 20, 5, seed=8, estimate_tail=False)
    np.testing.assert_array_equal(small.samples, large.samples[:1000])


def test_stationarity_refused_at_critical_kappa():
    with pytest.raises(StationarityUnavailable, match="kappa=1"):
        run_mc(ModelParams(0.6, 0.5, 1.0), 1000, 10, 5, seed=0, hill_k=100)


def test_run_arguments():
    with pytest.raises(OutOfRange):
        run_mc(ModelParams(0.6, 0.5, 1.2), 1000, 10, 10, seed=0)
    with pytest.raises(OutOfRange):
        AgentPopulation.at_reinjection(10, seed=-1)


def test_multiclass_tail_matches_dirichlet_root():
    mix = ClassMix([(0.3, 0.2, 0.5), (0.3, 0.2, 0.2)], 1.2)
    res = run_mc(mix, 100_000, 200, 100, seed=7)
    alpha = find_tail_root(mix)[1]
    assert res.alpha_reference == alpha
    assert res.tail.alpha_hat == pytest.approx(alpha, rel=0.1)


def test_survival_slope_tracks_closed_form():
    params = ModelParams(0.6, 0.5, 1.2)
    res = run_mc(params, 100_000, 200, 100, seed=21, estimate_tail=False)
    slope = survival_slope(res.samples, 10.0)
    assert slope == pytest.approx(-(2.1240089104948296 - 1), rel=0.1)


def test_near_critical_tail_at_full_scale():
    params = ModelParams(0.7, 0.3, 1.02)
    res = run_mc(params, 200_000, 400, 200, seed=17)
    alpha = res.alpha_reference
    assert res.tail.alpha_hat == pytest.approx(alpha, rel=0.15)
    assert survival_slope(res.samples, 10.0) == pytest.approx(-(alpha - 1), rel=0.1)
