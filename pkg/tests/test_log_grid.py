import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import operator_by_cells
from paretolab.closed_form import pareto_exponent
from paretolab.dirichlet import ClassMix
from paretolab.estimators import loglog_slope
from paretolab.exceptions import (AlignmentMismatch, EmptyInterior, OutOfRange,
                                  ResourceLimit)
from paretolab.log_grid import (GridDistribution, GridOperator, GridSpec, apply_operator,
                                discrete_l1, iterate, iterate_with_source, make_grid,
                                pareto_fixed_point, residual)
from paretolab.params import ModelParams

P = ModelParams(0.6, 0.5, 1.2)
LAM = math.log(1.5)


def random_grid(rng, params, m=8, n=60, signed=False, base=-10):
    values = rng.random(n)
    if signed:
        values = values - 0.5
    return GridDistribution(base, m, params.lam, values, signed=signed)


def test_make_grid_cells():
    g = make_grid(P, 1, 1.0, 1.5**3)
    assert g.size == 4
    np.testing.assert_allclose(g.x, [1, 1.5, 2.25, 3.375], rtol=1e-15)
    assert g.base_index == 0 and g.step * g.m == g.lam


def test_make_grid_subdivision():
    assert make_grid(P, 4, 1.0, 1.5**3).size == 13
    assert make_grid(P, 4, 1.0, 1.5**3).size - 1 == 4 * (make_grid(P, 1, 1.0, 1.5**3).size - 1)


@pytest.mark.parametrize("bounds", [(2.0, 2.0), (3.0, 2.0), (0.0, 1.0), (1.0, math.inf)])
def test_make_grid_bad_bounds(bounds):
    with pytest.raises(OutOfRange):
        make_grid(P, 8, *bounds)


def test_discrete_l1():
    h = 0.1
    g = GridDistribution(0, 1, h, [0.0])
    assert discrete_l1(g) == 0.0
    j = round(math.log(2) / h)
    one = GridDistribution(j, 1, h, [1.0])
    assert discrete_l1(one) == pytest.approx(h * math.exp(j * h), rel=1e-15)
    n = 7
    g = GridDistribution(-3, 1, h, np.exp(-h * np.arange(-3, -3 + n)))
    assert discrete_l1(g) == pytest.approx(n * h, rel=1e-14)


def test_negative_density_rejected():
    with pytest.raises(OutOfRange):
        GridDistribution(0, 1, 0.1, [-1.0])
    GridDistribution(0, 1, 0.1, [-1.0], signed=True)


def test_delta_maps_to_two_cells():
    m = 4
    g = GridDistribution(0, m, LAM, [1.0])
    out = apply_operator(g, P)
    assert out.base_index == -m and out.size == 2 * m + 1
    win, loss = 0.6 / (1.2 * 1.5), 0.4 * 1.5 / 1.2
    expected = np.zeros(2 * m + 1)
    expected[0], expected[-1] = loss, win
    np.testing.assert_array_equal(out.values, expected)
    assert discrete_l1(out) / discrete_l1(g) == pytest.approx(1 / 1.2, rel=1e-13)


def test_matches_cell_oracle(rng):
    g = random_grid(rng, P, m=3, n=17, signed=True, base=5)
    out = apply_operator(g, P)
    ref = operator_by_cells(dict(zip(g.indices.tolist(), g.values)), 0.6, 0.5, 1.2, 3)
    for j, f in zip(out.indices.tolist(), out.values):
        assert f == pytest.approx(ref.get(j, 0.0), abs=1e-15)


def test_zero_grid_stays_zero():
    out = apply_operator(GridDistribution(0, 8, LAM, np.zeros(20)), P)
    assert not np.any(out.values)


def test_wealth_preserving_at_critical_kappa(rng):
    params = ModelParams(0.7, 0.3, 1.0)
    g = random_grid(rng, params)
    assert discrete_l1(apply_operator(g, params)) == pytest.approx(discrete_l1(g), rel=1e-13)


def test_alignment_checked(rng):
    g = random_grid(rng, P)
    with pytest.raises(AlignmentMismatch):
        apply_operator(g, ModelParams(0.6, 0.4, 1.2))
    with pytest.raises(AlignmentMismatch):
        apply_operator(g, GridOperator.from_params(P, 4))
    with pytest.raises(AlignmentMismatch):
        GridOperator.from_mix(ClassMix([(0.3, 0.2, 0.5), (0.3, 0.2, 0.2)], 1.2), 8)


def test_fixed_point_pure_power_law():
    g = pareto_fixed_point(P, GridSpec(8, 1.0, 1e4))
    assert residual(g, P) <= 1e-12
    np.testing.assert_allclose(g.values, g.x ** pareto_exponent(P).rho0, rtol=1e-12)


def test_fixed_point_modulated(rng):
    for _ in range(10):
        g = pareto_fixed_point(P, GridSpec(8, 0.5, 1e3), rng.random(8) + 0.05, scale=3.0)
        assert residual(g, P) <= 1e-12


def test_growing_branch_is_fixed_point_too():
    g = pareto_fixed_point(P, GridSpec(4, 1.0, 1e3), branch="growing")
    assert residual(g, P) <= 1e-12
    assert g.values[-1] > g.values[0]


def test_fixed_point_validation():
    with pytest.raises(OutOfRange):
        pareto_fixed_point(P, GridSpec(4, 1.0, 10.0), [1.0, 1.0, 0.0, 1.0])
    with pytest.raises(OutOfRange):
        pareto_fixed_point(P, GridSpec(4, 1.0, 10.0), [1.0, 1.0])


def test_uniform_grid_residual_positive():
    # for f = 1 the recurrence gives win + loss = 0.3333 + 0.5 != 1
    g = GridDistribution(0, 2, LAM, np.ones(30))
    assert residual(g, P) == pytest.approx(abs(0.6 / 1.8 + 0.5 - 1), rel=1e-12)


def test_empty_interior():
    with pytest.raises(EmptyInterior):
        residual(GridDistribution(0, 1, LAM, [1.0]), P)


def test_iterate_nonnegative_exact_decay(rng):
    g0 = random_grid(rng, P)
    gn, trace = iterate(g0, P, 25)
    assert trace.steps == 25 and gn.size == g0.size + 2 * 8 * 25
    np.testing.assert_allclose(trace.ratios, 1 / 1.2, rtol=1e-12)


def test_iterate_signed_contracts(rng):
    g0 = random_grid(rng, P, signed=True)
    _, trace = iterate(g0, P, 25)
    d = trace.distances
    assert np.all(d[1:] <= d[:-1] / 1.2 + 1e-12)


def test_iterate_zero_steps(rng):
    g0 = random_grid(rng, P)
    gn, trace = iterate(g0, P, 0)
    assert gn is g0 and trace.distances.tolist() == [discrete_l1(g0)]


def test_iterate_cell_cap(rng):
    with pytest.raises(ResourceLimit):
        iterate(random_grid(rng, P), P, 100, cell_cap=1000)


def test_pure_fixed_point_slope():
    g = pareto_fixed_point(P, GridSpec(8, 1.0, 1e5))
    assert abs(loglog_slope(g).alpha_hat - pareto_exponent(P).alpha) <= 1e-8


def test_source_iteration_single_class_tail():
    op = GridOperator.from_params(P, 8)
    bump = GridDistribution(0, 8, op.lam, np.hanning(10)[1:-1])
    g = iterate_with_source(bump, P, 200)
    start = -g.base_index + 10 * 8
    assert loglog_slope(g, (start, start + 32)).alpha_hat == pytest.approx(
        pareto_exponent(P).alpha, abs=1e-8)


grid_params = st.builds(ModelParams, st.floats(0.05, 0.95), st.floats(0.05, 2.0),
                        st.floats(1.0, 3.0))


@settings(max_examples=60, deadline=None)
@given(grid_params, st.integers(1, 8), st.integers(0, 2**32 - 1))
def test_mass_identity(params, m, seed):
    rng = np.random.default_rng(seed)
    g = random_grid(rng, params, m=m, n=5 * m + 3)
    ratio = discrete_l1(apply_operator(g, params)) * params.kappa / discrete_l1(g)
    assert ratio == pytest.approx(1.0, rel=1e-13)


@settings(max_examples=60, deadline=None)
@given(grid_params, st.integers(0, 2**32 - 1), st.floats(-3, 3), st.floats(-3, 3))
def test_linearity(params, seed, s, t):
    rng = np.random.default_rng(seed)
    f = random_grid(rng, params, m=4, n=30, signed=True)
    g = random_grid(rng, params, m=4, n=30, signed=True)
    combo = f.with_values(s * f.values + t * g.values)
    lhs = apply_operator(combo, params).values
    rhs = s * apply_operator(f, params).values + t * apply_operator(g, params).values
    np.testing.assert_allclose(lhs, rhs, rtol=1e-13, atol=1e-13)


@settings(max_examples=60, deadline=None)
@given(grid_params, st.integers(0, 2**32 - 1), st.booleans())
def test_contraction(params, seed, one_signed):
    rng = np.random.default_rng(seed)
    f = random_grid(rng, params, m=4, n=40)
    g = random_grid(rng, params, m=4, n=40)
    if one_signed:
        g = g.with_values(f.values + np.abs(g.values))
    diff = f.with_values(f.values - g.values, signed=True)
    before = discrete_l1(diff)
    after = discrete_l1(apply_operator(diff, params))
    assert after <= before / params.kappa + 1e-12
    if one_signed:
        assert after == pytest.approx(before / params.kappa, abs=1e-12)
