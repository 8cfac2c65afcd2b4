import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tsrvlab import (
    CapacityError,
    GridError,
    ModelError,
    ProcessModel,
    SamplingGrid,
    coarsen,
    generate_master_path,
    observation_values,
    refine_for_gamma,
    subsample_nested,
)


def test_path_starts_at_x0(model):
    path = generate_master_path(model, SamplingGrid(4, 1 / 252), refine=1, seed=99)
    assert path.values[0] == 0.0
    assert path.values.size == 5


def test_regeneration_is_bit_identical(model):
    grid = SamplingGrid(1000, 1 / 252)
    a = generate_master_path(model, grid, refine=3, seed=7, stream=2)
    b = generate_master_path(model, grid, refine=3, seed=7, stream=2)
    assert a.values.tobytes() == b.values.tobytes()
    assert (a.seed, a.stream) == (7, 2)


def test_streams_and_seeds_differ(model):
    grid = SamplingGrid(100, 1.0)
    a = generate_master_path(model, grid, seed=1, stream=0).values
    assert not np.array_equal(a, generate_master_path(model, grid, seed=1, stream=1).values)
    assert not np.array_equal(a, generate_master_path(model, grid, seed=2, stream=0).values)


def test_values_are_read_only(model):
    path = generate_master_path(model, SamplingGrid(10, 1.0))
    with pytest.raises(ValueError):
        path.values[0] = 1.0


def test_terminal_variance_matches_sigma2_T():
    # 10^4 independent paths; standardized terminal values should look N(0, 1)
    model = ProcessModel(mu=0.3, sigma=0.2, x0=0.1)
    grid = SamplingGrid(50, 1 / 252)
    M = 10_000
    xT = np.array([generate_master_path(model, grid, seed=11, stream=m).values[-1] for m in range(M)])
    z = (xT - model.x0 - model.mu * grid.T) / (model.sigma * math.sqrt(grid.T))
    assert abs(z.mean()) <= 3 / math.sqrt(M)
    assert abs(z.var(ddof=1) - 1) <= 5 / math.sqrt(M)
    assert abs(xT.var(ddof=1) / (model.sigma**2 * grid.T) - 1) < 0.05


def test_piecewise_sigma_integrates_exactly():
    model = ProcessModel(mu=0.0, sigma=(0.1, 0.3), x0=0.0)
    grid = SamplingGrid(10, 2.0)
    path = generate_master_path(model, grid, refine=3)
    v = path.step_variances()
    assert v.size == 30
    assert math.isclose(v.sum(), 0.1**2 * 1.0 + 0.3**2 * 1.0, rel_tol=1e-12)
    assert not model.constant


@pytest.mark.parametrize("sigma", [0.0, -0.2, float("nan"), (0.2, 0.0)])
def test_invalid_sigma(sigma):
    with pytest.raises(ModelError):
        ProcessModel(sigma=sigma)


def test_bad_grid_and_refine(model):
    with pytest.raises(GridError):
        SamplingGrid(1, 1.0)
    with pytest.raises(GridError):
        SamplingGrid(10, 0.0)
    with pytest.raises(GridError):
        generate_master_path(model, SamplingGrid(10, 1.0), refine=0)


def test_capacity_error_before_allocation(model):
    with pytest.raises(CapacityError):
        generate_master_path(model, SamplingGrid(23400, 1.0), refine=10**16)


def test_observation_stride(model):
    path = generate_master_path(model, SamplingGrid(4, 1.0), refine=10, seed=3)
    np.testing.assert_array_equal(observation_values(path), path.values[[0, 10, 20, 30, 40]])
    flat = generate_master_path(model, SamplingGrid(4, 1.0), refine=1, seed=3)
    np.testing.assert_array_equal(observation_values(flat), flat.values)


def test_subsample_nested(model):
    path = generate_master_path(model, SamplingGrid(8, 1.0), refine=1, seed=5)
    np.testing.assert_array_equal(subsample_nested(path, 2), path.values[[0, 4, 8]])
    np.testing.assert_array_equal(subsample_nested(path, 8), observation_values(path))
    with pytest.raises(GridError):
        subsample_nested(path, 3)


@settings(max_examples=30, deadline=None)
@given(k=st.integers(1, 6), refine=st.integers(1, 4))
def test_nested_chain_is_subsequence(k, refine):
    model = ProcessModel()
    n = 2**k * 3
    path = generate_master_path(model, SamplingGrid(n, 1.0), refine=refine, seed=k)
    for a in range(k):
        coarse, fine = subsample_nested(path, 3 * 2**a), subsample_nested(path, 3 * 2 ** (a + 1))
        np.testing.assert_array_equal(fine[::2], coarse)


def test_refine_policy(model, day_grid):
    r = refine_for_gamma(model, day_grid, 5e-5)
    assert model.sigma * math.sqrt(day_grid.dt / r) <= 5e-5 / 4 * (1 + 1e-12)
    assert refine_for_gamma(model, day_grid, 0.005) == 10


def test_coarsen_keeps_observations(model):
    path = generate_master_path(model, SamplingGrid(50, 1.0), refine=8, seed=1)
    half = coarsen(path, 2)
    assert half.refine == 4
    np.testing.assert_array_equal(observation_values(half), observation_values(path))
    with pytest.raises(GridError):
        coarsen(path, 3)
