import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fracinf import catalog
from fracinf.field import ConstantFarField, GridSpec, SampledField, sample
from fracinf.operator import OperatorConfig, cs_constant
from fracinf.scheme import (SchemeConfig, cfl_tau, evolve, interpolate_time, l_eps_grid, monitor_apriori,
                            shift_values, step, initial_state)


def small_cfg(**kw):
    op = OperatorConfig.make(0.75, kw.pop("eps", 0.2), 2, n_dir=kw.pop("n_dir", 16), refine=False, augment=False)
    grid = kw.pop("grid", GridSpec.cube(2, -3.0, 3.0, 17))
    return SchemeConfig(op, grid, **kw)


def test_cfl_tau():
    s, eps = 0.75, 0.1
    assert cfl_tau(s, eps, cs_constant(s), 1.0) == pytest.approx(s * eps ** (2 * s) / cs_constant(s), rel=1e-15)


def test_theta_above_one_rejected():
    with pytest.raises(ValueError):
        small_cfg(theta=1.5)
    small_cfg(theta=1.5, allow_cfl_violation=True)


def test_fft_matches_direct():
    u = sample(catalog.tilted_bump(2), GridSpec.cube(2, -3.0, 3.0, 17))
    a = l_eps_grid(u, small_cfg(method="fft"))
    b = l_eps_grid(u, small_cfg(method="direct"))
    assert np.max(np.abs(a - b)) < 1e-12


def test_constant_is_stationary():
    cfg = small_cfg(ext=ConstantFarField(2.0), T=0.3)
    traj = evolve(catalog.constant(2, 2.0), cfg)
    assert all(np.max(np.abs(v - 2.0)) < 1e-13 for v in traj.values)


def test_T_zero_single_snapshot():
    cfg = small_cfg(T=0.0)
    traj = evolve(catalog.gaussian(2), cfg)
    assert len(traj) == 1
    assert np.array_equal(traj.final.values, catalog.gaussian(2)(cfg.grid.mesh()))


def test_step_does_not_mutate():
    cfg = small_cfg()
    st0 = initial_state(catalog.gaussian(2), cfg)
    before = st0.U.values.copy()
    st1 = step(st0, cfg)
    assert np.array_equal(st0.U.values, before) and st1.j == 1


@settings(max_examples=8, deadline=None)
@given(a=st.floats(0.0, 1.0), seed=st.integers(0, 1000))
def test_comparison_one_step(a, seed):
    cfg = small_cfg()
    rng = np.random.default_rng(seed)
    u = rng.uniform(-1, 1, cfg.grid.shape)
    v = u + a * rng.uniform(0, 1, cfg.grid.shape)
    U = step(initial_state(SampledField(cfg.grid, u), cfg), cfg).U.values
    V = step(initial_state(SampledField(cfg.grid, v), cfg), cfg).U.values
    assert np.all(U <= V + 1e-13)
    assert np.max(np.abs(U)) <= np.max(np.abs(u)) + 1e-13


def test_interpolate_time_endpoints():
    cfg = small_cfg(T=0.3)
    traj = evolve(catalog.gaussian(2), cfg)
    assert np.array_equal(interpolate_time(traj, traj.times[1]).values, traj.values[1])
    mid = interpolate_time(traj, 0.5 * (traj.times[1] + traj.times[2])).values
    assert np.allclose(mid, 0.5 * (traj.values[1] + traj.values[2]))
    with pytest.raises(ValueError):
        interpolate_time(traj, 10.0)


def test_shift_values():
    v = np.arange(9.0).reshape(3, 3)
    s = shift_values(v, (1, 0), -1.0)
    assert np.array_equal(s[:2], v[1:]) and np.all(s[2] == -1.0)


def test_monitors_pass_on_gaussian():
    cfg = small_cfg(T=0.3)
    mon = monitor_apriori(evolve(catalog.gaussian(2), cfg))
    assert mon.passed
