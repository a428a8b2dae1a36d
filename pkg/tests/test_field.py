import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fracinf import catalog
from fracinf.field import (AnalyticField, AnalyticTail, ClampToNearestBoundaryValue, ConstantFarField, GridSpec,
                           SampledField, gradient_fd, read_grid_csv, sample, spot_check_flags, translate,
                           write_grid_csv)


def bilinear(x):
    return 1.0 + 2.0 * x[..., 0] - 0.5 * x[..., 1] + 0.25 * x[..., 0] * x[..., 1]


def test_gridspec_basics():
    g = GridSpec.cube(2, -1.0, 1.0, 5)
    assert g.dim == 2 and g.shape == (5, 5)
    assert np.allclose(g.spacing, 0.5)
    assert g.mesh().shape == (5, 5, 2)
    assert np.allclose(g.node((4, 0)), [1.0, -1.0])
    assert g.diameter == pytest.approx(2 * np.sqrt(2))


@settings(max_examples=30, deadline=None)
@given(a=st.floats(-0.99, 0.99), b=st.floats(-0.99, 0.99))
def test_multilinear_interpolation_exact_on_bilinear(a, b):
    g = GridSpec.cube(2, -1.0, 1.0, 9)
    f = SampledField(g, bilinear(g.mesh()), ClampToNearestBoundaryValue())
    assert abs(float(f(np.array([a, b]))) - float(bilinear(np.array([a, b])))) < 1e-12


def test_nodes_reproduced_exactly():
    g = GridSpec.cube(2, -2.0, 2.0, 17)
    vals = np.random.default_rng(0).normal(size=g.shape)
    f = SampledField(g, vals, ConstantFarField(0.0))
    assert np.array_equal(f(g.mesh()), vals)


def test_constant_far_field_ghost_lattice():
    g = GridSpec.cube(1, 0.0, 1.0, 3)
    f = SampledField(g, np.array([1.0, 1.0, 1.0]), ConstantFarField(-1.0))
    # halfway between the last node and the first ghost node
    assert float(f(np.array([1.25]))) == pytest.approx(0.0)
    assert float(f(np.array([5.0]))) == -1.0
    assert f.far_value(np.zeros(1), np.ones(1)) == -1.0


def test_clamp_and_analytic_tail():
    g = GridSpec.cube(1, 0.0, 1.0, 3)
    vals = np.array([0.0, 0.5, 1.0])
    assert float(SampledField(g, vals, ClampToNearestBoundaryValue())(np.array([3.0]))) == 1.0
    tail = AnalyticTail(lambda x: 7.0 + 0 * x[..., 0])
    assert float(SampledField(g, vals, tail)(np.array([3.0]))) == 7.0


def test_translate_analytic_and_sampled():
    f = catalog.gaussian(2)
    y = np.array([0.5, -1.0])
    x = np.array([0.1, 0.2])
    assert float(translate(f, y)(x)) == pytest.approx(float(f(x + y)))
    g = GridSpec.cube(2, -2.0, 2.0, 9)
    s = sample(f, g)
    t = translate(s, y)
    assert np.array_equal(t.values, s.values)
    assert float(t(g.node((3, 5)) - y)) == pytest.approx(float(s(g.node((3, 5)))))


def test_gradient_fd():
    f = AnalyticField(bilinear, 2)
    assert np.allclose(gradient_fd(f, np.array([0.3, 0.4])), [2.0 + 0.1, -0.5 + 0.075], atol=1e-9)


def test_spot_check_flags(rng):
    flags = spot_check_flags(catalog.gaussian(2), rng)
    assert all(flags.values())
    liar = AnalyticField(lambda x: x[..., 0] ** 2, 2, 1.0, radially_nonincreasing=True)
    assert not all(spot_check_flags(liar, rng).values())


def test_csv_roundtrip(tmp_path):
    g = GridSpec((-1.0, 0.0), (1.0, 3.0), (5, 7))
    vals = np.random.default_rng(1).normal(size=g.shape)
    f = SampledField(g, vals, ConstantFarField(0.25))
    p = write_grid_csv(f, tmp_path / "u.csv", {"t": 0.5})
    back = read_grid_csv(p)
    assert back.spec == g
    assert np.array_equal(back.values, vals)
    assert back.ext == ConstantFarField(0.25)
