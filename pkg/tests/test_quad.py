import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fracinf.field import AnalyticField
from fracinf.quad import (IntegrabilityError, QuadRule, integrate_pair, integrate_ray, near_weights,
                          onesided_integrals, tail_weight)

# mpmath.quad of eta^(-5/2) on [0.1, inf)
TAIL_01_075 = 21.081851067789194
# mpmath.gamma(-s): the pair integral of exp(-z^2) at 0 equals Gamma(-s)
GAMMA_NEG = {0.6: -3.6969325729294803, 0.75: -4.8341465442958777, 0.9: -10.570564109631926}


def gauss1d():
    return AnalyticField(lambda x: np.exp(-x[..., 0] ** 2), 1, 1.0, far=0.0)


def test_tail_weight_oracle():
    assert abs(tail_weight(0.1, 0.75) - TAIL_01_075) < 1e-12


@given(eps=st.floats(1e-3, 10.0), s=st.floats(0.51, 0.99))
def test_tail_weight_scaling(eps, s):
    assert math.isclose(tail_weight(eps, s) * eps ** (2 * s) * 2 * s, 1.0, rel_tol=1e-12)


@pytest.mark.parametrize("bad", [(0.1, 0.5), (0.1, 1.0), (0.0, 0.75), (-1.0, 0.75)])
def test_tail_weight_rejects(bad):
    with pytest.raises(ValueError):
        tail_weight(*bad)


@pytest.mark.parametrize("s", [0.6, 0.75, 0.9])
def test_near_weights_exact_on_quartic_taylor(s):
    eta0 = 0.01
    eta, w = near_weights(eta0, s)
    a, b, c = 1.3, -0.7, 2.1
    D = a * eta ** 2 + b * eta ** 3 + c * eta ** 4
    exact = sum(k * eta0 ** (p - 2 * s) / (p - 2 * s) for k, p in ((a, 2), (b, 3), (c, 4)))
    assert abs(D @ w - exact) < 1e-14 * abs(exact) + 1e-16


@pytest.mark.parametrize("s", [0.6, 0.75, 0.9])
def test_pair_integral_gaussian_matches_gamma(s):
    v = integrate_pair(gauss1d(), np.zeros(1), np.ones(1), s, QuadRule(1e-2))
    assert abs(v - GAMMA_NEG[s]) < 1e-6 * abs(GAMMA_NEG[s])


def test_ray_of_ball_indicator_closed_form():
    s = 0.75
    ball = AnalyticField(lambda x: (np.abs(x[..., 0]) < 1).astype(float), 1, 1.0, far=0.0,
                         breaks=lambda x, y: np.array([1.0]))
    # from eps inside the ball, only eta > 1 contributes -eta^(-1-2s)
    assert abs(integrate_ray(ball, np.zeros(1), np.ones(1), QuadRule(0.1), s) + 1 / (2 * s)) < 1e-12
    one = onesided_integrals(ball, np.zeros(1), np.array([[1.0]]), QuadRule(1e-2), s)
    assert abs(one.values[0] + 1 / (2 * s)) < 1e-12
    assert not one.diverging[0]


def test_pair_rejects_kink():
    kink = AnalyticField(lambda x: np.abs(x[..., 0]), 1, np.inf, far=None)
    with pytest.raises(IntegrabilityError):
        integrate_pair(kink, np.zeros(1), np.ones(1), 0.75, QuadRule(1e-2, cut=10.0, tail_mode="zero"))


def test_onesided_flags_linear_growth():
    lin = AnalyticField(lambda x: np.tanh(x[..., 0]), 1, 1.0, far=lambda x, y: float(np.sign(y[0])))
    one = onesided_integrals(lin, np.zeros(1), np.array([[1.0], [-1.0]]), QuadRule(1e-2), 0.75)
    assert one.diverging.all()


@settings(max_examples=20, deadline=None)
@given(c=st.floats(-5, 5), x=st.floats(-2, 2))
def test_ray_invariant_under_constants(c, x):
    f = gauss1d()
    g = AnalyticField(lambda z: np.exp(-z[..., 0] ** 2) + c, 1, 1.0 + abs(c), far=c)
    rule = QuadRule(0.1)
    a = integrate_ray(f, np.array([x]), np.ones(1), rule, 0.75)
    b = integrate_ray(g, np.array([x]), np.ones(1), rule, 0.75)
    assert abs(a - b) < 1e-11


def test_refined_rule_agrees():
    rule = QuadRule(0.05)
    a = integrate_ray(gauss1d(), np.array([0.3]), np.ones(1), rule, 0.75)
    b = integrate_ray(gauss1d(), np.array([0.3]), np.ones(1), rule.refined(), 0.75)
    assert abs(a - b) < 1e-10
