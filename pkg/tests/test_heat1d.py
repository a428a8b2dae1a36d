import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fracinf import catalog
from fracinf.heat1d import (algebraic_shape, build_profile, convolve, harnack_constants, kernel_eval,
                            l1_norm, profile_values)

# mpmath.quadosc of (1/pi) cos(r xi) exp(-xi^1.5) on [0, inf), s = 0.75
F_075 = {0.5: 0.26229684036390461, 1.0: 0.20203815960957512, 3.0: 0.031509423616436235}


@pytest.fixture(scope="module")
def k():
    return build_profile(0.75)


def test_profile_at_zero_closed_form(k):
    assert abs(k.F[0] - math.gamma(1 + 1 / 1.5) / math.pi) < 1e-14


@pytest.mark.parametrize("r", sorted(F_075))
def test_profile_mpmath_oracle(k, r):
    assert abs(float(profile_values(0.75, np.array([r]))[0]) - F_075[r]) < 1e-10
    assert abs(float(k.profile(np.array([r]))[0]) - F_075[r]) < 1e-9


def test_cauchy_case():
    r = np.linspace(0, 30, 301)
    assert np.max(np.abs(profile_values(0.5, r) - 1 / (np.pi * (1 + r * r)))) < 1e-6


def test_profile_monotone_and_mass(k):
    assert np.all(np.diff(k.F) < 0)
    assert abs(k.mass() - 1) < 1e-6


def test_build_rejects_bad_s():
    with pytest.raises(ValueError):
        build_profile(0.5)
    with pytest.raises(ValueError):
        build_profile(1.0)


@settings(max_examples=25, deadline=None)
@given(x=st.floats(-30, 30), t=st.floats(0.05, 5.0))
def test_self_similarity(x, t):
    k = build_profile(0.75)
    lam = 2.0
    # P(lam x, lam^(2s) t) = P(x, t) / lam
    a = float(kernel_eval(k, lam * x, lam ** 1.5 * t))
    b = float(kernel_eval(k, x, t)) / lam
    assert abs(a - b) <= 1e-10 * max(abs(b), 1e-8)


def test_two_sided_bound_constants(k):
    c1, c2 = k.tail_constants
    x = np.linspace(-40, 40, 801)
    for t in (0.3, 1.0, 3.0):
        P, G = kernel_eval(k, x, t), algebraic_shape(x, t, 0.75)
        assert np.all(P >= c1 * G * (1 - 1e-12))
        assert np.all(P <= c2 * G * (1 + 1e-12))


def test_convolve_constant_and_step(k):
    xs = np.array([-3.0, 0.0, 2.0])
    assert np.allclose(convolve(k, lambda y: np.full_like(y, 2.5), 1.0, xs, limits=(2.5, 2.5)), 2.5, atol=1e-14)
    step = convolve(k, lambda y: (y >= 0).astype(float), 1.0, np.array([0.0]), limits=(0.0, 1.0))
    assert abs(step[0] - 0.5) < 1e-12


def test_semigroup(k):
    from scipy.interpolate import CubicSpline
    p = catalog.gaussian_profile()
    x = np.linspace(-3, 3, 7)
    direct = convolve(k, p, 1.0, x)
    y = np.linspace(-40, 40, 1601)
    half = CubicSpline(y, convolve(k, p, 0.5, y))
    twice = convolve(k, lambda z: np.where(np.abs(z) <= 40, half(z), 0.0), 0.5, x, y_max=40)
    assert np.max(np.abs(direct - twice)) < 1e-4


def test_harnack_constants_and_decay_check(k):
    bump = catalog.mollifier_profile(1.0)
    k1, k2 = harnack_constants(bump, 1.0, [1.0], np.linspace(-5, 5, 11), k)
    assert 0 < k1 <= k2 < np.inf
    with pytest.raises(ValueError):
        harnack_constants(lambda y: np.ones_like(y), 1.0, [1.0], [0.0], k)


def test_l1_norm_gaussian():
    assert abs(l1_norm(catalog.gaussian_profile()) - math.sqrt(math.pi)) < 1e-10
