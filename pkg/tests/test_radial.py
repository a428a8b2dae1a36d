import math

import numpy as np
import pytest

from fracinf import catalog
from fracinf.heat1d import build_profile, convolve
from fracinf.operator import OperatorConfig, ifl, operator_family
from fracinf.radial import check_reduction, classical_solution, profile_frac_lap, ray_sphere

# closed forms at R = 10, s = 0.75 (mpmath, 30 digits)
ANNULUS_1D = -0.398606533729392
ANNULUS_IFL = -0.2051834601896


def test_ray_sphere():
    x = np.array([0.0, 0.0])
    assert np.allclose(ray_sphere(x, np.array([1.0, 0.0]), 2.0), [2.0])
    assert np.allclose(ray_sphere(np.array([-3.0, 0.0]), np.array([1.0, 0.0]), 1.0), [2.0, 4.0])
    assert ray_sphere(np.array([0.0, 5.0]), np.array([1.0, 0.0]), 1.0).size == 0


def test_gaussian_reduction_small():
    cfg = OperatorConfig.make(0.75, 0.1, 2, n_dir=64)
    rep = check_reduction(catalog.gaussian(2), [[0, 0], [0.5, 0], [0, 1.0], [1.4, 1.4]], cfg)
    assert rep.passed, rep.discrepancy


def test_annulus_closed_forms():
    s, R = 0.75, 10.0
    cfg = OperatorConfig.make(s, 0.1, 2, n_dir=64)
    f = catalog.annulus(2, R)
    v1 = profile_frac_lap(f.profile, R, cfg)
    assert abs(v1 - ANNULUS_1D) < 1e-6
    fam = operator_family(f, np.array([R, 0.0]), cfg, zero_gradient=True)
    assert abs(fam.onesided.min() + 1 / (2 * s)) < 1e-9
    chord = math.sqrt(2 * R - 1) + math.sqrt(4 * R)
    assert abs(fam.onesided.max() + chord ** (-2 * s) / (2 * s)) < 1e-9
    assert abs(fam.ifl - ANNULUS_IFL) < 1e-9
    assert fam.ifl - v1 > 0


def test_line_profile_far_and_reduction():
    f = catalog.tanh_x1(2)
    assert f.far_value(np.zeros(2), np.array([1.0, 0.0])) == 1.0
    assert f.far_value(np.zeros(2), np.array([-1.0, 0.0])) == -1.0
    cfg = OperatorConfig.make(0.75, 0.1, 2, n_dir=64)
    x = np.array([0.4, -2.0])
    assert abs(ifl(f, x, cfg) - profile_frac_lap(f.profile, 0.4, cfg)) < 1e-9


def test_even_profile_half_factor():
    cfg = OperatorConfig.make(0.75, 0.1, 2, n_dir=64)
    f = catalog.even_x1(2)
    ratio = ifl(f, np.array([0.0, 1.0]), cfg) / profile_frac_lap(f.profile, 0.0, cfg)
    assert abs(ratio - 0.5) < 1e-3


def test_classical_solution_matches_direct_convolution():
    k = build_profile(0.75)
    p = catalog.gaussian_profile(1.0)
    u = classical_solution(p, k, 0.5, 2, r_out=4.0)
    x = np.array([[0.3, 0.4], [3.0, 4.0], [7.0, 0.0]])
    r = np.linalg.norm(x, axis=1)
    assert np.allclose(u(x), convolve(k, p, 0.5, r), atol=1e-7)
    assert classical_solution(p, k, 0.0, 2) is not None


def test_classical_solution_needs_monotone_profile():
    k = build_profile(0.75)
    with pytest.raises(ValueError):
        classical_solution(catalog.annulus_profile(), k, 0.5, 2)
