import numpy as np
import pytest

from fracinf import catalog


def test_bridge_is_c2():
    a = np.polynomial.polynomial
    c = catalog._bridge_coefficients()
    for d, left in ((0, 1.0), (1, 2.0), (2, 2.0)):
        assert a.polyval(0.0, a.polyder(c, d) if d else c) == pytest.approx(left)
        assert a.polyval(1.0, a.polyder(c, d) if d else c) == pytest.approx(0.0, abs=1e-12)


def test_psi_shape():
    r = np.linspace(0, 3, 3001)
    v = catalog.psi(r)
    assert np.all(v >= 0)
    assert v[-1] == 0 and catalog.psi(0.5) == pytest.approx(0.25)
    assert catalog.psi_second_derivative_sup() >= 2.0


@pytest.mark.parametrize("name", sorted(catalog.CATALOG))
def test_every_datum_builds(name):
    f = catalog.make_datum(name, 2)
    v = f(np.zeros((3, 2)))
    assert v.shape == (3,) and np.all(np.isfinite(v))
    assert np.all(np.abs(v) <= f.bound + 1e-12)


def test_unknown_datum():
    with pytest.raises(KeyError):
        catalog.make_datum("nope", 2)


def test_mollifier_support():
    f = catalog.mollifier(2, R0=1.0)
    assert f(np.array([1.0, 0.0])) == 0.0
    assert f(np.zeros(2)) == pytest.approx(1.0)


def test_cone_holder_flag():
    with pytest.raises(ValueError):
        catalog.holder_cone(2, 1.5)
    assert catalog.holder_cone(2, 0.5).holder == (0.5, 1.0)
