from __future__ import annotations

import numpy as np
import pytest
from scipy import integrate as sp_integrate

from cdc.quadrature import integrate, integrate_log


@pytest.mark.parametrize("fn, a, b, exact", [
    (np.exp, 0.0, 1.0, np.e - 1),
    (np.sin, 0.0, np.pi, 2.0),
    (lambda x: 1.0 / (1.0 + x * x), -5.0, 5.0, 2 * np.arctan(5.0)),
    (lambda x: np.sqrt(x), 0.0, 1.0, 2.0 / 3.0),
])
def test_known_integrals(fn, a, b, exact):
    assert integrate(fn, a, b, rtol=1e-13) == pytest.approx(exact, rel=1e-11)


def test_vector_valued():
    def fn(x):
        return np.stack([x, x**2, np.exp(-x)], axis=1)
    out = integrate(fn, 0.0, 2.0, rtol=1e-14)
    assert np.allclose(out, [2.0, 8.0 / 3.0, 1 - np.exp(-2.0)], rtol=1e-13)


def test_log_substitution_matches_scipy():
    def fn(s):
        return np.exp(-s) / (1 + s)
    ours = integrate_log(fn, 1e-10, 60.0, rtol=1e-13)
    ref, _ = sp_integrate.quad(lambda s: np.exp(-s) / (1 + s), 1e-10, 60.0, epsabs=0,
                               epsrel=1e-13, limit=200)
    assert ours == pytest.approx(ref, rel=1e-11)


def test_sharp_peak_is_resolved():
    def fn(x):
        return 1.0 / (1e-4 + (x - 0.3) ** 2)
    exact = (np.arctan(0.7 / 1e-2) + np.arctan(0.3 / 1e-2)) / 1e-2
    assert integrate(fn, 0.0, 1.0, rtol=1e-12) == pytest.approx(exact, rel=1e-10)
