from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from cdc.gamma import check_curvature, gamma, gamma2, gamma2_matrices, gamma_matrices
from cdc.semigroup import decompose
from cdc.zoo import family, two_state, zero_generator

finite = st.floats(-10, 10, allow_nan=False, allow_infinity=False)


def test_two_state_gamma_closed_form():
    a, b = 1.0, 3.0
    gen = two_state(a, b)
    f = np.array([0.5 + 1j, -2.0])
    d2 = abs(f[1] - f[0]) ** 2
    assert np.allclose(gamma(gen, f, f), [a * d2 / 2, b * d2 / 2])


def test_two_state_gamma2_closed_form():
    # d = f1 - f0; Gamma_2(f)(0) = a(a + 3b)|d|^2/4 and symmetrically at 1
    a, b = 2.0, 0.5
    gen = two_state(a, b)
    f = np.array([1.0, -1.5])
    d2 = 2.5**2
    assert np.allclose(gamma2(gen, f, f), [a * (a + 3 * b) * d2 / 4, b * (3 * a + b) * d2 / 4])


def test_cycle_gamma_is_half_squared_gradient():
    n = 6
    gen = family("cycle", n)
    f = np.arange(n, dtype=float) ** 2
    expected = 0.5 * ((np.roll(f, -1) - f) ** 2 + (np.roll(f, 1) - f) ** 2)
    assert np.allclose(gamma(gen, f, f), expected)


def test_matrices_match_definition(path6, rng):
    gen, _ = path6
    G = gamma_matrices(gen)
    H = gamma2_matrices(gen)
    for _ in range(5):
        f = rng.normal(size=6) + 1j * rng.normal(size=6)
        h = rng.normal(size=6) + 1j * rng.normal(size=6)
        assert np.allclose(np.einsum("i,xij,j->x", f.conj(), G, h), gamma(gen, f, h))
        assert np.allclose(np.einsum("i,xij,j->x", f.conj(), H, h), gamma2(gen, f, h))


@settings(max_examples=40, deadline=None)
@given(re=arrays(float, 7, elements=finite), im=arrays(float, 7, elements=finite),
       seed=st.integers(0, 1000))
def test_gamma_is_nonnegative_and_kills_constants(re, im, seed):
    gen = family("random-reversible", 7, seed)
    f = re + 1j * im
    g = gamma(gen, f, f)
    assert np.all(np.abs(g.imag) <= 1e-9 * (1 + np.abs(g.real)))
    assert np.all(g.real >= -1e-9 * (1 + np.abs(f).max() ** 2))
    assert np.allclose(gamma(gen, np.ones(7), f), 0.0, atol=1e-9)


@settings(max_examples=30, deadline=None)
@given(f=arrays(float, 5, elements=finite), h=arrays(float, 5, elements=finite))
def test_gamma_hermitian_symmetry(f, h):
    gen = family("path", 5)
    fc = f + 0.5j * h
    assert np.allclose(gamma(gen, fc, h), np.conj(gamma(gen, h, fc)), atol=1e-9)


@pytest.mark.parametrize("kind, n, holds", [
    ("cycle", 8, True), ("complete", 6, True), ("path", 5, True), ("hypercube", 8, True),
    ("star", 6, False),
])
def test_curvature_known_cases(kind, n, holds):
    rep = check_curvature(family(kind, n))
    assert rep.holds is holds
    assert rep.cross_check_agrees


def test_curvature_of_zero_generator_is_trivial():
    rep = check_curvature(zero_generator(3))
    assert rep.holds and rep.cross_check_agrees
    assert rep.min_eigen == 0.0


@pytest.mark.parametrize("kind", ["birth-death", "random-reversible", "star", "cycle", "path"])
@pytest.mark.parametrize("n", [2, 4, 8])
def test_two_curvature_checks_agree(kind, n):
    gen = family(kind, n, seed=3)
    assert check_curvature(gen, decompose(gen)).cross_check_agrees


def test_report_keys():
    d = check_curvature(family("cycle", 4)).to_dict()
    assert {"holds", "minEigen", "worstPoint", "crossCheckAgrees", "status"} <= set(d)
