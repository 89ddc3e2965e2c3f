from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.linalg import expm

from cdc.errors import NotConservative, NotPositivityPreserving, NotSymmetric
from cdc.quadrature import integrate
from cdc.semigroup import (TimeGrid, apply_average, apply_semigroup, average_multiplier,
                           decompose, lp_norm, trace, validate_generator)
from cdc.zoo import family, two_state, zero_generator


def two_state_semigroup(a, b, t):
    """Closed form for Q = [[-a, a], [b, -b]]."""
    s = a + b
    pi = np.array([b, a]) / s
    P = np.tile(pi, (2, 1))
    return P + np.exp(-s * t) * (np.eye(2) - P)


@pytest.mark.parametrize("t", [0.0, 0.01, 0.3, 2.0, 40.0])
def test_two_state_closed_form(t):
    gen = two_state(1.0, 3.0)
    sd = decompose(gen)
    assert np.allclose(sd.semigroup_matrix(t), two_state_semigroup(1.0, 3.0, t), atol=1e-14)
    assert np.allclose(sd.eigenvalues, [0.0, -4.0], atol=1e-14)


@pytest.mark.parametrize("n", [3, 5, 8, 13])
def test_cycle_eigenvalues(n):
    sd = decompose(family("cycle", n))
    k = np.arange(n)
    # conductances 1/n against mu = 1/n give unit jump rates
    expected = np.sort(2 * np.cos(2 * np.pi * k / n) - 2)[::-1]
    assert np.allclose(sd.eigenvalues, expected, atol=1e-13)
    assert sd.kernel_dim == 1


def test_semigroup_matches_expm(path6):
    gen, sd = path6
    for t in (0.1, 1.0, 7.5):
        assert np.allclose(sd.semigroup_matrix(t), expm(t * gen.Q), atol=1e-13)


def test_average_matches_gauss_legendre(cycle8, rng):
    gen, sd = cycle8
    f = rng.normal(size=8)
    t = 3.0
    ref = integrate(lambda s: np.array([expm(si * gen.Q) @ f for si in s]), 0.0, t,
                    rtol=1e-14) / t
    assert np.allclose(apply_average(sd, t, f), ref, atol=1e-12)


def test_average_multiplier_small_argument():
    lam = np.array([0.0, -1e-12, -1.0])
    m = average_multiplier(lam, 1.0)
    assert m[0] == 1.0
    assert abs(m[1] - (1 - 5e-13)) < 1e-15
    assert abs(m[2] - (1 - np.exp(-1.0))) < 1e-15


def test_basis_is_orthonormal_in_weighted_l2(path6):
    _, sd = path6
    G = sd.basis.T @ (sd.mu[:, None] * sd.basis)
    assert np.allclose(G, np.eye(sd.n), atol=1e-12)


def test_semigroup_preserves_trace_and_constants(path6, rng):
    _, sd = path6
    f = rng.normal(size=6)
    assert np.isclose(trace(sd, apply_semigroup(sd, 2.0, f)), trace(sd, f))
    assert np.allclose(apply_semigroup(sd, 2.0, np.ones(6)), 1.0)


def test_zero_generator_is_identity():
    sd = decompose(zero_generator(4))
    assert sd.kernel_dim == 4
    assert np.allclose(sd.semigroup_matrix(5.0), np.eye(4))
    assert sd.spectral_radius == 0.0


@pytest.mark.parametrize("Q, err", [
    ([[-1.0, 0.5], [1.0, -1.0]], NotConservative),
    ([[1.0, -1.0], [-1.0, 1.0]], NotPositivityPreserving),
    ([[-1.0, 1.0], [2.0, -2.0]], NotSymmetric),
])
def test_validation_errors(Q, err):
    with pytest.raises(err):
        validate_generator(np.array(Q), np.array([0.5, 0.5]))


def test_lp_norm_weights():
    mu = np.array([0.25, 0.75])
    f = np.array([2.0, 0.0])
    assert np.isclose(lp_norm(mu, f, 2), 1.0)
    assert lp_norm(mu, f, np.inf) == 2.0


def test_time_grid():
    g = TimeGrid(1e-2, 1e2, 4)
    t = g.times
    assert t[0] == pytest.approx(1e-2) and t[-1] == pytest.approx(1e2)
    assert len(t) == 17
    assert len(g.refined().times) == 33
    with pytest.raises(ValueError):
        TimeGrid(1.0, 0.5)


@settings(max_examples=30, deadline=None)
@given(a=st.floats(0.05, 20), b=st.floats(0.05, 20), s=st.floats(0, 5), t=st.floats(0, 5))
def test_semigroup_law_two_state(a, b, s, t):
    sd = decompose(two_state(a, b))
    lhs = sd.semigroup_matrix(s + t)
    rhs = sd.semigroup_matrix(s) @ sd.semigroup_matrix(t)
    assert np.allclose(lhs, rhs, atol=1e-12)
    assert np.allclose(lhs, two_state_semigroup(a, b, s + t), atol=1e-12)


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 10_000), n=st.integers(2, 12))
def test_random_reversible_positivity(seed, n):
    sd = decompose(family("random-reversible", n, seed))
    P = sd.semigroup_matrix(0.7)
    assert P.min() >= -1e-12
    assert np.allclose(P.sum(axis=1), 1.0, atol=1e-12)
