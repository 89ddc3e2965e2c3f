from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cdc.errors import (ConfigError, CurvatureFailed, GroupError, KernelComponent,
                        NonzeroAtIdentity, NotConditionallyNegative, NotSymmetricPsi)
from cdc.groups import (GROUP_LIBRARY, FiniteGroup, GroupAlgebra, abelian_product,
                        check_conditionally_negative, check_group_curvature, cocycle, cyclic,
                        dihedral, dual_generator, gromov_form, indicator, make_group, make_psi,
                        quaternion, symmetric, verify_abelian_consistency,
                        verify_gromov_formula, verify_operator_kadison_schwarz,
                        verify_group_duality, verify_group_hypotheses, verify_two_convexity,
                        word_length)


@pytest.fixture(scope="module")
def s3():
    G = symmetric(3)
    return GroupAlgebra(G, word_length(G))


@pytest.mark.parametrize("G, order, abelian", [
    (cyclic(5), 5, True), (abelian_product(2, 3), 6, True), (dihedral(4), 8, False),
    (symmetric(3), 6, False), (symmetric(4), 24, False), (quaternion(), 8, False),
])
def test_group_tables(G, order, abelian):
    assert G.order == order
    assert G.abelian is abelian
    e = G.identity
    assert np.all(G.mul[e] == np.arange(order))
    assert np.all(G.mul[np.arange(order), G.inv] == e)


def test_bad_table_rejected():
    with pytest.raises(GroupError):
        FiniteGroup(np.array([[0, 1], [0, 1]]))


def test_make_group_errors():
    with pytest.raises(ConfigError):
        make_group({"type": "symmetric", "n": 5})
    with pytest.raises(ConfigError) as info:
        make_group({"type": "cyclic"})
    assert info.value.field == "n"
    with pytest.raises(ConfigError):
        make_group({"type": "free"})


def test_psi_validation():
    G = cyclic(4)
    with pytest.raises(NonzeroAtIdentity):
        make_psi(G, [1, 1, 2, 1])
    with pytest.raises(NotSymmetricPsi):
        make_psi(G, [0, 1, 2, 3])
    assert np.array_equal(make_psi(G, "word-length"), [0, 1, 2, 1])


def test_word_length_and_cocycle_are_conditionally_negative():
    for _, cfg in GROUP_LIBRARY:
        G = make_group(cfg)
        for psi in (indicator(G), cocycle(G, seed=1)):
            assert check_conditionally_negative(G, psi).conditionally_negative


def test_quaternion_word_length_is_not_conditionally_negative():
    G = quaternion()
    rep = check_conditionally_negative(G, word_length(G))
    assert not rep.conditionally_negative
    assert rep.max_eigen == pytest.approx(2.0)
    with pytest.raises(NotConditionallyNegative):
        GroupAlgebra(G, word_length(G))


def test_negative_indicator_rejected():
    G = cyclic(3)
    with pytest.raises(NotConditionallyNegative):
        GroupAlgebra(G, -indicator(G))


def test_z2_closed_forms():
    G = cyclic(2)
    alg = GroupAlgebra(G, np.array([0.0, 1.0]))
    a = np.array([0.3, 2.0 - 1.0j])
    # Gamma(a, a) = |a_g|^2 * 1
    assert np.allclose(alg.gamma(a, a), [5.0, 0.0])
    assert np.allclose(alg.semigroup(0.7, a), [0.3, np.exp(-0.7) * (2.0 - 1.0j)])
    lam_g = np.array([0.0, 1.0])
    hS, hG = alg.h1_norms(lam_g)
    assert hS == pytest.approx(1 / np.sqrt(2), rel=1e-12)
    assert hG == pytest.approx(1 / np.sqrt(2), rel=1e-12)
    assert alg.bmo(lam_g) == pytest.approx(1.0, rel=1e-6)


def test_unitaries_have_h1_norm_one_over_root_two(s3):
    for g in range(1, 6):
        a = np.zeros(6)
        a[g] = 1.0
        assert s3.h1_norms(a)[1] == pytest.approx(1 / np.sqrt(2), rel=1e-12)


def test_regular_representation_is_multiplicative(s3, rng):
    a = rng.normal(size=6) + 1j * rng.normal(size=6)
    b = rng.normal(size=6) + 1j * rng.normal(size=6)
    assert np.allclose(s3.regular(s3.product(a, b)), s3.regular(a) @ s3.regular(b))
    assert np.allclose(s3.regular(s3.adjoint(a)), s3.regular(a).conj().T)
    assert s3.trace(s3.product(s3.adjoint(a), a)).real == pytest.approx(np.sum(np.abs(a) ** 2))


def test_gamma_formula_matches_definition(s3, rng):
    for _ in range(10):
        a = rng.normal(size=6) + 1j * rng.normal(size=6)
        b = rng.normal(size=6) + 1j * rng.normal(size=6)
        assert np.allclose(s3.gamma(a, b), s3.gamma_definition(a, b), atol=1e-12)
        assert np.allclose(s3.gamma2(a, b), s3.gamma2_definition(a, b), atol=1e-11)


def test_gromov_form_symmetric():
    G = dihedral(4)
    K = gromov_form(G, word_length(G))
    assert np.allclose(K, K.T)
    assert np.all(K[G.identity] == 0)


@pytest.mark.parametrize("name, cfg", [c for c in GROUP_LIBRARY if c[0] != "Q8"])
def test_library_curvature_and_suites(name, cfg):
    G = make_group(cfg)
    for psi in (word_length(G), cocycle(G, seed=2)):
        alg = GroupAlgebra(G, psi)
        rep = check_group_curvature(alg)
        assert rep.holds and rep.cross_check_agrees, name
        assert verify_gromov_formula(alg, samples=5).passed
        assert verify_operator_kadison_schwarz(alg, samples=3).passed


def test_two_convexity():
    assert verify_two_convexity(8, samples=100).passed


@pytest.mark.parametrize("n", [2, 3, 4, 6, 8])
def test_abelian_consistency(n):
    G = cyclic(n)
    rep = verify_abelian_consistency(G, word_length(G), samples=3)
    assert rep.passed, rep.metrics


def test_dual_generator_is_markov():
    G = cyclic(6)
    Q = dual_generator(G, word_length(G)).Q
    assert np.allclose(Q.sum(axis=1), 0, atol=1e-12)
    off = Q - np.diag(np.diag(Q))
    assert off.min() >= -1e-12


def test_kernel_component_rejected(s3):
    with pytest.raises(KernelComponent):
        s3.h1_norms(np.eye(6)[s3.G.identity])


def test_group_duality_suites(s3):
    rep = verify_group_duality(s3, samples=20)
    assert 0 < rep.max_ratio_c1 < np.inf
    hyp = verify_group_hypotheses(s3, samples=5, t_points=4)
    assert np.isfinite(hyp.bilinear_constant) and np.isfinite(hyp.atom_h1_sup)


def test_group_duality_needs_curvature(monkeypatch, s3):
    import cdc.groups as grp

    class Fail:
        holds = False
    monkeypatch.setattr(grp, "check_group_curvature", lambda alg: Fail())
    with pytest.raises(CurvatureFailed):
        grp.verify_group_duality(s3, samples=2)


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 2**31), t=st.floats(0.01, 5))
def test_kadison_schwarz_property(seed, t):
    G = dihedral(3)
    alg = GroupAlgebra(G, cocycle(G, seed=seed % 7))
    a = np.random.default_rng(seed).normal(size=6) + 0j
    Ta = alg.semigroup(t, a)
    diff = alg.regular(alg.semigroup(t, alg.modulus_squared(a))) - \
        alg.regular(alg.modulus_squared(Ta))
    assert np.linalg.eigvalsh(0.5 * (diff + diff.conj().T)).min() >= -1e-10
