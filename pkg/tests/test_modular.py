import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from multiferm import modular as mod
from multiferm.suites import cocycle_residual, lemma_residuals, ode_vs_closed

# hypothesis tests cannot take function-scoped fixtures
_GENERAL = mod.ModularGeometry(mod.IntervalFamily.from_phases((-2.5, -1.9), (-0.4, 0.3), (1.0, 2.2)))
_GENERAL.prepare(_GENERAL.X0 * 0.02, _GENERAL.X0 * 5)


@pytest.fixture(scope="module")
def sym3():
    g = mod.ModularGeometry(mod.IntervalFamily.symmetric_family(3, -0.9, 1.4))
    g.prepare(g.X0 * 0.2, g.X0 * 15)
    return g


@pytest.fixture(scope="module")
def general3():
    g = mod.ModularGeometry(mod.IntervalFamily.from_phases((-2.5, -1.9), (-0.4, 0.3), (1.0, 2.2)))
    g.prepare(g.X0 * 0.2, g.X0 * 15)
    return g


def test_family_validation():
    with pytest.raises(mod.IntervalError):
        mod.IntervalFamily.from_phases((0.1, 0.5), (0.4, 0.9))
    with pytest.raises(mod.IntervalError):
        mod.IntervalFamily.from_phases((0.5, 0.1))
    with pytest.raises(mod.IntervalError):
        mod.IntervalFamily.from_phases((-3.2, 0.1))
    with pytest.raises(mod.IntervalError):
        mod.IntervalFamily.symmetric_family(2, 1.0, 0.5)


def test_symmetric_family_arcs():
    fam = mod.IntervalFamily.symmetric_family(3, -0.9, 1.4)
    w = np.exp(2j * np.pi / 3)
    for k in range(3):
        assert fam.arc_of(fam.midpoint(k) * w) is not None
    assert fam.arc_of(1.0) is not None


@pytest.mark.parametrize("n", range(1, 9))
def test_mixing_matrix_lemma(n):
    comm, spec = lemma_residuals(n)
    assert comm < 1e-12
    assert spec < 1e-10


def test_preimages_lie_on_arcs(general3):
    g = general3
    for X in (0.3, 1.0, 7.0):
        z, _ = g.preimages(X)
        assert sorted(g.family.arc_of(x) for x in z) == [0, 1, 2]
        for x in z:
            assert abs(mod.X_of_z(g.family, x) - X) < 1e-9


def test_K_real_antisymmetric(general3):
    K = general3.K_real(1.3)
    assert np.allclose(K, -K.T)


def test_symmetric_closed_form(sym3):
    assert ode_vs_closed(sym3) < 1e-6
    n = 3
    K = mod.symmetric_K(n)
    z = np.exp(0.4j)
    P = mod.power_of_K(n, z)
    B, M = mod.B_and_M(n)
    assert np.allclose(B @ P, np.diag(np.exp(np.diag(M) * 0.4j)) @ B)
    assert np.allclose(K, -K.T)


def test_orthogonality(sym3, general3):
    for g in (sym3, general3):
        for X in g.X0 * np.array([0.4, 1.0, 3.0]):
            assert mod.orthogonality_defect(g.O(X)) < 1e-8


def test_rk4_fallback_matches_dense(general3):
    g = mod.ModularGeometry(general3.family)
    X = general3.X0 * 2.5
    assert np.max(np.abs(g.O(X) - general3.O(X))) < 1e-9


def test_cocycle_and_generator(sym3, general3):
    rng = np.random.default_rng(3)
    for g in (sym3, general3):
        assert cocycle_residual(g, 20, rng) < 1e-7
        assert g.generator_residual(0.04, g.X0) < 1e-7


@settings(max_examples=15, deadline=None)
@given(st.floats(0.3, 3.0), st.floats(0.3, 3.0), st.floats(-0.15, 0.15))
def test_covariance(a, b, t):
    g = _GENERAL
    if abs(a - b) < 0.05:
        return
    assert mod.covariance_residual(g, a * g.X0, b * g.X0, t) < 1e-8


def test_chi_diagonal_only_for_anti_path_ordering(general3):
    g = general3
    X, Y = 0.5 * g.X0, 1.7 * g.X0
    A = mod.chi_two_point(g, X, Y)
    assert np.max(np.abs(A - np.diag(np.diag(A)))) < 1e-9
    B = mod.chi_two_point(g, X, Y, O=lambda x: g.O(x, side="left"))
    assert np.max(np.abs(B - np.diag(np.diag(B)))) > 1e-5


def test_diagonalization(sym3):
    assert mod.diagonalization_residual(sym3, 0.7 * sym3.X0, 2.1 * sym3.X0) < 1e-8


def test_closed_form_requires_symmetry(general3):
    with pytest.raises(ValueError):
        general3.closed_form_O(1.0)


def test_single_interval_flow():
    y, wgt = mod.single_interval_flow(0.1, 2.0)
    assert y == pytest.approx(2.0 * math.exp(-0.2 * math.pi))
    assert wgt == pytest.approx(math.exp(-0.1 * math.pi))
    with pytest.raises(ValueError):
        mod.single_interval_flow(0.1, -1.0)

