import cmath
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from multiferm import isomap
from multiferm.core import HalfInt, ModeIndex, Sector, principal_root, q_map
from multiferm.suites import iso_bijection, iso_car, iso_vacuum
from multiferm.symgen import RAMOND_PERIODIC
from multiferm.wick import KernelKind, NS_VACUUM, QuasifreeKernel, two_point


@given(st.integers(1, 8), st.integers(-60, 60))
def test_mode_map_inverts(n, t):
    m = HalfInt(2 * t + 1)
    k, nu = isomap.beta_mode_inverse(n, m)
    assert 1 <= k <= n
    assert isomap.beta_mode(n, k, nu).value == m


def test_mode_map_small_cases():
    assert isomap.beta_mode(1, 1, Fraction(1, 2)).value == HalfInt(1)
    # n = 2: phi_nu -> psi_{2nu + 1/2}, phi^*_nu -> psi_{2nu - 1/2}
    assert isomap.beta_mode(2, 1, Fraction(1, 2)).value == HalfInt(3)
    assert isomap.beta_mode(2, 2, Fraction(1, 2)).value == HalfInt(1)
    assert iso_bijection(3) == 0
    with pytest.raises(ValueError):
        isomap.beta_mode(2, 3, Fraction(1, 2))


@pytest.mark.parametrize("n", [2, 3])
def test_car_preserved(n):
    assert iso_car(n, Fraction(7, 2)) < 1e-12


def test_vacuum_preserved_float():
    rng = np.random.default_rng(1)
    assert iso_vacuum(2, 4, 20, rng, dps=None) < 1e-10


def test_field_map_two_point():
    Z, W = cmath.exp(0.4j), cmath.exp(2.2j)
    K3 = QuasifreeKernel(KernelKind.NS_VACUUM, n_fields=3)
    for k in (1, 2, 3):
        for l in (1, 2, 3):
            got = two_point(NS_VACUUM, isomap.beta_field(3, k, Z), isomap.beta_field(3, l, W))
            assert got == pytest.approx(K3.eval(k, Z, l, W), abs=1e-12)


def test_field_map_root_independent():
    Z = cmath.exp(1.3j)
    z = principal_root(Z, 3)
    a = isomap.beta_field(3, 2, Z)
    b = isomap.beta_field(3, 2, Z, root=z * cmath.exp(2j * math.pi / 3))
    W = cmath.exp(-0.5j)
    probe = isomap.beta_field(3, 2, W)
    assert two_point(NS_VACUUM, a, probe) == pytest.approx(two_point(NS_VACUUM, b, probe))


def test_inverse_field_map():
    z, w = cmath.exp(0.3j), cmath.exp(1.4j)
    K2 = QuasifreeKernel(KernelKind.NS_VACUUM, n_fields=2)
    got = two_point(K2, isomap.beta_inv_field(z), isomap.beta_inv_field(w))
    assert got == pytest.approx(1 / (z - w))


def test_noncompact_picture():
    line = QuasifreeKernel(KernelKind.LINE_VACUUM)
    x, y = 0.3, -0.55
    X, Y = q_map(x), q_map(y)
    (p, ps), (q, qs) = isomap.beta_noncompact(x), isomap.beta_noncompact(y)
    assert two_point(line, p, qs) == pytest.approx(-1j / (X - Y))
    assert two_point(line, p, q) == pytest.approx(0, abs=1e-12)
    line2 = QuasifreeKernel(KernelKind.LINE_VACUUM, n_fields=2)
    got = two_point(line2, isomap.beta_inv_noncompact(x), isomap.beta_inv_noncompact(y))
    assert got == pytest.approx(-1j / (x - y))
    with pytest.raises(ValueError):
        isomap.beta_noncompact(0.0)


def test_ramond_mode_map():
    assert isomap.betaR_mode("R", 2).value == HalfInt(8)
    assert isomap.betaR_mode("NS", Fraction(-1, 2)).value == HalfInt(-2)
    assert isomap.betaR_on_modes(ModeIndex(HalfInt(1), 2)).sector is Sector.RAMOND
    with pytest.raises(ValueError):
        isomap.betaR_mode("NS", 1)


def test_ramond_field_map():
    RN = QuasifreeKernel(KernelKind.RAMOND_NS, n_fields=2)
    Z, W = cmath.exp(0.7j), cmath.exp(-1.9j)
    for s, i in (("R", 1), ("NS", 2)):
        for t, j in (("R", 1), ("NS", 2)):
            got = two_point(RAMOND_PERIODIC, isomap.betaR_field(s, Z), isomap.betaR_field(t, W))
            assert got == pytest.approx(RN.eval(i, Z, j, W), abs=1e-12)
