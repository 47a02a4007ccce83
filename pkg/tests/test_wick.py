import cmath
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from multiferm.core import HalfInt, ModeIndex, Sector
from multiferm.fock import FockSpace
from multiferm.poly import ModePolynomial
from multiferm.wick import (CoincidentPointsError, FieldPoint, KernelKind, NS_VACUUM, QuasifreeKernel,
                            TWISTED_CURRENT, hafnian, mode_npoint, npoint, npoint_generic, pfaffian,
                            pfaffian_generic, twisted_current_principal, two_point)


@settings(deadline=None)
@given(st.integers(1, 6), st.integers(0, 2 ** 31))
def test_pfaffian_squares_to_determinant(m, seed):
    rng = np.random.default_rng(seed)
    A = rng.normal(size=(2 * m, 2 * m)) + 1j * rng.normal(size=(2 * m, 2 * m))
    A = A - A.T
    assert pfaffian(A) ** 2 == pytest.approx(np.linalg.det(A), rel=1e-8)
    if m <= 4:
        assert pfaffian(A, expand_up_to=0) == pytest.approx(pfaffian(A), rel=1e-9)
        assert complex(pfaffian_generic(A.tolist())) == pytest.approx(pfaffian(A), rel=1e-9)


def test_pfaffian_edge_cases():
    assert pfaffian(np.zeros((3, 3))) == 0
    assert pfaffian(np.zeros((0, 0))) == 1
    with pytest.raises(ValueError):
        pfaffian(np.ones((2, 2)))


def test_hafnian_counts_matchings():
    assert hafnian(np.ones((6, 6))) == 15
    assert hafnian(np.ones((4, 4))) == 3


def test_mode_correlators_match_fock():
    fs = FockSpace(Sector.NS, Fraction(5, 2))
    ms = [ModeIndex(HalfInt(t)) for t in (3, 1, -1, -3)]
    for perm in ([0, 1, 2, 3], [0, 2, 1, 3], [1, 0, 3, 2], [0, 3, 1, 2]):
        seq = [ms[i] for i in perm]
        assert mode_npoint(seq) == pytest.approx(fs.vacuum_expectation(ModePolynomial.product(seq)))
    fr = FockSpace(Sector.RAMOND, 2)
    z = ModeIndex(HalfInt(0), sector=Sector.RAMOND)
    one = ModeIndex(HalfInt(2), sector=Sector.RAMOND)
    seq = [one, z, z, ModeIndex(HalfInt(-2), sector=Sector.RAMOND)]
    assert mode_npoint(seq) == pytest.approx(fr.vacuum_expectation(ModePolynomial.product(seq)))


def test_mode_sum_reproduces_kernel():
    # sum_{m>0} z^(-m-1/2) w^(m-1/2) = 1/(z - w) for |w| < |z|
    z, w = 1.0 + 0j, 0.6 * cmath.exp(0.4j)
    s = sum(z ** (-k - 1) * w ** k for k in range(400))
    assert s == pytest.approx(NS_VACUUM.eval(1, z, 1, w))


def test_coincident_points():
    with pytest.raises(CoincidentPointsError):
        NS_VACUUM.eval(1, 1j, 1, 1j)


def test_line_kernel_species():
    K = QuasifreeKernel(KernelKind.LINE_VACUUM, n_fields=2)
    assert K.eval(1, 0.2, 1, 0.5) == 0
    assert K.eval(1, 0.2, 2, 0.5) == pytest.approx(-1j / (0.2 - 0.5))


def test_twisted_current_kernel():
    z, w = cmath.exp(0.3j), cmath.exp(1.1j)
    assert TWISTED_CURRENT.eval(1, z, 1, w) == pytest.approx(twisted_current_principal(z * z, w * w))
    # bosonic: the 4-point function is a hafnian, symmetric under exchange
    pts = [FieldPoint.single(cmath.exp(1j * t)) for t in (0.2, 0.9, 1.7, 2.6)]
    assert npoint(TWISTED_CURRENT, pts) == pytest.approx(npoint(TWISTED_CURRENT, pts[::-1]))


def test_generic_matches_float():
    pts = [FieldPoint.single(cmath.exp(1j * t)) for t in (0.1, 1.0, 2.0, -1.2)]
    assert complex(npoint_generic(NS_VACUUM, pts)) == pytest.approx(npoint(NS_VACUUM, pts))
    with pytest.raises(ValueError):
        npoint_generic(TWISTED_CURRENT, pts)


def test_two_point_linearity():
    p = FieldPoint.combo([(2, 1, 1j), (1j, 1, -1)])
    q = FieldPoint.single(cmath.exp(0.3j))
    want = 2 * NS_VACUUM.eval(1, 1j, 1, q.terms[0][2]) + 1j * NS_VACUUM.eval(1, -1, 1, q.terms[0][2])
    assert two_point(NS_VACUUM, p, q) == pytest.approx(want)
