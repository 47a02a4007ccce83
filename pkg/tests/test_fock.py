import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from multiferm.core import HalfInt, ModeIndex, Sector
from multiferm.fock import FockResourceError, FockSpace, OutOfCutoffError, max_abs, window_residual
from multiferm.poly import ModePolynomial, symbolic_vacuum_expectation


@pytest.mark.parametrize("sector,cutoff,nf", [(Sector.NS, Fraction(7, 2), 1), (Sector.RAMOND, 3, 1),
                                             (Sector.NS, Fraction(5, 2), 2)])
def test_car_matrices(sector, cutoff, nf):
    fs = FockSpace(sector, cutoff, n_fields=nf)
    I = np.eye(fs.dim)
    for a, b in itertools.combinations_with_replacement(fs.modes(), 2):
        A, B = fs.op(a).toarray(), fs.op(b).toarray()
        want = 0.0
        if a.value.twice + b.value.twice == 0 and a.field + b.field == nf + 1:
            want = 1.0
        assert np.max(np.abs(A @ B + B @ A - want * I)) < 1e-14


def test_adjoints_and_vacuum():
    fs = FockSpace(Sector.NS, Fraction(5, 2), n_fields=2)
    for a in fs.modes():
        adj = ModeIndex(-a.value, 3 - a.field, a.sector)
        assert max_abs(fs.op(a).getH() - fs.op(adj)) == 0
    for a in fs.annihilators():
        assert np.allclose(fs.op(a) @ fs.vacuum, 0)


def test_ramond_zero_mode():
    fs = FockSpace(Sector.RAMOND, 2)
    z = fs.op(ModeIndex(HalfInt(0), sector=Sector.RAMOND)).toarray()
    assert np.allclose(2 * z @ z, np.eye(fs.dim))
    assert fs.dim == 8


def test_limits_and_errors():
    with pytest.raises(FockResourceError):
        FockSpace(Sector.NS, Fraction(23, 2), n_fields=2, max_dim=2 ** 16)
    fs = FockSpace(Sector.NS, Fraction(3, 2))
    with pytest.raises(OutOfCutoffError):
        fs.op(ModeIndex(HalfInt(5)))
    with pytest.raises(ValueError):
        FockSpace(Sector.NS, 2)
    with pytest.raises(ValueError):
        FockSpace(Sector.RAMOND, Fraction(3, 2))


def test_energies_and_window():
    fs = FockSpace(Sector.NS, Fraction(5, 2))
    assert sorted(set(fs.energies)) == [0, 0.5, 1.5, 2.0, 2.5, 3.0, 4.0, 4.5]
    w = fs.window(1.5)
    assert set(fs.energies[w]) == {0, 0.5, 1.5}
    assert fs.safe_energy(1) == 1.5


mode_strategy = st.builds(lambda t: ModeIndex(HalfInt(2 * t + 1)), st.integers(-3, 2))


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(st.lists(mode_strategy, max_size=4), st.complex_numbers(max_magnitude=3)),
                min_size=1, max_size=4))
def test_fock_matches_symbolic(terms):
    fs = FockSpace(Sector.NS, Fraction(5, 2))
    p = ModePolynomial([(tuple(m), c) for m, c in terms])
    assert fs.vacuum_expectation(p) == pytest.approx(symbolic_vacuum_expectation(p), abs=1e-10)
    v = np.random.default_rng(0).normal(size=fs.dim)
    assert np.allclose(fs.matrix(p) @ v, fs.apply(p, v))


def test_window_residual():
    fs = FockSpace(Sector.NS, Fraction(3, 2))
    a = fs.op(ModeIndex(HalfInt(1)))
    b = fs.op(ModeIndex(HalfInt(-1)))
    assert window_residual(a @ b + b @ a, 1.0, np.arange(fs.dim)) < 1e-15
