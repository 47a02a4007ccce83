import pytest
from hypothesis import given, strategies as st

from multiferm.core import HalfInt, ModeIndex, Sector
from multiferm.poly import ModePolynomial, adjoint_mode, anticommutator, normal_order, symbolic_vacuum_expectation

modes = st.builds(lambda t: ModeIndex(HalfInt(2 * t + 1)), st.integers(-4, 3))


def test_car_relations():
    a = ModeIndex(HalfInt(3))
    b = ModeIndex(HalfInt(-3))
    assert anticommutator(a, b) == 1.0
    assert anticommutator(a, a) == 0.0
    assert adjoint_mode(a) == b
    c2 = ModeIndex(HalfInt(1), 2)
    assert anticommutator(ModeIndex(HalfInt(-1), 1), c2, 2) == 1.0
    assert anticommutator(ModeIndex(HalfInt(-1), 2), c2, 2) == 0.0


@given(modes, modes)
def test_anticommutator_from_normal_order(a, b):
    p = ModePolynomial.product((a, b)) + ModePolynomial.product((b, a))
    assert normal_order(p).terms.get((), 0) == pytest.approx(anticommutator(a, b))
    assert len(normal_order(p)) <= 1


@given(st.lists(modes, min_size=1, max_size=5))
def test_normal_order_idempotent(ms):
    p = normal_order(ModePolynomial.product(ms, 0.7 + 0.2j))
    q = normal_order(p)
    assert set(p.terms) == set(q.terms)
    for k in p.terms:
        assert p.terms[k] == pytest.approx(q.terms[k])


def test_vacuum_expectation():
    a, b = ModeIndex(HalfInt(1)), ModeIndex(HalfInt(-1))
    assert symbolic_vacuum_expectation(ModePolynomial.product((a, b))) == 1
    assert symbolic_vacuum_expectation(ModePolynomial.product((b, a))) == 0
    z = ModeIndex(HalfInt(0), sector=Sector.RAMOND)
    assert symbolic_vacuum_expectation(ModePolynomial.product((z, z))) == 0.5


def test_adjoint_reverses_order():
    a, b = ModeIndex(HalfInt(1)), ModeIndex(HalfInt(3))
    p = ModePolynomial.product((a, b), 2j)
    adj = p.adjoint()
    assert adj.terms == {(adjoint_mode(b), adjoint_mode(a)): -2j}


def test_polynomial_arithmetic():
    a = ModePolynomial.mode(ModeIndex(HalfInt(1)))
    assert (a - a).is_zero()
    assert (2 * a + 1).degree() == 1
    assert a.commutator(a).is_zero()
    m = a.map_modes(lambda x: ModeIndex(x.value + 2))
    assert list(m.modes())[0].value == HalfInt(5)
