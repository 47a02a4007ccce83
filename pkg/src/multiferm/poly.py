"""Finite linear combinations of ordered products of fermion modes.

The algebra is the CAR algebra of ``n_fields`` fields phi^(1..n) with
(phi^(k)_m)^* = phi^(n+1-k)_{-m} and {phi^(k)_m, phi^(l)_p} = delta_{k+l,n+1} delta_{m+p,0}.
For n_fields = 1 this is the single real field, {psi_m, psi_p} = delta_{m+p,0}.
"""
from __future__ import annotations

from collections import defaultdict
from functools import lru_cache
from typing import Iterable

from .core import HalfInt, ModeIndex

Monomial = tuple  # tuple[ModeIndex, ...]

ZERO_TOL = 1e-15


def anticommutator(a: ModeIndex, b: ModeIndex, n_fields: int = 1) -> float:
    if a.sector is not b.sector:
        return 0.0
    if a.value.twice + b.value.twice != 0:
        return 0.0
    return 1.0 if a.field + b.field == n_fields + 1 else 0.0


def adjoint_mode(a: ModeIndex, n_fields: int = 1) -> ModeIndex:
    return ModeIndex(-a.value, n_fields + 1 - a.field, a.sector)


class ModePolynomial:
    """sum_i c_i * (a_i1 a_i2 ... a_ik), products read left to right."""

    __slots__ = ("terms", "n_fields")

    def __init__(self, terms=None, n_fields: int = 1):
        self.n_fields = n_fields
        self.terms: dict[Monomial, complex] = {}
        if terms:
            items = terms.items() if isinstance(terms, dict) else terms
            for mono, c in items:
                self._add(tuple(mono), c)

    def _add(self, mono: Monomial, c: complex):
        c = complex(c)
        if c == 0:
            return
        new = self.terms.get(mono, 0) + c
        if new == 0:
            self.terms.pop(mono, None)
        else:
            self.terms[mono] = new

    # construction ---------------------------------------------------
    @classmethod
    def identity(cls, c: complex = 1.0, n_fields: int = 1) -> "ModePolynomial":
        return cls({(): c}, n_fields)

    @classmethod
    def mode(cls, a: ModeIndex, c: complex = 1.0, n_fields: int = 1) -> "ModePolynomial":
        return cls({(a,): c}, n_fields)

    @classmethod
    def product(cls, modes: Iterable[ModeIndex], c: complex = 1.0, n_fields: int = 1):
        return cls({tuple(modes): c}, n_fields)

    def copy(self) -> "ModePolynomial":
        p = ModePolynomial(n_fields=self.n_fields)
        p.terms = dict(self.terms)
        return p

    # algebra --------------------------------------------------------
    def __add__(self, other):
        if not isinstance(other, ModePolynomial):
            other = ModePolynomial.identity(other, self.n_fields)
        out = self.copy()
        for m, c in other.terms.items():
            out._add(m, c)
        return out

    __radd__ = __add__

    def __neg__(self):
        return self * -1

    def __sub__(self, other):
        return self + (-other if isinstance(other, ModePolynomial) else -complex(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, ModePolynomial):
            out = ModePolynomial(n_fields=self.n_fields)
            for m1, c1 in self.terms.items():
                for m2, c2 in other.terms.items():
                    out._add(m1 + m2, c1 * c2)
            return out
        out = ModePolynomial(n_fields=self.n_fields)
        for m, c in self.terms.items():
            out._add(m, c * other)
        return out

    def __rmul__(self, scalar):
        return self * scalar

    def commutator(self, other: "ModePolynomial") -> "ModePolynomial":
        return self * other - other * self

    def adjoint(self) -> "ModePolynomial":
        n = self.n_fields
        return ModePolynomial(
            {tuple(adjoint_mode(a, n) for a in reversed(m)): c.conjugate() for m, c in self.terms.items()},
            n,
        )

    def map_modes(self, f, n_fields: int | None = None) -> "ModePolynomial":
        """Substitute every factor a -> f(a); f returns a ModeIndex or a ModePolynomial."""
        nf = self.n_fields if n_fields is None else n_fields
        out = ModePolynomial(n_fields=nf)
        for mono, c in self.terms.items():
            acc = ModePolynomial.identity(c, nf)
            for a in mono:
                img = f(a)
                if isinstance(img, ModeIndex):
                    img = ModePolynomial.mode(img, n_fields=nf)
                acc = acc * img
            out = out + acc
        return out

    # inspection -----------------------------------------------------
    def modes(self) -> set:
        return {a for m in self.terms for a in m}

    def max_abs_mode(self) -> float:
        return max((abs(float(a.value)) for a in self.modes()), default=0.0)

    def degree(self) -> int:
        return max((len(m) for m in self.terms), default=0)

    def __len__(self):
        return len(self.terms)

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = [f"({c:.6g})*{'*'.join(map(repr, m)) or '1'}" for m, c in sorted(self.terms.items(), key=_term_key)]
        return " + ".join(parts)

    def is_zero(self, tol: float = 1e-12) -> bool:
        return all(abs(c) <= tol for c in self.terms.values())

    def chop(self, tol: float = ZERO_TOL) -> "ModePolynomial":
        return ModePolynomial({m: c for m, c in self.terms.items() if abs(c) > tol}, self.n_fields)


def _term_key(item):
    mono, _ = item
    return (len(mono), [(a.value.twice, a.field) for a in mono])


def _order_key(a: ModeIndex):
    return (a.value.twice, a.field)


@lru_cache(maxsize=200_000)
def _canonical(mono: Monomial, n_fields: int) -> tuple:
    """Rewrite a monomial as sum of canonically ordered monomials.

    Canonical order is ascending in (value, field): creation operators on the
    left, annihilation operators on the right.  Returns ((mono, coeff), ...).
    """
    for i in range(len(mono) - 1):
        a, b = mono[i], mono[i + 1]
        ka, kb = _order_key(a), _order_key(b)
        if ka == kb:
            # a a = 1/2 {a, a}
            half = 0.5 * anticommutator(a, a, n_fields)
            if half == 0:
                return ()
            rest = mono[:i] + mono[i + 2:]
            return tuple((m, half * c) for m, c in _canonical(rest, n_fields))
        if ka > kb:
            out: dict = defaultdict(complex)
            swapped = mono[:i] + (b, a) + mono[i + 2:]
            for m, c in _canonical(swapped, n_fields):
                out[m] -= c
            ac = anticommutator(a, b, n_fields)
            if ac:
                for m, c in _canonical(mono[:i] + mono[i + 2:], n_fields):
                    out[m] += ac * c
            return tuple((m, c) for m, c in out.items() if c != 0)
    return ((mono, 1.0),)


def normal_order(p: ModePolynomial) -> ModePolynomial:
    """Canonical (creation-left) form of p using only the CAR."""
    out = ModePolynomial(n_fields=p.n_fields)
    for mono, c in p.terms.items():
        for m, c2 in _canonical(mono, p.n_fields):
            out._add(m, c * c2)
    return out.chop()


def symbolic_vacuum_expectation(p: ModePolynomial) -> complex:
    """<Omega, p Omega> from the canonical form.

    Canonical monomials with a creation operator on the left or an
    annihilation operator on the right vanish; a lone Ramond zero mode has
    zero expectation in the ground state used by the Fock module.
    """
    return complex(normal_order(p).terms.get((), 0.0))


def wick_order(p: ModePolynomial) -> ModePolynomial:
    """:p: relative to the vacuum: p minus its vacuum expectation (quadratic terms only)."""
    if p.degree() > 2:
        raise ValueError("wick_order is only implemented for bilinears")
    return p - symbolic_vacuum_expectation(p)
