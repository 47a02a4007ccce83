"""Exact mode labels and the circle/line coordinate maps.

Mode labels are stored as twice their value so that integer (Ramond) and
half-odd (Neveu-Schwarz) indices are exact.  Points on the circle are plain
complex numbers; square roots always use the principal branch with the cut
at z = -1, i.e. phase in (-pi, pi].
"""
from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import total_ordering

import numpy as np

UNIT_TOL = 1e-12


class Sector(enum.Enum):
    NS = "NS"
    RAMOND = "Ramond"


@total_ordering
@dataclass(frozen=True)
class HalfInt:
    """An element of Z/2, stored as ``twice`` = 2m."""

    twice: int

    @classmethod
    def of(cls, x) -> "HalfInt":
        if isinstance(x, HalfInt):
            return x
        f = Fraction(x)
        if (2 * f).denominator != 1:
            raise ValueError(f"{x!r} is not a multiple of 1/2")
        return cls(int(2 * f))

    @property
    def is_integer(self) -> bool:
        return self.twice % 2 == 0

    @property
    def is_half_odd(self) -> bool:
        return self.twice % 2 != 0

    def as_fraction(self) -> Fraction:
        return Fraction(self.twice, 2)

    def __float__(self) -> float:
        return self.twice / 2

    def __int__(self) -> int:
        if not self.is_integer:
            raise ValueError(f"{self} is not an integer")
        return self.twice // 2

    def __add__(self, other):
        other = HalfInt.of(other)
        return HalfInt(self.twice + other.twice)

    __radd__ = __add__

    def __sub__(self, other):
        other = HalfInt.of(other)
        return HalfInt(self.twice - other.twice)

    def __rsub__(self, other):
        return HalfInt.of(other) - self

    def __neg__(self):
        return HalfInt(-self.twice)

    def __mul__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        return HalfInt(self.twice * k)

    __rmul__ = __mul__

    def __abs__(self):
        return HalfInt(abs(self.twice))

    def __lt__(self, other):
        return self.twice < HalfInt.of(other).twice

    def __eq__(self, other):
        if isinstance(other, HalfInt):
            return self.twice == other.twice
        try:
            return self.twice == HalfInt.of(other).twice
        except (TypeError, ValueError):
            return NotImplemented

    def __hash__(self):
        return hash(self.twice)

    def __repr__(self):
        if self.is_integer:
            return f"{self.twice // 2}"
        return f"{self.twice}/2"


@total_ordering
@dataclass(frozen=True)
class ModeIndex:
    """A fermion mode label.

    ``field`` distinguishes the components phi^(1..n) of an n-fermion theory;
    it is 1 for the single real field.
    """

    value: HalfInt
    field: int = 1
    sector: Sector = Sector.NS

    def __post_init__(self):
        v = HalfInt.of(self.value)
        object.__setattr__(self, "value", v)
        if self.sector is Sector.NS and not v.is_half_odd:
            raise ValueError(f"NS modes are half-odd, got {v}")
        if self.sector is Sector.RAMOND and not v.is_integer:
            raise ValueError(f"Ramond modes are integers, got {v}")

    def __lt__(self, other):
        return (self.value.twice, self.field) < (other.value.twice, other.field)

    def __repr__(self):
        tag = "R" if self.sector is Sector.RAMOND else ""
        f = f"^{self.field}" if self.field != 1 else ""
        return f"psi{tag}{f}[{self.value!r}]"


def ns(m, field: int = 1) -> ModeIndex:
    return ModeIndex(HalfInt.of(m), field, Sector.NS)


def ramond(m) -> ModeIndex:
    return ModeIndex(HalfInt.of(m), 1, Sector.RAMOND)


def half_odd_range(lo, hi):
    """Half-odd integers m with lo <= m <= hi, ascending."""
    a = math.ceil(float(lo) - 0.5)
    b = math.floor(float(hi) - 0.5)
    return [HalfInt(2 * k + 1) for k in range(a, b + 1)]


# ---------------------------------------------------------------- circle

@dataclass(frozen=True)
class CirclePoint:
    z: complex

    def __post_init__(self):
        z = complex(self.z)
        if abs(abs(z) - 1.0) > 1e-12:
            raise ValueError(f"|z| = {abs(z)} is not 1")
        object.__setattr__(self, "z", z)

    @classmethod
    def from_phase(cls, phi: float) -> "CirclePoint":
        return cls(cmath.exp(1j * phi))

    @property
    def phase(self) -> float:
        p = cmath.phase(self.z)
        return math.pi if p == -math.pi else p

    def sqrt(self) -> complex:
        return cmath.exp(0.5j * self.phase)

    def __complex__(self):
        return self.z


def csqrt(z: complex) -> complex:
    """Principal square root, cut along the negative real axis, arg in (-pi/2, pi/2]."""
    z = complex(z)
    if z.imag == 0.0 and z.real < 0:
        return 1j * math.sqrt(-z.real)
    return cmath.sqrt(z)


def cayley(x: float) -> complex:
    x = float(x)
    if not math.isfinite(x):
        raise ValueError("cayley needs a finite argument")
    return (1 + 1j * x) / (1 - 1j * x)


def cayley_inv(z: complex) -> float:
    z = complex(z)
    if abs(z + 1) < 1e-15:
        raise ValueError("z = -1 is the image of infinity")
    x = (z - 1) / (1j * (z + 1))
    return x.real


def compact_factor(x: float) -> complex:
    """(-i dz/dx)^(-1/2) = (1 - i x)/sqrt(2): psi_hat(z) = compact_factor(x) psi(x)."""
    return (1 - 1j * x) / math.sqrt(2)


def q_map(x: float) -> float:
    """2x/(1-x^2): the square map z -> z^2 seen through the Cayley transform."""
    if abs(x) >= 1:
        raise ValueError(f"q_map is defined on (-1, 1), got {x}")
    return 2 * x / (1 - x * x)


def q_preimages(X: float) -> tuple[float, float]:
    """The two real solutions of q(x) = X, returned as (x, -1/x) with |x| < 1."""
    if X == 0:
        raise ValueError("X = 0 has the single finite preimage 0 (the other is infinity)")
    x = (math.sqrt(1 + X * X) - 1) / X
    return x, -1 / x


def nth_roots(z: complex, n: int) -> list[complex]:
    """All n-th roots of a unit complex z, sorted by phase in (-pi, pi]."""
    if n < 1:
        raise ValueError("n must be positive")
    phi = CirclePoint(z).phase
    roots = [cmath.exp(1j * (phi + 2 * math.pi * j) / n) for j in range(n)]
    return sorted(roots, key=lambda w: CirclePoint(w).phase)


def principal_root(z: complex, n: int) -> complex:
    return cmath.exp(1j * CirclePoint(z).phase / n)


def omega(n: int) -> complex:
    return cmath.exp(2j * math.pi / n)


def as_array(points) -> np.ndarray:
    return np.asarray([complex(p) for p in points], dtype=complex)
