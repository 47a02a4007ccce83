"""Quasifree correlators from a two-point kernel.

Every state used here is quasifree: a 2m-point function of fermion fields is
the Pfaffian of the matrix of two-point functions (ordered a < b), and a
2m-point function of the current is the hafnian of its two-point matrix.
This module is the brute-force oracle against which the Fock matrices and the
isomorphism are checked, so it depends on nothing but the kernels below.
"""
from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .core import csqrt


class KernelKind(enum.Enum):
    NS_VACUUM = "NSVacuum"              # compact picture, species k pairs with n+1-k
    LINE_VACUUM = "LineVacuum"          # non-compact picture, -i/(x - y)
    RAMOND_GROUND = "RamondGround"      # compact psi_hat in the Ramond ground state
    RAMOND_PERIODIC = "RamondPeriodic"  # psi_R(z) = sqrt(z) psi_hat(z)
    RAMOND_NS = "RamondxNS"             # species 1: psi_R (Ramond), species 2: psi_hat (NS)
    TWISTED_CURRENT = "TwistedCurrent"  # current j(Z) at Z = z^2, points given on the double cover


BOSONIC = {KernelKind.TWISTED_CURRENT}


class CoincidentPointsError(ValueError):
    pass


@dataclass(frozen=True)
class FieldPoint:
    """A finite linear combination sum_i c_i F_{s_i}(z_i) of basic fields."""

    terms: tuple = ()  # ((coefficient, species, position), ...)

    @classmethod
    def single(cls, position, species: int = 1, coefficient: complex = 1.0) -> "FieldPoint":
        return cls(((complex(coefficient), species, complex(position)),))

    @classmethod
    def combo(cls, items) -> "FieldPoint":
        return cls(tuple((complex(c), s, complex(z)) for c, s, z in items))

    def scaled(self, c: complex) -> "FieldPoint":
        return FieldPoint(tuple((c * a, s, z) for a, s, z in self.terms))

    def __add__(self, other: "FieldPoint") -> "FieldPoint":
        return FieldPoint(self.terms + other.terms)

    def positions(self):
        return [z for _, _, z in self.terms]


@dataclass(frozen=True)
class QuasifreeKernel:
    kind: KernelKind
    n_fields: int = 1
    lam: float = 1.0  # 1/(z - lam w); lam = 1 means plain split-point evaluation
    coincidence_tol: float = 1e-12

    def _pole(self, z, w):
        d = z - self.lam * w
        if self.lam == 1.0 and abs(d) < self.coincidence_tol:
            raise CoincidentPointsError(f"coincident points {z} and {w}")
        return d

    def eval(self, s: int, z: complex, t: int, w: complex) -> complex:
        """omega(F_s(z) F_t(w))."""
        k = self.kind
        if k is KernelKind.NS_VACUUM:
            if s + t != self.n_fields + 1:
                return 0j
            return 1.0 / self._pole(z, w)
        if k is KernelKind.LINE_VACUUM:
            if s + t != self.n_fields + 1:
                return 0j
            return -1j / self._pole(z, w)
        if k is KernelKind.RAMOND_GROUND:
            return (z + w) / (2 * csqrt(z) * csqrt(w) * self._pole(z, w))
        if k is KernelKind.RAMOND_PERIODIC:
            return (z + w) / (2 * self._pole(z, w))
        if k is KernelKind.RAMOND_NS:
            if s != t:
                return 0j
            if s == 1:
                return (z + w) / (2 * self._pole(z, w))
            return 1.0 / self._pole(z, w)
        if k is KernelKind.TWISTED_CURRENT:
            Z, W = z * z, w * w
            d = self._pole(Z, W)
            return (W + Z) / (2 * z * w * d * d)
        raise ValueError(k)

    @property
    def bosonic(self) -> bool:
        return self.kind in BOSONIC


NS_VACUUM = QuasifreeKernel(KernelKind.NS_VACUUM)
RAMOND_GROUND = QuasifreeKernel(KernelKind.RAMOND_GROUND)
TWISTED_CURRENT = QuasifreeKernel(KernelKind.TWISTED_CURRENT)


def twisted_current_principal(Z: complex, W: complex) -> complex:
    """omega_t(j(Z) j(W)) with sqrt(ZW) taken as sqrt(Z) sqrt(W), principal branches."""
    return (W + Z) / (2 * csqrt(Z) * csqrt(W) * (W - Z) ** 2)


def two_point(kernel: QuasifreeKernel, p: FieldPoint, q: FieldPoint) -> complex:
    total = 0j
    for a, s, z in p.terms:
        for b, t, w in q.terms:
            total += a * b * kernel.eval(s, z, t, w)
    return total


# ------------------------------------------------------------ Pfaffians

def _check_antisymmetric(A: np.ndarray, tol: float = 1e-10):
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError("Pfaffian needs a square matrix")
    scale = max(1.0, float(np.max(np.abs(A))) if A.size else 1.0)
    if np.max(np.abs(A + A.T), initial=0.0) > tol * scale:
        raise ValueError("matrix is not antisymmetric")


def _pfaffian_expand(A: np.ndarray) -> complex:
    n = A.shape[0]
    if n == 0:
        return 1.0
    if n == 2:
        return A[0, 1]
    total = 0j
    rest = list(range(1, n))
    for idx, j in enumerate(rest):
        if A[0, j] == 0:
            continue
        keep = [r for r in rest if r != j]
        sub = A[np.ix_(keep, keep)]
        total += (-1) ** idx * A[0, j] * _pfaffian_expand(sub)
    return total


def _pfaffian_parlett_reid(A: np.ndarray) -> complex:
    A = np.array(A, dtype=complex)
    n = A.shape[0]
    pf = 1.0 + 0j
    for k in range(0, n - 1, 2):
        kp = k + 1 + int(np.argmax(np.abs(A[k + 1:, k])))
        if kp != k + 1:
            A[[k + 1, kp], :] = A[[kp, k + 1], :]
            A[:, [k + 1, kp]] = A[:, [kp, k + 1]]
            pf = -pf
        if A[k + 1, k] == 0:
            return 0j
        pf *= A[k, k + 1]
        if k + 2 < n:
            tau = A[k, k + 2:] / A[k, k + 1]
            col = A[k + 2:, k + 1].copy()
            A[k + 2:, k + 2:] += np.outer(tau, col) - np.outer(col, tau)
    return pf


def pfaffian(A, expand_up_to: int = 8) -> complex:
    """Pf(A) for an even-dimensional antisymmetric matrix (odd dimension gives 0)."""
    A = np.asarray(A, dtype=complex)
    _check_antisymmetric(A)
    n = A.shape[0]
    if n % 2:
        return 0j
    if n <= expand_up_to:
        return complex(_pfaffian_expand(A))
    return complex(_pfaffian_parlett_reid(A))


def hafnian(A) -> complex:
    """Hafnian of a symmetric matrix by first-row expansion (small sizes only)."""
    A = np.asarray(A, dtype=complex)
    n = A.shape[0]
    if n % 2:
        return 0j
    if n == 0:
        return 1.0 + 0j
    total = 0j
    for j in range(1, n):
        keep = [r for r in range(1, n) if r != j]
        total += A[0, j] * hafnian(A[np.ix_(keep, keep)])
    return total


def correlator(items: Sequence, pair: Callable, bosonic: bool = False) -> complex:
    """Quasifree expectation of the ordered product of ``items`` given pair(a, b) = omega(a b)."""
    m = len(items)
    if m % 2:
        return 0j
    A = np.zeros((m, m), dtype=complex)
    for a, b in itertools.combinations(range(m), 2):
        A[a, b] = pair(items[a], items[b])
        A[b, a] = A[a, b] if bosonic else -A[a, b]
    return hafnian(A) if bosonic else pfaffian(A)


def npoint(kernel: QuasifreeKernel, points: Sequence[FieldPoint]) -> complex:
    return correlator(points, lambda p, q: two_point(kernel, p, q), bosonic=kernel.bosonic)


# ------------------------------------------------------------ modes

def mode_two_point(a, b, n_fields: int = 1) -> float:
    """omega(a b) for mode labels in the NS vacuum or the Ramond ground state."""
    if a.field + b.field != n_fields + 1 or a.value.twice + b.value.twice != 0:
        return 0.0
    if a.value.twice > 0:
        return 1.0
    return 0.5 if a.value.twice == 0 else 0.0


def mode_npoint(modes: Sequence, n_fields: int = 1) -> complex:
    return correlator(list(modes), lambda a, b: mode_two_point(a, b, n_fields))


def smeared_npoint(smearings: Sequence[dict], n_fields: int = 1) -> complex:
    """Quasifree expectation of products of smeared fields sum_m f(m) psi_m (dicts mode -> coefficient)."""
    def pair(f, g):
        return sum(c * d * mode_two_point(a, b, n_fields) for a, c in f.items() for b, d in g.items())
    return correlator(list(smearings), pair)


def pfaffian_generic(A) -> object:
    """Pf by first-row expansion on nested lists; works for any number type (e.g. mpmath)."""
    n = len(A)
    if n % 2:
        return 0
    if n == 0:
        return 1
    total = 0
    for idx, j in enumerate(range(1, n)):
        if A[0][j] == 0:
            continue
        keep = [r for r in range(1, n) if r != j]
        total += (-1) ** idx * A[0][j] * pfaffian_generic([[A[a][b] for b in keep] for a in keep])
    return total


def npoint_generic(kernel: QuasifreeKernel, points: Sequence[FieldPoint]):
    """npoint without converting to float64 (fermionic kernels only)."""
    if kernel.bosonic:
        raise ValueError("npoint_generic handles fermionic kernels")
    m = len(points)
    A = [[0] * m for _ in range(m)]
    for a, b in itertools.combinations(range(m), 2):
        A[a][b] = two_point(kernel, points[a], points[b])
        A[b][a] = -A[a][b]
    return pfaffian_generic(A)
