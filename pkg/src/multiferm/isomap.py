"""The vacuum-preserving isomorphisms between one real fermion and n fermions.

``beta`` sends the n-fermion algebra (components phi^(k), k = 1..n, with
(phi^(k))^* = phi^(n+1-k)) onto the algebra of a single real field psi:

    phi^(k)(z^n)  ->  z^(1-k)/n * sum_j w^((1-k) j) psi(w^j z),   w = exp(2 pi i/n),

equivalently on modes phi^(k)_nu -> psi_{1/2 - k + (nu + 1/2) n}.  For n = 2,
phi^(1) = phi and phi^(2) = phi^*.  ``beta_R`` is the Ramond analogue
(Ramond x NS -> Ramond).

Positions are compact-picture points unless a function says otherwise.
Field combinations are :class:`~multiferm.wick.FieldPoint` objects whose
species index refers to the kernel they are evaluated with.
"""
from __future__ import annotations

import cmath
import math

from .core import HalfInt, ModeIndex, Sector, principal_root, q_map
from .wick import FieldPoint

LinearFieldCombo = FieldPoint


# ------------------------------------------------------------ modes

def beta_mode(n: int, k: int, nu) -> ModeIndex:
    """Image of the mode phi^(k)_nu: psi_{1/2 - k + (nu + 1/2) n}."""
    if not 1 <= k <= n:
        raise ValueError(f"k = {k} outside 1..{n}")
    nu = HalfInt.of(nu)
    if not nu.is_half_odd:
        raise ValueError("nu must be half-odd")
    p = (nu.twice + 1) // 2  # nu + 1/2
    return ModeIndex(HalfInt(1 - 2 * k + 2 * p * n), 1, Sector.NS)


def beta_mode_inverse(n: int, m) -> tuple[int, HalfInt]:
    """The unique (k, nu) whose image under beta_mode is psi_m."""
    m = HalfInt.of(m)
    if not m.is_half_odd:
        raise ValueError("m must be half-odd")
    r = (1 - m.twice) // 2  # 1/2 - m, an integer
    k = r % n or n
    p = (m.twice - 1 + 2 * k) // (2 * n)
    return k, HalfInt(2 * p - 1)


def beta_on_modes(n: int):
    """Substitution a -> beta(a) for n-field NS mode labels (field = k)."""
    def f(a: ModeIndex) -> ModeIndex:
        return beta_mode(n, a.field, a.value)
    return f


def beta_inverse_on_modes(n: int):
    def f(a: ModeIndex) -> ModeIndex:
        k, nu = beta_mode_inverse(n, a.value)
        return ModeIndex(nu, k, Sector.NS)
    return f


# ------------------------------------------------------------ fields

def beta_field(n: int, k: int, Z: complex, root: complex | None = None) -> FieldPoint:
    """beta(phi^(k)(Z)) as a combination of psi_hat at the n roots of Z.

    ``root`` selects which n-th root plays the role of z; the result does not
    depend on it (up to reordering of terms).
    """
    if not 1 <= k <= n:
        raise ValueError(f"k = {k} outside 1..{n}")
    z = principal_root(Z, n) if root is None else complex(root)
    w = cmath.exp(2j * math.pi / n)
    pref = z ** (1 - k) / n
    return FieldPoint(tuple((pref * w ** ((1 - k) * j), 1, w ** j * z) for j in range(n)))


def beta_field_mp(n: int, k: int, phase, mp) -> FieldPoint:
    """beta_field at Z = exp(i phase) in mpmath arithmetic (context ``mp``), root exp(i phase/n)."""
    z = mp.expj(mp.mpf(phase) / n)
    w = mp.expj(2 * mp.pi / n)
    pref = z ** (1 - k) / n
    return FieldPoint(tuple((pref * w ** ((1 - k) * j), 1, w ** j * z) for j in range(n)))


def beta_inv_field(z: complex) -> FieldPoint:
    """beta^{-1}(psi_hat(z)) = phi_hat(z^2) + z phi_hat^*(z^2); species 1 = phi, 2 = phi^*."""
    z = complex(z)
    return FieldPoint(((1.0 + 0j, 1, z * z), (z, 2, z * z)))


def beta_noncompact(x: float) -> tuple[FieldPoint, FieldPoint]:
    """beta(phi(q(x))) and beta(phi^*(q(x))) in terms of psi(x), psi(-1/x) on the line.

    Obtained from the compact map through z = cayley(x), -z = cayley(-1/x) and
    psi_hat(z) = (1 - i x)/sqrt(2) psi(x).  The 1/q(x) prefactor makes x = 0 a
    removable singularity of this form; the compact form is regular there.
    """
    if x == 0:
        raise ValueError("the non-compact form is singular at x = 0")
    q_map(x)  # domain check
    c = (1 - x * x) / 2
    y = -1.0 / x
    phi = FieldPoint(((c / (1 - 1j * x), 1, x), (1j * c / (x * (1 - 1j * x)), 1, y)))
    phis = FieldPoint(((c / (1 + 1j * x), 1, x), (-1j * c / (x * (1 + 1j * x)), 1, y)))
    return phi, phis


def beta_inv_noncompact(x: float) -> FieldPoint:
    """beta^{-1}(psi(x)) = (1 - i x)/(1 - x^2) phi(q(x)) + (1 + i x)/(1 - x^2) phi^*(q(x))."""
    X = q_map(x)
    d = 1 - x * x
    return FieldPoint((((1 - 1j * x) / d, 1, X), ((1 + 1j * x) / d, 2, X)))


# ------------------------------------------------------------ Ramond

def betaR_mode(which: str, nu) -> ModeIndex:
    """Image of a mode of the Ramond x NS pair under beta_R.

    which = "R":  psi_R^(1)_n (n integer) -> psi_R,2n
    which = "NS": psi^(2)_nu (nu half-odd) -> psi_R,2nu  (an odd Ramond mode)
    """
    nu = HalfInt.of(nu)
    if which == "R":
        if not nu.is_integer:
            raise ValueError("Ramond-field modes are integers")
    elif which == "NS":
        if not nu.is_half_odd:
            raise ValueError("NS-field modes are half-odd")
    else:
        raise ValueError(which)
    return ModeIndex(HalfInt(2 * nu.twice), 1, Sector.RAMOND)


def betaR_on_modes(a: ModeIndex) -> ModeIndex:
    """Substitution for two-field labels: field 1 Ramond, field 2 NS."""
    return betaR_mode("R" if a.field == 1 else "NS", a.value)


def betaR_field(which: str, Z: complex) -> FieldPoint:
    """beta_R images in terms of the periodic Ramond field psi_R at the two roots of Z."""
    z = principal_root(Z, 2)
    if which == "R":
        return FieldPoint(((0.5 + 0j, 1, z), (0.5 + 0j, 1, -z)))
    if which == "NS":
        return FieldPoint(((1 / (2 * z), 1, z), (-1 / (2 * z), 1, -z)))
    raise ValueError(which)
