"""Modular-flow geometry of a real free fermion on n disjoint arcs of the circle.

For arcs (u_k, v_k) the uniformizer

    X(z) = -prod_k (1 + v_k)/(1 + u_k) * prod_k (z - u_k)/(z - v_k)

maps every arc monotonously onto (0, inf) and the gaps onto (-inf, 0).  In
line coordinates this is -prod_k (x - a_k)/(x - b_k); the overall sign is
what makes arcs (rather than gaps) land on the positive axis, and it agrees
with the symmetric closed form :func:`X_of_z_symmetric`.  The n preimages z_k(X) of a
positive X carry the mixing kernel

    K(X)_kj = 2 pi sqrt(z_k') sqrt(z_j') / (z_k - z_j),   K_kk = 0,   z_k' = dz_k/dX,

and the position-dependent orthogonal matrix O(X) solves
dO/dX = -(1/2pi) O(X) K(X), O(X0) = 1 (anti-path-ordered exponential).

Square roots of z_k' are taken continuously along each arc:
sqrt(z_k') = exp(i pi/4) sqrt(z_k) sqrt(z_k'/(i z_k)) with the principal
sqrt(z_k) (cut at -1, which no arc touches) and z_k'/(i z_k) > 0.  With this
choice K(X) is real and antisymmetric.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.integrate import solve_ivp

from .core import csqrt, omega
from .wick import FieldPoint

TWO_PI = 2 * math.pi


class IntervalError(ValueError):
    pass


class PreimageError(RuntimeError):
    pass


class IntegrationError(RuntimeError):
    pass


def _phase(z: complex) -> float:
    return cmath.phase(z)


@dataclass(frozen=True)
class IntervalFamily:
    """n open arcs, given by their endpoint phases in (-pi, pi), each counterclockwise.

    ``symmetric`` families list their arcs so that arc k is w^k times arc n
    (w = exp(2 pi i/n)); ``root_arc`` then holds the phases of the arc I whose
    n-th roots they are.
    """

    phases: tuple  # ((a_1, b_1), ..., (a_n, b_n))
    symmetric: bool = False
    root_arc: tuple | None = None

    def __post_init__(self):
        ph = tuple((float(a), float(b)) for a, b in self.phases)
        object.__setattr__(self, "phases", ph)
        for a, b in ph:
            if not -math.pi < a < b < math.pi:
                raise IntervalError(f"arc ({a}, {b}) must satisfy -pi < a < b < pi (z = -1 excluded)")
        srt = sorted(ph)
        for (a1, b1), (a2, b2) in zip(srt, srt[1:]):
            if not b1 < a2:
                raise IntervalError("arcs must have disjoint closures")

    @classmethod
    def from_phases(cls, *pairs) -> "IntervalFamily":
        return cls(tuple(pairs))

    @classmethod
    def from_endpoints(cls, points) -> "IntervalFamily":
        """From a flat list u1, v1, u2, v2, ... of unit complex numbers."""
        pts = [complex(p) for p in points]
        if len(pts) % 2:
            raise IntervalError("need an even number of endpoints")
        return cls(tuple((_phase(pts[i]), _phase(pts[i + 1])) for i in range(0, len(pts), 2)))

    @classmethod
    def symmetric_family(cls, n: int, alpha: float, beta: float) -> "IntervalFamily":
        """The n-th roots of the arc (alpha, beta), -pi < alpha < beta < pi."""
        if not -math.pi < alpha < beta < math.pi:
            raise IntervalError("root arc must lie in (-pi, pi)")
        base = (alpha / n, beta / n)
        arcs = []
        for k in range(1, n + 1):
            a = base[0] + TWO_PI * k / n
            b = base[1] + TWO_PI * k / n
            shift = TWO_PI * math.floor((a + math.pi) / TWO_PI)
            arcs.append((a - shift, b - shift))
        return cls(tuple(arcs), symmetric=True, root_arc=(alpha, beta))

    @property
    def n(self) -> int:
        return len(self.phases)

    @property
    def u(self) -> np.ndarray:
        return np.exp(1j * np.array([a for a, _ in self.phases]))

    @property
    def v(self) -> np.ndarray:
        return np.exp(1j * np.array([b for _, b in self.phases]))

    def arc_of(self, z: complex) -> int | None:
        """0-based index of the arc containing z, or None."""
        p = _phase(z)
        for i, (a, b) in enumerate(self.phases):
            if a < p < b:
                return i
        return None

    def midpoint(self, k: int) -> complex:
        a, b = self.phases[k]
        return cmath.exp(0.5j * (a + b))


def X_of_z(family: IntervalFamily, z: complex) -> complex:
    """The uniformizer; real on the circle away from the endpoints."""
    z = complex(z)
    u, v = family.u, family.v
    if np.min(np.abs(z - v)) < 1e-15:
        raise ZeroDivisionError("pole at an upper endpoint")
    return complex(-np.prod((1 + v) / (1 + u)) * np.prod((z - u) / (z - v)))


def X_of_z_symmetric(n: int, u: complex, v: complex, z: complex) -> complex:
    """Closed form for symmetric families: -((-1)^n - v^n)/((-1)^n - u^n) * (z^n - u^n)/(z^n - v^n)."""
    s = (-1) ** n
    return -(s - v ** n) / (s - u ** n) * (z ** n - u ** n) / (z ** n - v ** n)


def dX_dz(family: IntervalFamily, z: complex) -> complex:
    u, v = family.u, family.v
    return X_of_z(family, z) * complex(np.sum(1 / (z - u) - 1 / (z - v)))


def sqrt_derivative(z: complex, zp: complex) -> complex:
    """Continuous square root of z' = dz/dX at a point z of an arc."""
    speed = zp / (1j * z)
    if abs(speed.imag) > 1e-8 * max(1.0, abs(speed)) or speed.real <= 0:
        raise PreimageError(f"dz/dX is not a positive tangent at {z}: {speed}")
    return cmath.exp(0.25j * math.pi) * csqrt(z) * math.sqrt(speed.real)


@dataclass
class ModularGeometry:
    family: IntervalFamily
    X0: float | None = None
    _cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if self.X0 is None:
            fam = self.family
            if fam.symmetric and fam.arc_of(1.0) is not None:
                self.X0 = float(X_of_z(fam, 1.0).real)
            else:
                self.X0 = float(X_of_z(fam, fam.midpoint(0)).real)
        if self.X0 <= 0:
            raise ValueError("base point must be positive")

    @property
    def n(self) -> int:
        return self.family.n

    @cached_property
    def _poly(self):
        u, v = self.family.u, self.family.v
        C = complex(-np.prod((1 + v) / (1 + u)))
        return C * np.poly(u), np.poly(v)

    # ------------------------------------------------------------ preimages
    def preimages(self, X: float) -> tuple[np.ndarray, np.ndarray]:
        """(z_k, z_k') for k = 1..n, z_k in arc k."""
        if X <= 0:
            raise ValueError("X must be positive")
        key = ("pre", float(X))
        if key in self._cache:
            return self._cache[key]
        pu, pv = self._poly
        P = pu - X * pv
        roots = np.roots(P)
        dP = np.polyder(P)
        for _ in range(2):
            roots = roots - np.polyval(P, roots) / np.polyval(dP, roots)
        z = np.empty(self.n, dtype=complex)
        filled = [False] * self.n
        for r in roots:
            if abs(abs(r) - 1) > 1e-8:
                raise PreimageError(f"root {r} is off the circle")
            r = r / abs(r)
            k = self.family.arc_of(r)
            if k is None or filled[k]:
                raise PreimageError(f"root {r} is not in a free arc")
            z[k] = r
            filled[k] = True
        zp = np.array([1 / dX_dz(self.family, zk) for zk in z])
        self._cache[key] = (z, zp)
        return z, zp

    def sqrt_zp(self, X: float) -> np.ndarray:
        z, zp = self.preimages(X)
        return np.array([sqrt_derivative(a, b) for a, b in zip(z, zp)])

    # ------------------------------------------------------------ mixing kernel
    def K(self, X: float) -> np.ndarray:
        z, _ = self.preimages(X)
        r = self.sqrt_zp(X)
        n = self.n
        K = np.zeros((n, n), dtype=complex)
        for k in range(n):
            for j in range(n):
                if k != j:
                    K[k, j] = TWO_PI * r[k] * r[j] / (z[k] - z[j])
        return K

    def K_real(self, X: float) -> np.ndarray:
        K = self.K(X)
        if np.max(np.abs(K.imag), initial=0.0) > 1e-9 * max(1.0, np.max(np.abs(K))):
            raise ValueError("mixing kernel is not real")
        return K.real

    # ------------------------------------------------------------ O(X)
    def _rhs(self, s: float, O: np.ndarray, side: str) -> np.ndarray:
        X = math.exp(s)
        G = -(X / TWO_PI) * self.K_real(X)
        return O @ G if side == "right" else G @ O

    def _rk4(self, X: float, steps: int, side: str) -> np.ndarray:
        s0, s1 = math.log(self.X0), math.log(X)
        h = (s1 - s0) / steps
        O = np.eye(self.n)
        s = s0
        for _ in range(steps):
            k1 = self._rhs(s, O, side)
            k2 = self._rhs(s + h / 2, O + h / 2 * k1, side)
            k3 = self._rhs(s + h / 2, O + h / 2 * k2, side)
            k4 = self._rhs(s + h, O + h * k3, side)
            O = O + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
            s += h
        return O

    def prepare(self, lo: float, hi: float, rtol: float = 1e-12, side: str = "right") -> None:
        """Integrate once over [lo, hi] (DOP853 with dense output); O() then interpolates there."""
        s0 = math.log(self.X0)
        a, b = min(math.log(lo), s0), max(math.log(hi), s0)
        n = self.n

        def f(s, y):
            return self._rhs(s, y.reshape(n, n), side).ravel()

        sols = []
        for end in (a, b):
            if end != s0:
                sols.append(solve_ivp(f, (s0, end), np.eye(n).ravel(), method="DOP853",
                                      rtol=rtol, atol=rtol * 1e-2, dense_output=True).sol)
        self._cache[("dense", side)] = (a, b, s0, sols)

    def _dense(self, X: float, side: str) -> np.ndarray | None:
        entry = self._cache.get(("dense", side))
        if entry is None:
            return None
        a, b, s0, sols = entry
        s = math.log(X)
        if not a <= s <= b:
            return None
        for sol in sols:
            if min(sol.t_min, sol.t_max) <= s <= max(sol.t_min, sol.t_max):
                return sol(s).reshape(self.n, self.n)
        return None

    def O(self, X: float, tol: float = 1e-10, side: str = "right", max_halvings: int = 14) -> np.ndarray:
        """Anti-path-ordered exponential from X0 to X (``side="left"`` gives the path-ordered one)."""
        key = ("O", float(X), tol, side)
        if key in self._cache:
            return self._cache[key]
        if X == self.X0:
            return np.eye(self.n)
        dense = self._dense(X, side)
        if dense is not None:
            return dense
        span = abs(math.log(X / self.X0))
        steps = max(4, int(math.ceil(16 * span)))
        prev = self._rk4(X, steps, side)
        for _ in range(max_halvings):
            steps *= 2
            cur = self._rk4(X, steps, side)
            change = np.max(np.abs(cur - prev))
            defect = orthogonality_defect(cur)
            if change <= tol and defect <= 1e-8:
                self._cache[key] = cur
                return cur
            prev = cur
        raise IntegrationError(f"O({X}) did not converge (change {change:.2e}, defect {defect:.2e})")

    def cocycle(self, t: float, X: float, **kw) -> np.ndarray:
        """O(t, X) = O(X)^T O(exp(-2 pi t) X)."""
        return self.O(X, **kw).T @ self.O(math.exp(-TWO_PI * t) * X, **kw)

    def generator_residual(self, t: float, X: float, h: float = 1e-5, **kw) -> float:
        """|d/dt O(t,X) - O(t,X) Y K(Y)|, Y = exp(-2 pi t) X, by central differences.

        The factor Y is the Jacobian of X -> exp(-2 pi t) X; without it the
        t-derivative of the coboundary is not reproduced.
        """
        d = (self.cocycle(t + h, X, **kw) - self.cocycle(t - h, X, **kw)) / (2 * h)
        Y = math.exp(-TWO_PI * t) * X
        return float(np.max(np.abs(d - self.cocycle(t, X, **kw) @ (Y * self.K_real(Y)))))

    # ------------------------------------------------------------ symmetric closed form
    def _require_symmetric(self):
        if not self.family.symmetric:
            raise ValueError("closed forms need a symmetric family")

    def branch_signs(self, X: float) -> np.ndarray:
        """s_k = sqrt(z_k)/(w^(k/2) sqrt(z_n)) in {+1, -1}, w^(k/2) = exp(i pi k/n).

        K(X) built with principal roots equals S K_const S up to the factor
        dz/z, where S = diag(s).
        """
        self._require_symmetric()
        z, _ = self.preimages(X)
        n = self.n
        s = np.array([csqrt(z[k]) / (cmath.exp(1j * math.pi * (k + 1) / n) * csqrt(z[-1])) for k in range(n)])
        if np.max(np.abs(np.abs(s.real) - 1)) > 1e-9 or np.max(np.abs(s.imag)) > 1e-9:
            raise PreimageError("preimages are not related by powers of w")
        return np.sign(s.real)

    def closed_form_O(self, X: float, base_at_one: bool = False) -> np.ndarray:
        """S (z/z0)^K S with z = z_n(X); z0 = z_n(X0), or 1 if ``base_at_one``."""
        self._require_symmetric()
        S = np.diag(self.branch_signs(X))
        z = self.preimages(X)[0][-1]
        z0 = 1.0 if base_at_one else self.preimages(self.X0)[0][-1]
        P = S @ power_of_K(self.n, z / z0) @ S
        if np.max(np.abs(P.imag)) > 1e-9:
            raise ValueError("closed form is not real")
        return P.real

    def sqrt_Zprime(self, X: float) -> complex:
        """sqrt(n) z^((n-1)/2) sqrt(z_n') for Z = z_n^n; one branch of sqrt(dZ/dX)."""
        z = self.preimages(X)[0][-1]
        r = self.sqrt_zp(X)[-1]
        return math.sqrt(self.n) * cmath.exp(0.5j * (self.n - 1) * cmath.phase(z)) * r

    def rotated_chi(self, X: float) -> list[FieldPoint]:
        """(1/sqrt n) sum_j (B S)_kj chi_j(X), with chi built from the closed form based at z = 1."""
        B, _ = B_and_M(self.n)
        S = np.diag(self.branch_signs(X))
        chi = self.chi_coefficients(X, self.closed_form_O(X, base_at_one=True))
        L = B @ S / math.sqrt(self.n)
        return [FieldPoint(tuple((L[k, j] * c, sp, pos) for j in range(self.n) for c, sp, pos in chi[j].terms))
                for k in range(self.n)]

    # ------------------------------------------------------------ chi fields
    def chi_coefficients(self, X: float, O: np.ndarray | None = None) -> list[FieldPoint]:
        """chi_k(X) = sum_j O_kj(X) sqrt(z_j') psi_hat(z_j(X))."""
        z, _ = self.preimages(X)
        r = self.sqrt_zp(X)
        O = self.O(X) if O is None else O
        return [FieldPoint(tuple((O[k, j] * r[j], 1, z[j]) for j in range(self.n))) for k in range(self.n)]


def orthogonality_defect(O: np.ndarray) -> float:
    return float(np.max(np.abs(O.T @ O - np.eye(O.shape[0]))))


# ------------------------------------------------------------ symmetric case

def symmetric_K(n: int) -> np.ndarray:
    """K_kj = -w^((k+j)/2)/(w^k - w^j), w^((k+j)/2) = exp(i pi (k+j)/n)."""
    w = omega(n)
    K = np.zeros((n, n), dtype=complex)
    for k in range(1, n + 1):
        for j in range(1, n + 1):
            if k != j:
                K[k - 1, j - 1] = -cmath.exp(1j * math.pi * (k + j) / n) / (w ** k - w ** j)
    return K


def B_and_M(n: int) -> tuple[np.ndarray, np.ndarray]:
    """B_kj = w^((1/2 - k) j) and M = diag((n+1)/2 - k); B K = M B."""
    B = np.array([[cmath.exp(2j * math.pi * (0.5 - k) * j / n) for j in range(1, n + 1)]
                  for k in range(1, n + 1)])
    M = np.diag([(n + 1) / 2 - k for k in range(1, n + 1)]).astype(complex)
    return B, M


def power_of_K(n: int, z: complex) -> np.ndarray:
    """z^K = exp(K log z) via the diagonalization B K B^{-1} = M, principal log."""
    B, M = B_and_M(n)
    lz = cmath.log(z)
    D = np.diag(np.exp(np.diag(M) * lz))
    return np.linalg.solve(B, D @ B)


def single_interval_flow(t: float, x: float) -> tuple[float, float]:
    """Modular flow of R_+ : psi(x) -> exp(-pi t) psi(exp(-2 pi t) x); returns (point, weight)."""
    if x <= 0:
        raise ValueError("x must be positive")
    return math.exp(-TWO_PI * t) * x, math.exp(-math.pi * t)


# ------------------------------------------------------------ chi correlators

def chi_two_point(geom: ModularGeometry, X: float, Y: float, O=None) -> np.ndarray:
    """Matrix omega(chi_k(X) chi_l(Y)) in the vacuum (kernel 1/(z - w))."""
    from .wick import NS_VACUUM, two_point
    a = geom.chi_coefficients(X, None if O is None else O(X))
    b = geom.chi_coefficients(Y, None if O is None else O(Y))
    return np.array([[two_point(NS_VACUUM, p, q) for q in b] for p in a])


def covariance_residual(geom: ModularGeometry, X: float, Y: float, t: float) -> float:
    """|omega(chi(X) chi(Y)) - l omega(chi(lX) chi(lY))|, l = exp(-2 pi t).

    This is the two-point form of sigma_t(chi_k(X)) = exp(-pi t) chi_k(exp(-2 pi t) X).
    """
    lam = math.exp(-TWO_PI * t)
    A = chi_two_point(geom, X, Y)
    B = lam * chi_two_point(geom, lam * X, lam * Y)
    return float(np.max(np.abs(A - B)))


def diagonalization_residual(geom: ModularGeometry, X: float, Y: float) -> float:
    """Rotated chi pair correlators against sqrt(Z'(X) W'(Y)) omega(phi^(k)(Z) phi^(l)(W)).

    The n-field kernel pairs species k with n+1-k: delta_{k+l,n+1}/(Z - W).
    Relative error.
    """
    from .wick import NS_VACUUM, two_point
    n = geom.n
    a, b = geom.rotated_chi(X), geom.rotated_chi(Y)
    za = geom.preimages(X)[0][-1] ** n
    zb = geom.preimages(Y)[0][-1] ** n
    pref = geom.sqrt_Zprime(X) * geom.sqrt_Zprime(Y)
    worst = 0.0
    for k in range(n):
        for l in range(n):
            got = two_point(NS_VACUUM, a[k], b[l])
            want = pref / (za - zb) if k + l == n - 1 else 0.0
            worst = max(worst, abs(got - want) / abs(pref / (za - zb)))
    return worst
