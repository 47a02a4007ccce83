"""Truncated Fock representations of the CAR algebra.

Positive modes m (0 < m <= cutoff) of each field are independent fermions
with a Jordan-Wigner sign string.  For ``n_fields`` = n the annihilator
phi^(k)_m (m > 0) is the fermion c_(k,m) and phi^(k)_{-m} = c_(n+1-k,m)^dagger.
In the Ramond sector the zero mode is psi_0 = (c_0 + c_0^dagger)/sqrt(2) on an
extra qubit, so 2 psi_0^2 = 1 and the sign strings run over it.

Truncated operator identities are only exact on the *safe window*, the span
of basis states whose energy (sum of occupied |m|) is small enough that no
intermediate state leaves the truncated space; see :meth:`FockSpace.window`.
"""
from __future__ import annotations

import math
from functools import cached_property

import numpy as np
import scipy.sparse as sp

from .core import HalfInt, ModeIndex, Sector
from .poly import ModePolynomial

DEFAULT_MAX_DIM = 2 ** 22


class FockResourceError(RuntimeError):
    pass


class OutOfCutoffError(KeyError):
    pass


def _popcount(a: np.ndarray) -> np.ndarray:
    a = a.astype(np.uint64)
    c = np.zeros(a.shape, dtype=np.int64)
    while np.any(a):
        c += (a & np.uint64(1)).astype(np.int64)
        a = a >> np.uint64(1)
    return c


class FockSpace:
    def __init__(self, sector: Sector | str, cutoff, n_fields: int = 1, max_dim: int = DEFAULT_MAX_DIM):
        self.sector = Sector(sector) if isinstance(sector, str) else sector
        self.cutoff = HalfInt.of(cutoff)
        self.n_fields = n_fields
        if self.sector is Sector.RAMOND and n_fields != 1:
            raise ValueError("the Ramond space is built for a single real field")
        if self.sector is Sector.NS:
            if not self.cutoff.is_half_odd or self.cutoff.twice < 1:
                raise ValueError("NS cutoff must be a half-odd integer >= 1/2")
            self.positive = [HalfInt(t) for t in range(1, self.cutoff.twice + 1, 2)]
        else:
            if not self.cutoff.is_integer or self.cutoff.twice < 0:
                raise ValueError("Ramond cutoff must be a non-negative integer")
            self.positive = [HalfInt(t) for t in range(2, self.cutoff.twice + 1, 2)]

        # bit layout: Ramond zero-mode qubit first, then (field, m) ascending in m
        self._bit: dict[tuple[int, int], int] = {}
        bit = 0
        if self.sector is Sector.RAMOND:
            self._bit[(1, 0)] = 0
            bit = 1
        for m in self.positive:
            for k in range(1, n_fields + 1):
                self._bit[(k, m.twice)] = bit
                bit += 1
        self.n_bits = bit
        self.dim = 2 ** bit
        if self.dim > max_dim:
            raise FockResourceError(f"dimension 2^{bit} exceeds the limit {max_dim}")
        self._ops: dict[ModeIndex, sp.csr_matrix] = {}

    def __repr__(self):
        return f"FockSpace({self.sector.value}, cutoff={self.cutoff!r}, n_fields={self.n_fields}, dim={self.dim})"

    # ------------------------------------------------------------ basis
    @cached_property
    def _states(self) -> np.ndarray:
        return np.arange(self.dim, dtype=np.uint64)

    @cached_property
    def energies(self) -> np.ndarray:
        e = np.zeros(self.dim)
        s = self._states
        for (k, tw), b in self._bit.items():
            e += ((s >> np.uint64(b)) & np.uint64(1)).astype(float) * (tw / 2)
        return e

    @property
    def vacuum(self) -> np.ndarray:
        v = np.zeros(self.dim, dtype=complex)
        v[0] = 1.0
        return v

    def window(self, e_max: float) -> np.ndarray:
        """Indices of basis states with energy <= e_max."""
        return np.flatnonzero(self.energies <= e_max + 1e-9)

    def safe_energy(self, shift: float) -> float:
        """Highest window energy for identities whose intermediate states rise by at most ``shift``."""
        return float(self.cutoff) - shift

    def contains(self, a: ModeIndex) -> bool:
        if a.sector is not self.sector or not 1 <= a.field <= self.n_fields:
            return False
        return abs(a.value.twice) <= self.cutoff.twice

    # ------------------------------------------------------------ operators
    def _fermion(self, bit: int) -> sp.csr_matrix:
        """Jordan-Wigner annihilator on ``bit``."""
        s = self._states
        occupied = ((s >> np.uint64(bit)) & np.uint64(1)).astype(bool)
        src = s[occupied]
        below = src & np.uint64((1 << bit) - 1)
        sign = 1.0 - 2.0 * (_popcount(below) % 2)
        dst = src ^ np.uint64(1 << bit)
        return sp.csr_matrix((sign.astype(complex), (dst.astype(np.int64), src.astype(np.int64))),
                             shape=(self.dim, self.dim))

    def op(self, a: ModeIndex) -> sp.csr_matrix:
        """Matrix of the mode operator a."""
        if a in self._ops:
            return self._ops[a]
        if not self.contains(a):
            raise OutOfCutoffError(f"{a!r} is outside {self!r}")
        tw = a.value.twice
        if tw == 0:
            c = self._fermion(self._bit[(1, 0)])
            m = ((c + c.getH()) / math.sqrt(2)).tocsr()
        elif tw > 0:
            m = self._fermion(self._bit[(a.field, tw)])
        else:
            m = self._fermion(self._bit[(self.n_fields + 1 - a.field, -tw)]).getH().tocsr()
        self._ops[a] = m
        return m

    def modes(self) -> list[ModeIndex]:
        out = []
        vals = sorted({tw for (_, tw) in self._bit} | {-tw for (_, tw) in self._bit})
        for tw in vals:
            for k in range(1, self.n_fields + 1):
                if tw == 0 and k != 1:
                    continue
                out.append(ModeIndex(HalfInt(tw), k, self.sector))
        return out

    def matrix(self, p: ModePolynomial) -> sp.csr_matrix:
        """Sparse matrix of a mode polynomial; products act right-to-left."""
        out = sp.csr_matrix((self.dim, self.dim), dtype=complex)
        eye = sp.identity(self.dim, dtype=complex, format="csr")
        for mono, c in p.terms.items():
            m = eye
            for a in mono:
                m = m @ self.op(a)
            out = out + c * m
        return out.tocsr()

    def apply(self, p: ModePolynomial, v: np.ndarray) -> np.ndarray:
        out = np.zeros(self.dim, dtype=complex)
        for mono, c in p.terms.items():
            w = v.astype(complex)
            for a in reversed(mono):
                w = self.op(a) @ w
            out += c * w
        return out

    def vacuum_expectation(self, p: ModePolynomial) -> complex:
        v = self.vacuum
        return complex(np.vdot(v, self.apply(p, v)))

    def annihilators(self) -> list[ModeIndex]:
        return [a for a in self.modes() if a.value.twice > 0]


def restricted(m: sp.spmatrix, cols: np.ndarray) -> sp.csc_matrix:
    """Columns of m on the window (images kept in the full space)."""
    return sp.csc_matrix(m)[:, cols]


def max_abs(m) -> float:
    if sp.issparse(m):
        return float(abs(m).max()) if m.nnz else 0.0
    return float(np.max(np.abs(m))) if np.size(m) else 0.0


def window_residual(a: sp.spmatrix, b, cols: np.ndarray) -> float:
    """max |(a - b) v| entry over window basis vectors; b may be a scalar (times identity)."""
    if np.isscalar(b):
        b = b * sp.identity(a.shape[0], dtype=complex, format="csr")
    return max_abs(restricted(a - b, cols))


def build_space(sector, cutoff, n_fields: int = 1, max_dim: int = DEFAULT_MAX_DIM) -> FockSpace:
    return FockSpace(sector, cutoff, n_fields=n_fields, max_dim=max_dim)
