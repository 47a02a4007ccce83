"""Named verification suites: each returns a list of CheckRecord."""
from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath
import numpy as np

from . import modular as mod
from . import symgen as sg
from .core import HalfInt, ModeIndex, Sector
from .fock import FockResourceError, FockSpace
from .modular import IntegrationError
from .isomap import beta_field, beta_field_mp, beta_mode, beta_mode_inverse
from .wick import FieldPoint, KernelKind, QuasifreeKernel, npoint, npoint_generic


@dataclass(frozen=True)
class CheckRecord:
    check_id: str
    anchor: str
    value: float
    expected: float
    tol: float
    note: str = ""
    resource_error: str = ""

    @property
    def error(self) -> float:
        return abs(self.value - self.expected)

    @property
    def passed(self) -> bool:
        return not self.resource_error and bool(np.isfinite(self.value)) and self.error <= self.tol

    @property
    def status(self) -> str:
        if self.resource_error:
            return "error"
        return "pass" if self.passed else "fail"

    def as_dict(self) -> dict:
        return {"check_id": self.check_id, "anchor": self.anchor, "value": float(self.value),
                "expected": float(self.expected), "tol": float(self.tol), "passed": self.passed,
                "status": self.status, "note": self.resource_error or self.note}


class _Guard:
    """Builds records, turning resource failures of one check into an 'error' record."""

    def __init__(self, tols: dict | None = None):
        self.tols = tols or {}
        self.records: list[CheckRecord] = []

    def tol(self, key: str, default: float) -> float:
        return float(self.tols.get(key, self.tols.get("*", default)))

    def __call__(self, check_id, anchor, fn, expected, tol, note="", tol_key=None):
        tol = self.tol(tol_key, tol) if tol_key else tol
        try:
            value = float(fn())
            rec = CheckRecord(check_id, anchor, value, float(expected), tol, note)
        except (FockResourceError, MemoryError, IntegrationError) as exc:
            rec = CheckRecord(check_id, anchor, float("nan"), float(expected), tol, note,
                              f"{type(exc).__name__}: {exc}")
        self.records.append(rec)
        return rec


# ------------------------------------------------------------ isomorphism

def iso_car(n: int, cutoff=Fraction(11, 2)) -> float:
    """max entry of {beta(a), beta(b)} - {a, b} over n-field modes whose images fit the cutoff."""
    fs = FockSpace(Sector.NS, cutoff)
    modes = []
    for k in range(1, n + 1):
        for t in range(-4 * int(cutoff) - 1, 4 * int(cutoff) + 2, 2):
            img = beta_mode(n, k, HalfInt(t))
            if fs.contains(img):
                modes.append((k, HalfInt(t), fs.op(img)))
    worst = 0.0
    for (k, nu, A), (l, mu, B) in itertools.combinations_with_replacement(modes, 2):
        want = 1.0 if (k + l == n + 1 and nu.twice + mu.twice == 0) else 0.0
        D = (A @ B + B @ A).toarray() - want * np.eye(fs.dim)
        worst = max(worst, float(np.max(np.abs(D))))
    return worst


def iso_bijection(n: int, span: int = 12) -> int:
    """Number of half-odd m in [-span, span] with beta_mode(beta_mode_inverse(m)) != m."""
    bad = 0
    for t in range(-2 * span + 1, 2 * span, 2):
        k, nu = beta_mode_inverse(n, HalfInt(t))
        if beta_mode(n, k, nu).value.twice != t:
            bad += 1
    return bad


def iso_vacuum(n: int, points: int, samples: int, rng: np.random.Generator, dps: int | None = 30) -> float:
    """Max relative error between n-field correlators and those of their beta images.

    Uniform random points produce near-coincidences whose correlators are
    small differences of large terms, so double precision alone cannot resolve
    a 1e-9 relative error; with ``dps`` both sides (roots included) are
    evaluated in mpmath at that many digits.  ``dps=None`` uses float64.
    """
    K_n = QuasifreeKernel(KernelKind.NS_VACUUM, n_fields=n)
    K_1 = QuasifreeKernel(KernelKind.NS_VACUUM, n_fields=1)
    worst = 0.0
    half = points // 2
    ctx = mpmath.mp.clone() if dps else None
    if ctx:
        ctx.dps = dps
    for _ in range(samples):
        ks = list(rng.integers(1, n + 1, size=half))
        species = ks + [n + 1 - k for k in ks]
        rng.shuffle(species)
        th = rng.uniform(-math.pi, math.pi, size=points)
        if ctx is None:
            zs = np.exp(1j * th)
            lhs = npoint(K_n, [FieldPoint.single(z, int(k)) for z, k in zip(zs, species)])
            rhs = npoint(K_1, [beta_field(n, int(k), z) for z, k in zip(zs, species)])
        else:
            lhs = npoint_generic(K_n, [FieldPoint(((1, int(k), ctx.expj(ctx.mpf(t))),)) for t, k in zip(th, species)])
            rhs = npoint_generic(K_1, [beta_field_mp(n, int(k), t, ctx) for t, k in zip(th, species)])
        scale = max(abs(lhs), abs(rhs))
        if scale > 0:
            worst = max(worst, float(abs(lhs - rhs) / scale))
    return worst


def suite_isomorphism(ns=(2, 3), cutoff=Fraction(11, 2), samples: int = 200, seed: int = 0,
                      tols: dict | None = None) -> list[CheckRecord]:
    rng = np.random.default_rng(seed)
    g = _Guard(tols)
    for n in ns:
        g(f"iso.car.n{n}", "vacuum-preserving isomorphism: CAR", lambda: iso_car(n, cutoff), 0.0, 1e-13,
          f"NS cutoff {cutoff}", "car")
        g(f"iso.bijection.n{n}", "mode map is a bijection", lambda: iso_bijection(n), 0.0, 0.0)
        for p in (2, 4, 6):
            g(f"iso.vacuum.n{n}.{p}pt", "vacuum preservation", lambda: iso_vacuum(n, p, samples, rng), 0.0, 1e-9,
              f"{samples} random tuples, 30-digit arithmetic", "vacuum")
    return g.records


# ------------------------------------------------------------ symmetries

def current_ccr(cutoff=Fraction(15, 2), rng=range(-2, 3)) -> float:
    fs = sg.real_space(cutoff)
    cur = {m: sg.embedded_current_for(m, cutoff) for m in rng}
    worst = 0.0
    for m in rng:
        for n in rng:
            C = sg.ModePolynomial.identity(float(m) if m + n == 0 else 0.0)
            # [A, A] vanishes identically, so the full space may be used when the window is empty
            cols = np.arange(fs.dim) if m == n else None
            worst = max(worst, sg.commutator_residual(fs, cur[m], cur[n], C, cols))
    return worst


def virasoro_bracket(fs: FockSpace, build, c: float, rng=range(-2, 3)) -> float:
    worst = 0.0
    for m in rng:
        for n in rng:
            C = (m - n) * build(m + n)
            if m + n == 0:
                C = C + c / 12 * m * (m * m - 1)
            cols = np.arange(fs.dim) if m == n else None
            worst = max(worst, sg.commutator_residual(fs, build(m), build(n), C, cols))
    return worst


def suite_symmetries(cutoff=Fraction(15, 2), gauge_cutoff=Fraction(19, 2), tols: dict | None = None,
                     complex_checks: bool = True) -> list[CheckRecord]:
    g = _Guard(tols)
    g("sym.current.ccr", "current CCR", lambda: current_ccr(cutoff), 0.0, 1e-10, "", "ccr")
    g("sym.current.normalization", "smearing normalization j(f) = oint f j dz/(2 pi i)",
      lambda: sg.current_normalization()["residual"], 0.0, 1e-12, "[j_0, phi_a] = -phi_a")
    fr = sg.real_space(cutoff)
    g("sym.virasoro.real.central", "central charge 1/2",
      lambda: sg.central_term(fr, sg.virasoro_real_mode(2, cutoff), sg.virasoro_real_mode(-2, cutoff)).real,
      0.25, 1e-9, "<[L_2, L_-2]>", "central")
    g("sym.virasoro.real.bracket", "Virasoro algebra, c = 1/2",
      lambda: virasoro_bracket(fr, lambda k: sg.virasoro_real_mode(k, cutoff), 0.5), 0.0, 1e-10, "", "bracket")
    rcut = int(cutoff + Fraction(1, 2))
    g("sym.virasoro.ramond.bracket", "Ramond Virasoro algebra, c = 1/2, h = 1/16",
      lambda: virasoro_bracket(sg.real_space(rcut, Sector.RAMOND),
                               lambda k: sg.virasoro_real_mode(k, rcut, Sector.RAMOND), 0.5),
      0.0, 1e-10, f"Ramond cutoff {rcut}", "bracket")
    if complex_checks:
        fc = _lazy_complex(cutoff)
        g("sym.virasoro.complex.central", "central charge 1",
          lambda: sg.central_term(fc(), sg.virasoro_complex_mode(2, cutoff),
                                  sg.virasoro_complex_mode(-2, cutoff)).real, 0.5, 1e-9, "<[L_2, L_-2]>", "central")
        g("sym.virasoro.complex.bracket", "Virasoro algebra, c = 1",
          lambda: virasoro_bracket(fc(), lambda k: sg.virasoro_complex_mode(k, cutoff), 1.0, range(-1, 2)),
          0.0, 1e-10, "m, n in -1..1", "bracket")
        g("sym.sugawara.central", "Sugawara central charge 1", lambda: sg.sugawara_central(fc()).real,
          0.5, 1e-9, "", "central")
        g("sym.sugawara.equals_complex", "Sugawara form of the complex stress tensor",
          lambda: max(sg.sugawara_vs_complex(n, fc()) for n in range(-2, 3)), 0.0, 1e-10, "", "identity")
        g("sym.sugawara.rho", "charged automorphism on L_0",
          lambda: sg.sugawara_vs_complex(0, fc(), Fraction(1, 4)), 0.0, 1e-10, "q = 1/4", "identity")
        for name, coeffs in (("odd", {0: 1.0, -2: 1.0}), ("even", {1: 1.0, -1: 1.0})):
            g(f"sym.embedded_real.action.{name}", "embedded real diffeomorphisms on the complex field",
              lambda: sg.embedded_real_on_complex(coeffs, fs=fc()), 0.0, 1e-8,
              "f(z) = " + " + ".join(f"{c:g} z^{m + 1}" for m, c in coeffs.items()), "diffeo")
        g("sym.embedded_real.field", "embedded real stress tensor with the +2 z^2 T sign",
          lambda: max(sg.embedded_real_identity(N, fs=fc()) for N in range(-3, 4)), 0.0, 1e-10, "", "identity")
    g("sym.stress_modes", "mode relation beta(L_n) = -j_n/4 + L_2n/2",
      lambda: max(sg.stress_mode_identity(n, cutoff) for n in range(-2, 3)), 0.0, 1e-10, "n = -2..2", "stress_modes")
    rho = [sg.stress_mode_rho_identity(n, cutoff) for n in range(-2, 3)]
    g("sym.stress_modes.rho.operator", "charge-1/4 mode relation, operator part",
      lambda: max(r for r, _ in rho), 0.0, 1e-10, "n = -2..2", "stress_modes")
    g("sym.stress_modes.rho.shift", "charge-1/4 mode relation, constant at n = 0", lambda: rho[2][1], 1 / 32, 1e-10,
      "", "stress_modes")
    g("sym.stress_modes.rho.shift_off", "charge-1/4 mode relation, constant at n != 0",
      lambda: max(abs(c) for i, (_, c) in enumerate(rho) if i != 2), 0.0, 1e-10, "", "stress_modes")
    z = cmath.exp(0.7j)
    g("sym.gauge.quarter_turn", "gauge mixing, theta = pi/2",
      lambda: sg.gauge_mixing(math.pi / 2, z, gauge_cutoff), 0.0, 1e-6, f"cutoff {gauge_cutoff}", "gauge")
    g("sym.gauge.generic", "gauge mixing, theta = 0.3",
      lambda: sg.gauge_mixing(0.3, z, gauge_cutoff), 0.0, 1e-6, f"cutoff {gauge_cutoff}", "gauge")
    g("sym.gauge.infinitesimal", "gauge mixing, derivative at theta = 0",
      lambda: sg.gauge_mixing_infinitesimal(z, cutoff), 0.0, 1e-9, "", "gauge_inf")
    g("sym.diffeo.modes", "embedded complex diffeomorphisms on psi (modes)",
      lambda: max(sg.embedded_diffeo_action(m, cutoff) for m in (-1, 0, 1)), 0.0, 1e-8, "m = -1, 0, 1", "diffeo")
    g("sym.diffeo.field", "embedded complex diffeomorphisms on psi (field)",
      lambda: max(sg.embedded_diffeo_field(m, z, cutoff) for m in (-1, 0, 1)), 0.0, 1e-8, "m = -1, 0, 1", "diffeo")
    return g.records


def _lazy_complex(cutoff):
    box = []

    def get():
        if not box:
            box.append(sg.complex_space(cutoff))
        return box[0]
    return get


# ------------------------------------------------------------ modular

def lemma_residuals(n: int) -> tuple[float, float]:
    K = mod.symmetric_K(n)
    B, M = mod.B_and_M(n)
    comm = float(np.max(np.abs(B @ K - M @ B)))
    ev = np.sort(np.linalg.eigvals(K).real)
    want = np.array([(1 - n) / 2 + j for j in range(n)])
    return comm, float(np.max(np.abs(ev - want)))


def ode_vs_closed(geom: mod.ModularGeometry, points: int = 11) -> float:
    X0 = geom.X0
    return max(float(np.max(np.abs(geom.O(X) - geom.closed_form_O(X))))
               for X in X0 * np.logspace(-0.5, 0.5, points))


def cocycle_residual(geom: mod.ModularGeometry, samples: int, rng: np.random.Generator) -> float:
    """max |O(t+s, X) - O(t, X) O(s, exp(-2 pi t) X)| over random (t, s, X)."""
    worst = 0.0
    X0 = geom.X0
    for _ in range(samples):
        t, s = rng.uniform(-0.08, 0.08, size=2)
        X = X0 * 10 ** rng.uniform(-0.5, 0.5)
        lhs = geom.cocycle(t + s, X)
        rhs = geom.cocycle(t, X) @ geom.cocycle(s, math.exp(-mod.TWO_PI * t) * X)
        worst = max(worst, float(np.max(np.abs(lhs - rhs))))
    return worst


def default_families(ns) -> list[mod.IntervalFamily]:
    roots = {2: (0.3, 2.0), 3: (-0.9, 1.4), 4: (0.2, 1.5)}
    return [mod.IntervalFamily.symmetric_family(n, *roots.get(n, (0.2, 1.5))) for n in ns]


def suite_modular(ns=(2, 3), families=None, samples: int = 100, seed: int = 0,
                  tols: dict | None = None) -> list[CheckRecord]:
    rng = np.random.default_rng(seed)
    g = _Guard(tols)
    lem = [lemma_residuals(n) for n in range(1, 9)]
    g("mod.lemma.intertwiner", "mixing matrix diagonalization BK = MB", lambda: max(a for a, _ in lem),
      0.0, 1e-12, "n = 1..8", "lemma")
    g("mod.lemma.spectrum", "integer-spaced spectrum of K", lambda: max(b for _, b in lem),
      0.0, 1e-10, "n = 1..8", "spectrum")
    fams = list(families) if families else default_families(ns)
    for fam in fams:
        geo = mod.ModularGeometry(fam)
        geo.prepare(geo.X0 * 10 ** -0.7, geo.X0 * 10 ** 1.2)
        tag = f"n{fam.n}" + ("" if fam.symmetric else ".general")
        X0 = geo.X0
        Xs = X0 * np.logspace(-0.5, 0.5, 7)
        g(f"mod.{tag}.orthogonality", "O(X) is orthogonal",
          lambda: max(mod.orthogonality_defect(geo.O(X)) for X in Xs), 0.0, 1e-8, "", "orth")
        g(f"mod.{tag}.cocycle", "cocycle identity", lambda: cocycle_residual(geo, samples, rng),
          0.0, 1e-7, f"{samples} random (t, s, X)", "cocycle")
        g(f"mod.{tag}.generator", "t-derivative of the coboundary",
          lambda: max(geo.generator_residual(tt, X) for tt, X in ((0.05, X0), (-0.03, 2 * X0))),
          0.0, 1e-7, "central differences", "generator")
        g(f"mod.{tag}.covariance", "modular covariance of chi two-point functions",
          lambda: max(mod.covariance_residual(geo, a * X0, b * X0, tt)
                      for a, b, tt in ((0.7, 2.1, 0.13), (3.0, 0.4, -0.2), (1.3, 0.5, 0.05))),
          0.0, 1e-8, "", "covariance")
        if fam.symmetric:
            g(f"mod.{tag}.closed_form", "ODE solution against z^K", lambda: ode_vs_closed(geo),
              0.0, 1e-6, "X over one decade", "closed")
            g(f"mod.{tag}.diagonalization", "B-rotated chi are the n complex-fermion components",
              lambda: max(mod.diagonalization_residual(geo, a * X0, b * X0) for a, b in ((0.7, 2.1), (5.0, 0.2), (1.5, 1.1))),
              0.0, 1e-8, "relative", "diagonal")
    return g.records


def trajectory(geom: mod.ModularGeometry, points: int = 25) -> list[list[float]]:
    """Rows X, O_11, O_12, ... over one decade around the base point."""
    rows = []
    for X in geom.X0 * np.logspace(-0.5, 0.5, points):
        rows.append([float(X)] + [float(v) for v in geom.O(float(X)).ravel()])
    return rows


# ------------------------------------------------------------ Ramond

def ramond_convergence(cutoffs) -> list[dict]:
    return [sg.ramond_L0_expectation(M) for M in cutoffs]


def is_monotone(errors, slack: float = 1e-15) -> bool:
    return all(b <= a + slack for a, b in zip(errors, errors[1:]))


def suite_ramond(cutoff: int = 10, samples: int = 50, seed: int = 0, tols: dict | None = None,
                 table: list | None = None) -> list[CheckRecord]:
    """``table``, if given, receives the convergence rows (cutoff, raw, correction, value, error)."""
    rng = np.random.default_rng(seed)
    g = _Guard(tols)
    zs = np.exp(1j * rng.uniform(-math.pi, math.pi, size=samples))
    g("ramond.current.one_point", "embedded current in the Ramond state",
      lambda: max(abs(sg.ramond_one_point(z)) for z in zs), 0.0, 1e-10, f"{samples} points", "one_point")
    pairs = np.exp(1j * rng.uniform(-math.pi, math.pi, size=(samples, 2)))
    g("ramond.current.two_point", "twisted two-point function",
      lambda: max(abs(sg.ramond_two_point(z, w) - sg.twisted_two_point(z, w)) / abs(sg.twisted_two_point(z, w))
                  for z, w in pairs), 0.0, 1e-8, f"{samples} pairs, relative", "two_point")
    g("ramond.current.antiperiodic", "sign change under z -> -z",
      lambda: max(abs(sg.ramond_two_point(-z, w) + sg.ramond_two_point(z, w)) for z, w in pairs[:10]),
      0.0, 1e-12)
    g("ramond.sugawara.operator", "twisted Sugawara against the Ramond Virasoro modes",
      lambda: max(sg.ramond_sugawara_identity(n, 8)[0] for n in (-1, 0, 1)), 0.0, 1e-10, "Ramond cutoff 8",
      "identity")
    cut = int(cutoff)
    traj = ramond_convergence(range(6, cut + 1)) if cut >= 6 else ramond_convergence([cut])
    errs = [abs(r["value"] - 1 / 16) for r in traj]
    mono = is_monotone(errs)
    if table is not None:
        table.extend([r["cutoff"], r["raw"], r["correction"], r["value"], e] for r, e in zip(traj, errs))
    final = traj[-1]
    g("ramond.L0", "Ramond ground energy of the embedded current, 1/16", lambda: final["value"], 1 / 16, 1e-3,
      f"cutoff {cut}; raw {final['raw']:.6g}; " + ("monotone" if mono else "NOT monotone")
      + f" in cutoff {traj[0]['cutoff']}..{cut}", "L0")
    g("ramond.L0.monotone", "convergence in cutoff is monotone", lambda: float(not mono), 0.0, 0.0,
      "errors " + ", ".join(f"{e:.3e}" for e in errs))
    g("ramond.ns_analogue", "NS vacuum value of the embedded Sugawara L_0", _ns_sugawara_vacuum, 0.0, 1e-12)
    return g.records


def _ns_sugawara_vacuum() -> float:
    fs = sg.real_space(Fraction(15, 2))
    L0 = sg.sugawara_mode(0, 7)
    cur = sg.current_matrices(fs, L0.modes(), "embedded")
    return complex(L0.act(cur, fs.dim, [0]).toarray()[0, 0]).real


SUITES = ("isomorphism", "symmetries", "modular", "ramond")
