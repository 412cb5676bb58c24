"""Discrete Lagrangian systems on the Virasoro group.

A right-invariant Lagrangian is generated by ``H(x) = L(x, e)`` through
``L(x, y) = H(x y^{-1})``. Here

    H((f, F)) = F^2 + int V(f(x) - x, f'(x)) dx        (general densities)
    H((f, F)) = F^2 + int V(f'(x)) dx                  (derivative-only densities)

The derivative-only family with ``V = sqrt`` is inverse-invariant, so the
Lagrangian is symmetric. Its Euler-Lagrange equations are stepped by
:func:`hs_step` (on Vir) and :func:`hs_simple_step` (on Diff(S^1)), and any
claimed solution is checked against :func:`stationarity_residual`.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import brentq

from .circle import (
    TWO_PI,
    CircleDiffeo,
    PeriodicFunction,
    compose,
    integrate,
    invert,
    random_diffeo,
    random_trig_poly,
    spectral_antiderivative,
    spectral_derivative,
)
from .errors import (
    GridMismatch,
    InvalidParams,
    NoBracket,
    PeriodicityDefect,
    ResonantODE,
    SignViolation,
)
from .virasoro import VirasoroElement, bott_cocycle, group_inverse, group_product, unit


@dataclass(frozen=True)
class LagrangianDensityV:
    """Density ``V`` defining ``H``.

    ``kind="general"`` means ``V(x1, x2)``, 2*pi-periodic in ``x1`` and
    subject to ``V_1(0, 1) = 0`` (checked on construction, by central
    differences when ``V1`` is not supplied). ``kind="hs"`` means ``V(x2)``.
    ``V`` must accept numpy arrays.
    """

    V: Callable
    kind: str = "hs"
    V1: Callable | None = None
    name: str = ""

    def __post_init__(self):
        if self.kind not in ("general", "hs"):
            raise ValueError(f"unknown density kind {self.kind!r}")
        if self.kind == "general":
            if self.V1 is not None:
                d1 = float(self.V1(0.0, 1.0))
            else:
                h = 1e-5
                d1 = float(self.V(h, 1.0) - self.V(-h, 1.0)) / (2 * h)
            if abs(d1) > 1e-6:
                raise InvalidParams(f"density violates V_1(0, 1) = 0 (got {d1:.3e})")

    def density(self, f: CircleDiffeo) -> np.ndarray:
        fp = f.slope().samples
        if self.kind == "hs":
            return np.asarray(self.V(fp), dtype=float) * np.ones_like(fp)
        return np.asarray(self.V(f.u.samples, fp), dtype=float) * np.ones_like(fp)

    @classmethod
    def sqrt(cls) -> "LagrangianDensityV":
        return cls(np.sqrt, "hs", name="sqrt")

    @classmethod
    def square(cls) -> "LagrangianDensityV":
        return cls(np.square, "hs", name="square")

    @classmethod
    def linear(cls) -> "LagrangianDensityV":
        return cls(lambda x: np.asarray(x, dtype=float), "hs", name="identity")


DENSITIES = {
    "sqrt": LagrangianDensityV.sqrt,
    "square": LagrangianDensityV.square,
    "identity": LagrangianDensityV.linear,
}


@dataclass(frozen=True, eq=False)
class DiscreteVelocityPair:
    omega: CircleDiffeo
    Omega: float


@dataclass(frozen=True, eq=False)
class DiffeoSequence:
    """Finite window of a trajectory ``x_0, ..., x_{K-1}`` on one grid."""

    elements: tuple

    def __post_init__(self):
        els = tuple(self.elements)
        if len(els) < 2:
            raise ValueError("a sequence needs at least two elements")
        if len({e.n for e in els}) != 1:
            raise GridMismatch("sequence elements live on different grids")
        object.__setattr__(self, "elements", els)

    def __len__(self):
        return len(self.elements)

    def __getitem__(self, i):
        return self.elements[i]

    def replace(self, k: int, x: VirasoroElement) -> "DiffeoSequence":
        els = list(self.elements)
        els[k] = x
        return DiffeoSequence(tuple(els))

    def reversed(self) -> "DiffeoSequence":
        return DiffeoSequence(self.elements[::-1])

    def to_json(self) -> list:
        return [e.to_json() for e in self.elements]


# ---------------------------------------------------------------------------
# H, L, S

def eval_H(Vd: LagrangianDensityV, x: VirasoroElement) -> float:
    return x.F**2 + integrate(PeriodicFunction(Vd.density(x.f)))


def lagrangian_from_H(Vd: LagrangianDensityV, x: VirasoroElement, y: VirasoroElement) -> float:
    """``L(x, y) = H(x y^{-1})``."""
    return eval_H(Vd, group_product(x, group_inverse(y)))


def action(Vd: LagrangianDensityV, seq: DiffeoSequence) -> float:
    return float(sum(lagrangian_from_H(Vd, a, b) for a, b in zip(seq[:-1], seq[1:])))


def discrete_velocity(seq: DiffeoSequence, l: int) -> DiscreteVelocityPair:
    """``(omega_l, Omega_l) = x_{l-1} o x_l^{-1}``."""
    if not 1 <= l < len(seq):
        raise IndexError(f"need 1 <= l < {len(seq)}, got {l}")
    w = group_product(seq[l - 1], group_inverse(seq[l]))
    return DiscreteVelocityPair(w.f, w.F)


@dataclass(frozen=True)
class InvarianceReport:
    """Outcome of :func:`check_inverse_invariance`."""

    h_defect: float
    cond_defect: float | None
    h_tol: float
    cond_tol: float
    trials: int
    defects: tuple = ()

    @property
    def invariant(self) -> bool:
        ok = self.h_defect < self.h_tol
        if self.cond_defect is not None:
            ok = ok and self.cond_defect < self.cond_tol
        return ok


def check_inverse_invariance(Vd: LagrangianDensityV, trials: int = 100, seed: int = 0,
                             n: int = 256, h_tol: float = 1e-7,
                             cond_tol: float = 1e-10) -> InvarianceReport:
    """Largest ``|H(x^{-1}) - H(x)|`` over seeded random elements.

    For derivative-only densities the condition ``x V(1/x) = V(x)`` is also
    checked on a grid of ``x`` in ``(0.2, 5)``.
    """
    rng = np.random.default_rng(seed)
    defects = []
    for _ in range(trials):
        x = VirasoroElement(random_diffeo(rng, n), rng.normal())
        defects.append(abs(eval_H(Vd, group_inverse(x)) - eval_H(Vd, x)))
    worst = max(defects)
    cond = None
    if Vd.kind == "hs":
        s = np.linspace(0.2, 5.0, 481)
        cond = float(np.max(np.abs(s * Vd.V(1.0 / s) - Vd.V(s))))
    return InvarianceReport(worst, cond, h_tol, cond_tol, trials, tuple(defects))


def stationarity_residual(Vd: LagrangianDensityV, seq: DiffeoSequence, k: int,
                          directions: int = 20, seed: int = 0, eps: float = 1e-5,
                          modes: int = 8) -> float:
    """Finite-difference first variation of the action at interior point ``k``.

    Perturbations ``u_k -> u_k + eps*du``, ``F_k -> F_k + eps*dF`` are drawn
    as seeded random trigonometric polynomials (plus one purely central
    direction), normalised to ``sqrt(mean(du^2) + dF^2) = 1``. The centred
    difference is divided by ``max(1, mean |L|)`` over the two Lagrangian
    terms that contain ``x_k``; the maximum over directions is returned.
    """
    K = len(seq)
    if not 1 <= k <= K - 2:
        raise IndexError(f"k must be interior, 1 <= k <= {K - 2}")
    prev, cur, nxt = seq[k - 1], seq[k], seq[k + 1]
    n = cur.n

    def local(x):
        return lagrangian_from_H(Vd, prev, x) + lagrangian_from_H(Vd, x, nxt)

    scale = max(1.0, 0.5 * (abs(lagrangian_from_H(Vd, prev, cur))
                            + abs(lagrangian_from_H(Vd, cur, nxt))))
    rng = np.random.default_rng(seed)
    dirs = [(np.zeros(n), 1.0)]
    for _ in range(directions):
        du = random_trig_poly(rng, n, modes, 1.0).samples
        dF = rng.uniform(-1.0, 1.0)
        norm = np.sqrt(np.mean(du**2) + dF**2)
        dirs.append((du / norm, dF / norm))
    worst = 0.0
    for du, dF in dirs:
        plus = VirasoroElement(CircleDiffeo(cur.f.u + eps * du), cur.F + eps * dF)
        minus = VirasoroElement(CircleDiffeo(cur.f.u - eps * du), cur.F - eps * dF)
        worst = max(worst, abs(local(plus) - local(minus)) / (2 * eps) / scale)
    return worst


def assemble_sequence(omegas: Sequence[CircleDiffeo], Omega,
                      start: VirasoroElement | None = None) -> DiffeoSequence:
    """Trajectory whose discrete velocities are ``(omegas[l-1], Omega_l)``.

    ``f_l = omega_l^{-1} o f_{l-1}`` and
    ``F_l = F_{l-1} + B(f_{l-1}, f_l^{-1}) - Omega_l``. ``Omega`` is a scalar
    or one value per velocity.
    """
    Om = np.broadcast_to(np.asarray(Omega, dtype=float), (len(omegas),))
    x = start if start is not None else unit(omegas[0].n)
    els = [x]
    for om, W in zip(omegas, Om):
        f = compose(invert(om), x.f)
        F = x.F + bott_cocycle(x.f, invert(f)) - W
        x = VirasoroElement(f, F)
        els.append(x)
    return DiffeoSequence(tuple(els))


# ---------------------------------------------------------------------------
# Hunter-Saxton discretisation on Vir

@dataclass(frozen=True)
class HSDiagnostics:
    C: float
    psi_min: float
    defect: float  # int Psi^{-2} dx - 2*pi
    monodromy: float  # mu(2*pi)
    mode: str


def _phi_coefficients(omega_k: CircleDiffeo):
    wp = omega_k.slope().samples
    root = np.sqrt(wp)
    dlog_phi = -0.5 * spectral_derivative(np.log(wp))
    return root, dlog_phi


def resonant_C(omega_k: CircleDiffeo) -> float:
    """The ``C`` at which the monodromy ``mu(2*pi)`` equals 1."""
    return -float(np.mean(np.sqrt(omega_k.slope().samples)))


def solve_psi(omega_k: CircleDiffeo, Omega: float, C: float) -> tuple[PeriodicFunction, float]:
    """Periodic solution of ``Psi' + p Psi = q``.

    ``p = C/(8 Omega) + 1/(8 Omega Phi) - Phi'/Phi`` with
    ``Phi = (omega_k')^{-1/2}`` and ``q = -1/(8 Omega)``. Splitting
    ``p = pbar + P'`` with ``P`` periodic, the periodic part of the
    integrating factor ``exp(P)`` reduces the equation to
    ``w' + pbar w = exp(P) q`` for ``w = exp(P) Psi``, which is solved mode
    by mode. Returns ``(Psi, mu(2*pi))``.

    Raises
    ------
    ResonantODE
        If ``mu(2*pi) = exp(2*pi*pbar)`` is within 1e-12 of 1.
    """
    if Omega == 0:
        raise ValueError("Omega must be nonzero")
    n = omega_k.n
    root, dlog_phi = _phi_coefficients(omega_k)
    p = C / (8 * Omega) + root / (8 * Omega) - dlog_phi
    pbar = float(np.mean(p))
    mono = float(np.exp(TWO_PI * pbar))
    if abs(TWO_PI * pbar) < 1e-12:
        raise ResonantODE(f"monodromy {mono!r} is 1: no unique periodic solution")
    P = spectral_antiderivative(p - pbar)
    g = np.exp(P) * (-1.0 / (8 * Omega))
    k = np.arange(n // 2 + 1, dtype=float)
    ik = 1j * k
    ik[-1] = 0.0
    w = np.fft.irfft(np.fft.rfft(g) / (ik + pbar), n=n)
    return PeriodicFunction(np.exp(-P) * w), mono


def _reconstruct_inverse(inv_slope: np.ndarray, rotation: float) -> CircleDiffeo:
    # periodic part only: the mean of inv_slope is 1 up to the periodicity defect
    return CircleDiffeo(PeriodicFunction(rotation + spectral_antiderivative(inv_slope)))


def _periodicity_defect(omega_k, Omega, C):
    psi, _ = solve_psi(omega_k, Omega, C)
    s = psi.samples
    if np.min(s) <= 0:
        return None
    return integrate(PeriodicFunction(s**-2)) - TWO_PI


def find_periodic_C(omega_k: CircleDiffeo, Omega: float, xtol: float = 1e-12) -> float:
    """Root of ``int Psi_C^{-2} dx = 2*pi`` on the side ``C < C_res`` where ``Psi > 0``."""
    c_res = resonant_C(omega_k)
    gap = 1e-6 * (1.0 + abs(c_res))
    hi = c_res - gap
    d_hi = _periodicity_defect(omega_k, Omega, hi)
    if d_hi is None or d_hi >= 0:
        raise NoBracket("periodicity defect is not negative next to resonance")
    step = 1.0
    for _ in range(60):
        lo = c_res - step
        d_lo = _periodicity_defect(omega_k, Omega, lo)
        if d_lo is not None and d_lo > 0:
            break
        if d_lo is not None:
            hi = lo
        step *= 2.0
    else:
        raise NoBracket("could not bracket the periodic value of C")

    def defect(C):
        d = _periodicity_defect(omega_k, Omega, C)
        if d is None:
            raise SignViolation(f"Psi changes sign at C = {C}")
        return d

    return float(brentq(defect, lo, hi, xtol=xtol, rtol=4 * np.finfo(float).eps))


def hs_step(omega_k: CircleDiffeo, Omega: float, mode: str = "periodic_C",
            C: float | None = None, rotation: float = 0.0,
            periodic_tol: float = 1e-9) -> tuple[CircleDiffeo, HSDiagnostics]:
    """Advance the discrete angular velocity by one step of the Vir system.

    In ``mode="periodic_C"`` the integration constant ``C`` is chosen so
    that ``omega_{k+1}^{-1}`` is a circle map. In ``mode="fix_C"`` the given
    ``C`` is used and the step fails with :class:`PeriodicityDefect` unless
    the defect is below ``periodic_tol``. ``rotation`` fixes
    ``omega_{k+1}^{-1}(0)``.

    Raises
    ------
    ResonantODE, SignViolation, NoBracket, PeriodicityDefect
    """
    if mode == "periodic_C":
        C = find_periodic_C(omega_k, Omega)
    elif mode == "fix_C":
        if C is None:
            raise ValueError("fix_C mode needs a value for C")
    else:
        raise ValueError(f"unknown mode {mode!r}")
    psi, mono = solve_psi(omega_k, Omega, C)
    s = psi.samples
    inv_slope = s**-2 if np.min(s) > 0 else None
    defect = integrate(PeriodicFunction(inv_slope)) - TWO_PI if inv_slope is not None else np.nan
    diag = HSDiagnostics(float(C), float(np.min(s)), float(defect), mono, mode)
    if inv_slope is None:
        raise SignViolation(f"Psi reaches {np.min(s):.3e} <= 0")
    if mode == "fix_C" and abs(defect) > periodic_tol:
        raise PeriodicityDefect(f"int Psi^-2 - 2 pi = {defect:.3e}", diagnostics=diag)
    return invert(_reconstruct_inverse(inv_slope, rotation)), diag


def el2_bracket(omega_k: CircleDiffeo, omega_next: CircleDiffeo,
                Omega_k: float, Omega_next: float | None = None) -> PeriodicFunction:
    """The expression whose derivative the Euler-Lagrange equation sets to zero."""
    if Omega_next is None:
        Omega_next = Omega_k
    d = spectral_derivative
    wk = omega_k.slope().samples
    wi = invert(omega_next).slope().samples
    expr = (-2 * Omega_k * d(np.log(wk)) - 0.5 * np.sqrt(wk)
            + 2 * Omega_next * d(np.log(wi)) - 0.5 * np.sqrt(wi))
    return PeriodicFunction(expr)


def el2_residual(omega_k, omega_next, Omega_k, Omega_next=None) -> float:
    b = el2_bracket(omega_k, omega_next, Omega_k, Omega_next)
    return float(np.max(np.abs(spectral_derivative(b.samples))))


def hs_trajectory(omega1: CircleDiffeo, Omega: float, steps: int, mode: str = "periodic_C",
                  C: float | None = None, rotation: float = 0.0):
    """Iterate :func:`hs_step`; returns ``(omegas, diagnostics)`` with ``steps + 1`` velocities."""
    omegas, diags = [omega1], []
    for _ in range(steps):
        om, dg = hs_step(omegas[-1], Omega, mode, C, rotation)
        omegas.append(om)
        diags.append(dg)
    return omegas, diags


# ---------------------------------------------------------------------------
# Diff(S^1) discretisation

def simple_constant(omega_k: CircleDiffeo) -> float:
    """``c = (1/pi) int sqrt(omega_k')``, the nonzero root of the periodicity constraint."""
    return integrate(PeriodicFunction(np.sqrt(omega_k.slope().samples))) / np.pi


def simple_constant_rootfind(omega_k: CircleDiffeo) -> float:
    """Same constant by bracketed root-finding of ``int (c - sqrt(omega'))^2 = 2*pi``."""
    s = np.sqrt(omega_k.slope().samples)

    def g(c):
        return integrate(PeriodicFunction((c - s) ** 2)) - TWO_PI

    lo = float(s.max())
    if g(lo) >= 0:
        raise SignViolation("no admissible root above max sqrt(omega')")
    hi = 2 * lo + 1.0
    while g(hi) <= 0:
        hi *= 2
    return float(brentq(g, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps))


def hs_simple_step(omega_k: CircleDiffeo, rotation: float = 0.0) -> CircleDiffeo:
    """Step of ``[sqrt(omega_k') + sqrt((omega_{k+1}^{-1})')]' = 0``.

    ``sqrt((omega_{k+1}^{-1})') = c - sqrt(omega_k')`` with ``c`` from
    :func:`simple_constant`; ``rotation`` fixes ``omega_{k+1}^{-1}(0)``.

    Raises
    ------
    SignViolation
        If ``c <= max sqrt(omega_k')``.
    """
    s = np.sqrt(omega_k.slope().samples)
    c = simple_constant(omega_k)
    if c <= s.max():
        raise SignViolation(f"c = {c:.6g} does not exceed max sqrt(omega') = {s.max():.6g}")
    return invert(_reconstruct_inverse((c - s) ** 2, rotation))


def simple_trajectory(omega1: CircleDiffeo, steps: int, rotation: float = 0.0) -> list:
    omegas = [omega1]
    for _ in range(steps):
        omegas.append(hs_simple_step(omegas[-1], rotation))
    return omegas


def simple_residual(omega_k: CircleDiffeo, omega_next: CircleDiffeo) -> float:
    """``max |sqrt(omega_k') + sqrt((omega_next^{-1})') - c|``."""
    s = np.sqrt(omega_k.slope().samples) + np.sqrt(invert(omega_next).slope().samples)
    return float(np.max(np.abs(s - simple_constant(omega_k))))
