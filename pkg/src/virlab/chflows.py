"""The Camassa-Holm family of Euler equations on the Virasoro group.

The family is

    alpha*(v_t + 3 v v_x) - beta*(v_xxt + 2 v_x v_xx + v v_xxx) - b v_xxx = 0

and is evolved in momentum form ``m = alpha v - beta v_xx``,

    m_t = -(v m_x + 2 v_x m) + b v_xxx,

with ``v_t`` recovered by dividing by the inertia multiplier
``alpha + beta k**2``. On the Hunter-Saxton branch (``alpha = 0``) that
multiplier vanishes at ``k = 0``; the mean of ``v`` is then a gauge and is
pinned to zero.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np
from scipy.optimize import minimize_scalar

from ._roots import bracketed_newton, expand_bracket
from .circle import PeriodicFunction, evaluate, spectral_derivative, wavenumbers
from .errors import InvalidParams, NonSmoothState, PeriodMismatch, ShockReached, SingularInertia
from .virasoro import MetricParams

MEAN_TOL = 1e-10


class OrbitClass(str, enum.Enum):
    CAMASSA_HOLM = "CamassaHolm"
    KDV = "KdV"
    HOPF = "HopfDispersionless"
    HUNTER_SAXTON = "HunterSaxton"
    LINEAR_DEGENERATE = "LinearDegenerate"


@dataclass(frozen=True)
class CHParams:
    alpha: float
    beta: float
    b: float = 0.0

    def __post_init__(self):
        a, be, b = float(self.alpha), float(self.beta), float(self.b)
        if not all(np.isfinite([a, be, b])):
            raise InvalidParams("parameters must be finite")
        if a < 0 or be < 0:
            raise InvalidParams(f"alpha and beta must be >= 0, got {a}, {be}")
        if a == 0 and be == 0 and b == 0:
            raise InvalidParams("alpha = beta = b = 0 is not an equation")
        object.__setattr__(self, "alpha", a)
        object.__setattr__(self, "beta", be)
        object.__setattr__(self, "b", b)

    @property
    def metric(self) -> MetricParams:
        return MetricParams(self.alpha, self.beta)

    def to_json(self) -> dict:
        return {"alpha": self.alpha, "beta": self.beta, "b": self.b}


@dataclass(frozen=True, eq=False)
class VelocityState:
    v: PeriodicFunction
    t: float = 0.0

    def __post_init__(self):
        if not isinstance(self.v, PeriodicFunction):
            object.__setattr__(self, "v", PeriodicFunction(self.v))
        object.__setattr__(self, "t", float(self.t))


class Conserved(NamedTuple):
    momentum: float
    energy: float


def classify(p: CHParams) -> OrbitClass:
    """Symmetry orbit of the parameter triple."""
    if p.alpha != 0:
        if p.beta != 0:
            return OrbitClass.CAMASSA_HOLM
        return OrbitClass.KDV if p.b != 0 else OrbitClass.HOPF
    if p.beta != 0:
        return OrbitClass.HUNTER_SAXTON
    return OrbitClass.LINEAR_DEGENERATE


# ---------------------------------------------------------------------------
# spectral operators

def dealias_mask(n: int) -> np.ndarray:
    """2/3-rule mask over real-FFT modes: keep k with 3k < n."""
    return 3 * wavenumbers(n) < n


def _operators(n: int, p: CHParams):
    k = wavenumbers(n)
    ik = 1j * k
    ik[-1] = 0.0
    mult = p.alpha + p.beta * k**2
    dispersion = p.b * ik**3
    inv = np.zeros_like(mult)
    nz = mult != 0
    inv[nz] = 1.0 / mult[nz]
    return k, ik, mult, inv, dispersion


def _check_evolvable(v: np.ndarray, p: CHParams):
    if classify(p) is OrbitClass.LINEAR_DEGENERATE:
        raise InvalidParams("alpha = beta = 0 gives the constraint v_xxx = 0, not an evolution")
    if p.alpha == 0:
        mean = abs(np.mean(v))
        if mean > MEAN_TOL * max(1.0, np.max(np.abs(v))):
            raise SingularInertia(
                f"alpha = 0 requires zero-mean velocity, got mean {mean:.3e}"
            )


def _nonlinear_hat(vh: np.ndarray, n: int, ik, mult, inv, mask):
    """Fourier transform of -(v m_x + 2 v_x m) / (alpha + beta k^2)."""
    v = np.fft.irfft(vh, n=n)
    vx = np.fft.irfft(ik * vh, n=n)
    mh = mult * vh
    m = np.fft.irfft(mh, n=n)
    mx = np.fft.irfft(ik * mh, n=n)
    nh = np.fft.rfft(-(v * mx + 2.0 * vx * m))
    if mask is not None:
        nh = nh * mask
    return nh * inv


def rhs(s: VelocityState, p: CHParams, dealias: bool = True) -> PeriodicFunction:
    """``v_t`` solved from the family equation through the momentum form.

    Raises
    ------
    InvalidParams
        On the degenerate orbit ``alpha = beta = 0``.
    SingularInertia
        When ``alpha = 0`` and ``v`` has nonzero mean.
    NonSmoothState
        When ``v`` or the result is not finite.
    """
    v = s.v.samples
    n = v.size
    _check_evolvable(v, p)
    _, ik, mult, inv, disp = _operators(n, p)
    vh = np.fft.rfft(v)
    mask = dealias_mask(n) if dealias else None
    vth = _nonlinear_hat(vh, n, ik, mult, inv, mask) + inv * disp * vh
    out = np.fft.irfft(vth, n=n)
    if not np.all(np.isfinite(out)):
        raise NonSmoothState("non-finite time derivative")
    return PeriodicFunction(out)


def ch1_residual(v: PeriodicFunction, vt: PeriodicFunction, p: CHParams) -> PeriodicFunction:
    """Pointwise residual of the family equation written out term by term."""
    d = spectral_derivative
    u, ut = v.samples, vt.samples
    ux, uxx, uxxx = d(u, 1), d(u, 2), d(u, 3)
    uxxt = d(ut, 2)
    res = (p.alpha * (ut + 3 * u * ux)
           - p.beta * (uxxt + 2 * ux * uxx + u * uxxx)
           - p.b * uxxx)
    return PeriodicFunction(res)


def evolve(s: VelocityState, p: CHParams, dt: float, steps: int,
           dealias: bool = True,
           observer: Callable[[int, VelocityState], None] | None = None,
           record_every: int = 1) -> VelocityState:
    """Advance ``steps`` steps of fourth-order Runge-Kutta in the integrating-factor frame.

    The dispersive term ``b v_xxx / (alpha + beta k^2)`` is linear and purely
    imaginary in Fourier space; it is propagated exactly and classical RK4
    (Lawson form) is applied to the remaining nonlinear part. With ``b = 0``
    this is plain RK4. Explicit stepping of the dispersive term would need
    ``dt`` below roughly ``2.8 (alpha + beta k^2) / (|b| k^3)`` at the highest
    retained ``k``; the nonlinear part still asks for
    ``dt * n * max|v|`` of order one or less.

    Products are dealiased with the 2/3 rule, and the initial data is projected
    onto the retained modes. ``observer(step, state)`` is called at step 0 and
    then every ``record_every`` steps.

    Raises
    ------
    NonSmoothState
        If the solution becomes non-finite; ``err.state`` is the last finite
        state and ``err.step`` the failing step.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    if steps < 0:
        raise ValueError("steps must be nonnegative")
    v0 = s.v.samples
    n = v0.size
    _check_evolvable(v0, p)
    _, ik, mult, inv, disp = _operators(n, p)
    mask = dealias_mask(n) if dealias else None
    lin = inv * disp
    e_half = np.exp(0.5 * dt * lin)
    e_full = e_half * e_half

    vh = np.fft.rfft(v0)
    if mask is not None:
        vh = vh * mask
    if p.alpha == 0:
        vh[0] = 0.0

    def nl(w):
        return _nonlinear_hat(w, n, ik, mult, inv, mask)

    def state(w, step):
        return VelocityState(PeriodicFunction(np.fft.irfft(w, n=n)), s.t + step * dt)

    if observer is not None:
        observer(0, state(vh, 0))
    for step in range(1, steps + 1):
        k1 = nl(vh)
        k2 = nl(e_half * (vh + 0.5 * dt * k1))
        k3 = nl(e_half * vh + 0.5 * dt * k2)
        k4 = nl(e_full * vh + dt * e_half * k3)
        new = e_full * vh + dt / 6.0 * (e_full * k1 + 2.0 * e_half * (k2 + k3) + k4)
        if not np.all(np.isfinite(new)):
            raise NonSmoothState(
                f"solution lost finiteness at step {step}", state=state(vh, step - 1), step=step
            )
        vh = new
        if observer is not None and step % record_every == 0:
            observer(step, state(vh, step))
    return state(vh, steps)


# ---------------------------------------------------------------------------
# dispersionless oracle

def hopf_shock_time(v0: PeriodicFunction) -> float:
    """First time ``1 / (3 max(-v0'))`` at which characteristics of v_t + 3 v v_x = 0 cross."""
    s = v0.samples
    fine = np.linspace(0.0, 2 * np.pi, 16 * s.size, endpoint=False)
    slope = evaluate(s, fine, 1)
    j = int(np.argmin(slope))
    h = fine[1] - fine[0]
    res = minimize_scalar(lambda y: evaluate(s, y, 1), bounds=(fine[j] - h, fine[j] + h),
                          method="bounded", options={"xatol": 1e-12})
    steepest = -min(float(res.fun), float(slope[j]))
    return np.inf if steepest <= 0 else 1.0 / (3.0 * steepest)


def hopf_characteristics(v0: PeriodicFunction, t: float, x):
    """Exact solution of ``v_t + 3 v v_x = 0`` by the method of characteristics.

    Solves ``v = v0(x - 3 v t)`` for each ``x``.

    Raises
    ------
    ShockReached
        If ``t`` is at or past the shock time.
    """
    ts = hopf_shock_time(v0)
    if t >= ts:
        raise ShockReached(f"t = {t} is at or beyond the shock time {ts:.6g}")
    x = np.asarray(x, dtype=float)
    if t == 0:
        return v0(x)
    vals = v0.samples
    pad = 0.1 * (vals.max() - vals.min()) + 1e-3
    lo = np.full(x.shape, vals.min() - pad)
    hi = np.full(x.shape, vals.max() + pad)

    def g(v):
        return v - v0(x - 3.0 * v * t)

    def gdg(v):
        val, slope = v0(x - 3.0 * v * t, order=(0, 1))
        return v - val, 1.0 + 3.0 * t * slope

    lo, hi = expand_bracket(g, lo, hi, pad, what="characteristics")
    out = bracketed_newton(gdg, lo, hi, v0(x), tol=1e-15, what="characteristics")
    return out if x.ndim else float(out)


# ---------------------------------------------------------------------------
# invariants and symmetries

def conserved_quantities(s: VelocityState, p: CHParams) -> Conserved:
    """Momentum ``alpha * int v`` and energy ``int (alpha v^2 + beta v_x^2)``."""
    v = s.v.samples
    vx = spectral_derivative(v)
    w = 2 * np.pi / v.size
    return Conserved(p.alpha * w * float(np.sum(v)),
                     w * float(np.sum(p.alpha * v * v + p.beta * vx * vx)))


def apply_scaling(s: VelocityState, lam: float, mu: float,
                  p: CHParams) -> tuple[VelocityState, CHParams]:
    """``v -> lam v``, ``t -> mu t``, ``x -> lam mu x``.

    A solution for ``(alpha, beta, b)`` maps to a solution for
    ``(alpha mu/lam, beta lam mu^3, b lam^2 mu^3)``. On the fixed 2*pi grid
    only ``lam * mu = 1`` is representable.
    """
    if lam == 0 or mu == 0:
        raise ValueError("lam and mu must be nonzero")
    if abs(lam * mu - 1.0) > 1e-12:
        raise PeriodMismatch(f"lam*mu = {lam * mu} would rescale the 2*pi period")
    q = CHParams(p.alpha * mu / lam, p.beta * lam * mu**3, p.b * lam**2 * mu**3)
    return VelocityState(s.v * lam, s.t * mu), q


def apply_galilean(s: VelocityState, c: float, d: float,
                   p: CHParams) -> tuple[VelocityState, CHParams]:
    """``v -> v + c``, ``x -> x + d t``: the new field is ``v(x - d t) + c``.

    Substitution shows this maps solutions to solutions with
    ``b -> b + beta (d - c)`` provided ``alpha (d - 3c) = 0``.
    """
    if p.alpha != 0 and abs(d - 3.0 * c) > 1e-12 * max(1.0, abs(d)):
        raise InvalidParams("with alpha != 0 the Galilean boost needs d = 3c")
    shifted = s.v(s.v.nodes - d * s.t) if s.t != 0 else s.v.samples
    q = CHParams(p.alpha, p.beta, p.b + p.beta * (d - c))
    return VelocityState(PeriodicFunction(shifted + c), s.t), q
