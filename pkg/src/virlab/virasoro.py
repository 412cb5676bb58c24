"""The Virasoro group and algebra as computable objects.

The dual of the algebra is identified with the algebra itself through the L2
pairing of vector parts plus the product of central coordinates, which turns
the inertia operator of the H^1 metric into the Fourier multiplier
``alpha + beta*k**2``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .circle import (
    CircleDiffeo,
    PeriodicFunction,
    _check_same_grid,
    compose,
    identity,
    integrate,
    invert,
    spectral_derivative,
    wavenumbers,
)
from .errors import InvalidParams, SingularInertia


@dataclass(frozen=True, eq=False)
class VirasoroElement:
    """Group element ``(f, F)``."""

    f: CircleDiffeo
    F: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "F", float(self.F))

    @property
    def n(self) -> int:
        return self.f.n

    def distance(self, other: "VirasoroElement") -> tuple[float, float]:
        """(diffeo sup-distance, |central difference|)."""
        return self.f.distance(other.f), abs(self.F - other.F)

    def __matmul__(self, other):
        return group_product(self, other)

    def to_json(self) -> dict:
        return {"f": self.f.to_json(), "F": self.F}

    @classmethod
    def from_json(cls, data: dict) -> "VirasoroElement":
        return cls(CircleDiffeo.from_json(data["f"]), float(data["F"]))


@dataclass(frozen=True, eq=False)
class VirasoroAlgebraElement:
    """Algebra element ``(v d/dx, a)``."""

    v: PeriodicFunction
    a: float = 0.0

    def __post_init__(self):
        if not isinstance(self.v, PeriodicFunction):
            object.__setattr__(self, "v", PeriodicFunction(self.v))
        object.__setattr__(self, "a", float(self.a))

    @property
    def n(self) -> int:
        return self.v.n

    def __add__(self, other):
        return VirasoroAlgebraElement(self.v + other.v, self.a + other.a)

    def __sub__(self, other):
        return VirasoroAlgebraElement(self.v - other.v, self.a - other.a)

    def __rmul__(self, s):
        return VirasoroAlgebraElement(self.v * s, self.a * s)

    def to_json(self) -> dict:
        return {"v": self.v.to_json(), "a": self.a}

    @classmethod
    def from_json(cls, data: dict) -> "VirasoroAlgebraElement":
        return cls(PeriodicFunction.from_json(data["v"]), float(data["a"]))


@dataclass(frozen=True)
class MetricParams:
    """Weights of the H^1_{alpha,beta} metric."""

    alpha: float
    beta: float

    def __post_init__(self):
        a, b = float(self.alpha), float(self.beta)
        if not (np.isfinite(a) and np.isfinite(b)) or a < 0 or b < 0:
            raise InvalidParams(f"alpha, beta must be finite and >= 0, got {a}, {b}")
        if a == 0 and b == 0:
            raise InvalidParams("alpha and beta cannot both vanish")
        object.__setattr__(self, "alpha", a)
        object.__setattr__(self, "beta", b)


def unit(cfg) -> VirasoroElement:
    return VirasoroElement(identity(cfg), 0.0)


def bott_cocycle(f: CircleDiffeo, g: CircleDiffeo) -> float:
    """B(f, g) = integral of log((f o g)') d log(g')."""
    _check_same_grid(f, g)
    fg = compose(f, g)
    log_fg = np.log(fg.slope().samples)
    dlog_g = spectral_derivative(np.log(g.slope().samples))
    return float(2 * np.pi / f.n * np.dot(log_fg, dlog_g))


def group_product(x: VirasoroElement, y: VirasoroElement) -> VirasoroElement:
    return VirasoroElement(compose(x.f, y.f), x.F + y.F + bott_cocycle(x.f, y.f))


def group_inverse(x: VirasoroElement) -> VirasoroElement:
    return VirasoroElement(invert(x.f), -x.F)


def gelfand_fuchs_cocycle(v: PeriodicFunction, w: PeriodicFunction) -> float:
    """Integral of v''' w over one period."""
    _check_same_grid(v, w)
    return float(2 * np.pi / v.n * np.dot(spectral_derivative(v.samples, 3), w.samples))


def gelfand_fuchs_bracket(xi: VirasoroAlgebraElement,
                          eta: VirasoroAlgebraElement) -> VirasoroAlgebraElement:
    """Commutator ``((-v w' + v' w) d/dx, int v''' w)``.

    The central coordinates of the arguments do not enter the result.
    """
    v, w = xi.v.samples, eta.v.samples
    _check_same_grid(xi.v, eta.v)
    vec = -v * spectral_derivative(w) + spectral_derivative(v) * w
    return VirasoroAlgebraElement(PeriodicFunction(vec), gelfand_fuchs_cocycle(xi.v, eta.v))


def pairing(mu: VirasoroAlgebraElement, eta: VirasoroAlgebraElement) -> float:
    """Dual pairing: L2 product of vector parts plus product of central parts."""
    _check_same_grid(mu.v, eta.v)
    return integrate(mu.v * eta.v) + mu.a * eta.a


def h1_inner(xi: VirasoroAlgebraElement, eta: VirasoroAlgebraElement, m: MetricParams) -> float:
    _check_same_grid(xi.v, eta.v)
    v, w = xi.v.samples, eta.v.samples
    dens = m.alpha * v * w + m.beta * spectral_derivative(v) * spectral_derivative(w)
    return float(2 * np.pi / xi.n * np.sum(dens)) + xi.a * eta.a


def inertia_multiplier(n: int, m: MetricParams) -> np.ndarray:
    k = wavenumbers(n)
    return m.alpha + m.beta * k**2


def inertia_apply(xi: VirasoroAlgebraElement, m: MetricParams) -> VirasoroAlgebraElement:
    """Momentum ``alpha v - beta v''`` with the central coordinate unchanged."""
    n = xi.n
    c = np.fft.rfft(xi.v.samples) * inertia_multiplier(n, m)
    return VirasoroAlgebraElement(PeriodicFunction(np.fft.irfft(c, n=n)), xi.a)


def inertia_invert(mu: VirasoroAlgebraElement, m: MetricParams,
                   mean_tol: float = 1e-10) -> VirasoroAlgebraElement:
    """Velocity from momentum by mode-wise division.

    Raises
    ------
    SingularInertia
        If ``alpha == 0`` and the momentum has a mean exceeding ``mean_tol``
        (relative to its sup norm); the zero mode of the result is set to 0.
    """
    n = mu.n
    c = np.fft.rfft(mu.v.samples)
    mult = inertia_multiplier(n, m)
    if mult[0] == 0.0:
        mean = abs(c[0].real) / n
        if mean > mean_tol * max(1.0, mu.v.sup_norm()):
            raise SingularInertia(
                f"alpha = 0 and the momentum has nonzero mean {mean:.3e}"
            )
        c[0] = 0.0
        mult = mult.copy()
        mult[0] = 1.0
    return VirasoroAlgebraElement(PeriodicFunction(np.fft.irfft(c / mult, n=n)), mu.a)
