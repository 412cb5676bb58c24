"""Smooth periodic functions and orientation-preserving circle maps.

Everything lives on the uniform grid ``x_j = 2*pi*j/n`` and is understood as
the trigonometric interpolant of its samples. A circle diffeomorphism is the
lift ``f(x) = x + u(x)`` with ``u`` periodic, stored through ``u``.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from ._roots import bracketed_newton, expand_bracket
from .errors import AliasingWarning, GridMismatch, MonotonicityLost

TWO_PI = 2.0 * np.pi

_EVAL_CHUNK = 4096


@dataclass(frozen=True)
class GridConfig:
    """Uniform grid of ``n`` samples on ``[0, 2*pi)``."""

    n: int

    def __post_init__(self):
        n = self.n
        if isinstance(n, bool) or int(n) != n:
            raise ValueError(f"grid size must be an integer, got {n!r}")
        if n < 16 or n % 2:
            raise ValueError(f"grid size must be even and >= 16, got {n}")
        object.__setattr__(self, "n", int(n))

    @property
    def nodes(self) -> np.ndarray:
        return TWO_PI * np.arange(self.n) / self.n

    @property
    def spacing(self) -> float:
        return TWO_PI / self.n


def _as_cfg(cfg) -> GridConfig:
    return cfg if isinstance(cfg, GridConfig) else GridConfig(int(cfg))


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class PeriodicFunction:
    """Samples of a real 2*pi-periodic function on the uniform grid."""

    samples: np.ndarray

    def __post_init__(self):
        s = np.array(self.samples, dtype=float)
        if s.ndim != 1:
            raise ValueError("samples must be one-dimensional")
        GridConfig(s.size)
        if not np.all(np.isfinite(s)):
            raise ValueError("samples must be finite")
        object.__setattr__(self, "samples", _frozen(s))

    @classmethod
    def from_callable(cls, fn, cfg) -> "PeriodicFunction":
        cfg = _as_cfg(cfg)
        return cls(np.broadcast_to(fn(cfg.nodes), (cfg.n,)))

    @classmethod
    def constant(cls, value: float, cfg) -> "PeriodicFunction":
        return cls(np.full(_as_cfg(cfg).n, float(value)))

    @property
    def n(self) -> int:
        return self.samples.size

    @property
    def cfg(self) -> GridConfig:
        return GridConfig(self.n)

    @property
    def nodes(self) -> np.ndarray:
        return self.cfg.nodes

    def __call__(self, y, order: int = 0):
        """Evaluate the interpolant (or its ``order``-th derivative) at ``y``."""
        return evaluate(self.samples, y, order)

    def _coerce(self, other):
        if isinstance(other, PeriodicFunction):
            if other.n != self.n:
                raise GridMismatch(f"grid sizes differ: {self.n} vs {other.n}")
            return other.samples
        return other

    def __add__(self, other):
        return PeriodicFunction(self.samples + self._coerce(other))

    __radd__ = __add__

    def __sub__(self, other):
        return PeriodicFunction(self.samples - self._coerce(other))

    def __rsub__(self, other):
        return PeriodicFunction(self._coerce(other) - self.samples)

    def __mul__(self, other):
        return PeriodicFunction(self.samples * self._coerce(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return PeriodicFunction(self.samples / self._coerce(other))

    def __neg__(self):
        return PeriodicFunction(-self.samples)

    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.samples)))

    def mean(self) -> float:
        return float(np.mean(self.samples))

    def to_json(self) -> dict:
        return {"n": self.n, "samples": [float(v) for v in self.samples]}

    @classmethod
    def from_json(cls, data: dict) -> "PeriodicFunction":
        samples = data["samples"]
        if int(data["n"]) != len(samples):
            raise ValueError(f"n={data['n']} does not match {len(samples)} samples")
        return cls(samples)


def _check_same_grid(*objs):
    sizes = {o.n for o in objs}
    if len(sizes) > 1:
        raise GridMismatch(f"operands live on different grids: {sorted(sizes)}")


# ---------------------------------------------------------------------------
# spectral kernels on raw sample arrays

def wavenumbers(n: int) -> np.ndarray:
    """Nonnegative wavenumbers of the real FFT of length ``n``."""
    return np.arange(n // 2 + 1, dtype=float)


def spectral_derivative(samples: np.ndarray, order: int = 1) -> np.ndarray:
    """Fourier-multiplier derivative; the Nyquist mode is dropped for odd orders."""
    if order == 0:
        return np.array(samples, dtype=float)
    n = samples.shape[-1]
    k = wavenumbers(n)
    mult = (1j * k) ** order
    if order % 2:
        mult[-1] = 0.0
    return np.fft.irfft(mult * np.fft.rfft(samples), n=n)


def spectral_antiderivative(samples: np.ndarray) -> np.ndarray:
    """Periodic antiderivative of the zero-mean part, normalised to vanish at x=0.

    The mean of ``samples`` is ignored; callers add ``mean * x`` if needed.
    """
    n = samples.shape[-1]
    c = np.fft.rfft(samples)
    k = wavenumbers(n)
    out = np.zeros_like(c)
    out[1:] = c[1:] / (1j * k[1:])
    out[-1] = 0.0
    a = np.fft.irfft(out, n=n)
    return a - a[..., :1]


def evaluate(samples: np.ndarray, y, order=0):
    """Evaluate the trigonometric interpolant of ``samples`` at arbitrary points.

    ``order`` is a derivative order or a tuple of orders; a tuple returns one
    array per order, sharing the exponential table.
    """
    samples = np.asarray(samples, dtype=float)
    n = samples.size
    c = np.fft.rfft(samples) / n
    c[1:-1] *= 2.0
    k = wavenumbers(n)
    orders = order if isinstance(order, tuple) else (order,)
    cols = []
    for o in orders:
        co = c * (1j * k) ** o if o else c
        if o % 2:
            co[-1] = 0.0
        cols.append(co)
    coef = np.stack(cols, axis=1)
    # e^{iky} with k = 16a + b, built from 16 + K/16 exponentials per point
    nb = 16
    na = -(-k.size // nb)
    table = np.zeros((na * nb, len(orders)), dtype=complex)
    table[: k.size] = coef
    table = table.reshape(na, nb, len(orders))
    y = np.asarray(y, dtype=float)
    flat = y.reshape(-1)
    out = np.empty((flat.size, len(orders)))
    for start in range(0, flat.size, _EVAL_CHUNK):
        yy = flat[start:start + _EVAL_CHUNK]
        hi = np.exp(1j * np.outer(yy, nb * np.arange(na)))
        lo = np.exp(1j * np.outer(yy, np.arange(nb)))
        inner = np.tensordot(lo, table, axes=([1], [1]))
        out[start:start + _EVAL_CHUNK] = np.einsum("ma,man->mn", hi, inner).real
    res = [out[:, i].reshape(y.shape) if y.ndim else float(out[0, i]) for i in range(len(orders))]
    return tuple(res) if isinstance(order, tuple) else res[0]


# ---------------------------------------------------------------------------
# circle diffeomorphisms

@dataclass(frozen=True, eq=False)
class CircleDiffeo:
    """Orientation-preserving circle diffeomorphism ``f(x) = x + u(x)``.

    The stored displacement is the representative with ``u(0)`` in
    ``[0, 2*pi)``; the constructor normalises any other lift. Monotonicity is
    checked at grid nodes only.
    """

    u: PeriodicFunction

    def __post_init__(self):
        u = self.u if isinstance(self.u, PeriodicFunction) else PeriodicFunction(self.u)
        s = u.samples
        r = s[0] % TWO_PI
        if r >= TWO_PI:
            r = 0.0
        shift = round((s[0] - r) / TWO_PI)
        if shift:
            u = PeriodicFunction(s - TWO_PI * shift)
        object.__setattr__(self, "u", u)
        fp = 1.0 + spectral_derivative(u.samples)
        if not np.all(fp > 0.0):
            j = int(np.argmin(fp))
            raise MonotonicityLost(
                f"f'(x) = {fp[j]:.3e} <= 0 at node {j}; the map is under-resolved "
                "or not orientation preserving"
            )

    @classmethod
    def from_displacement(cls, fn, cfg) -> "CircleDiffeo":
        return cls(PeriodicFunction.from_callable(fn, cfg))

    @property
    def n(self) -> int:
        return self.u.n

    @property
    def cfg(self) -> GridConfig:
        return self.u.cfg

    @property
    def values(self) -> np.ndarray:
        """f at the grid nodes."""
        return self.u.nodes + self.u.samples

    def slope(self) -> PeriodicFunction:
        """f' sampled on the grid."""
        return PeriodicFunction(1.0 + spectral_derivative(self.u.samples))

    def __call__(self, y):
        return np.asarray(y, dtype=float) + self.u(y)

    def distance(self, other: "CircleDiffeo") -> float:
        """Sup-distance between lifts, minimised over the 2*pi*k ambiguity."""
        _check_same_grid(self, other)
        d = self.u.samples - other.u.samples
        d = d - TWO_PI * np.round(np.mean(d) / TWO_PI)
        return float(np.max(np.abs(d)))

    def to_json(self) -> dict:
        return self.u.to_json()

    @classmethod
    def from_json(cls, data: dict) -> "CircleDiffeo":
        return cls(PeriodicFunction.from_json(data))


def identity(cfg) -> CircleDiffeo:
    return CircleDiffeo(PeriodicFunction(np.zeros(_as_cfg(cfg).n)))


def rotation(angle: float, cfg) -> CircleDiffeo:
    """The rigid rotation ``x -> x + angle``."""
    return CircleDiffeo(PeriodicFunction.constant(angle, cfg))


def derivative(p):
    """Spectral derivative.

    For a :class:`CircleDiffeo` this is ``f' = 1 + u'``; for a
    :class:`PeriodicFunction` it is the Fourier-multiplier derivative, exact
    for trigonometric polynomials below the Nyquist mode.
    """
    if isinstance(p, CircleDiffeo):
        return p.slope()
    return PeriodicFunction(spectral_derivative(p.samples))


def integrate(p: PeriodicFunction) -> float:
    """Trapezoid rule over one period (spectrally accurate for smooth data)."""
    return float(TWO_PI / p.n * np.sum(p.samples))


def compose(f: CircleDiffeo, g: CircleDiffeo) -> CircleDiffeo:
    """Samples of ``f(g(x))``.

    Raises
    ------
    MonotonicityLost
        If the composed derivative is not positive at every node, which means
        the grid cannot resolve the product.
    """
    _check_same_grid(f, g)
    gu = g.u.samples
    return CircleDiffeo(PeriodicFunction(gu + f.u(g.u.nodes + gu)))


def invert(f: CircleDiffeo, tol: float = 1e-13, max_iter: int = 100) -> CircleDiffeo:
    """Inverse map, solving ``f(y) = x_j`` node by node.

    Safeguarded Newton: each iterate is kept inside a sign-verified bracket and
    a bisection step replaces any Newton step that leaves it.
    """
    x = f.u.nodes
    us = f.u.samples
    spread = float(us.max() - us.min())
    pad = 0.25 * spread + 1e-3
    lo = x - us.max() - pad
    hi = x - us.min() + pad

    def h(y):
        return y + f.u(y) - x

    lo, hi = expand_bracket(h, lo, hi, pad, what="invert")
    def hdh(y):
        val, slope = f.u(y, order=(0, 1))
        return y + val - x, 1.0 + slope

    y = bracketed_newton(hdh, lo, hi, x - us, tol=tol, max_iter=max_iter, what="invert")
    return CircleDiffeo(PeriodicFunction(y - x))


def resample(p, cfg2):
    """Trigonometric interpolation onto another grid.

    Exact when the target grid is at least as fine. Downsampling emits an
    :class:`AliasingWarning` when discarded modes carry content.
    """
    if isinstance(p, CircleDiffeo):
        return CircleDiffeo(resample(p.u, cfg2))
    cfg2 = _as_cfg(cfg2)
    n, m = p.n, cfg2.n
    if m == n:
        return p
    c = np.fft.rfft(p.samples) / n
    out = np.zeros(m // 2 + 1, dtype=complex)
    if m > n:
        out[: n // 2 + 1] = c
        out[n // 2] *= 0.5  # cos(n/2 x) splits into two conjugate modes on the finer grid
    else:
        scale = max(float(np.max(np.abs(c))), 1e-300)
        lost = max(float(np.max(np.abs(c[m // 2 + 1:]))), abs(c[m // 2].imag))
        if lost > 1e-12 * scale:
            warnings.warn(
                f"downsampling {n} -> {m} discards resolved Fourier content",
                AliasingWarning,
                stacklevel=2,
            )
        out[:] = c[: m // 2 + 1]
        out[-1] = 2.0 * c[m // 2].real
    return PeriodicFunction(np.fft.irfft(out * m, n=m))


# ---------------------------------------------------------------------------
# seeded random smooth data

def random_trig_poly(rng, cfg, modes: int = 8, amplitude: float = 0.3,
                     max_slope: float | None = None, zero_mean: bool = True) -> PeriodicFunction:
    """Random real trigonometric polynomial with ``modes`` harmonics.

    Coefficients are uniform in [-1, 1]; the result is scaled so that its sup
    norm is ``amplitude`` (and its slope at most ``max_slope`` if given).
    """
    cfg = _as_cfg(cfg)
    if 2 * modes >= cfg.n // 2:
        raise ValueError("too many modes for this grid")
    k = np.arange(1, modes + 1)
    a = rng.uniform(-1.0, 1.0, modes)
    b = rng.uniform(-1.0, 1.0, modes)
    c0 = 0.0 if zero_mean else rng.uniform(-1.0, 1.0)
    fine = np.linspace(0.0, TWO_PI, 16 * cfg.n, endpoint=False)

    def build(x, d=0):
        ph = np.outer(x, k)
        if d == 0:
            return c0 + np.cos(ph) @ a + np.sin(ph) @ b
        return -np.sin(ph) @ (a * k) + np.cos(ph) @ (b * k)

    scale = amplitude / np.max(np.abs(build(fine)))
    if max_slope is not None:
        scale = min(scale, max_slope / np.max(np.abs(build(fine, 1))))
    return PeriodicFunction(scale * build(cfg.nodes))


def random_diffeo(rng, cfg, modes: int = 8, amplitude: float = 0.3,
                  max_slope: float = 0.5, rotate: bool = True) -> CircleDiffeo:
    """Random circle diffeomorphism with ``|u'| <= max_slope < 1``."""
    if not 0 < max_slope < 1:
        raise ValueError("max_slope must lie in (0, 1)")
    u = random_trig_poly(rng, cfg, modes, amplitude, max_slope=max_slope)
    if rotate:
        u = u + rng.uniform(0.0, TWO_PI)
    return CircleDiffeo(u)
