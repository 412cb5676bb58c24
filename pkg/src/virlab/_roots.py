"""Vectorised safeguarded Newton iteration for monotone scalar equations."""
import numpy as np

from .errors import NonConvergence


def bracketed_newton(hdh, lo, hi, y0, tol=1e-13, max_iter=100, what="root"):
    """Solve ``h(y) = 0`` elementwise for increasing ``h`` with ``h(lo) < 0 < h(hi)``.

    ``hdh(y)`` returns ``(h(y), h'(y))``. Newton steps that leave the current
    bracket, or meet a nonpositive derivative, are replaced by bisection.
    """
    lo = np.array(lo, dtype=float)
    hi = np.array(hi, dtype=float)
    y = np.clip(np.asarray(y0, dtype=float), lo, hi)
    for _ in range(max_iter):
        val, der = hdh(y)
        exact = val == 0
        neg = val < 0
        lo = np.where(neg, y, lo)
        hi = np.where(neg | exact, hi, y)
        with np.errstate(divide="ignore", invalid="ignore"):
            step = np.where(der > 0, y - val / der, np.nan)
        newton_ok = (step >= lo) & (step <= hi)
        y_new = np.where(newton_ok, step, 0.5 * (lo + hi))
        y_new = np.where(exact, y, y_new)
        done = np.abs(y_new - y) <= tol
        y = y_new
        if done.all():
            return y
    raise NonConvergence(f"{what}: {np.count_nonzero(~done)} points did not converge")


def expand_bracket(h, lo, hi, pad, tries=60, what="root"):
    """Widen ``[lo, hi]`` elementwise until ``h(lo) <= 0 <= h(hi)``."""
    lo = np.array(lo, dtype=float)
    hi = np.array(hi, dtype=float)
    for _ in range(tries):
        bad_lo = h(lo) > 0
        bad_hi = h(hi) < 0
        if not (bad_lo.any() or bad_hi.any()):
            return lo, hi
        lo = np.where(bad_lo, lo - pad, lo)
        hi = np.where(bad_hi, hi + pad, hi)
    raise NonConvergence(f"{what}: could not bracket; equation is not monotone")
