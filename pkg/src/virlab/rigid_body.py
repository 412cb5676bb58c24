"""Discrete and continuous rigid body on SO(N).

Discrete system (Lagrangian ``tr(X J Y^T)``)::

    omega_k = X_k^T X_{k-1}
    M_k     = omega_k^T J - J omega_k
    M_{k+1} = omega_k M_k omega_k^T

Continuous limit: ``dM/dt = [M, Omega]`` with ``M = J Omega + Omega J``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import expm, solve_continuous_lyapunov, sqrtm

from .errors import NoNearIdentityBranch, OrthogonalityLost, ResidualTooLarge


@dataclass(frozen=True, eq=False)
class BodyTensor:
    """Symmetric positive-definite inertia matrix with cached eigenbasis."""

    J: np.ndarray
    eigvals: np.ndarray = field(init=False, repr=False)
    eigvecs: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        J = np.array(self.J, dtype=float)
        if J.ndim != 2 or J.shape[0] != J.shape[1]:
            raise ValueError("J must be square")
        if np.max(np.abs(J - J.T)) >= 1e-12:
            raise ValueError("J must be symmetric")
        lam, Q = np.linalg.eigh(J)
        if lam[0] <= 0:
            raise ValueError(f"J must be positive definite, smallest eigenvalue {lam[0]:.3e}")
        for a in (J, lam, Q):
            a.setflags(write=False)
        object.__setattr__(self, "J", J)
        object.__setattr__(self, "eigvals", lam)
        object.__setattr__(self, "eigvecs", Q)

    @property
    def N(self) -> int:
        return self.J.shape[0]

    @classmethod
    def diag(cls, *values) -> "BodyTensor":
        return cls(np.diag(np.asarray(values, dtype=float)))

    def to_body(self, A: np.ndarray) -> np.ndarray:
        return self.eigvecs.T @ A @ self.eigvecs

    def from_body(self, A: np.ndarray) -> np.ndarray:
        return self.eigvecs @ A @ self.eigvecs.T


def orthogonality_residual(X: np.ndarray) -> float:
    return float(np.max(np.abs(X.T @ X - np.eye(X.shape[0]))))


def skew_residual(M: np.ndarray) -> float:
    return float(np.max(np.abs(M + M.T)))


def check_rotation(X: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    r = orthogonality_residual(X)
    if r >= tol:
        raise OrthogonalityLost(f"|X^T X - I| = {r:.3e}")
    if np.linalg.det(X) <= 0:
        raise OrthogonalityLost("det X <= 0")
    return X


def check_skew(M: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    M = np.asarray(M, dtype=float)
    scale = max(1.0, float(np.max(np.abs(M))))
    if skew_residual(M) >= tol * scale:
        raise ValueError("matrix is not skew-symmetric")
    return M


def random_rotation(rng, N: int, scale: float = 0.3) -> np.ndarray:
    """``expm`` of a random skew matrix with Frobenius norm ``scale``."""
    A = rng.standard_normal((N, N))
    W = A - A.T
    return expm(scale * W / np.linalg.norm(W))


def spectrum(M: np.ndarray) -> np.ndarray:
    """Sorted eigenvalues of the Hermitian matrix ``i M`` (real for skew M)."""
    return np.linalg.eigvalsh(1j * np.asarray(M))


# ---------------------------------------------------------------------------
# discrete system

def discrete_lagrangian(X, Y, J: BodyTensor) -> float:
    return float(np.trace(X @ J.J @ Y.T))


def angular_velocity(X_k, X_km1) -> np.ndarray:
    return check_rotation(np.asarray(X_k).T @ np.asarray(X_km1))


def momentum(omega, J: BodyTensor) -> np.ndarray:
    omega = np.asarray(omega, dtype=float)
    M = omega.T @ J.J - J.J @ omega
    return 0.5 * (M - M.T)


def solve_omega(M, J: BodyTensor, max_iter: int = 50, tol: float = 1e-10) -> np.ndarray:
    """Near-identity rotation ``omega`` with ``omega^T J - J omega = M``.

    With ``U = omega^T J`` the problem reads ``U - U^T = M``, ``U^T U = J^2``.
    Writing ``U = S + M/2`` with ``S`` symmetric gives

        (S - M/2)(S + M/2) = J^2,

    solved by Newton's method in the eigenbasis of ``J``; each step is the
    Lyapunov (Sylvester) equation ``U^T D + D U = -F(S)``. The branch taken is
    the one whose ``S`` is positive definite, i.e. the continuation of
    ``omega = I`` at ``M = 0``. Finally ``omega = J^{-1} U^T``.

    Raises
    ------
    NoNearIdentityBranch
        If Newton fails to converge or lands on a non-definite ``S``.
    ResidualTooLarge
        If the recovered ``omega`` misses the equation or orthogonality.
    """
    M = check_skew(M)
    Mb = J.to_body(M)
    lam = J.eigvals
    J2 = np.diag(lam**2)
    half = 0.5 * Mb
    start = J2 + half @ half
    S = np.diag(lam)
    if np.min(np.linalg.eigvalsh(0.5 * (start + start.T))) > 0:
        S = np.real(sqrtm(start))
        S = 0.5 * (S + S.T)
    scale = float(lam.max()) ** 2
    for _ in range(max_iter):
        A = S - half
        F = A @ (S + half) - J2
        F = 0.5 * (F + F.T)
        if np.max(np.abs(F)) <= 4 * np.finfo(float).eps * scale:
            break
        D = solve_continuous_lyapunov(A, -F)
        D = 0.5 * (D + D.T)
        S = S + D
        if np.max(np.abs(D)) <= 2 * np.finfo(float).eps * np.max(np.abs(S)):
            break
    else:
        raise NoNearIdentityBranch(f"Newton did not converge in {max_iter} iterations")
    if not np.all(np.isfinite(S)) or np.min(np.linalg.eigvalsh(S)) <= 0:
        raise NoNearIdentityBranch("Newton converged off the positive-definite branch")
    U = S + half
    omega_b = (U / lam[np.newaxis, :]).T  # (U J^{-1})^T in the eigenbasis
    omega = J.from_body(omega_b)
    res = float(np.max(np.abs(omega.T @ J.J - J.J @ omega - M)))
    orth = orthogonality_residual(omega)
    if res >= tol * max(1.0, scale) or orth >= tol:
        raise ResidualTooLarge(f"equation residual {res:.3e}, orthogonality {orth:.3e}")
    if np.linalg.det(omega) <= 0:
        raise NoNearIdentityBranch("solution is not a proper rotation")
    return omega


def mv_step(M_k, omega_k, J: BodyTensor) -> tuple[np.ndarray, np.ndarray]:
    """One step ``M_{k+1} = omega_k M_k omega_k^T``; ``omega_{k+1}`` re-solved from it."""
    M_next = omega_k @ M_k @ omega_k.T
    M_next = 0.5 * (M_next - M_next.T)
    return M_next, solve_omega(M_next, J)


def mv_trajectory(omega0, J: BodyTensor, steps: int):
    """Momenta and angular velocities for ``steps`` steps from ``omega0``.

    Returns arrays of shape ``(steps + 1, N, N)``.
    """
    omega = check_rotation(omega0)
    M = momentum(omega, J)
    Ms, omegas = [M], [omega]
    for _ in range(steps):
        M, omega = mv_step(M, omega, J)
        Ms.append(M)
        omegas.append(omega)
    return np.array(Ms), np.array(omegas)


def reconstruct_frames(omegas, X0=None) -> np.ndarray:
    """Configurations with ``X_{k-1} = X_k omega_k``, i.e. ``X_k = X_{k-1} omega_k^T``.

    ``omegas[k]`` is paired with frame ``k``; ``omegas[0]`` is unused.
    """
    N = omegas[0].shape[0]
    X = np.eye(N) if X0 is None else np.asarray(X0, dtype=float)
    frames = [X]
    for om in omegas[1:]:
        X = X @ om.T
        frames.append(X)
    return np.array(frames)


def discrete_action(frames, J: BodyTensor) -> float:
    return float(sum(discrete_lagrangian(a, b, J) for a, b in zip(frames[:-1], frames[1:])))


# ---------------------------------------------------------------------------
# continuous limit

def angular_velocity_from_momentum(M, J: BodyTensor) -> np.ndarray:
    """Skew ``Omega`` solving ``J Omega + Omega J = M``."""
    lam = J.eigvals
    Ob = J.to_body(np.asarray(M, dtype=float)) / (lam[:, None] + lam[None, :])
    return J.from_body(Ob)


def continuous_rhs(M, J: BodyTensor) -> np.ndarray:
    M = check_skew(M)
    Om = angular_velocity_from_momentum(M, J)
    return M @ Om - Om @ M


def kinetic_energy(M, J: BodyTensor) -> float:
    """Half the pairing ``tr(M Omega^T)``."""
    Om = angular_velocity_from_momentum(M, J)
    return 0.5 * float(np.trace(M @ Om.T))


def rk4_euler_arnold(M0, J: BodyTensor, dt: float, steps: int) -> np.ndarray:
    """Classical RK4 trajectory of shape ``(steps + 1, N, N)``."""
    M = check_skew(M0).copy()
    out = [M]
    f = lambda A: continuous_rhs(0.5 * (A - A.T), J)
    for _ in range(steps):
        k1 = f(M)
        k2 = f(M + 0.5 * dt * k1)
        k3 = f(M + 0.5 * dt * k2)
        k4 = f(M + dt * k3)
        M = M + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
        out.append(M)
    return np.array(out)


def limit_error(M0, J: BodyTensor, eps: float, T: float = 1.0, dt_ref: float = 1e-3) -> float:
    """Sup distance at time ``T`` between ``M_k / eps`` and the continuous flow.

    The discrete run starts from ``eps * M0`` and takes ``round(T / eps)`` steps.
    """
    steps = int(round(T / eps))
    omega = solve_omega(eps * np.asarray(M0), J)
    M = eps * np.asarray(M0, dtype=float)
    for _ in range(steps):
        M, omega = mv_step(M, omega, J)
    ref_steps = max(1, int(round(steps * eps / dt_ref)))
    ref = rk4_euler_arnold(M0, J, steps * eps / ref_steps, ref_steps)[-1]
    return float(np.max(np.abs(M / eps - ref)))
