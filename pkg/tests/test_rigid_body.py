import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.linalg import expm

from virlab import rigid_body as rb
from virlab.errors import OrthogonalityLost

J123 = rb.BodyTensor.diag(1.0, 2.0, 3.0)


def rot2(theta):
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s], [s, c]])


def random_spd(rng, N):
    A = rng.standard_normal((N, N))
    return rb.BodyTensor(A @ A.T + np.eye(N))


def test_body_tensor_validation():
    with pytest.raises(ValueError):
        rb.BodyTensor(np.array([[1.0, 0.5], [0.0, 1.0]]))
    with pytest.raises(ValueError):
        rb.BodyTensor.diag(1.0, -1.0)


def test_lagrangian_examples(rng):
    I3 = np.eye(3)
    assert rb.discrete_lagrangian(I3, I3, J123) == pytest.approx(6.0)
    X = rb.random_rotation(rng, 3, 1.0)
    assert rb.discrete_lagrangian(X, X, J123) == pytest.approx(6.0)
    Y = rb.random_rotation(rng, 3, 1.0)
    assert rb.discrete_lagrangian(X, Y, rb.BodyTensor(I3)) == pytest.approx(np.trace(X @ Y.T))


def test_angular_velocity_examples(rng):
    X = rb.random_rotation(rng, 4, 1.0)
    assert np.allclose(rb.angular_velocity(X, X), np.eye(4), atol=1e-14)
    assert np.allclose(rb.angular_velocity(np.eye(4), X), X)
    w = rb.angular_velocity(rb.random_rotation(rng, 4, 1.0), X)
    assert rb.orthogonality_residual(w) < 1e-12
    with pytest.raises(OrthogonalityLost):
        rb.angular_velocity(np.eye(2) * 1.1, np.eye(2))


def test_momentum_examples(rng):
    assert np.all(rb.momentum(np.eye(3), J123) == 0)
    J = rb.BodyTensor.diag(1.0, 2.0)
    for theta in (0.1, -0.4, 1.2):
        M = rb.momentum(rot2(theta), J)
        # omega^T J - J omega for the standard rotation matrix
        assert M[0, 1] == pytest.approx(3.0 * np.sin(theta), abs=1e-15)
    M = rb.momentum(rb.random_rotation(rng, 5), random_spd(rng, 5))
    assert rb.skew_residual(M) < 1e-14


def test_solve_omega_examples(rng):
    assert np.allclose(rb.solve_omega(np.zeros((3, 3)), J123), np.eye(3), atol=1e-15)
    J = rb.BodyTensor.diag(1.0, 2.0)
    M = np.array([[0.0, 3 * np.sin(0.1)], [-3 * np.sin(0.1), 0.0]])
    assert np.max(np.abs(rb.solve_omega(M, J) - rot2(0.1))) < 1e-12


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(2, 6))
def test_solve_omega_round_trip(seed, N):
    rng = np.random.default_rng(seed)
    J = random_spd(rng, N)
    om = rb.random_rotation(rng, N, 0.3)
    assert np.max(np.abs(rb.solve_omega(rb.momentum(om, J), J) - om)) < 1e-9


def test_mv_equilibrium_and_isospectral(rng):
    Ms, oms = rb.mv_trajectory(np.eye(3), J123, 5)
    assert np.all(Ms == 0) and np.allclose(oms, np.eye(3))
    M = rb.momentum(rb.random_rotation(rng, 3), J123)
    om = rb.solve_omega(M, J123)
    M1, _ = rb.mv_step(M, om, J123)
    assert np.max(np.abs(rb.spectrum(M1) - rb.spectrum(M))) < 1e-12


def test_mv_long_run(rng):
    Ms, oms = rb.mv_trajectory(rb.random_rotation(rng, 3, 0.3), J123, 1000)
    s0 = rb.spectrum(Ms[0])
    assert max(np.max(np.abs(rb.spectrum(M) - s0)) for M in Ms) < 1e-10
    assert max(rb.orthogonality_residual(o) for o in oms) < 1e-9


def test_variational_consistency(rng):
    """The action is stationary at interior frames of a computed trajectory."""
    J = random_spd(rng, 3)
    Ms, oms = rb.mv_trajectory(rb.random_rotation(rng, 3, 0.4), J, 6)
    X = rb.reconstruct_frames(oms, rb.random_rotation(rng, 3, 1.0))
    S0 = rb.discrete_action(X, J)
    h = 1e-6
    for k in range(1, len(X) - 1):
        for _ in range(5):
            A = rng.standard_normal((3, 3))
            A = (A - A.T) / np.linalg.norm(A - A.T)
            Xp, Xm = X.copy(), X.copy()
            Xp[k] = X[k] @ expm(h * A)
            Xm[k] = X[k] @ expm(-h * A)
            dS = (rb.discrete_action(Xp, J) - rb.discrete_action(Xm, J)) / (2 * h)
            assert abs(dS) / max(1.0, abs(S0)) < 1e-6


def test_variational_negative_control(rng):
    J = random_spd(rng, 3)
    _, oms = rb.mv_trajectory(rb.random_rotation(rng, 3, 0.4), J, 4)
    X = rb.reconstruct_frames(oms)
    X[2] = X[2] @ expm(0.2 * np.array([[0, 1, 0], [-1, 0, 0], [0, 0, 0.0]]))
    h, worst = 1e-6, 0.0
    for A in (np.array([[0, 1, 0], [-1, 0, 0], [0, 0, 0.0]]),
              np.array([[0, 0, 1], [0, 0, 0], [-1, 0, 0.0]]),
              np.array([[0, 0, 0], [0, 0, 1], [0, -1, 0.0]])):
        Xp, Xm = X.copy(), X.copy()
        Xp[2], Xm[2] = X[2] @ expm(h * A), X[2] @ expm(-h * A)
        worst = max(worst, abs(rb.discrete_action(Xp, J) - rb.discrete_action(Xm, J)) / (2 * h))
    assert worst > 1e-3


def test_continuous_examples(rng):
    assert np.all(rb.continuous_rhs(np.zeros((3, 3)), J123) == 0)
    A = rng.standard_normal((3, 3))
    M = A - A.T
    assert np.max(np.abs(rb.continuous_rhs(M, rb.BodyTensor(np.eye(3))))) < 1e-15
    J = random_spd(rng, 4)
    B = rng.standard_normal((4, 4))
    M = B - B.T
    Om = rb.angular_velocity_from_momentum(M, J)
    assert np.max(np.abs(J.J @ Om + Om @ J.J - M)) < 1e-12


def test_rk4_invariants(rng):
    A = rng.standard_normal((3, 3))
    M0 = 0.5 * (A - A.T)
    traj = rb.rk4_euler_arnold(M0, J123, 1e-3, 1000)
    cas = [np.trace(M @ M) for M in traj]
    en = [rb.kinetic_energy(M, J123) for M in traj]
    assert max(abs(c - cas[0]) for c in cas) < 1e-10
    assert max(abs(e - en[0]) for e in en) < 1e-8
    assert np.all(rb.rk4_euler_arnold(np.zeros((3, 3)), J123, 1e-2, 10) == 0)


def test_limit_order(rng):
    M0 = rb.momentum(rb.random_rotation(rng, 3, 1.0), J123)
    eps = np.array([0.1, 0.03, 0.01])
    errs = [rb.limit_error(M0, J123, e) for e in eps]
    assert np.polyfit(np.log(eps), np.log(errs), 1)[0] >= 0.9
