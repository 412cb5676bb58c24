"""
The discrete rigid body
=======================

The Lagrangian ``tr(X_k J X_{k+1}^T)`` on SO(N) gives a discrete Euler
equation ``M_{k+1} = omega_k M_k omega_k^T``. Each step solves the
factorisation ``M = omega^T J - J omega`` for the near-identity rotation.
"""

import numpy as np

from virlab import rigid_body as rb

J = rb.BodyTensor.diag(1.0, 2.0, 3.0)
rng = np.random.default_rng(1)
omega0 = rb.random_rotation(rng, 3, scale=0.3)

Ms, omegas = rb.mv_trajectory(omega0, J, 1000)
spec = np.array([rb.spectrum(M) for M in Ms])
print("spectrum of M_0:", spec[0])
print("spectrum drift over 1000 steps:", np.max(np.abs(spec - spec[0])))
print("worst |omega^T omega - I|:", max(rb.orthogonality_residual(o) for o in omegas))

# frames and the discrete action
X = rb.reconstruct_frames(omegas[:6])
print("action of the first five steps:", rb.discrete_action(X, J))

# scaling the momentum by eps and taking 1/eps steps approaches the
# continuous Euler-Arnold flow
M0 = rb.momentum(rb.random_rotation(rng, 3, 1.0), J)
eps = np.array([0.1, 0.03, 0.01, 0.003])
err = np.array([rb.limit_error(M0, J, e) for e in eps])
for e, r in zip(eps, err):
    print(f"eps = {e:<6g} error {r:.3e}")
print("observed order:", np.polyfit(np.log(eps), np.log(err), 1)[0])
