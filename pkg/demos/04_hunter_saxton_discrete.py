"""
A discrete Hunter-Saxton system
===============================

With ``H((f, F)) = F^2 + int sqrt(f') dx`` the right-invariant Lagrangian
``L(x, y) = H(x y^{-1})`` is symmetric. Its Euler-Lagrange equations reduce
to a periodic linear ODE for the new velocity. We step it, embed the steps
in a trajectory, and check that the discrete action is stationary.
"""

import numpy as np

from virlab import circle as cc
from virlab import discrete as dv
from virlab.virasoro import VirasoroElement

rng = np.random.default_rng(3)
w0 = cc.random_diffeo(rng, 256, modes=4, amplitude=0.2, max_slope=0.3, rotate=False)
V = dv.LagrangianDensityV.sqrt()
Omega = 1.0

print("inverse invariance of H:", dv.check_inverse_invariance(V, trials=20).invariant)

omegas, diags = dv.hs_trajectory(w0, Omega, steps=3)
for k, d in enumerate(diags, start=1):
    print(f"step {k}: C = {d.C:.10f}  min Psi = {d.psi_min:.4f}  "
          f"EL2 residual {dv.el2_residual(omegas[k - 1], omegas[k], Omega):.1e}")

seq = dv.assemble_sequence(omegas, Omega)
for k in range(1, len(seq) - 1):
    print(f"stationarity at point {k}: {dv.stationarity_residual(V, seq, k):.1e}")

# a small bump on one point breaks stationarity by orders of magnitude
x = seq[2]
bad = seq.replace(2, VirasoroElement(cc.CircleDiffeo(x.f.u + 0.05 * np.sin(3 * x.f.u.nodes)), x.F))
print("perturbed trajectory:", dv.stationarity_residual(V, bad, 2))

# the Diff(S^1) variant has a closed-form constant c = (1/pi) int sqrt(w')
print("\nsimple discretisation: c =", dv.simple_constant(w0),
      " root-find:", dv.simple_constant_rootfind(w0))
simple = dv.simple_trajectory(w0, 2)
seq = dv.assemble_sequence(simple, 0.0)
print("stationarity (forward, reversed):",
      dv.stationarity_residual(V, seq, 1), dv.stationarity_residual(V, seq.reversed(), 1))
