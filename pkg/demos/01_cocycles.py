"""
From a negative definite function to a cocycle
==============================================

A conditionally negative definite function on a finite group is
encoded by a Gram matrix, and factoring that matrix gives a vector b(s)
for every group element together with orthogonal matrices pi_s.
"""

import numpy as np

from fourier_dilation import build_cocycle, delta_psi, hamming_psi, schoenberg_certificate
from fourier_dilation.groups import make_cyclic, make_dihedral, make_hypercube

# psi = 1 - delta_e on the dihedral group of order 6
psi = delta_psi(make_dihedral(3))
print("psi:", psi.values)
print("Gromov kernel eigenvalues:", np.round(psi.certify().eigenvalues, 6))

# the kernel has rank 5, so the cocycle lives in R^5
c = build_cocycle(psi)
print("dimension:", c.dim)
print("|b(s)|^2 :", np.round((c.b**2).sum(axis=1), 12))

# every defining identity holds to round-off
for name, value in c.residuals(psi).items():
    print(f"  {name:14s} {value:.1e}")

# on the hypercube, Hamming weight gives the coordinate cocycle up to rotation
cube = make_hypercube(3)
hc = build_cocycle(hamming_psi(cube))
print("hypercube dim:", hc.dim)
print("Gram of b:\n", np.round(hc.b @ hc.b.T).astype(int))

# exp(-t psi) is positive definite for every t (Schoenberg)
for t, lo in schoenberg_certificate(delta_psi(make_cyclic(2))).items():
    print(f"t={t:<4} min eigenvalue {lo:.10f}")
