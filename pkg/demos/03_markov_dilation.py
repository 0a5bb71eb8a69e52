"""
A Markov dilation of the heat semigroup on a finite group
=========================================================

T_t multiplies lambda_s by e^{-t psi(s)}. The embedding pi_t sends
lambda_s to e^{i sqrt2 W(1_(0,t] b(s))} x| lambda_s inside the crossed
product, and conditioning on the Brownian past at time u recovers
pi_u T_{t-u}.
"""

from fractions import Fraction

from fourier_dilation import DilationContext, delta_psi, verify_markov, verify_reversed
from fourier_dilation.dilation import explain
from fourier_dilation.groups import make_cyclic, make_dihedral

# the smallest case: Z2 with psi(g) = 1
ctx = DilationContext.build(delta_psi(make_cyclic(2)))
print(explain(ctx, 1, Fraction(1, 2), 1))

# all group elements, random inputs and products on the dyadic grid
d3 = DilationContext.build(delta_psi(make_dihedral(3)), horizon=2)
rep = verify_markov(d3)
print(f"\nforward: {len(rep.checks)} checks, max residual {rep.max_residual:.1e}")
rep = verify_reversed(d3)
print(f"reversed: {len(rep.checks)} checks, max residual {rep.max_residual:.1e}")

# shifting one entry of pi_s by 1e-3 breaks the identity
bad = d3.corrupted(pi_entry=(1, 0, 0))
rep = verify_markov(bad)
print(f"corrupted pi: passed={rep.passed}, worst {rep.max_residual:.1e}")
