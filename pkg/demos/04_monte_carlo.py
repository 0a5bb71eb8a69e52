"""
Checking the symbolic calculus by simulation
============================================

Brownian increments are sampled on the breakpoint grid with a
counter-based generator, so every estimate is reproducible from its seed.
"""

from fractions import Fraction

import numpy as np

from fourier_dilation.montecarlo import cross_validate_conditional, cross_validate_expectation
from fourier_dilation.sampling import random_weyl
from fourier_dilation.weyl import StepVector

rng = np.random.default_rng(7)
x = random_weyl(rng, 2, 4)
for n in (10_000, 40_000, 160_000):
    r = cross_validate_expectation(x, n, seed=1)
    print(f"N={n:>7}  symbolic {r.symbolic:.5f}  estimate {r.estimate:.5f}  "
          f"stderr {r.stderr_re:.1e}  z {r.z:.2f}")

# conditional expectation tested against a past-measurable probe
u = Fraction(1, 2)
probe = StepVector.indicator(0, u, [1.0, -0.5])
(r,) = cross_validate_conditional(x, u, [probe], 100_000, seed=2)
print(f"pairing with probe: symbolic {r.symbolic:.5f}  estimate {r.estimate:.5f}  z {r.z:.2f}")
