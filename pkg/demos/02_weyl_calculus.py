"""
Symbolic Gaussian calculus
==========================

Weyl exponentials e^{iW(h)} with step-function arguments multiply by
adding exponents and integrate in closed form, so expectations and
conditional expectations are exact up to float round-off.
"""

import math
from fractions import Fraction

import numpy as np

from fourier_dilation import StepVector, WeylPolynomial
from fourier_dilation.weyl import conditional_expectation, expectation, l2_distance

# h = 1_(0,1] on R^1, so E[e^{iW(h)}] = e^{-1/2}
h = StepVector.indicator(0, 1, [1.0])
x = WeylPolynomial.exp(h)
print("E[e^{iW(h)}] =", expectation(x), " e^{-1/2} =", math.exp(-0.5))

# products add exponents; a symbol times its conjugate is 1
print("x * x^* =", x * x.adjoint())

# conditioning at u keeps the past and damps by the future increment
u = Fraction(1, 2)
print("E_u x =", conditional_expectation(x, u))

# a two-term polynomial with a breakpoint at 1/3
g = StepVector(2, (0, Fraction(1, 3), 1), np.array([[1.0, 0.0], [0.0, -2.0]]))
y = WeylPolynomial(2, [(1.0, g), (0.5j, g * 0.5)])
print("y =", y)
print("E[y] =", expectation(y))
print("tower rule gap:",
      l2_distance(conditional_expectation(conditional_expectation(y, 1), u), conditional_expectation(y, u)))
