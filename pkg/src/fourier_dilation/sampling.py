"""Seeded random instances for property checks."""
from __future__ import annotations

from fractions import Fraction

import numpy as np

from .crossed import CrossedElement, DilationContext
from .groups import FiniteGroup, GroupAlgebraElement
from .weyl import StepVector, WeylPolynomial


def random_complex(rng: np.random.Generator, size=None):
    return rng.normal(size=size) + 1j * rng.normal(size=size)


def random_group_algebra(rng: np.random.Generator, g: FiniteGroup) -> GroupAlgebraElement:
    return GroupAlgebraElement.from_vector(g, random_complex(rng, g.order))


def random_step_vector(rng: np.random.Generator, dim: int, max_pieces: int = 3,
                       denominator: int = 4, horizon: int = 2, scale: float = 1.0) -> StepVector:
    """Step vector with breakpoints in ``(1/denominator) Z`` inside ``[0, horizon]``."""
    if dim == 0:
        return StepVector.zero(0)
    slots = denominator * horizon
    m = int(rng.integers(1, max_pieces + 1))
    cuts = sorted(rng.choice(np.arange(1, slots + 1), size=min(m, slots), replace=False))
    breaks = [Fraction(0)] + [Fraction(int(c), denominator) for c in cuts]
    pieces = scale * rng.normal(size=(len(breaks) - 1, dim))
    return StepVector(dim, breaks, pieces)


def random_weyl(rng: np.random.Generator, dim: int, terms: int = 3, **kw) -> WeylPolynomial:
    return WeylPolynomial(
        dim, [(complex(random_complex(rng)), random_step_vector(rng, dim, **kw)) for _ in range(terms)]
    )


def random_crossed(rng: np.random.Generator, ctx: DilationContext, support: int = 3,
                   terms: int = 2, **kw) -> CrossedElement:
    n = ctx.group.order
    keys = rng.choice(n, size=min(support, n), replace=False)
    return CrossedElement(ctx, {int(s): random_weyl(rng, ctx.dim, terms, **kw) for s in keys})
