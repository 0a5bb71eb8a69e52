import json
import math
from fractions import Fraction as F

import numpy as np
import pytest

from fourier_dilation import crossed as cp
from fourier_dilation.cocycle import CocycleConstructionError, build_cocycle, delta_psi, hamming_psi
from fourier_dilation.crossed import ContextMismatchError, CrossedElement, DilationContext
from fourier_dilation.groups import GroupAlgebraElement, GroupMismatchError, make_cyclic, make_dihedral, make_hypercube
from fourier_dilation.sampling import random_crossed, random_group_algebra
from fourier_dilation.weyl import StepVector, WeylPolynomial, l2_distance


@pytest.fixture(scope="module")
def z2():
    return DilationContext.build(delta_psi(make_cyclic(2)), horizon=2)


@pytest.fixture(scope="module")
def d3():
    return DilationContext.build(delta_psi(make_dihedral(3)), horizon=2)


def test_z2_action_flips_exponent(z2):
    # pi_g = -1, so alpha_g(e^{iW(h)}) = e^{-iW(h)}
    h = StepVector.indicator(0, 1, [0.8])
    x = CrossedElement(z2, {1: WeylPolynomial.one(1)})
    y = CrossedElement(z2, {0: WeylPolynomial.exp(h)})
    prod = x * y
    assert list(prod.comps) == [1]
    assert l2_distance(prod[1], WeylPolynomial.exp(-h)) == 0
    assert cp.cp_distance(x * x, CrossedElement.unit(z2)) == 0
    assert cp.cp_distance(x.adjoint(), x) == 0


def test_pi_t_expectation_is_semigroup(d3):
    # E(fiber) = exp(-|sqrt2 1_(0,t] b(s)|^2/2) = exp(-t psi(s))
    g = d3.group
    for s in range(g.order):
        for t in (F(0), F(1, 3), F(2)):
            x = cp.pi_t(t, GroupAlgebraElement.basis(g, s), d3)
            coeff = cp.conditional_E_t(x, 0)[s]
            assert abs(coeff.terms[0][0] - math.exp(-float(t) * d3.psi[s])) < 1e-14
            assert abs(cp.cp_trace(x) - (1.0 if s == g.identity else 0.0)) < 1e-15


def test_z2_scalar_value(z2):
    # E_{1/2} pi_1(lambda_g): fiber coefficient e^{-1/2}, exponent sqrt2 b(g) on (0, 1/2]
    a = GroupAlgebraElement.basis(z2.group, 1)
    lhs = cp.conditional_E_t(cp.pi_t(1, a, z2), F(1, 2))
    (coeff, h), = lhs[1].terms
    assert abs(coeff - math.exp(-0.5)) < 1e-12
    assert h.same_structure(StepVector.indicator(0, F(1, 2), math.sqrt(2) * z2.cocycle.b[1]))
    rhs = cp.pi_t(F(1, 2), cp.semigroup_T(F(1, 2), a, z2), z2)
    assert cp.cp_distance(lhs, rhs) < 1e-15


@pytest.mark.parametrize("seed", range(5))
def test_crossed_algebra_laws(d3, seed):
    rng = np.random.default_rng(seed)
    x, y, z = (random_crossed(rng, d3) for _ in range(3))
    assert cp.cp_distance((x * y) * z, x * (y * z)) < 1e-10
    assert cp.cp_distance((x * y).adjoint(), y.adjoint() * x.adjoint()) < 1e-10
    assert abs(cp.cp_trace(x * y) - cp.cp_trace(y * x)) < 1e-10
    assert abs(cp.cp_trace(x.adjoint() * y) - cp.plancherel_pairing(x, y)) < 1e-12
    assert abs(cp.cp_trace(x.adjoint() * x).real - cp.cp_l2_norm(x) ** 2) < 1e-10


@pytest.mark.parametrize("seed", range(5))
def test_pi_t_is_trace_preserving_star_homomorphism(d3, seed):
    rng = np.random.default_rng(seed)
    a, b = random_group_algebra(rng, d3.group), random_group_algebra(rng, d3.group)
    t = F(int(rng.integers(0, 8)), 4)
    pa, pb = cp.pi_t(t, a, d3), cp.pi_t(t, b, d3)
    assert cp.cp_distance(pa * pb, cp.pi_t(t, a * b, d3)) < 1e-9
    assert cp.cp_distance(pa.adjoint(), cp.pi_t(t, a.adjoint(), d3)) < 1e-12
    assert abs(cp.cp_trace(pa) - a.trace()) < 1e-12


def test_reversed_embedding(d3):
    a = GroupAlgebraElement.basis(d3.group, 2)
    x = cp.pi_t_reversed(F(1, 2), a, d3)
    (_, h), = x[2].terms
    assert h.breaks == (0, F(1, 2), 2)
    with pytest.raises(ValueError):
        cp.pi_t_reversed(3, a, d3)
    ctx = DilationContext.build(d3.psi)
    with pytest.raises(ValueError):
        cp.pi_t_reversed(F(1, 2), a, ctx)


def test_context_validation():
    psi = delta_psi(make_cyclic(3))
    c = build_cocycle(psi)
    with pytest.raises(GroupMismatchError):
        DilationContext(make_cyclic(4), psi, c)
    with pytest.raises(CocycleConstructionError):
        DilationContext(psi.group, psi, c.perturbed(1, 0, 0, 1e-3))
    with pytest.raises(ValueError):
        DilationContext(psi.group, psi, c, horizon=0)
    bad = DilationContext(psi.group, psi, c).corrupted(pi_entry=(1, 0, 0))
    assert not bad.check and bad.cocycle.pi[1, 0, 0] != c.pi[1, 0, 0]


def test_context_mismatch(z2):
    other = DilationContext.build(delta_psi(make_cyclic(2)))
    with pytest.raises(ContextMismatchError):
        CrossedElement.unit(z2) * CrossedElement.unit(other)
    with pytest.raises(GroupMismatchError):
        cp.embed_J(GroupAlgebraElement.basis(make_cyclic(3), 1), z2)


def test_crossed_json_roundtrip():
    ctx = DilationContext.build(hamming_psi(make_hypercube(2)))
    x = random_crossed(np.random.default_rng(3), ctx)
    back = CrossedElement.from_json(ctx, json.loads(json.dumps(x.to_json())))
    assert cp.cp_distance(x, back) == 0


def test_semigroup_rejects_negative_time(z2):
    with pytest.raises(ValueError):
        cp.semigroup_T(-1, GroupAlgebraElement.basis(z2.group, 1), z2)
