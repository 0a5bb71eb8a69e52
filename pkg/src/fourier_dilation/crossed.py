"""The crossed product ``L^inf(Omega) x|_alpha G`` on finitely represented elements.

An element is a finite sum ``sum_s f_s x| lambda_s`` with Weyl-polynomial
fibers ``f_s``. The group acts on the Gaussian algebra by second quantization
of the cocycle's orthogonal representation, ``alpha_s = Gamma(Id (x) pi_s)``,
and the multiplication is twisted by it:

    (f x| lambda_s)(g x| lambda_r) = f alpha_s(g) x| lambda_{sr}.

Since G is finite, the Plancherel weight is the finite trace
``x -> E(f_e)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Mapping

import numpy as np

from .cocycle import CndFunction, Cocycle, CocycleConstructionError, build_cocycle
from .groups import FiniteGroup, GroupAlgebraElement, GroupMismatchError
from .weyl import (
    StepVector,
    WeylPolynomial,
    as_time,
    conditional_expectation,
    conditional_expectation_after,
    expectation,
    l2_norm,
    second_quantize,
    weyl_adjoint,
    weyl_mul,
)

SQRT2 = math.sqrt(2.0)


class ContextMismatchError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class DilationContext:
    """The data (G, psi, H = R^d, pi, b) the dilation is built from."""

    group: FiniteGroup
    psi: CndFunction
    cocycle: Cocycle
    tolerance: float = 1e-9
    horizon: Fraction | None = None
    check: bool = field(default=True, repr=False)

    def __post_init__(self):
        if self.horizon is not None:
            object.__setattr__(self, "horizon", as_time(self.horizon))
            if self.horizon <= 0:
                raise ValueError("horizon must be positive")
        if not self.check:
            return
        if not (self.group.same_as(self.psi.group) and self.group.same_as(self.cocycle.group)):
            raise GroupMismatchError("psi and cocycle must live over the context group")
        res = self.cocycle.residuals(self.psi)
        worst = max(res.values(), default=0.0)
        if worst > 1e-9:
            bad = max(res, key=res.get)
            raise CocycleConstructionError(f"cocycle inconsistent with psi: {bad} residual {worst:.2e}")

    @classmethod
    def build(cls, psi: CndFunction, tolerance: float = 1e-9, horizon=None, rank_tol: float = 1e-10):
        return cls(psi.group, psi, build_cocycle(psi, rank_tol), tolerance, horizon)

    @property
    def dim(self) -> int:
        return self.cocycle.dim

    def corrupted(self, pi_entry: tuple[int, int, int] | None = None, psi_index: int | None = None,
                  eps: float = 1e-3) -> "DilationContext":
        """Negative-control copy: shift one pi_s entry and/or one psi value, without rebuilding."""
        cocycle, psi = self.cocycle, self.psi
        if pi_entry is not None:
            cocycle = cocycle.perturbed(*pi_entry, eps=eps)
        if psi_index is not None:
            vals = psi.values.copy()
            vals[psi_index] += eps
            psi = CndFunction(psi.group, vals, {"kind": "table", "values": vals.tolist()})
        return replace(self, psi=psi, cocycle=cocycle, check=False)

    def weyl_window(self, s: int, a, b) -> WeylPolynomial:
        """``exp(sqrt2 i W(1_(a,b] (x) b(s)))``."""
        return WeylPolynomial.exp(StepVector.indicator(a, b, SQRT2 * self.cocycle.b[s]))


class CrossedElement:
    """``sum_s f_s x| lambda_s`` with canonical (nonzero) fibers."""

    __slots__ = ("ctx", "comps")

    def __init__(self, ctx: DilationContext, comps: Mapping[int, WeylPolynomial] | None = None):
        self.ctx = ctx
        d = ctx.dim
        out = {}
        for s, f in (comps or {}).items():
            s = int(s)
            if not 0 <= s < ctx.group.order:
                raise IndexError(f"element {s} not in {ctx.group.name}")
            if f.dim != d:
                raise ValueError(f"fiber dim {f.dim} != cocycle dim {d}")
            if s in out:
                f = out[s] + f
            out[s] = f
        self.comps = {s: f for s, f in sorted(out.items()) if not f.is_zero()}

    @classmethod
    def unit(cls, ctx: DilationContext) -> "CrossedElement":
        return cls(ctx, {ctx.group.identity: WeylPolynomial.one(ctx.dim)})

    def __getitem__(self, s: int) -> WeylPolynomial:
        return self.comps.get(s, WeylPolynomial.zero(self.ctx.dim))

    def __repr__(self) -> str:
        body = " + ".join(f"[{f!r}]⋊λ{s}" for s, f in self.comps.items())
        return body or "0"

    def _check(self, other: "CrossedElement"):
        if self.ctx is not other.ctx:
            raise ContextMismatchError("crossed-product operands come from different contexts")

    def __add__(self, other):
        return cp_add(self, other)

    def __sub__(self, other):
        return cp_add(self, cp_scale(other, -1.0))

    def __mul__(self, other):
        if isinstance(other, CrossedElement):
            return cp_mul(self, other)
        return cp_scale(self, other)

    def __rmul__(self, scalar):
        return cp_scale(self, scalar)

    def adjoint(self) -> "CrossedElement":
        return cp_adjoint(self)

    def to_json(self) -> dict:
        return {str(s): f.to_json() for s, f in self.comps.items()}

    @classmethod
    def from_json(cls, ctx: DilationContext, data: Mapping) -> "CrossedElement":
        return cls(ctx, {int(s): WeylPolynomial.from_json(f, ctx.dim) for s, f in data.items()})


def alpha(s: int, x: WeylPolynomial, ctx: DilationContext) -> WeylPolynomial:
    """``alpha_s = Gamma(Id (x) pi_s)``."""
    if s == ctx.group.identity and ctx.check:
        return x
    # corrupted contexts may carry a slightly non-orthogonal pi_s on purpose
    tol = 1e-10 if ctx.check else math.inf
    return second_quantize(ctx.cocycle.pi[s], x, tol=tol)


def cp_add(x: CrossedElement, y: CrossedElement) -> CrossedElement:
    x._check(y)
    comps = dict(x.comps)
    for s, f in y.comps.items():
        comps[s] = comps[s] + f if s in comps else f
    return CrossedElement(x.ctx, comps)


def cp_scale(x: CrossedElement, scalar: complex) -> CrossedElement:
    return CrossedElement(x.ctx, {s: scalar * f for s, f in x.comps.items()})


def cp_mul(x: CrossedElement, y: CrossedElement) -> CrossedElement:
    x._check(y)
    ctx = x.ctx
    mult = ctx.group.mult
    out: dict[int, list] = {}
    for s, f in x.comps.items():
        for r, g in y.comps.items():
            term = weyl_mul(f, alpha(s, g, ctx))
            out.setdefault(int(mult[s, r]), []).extend(term.terms)
    return CrossedElement(ctx, {sr: WeylPolynomial(ctx.dim, terms) for sr, terms in out.items()})


def cp_adjoint(x: CrossedElement) -> CrossedElement:
    """``(f x| lambda_s)^* = alpha_{s^-1}(f^*) x| lambda_{s^-1}``."""
    ctx = x.ctx
    inv = ctx.group.inv
    return CrossedElement(ctx, {int(inv[s]): alpha(int(inv[s]), weyl_adjoint(f), ctx) for s, f in x.comps.items()})


def cp_trace(x: CrossedElement) -> complex:
    """Plancherel trace: expectation of the identity fiber."""
    return expectation(x[x.ctx.group.identity])


def plancherel_pairing(x: CrossedElement, y: CrossedElement) -> complex:
    """``sum_s E(f_s^* g_s)``; equals ``cp_trace(x^* y)``."""
    x._check(y)
    return complex(sum(expectation(weyl_mul(weyl_adjoint(f), y[s])) for s, f in x.comps.items()))


def cp_distance(x: CrossedElement, y: CrossedElement) -> float:
    """Largest fiberwise L^2(Omega) distance."""
    x._check(y)
    keys = set(x.comps) | set(y.comps)
    return max((l2_norm(x[s] - y[s]) for s in keys), default=0.0)


def cp_l2_norm(x: CrossedElement) -> float:
    """``cp_trace(x^* x)^(1/2)``, computed fiberwise."""
    return math.sqrt(sum(l2_norm(f) ** 2 for f in x.comps.values()))


def embed_J(a: GroupAlgebraElement, ctx: DilationContext) -> CrossedElement:
    if not a.group.same_as(ctx.group):
        raise GroupMismatchError("group algebra element is over a different group")
    one = WeylPolynomial.one(ctx.dim)
    return CrossedElement(ctx, {s: c * one for s, c in a.coeffs.items()})


def conditional_E_t(x: CrossedElement, t) -> CrossedElement:
    """``E_{F_t} x| Id``: condition every fiber on the filtration at time t."""
    t = as_time(t)
    return CrossedElement(x.ctx, {s: conditional_expectation(f, t) for s, f in x.comps.items()})


def conditional_E_after(x: CrossedElement, t) -> CrossedElement:
    """Decreasing-filtration conditional expectation: keep only increments after t."""
    t = as_time(t)
    return CrossedElement(x.ctx, {s: conditional_expectation_after(f, t) for s, f in x.comps.items()})


def _window_multiply(x: CrossedElement, a, b) -> CrossedElement:
    ctx = x.ctx
    return CrossedElement(ctx, {s: weyl_mul(ctx.weyl_window(s, a, b), f) for s, f in x.comps.items()})


def takesaki_U(t, x: CrossedElement) -> CrossedElement:
    """Multiply fiber s by ``exp(sqrt2 i W_t(b(s)))``."""
    return _window_multiply(x, 0, as_time(t))


def pi_t(t, a: GroupAlgebraElement, ctx: DilationContext) -> CrossedElement:
    return takesaki_U(t, embed_J(a, ctx))


def semigroup_T(t, a: GroupAlgebraElement, ctx: DilationContext) -> GroupAlgebraElement:
    """Fourier multiplier ``lambda_s -> exp(-t psi(s)) lambda_s``."""
    t = float(t)
    if t < 0:
        raise ValueError("semigroup time must be nonnegative")
    psi = ctx.psi.values
    return GroupAlgebraElement(a.group, {s: math.exp(-t * psi[s]) * c for s, c in a.coeffs.items()})


def pi_t_reversed(t, a: GroupAlgebraElement, ctx: DilationContext) -> CrossedElement:
    """Reversed embedding: fiber s carries ``exp(sqrt2 i W(1_(t,C] (x) b(s)))`` for horizon C."""
    if ctx.horizon is None:
        raise ValueError("reversed dilation needs a context horizon")
    t = as_time(t)
    if t > ctx.horizon:
        raise ValueError(f"time {t} beyond horizon {ctx.horizon}")
    return _window_multiply(embed_J(a, ctx), t, ctx.horizon)
