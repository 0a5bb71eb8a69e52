"""Verification of the Markov dilation identities, with JSON reports.

Forward identity, for 0 <= u <= t:   E_u pi_t = pi_u T_{t-u}
Reversed identity, t <= u <= C:      E^u pi^rev_t = pi^rev_u T_{u-t}

where E^u conditions on the increments after u (decreasing filtration) and
``pi^rev_t`` uses the Brownian window (t, C].
"""
from __future__ import annotations

import json
import math
import time
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from . import crossed as cp
from .cocycle import SCHOENBERG_TIMES, CndFunction, delta_psi, hamming_psi, schoenberg_certificate
from .crossed import CrossedElement, DilationContext
from .groups import (
    GroupAlgebraElement,
    make_cyclic,
    make_dihedral,
    make_hypercube,
    make_symmetric,
)
from .sampling import random_crossed, random_group_algebra, random_weyl
from .weyl import StepVector, WeylPolynomial, as_time, conditional_expectation, expectation, l2_distance

SCHEMA_VERSION = 1
DEFAULT_GRID = tuple(Fraction(x) for x in ("0", "1/4", "1/2", "1", "3/2", "2"))

# per-property tolerances of the structural suites
STRUCTURE_TOLERANCES = {
    "cocycle": 1e-9,
    "weyl": 1e-10,
    "trace_property": 1e-10,
    "plancherel": 1e-12,
    "trace_preservation": 1e-12,
    "homomorphism": 1e-9,
    "schoenberg": 1e-10,
    "filtration": 1e-10,
}


def builtin_pairs() -> list[CndFunction]:
    """Every (group, psi) pair the acceptance sweep covers."""
    pairs = [delta_psi(make_cyclic(n)) for n in range(2, 9)]
    pairs += [hamming_psi(make_hypercube(k)) for k in (1, 2, 3)]
    pairs += [delta_psi(make_dihedral(3)), delta_psi(make_symmetric(3))]
    return pairs


@dataclass
class Check:
    kind: str
    params: dict
    residual: float
    tolerance: float
    passed: bool = field(init=False)

    def __post_init__(self):
        self.residual = float(self.residual)
        self.passed = bool(self.residual <= self.tolerance)


@dataclass
class DilationReport:
    group: str
    psi: dict
    dim: int
    tolerance: float
    checks: list[Check] = field(default_factory=list)
    wall_time: float = 0.0
    extra: dict = field(default_factory=dict)

    @property
    def max_residual(self) -> float:
        return max((c.residual for c in self.checks), default=0.0)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]

    def worst(self, kind: str | None = None) -> float:
        return max((c.residual for c in self.checks if kind is None or c.kind == kind), default=0.0)

    def merge(self, other: "DilationReport") -> "DilationReport":
        self.checks.extend(other.checks)
        self.wall_time += other.wall_time
        self.extra.update(other.extra)
        return self

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "group": self.group,
            "psi": self.psi,
            "cocycle_dim": self.dim,
            "tolerance": self.tolerance,
            "passed": self.passed,
            "max_residual": self.max_residual,
            "checks": [asdict(c) for c in self.checks],
            "wall_time": self.wall_time,
            **self.extra,
        }

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, default=_json_default, **kw)


def _json_default(obj):
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    raise TypeError(f"not JSON serializable: {type(obj)}")


def _new_report(ctx: DilationContext) -> DilationReport:
    return DilationReport(ctx.group.name, ctx.psi.descriptor, ctx.dim, ctx.tolerance)


def time_pairs(grid: Sequence = DEFAULT_GRID, reversed_: bool = False, horizon=None) -> list[tuple[Fraction, Fraction]]:
    """All (u, t) with u <= t from the grid; for the reversed identity all (t, u) with t <= u <= horizon."""
    grid = sorted({as_time(x) for x in grid})
    if reversed_:
        grid = [x for x in grid if horizon is None or x <= horizon]
    return [(a, b) for i, a in enumerate(grid) for b in grid[i:]]


def default_inputs(ctx: DilationContext, n_random: int = 5, seed: int = 0) -> list[tuple[str, GroupAlgebraElement]]:
    g = ctx.group
    rng = np.random.default_rng(seed)
    inputs = [(f"lambda_{s}", GroupAlgebraElement.basis(g, s)) for s in range(g.order)]
    inputs += [(f"random_{i}", random_group_algebra(rng, g)) for i in range(n_random)]
    return inputs


def default_products(ctx: DilationContext, inputs) -> list[tuple[str, GroupAlgebraElement, GroupAlgebraElement]]:
    """Pairs (a, b) whose image pi_t(ab) is formed as the product pi_t(a) pi_t(b).

    This routes the identity through the crossed-product multiplication and
    hence through the action alpha, i.e. through pi.
    """
    g = ctx.group
    basis = [GroupAlgebraElement.basis(g, s) for s in range(g.order)]
    prods = [(f"lambda_{s}*lambda_{r}", basis[s], basis[r]) for s in range(g.order) for r in range(g.order)]
    randoms = [(name, a) for name, a in inputs if name.startswith("random")]
    for (n1, a), (n2, b) in zip(randoms, randoms[1:] + randoms[:1]):
        prods.append((f"{n1}*{n2}", a, b))
    return prods


def verify_markov(ctx: DilationContext, times: Iterable[tuple] | None = None,
                  inputs: list | None = None, products: list | None = None,
                  seed: int = 0) -> DilationReport:
    """Check ``E_u pi_t(a) = pi_u T_{t-u}(a)`` on every (u, t) pair and input."""
    start = time.perf_counter()
    pairs = [(as_time(u), as_time(t)) for u, t in (times if times is not None else time_pairs())]
    for u, t in pairs:
        if u > t:
            raise ValueError(f"malformed time pair: u={u} > t={t}")
    if inputs is None:
        inputs = default_inputs(ctx, seed=seed)
    if products is None:
        products = default_products(ctx, inputs)

    report = _new_report(ctx)
    tol = ctx.tolerance
    cache: dict = {}

    def image(t, key, a, b=None):
        # pi_t(a), or pi_t(a) pi_t(b) for product inputs
        k = (t, key)
        if k not in cache:
            x = cp.pi_t(t, a, ctx)
            cache[k] = x if b is None else cp.cp_mul(x, cp.pi_t(t, b, ctx))
        return cache[k]

    for name, a in inputs:
        for u, t in pairs:
            lhs = cp.conditional_E_t(image(t, name, a), u)
            rhs = cp.pi_t(u, cp.semigroup_T(t - u, a, ctx), ctx)
            report.checks.append(Check("markov", {"input": name, "u": str(u), "t": str(t)},
                                       cp.cp_distance(lhs, rhs), tol))
    for name, a, b in products:
        ab = a * b
        for u, t in pairs:
            lhs = cp.conditional_E_t(image(t, name, a, b), u)
            rhs = cp.pi_t(u, cp.semigroup_T(t - u, ab, ctx), ctx)
            report.checks.append(Check("markov_product", {"input": name, "u": str(u), "t": str(t)},
                                       cp.cp_distance(lhs, rhs), tol))
    report.wall_time = time.perf_counter() - start
    return report


def verify_reversed(ctx: DilationContext, times: Iterable[tuple] | None = None,
                    inputs: list | None = None, products: list | None = None,
                    seed: int = 0) -> DilationReport:
    """Check ``E^u pi^rev_t(a) = pi^rev_u T_{u-t}(a)`` for t <= u <= horizon."""
    if ctx.horizon is None:
        raise ValueError("reversed verification needs a context horizon")
    start = time.perf_counter()
    C = ctx.horizon
    raw = times if times is not None else time_pairs(reversed_=True, horizon=C)
    pairs = [(as_time(t), as_time(u)) for t, u in raw]
    for t, u in pairs:
        if t > u or u > C:
            raise ValueError(f"time pair (t={t}, u={u}) must satisfy t <= u <= {C}")
    if inputs is None:
        inputs = default_inputs(ctx, seed=seed)
    if products is None:
        products = default_products(ctx, inputs)

    report = _new_report(ctx)
    tol = ctx.tolerance
    cases = [(name, a, None) for name, a in inputs] + list(products)
    for name, a, b in cases:
        kind = "reversed" if b is None else "reversed_product"
        target = a if b is None else a * b
        for t, u in pairs:
            x = cp.pi_t_reversed(t, a, ctx)
            if b is not None:
                x = cp.cp_mul(x, cp.pi_t_reversed(t, b, ctx))
            lhs = cp.conditional_E_after(x, u)
            rhs = cp.pi_t_reversed(u, cp.semigroup_T(u - t, target, ctx), ctx)
            report.checks.append(Check(kind, {"input": name, "t": str(t), "u": str(u)},
                                       cp.cp_distance(lhs, rhs), tol))
    report.wall_time = time.perf_counter() - start
    return report


def _worst(values) -> float:
    return max((float(v) for v in values), default=0.0)


def verify_structure(ctx: DilationContext, samples: int = 100, seed: int = 0,
                     times: Sequence = DEFAULT_GRID) -> DilationReport:
    """Run the cocycle, Weyl-algebra and crossed-product property suites on seeded random instances."""
    if samples < 1:
        raise ValueError("samples must be >= 1")
    start = time.perf_counter()
    rng = np.random.default_rng(seed)
    report = _new_report(ctx)
    tols = STRUCTURE_TOLERANCES
    g, d = ctx.group, ctx.dim
    times = [as_time(x) for x in times]

    def add(kind, residual, tol, **params):
        report.checks.append(Check(kind, {"samples": samples, **params}, residual, tol))

    # cocycle
    for name, val in ctx.cocycle.residuals(ctx.psi).items():
        add(f"cocycle.{name}", val, tols["cocycle"])
    certs = schoenberg_certificate(ctx.psi, SCHOENBERG_TIMES)
    add("cocycle.schoenberg_min_eigenvalue", max(0.0, -min(certs.values())), tols["schoenberg"])
    report.extra["schoenberg"] = {str(t): v for t, v in certs.items()}
    zero_sum = []
    psi_q = ctx.psi.values[g.mult[g.inv[:, None], np.arange(g.order)[None, :]]]
    for _ in range(samples):
        c = rng.normal(size=g.order) + 1j * rng.normal(size=g.order)
        c -= c.mean()
        zero_sum.append(max(0.0, float(np.vdot(c, psi_q @ c).real)))
    add("cocycle.cnd_quadratic_form", _worst(zero_sum), tols["schoenberg"])

    # weyl algebra
    assoc, comm, antimult, involution = [], [], [], []
    idem, tower, weight, module, indep = [], [], [], [], []
    for _ in range(samples):
        x, y, z = (random_weyl(rng, d, 3) for _ in range(3))
        assoc.append(l2_distance((x * y) * z, x * (y * z)))
        comm.append(l2_distance(x * y, y * x))
        antimult.append(l2_distance((x * y).adjoint(), y.adjoint() * x.adjoint()))
        involution.append(l2_distance(x.adjoint().adjoint(), x))
        u, t = sorted(rng.choice(times, size=2))
        eu = conditional_expectation(x, u)
        idem.append(l2_distance(conditional_expectation(eu, u), eu))
        tower.append(l2_distance(conditional_expectation(conditional_expectation(x, t), u), eu))
        weight.append(abs(expectation(eu) - expectation(x)))
        past = random_weyl(rng, d, 2, horizon=1, denominator=4)
        past = conditional_expectation(past, u)  # supported in [0, u]
        module.append(l2_distance(conditional_expectation(past * x, u), past * eu))
        if d:
            v = rng.normal(size=d)
            inc = WeylPolynomial.exp(StepVector.indicator(u, t, v))
            indep.append(l2_distance(conditional_expectation(inc, u), expectation(inc) * WeylPolynomial.one(d)))
    w = tols["weyl"]
    add("weyl.associativity", _worst(assoc), w)
    add("weyl.commutativity", _worst(comm), w)
    add("weyl.adjoint_antimultiplicative", _worst(antimult), w)
    add("weyl.adjoint_involutive", _worst(involution), w)
    add("weyl.cond_exp_idempotent", _worst(idem), w)
    add("weyl.cond_exp_tower", _worst(tower), w)
    add("weyl.cond_exp_weight_preserving", _worst(weight), w)
    add("weyl.cond_exp_module", _worst(module), w)
    add("weyl.increment_independence", _worst(indep), w)

    # crossed product
    cassoc, cinv, canti, tracial, plan, faithful = [], [], [], [], [], []
    tp_J, tp_U, tp_pi, tp_E, hom, unital, adj, filt = [], [], [], [], [], [], [], []
    unit = CrossedElement.unit(ctx)
    for _ in range(samples):
        x, y, z = (random_crossed(rng, ctx, support=3, terms=2) for _ in range(3))
        cassoc.append(cp.cp_distance((x * y) * z, x * (y * z)))
        cinv.append(cp.cp_distance(x.adjoint().adjoint(), x))
        canti.append(cp.cp_distance((x * y).adjoint(), y.adjoint() * x.adjoint()))
        tracial.append(abs(cp.cp_trace(x * y) - cp.cp_trace(y * x)))
        plan.append(abs(cp.cp_trace(x.adjoint() * y) - cp.plancherel_pairing(x, y)))
        a, b = random_group_algebra(rng, g), random_group_algebra(rng, g)
        t = times[int(rng.integers(len(times)))]
        u = times[int(rng.integers(len(times)))]
        tp_J.append(abs(cp.cp_trace(cp.embed_J(a, ctx)) - a.trace()))
        tp_U.append(abs(cp.cp_trace(cp.takesaki_U(t, x)) - cp.cp_trace(x)))
        tp_pi.append(abs(cp.cp_trace(cp.pi_t(t, a, ctx)) - a.trace()))
        tp_E.append(abs(cp.cp_trace(cp.conditional_E_t(x, t)) - cp.cp_trace(x)))
        pa, pb = cp.pi_t(t, a, ctx), cp.pi_t(t, b, ctx)
        hom.append(cp.cp_distance(pa * pb, cp.pi_t(t, a * b, ctx)))
        adj.append(cp.cp_distance(pa.adjoint(), cp.pi_t(t, a.adjoint(), ctx)))
        lo, hi = min(u, t), max(u, t)
        filt.append(cp.cp_distance(cp.conditional_E_t(cp.conditional_E_t(x, hi), lo), cp.conditional_E_t(x, lo)))
        # faithfulness: tr(x^* x) is the sum of squared fiber norms, so it vanishes only at x = 0
        faithful.append(abs(cp.cp_trace(x.adjoint() * x).real - cp.cp_l2_norm(x) ** 2))
    for t in times:
        unital.append(cp.cp_distance(cp.pi_t(t, GroupAlgebraElement.basis(g, g.identity), ctx), unit))
    add("crossed.associativity", _worst(cassoc), w)
    add("crossed.adjoint_involutive", _worst(cinv), w)
    add("crossed.adjoint_antimultiplicative", _worst(canti), w)
    add("crossed.trace_property", _worst(tracial), tols["trace_property"])
    add("crossed.plancherel", _worst(plan), tols["plancherel"])
    add("crossed.trace_norm_consistency", _worst(faithful), tols["trace_property"])
    add("crossed.trace_preservation.J", _worst(tp_J), tols["trace_preservation"])
    add("crossed.trace_preservation.U_t", _worst(tp_U), tols["trace_preservation"])
    add("crossed.trace_preservation.pi_t", _worst(tp_pi), tols["trace_preservation"])
    add("crossed.trace_preservation.E_t", _worst(tp_E), tols["trace_preservation"])
    add("crossed.pi_t_homomorphism", _worst(hom), tols["homomorphism"])
    add("crossed.pi_t_adjoint", _worst(adj), tols["homomorphism"])
    add("crossed.pi_t_unital", _worst(unital), tols["homomorphism"])
    add("crossed.filtration_monotone", _worst(filt), tols["filtration"])
    report.wall_time = time.perf_counter() - start
    return report


def explain(ctx: DilationContext, s: int, u, t) -> str:
    """Human-readable trace of pi_t(lambda_s), E_u pi_t(lambda_s) and pi_u T_{t-u}(lambda_s)."""
    u, t = as_time(u), as_time(t)
    if u > t:
        raise ValueError("explain needs u <= t")
    a = GroupAlgebraElement.basis(ctx.group, s)
    x = cp.pi_t(t, a, ctx)
    lhs = cp.conditional_E_t(x, u)
    rhs = cp.pi_t(u, cp.semigroup_T(t - u, a, ctx), ctx)
    psi_s = ctx.psi[s]
    lines = [
        f"group {ctx.group.name}, psi({s}) = {psi_s:.10g}, cocycle dim {ctx.dim}",
        f"b({s}) = {np.array2string(ctx.cocycle.b[s], precision=6)}",
        f"pi_t(lambda_{s})             t={t}:  {x!r}",
        f"E_u pi_t(lambda_{s})         u={u}:  {lhs!r}",
        f"pi_u T_(t-u)(lambda_{s}):           {rhs!r}",
        f"damping exp(-(t-u) psi(s)) = {math.exp(-float(t - u) * psi_s):.10f}",
        f"fiberwise L2 difference = {cp.cp_distance(lhs, rhs):.3e}",
    ]
    return "\n".join(lines)
