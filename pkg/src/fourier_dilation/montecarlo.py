"""Monte Carlo oracle: realize the Brownian motion concretely and check symbolic values.

On a grid ``0 = g_0 < ... < g_m`` the H-cylindrical Brownian motion is
represented by independent increments ``dW_k ~ N(0, (g_k - g_{k-1}) I_d)``,
so for a step function h that the grid refines, ``W(h) = sum_k <v_k, dW_k>``.

Randomness is counter-based (Philox) with one spawned substream per batch of
paths, and Gaussians come from the inverse normal CDF of uniforms, so the
values depend only on (seed, batch size) and never on how batches are
scheduled. Batch sums are reduced with ``math.fsum``, which is exact and
order-independent.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

import numpy as np
from scipy.special import ndtri

from .weyl import (
    StepVector,
    WeylPolynomial,
    as_time,
    conditional_expectation,
    expectation,
    merge_grids,
    weyl_mul,
)

Z_THRESHOLD = 5.0
DEFAULT_BATCH = 8192


class GridMismatchError(ValueError):
    pass


@dataclass(frozen=True)
class PathSample:
    """N Brownian paths sampled on ``grid``, generated lazily in batches."""

    grid: tuple[Fraction, ...]
    dim: int
    count: int
    seed: int
    batch_size: int = DEFAULT_BATCH

    def __post_init__(self):
        grid = tuple(sorted({as_time(x) for x in self.grid} | {Fraction(0)}))
        object.__setattr__(self, "grid", grid)
        if self.count < 1:
            raise ValueError("need at least one path")

    @property
    def lengths(self) -> np.ndarray:
        return np.array([float(b - a) for a, b in zip(self.grid, self.grid[1:])])

    @property
    def num_batches(self) -> int:
        return -(-self.count // self.batch_size)

    def batches(self) -> Iterator[np.ndarray]:
        """Increment arrays of shape (paths, intervals, dim), batch by batch."""
        m = len(self.grid) - 1
        scale = np.sqrt(self.lengths)[None, :, None]
        streams = np.random.SeedSequence(self.seed).spawn(self.num_batches)
        for b, ss in enumerate(streams):
            size = min(self.batch_size, self.count - b * self.batch_size)
            gen = np.random.Generator(np.random.Philox(ss))
            # k * 2^-53 shifted by half a step: uniforms in the open interval (0, 1)
            uni = gen.random(size=(size, m, self.dim)) + 2.0**-54
            yield ndtri(uni) * scale

    def increments(self) -> np.ndarray:
        return np.concatenate(list(self.batches()), axis=0)

    def calibration(self) -> np.ndarray:
        """z-scores of mean(dW^2 / length) against 1, per interval and coordinate."""
        lengths = self.lengths
        s1 = np.zeros((len(lengths), self.dim))
        s2 = np.zeros_like(s1)
        for inc in self.batches():
            r = inc**2 / lengths[None, :, None]
            s1 += r.sum(axis=0)
            s2 += (r**2).sum(axis=0)
        n = self.count
        mean = s1 / n
        var = s2 / n - mean**2
        return np.abs(mean - 1.0) / np.sqrt(var / n)


def sample_paths(grid: Sequence, dim: int, count: int, seed: int, batch_size: int = DEFAULT_BATCH) -> PathSample:
    return PathSample(tuple(grid), dim, count, seed, batch_size)


def _check_grid(x: WeylPolynomial, grid: tuple) -> None:
    pts = set(grid)
    for _, h in x.terms:
        if not pts.issuperset(h.breaks):
            raise GridMismatchError("path grid does not refine the exponent breakpoints")


def _exponents(x: WeylPolynomial, grid: tuple) -> tuple[np.ndarray, np.ndarray]:
    coeffs = np.array([c for c, _ in x.terms], dtype=complex)
    m = len(grid) - 1
    if not x.terms:
        return coeffs, np.zeros((0, m, x.dim))
    return coeffs, np.stack([h.refine(grid) for _, h in x.terms])


def _evaluate_batch(coeffs, vs, inc) -> np.ndarray:
    # W(h_k) per path: sum over intervals and coordinates of v * dW
    w = np.einsum("kmd,pmd->pk", vs, inc)
    return np.exp(1j * w) @ coeffs


def evaluate(x: WeylPolynomial, paths: PathSample) -> np.ndarray:
    """Complex value of ``x`` on every path."""
    if x.dim != paths.dim:
        raise GridMismatchError(f"polynomial dim {x.dim} != path dim {paths.dim}")
    _check_grid(x, paths.grid)
    coeffs, vs = _exponents(x, paths.grid)
    return np.concatenate([_evaluate_batch(coeffs, vs, inc) for inc in paths.batches()])


def evaluate_W(h: StepVector, paths: PathSample) -> np.ndarray:
    """The Gaussian ``W(h)`` itself on every path."""
    _check_grid(WeylPolynomial.exp(h), paths.grid)
    v = h.refine(paths.grid)
    return np.concatenate([np.einsum("md,pmd->p", v, inc) for inc in paths.batches()])


@dataclass(frozen=True)
class MCResult:
    symbolic: complex
    estimate: complex
    stderr_re: float
    stderr_im: float
    z_re: float
    z_im: float
    count: int

    @property
    def z(self) -> float:
        return max(self.z_re, self.z_im)

    @property
    def flagged(self) -> bool:
        return self.z > Z_THRESHOLD

    def to_json(self) -> dict:
        return {
            "symbolic": [self.symbolic.real, self.symbolic.imag],
            "estimate": [self.estimate.real, self.estimate.imag],
            "stderr": [self.stderr_re, self.stderr_im],
            "z": [self.z_re, self.z_im],
            "count": self.count,
            "flagged": self.flagged,
        }


def _zscore(diff: float, se: float) -> float:
    if se > 0:
        return abs(diff) / se
    return 0.0 if diff == 0 else math.inf


def _mc_mean(x: WeylPolynomial, paths: PathSample) -> tuple[complex, float, float]:
    """Sample mean and standard errors (real, imaginary) of x over the paths."""
    coeffs, vs = _exponents(x, paths.grid)
    sums = {"re": [], "im": [], "re2": [], "im2": []}
    for inc in paths.batches():
        vals = _evaluate_batch(coeffs, vs, inc)
        sums["re"].append(math.fsum(vals.real))
        sums["im"].append(math.fsum(vals.imag))
        sums["re2"].append(math.fsum(vals.real**2))
        sums["im2"].append(math.fsum(vals.imag**2))
    n = paths.count
    mre, mim = math.fsum(sums["re"]) / n, math.fsum(sums["im"]) / n
    vre = max(math.fsum(sums["re2"]) / n - mre**2, 0.0) * n / max(n - 1, 1)
    vim = max(math.fsum(sums["im2"]) / n - mim**2, 0.0) * n / max(n - 1, 1)
    return complex(mre, mim), math.sqrt(vre / n), math.sqrt(vim / n)


def _compare(x: WeylPolynomial, symbolic: complex, paths: PathSample) -> MCResult:
    _check_grid(x, paths.grid)
    est, se_re, se_im = _mc_mean(x, paths)
    return MCResult(
        complex(symbolic), est, se_re, se_im,
        _zscore(est.real - symbolic.real, se_re), _zscore(est.imag - symbolic.imag, se_im), paths.count,
    )


def cross_validate_expectation(x: WeylPolynomial, N: int = 100_000, seed: int = 0,
                               batch_size: int = DEFAULT_BATCH) -> MCResult:
    """Monte Carlo estimate of E(x) against the closed form."""
    if N < 1000:
        raise ValueError("need N >= 1000 paths")
    paths = PathSample(x.breakpoints(), x.dim, N, seed, batch_size)
    return _compare(x, expectation(x), paths)


def cross_validate_conditional(x: WeylPolynomial, u, probes: Sequence[StepVector], N: int = 100_000,
                               seed: int = 0, batch_size: int = DEFAULT_BATCH) -> list[MCResult]:
    """For each F_u-measurable probe g: MC of ``E[x e^{iW(g)}]`` against symbolic ``E[E_u(x) e^{iW(g)}]``."""
    u = as_time(u)
    if N < 1000:
        raise ValueError("need N >= 1000 paths")
    for g in probes:
        if g.support_end > u:
            raise ValueError(f"probe supported up to {g.support_end}, beyond u={u}")
    cond = conditional_expectation(x, u)
    grid = merge_grids([x.breakpoints(), (u,)] + [g.breaks for g in probes])
    paths = PathSample(grid, x.dim, N, seed, batch_size)
    out = []
    for g in probes:
        e_g = WeylPolynomial.exp(g)
        out.append(_compare(weyl_mul(x, e_g), expectation(weyl_mul(cond, e_g)), paths))
    return out
