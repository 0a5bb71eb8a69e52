"""Conditionally negative definite functions and their 1-cocycles.

A function psi on a finite group is certified through its Gromov kernel
``K(s, r) = (psi(s) + psi(r) - psi(s^-1 r)) / 2``, which is positive
semidefinite exactly when psi is conditionally negative definite (with
``psi(e) = 0`` and ``psi(s^-1) = psi(s)``). Factoring ``K = B B^T`` gives
the cocycle vectors ``b(s)`` as the rows of ``B``; the orthogonal
representation is then forced by ``pi_s b(r) = b(sr) - b(s)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np
from scipy import linalg

from .groups import FiniteGroup

SCHOENBERG_TIMES = (0.1, 0.5, 1.0, 2.0, 5.0)


class CocycleConstructionError(ValueError):
    pass


@dataclass(frozen=True)
class CndCertificate:
    ok: bool
    reason: str
    min_eigenvalue: float
    eigenvalues: np.ndarray

    def __bool__(self) -> bool:
        return self.ok


@dataclass(frozen=True, eq=False)
class CndFunction:
    group: FiniteGroup
    values: np.ndarray
    descriptor: dict = field(default_factory=dict)

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.shape != (self.group.order,):
            raise ValueError(f"psi needs {self.group.order} values, got shape {vals.shape}")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)
        if not self.descriptor:
            object.__setattr__(self, "descriptor", {"kind": "table", "values": vals.tolist()})

    def __getitem__(self, s: int) -> float:
        return float(self.values[s])

    def kernel(self) -> np.ndarray:
        return gromov_kernel(self.values, self.group)

    def certify(self, tol: float = 1e-10) -> CndCertificate:
        return is_cnd(self.values, self.group, tol)


def gromov_kernel(psi, g: FiniteGroup) -> np.ndarray:
    psi = np.asarray(psi, dtype=float)
    # psi(s^-1 r) for all pairs
    quotient = psi[g.mult[g.inv[:, None], np.arange(g.order)[None, :]]]
    return 0.5 * (psi[:, None] + psi[None, :] - quotient)


def is_cnd(psi, g: FiniteGroup, tol: float = 1e-10) -> CndCertificate:
    psi = np.asarray(psi, dtype=float)
    empty = np.zeros(0)
    if psi.shape != (g.order,):
        return CndCertificate(False, f"psi must have {g.order} values", np.nan, empty)
    if not np.all(np.isfinite(psi)):
        return CndCertificate(False, "psi values must be finite", np.nan, empty)
    if abs(psi[g.identity]) > tol:
        return CndCertificate(False, "psi(identity) must be 0", np.nan, empty)
    asym = np.abs(psi - psi[g.inv])
    if asym.max() > tol:
        s = int(np.argmax(asym))
        return CndCertificate(
            False, f"psi must be inverse-symmetric: psi({s}) != psi({int(g.inv[s])})", np.nan, empty
        )
    eig = linalg.eigvalsh(gromov_kernel(psi, g))
    lo = float(eig[0])
    scale = max(1.0, float(np.abs(eig).max()))
    if lo < -tol * scale:
        return CndCertificate(False, f"Gromov kernel has negative eigenvalue {lo:.3e}", lo, eig)
    return CndCertificate(True, "ok", lo, eig)


def schoenberg_certificate(psi: CndFunction, times: Sequence[float] = SCHOENBERG_TIMES) -> dict:
    """Min eigenvalue of the positive definite kernel [exp(-t psi(s^-1 r))] for each t."""
    g = psi.group
    quotient = psi.values[g.mult[g.inv[:, None], np.arange(g.order)[None, :]]]
    out = {}
    for t in times:
        out[float(t)] = float(linalg.eigvalsh(np.exp(-t * quotient))[0])
    return out


def delta_psi(g: FiniteGroup, scale: float = 1.0) -> CndFunction:
    """psi = scale * (1 - delta_e), the word length of the complete graph."""
    if not scale > 0:
        raise ValueError("delta psi needs scale > 0")
    vals = np.full(g.order, float(scale))
    vals[g.identity] = 0.0
    return CndFunction(g, vals, {"kind": "delta", "scale": float(scale)})


def hamming_psi(g: FiniteGroup) -> CndFunction:
    if g.kind != "hypercube":
        raise ValueError(f"hamming psi needs a hypercube group, got {g.name}")
    vals = np.array([bin(s).count("1") for s in range(g.order)], dtype=float)
    return CndFunction(g, vals, {"kind": "hamming"})


def psi_from_descriptor(desc: Mapping, g: FiniteGroup) -> CndFunction:
    kind = desc.get("kind")
    if kind == "table":
        return CndFunction(g, np.asarray(desc["values"], dtype=float), dict(desc))
    if kind == "delta":
        return delta_psi(g, float(desc.get("scale", 1.0)))
    if kind == "hamming":
        return hamming_psi(g)
    raise ValueError(f"unknown psi kind {kind!r}")


@dataclass(frozen=True, eq=False)
class Cocycle:
    """Real 1-cocycle: rows of ``b`` are b(s) in R^d, ``pi[s]`` is a d x d orthogonal matrix."""

    group: FiniteGroup
    b: np.ndarray
    pi: np.ndarray

    @property
    def dim(self) -> int:
        return self.b.shape[1]

    def residuals(self, psi: CndFunction | None = None) -> dict[str, float]:
        g, b, pi = self.group, self.b, self.pi
        n, d = b.shape
        eye = np.eye(d)
        # b(sr) - b(s) - pi_s b(r)
        law = b[g.mult] - b[:, None, :] - np.einsum("sij,rj->sri", pi, b)
        orth = np.einsum("sji,sjk->sik", pi, pi) - eye
        hom = np.einsum("sij,rjk->srik", pi, pi) - pi[g.mult]
        out = {
            "cocycle_law": _maxabs(law),
            "orthogonality": _maxabs(orth),
            "homomorphism": _maxabs(hom),
            "identity": max(_maxabs(b[g.identity]), _maxabs(pi[g.identity] - eye)),
        }
        if psi is not None:
            out["psi_norm"] = _maxabs(np.sum(b * b, axis=1) - psi.values)
            out["gram"] = _maxabs(b @ b.T - psi.kernel())
        return out

    def perturbed(self, s: int, i: int = 0, j: int = 0, eps: float = 1e-3) -> "Cocycle":
        """Copy with one entry of pi_s shifted; negative-control hook, skips all checks."""
        pi = self.pi.copy()
        pi[s, i, j] += eps
        return Cocycle(self.group, self.b, pi)


def _maxabs(a) -> float:
    a = np.asarray(a)
    return float(np.abs(a).max()) if a.size else 0.0


def build_cocycle(psi: CndFunction, rank_tol: float = 1e-10, iso_tol: float = 1e-8) -> Cocycle:
    """Factor the Gromov kernel of ``psi`` into a cocycle (b, pi) on R^d, d = rank K."""
    g = psi.group
    n = g.order
    cert = psi.certify()
    if not cert:
        raise CocycleConstructionError(f"psi is not conditionally negative definite: {cert.reason}")

    w, v = linalg.eigh(psi.kernel())
    top = w[-1] if n else 0.0
    keep = w > rank_tol * top if top > 0 else np.zeros(n, dtype=bool)
    b = v[:, keep] * np.sqrt(w[keep])
    d = b.shape[1]
    b[g.identity] = 0.0  # K's identity row vanishes identically

    if d == 0:
        return Cocycle(g, np.zeros((n, 0)), np.zeros((n, 0, 0)))

    # rows of b span R^d (d is the rank), so pi_s b(r) = b(sr) - b(s) pins pi_s down
    # completely; least squares recovers it, then we project onto O(d).
    b_pinv = np.linalg.pinv(b)
    pi = np.empty((n, d, d))
    scale = max(1.0, float(np.abs(b).max()))
    for s in range(n):
        target = b[g.mult[s]] - b[s]
        o = (b_pinv @ target).T
        fit = _maxabs(b @ o.T - target)
        u, sv, vt = np.linalg.svd(o)
        if fit > iso_tol * scale or _maxabs(sv - 1.0) > iso_tol:
            raise CocycleConstructionError(
                f"map b(r) -> b({s}r) - b({s}) is not isometric "
                f"(fit {fit:.2e}, singular values off by {_maxabs(sv - 1.0):.2e})"
            )
        pi[s] = u @ vt
    pi[g.identity] = np.eye(d)
    return Cocycle(g, b, pi)
