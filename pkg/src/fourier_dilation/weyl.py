"""Symbolic calculus on Weyl exponentials ``e^{iW(h)}`` of an H-cylindrical Brownian motion.

Arguments ``h`` live in L^2(R+, R^d) and are represented as right-continuous
step functions with exact rational breakpoints (:class:`StepVector`). A
:class:`WeylPolynomial` is a finite complex combination of symbols
``E[h] = e^{iW(h)}``. Because the Gaussian algebra is commutative, products
just add exponents; expectations are Gaussian characteristic-function values
``exp(-|h|^2 / 2)``; conditioning on the Brownian filtration up to time u
keeps the part of h on [0, u] and integrates out the rest.

Breakpoints are :class:`fractions.Fraction` so that splitting at u is exact.
Piece vectors are float64.
"""
from __future__ import annotations

import math
import numbers
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

# structural tolerance used for merging pieces/terms and trimming zero tails
ATOL = 1e-12
# l2_distance equality default
DEFAULT_TOL = 1e-9


class DimensionError(ValueError):
    pass


def as_time(x) -> Fraction:
    """Coerce ints, Fractions, ``"p/q"`` strings (and exactly-representable floats) to a Fraction."""
    if isinstance(x, Fraction):
        t = x
    elif isinstance(x, (numbers.Rational, str)):
        t = Fraction(x)
    elif isinstance(x, float):
        t = Fraction(x)
    else:
        raise TypeError(f"cannot interpret {x!r} as a rational time")
    if t < 0:
        raise ValueError(f"times must be nonnegative, got {t}")
    return t


class StepVector:
    """Step function ``sum_k 1_{(t_{k-1}, t_k]} (x) v_k`` in L^2(R+, R^d).

    ``breaks`` is ``(0, t_1, ..., t_m)`` and ``pieces`` is an ``(m, d)`` array.
    Instances are canonical: no zero tail, no equal neighbours.
    """

    __slots__ = ("dim", "breaks", "pieces", "_key")

    def __init__(self, dim: int, breaks: Sequence = (0,), pieces=None):
        self.dim = int(dim)
        br = tuple(as_time(t) for t in breaks)
        arr = np.zeros((0, self.dim)) if pieces is None else np.asarray(pieces, dtype=float)
        if arr.ndim == 1 and arr.size == 0:
            arr = arr.reshape(0, self.dim)
        if arr.ndim != 2 or arr.shape[1] != self.dim:
            raise DimensionError(f"pieces must have shape (m, {self.dim}), got {arr.shape}")
        if not br or br[0] != 0:
            raise ValueError("breakpoints must start at 0")
        if any(b <= a for a, b in zip(br, br[1:])):
            raise ValueError("breakpoints must be strictly increasing")
        if len(br) != arr.shape[0] + 1:
            raise ValueError("need exactly one piece per interval")
        self._set(*_canonicalize(br, arr))

    def _set(self, br: tuple, arr: np.ndarray):
        arr.setflags(write=False)
        self.breaks = br
        self.pieces = arr
        self._key = None

    @classmethod
    def _make(cls, dim: int, br: tuple, arr: np.ndarray, canonical: bool = False) -> "StepVector":
        """Internal constructor: trusted Fraction breakpoints, no validation."""
        obj = cls.__new__(cls)
        obj.dim = dim
        obj._set(*((br, arr) if canonical else _canonicalize(br, arr)))
        return obj

    @property
    def key(self) -> int:
        # cached hash of the breakpoint tuple; Fraction hashing is slow
        if self._key is None:
            self._key = hash(self.breaks)
        return self._key

    # -- constructors -------------------------------------------------
    @classmethod
    def zero(cls, dim: int) -> "StepVector":
        return cls._make(dim, (Fraction(0),), np.zeros((0, dim)), canonical=True)

    @classmethod
    def indicator(cls, a, b, v) -> "StepVector":
        """``1_{(a, b]} (x) v``."""
        a, b = as_time(a), as_time(b)
        v = np.atleast_1d(np.asarray(v, dtype=float))
        if b < a:
            raise ValueError("indicator needs a <= b")
        if b == a:
            return cls.zero(v.size)
        if a == 0:
            return cls(v.size, (0, b), v[None, :])
        return cls(v.size, (0, a, b), np.stack([np.zeros_like(v), v]))

    # -- basic structure ---------------------------------------------
    @property
    def num_pieces(self) -> int:
        return self.pieces.shape[0]

    @property
    def support_end(self) -> Fraction:
        return self.breaks[-1]

    def is_zero(self) -> bool:
        return self.num_pieces == 0

    def lengths(self) -> np.ndarray:
        return np.array([float(b - a) for a, b in zip(self.breaks, self.breaks[1:])])

    def __repr__(self) -> str:
        if self.is_zero():
            return f"StepVector(0, d={self.dim})"
        parts = [
            f"1({a},{b}]⊗{np.array2string(v, precision=4)}"
            for a, b, v in zip(self.breaks, self.breaks[1:], self.pieces)
        ]
        return " + ".join(parts)

    def same_structure(self, other: "StepVector", atol: float = ATOL) -> bool:
        return (
            self.breaks == other.breaks
            and self.dim == other.dim
            and (self.num_pieces == 0 or float(np.abs(self.pieces - other.pieces).max()) <= atol)
        )

    def refine(self, grid: Sequence[Fraction]) -> np.ndarray:
        """Values on each interval of ``grid`` (which must contain all our breakpoints)."""
        grid = tuple(grid)
        out = np.zeros((len(grid) - 1, self.dim))
        if self.is_zero():
            return out
        k = 0
        for i, right in enumerate(grid[1:]):
            while k < self.num_pieces and self.breaks[k + 1] < right:
                k += 1
            if k >= self.num_pieces:
                break
            if grid[i] < self.breaks[k]:
                raise ValueError("grid does not refine the step vector")
            out[i] = self.pieces[k]
        return out

    # -- vector space -------------------------------------------------
    def _check(self, other: "StepVector"):
        if self.dim != other.dim:
            raise DimensionError(f"dimension mismatch: {self.dim} vs {other.dim}")

    def __add__(self, other: "StepVector") -> "StepVector":
        self._check(other)
        if other.is_zero():
            return self
        if self.is_zero():
            return other
        if self.breaks == other.breaks:
            return StepVector._make(self.dim, self.breaks, self.pieces + other.pieces)
        grid, i1, i2 = _merge_two(self.breaks, other.breaks)
        p1 = np.vstack([self.pieces, np.zeros((1, self.dim))])
        p2 = np.vstack([other.pieces, np.zeros((1, self.dim))])
        return StepVector._make(self.dim, grid, p1[i1] + p2[i2])

    def __neg__(self) -> "StepVector":
        return StepVector._make(self.dim, self.breaks, -self.pieces, canonical=True)

    def __sub__(self, other: "StepVector") -> "StepVector":
        return self + (-other)

    def __mul__(self, scalar: float) -> "StepVector":
        scalar = float(scalar)
        if scalar == 0:
            return StepVector.zero(self.dim)
        return StepVector._make(self.dim, self.breaks, scalar * self.pieces)

    __rmul__ = __mul__

    def apply(self, matrix) -> "StepVector":
        """Pointwise ``(Id (x) O) h``."""
        m = np.asarray(matrix, dtype=float)
        if m.shape != (self.dim, self.dim):
            raise DimensionError(f"matrix must be {self.dim}x{self.dim}")
        if self.is_zero():
            return self
        return StepVector._make(self.dim, self.breaks, self.pieces @ m.T)

    def split(self, u) -> tuple["StepVector", "StepVector"]:
        """``(h 1_{[0,u]}, h 1_{(u,inf)})``, exact at the rational u."""
        u = as_time(u)
        if u >= self.support_end:
            return self, StepVector.zero(self.dim)
        if u == 0:
            return StepVector.zero(self.dim), self
        br = list(self.breaks)
        k = next(i for i, b in enumerate(br) if b >= u)  # first breakpoint >= u, k >= 1
        if br[k] != u:
            br.insert(k, u)
            pieces = np.insert(self.pieces, k - 1, self.pieces[k - 1], axis=0)
        else:
            pieces = self.pieces
        head_p = pieces[:k]
        tail_p = pieces.copy()
        tail_p[:k] = 0.0
        head = StepVector._make(self.dim, tuple(br[: k + 1]), head_p)
        tail = StepVector._make(self.dim, tuple(br), tail_p)
        return head, tail

    def restrict(self, a, b=None) -> "StepVector":
        """``h 1_{(a, b]}`` (b = None means to infinity)."""
        _, tail = self.split(a)
        if b is None:
            return tail
        head, _ = tail.split(b)
        return head

    # -- JSON ---------------------------------------------------------
    def to_json(self) -> dict:
        return {
            "breakpoints": [str(b) for b in self.breaks],
            "pieces": self.pieces.tolist(),
        }

    @classmethod
    def from_json(cls, data: dict, dim: int) -> "StepVector":
        pieces = np.asarray(data["pieces"], dtype=float).reshape(-1, dim)
        return cls(dim, [Fraction(b) for b in data["breakpoints"]], pieces)


def _canonicalize(br: tuple, arr: np.ndarray) -> tuple[tuple, np.ndarray]:
    m = arr.shape[0]
    if m == 0 or arr.shape[1] == 0:
        return (Fraction(0),), np.zeros((0, arr.shape[1]))
    # drop (numerically) zero tail
    live = np.flatnonzero(np.abs(arr).max(axis=1) > ATOL)
    if live.size == 0:
        return (Fraction(0),), np.zeros((0, arr.shape[1]))
    m = int(live[-1]) + 1
    arr = arr[:m]
    # merge runs of equal neighbours; the merged piece keeps its leftmost value
    jumps = np.abs(np.diff(arr, axis=0)).max(axis=1) > ATOL if m > 1 else np.zeros(0, dtype=bool)
    if jumps.all():
        return tuple(br[: m + 1]), np.array(arr, dtype=float)
    keep = np.concatenate([[0], np.flatnonzero(jumps) + 1])
    new_br = (br[0],) + tuple(br[k] for k in keep[1:]) + (br[m],)
    return new_br, np.array(arr[keep], dtype=float)


def _merge_two(a: tuple, b: tuple) -> tuple[tuple, list[int], list[int]]:
    """Union of two breakpoint tuples plus, per union interval, the piece index in each
    (``len(pieces)`` meaning "beyond support", i.e. the padded zero row)."""
    la, lb = len(a), len(b)
    i = j = 1
    grid = [a[0]]
    ia, ib = [], []
    while i < la or j < lb:
        if j >= lb or (i < la and a[i] < b[j]):
            nxt = a[i]
        else:
            nxt = b[j]
        ia.append(i - 1 if i < la else la - 1)
        ib.append(j - 1 if j < lb else lb - 1)
        grid.append(nxt)
        if i < la and a[i] == nxt:
            i += 1
        if j < lb and b[j] == nxt:
            j += 1
    return tuple(grid), ia, ib


def merge_grids(grids: Iterable[Sequence[Fraction]]) -> tuple[Fraction, ...]:
    pts = {Fraction(0)}
    for g in grids:
        pts.update(g)
    return tuple(sorted(pts))


def inner_product(h1: StepVector, h2: StepVector) -> float:
    """``<h1, h2>`` in L^2(R+, R^d): sum over intervals of length * dot product."""
    h1._check(h2)
    if h1.is_zero() or h2.is_zero():
        return 0.0
    if h1.breaks == h2.breaks:
        grid, a, b = h1.breaks, h1.pieces, h2.pieces
    else:
        grid = merge_grids([h1.breaks, h2.breaks])
        a, b = h1.refine(grid), h2.refine(grid)
    lengths = np.array([float(y - x) for x, y in zip(grid, grid[1:])])
    return float(np.dot(lengths, np.einsum("ki,ki->k", a, b)))


def norm2(h: StepVector) -> float:
    if h.is_zero():
        return 0.0
    return float(np.dot(h.lengths(), np.einsum("ki,ki->k", h.pieces, h.pieces)))


class WeylPolynomial:
    """Finite combination ``sum_k c_k e^{iW(h_k)}`` with pairwise distinct exponents."""

    __slots__ = ("dim", "terms")

    def __init__(self, dim: int, terms: Iterable[tuple[complex, StepVector]] = ()):
        self.dim = int(dim)
        raw = []
        for c, h in terms:
            if h.dim != self.dim:
                raise DimensionError(f"exponent dim {h.dim} != {self.dim}")
            raw.append((complex(c), h))
        self.terms = _merge_terms(raw)

    @classmethod
    def one(cls, dim: int) -> "WeylPolynomial":
        return cls(dim, [(1.0, StepVector.zero(dim))])

    @classmethod
    def zero(cls, dim: int) -> "WeylPolynomial":
        return cls(dim, [])

    @classmethod
    def exp(cls, h: StepVector, coeff: complex = 1.0) -> "WeylPolynomial":
        """The single symbol ``coeff * e^{iW(h)}``."""
        return cls(h.dim, [(coeff, h)])

    def __len__(self) -> int:
        return len(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        return " + ".join(f"({c:.6g})·E[{h!r}]" for c, h in self.terms)

    @property
    def support_end(self) -> Fraction:
        return max((h.support_end for _, h in self.terms), default=Fraction(0))

    def breakpoints(self) -> tuple[Fraction, ...]:
        return merge_grids(h.breaks for _, h in self.terms)

    def _check(self, other: "WeylPolynomial"):
        if self.dim != other.dim:
            raise DimensionError(f"dimension mismatch: {self.dim} vs {other.dim}")

    def __add__(self, other: "WeylPolynomial") -> "WeylPolynomial":
        return weyl_add(self, other)

    def __sub__(self, other: "WeylPolynomial") -> "WeylPolynomial":
        return weyl_add(self, weyl_scale(other, -1.0))

    def __neg__(self) -> "WeylPolynomial":
        return weyl_scale(self, -1.0)

    def __mul__(self, other):
        if isinstance(other, WeylPolynomial):
            return weyl_mul(self, other)
        return weyl_scale(self, other)

    def __rmul__(self, scalar):
        return weyl_scale(self, scalar)

    def adjoint(self) -> "WeylPolynomial":
        return weyl_adjoint(self)

    def to_json(self) -> list[dict]:
        return [{"coeff": [c.real, c.imag], **h.to_json()} for c, h in self.terms]

    @classmethod
    def from_json(cls, data: list[dict], dim: int) -> "WeylPolynomial":
        return cls(dim, [(complex(*t["coeff"]), StepVector.from_json(t, dim)) for t in data])


def _merge_terms(raw: list[tuple[complex, StepVector]]) -> tuple:
    """Combine structurally equal exponents and drop cancelled coefficients."""
    buckets: dict[int, list[list]] = {}
    order: list[list] = []
    for c, h in raw:
        if c == 0:
            continue
        slot = buckets.setdefault(h.key, [])
        for entry in slot:
            if entry[1].same_structure(h):
                entry[0] += c
                entry[2] = max(entry[2], abs(c))
                break
        else:
            entry = [c, h, abs(c)]
            slot.append(entry)
            order.append(entry)
    # |sum| tiny relative to its summands means exact cancellation up to rounding
    return tuple((c, h) for c, h, big in order if abs(c) > 1e-14 * big)


def weyl_add(x: WeylPolynomial, y: WeylPolynomial) -> WeylPolynomial:
    x._check(y)
    return WeylPolynomial(x.dim, x.terms + y.terms)


def weyl_scale(x: WeylPolynomial, scalar: complex) -> WeylPolynomial:
    scalar = complex(scalar)
    return WeylPolynomial(x.dim, [(scalar * c, h) for c, h in x.terms])


def weyl_mul(x: WeylPolynomial, y: WeylPolynomial) -> WeylPolynomial:
    """``E[h] E[g] = E[h + g]`` extended bilinearly."""
    x._check(y)
    return WeylPolynomial(x.dim, [(a * b, h + g) for a, h in x.terms for b, g in y.terms])


def weyl_adjoint(x: WeylPolynomial) -> WeylPolynomial:
    return WeylPolynomial(x.dim, [(c.conjugate(), -h) for c, h in x.terms])


def expectation(x: WeylPolynomial) -> complex:
    """``E(e^{iW(h)}) = exp(-|h|^2/2)``, summed over terms."""
    return complex(sum(c * math.exp(-0.5 * norm2(h)) for c, h in x.terms))


def conditional_expectation(x: WeylPolynomial, u) -> WeylPolynomial:
    """Conditional expectation onto the Brownian filtration at time ``u``.

    Each exponent splits as ``h 1_[0,u] + h 1_(u,inf)``; the tail is
    independent of the past and integrates to ``exp(-|tail|^2/2)``.
    """
    u = as_time(u)
    out = []
    for c, h in x.terms:
        head, tail = h.split(u)
        out.append((c * math.exp(-0.5 * norm2(tail)), head))
    return WeylPolynomial(x.dim, out)


def conditional_expectation_after(x: WeylPolynomial, u) -> WeylPolynomial:
    """Conditional expectation onto the increments after ``u`` (decreasing filtration).

    Keeps ``h 1_(u,inf)`` and integrates out the part on [0, u].
    """
    u = as_time(u)
    out = []
    for c, h in x.terms:
        head, tail = h.split(u)
        out.append((c * math.exp(-0.5 * norm2(head)), tail))
    return WeylPolynomial(x.dim, out)


def second_quantize(matrix, x: WeylPolynomial, tol: float = 1e-10) -> WeylPolynomial:
    """``Gamma(Id (x) O)``: apply the orthogonal matrix O to every exponent."""
    o = np.asarray(matrix, dtype=float)
    if o.shape != (x.dim, x.dim):
        raise DimensionError(f"matrix must be {x.dim}x{x.dim}, got {o.shape}")
    if x.dim and float(np.abs(o.T @ o - np.eye(x.dim)).max()) > tol:
        raise ValueError("second quantization needs an orthogonal matrix")
    return WeylPolynomial(x.dim, [(c, h.apply(o)) for c, h in x.terms])


def _stack(terms, grid) -> tuple[np.ndarray, np.ndarray]:
    lengths = np.array([float(b - a) for a, b in zip(grid, grid[1:])])
    if not terms:
        return lengths, np.zeros((0, len(lengths), 0))
    return lengths, np.stack([h.refine(grid) for _, h in terms])


def l2_norm(x: WeylPolynomial) -> float:
    """``|x|_{L^2(Omega)}`` from the Gram identity ``<E[h], E[g]> = exp(-|g - h|^2/2)``.

    Terms are clustered around representatives so that nearly-cancelling
    pairs are evaluated through ``expm1`` of small exponent differences,
    not as a difference of O(1) numbers. This keeps the result accurate
    down to ~1e-15 relative to the coefficients instead of ~1e-8.
    """
    terms = x.terms
    k = len(terms)
    if k == 0:
        return 0.0
    a = np.array([c for c, _ in terms])
    grid = merge_grids(h.breaks for _, h in terms)
    lengths, hs = _stack(terms, grid)

    def sqdist(p, q):
        diff = p - q
        return np.einsum("...md,...md,m->...", diff, diff, lengths)

    # greedy clusters of radius 1/2 in L^2
    reps: list[int] = []
    label = np.empty(k, dtype=int)
    for j in range(k):
        for ci, r in enumerate(reps):
            if sqdist(hs[j], hs[r]) <= 0.25:
                label[j] = ci
                break
        else:
            label[j] = len(reps)
            reps.append(j)
    rep_h = hs[reps]
    rep_gram = np.exp(-0.5 * sqdist(rep_h[:, None], rep_h[None, :]))
    mass = np.zeros(len(reps), dtype=complex)
    np.add.at(mass, label, a)
    coarse = np.vdot(mass, rep_gram @ mass)

    # correction: K_jk - K_rep = K_rep * expm1(-(D_jk - D_rep)/2), with
    # D_jk - D_rep = <delta_j - delta_k, (h_j - h_k) + (h_p - h_q)> computed exactly-ish
    ph = hs[reps][label]
    delta = hs - ph
    # A_jk = <delta_j, h_k + p_k>; every entry is O(|delta| |h|), so no O(1) cancellation
    cross = np.einsum("jmd,kmd,m->jk", delta, hs + ph, lengths)
    diag = np.diag(cross)
    dshift = diag[:, None] - cross - cross.T + diag[None, :]
    corr = rep_gram[label[:, None], label[None, :]] * np.expm1(-0.5 * dshift)
    fine = np.vdot(a, corr @ a)
    total = float((coarse + fine).real)
    return math.sqrt(max(total, 0.0))


def l2_distance(x: WeylPolynomial, y: WeylPolynomial) -> float:
    x._check(y)
    return l2_norm(x - y)


def allclose(x: WeylPolynomial, y: WeylPolynomial, tol: float = DEFAULT_TOL) -> bool:
    return l2_distance(x, y) <= tol
