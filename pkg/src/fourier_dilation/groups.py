"""Finite groups as multiplication tables, and their complex group algebras.

Elements are always integer indices ``0..n-1`` into the table. Everything
downstream (cocycles, crossed products) only ever sees indices, so it stays
agnostic of how the group was built.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np


class GroupAxiomError(ValueError):
    """A multiplication table failed one of the group axioms."""


class GroupMismatchError(ValueError):
    """Operands live over different groups."""


@dataclass(frozen=True, eq=False)
class FiniteGroup:
    mult: np.ndarray
    identity: int
    inv: np.ndarray
    name: str = "group"
    kind: str = "table"
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        self.mult.setflags(write=False)
        self.inv.setflags(write=False)

    @property
    def order(self) -> int:
        return self.mult.shape[0]

    def __len__(self) -> int:
        return self.order

    def __repr__(self) -> str:
        return f"FiniteGroup({self.name}, order={self.order})"

    def mul(self, s: int, r: int) -> int:
        return int(self.mult[s, r])

    def inverse(self, s: int) -> int:
        return int(self.inv[s])

    def is_abelian(self) -> bool:
        return bool(np.array_equal(self.mult, self.mult.T))

    def same_as(self, other: "FiniteGroup") -> bool:
        return self is other or np.array_equal(self.mult, other.mult)

    def descriptor(self) -> dict:
        if self.kind == "table":
            return {"kind": "table", "mult": self.mult.tolist()}
        return {"kind": self.kind, **self.params}


def _validate(mult: np.ndarray) -> tuple[int, np.ndarray]:
    """Check the group axioms on a table; return (identity, inverse table)."""
    if mult.ndim != 2 or mult.shape[0] != mult.shape[1] or mult.shape[0] == 0:
        raise GroupAxiomError("closure: table must be a non-empty square n x n array")
    n = mult.shape[0]
    if mult.min() < 0 or mult.max() >= n:
        raise GroupAxiomError("closure: table entries must lie in 0..n-1")

    # (ab)c == a(bc) for all triples, by brute force
    left = mult[mult, :]  # left[a, b, c] = (ab)c
    right = mult[:, mult]  # right[a, b, c] = a(bc)
    bad = np.argwhere(left != right)
    if len(bad):
        a, b, c = bad[0]
        raise GroupAxiomError(f"associativity: ({a}*{b})*{c} != {a}*({b}*{c})")

    ar = np.arange(n)
    ids = [e for e in range(n) if np.array_equal(mult[e], ar) and np.array_equal(mult[:, e], ar)]
    if not ids:
        raise GroupAxiomError("identity: no two-sided identity element")
    e = ids[0]

    inv = np.full(n, -1, dtype=np.int64)
    for s in range(n):
        hits = np.flatnonzero(mult[s] == e)
        if len(hits) != 1 or mult[hits[0], s] != e:
            raise GroupAxiomError(f"inverse: element {s} has no two-sided inverse")
        inv[s] = hits[0]
    return e, inv


def make_from_table(table, name: str = "table") -> FiniteGroup:
    mult = np.asarray(table, dtype=np.int64)
    e, inv = _validate(mult)
    return FiniteGroup(mult.copy(), int(e), inv, name=name)


def make_cyclic(n: int) -> FiniteGroup:
    if n < 1:
        raise ValueError("cyclic group needs n >= 1")
    ar = np.arange(n)
    mult = (ar[:, None] + ar[None, :]) % n
    inv = (-ar) % n
    return FiniteGroup(mult, 0, inv, name=f"Z{n}", kind="cyclic", params={"n": n})


def make_dihedral(n: int) -> FiniteGroup:
    """Dihedral group of order 2n. Index ``k + n*f`` stands for r^k s^f."""
    if n < 1:
        raise ValueError("dihedral group needs n >= 1")
    order = 2 * n
    mult = np.empty((order, order), dtype=np.int64)
    for x in range(order):
        a, f = x % n, x // n
        for y in range(order):
            b, g = y % n, y // n
            # r^a s^f r^b s^g = r^(a + (-1)^f b) s^(f+g)
            k = (a + (b if f == 0 else -b)) % n
            mult[x, y] = k + n * ((f + g) % 2)
    e, inv = _validate(mult)
    return FiniteGroup(mult, e, inv, name=f"D{n}", kind="dihedral", params={"n": n})


def make_hypercube(k: int) -> FiniteGroup:
    """(Z_2)^k; element index = bit mask, product = XOR."""
    if k < 1:
        raise ValueError("hypercube group needs k >= 1")
    ar = np.arange(2**k)
    mult = ar[:, None] ^ ar[None, :]
    return FiniteGroup(mult, 0, ar.copy(), name=f"Z2^{k}", kind="hypercube", params={"n": k})


def make_symmetric(k: int) -> FiniteGroup:
    """S_k on permutations in lexicographic order; (p*q)(i) = p(q(i))."""
    if not 1 <= k <= 5:
        raise ValueError("symmetric group supported for 1 <= k <= 5")
    perms = list(itertools.permutations(range(k)))
    index = {p: i for i, p in enumerate(perms)}
    mult = np.array(
        [[index[tuple(p[q[i]] for i in range(k))] for q in perms] for p in perms],
        dtype=np.int64,
    )
    e, inv = _validate(mult)
    return FiniteGroup(mult, e, inv, name=f"S{k}", kind="symmetric", params={"n": k})


_BUILDERS = {
    "cyclic": make_cyclic,
    "dihedral": make_dihedral,
    "hypercube": make_hypercube,
    "symmetric": make_symmetric,
}


def group_from_descriptor(desc: Mapping) -> FiniteGroup:
    """Build a group from ``{"kind": ..., "n": int}`` or ``{"kind": "table", "mult": [[...]]}``."""
    kind = desc.get("kind")
    if kind == "table":
        if "mult" not in desc:
            raise ValueError("table descriptor needs 'mult'")
        return make_from_table(desc["mult"], name=desc.get("name", "table"))
    if kind not in _BUILDERS:
        raise ValueError(f"unknown group kind {kind!r}")
    n = desc.get("n")
    if not isinstance(n, int) or isinstance(n, bool):
        raise ValueError(f"group kind {kind!r} needs integer 'n'")
    return _BUILDERS[kind](n)


def find_isomorphism(g: FiniteGroup, h: FiniteGroup) -> list[int] | None:
    """Brute-force search for a bijection phi with phi(ab) = phi(a)phi(b)."""
    if g.order != h.order:
        return None
    n = g.order
    for perm in itertools.permutations(range(n)):
        if perm[g.identity] != h.identity:
            continue
        phi = np.array(perm)
        if np.array_equal(phi[g.mult], h.mult[phi[:, None], phi[None, :]]):
            return list(perm)
    return None


class GroupAlgebraElement:
    """Finite sum ``sum_s c_s lambda_s`` in the group algebra of ``group``."""

    __slots__ = ("group", "coeffs")

    def __init__(self, group: FiniteGroup, coeffs: Mapping[int, complex] | None = None):
        self.group = group
        clean = {}
        for s, c in (coeffs or {}).items():
            s = int(s)
            if not 0 <= s < group.order:
                raise IndexError(f"element {s} not in {group.name}")
            c = complex(c)
            if c != 0:
                clean[s] = clean.get(s, 0) + c
        self.coeffs = {s: c for s, c in clean.items() if c != 0}

    @classmethod
    def basis(cls, group: FiniteGroup, s: int) -> "GroupAlgebraElement":
        return cls(group, {s: 1.0})

    @classmethod
    def from_vector(cls, group: FiniteGroup, vec) -> "GroupAlgebraElement":
        return cls(group, dict(enumerate(np.asarray(vec, dtype=complex))))

    def to_vector(self) -> np.ndarray:
        out = np.zeros(self.group.order, dtype=complex)
        for s, c in self.coeffs.items():
            out[s] = c
        return out

    def __getitem__(self, s: int) -> complex:
        return self.coeffs.get(s, 0j)

    def __repr__(self) -> str:
        body = " + ".join(f"({c:.6g})λ{s}" for s, c in sorted(self.coeffs.items()))
        return f"<{self.group.name}: {body or '0'}>"

    def _check(self, other: "GroupAlgebraElement"):
        if not self.group.same_as(other.group):
            raise GroupMismatchError(f"{self.group.name} vs {other.group.name}")

    def __add__(self, other: "GroupAlgebraElement") -> "GroupAlgebraElement":
        self._check(other)
        out = dict(self.coeffs)
        for s, c in other.coeffs.items():
            out[s] = out.get(s, 0) + c
        return GroupAlgebraElement(self.group, out)

    def __neg__(self):
        return GroupAlgebraElement(self.group, {s: -c for s, c in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rmul__(self, scalar: complex):
        return GroupAlgebraElement(self.group, {s: scalar * c for s, c in self.coeffs.items()})

    def __mul__(self, other):
        if isinstance(other, GroupAlgebraElement):
            return ga_mul(self.group, self, other)
        return self.__rmul__(other)

    def adjoint(self) -> "GroupAlgebraElement":
        return ga_adjoint(self)

    def trace(self) -> complex:
        return ga_trace(self)

    def distance(self, other: "GroupAlgebraElement") -> float:
        self._check(other)
        return float(np.linalg.norm(self.to_vector() - other.to_vector()))


def ga_mul(g: FiniteGroup, a: GroupAlgebraElement, b: GroupAlgebraElement) -> GroupAlgebraElement:
    """Convolution product: lambda_s lambda_r = lambda_{sr}, extended bilinearly."""
    if not (g.same_as(a.group) and g.same_as(b.group)):
        raise GroupMismatchError("ga_mul operands must live over the given group")
    out: dict[int, complex] = {}
    for s, c in a.coeffs.items():
        for r, d in b.coeffs.items():
            sr = int(g.mult[s, r])
            out[sr] = out.get(sr, 0) + c * d
    return GroupAlgebraElement(g, out)


def ga_adjoint(a: GroupAlgebraElement) -> GroupAlgebraElement:
    inv = a.group.inv
    return GroupAlgebraElement(a.group, {int(inv[s]): c.conjugate() for s, c in a.coeffs.items()})


def ga_trace(a: GroupAlgebraElement) -> complex:
    """Plancherel trace: the coefficient of lambda_identity."""
    return a[a.group.identity]
