"""Dyadic cubes Q_{j,m} = 2^-j([0,1)^d + m) and the finite cube families
that carry the suprema in the Morrey-type quasi-norms.

Why a finite family suffices
----------------------------
Let the support be a finite set of cells.  For any dyadic P that is not an
ancestor-or-self of a support cell:

* the b-, f- and level-wise Morrey expressions only see cells contained in P
  (or, for P inside a cell, the cell's own value times φ(ℓ(P)) <= φ(ℓ(cell)));
* for the e-expression the integrand g is constant (= c) on P and >= c on the
  parent, so the parent's value dominates since φ is non-decreasing.

So only ancestors-or-self of support cells matter.  Going to coarser levels, a
chain's content stops changing once its cube holds all support cells of its
orthant (dyadic cubes never straddle a coordinate hyperplane through 0).  From
then on the value is φ(2^-ν) 2^{νd/p} times a constant, non-increasing as ν
decreases because t^{-d/p} φ(t) is non-increasing for φ ∈ G_p.  The tree below
therefore stops at the first level where every occupied orthant has a single
node.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .weights import WeightFunction, check_gp

OFFSET_LIMIT = 2 ** 52


class CubeRangeError(ValueError):
    pass


class PreconditionError(ValueError):
    pass


@dataclass(frozen=True, order=True)
class DyadicCube:
    """Half-open cube 2^-level ([0,1)^d + offset).  Ordering is canonical: level, then offset."""

    level: int
    offset: tuple

    def __post_init__(self):
        off = tuple(int(x) for x in self.offset)
        if any(abs(x) >= OFFSET_LIMIT for x in off):
            raise CubeRangeError(f"offset {off} exceeds the exact-integer range")
        object.__setattr__(self, "offset", off)
        object.__setattr__(self, "level", int(self.level))

    @property
    def d(self) -> int:
        return len(self.offset)

    @property
    def side(self) -> float:
        return math.ldexp(1.0, -self.level)

    def ancestor(self, level: int) -> "DyadicCube":
        if level > self.level:
            raise ValueError("ancestor level must not exceed the cube's level")
        k = self.level - level
        return DyadicCube(level, tuple(m >> k for m in self.offset))

    def parent(self) -> "DyadicCube":
        return self.ancestor(self.level - 1)

    def children(self):
        for bits in itertools.product((0, 1), repeat=self.d):
            yield DyadicCube(self.level + 1, tuple(2 * m + b for m, b in zip(self.offset, bits)))

    def bounds(self):
        """Exact per-coordinate [lo, hi) as Fractions."""
        s = Fraction(1, 2 ** self.level) if self.level >= 0 else Fraction(2 ** -self.level)
        return [(m * s, (m + 1) * s) for m in self.offset]

    def to_json(self):
        return [self.level, list(self.offset)]


def contains(P: DyadicCube, Q: DyadicCube) -> bool:
    """Q ⊆ P as point sets."""
    if P.d != Q.d:
        raise ValueError("dimension mismatch")
    if Q.level < P.level:
        return False
    k = Q.level - P.level
    return all((mq >> k) == mp for mq, mp in zip(Q.offset, P.offset))


def canonical(cubes) -> tuple:
    """Deduplicated cubes in canonical (level-major, lexicographic offset) order."""
    return tuple(sorted(set(cubes)))


def index_set_I(J: int, j: int, m, r: float = 1.5, C: float = 1.5) -> tuple:
    """{M : r Q_{J,M} ∩ C Q_{j,m} ≠ ∅}, dilations about cube centres.

    Touching closed cubes do not count: the overlap must have interior.
    """
    if J < 0 or j < 0:
        raise ValueError("levels must be non-negative")
    if r <= 0 or C <= 0:
        raise ValueError("dilation factors must be positive")
    m = tuple(int(x) for x in m)
    scale = Fraction(2) ** (J - j)          # side of Q_{j,m} in units of 2^-J
    half = (Fraction(r) + Fraction(C) * scale) / 2
    ranges = []
    for mi in m:
        a = scale * (mi + Fraction(1, 2)) - Fraction(1, 2)  # centre of C Q in M-coordinates
        lo = math.floor(a - half) + 1
        hi = math.ceil(a + half) - 1
        ranges.append(range(lo, hi + 1))
    return tuple(DyadicCube(J, off) for off in itertools.product(*ranges))


# ---------------------------------------------------------------------------
# level-indexed tree of ancestors, vectorised with numpy

def _unique_rows(a: np.ndarray):
    if a.shape[1] == 1:
        u, inv = np.unique(a[:, 0], return_inverse=True)
        return u.reshape(-1, 1), inv.reshape(-1)
    u, inv = np.unique(a, axis=0, return_inverse=True)
    return u, inv.reshape(-1)


def n_orthants(offsets: np.ndarray) -> int:
    if offsets.size == 0:
        return 0
    return len(np.unique(offsets < 0, axis=0))


class CubeTree:
    """Ancestors-or-self of a finite set of cells, level by level.

    ``cells`` maps level -> int array of shape (n, d) (rows need not be unique).
    After construction, for each level ``l`` in ``levels``:

    * ``offsets[l]``: sorted unique node offsets (n_l, d)
    * ``parent[l]``: index of each node's parent in ``offsets[l-1]`` (absent at the top level)
    * ``cell_pos[l]``: node index of every input row at level l
    * ``n_children[l]``: number of child nodes of each node

    The top level is the stability level (one node per occupied orthant, at or
    above every cell level).
    """

    def __init__(self, cells: dict, d: int):
        self.d = d
        cells = {int(l): np.asarray(v, dtype=np.int64).reshape(-1, d) for l, v in cells.items() if len(v)}
        self.offsets, self.parent, self.cell_pos, self.n_children = {}, {}, {}, {}
        if not cells:
            self.levels = range(0)
            self.top = self.bottom = None
            return
        for v in cells.values():
            if np.any(np.abs(v) >= OFFSET_LIMIT):
                raise CubeRangeError("offset exceeds the exact-integer range")
        allcells = np.concatenate(list(cells.values()))
        orth = n_orthants(allcells)
        lo_cell, hi = min(cells), max(cells)
        self.bottom = hi
        nxt = None
        l = hi
        while True:
            parts = []
            own = cells.get(l)
            if own is not None:
                parts.append(own)
            if nxt is not None:
                parts.append(nxt >> 1)
            stacked = np.concatenate(parts)
            uniq, inv = _unique_rows(stacked)
            self.offsets[l] = uniq
            k = 0
            if own is not None:
                self.cell_pos[l] = inv[: len(own)]
                k = len(own)
            if nxt is not None:
                self.parent[l + 1] = inv[k:]
            nxt = uniq
            if l <= lo_cell and len(uniq) == orth:
                break
            l -= 1
        self.top = l
        self.levels = range(self.top, self.bottom + 1)
        for l in self.levels:
            n = len(self.offsets[l])
            if l + 1 in self.parent:
                self.n_children[l] = np.bincount(self.parent[l + 1], minlength=n)
            else:
                self.n_children[l] = np.zeros(n, dtype=np.int64)

    def __len__(self):
        return sum(len(self.offsets[l]) for l in self.levels)

    def lift(self, values: np.ndarray, src: int, dst: int, op: str = "sum") -> np.ndarray:
        """Aggregate per-node ``values`` at level ``src`` onto their ancestors at level ``dst``."""
        v = values
        for l in range(src, dst, -1):
            n = len(self.offsets[l - 1])
            if op == "sum":
                v = np.bincount(self.parent[l], weights=v, minlength=n)
            else:
                out = np.zeros(n)
                np.maximum.at(out, self.parent[l], v)
                v = out
        return v

    def ancestor_index(self, src: int, dst: int) -> np.ndarray:
        idx = np.arange(len(self.offsets[src]))
        for l in range(src, dst, -1):
            idx = self.parent[l][idx]
        return idx

    def cubes(self):
        for l in self.levels:
            for off in self.offsets[l]:
                yield DyadicCube(l, tuple(int(x) for x in off))


def cells_by_level(support, d: int | None = None) -> tuple[dict, int]:
    """Group (level, offset) pairs or DyadicCubes into level -> offsets arrays."""
    out: dict[int, list] = {}
    for c in support:
        if isinstance(c, DyadicCube):
            l, off = c.level, c.offset
        else:
            l, off = c
        off = tuple(int(x) for x in off)
        if d is None:
            d = len(off)
        out.setdefault(int(l), []).append(off)
    return {l: np.array(v, dtype=np.int64).reshape(-1, d) for l, v in out.items()}, (d or 1)


def relevant_cubes(support, phi: WeightFunction, p: float) -> tuple:
    """Finite cube family on which every quasi-norm supremum is attained.

    ``support`` is an iterable of DyadicCube or (level, offset) pairs.
    """
    if not check_gp(phi, p):
        raise PreconditionError(f"weight not in G_p for p={p}; the stability argument needs it")
    cells, d = cells_by_level(support)
    return canonical(CubeTree(cells, d).cubes())


__all__ = [
    "DyadicCube", "CubeTree", "CubeRangeError", "PreconditionError", "contains", "canonical",
    "index_set_I", "relevant_cubes", "cells_by_level", "n_orthants", "OFFSET_LIMIT",
]
