"""Symmetric groups, parabolic subgroups and parabolic double cosets.

Permutations are tuples in one-line notation on ``1..n``.  Products compose
right to left, ``(x * y)(i) = x(y(i))``, and a permutation acts on vectors
by ``(w . v)_i = v_{w^{-1}(i)}``, so ``w . e_i = e_{w(i)}``.

Double cosets ``W_J \\ S_n / W_K`` are in bijection with nonnegative
integer matrices whose row sums are the block sizes of ``J`` and whose
column sums are the block sizes of ``K``; entry ``(p, q)`` counts the
points of block ``q`` of ``K`` that ``w`` sends into block ``p`` of ``J``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

__all__ = [
    "Perm",
    "identity",
    "compose",
    "inverse",
    "length",
    "simple",
    "act",
    "reduced_word",
    "bruhat_leq",
    "longest",
    "all_perms",
    "Parabolic",
    "parabolic_from",
    "is_dominant",
    "DoubleCosetLabel",
    "double_cosets",
    "double_coset_of",
    "dim_Z",
    "dim_stabilizer",
    "parabolic_elements",
    "NotDominant",
]

Perm = tuple[int, ...]


class NotDominant(ValueError):
    pass


def identity(n: int) -> Perm:
    return tuple(range(1, n + 1))


def compose(x: Perm, y: Perm) -> Perm:
    return tuple(x[i - 1] for i in y)


def inverse(w: Perm) -> Perm:
    out = [0] * len(w)
    for i, v in enumerate(w, start=1):
        out[v - 1] = i
    return tuple(out)


def length(w: Perm) -> int:
    n = len(w)
    return sum(1 for i in range(n) for j in range(i + 1, n) if w[i] > w[j])


def simple(i: int, n: int) -> Perm:
    """The transposition ``s_i = (i, i+1)``."""
    w = list(range(1, n + 1))
    w[i - 1], w[i] = w[i], w[i - 1]
    return tuple(w)


def act(w: Perm, v: Sequence) -> tuple:
    winv = inverse(w)
    return tuple(v[winv[i] - 1] for i in range(len(v)))


def reduced_word(w: Perm) -> list[int]:
    """Indices ``i_1..i_l`` with ``w = s_{i_1} ... s_{i_l}``."""
    w = list(w)
    word = []
    while True:
        for i in range(len(w) - 1):
            if w[i] > w[i + 1]:
                w[i], w[i + 1] = w[i + 1], w[i]
                word.append(i + 1)
                break
        else:
            break
    return word[::-1]


def bruhat_leq(x: Perm, w: Perm) -> bool:
    """Tableau criterion: sorted prefixes of ``x`` are dominated by those of ``w``."""
    for k in range(1, len(x)):
        a = sorted(x[:k])
        b = sorted(w[:k])
        if any(p > q for p, q in zip(a, b)):
            return False
    return True


def longest(n: int) -> Perm:
    return tuple(range(n, 0, -1))


@lru_cache(maxsize=None)
def all_perms(n: int) -> tuple[Perm, ...]:
    return tuple(itertools.permutations(range(1, n + 1)))


@dataclass(frozen=True)
class Parabolic:
    """A parabolic subgroup of ``S_n``, stored as its block composition."""

    composition: tuple[int, ...]

    def __post_init__(self):
        if any(c <= 0 for c in self.composition):
            raise ValueError("composition parts must be positive")

    @property
    def n(self) -> int:
        return sum(self.composition)

    @classmethod
    def from_simple(cls, J: Iterable[int], n: int) -> "Parabolic":
        J = set(J)
        comp, size = [], 1
        for i in range(1, n):
            if i in J:
                size += 1
            else:
                comp.append(size)
                size = 1
        if n:
            comp.append(size)
        return cls(tuple(comp))

    @classmethod
    def trivial(cls, n: int) -> "Parabolic":
        return cls((1,) * n)

    @classmethod
    def full(cls, n: int) -> "Parabolic":
        return cls((n,) if n else ())

    def simple_reflections(self) -> frozenset[int]:
        out, start = set(), 1
        for c in self.composition:
            out.update(range(start, start + c - 1))
            start += c
        return frozenset(out)

    def block_of(self) -> tuple[int, ...]:
        """``block_of()[i-1]`` is the block index of position ``i``."""
        return tuple(b for b, c in enumerate(self.composition) for _ in range(c))

    def blocks(self) -> list[range]:
        out, start = [], 1
        for c in self.composition:
            out.append(range(start, start + c))
            start += c
        return out

    def longest_element(self) -> Perm:
        w = []
        for blk in self.blocks():
            w.extend(reversed(blk))
        return tuple(w)

    def order(self) -> int:
        out = 1
        for c in self.composition:
            for k in range(2, c + 1):
                out *= k
        return out

    def contains(self, w: Perm) -> bool:
        b = self.block_of()
        return all(b[i] == b[w[i] - 1] for i in range(len(w)))

    def reversed(self) -> "Parabolic":
        return Parabolic(tuple(reversed(self.composition)))

    def __str__(self) -> str:
        return "(" + ",".join(map(str, self.composition)) + ")"


def parabolic_elements(P: Parabolic) -> list[Perm]:
    """All elements of ``W_P``, by brute force over block permutations."""
    per_block = [list(itertools.permutations(blk)) for blk in P.blocks()]
    out = []
    for choice in itertools.product(*per_block):
        w = []
        for part in choice:
            w.extend(part)
        out.append(tuple(w))
    return sorted(out)


def is_dominant(lam: Sequence) -> bool:
    """Weakly decreasing on every pair of entries with integral difference."""
    lam = [Fraction(x) for x in lam]
    return all(
        lam[i] >= lam[j]
        for i in range(len(lam))
        for j in range(i + 1, len(lam))
        if (lam[i] - lam[j]).denominator == 1
    )


def parabolic_from(lam: Sequence) -> Parabolic:
    """Blocks of equal adjacent entries of a dominant sequence."""
    return _parabolic_from(tuple(Fraction(x) for x in lam))


@lru_cache(maxsize=4096)
def _parabolic_from(lam: tuple[Fraction, ...]) -> Parabolic:
    if not is_dominant(lam):
        raise NotDominant(f"not dominant: {[str(x) for x in lam]}")
    return Parabolic.from_simple([i for i in range(1, len(lam)) if lam[i - 1] == lam[i]], len(lam))


def _table(J: Parabolic, K: Parabolic, w: Perm) -> tuple[tuple[int, ...], ...]:
    bj, bk = J.block_of(), K.block_of()
    t = [[0] * len(K.composition) for _ in J.composition]
    for i, v in enumerate(w):
        t[bj[v - 1]][bk[i]] += 1
    return tuple(tuple(r) for r in t)


def _rep_from_table(J: Parabolic, K: Parabolic, table, maximal: bool) -> Perm:
    jblocks = [list(b) for b in J.blocks()]
    kblocks = [list(b) for b in K.blocks()]
    w = [0] * J.n
    if not maximal:
        # K-blocks consume the positions of each J-block in increasing order
        cursor = [0] * len(jblocks)
        for q, kb in enumerate(kblocks):
            elems = iter(kb)
            for p, jb in enumerate(jblocks):
                for _ in range(table[p][q]):
                    w[next(elems) - 1] = jb[cursor[p]]
                    cursor[p] += 1
    else:
        # decreasing on K-blocks, inverse decreasing on J-blocks
        cursor = [len(jb) for jb in jblocks]
        for q, kb in enumerate(kblocks):
            elems = iter(kb)
            for p in reversed(range(len(jblocks))):
                for _ in range(table[p][q]):
                    cursor[p] -= 1
                    w[next(elems) - 1] = jblocks[p][cursor[p]]
    return tuple(w)


@dataclass(frozen=True)
class DoubleCosetLabel:
    """The double coset ``W_J w_min W_K``."""

    J: Parabolic
    K: Parabolic
    w_min: Perm

    @property
    def n(self) -> int:
        return len(self.w_min)

    def table(self) -> tuple[tuple[int, ...], ...]:
        return _table(self.J, self.K, self.w_min)

    @property
    def w_max(self) -> Perm:
        return _rep_from_table(self.J, self.K, self.table(), maximal=True)

    def inverse(self) -> "DoubleCosetLabel":
        """The coset ``W_K w^{-1} W_J``."""
        return double_coset_of(self.K, self.J, inverse(self.w_min))

    def elements(self) -> list[Perm]:
        left = parabolic_elements(self.J)
        right = parabolic_elements(self.K)
        return sorted({compose(compose(u, self.w_min), v) for u in left for v in right})

    def size(self) -> int:
        t = self.table()
        out = self.J.order() * self.K.order()
        denom = 1
        for row in t:
            for x in row:
                for k in range(2, x + 1):
                    denom *= k
        return out // denom

    def __le__(self, other: "DoubleCosetLabel") -> bool:
        return bruhat_leq(self.w_min, other.w_min)

    def __lt__(self, other: "DoubleCosetLabel") -> bool:
        return self != other and self <= other

    def __str__(self) -> str:
        return "".join(map(str, self.w_min)) if self.n < 10 else ",".join(map(str, self.w_min))


def double_coset_of(J: Parabolic, K: Parabolic, w: Perm) -> DoubleCosetLabel:
    if J.n != len(w) or K.n != len(w):
        raise ValueError("rank mismatch")
    return DoubleCosetLabel(J, K, _rep_from_table(J, K, _table(J, K, w), maximal=False))


def _tables(rows: tuple[int, ...], cols: tuple[int, ...]):
    if not rows:
        if all(c == 0 for c in cols):
            yield ()
        return
    first, rest = rows[0], rows[1:]

    def fill(q, left, acc):
        if q == len(cols) - 1:
            if left <= cols[q]:
                yield acc + (left,)
            return
        for x in range(min(left, cols[q]) + 1):
            yield from fill(q + 1, left - x, acc + (x,))

    if not cols:
        return
    for row in fill(0, first, ()):
        remaining = tuple(c - x for c, x in zip(cols, row))
        for tail in _tables(rest, remaining):
            yield (row,) + tail


def double_cosets(J: Parabolic, K: Parabolic, n: int | None = None) -> list[DoubleCosetLabel]:
    """All double cosets ``W_J \\ S_n / W_K``, ordered by ``w_min`` lexicographically."""
    if n is not None and (J.n != n or K.n != n):
        raise ValueError("rank mismatch")
    out = [
        DoubleCosetLabel(J, K, _rep_from_table(J, K, t, maximal=False))
        for t in _tables(J.composition, K.composition)
    ]
    return sorted(out, key=lambda c: c.w_min)


def _levi_or_positive(P: Parabolic, i: int, j: int) -> bool:
    """Is the root ``e_i - e_j`` a root of the upper-triangular parabolic ``P``?"""
    b = P.block_of()
    return i < j or b[i - 1] == b[j - 1]


def dim_stabilizer(J: Parabolic, K: Parabolic, w: Perm) -> int:
    """``dim(P_J \\cap w P_K w^{-1})``, by counting roots."""
    n = len(w)
    winv = inverse(w)
    count = n
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            if i != j and _levi_or_positive(J, i, j) and _levi_or_positive(K, winv[i - 1], winv[j - 1]):
                count += 1
    return count


def dim_Z(c: DoubleCosetLabel) -> int:
    """Dimension of the diagonal orbit through ``(P_J, w P_K)`` in ``G/P_J x G/P_K``."""
    return c.n * c.n - dim_stabilizer(c.J, c.K, c.w_min)
