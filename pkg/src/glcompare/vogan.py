"""Points of the graded nilpotent variety and their orbits.

For a weight ``phi`` the space ``E_phi`` consists of degree-raising maps
``T_i : V_i -> V_{i+1}`` with ``dim V_i = phi(i)``; the group of graded
automorphisms acts by conjugation.  Orbits correspond to multisegments via
the Jordan cells of ``T``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Mapping

from . import linalg
from .multisegments import (
    Multisegment,
    Segment,
    WeightFunction,
    assumption_r,
    coset_key,
    integral_pieces,
    to_point,
    weight_of,
)

__all__ = [
    "GradedOperator",
    "jordan_rep",
    "jordan_type",
    "orbit_dimension",
    "operator_orbit_dimension",
    "space_dimension",
    "group_dimension",
    "is_full_rank",
    "layout_order",
]


@dataclass(frozen=True)
class GradedOperator:
    """Degree-one map on a graded space; ``blocks[i]`` is ``phi(i+1) x phi(i)``."""

    dims: WeightFunction
    blocks: Mapping[Fraction, tuple[tuple[Fraction, ...], ...]] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for deg, mat in dict(self.blocks).items():
            deg = to_point(deg)
            rows = tuple(tuple(Fraction(x) for x in row) for row in mat)
            src, dst = self.dims(deg), self.dims(deg + 1)
            if src == 0 or dst == 0:
                if any(any(row) for row in rows):
                    raise ValueError(f"nonzero block at degree {deg} outside the support")
                continue
            if len(rows) != dst or any(len(r) != src for r in rows):
                raise ValueError(f"block at degree {deg} should be {dst}x{src}")
            clean[deg] = rows
        object.__setattr__(self, "blocks", clean)

    def block(self, deg: Fraction) -> linalg.Matrix:
        src, dst = self.dims(deg), self.dims(deg + 1)
        if deg in self.blocks:
            return [list(r) for r in self.blocks[deg]]
        return linalg.zeros(dst, src)

    def to_json(self) -> dict:
        return {
            "dims": self.dims.to_json(),
            "blocks": [
                [[d.numerator, d.denominator], [[[x.numerator, x.denominator] for x in row] for row in mat]]
                for d, mat in sorted(self.blocks.items())
            ],
        }

    @classmethod
    def from_json(cls, d: Mapping) -> "GradedOperator":
        dims = WeightFunction.from_json(d["dims"])
        blocks = {to_point(deg): [[to_point(x) for x in row] for row in mat] for deg, mat in d["blocks"]}
        return cls(dims, blocks)


def layout_order(m: Multisegment) -> list[Segment]:
    """Basis layout: earlier starts first, then longer segments first."""
    return sorted(m.segments, key=lambda s: (s.a, -s.b))


def jordan_rep(m: Multisegment) -> GradedOperator:
    """A point of ``E_phi`` whose Jordan cells are the segments of ``m``."""
    phi = weight_of(m)
    order = layout_order(m)
    index: dict[Fraction, list[int]] = {}
    for k, seg in enumerate(order):
        for p in seg.points():
            index.setdefault(p, []).append(k)
    pos = {p: {k: i for i, k in enumerate(ks)} for p, ks in index.items()}
    blocks = {}
    for p in phi.support():
        q = p + 1
        if phi(q) == 0:
            continue
        mat = linalg.zeros(phi(q), phi(p))
        for k, col in pos[p].items():
            if k in pos[q]:
                mat[pos[q][k]][col] = Fraction(1)
        blocks[p] = mat
    return GradedOperator(phi, blocks)


def _composite_ranks(T: GradedOperator) -> dict[tuple[Fraction, Fraction], int]:
    """``(i, j) -> rank of T_{j-1} ... T_i`` for ``i <= j`` in the support."""
    phi = T.dims
    out = {}
    for i in phi.support():
        out[(i, i)] = phi(i)
        mat = linalg.identity(phi(i))
        j = i
        while phi(j + 1):
            mat = linalg.matmul(T.block(j), mat)
            j += 1
            out[(i, j)] = linalg.rank(mat)
    return out


def jordan_type(T: GradedOperator) -> Multisegment:
    """The multisegment labelling the orbit of ``T``."""
    r = _composite_ranks(T)

    def rk(i, j):
        return r.get((i, j), 0)

    segs = []
    for (i, j), _ in r.items():
        c = rk(i, j) - rk(i - 1, j) - rk(i, j + 1) + rk(i - 1, j + 1)
        if c < 0:
            raise ArithmeticError("inconsistent rank data")
        segs.extend([Segment(i, j)] * c)
    return Multisegment(segs)


def space_dimension(phi: WeightFunction) -> int:
    """``dim E_phi``."""
    return sum(c * phi(p + 1) for p, c in phi.items)


def group_dimension(phi: WeightFunction) -> int:
    return sum(c * c for _, c in phi.items)


def operator_orbit_dimension(T: GradedOperator) -> int:
    """Rank of ``g -> (g_{i+1} T_i - T_i g_i)`` on graded endomorphisms ``g``.

    That rank is ``dim G_phi`` minus the stabilizer dimension, i.e. the orbit
    dimension.
    """
    phi = T.dims
    var: dict[tuple[Fraction, int, int], int] = {}
    for p, c in phi.items:
        for a in range(c):
            for b in range(c):
                var[(p, a, b)] = len(var)
    rows: list[dict[int, Fraction]] = []
    for p in phi.support():
        q = p + 1
        if not phi(q):
            continue
        t = T.block(p)
        for x in range(phi(q)):
            for y in range(phi(p)):
                # entry (x, y) of g_q T_p - T_p g_p
                row: dict[int, Fraction] = {}
                for z in range(phi(q)):
                    if t[z][y]:
                        k = var[(q, x, z)]
                        row[k] = row.get(k, 0) + t[z][y]
                for z in range(phi(p)):
                    if t[x][z]:
                        k = var[(p, z, y)]
                        row[k] = row.get(k, 0) - t[x][z]
                rows.append(row)
    return linalg.sparse_rank(rows)


@lru_cache(maxsize=65536)
def orbit_dimension(m: Multisegment) -> int:
    return operator_orbit_dimension(jordan_rep(m))


def is_full_rank(m: Multisegment, phi: WeightFunction) -> bool:
    """True iff on every integral piece ``m`` has exactly ``phi(floor r)`` segments."""
    if weight_of(m) != phi:
        raise ValueError("multisegment does not have the given weight")
    pieces = assumption_r(phi)
    if pieces is None:
        raise ValueError("weight does not satisfy the unimodality assumption")
    for piece, r in pieces:
        n = piece(r - Fraction(1, 2))
        key = coset_key(piece.support()[0])
        count = sum(1 for s in m if coset_key(s.a) == key)
        if count != n:
            return False
    return True


def pieces_of(m: Multisegment) -> dict[Fraction, Multisegment]:
    out: dict[Fraction, list[Segment]] = {}
    for s in m:
        out.setdefault(coset_key(s.a), []).append(s)
    return {k: Multisegment(v) for k, v in out.items()}


__all__ += ["pieces_of", "integral_pieces"]
