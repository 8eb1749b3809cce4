"""Matching a real block of ``GL_n(C)`` with the full-rank orbits of a graded nilpotent variety.

For a weight ``phi`` that is unimodal about a half-integer ``r`` with a
plateau of height ``n`` on ``floor(r), ceil(r)``, the orbits with exactly
``n`` segments are in bijection with the parabolic double cosets of a
real block.  A standard module ``X(lamL, w lamR)`` goes to the
multisegment with segments ``[(w lamR)_i + 1/2, lamL_i - 1/2]``.

The bijection is also computed geometrically: the images of the powers of
``T`` on the left of ``r`` and the kernels of the powers on the right of
``r`` give two partial flags in ``V_{ceil r}``, and their relative
position is a double coset (see ``relative_position``).
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Sequence

from . import linalg
from .kgroups import (
    PADIC_SIMPLE,
    PADIC_STD,
    REAL_SIMPLE,
    REAL_STD,
    SHEAF_SIMPLE_PADIC,
    SHEAF_SIMPLE_REAL,
    SHEAF_STD_PADIC,
    SHEAF_STD_REAL,
    BasisChange,
    BasisLabel,
    KElement,
    OutsideComparisonRange,
    RealBlock,
    dual_change_of_basis,
    std_to_simple,
)
from .multisegments import (
    Multisegment,
    Segment,
    WeightFunction,
    admissible_r,
    enumerate_multisegments,
    open_orbit,
    to_point,
    weight_of,
)
from .vogan import GradedOperator, is_full_rank, jordan_rep, orbit_dimension
from .weyl import DoubleCosetLabel, Parabolic, _rep_from_table, act, dim_Z, parabolic_from

__all__ = [
    "HALF",
    "AssumptionFailure",
    "ApartConditionFailure",
    "tau",
    "parabolics_from_weight",
    "infchar_from_weight",
    "block_data_from_infchar",
    "gamma_std",
    "gamma",
    "ComparisonBlock",
    "comparison_block",
    "zeta_orbit",
    "zeta_orbit_inv",
    "zeta_pullback",
    "relative_position",
    "random_conjugate",
    "padic_std_to_simple",
]

HALF = Fraction(1, 2)


class AssumptionFailure(ValueError):
    """The weight is not unimodal about any admissible ``r``."""


class ApartConditionFailure(ValueError):
    pass


def _require_r(phi: WeightFunction) -> Fraction:
    if not phi.items:
        raise AssumptionFailure("empty weight")
    if not phi.is_integral():
        raise AssumptionFailure("comparison blocks are built per integral piece; split the weight first")
    rs = admissible_r(phi)
    if not rs:
        raise AssumptionFailure(f"{phi} is not unimodal with a plateau of length at least two")
    return rs[0]


def tau(lam: Sequence) -> tuple[Fraction, ...]:
    """``-w_0 lam``: negate and reverse."""
    return tuple(-to_point(x) for x in reversed(lam))


def parabolics_from_weight(phi: WeightFunction) -> tuple[Parabolic, Parabolic]:
    """Block sizes of the two parabolics attached to the plateau of ``phi``.

    The left one has the increments of ``phi`` up to ``floor(r)`` as blocks,
    read upwards.  The right one has the decrements of ``phi`` from
    ``ceil(r)`` on as blocks, read downwards from the top of the support.
    """
    r = _require_r(phi)
    lo, hi = r - HALF, r + HALF
    pts = phi.support()
    first, last = pts[0], pts[-1]
    left, prev = [], 0
    for i in range(int(lo - first) + 1):
        v = phi(first + i)
        if v - prev:
            left.append(v - prev)
        prev = v
    right, nxt = [], 0
    for i in range(int(last - hi) + 1):
        v = phi(last - i)
        if v - nxt:
            right.append(v - nxt)
        nxt = v
    return Parabolic(tuple(left)), Parabolic(tuple(right))


def infchar_from_weight(phi: WeightFunction, eL=HALF, eR=-HALF) -> RealBlock:
    """The real block whose ends and starts are those of the open orbit, shifted by ``eL`` and ``eR``."""
    eL, eR = to_point(eL), to_point(eR)
    if (eL - eR).denominator != 1:
        raise ValueError("eL - eR must be an integer")
    _require_r(phi)
    top = open_orbit(phi)
    lamL = sorted((s.b + eL for s in top), reverse=True)
    lamR = sorted((s.a + eR for s in top), reverse=True)
    return RealBlock(lamL, lamR)


def _check_apart(block: RealBlock) -> None:
    if block.n and min(block.lamL) <= max(block.lamR) + 1:
        raise ApartConditionFailure("min lamL must exceed max lamR + 1; apply a determinant twist first")


def block_data_from_infchar(block: RealBlock) -> tuple[int, Multisegment, WeightFunction]:
    _check_apart(block)
    m = sum(block.lamL) - sum(block.lamR)
    bm = Multisegment(Segment(r + HALF, l - HALF) for l, r in zip(block.lamL, block.lamR))
    return int(m), bm, weight_of(bm)


def _gamma_perm(block: RealBlock, w) -> Multisegment:
    wr = act(w, block.lamR)
    return Multisegment(Segment(r + HALF, l - HALF) for l, r in zip(block.lamL, wr))


def gamma_std(block: RealBlock, w: DoubleCosetLabel | Sequence[int]) -> Multisegment:
    """Multisegment of the standard module ``X(lamL, w lamR)``."""
    _check_apart(block)
    c = w if isinstance(w, DoubleCosetLabel) else block.coset(tuple(w))
    if (c.J, c.K) != (block.J, block.K):
        raise ValueError("double coset does not belong to this block")
    lo = _gamma_perm(block, c.w_min)
    if lo != _gamma_perm(block, c.w_max):
        raise AssertionError("segment assignment depends on the coset representative")
    return lo


def gamma(block: RealBlock, elem: KElement) -> KElement:
    """Send real standard (simple) modules of ``block`` to p-adic standard (simple) modules."""
    out = []
    for lab, c in elem:
        if lab.block != block or lab.tag not in (REAL_STD, REAL_SIMPLE):
            raise ValueError("gamma takes representation-side labels of its block")
        tag = PADIC_STD if lab.tag == REAL_STD else PADIC_SIMPLE
        out.append((BasisLabel(tag, gamma_std(block, lab.payload)), c))
    return KElement(out)


@dataclass(frozen=True)
class ComparisonBlock:
    """Real block together with the weight of its multisegment images."""

    real: RealBlock
    phi: WeightFunction
    r: Fraction
    n: int
    left: Parabolic
    right: Parabolic
    mass: int
    bm: Multisegment

    @classmethod
    def from_real(cls, real: RealBlock) -> "ComparisonBlock":
        mass, bm, phi = block_data_from_infchar(real)
        r = _require_r(phi)
        left, right = parabolics_from_weight(phi)
        n = phi(r - HALF)
        if n != real.n or phi(r + HALF) != n:
            raise AssertionError("plateau height differs from the rank of the block")
        return cls(real, phi, r, n, left, right, mass, bm)

    @cached_property
    def rep_labels(self) -> list[DoubleCosetLabel]:
        return self.real.rep_labels()

    @cached_property
    def sheaf_labels(self) -> list[DoubleCosetLabel]:
        return self.real.sheaf_labels()

    @cached_property
    def images(self) -> dict[DoubleCosetLabel, Multisegment]:
        """Rep label ``w`` -> multisegment of ``X_w``."""
        return {w: gamma_std(self.real, w) for w in self.rep_labels}

    @cached_property
    def preimages(self) -> dict[Multisegment, DoubleCosetLabel]:
        inv = {m: w for w, m in self.images.items()}
        if len(inv) != len(self.images):
            raise AssertionError("two cosets share a multisegment")
        return inv

    @cached_property
    def orbits(self) -> list[Multisegment]:
        return enumerate_multisegments(self.phi, mass_bound=max(self.phi.mass(), 16))

    @cached_property
    def full_rank_orbits(self) -> list[Multisegment]:
        return [m for m in self.orbits if is_full_rank(m, self.phi)]

    def to_json(self) -> dict:
        rows = []
        for w in self.rep_labels:
            m = self.images[w]
            v = w.inverse()
            rows.append(
                {
                    "coset": list(w.w_min),
                    "dual_orbit": list(v.w_min),
                    "multisegment": str(m),
                    "orbit_dim": orbit_dimension(m),
                    "coset_orbit_dim": dim_Z(v),
                    "sign": (-1) ** orbit_dimension(m),
                }
            )
        return {
            "phi": self.phi.to_json(),
            "r": [self.r.numerator, self.r.denominator],
            "n": self.n,
            "mass": self.mass,
            "left_parabolic": list(self.left.composition),
            "right_parabolic": list(self.right.composition),
            "lamL": [str(x) for x in self.real.lamL],
            "lamR": [str(x) for x in self.real.lamR],
            "minimal_multisegment": str(self.bm),
            "orbits": [
                {"multisegment": str(m), "dim": orbit_dimension(m), "full_rank": is_full_rank(m, self.phi)}
                for m in self.orbits
            ],
            "bijection": rows,
        }


def comparison_block(phi: WeightFunction, eL=HALF, eR=-HALF) -> ComparisonBlock:
    return ComparisonBlock.from_real(infchar_from_weight(phi, eL, eR))


def zeta_orbit(block: ComparisonBlock, v: DoubleCosetLabel) -> Multisegment:
    """Full-rank orbit matched with the orbit ``Z_v`` (``v`` a sheaf label)."""
    return block.images[v.inverse()]


def zeta_orbit_inv(block: ComparisonBlock, m: Multisegment) -> DoubleCosetLabel | None:
    """Sheaf label ``v`` with ``zeta_orbit(block, v) == m``, or ``None`` off the full-rank part."""
    if weight_of(m) != block.phi:
        raise ValueError("multisegment has the wrong weight")
    w = block.preimages.get(m)
    return None if w is None else w.inverse()


def zeta_pullback(block: ComparisonBlock, elem: KElement) -> KElement:
    """Restrict p-adic sheaf classes to the full-rank part and transport them to the real side."""
    out = []
    for lab, c in elem:
        if lab.tag not in (SHEAF_STD_PADIC, SHEAF_SIMPLE_PADIC):
            raise ValueError("zeta_pullback takes p-adic sheaf labels")
        v = zeta_orbit_inv(block, lab.payload)
        if v is None:
            continue
        shift = orbit_dimension(lab.payload) - dim_Z(v)
        tag = SHEAF_STD_REAL if lab.tag == SHEAF_STD_PADIC else SHEAF_SIMPLE_REAL
        out.append((BasisLabel(tag, v, block.real), c * (-1) ** shift))
    return KElement(out)


def _random_invertible(size: int, rng: random.Random) -> list[list[Fraction]]:
    while True:
        mat = [[Fraction(rng.randint(-3, 3)) for _ in range(size)] for _ in range(size)]
        if linalg.rank(mat) == size:
            return mat


def random_conjugate(T: GradedOperator, seed: int = 0) -> GradedOperator:
    """``g T g^{-1}`` for a random graded automorphism ``g``."""
    rng = random.Random(seed)
    phi = T.dims
    g = {p: _random_invertible(c, rng) for p, c in phi.items}
    blocks = {}
    for p in phi.support():
        if phi(p + 1):
            blocks[p] = linalg.matmul(linalg.matmul(g[p + 1], T.block(p)), linalg.inverse(g[p]))
    return GradedOperator(phi, blocks)


def _column_space(mat) -> list[list[Fraction]]:
    """Basis of the column space, as column vectors."""
    cols = [list(c) for c in zip(*mat)] if mat and mat[0] else []
    basis: list[list[Fraction]] = []
    for c in cols:
        if linalg.rank(basis + [c]) > len(basis):
            basis.append(c)
    return basis


def _kernel(mat, ncols: int) -> list[list[Fraction]]:
    """Basis of the null space of ``mat`` (``rows x ncols``)."""
    rows = [list(map(Fraction, r)) for r in mat]
    pivots, r = [], 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        p = rows[r][c]
        rows[r] = [x / p for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    free = [c for c in range(ncols) if c not in pivots]
    out = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for i, pc in enumerate(pivots):
            v[pc] = -rows[i][f]
        out.append(v)
    return out


def _dim_intersection(a: list, b: list) -> int:
    return len(a) + len(b) - linalg.rank(a + b)


def relative_position(block: ComparisonBlock, T: GradedOperator) -> DoubleCosetLabel | None:
    """Sheaf label of the orbit containing ``T``, from the two flags in ``V_{ceil r}``.

    ``A_k = T_{floor r} T^k (V_{floor r - k})`` and ``B_l = ker(T^l | V_{ceil r})``.
    Returns ``None`` off the full-rank part, i.e. unless ``T`` is injective
    up to ``floor r`` and surjective from ``ceil r`` on.
    """
    phi, n = block.phi, block.n
    lo, hi = block.r - HALF, block.r + HALF
    if T.dims != phi:
        raise ValueError("operator does not live on this weight")
    middle = T.block(lo)
    for i in phi.support():
        if phi(i + 1) == 0:
            continue
        full = phi(i) if i <= lo else phi(i + 1)
        if linalg.rank(T.block(i)) < full:
            return None
    # flags: A_k for k = 0.., B_l for l = 0..
    left_flag = []
    mat = linalg.identity(n)
    k = 0
    while True:
        left_flag.append(_column_space(linalg.matmul(middle, mat)) if mat and mat[0] else [])
        src = lo - k - 1
        if phi(src) == 0:
            break
        mat = linalg.matmul(mat, T.block(src))
        k += 1
    left_flag.append([])
    right_flag = [[]]
    mat = linalg.identity(n)
    l = 0
    while True:
        dst = hi + l
        if phi(dst + 1) == 0:
            break
        mat = linalg.matmul(T.block(dst), mat)
        l += 1
        right_flag.append(_kernel(mat, n))
    right_flag.append([[Fraction(int(i == j)) for i in range(n)] for j in range(n)])
    # counts[k][l] = #segments starting at or below lo - k and ending below hi + l
    starts = sorted({s.a for s in block.bm}, reverse=True)
    ends = sorted({s.b for s in block.bm}, reverse=True)
    table = [[0] * len(starts) for _ in ends]

    def count(start_le, end_le):
        kk = int(lo - start_le)
        ll = int(end_le - hi) + 1
        if kk < 0 or ll < 0:
            return 0
        a = left_flag[min(kk, len(left_flag) - 1)]
        b = right_flag[min(ll, len(right_flag) - 1)]
        return _dim_intersection(a, b)

    for p, e in enumerate(ends):
        for q, s in enumerate(starts):
            val = count(s, e) - count(s - 1, e) - count(s, e - 1) + count(s - 1, e - 1)
            table[p][q] = val
    rep = _rep_from_table(block.real.J, block.real.K, table, maximal=False)
    return block.real.coset(rep).inverse()


def padic_std_to_simple(block: ComparisonBlock, side: str = "sheaf") -> BasisChange:
    """Simple objects in standard objects on the full-rank part, transported from the real side."""
    real_sheaf = std_to_simple(block.real, "sheaf", normalized=True)
    vs = [lab.payload for lab in real_sheaf.cols]
    ms = [zeta_orbit(block, v) for v in vs]
    dims = [orbit_dimension(m) for m in ms]
    size = len(ms)
    raw = [[real_sheaf.matrix[i][j] * (-1) ** (dims[j] - dims[i]) for j in range(size)] for i in range(size)]
    if side == "sheaf":
        return BasisChange(
            [BasisLabel(SHEAF_STD_PADIC, m) for m in ms],
            [BasisLabel(SHEAF_SIMPLE_PADIC, m) for m in ms],
            raw,
        )
    if side != "rep":
        raise ValueError("side must be 'sheaf' or 'rep'")
    sign = {m: (-1) ** d for m, d in zip(ms, dims)}
    mat = dual_change_of_basis(ms, ms, raw, lambda m: m, sign.__getitem__)
    return BasisChange([BasisLabel(PADIC_STD, m) for m in ms], [BasisLabel(PADIC_SIMPLE, m) for m in ms], mat)


def padic_to_standard(block: ComparisonBlock):
    """Callable rewriting p-adic simple labels of ``block`` in standard bases, for ``pairing``."""
    rep = padic_std_to_simple(block, "rep")
    sheaf = padic_std_to_simple(block, "sheaf")

    def convert(elem: KElement) -> KElement:
        out: dict[BasisLabel, int] = {}
        for lab, c in elem:
            change = {PADIC_SIMPLE: rep, SHEAF_SIMPLE_PADIC: sheaf}.get(lab.tag)
            if change is None:
                out[lab] = out.get(lab, 0) + c
                continue
            cols = {x.payload: j for j, x in enumerate(change.cols)}
            if lab.payload not in cols:
                raise OutsideComparisonRange(f"{lab.payload} is not a full-rank orbit of this block")
            j = cols[lab.payload]
            for i, row in enumerate(change.rows):
                if change.matrix[i][j]:
                    out[row] = out.get(row, 0) + c * change.matrix[i][j]
        return KElement(out)

    return convert


__all__ += ["padic_to_standard"]
